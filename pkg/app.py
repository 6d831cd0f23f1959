"""
==============================================================================
CONCEPTION DE MAINS PORTE-OUTIL - POINT D'ENTRÉE EN LIGNE DE COMMANDE
==============================================================================
Pipeline de conception de mains robotiques multi-doigts capables de manier
un outil cylindrique : échantillonnage des conceptions validées par trois
poses fondamentales (carve, poke, press), planification de la rotation de
l'outil depuis chaque pose, évaluation et paysages des scores.

Sous-commandes :
- validate-seed : amorce et valide les trois poses de la conception graine
- sample : échantillonnage RRT des conceptions
- plan : six trajectoires par candidat
- evaluate : métriques, scores, front de Pareto
- landscape : paysages SVG / HTML des scores

Codes de sortie : 0 succès, 1 erreur interne, 2 erreur de configuration
ou d'utilisation.

Usage:
    python app.py validate-seed --config config/exemple_config.json --out sorties/
    python app.py sample --config config/exemple_config.json --out sorties/ --mode 2d
    python app.py plan --candidats sorties/candidats.jsonl --out sorties/chemins --workers 4
    python app.py evaluate --candidats sorties/candidats.jsonl --chemins sorties/chemins --out sorties/scores.csv
    python app.py landscape --csv sorties/scores.csv --out sorties/carve.svg --fp carve --metric amplitude

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import argparse
import sys

from config import settings
from core import ErreurConfiguration
from utils import pipeline
from utils.logger import definir_niveau, log_erreur, setup_logger

CODE_SUCCES = 0
CODE_ERREUR_INTERNE = 1
CODE_ERREUR_UTILISATEUR = 2

# ==============================================================================
# ANALYSE DES ARGUMENTS
# ==============================================================================

def construire_parseur():
    """Parseur argparse avec une sous-commande par étape du pipeline."""
    commun = argparse.ArgumentParser(add_help=False)
    commun.add_argument('--config', help='Fichier de configuration JSON (défauts sinon)')
    commun.add_argument('--log-level', default=None,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        help='Niveau de log')

    parser = argparse.ArgumentParser(
        prog='app.py',
        description=settings.APP_CONFIG['description'],
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    sous = parser.add_subparsers(dest='commande', required=True)

    p = sous.add_parser('validate-seed', parents=[commun], help='Valider la conception graine')
    p.add_argument('--out', required=True, help="Dossier du fichier d'états initiaux")

    p = sous.add_parser('sample', parents=[commun], help='Échantillonner des conceptions')
    p.add_argument('--out', required=True, help='Dossier de sortie')
    p.add_argument('--mode', choices=['2d', '6d'], help="Dimensions échantillonnées")
    p.add_argument('--seed', type=int, help='Graine du générateur aléatoire')

    p = sous.add_parser('plan', parents=[commun], help='Planifier les trajectoires')
    p.add_argument('--candidats', required=True, help='Fichier de candidats (JSONL)')
    p.add_argument('--out', required=True, help='Dossier des trajectoires')
    p.add_argument('--workers', type=int, help='Nombre de processus')
    p.add_argument('--resume', action='store_true', help='Ignorer les candidats déjà planifiés')

    p = sous.add_parser('evaluate', parents=[commun], help='Évaluer les candidats')
    p.add_argument('--candidats', required=True, help='Fichier de candidats (JSONL)')
    p.add_argument('--chemins', required=True, help='Dossier des trajectoires')
    p.add_argument('--out', required=True, help='CSV des scores')
    p.add_argument('--workers', type=int, help='Nombre de processus')
    p.add_argument('--xlsx', action='store_true', help='Écrire aussi un classeur Excel')

    p = sous.add_parser('landscape', parents=[commun], help='Paysage des scores')
    p.add_argument('--csv', required=True, help='CSV des scores')
    p.add_argument('--out', required=True, help='SVG à écrire')
    p.add_argument('--fp', default='carve', choices=settings.ORDRE_FP)
    p.add_argument('--metric', default='amplitude', choices=list(settings.METRIQUES))
    p.add_argument('--axes', nargs=2, default=['d2', 'd3'], metavar=('X', 'Y'),
                   help='Colonnes en abscisse et ordonnée')
    p.add_argument('--toutes', action='store_true', help='Grille 3 x 3 (FP x métrique)')
    p.add_argument('--html', action='store_true', help='Écrire aussi la version Plotly')
    p.add_argument('--courbe-seuil', action='store_true', help="Courbe de seuil d'amplitude")
    return parser

# ==============================================================================
# EXÉCUTION
# ==============================================================================

def executer(args):
    if args.commande == 'validate-seed':
        pipeline.cmd_validate_seed(args.config, args.out)
    elif args.commande == 'sample':
        pipeline.cmd_sample(args.config, args.out, mode=args.mode, graine=args.seed)
    elif args.commande == 'plan':
        pipeline.cmd_plan(args.candidats, args.out, args.config, args.workers, args.resume)
    elif args.commande == 'evaluate':
        pipeline.cmd_evaluate(args.candidats, args.chemins, args.out, args.config, args.workers, args.xlsx)
    elif args.commande == 'landscape':
        pipeline.cmd_landscape(args.csv, args.out, args.fp, args.metric, tuple(args.axes),
                               toutes=args.toutes, html=args.html, seuils=args.courbe_seuil)


def main(argv=None):
    """
    Point d'entrée : retourne le code de sortie.

    Example:
        >>> main(['landscape', '--csv', 'scores.csv', '--out', 'p.svg', '--fp', 'poke'])
        0
    """
    args = construire_parseur().parse_args(argv)
    if args.log_level:
        definir_niveau(args.log_level)
    logger = setup_logger('app')

    try:
        executer(args)
    except (ErreurConfiguration, settings.ErreurConfigurationFichier, pipeline.ErreurEntree,
            FileNotFoundError) as e:
        logger.error(f"❌ {e}")
        return CODE_ERREUR_UTILISATEUR
    except Exception as e:
        log_erreur('app', f"Échec de la commande {args.commande}", e)
        return CODE_ERREUR_INTERNE
    return CODE_SUCCES


if __name__ == '__main__':
    sys.exit(main())
