"""
==============================================================================
MODULE D'ORCHESTRATION DU PIPELINE
==============================================================================
Enchaînement échantillonnage -> planification -> évaluation -> paysages,
avec persistance JSONL, reprise, parallélisme borné et manifeste
d'exécution.

Fonctions principales :
- cmd_validate_seed() : amorce et valide la graine, écrit ses états FP
- cmd_sample() : échantillonnage RRT, fichier de candidats
- cmd_plan() : six trajectoires par candidat (reprise possible)
- cmd_evaluate() : métriques, scores, Pareto, CSV + résumé JSON (+ Excel)
- cmd_landscape() : paysages SVG (et HTML) depuis le CSV des scores
- executer_par_lots() : map ordonné, séquentiel ou ProcessPoolExecutor

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings
from core import ErreurConfiguration, ErreurHorsBornes, __version__ as VERSION_MOTEUR
from core.evaluate import construire_table_scores, courbe_seuil, metriques_candidat, resume
from core.model import DesignParams, standardize
from core.planner import PlanConfig, plan_all
from core.sampler import (
    ContexteConception,
    SamplerConfig,
    amorcer_graine,
    attempt_fps,
    coverage_estimate,
    run_sampling
)
from utils import charts
from utils.data_loader import (
    EcrivainJsonl,
    charger_candidats,
    charger_chemins,
    charger_etats_initiaux,
    chemins_complets,
    ecrire_chemins,
    ecrire_etats_initiaux,
    ecrire_manifeste,
    entete,
    serialiser_candidat
)
from utils.helpers import (
    convert_df_to_csv,
    convert_df_to_excel,
    formater_duree,
    formater_pourcentage,
    nom_fichier_chemins,
    valider_colonnes
)
from utils.logger import log_erreur, log_export, log_performance, log_validation, setup_logger

logger = setup_logger('pipeline')


class ErreurEntree(ValueError):
    """Entrée utilisateur invalide (colonne inconnue, fichier incohérent)."""

# ==============================================================================
# FONCTION 1 : OUTILS COMMUNS
# ==============================================================================

def executer_par_lots(fonction, taches, nb_workers=1):
    """
    Applique `fonction` à chaque tâche et rend les résultats dans l'ordre.

    Args:
        fonction (callable): Fonction de niveau module (sérialisable)
        taches (list): Arguments, un par appel
        nb_workers (int): 1 = séquentiel, sinon ProcessPoolExecutor

    Yields:
        Résultats dans l'ordre des tâches
    """
    if nb_workers <= 1 or len(taches) <= 1:
        for tache in taches:
            yield fonction(tache)
        return
    with ProcessPoolExecutor(max_workers=nb_workers) as executor:
        yield from executor.map(fonction, taches)


def _json_propre(valeur):
    """Remplace récursivement NaN / inf par None et les types numpy par des natifs."""
    if isinstance(valeur, dict):
        return {str(k): _json_propre(v) for k, v in valeur.items()}
    if isinstance(valeur, (list, tuple)):
        return [_json_propre(v) for v in valeur]
    if isinstance(valeur, (bool, np.bool_)):
        return bool(valeur)
    if isinstance(valeur, (int, np.integer)):
        return int(valeur)
    if isinstance(valeur, (float, np.floating)):
        return float(valeur) if math.isfinite(valeur) else None
    return valeur


def _config_et_contexte(config):
    return config, ContexteConception.depuis_config(config)


def _config_depuis_entete(tete, chemin_config=None):
    """Configuration explicite si fournie, sinon celle de l'en-tête, sinon les défauts."""
    if chemin_config is not None:
        return settings.charger_config_pipeline(chemin_config)
    if tete is not None and 'config' in tete:
        return settings.config_depuis_dict(tete['config'])
    return settings.charger_config_pipeline(None)


def _graine(config, ctx):
    """Conception graine et ses états FP (fichier d'états ou amorçage)."""
    try:
        d = DesignParams.depuis_vecteur(config.conception_initiale, l_tot=config.l_tot)
    except (ErreurHorsBornes, ValueError) as e:
        raise ErreurConfiguration(f"Conception graine invalide : {e}") from e
    if config.chemin_etats_initiaux:
        d_fichier, etats = charger_etats_initiaux(config.chemin_etats_initiaux)
        if not np.allclose(d_fichier.vecteur(), d.vecteur()):
            raise ErreurConfiguration("États initiaux calculés pour une autre conception")
        return d, etats
    return d, amorcer_graine(d, ctx)

# ==============================================================================
# FONCTION 2 : VALIDATION DE LA GRAINE
# ==============================================================================

def cmd_validate_seed(chemin_config, dossier_sortie):
    """
    Amorce les trois FP de la conception graine et les valide.

    Args:
        chemin_config (str ou None): Fichier de configuration JSON
        dossier_sortie (str): Dossier où écrire le fichier d'états initiaux

    Returns:
        Path: Fichier d'états initiaux écrit

    Raises:
        ErreurConfiguration: Première condition d'acceptation violée
    """
    config, ctx = _config_et_contexte(settings.charger_config_pipeline(chemin_config))
    d, etats = _graine(config, ctx)
    for nom, etat in etats.items():
        ctx.references.setdefault(nom, np.asarray(etat.theta_h))
    valides, couts = attempt_fps(d, etats, ctx)
    if valides is None:
        log_validation('graine', False, 1, str(couts))
        raise ErreurConfiguration(f"{settings.MESSAGES['error']['invalid_seed']} : {couts}")

    chemin = Path(dossier_sortie) / settings.EXPORT_CONFIG['fichier_etats_initiaux']
    ecrire_etats_initiaux(chemin, d, valides)
    log_validation('graine', True)
    logger.info(settings.MESSAGES['success']['graine_valide'])
    return chemin

# ==============================================================================
# FONCTION 3 : ÉCHANTILLONNAGE
# ==============================================================================

def cmd_sample(chemin_config, dossier_sortie, mode=None, graine=None):
    """
    Échantillonne des conceptions et écrit le fichier de candidats.

    Le fichier commence par un en-tête (version, hash et contenu de la
    configuration) suivi d'un CandidateRecord par ligne, écrit dès
    l'acceptation.

    Args:
        chemin_config (str ou None): Fichier de configuration JSON
        dossier_sortie (str): Dossier de sortie
        mode (str, optional): '2d' ou '6d' (remplace la configuration)
        graine (int, optional): Graine du générateur (remplace la configuration)

    Returns:
        ResultatEchantillonnage

    Raises:
        ErreurConfiguration: Graine invalide ou configuration incohérente
    """
    debut = time.perf_counter()
    config = settings.charger_config_pipeline(chemin_config)
    if mode is not None:
        config.echantillonnage['mode'] = mode
    if graine is not None:
        config.echantillonnage['graine'] = int(graine)
    config, ctx = _config_et_contexte(config)
    cfg = SamplerConfig.depuis_config(config.echantillonnage)
    d_graine, etats_graine = _graine(config, ctx)

    dossier = Path(dossier_sortie)
    chemin = dossier / settings.EXPORT_CONFIG['fichier_candidats']
    hash_cfg = settings.hash_config(config)
    try:
        with EcrivainJsonl(chemin) as ecrivain:
            ecrivain.ecrire(entete(config, hash_cfg, cfg.mode))
            resultat = run_sampling(cfg, ctx, d_graine, etats_graine,
                                    rappel=lambda r: ecrivain.ecrire(serialiser_candidat(r)))
    except ErreurConfiguration as e:
        log_erreur('cmd_sample', "Échantillonnage interrompu", e)
        raise

    couverture = _couverture([c.d for c in resultat.candidats], ctx, cfg.mode)
    duree = time.perf_counter() - debut
    ecrire_manifeste(dossier, _json_propre({
        'commande': 'sample',
        'version': VERSION_MOTEUR,
        'hash_config': hash_cfg,
        'mode': cfg.mode,
        'nb_candidats': len(resultat.candidats),
        'nb_appels': resultat.nb_appels,
        'efficacite': resultat.efficacites[-1] if resultat.efficacites else None,
        'raison_arret': resultat.raison_arret,
        'couverture': couverture,
        'duree_s': duree
    }))
    log_export('JSONL', len(resultat.candidats), str(chemin))
    log_performance('échantillonnage', duree, resultat.nb_appels)
    logger.info(
        f"{settings.MESSAGES['success']['echantillonnage']} : {len(resultat.candidats)} candidats, "
        f"{resultat.nb_appels} appels, arrêt '{resultat.raison_arret}' ({formater_duree(duree)})"
    )
    return resultat


def _couverture(conceptions, ctx, mode):
    """Couverture sur les dimensions échantillonnées, None sous deux candidats."""
    if len(conceptions) < 2:
        return None
    X = np.array([standardize(d, ctx.d_min, ctx.d_max) for d in conceptions])
    if mode == '2d':
        X = X[:, settings.INDICES_MODE_2D]
    return coverage_estimate(X)

# ==============================================================================
# FONCTION 4 : PLANIFICATION
# ==============================================================================

def _planifier_candidat(tache):
    candidat, ctx, cfg = tache
    return candidat.indice, plan_all(candidat, ctx, cfg)


def cmd_plan(chemin_candidats, dossier_sortie, chemin_config=None, nb_workers=None, reprise=False):
    """
    Planifie les six trajectoires de chaque candidat.

    Un fichier `chemins_candidat_NNNNNN.jsonl` par candidat, écrit par le
    seul processus principal. En reprise, les candidats dont le fichier est
    complet sont ignorés.

    Args:
        chemin_candidats (str): Fichier de candidats
        dossier_sortie (str): Dossier des trajectoires
        chemin_config (str, optional): Configuration (sinon celle de l'en-tête)
        nb_workers (int, optional): Processus (sinon config.nb_workers)
        reprise (bool): Ignorer les candidats déjà planifiés

    Returns:
        dict: Manifeste de l'exécution
    """
    debut = time.perf_counter()
    tete, candidats, erreurs = charger_candidats(chemin_candidats)
    config, ctx = _config_et_contexte(_config_depuis_entete(tete, chemin_config))
    cfg = PlanConfig.depuis_config(config.planification)
    nb_workers = int(nb_workers or config.nb_workers)
    dossier = Path(dossier_sortie)
    dossier.mkdir(parents=True, exist_ok=True)

    a_planifier, ignores = [], 0
    for candidat in candidats:
        fichier = dossier / nom_fichier_chemins(candidat.indice)
        if reprise and fichier.exists():
            chemins, erreurs_fichier = charger_chemins(fichier)
            if not erreurs_fichier and chemins_complets(chemins, list(ctx.fps)):
                ignores += 1
                continue
        a_planifier.append((candidat, ctx, cfg))

    logger.info(f"🧭 {len(a_planifier)} candidats à planifier ({ignores} déjà faits, {nb_workers} processus)")
    for indice, chemins in executer_par_lots(_planifier_candidat, a_planifier, nb_workers):
        ecrire_chemins(dossier / nom_fichier_chemins(indice), chemins)

    duree = time.perf_counter() - debut
    manifeste = _json_propre({
        'commande': 'plan',
        'version': VERSION_MOTEUR,
        'hash_config': settings.hash_config(config),
        'fichier_candidats': str(chemin_candidats),
        'nb_candidats': len(candidats),
        'nb_planifies': len(a_planifier),
        'nb_repris': ignores,
        'lignes_corrompues': erreurs,
        'duree_s': duree
    })
    ecrire_manifeste(dossier, manifeste)
    log_performance('planification', duree, len(a_planifier))
    logger.info(settings.MESSAGES['success']['planification'])
    return manifeste

# ==============================================================================
# FONCTION 5 : ÉVALUATION
# ==============================================================================

def _evaluer_candidat(tache):
    candidat, fichier, ctx = tache
    ligne = {'candidat': candidat.indice, 'd': candidat.d.vecteur().tolist(), 'complet': False}
    chemins = []
    if fichier.exists():
        chemins, erreurs = charger_chemins(fichier)
        ligne['complet'] = not erreurs and chemins_complets(chemins, list(ctx.fps))
    if ligne['complet']:
        ligne.update(metriques_candidat(candidat.d, chemins, ctx))
    return ligne, chemins


def cmd_evaluate(chemin_candidats, dossier_chemins, chemin_csv, chemin_config=None,
                 nb_workers=None, excel=False):
    """
    Évalue tous les candidats et écrit la table des scores.

    Écrit le CSV, un résumé JSON à côté (`<nom>_resume.json`) et, sur
    demande, un classeur Excel. Un candidat sans ses six trajectoires est
    marqué incomplet et exclu de la normalisation.

    Returns:
        tuple: (pd.DataFrame table des scores, dict résumé)
    """
    debut = time.perf_counter()
    tete, candidats, _ = charger_candidats(chemin_candidats)
    config, ctx = _config_et_contexte(_config_depuis_entete(tete, chemin_config))
    nb_workers = int(nb_workers or config.nb_workers)
    dossier = Path(dossier_chemins)

    taches = [(c, dossier / nom_fichier_chemins(c.indice), ctx) for c in candidats]
    lignes, chemins_par_candidat = [], {}
    for ligne, chemins in executer_par_lots(_evaluer_candidat, taches, nb_workers):
        lignes.append(ligne)
        if ligne['complet']:
            chemins_par_candidat[ligne['candidat']] = chemins
        else:
            logger.warning(f"{settings.MESSAGES['warning']['chemins_incomplets']} : {ligne['candidat']}")

    table = construire_table_scores(lignes)
    mode = (tete or {}).get('mode', config.echantillonnage['mode'])
    synthese = resume(table, chemins_par_candidat, _couverture([c.d for c in candidats], ctx, mode))

    chemin_csv = Path(chemin_csv)
    chemin_csv.parent.mkdir(parents=True, exist_ok=True)
    chemin_csv.write_bytes(convert_df_to_csv(table))
    log_export('CSV', len(table), str(chemin_csv))
    chemin_resume = chemin_csv.with_name(f"{chemin_csv.stem}_resume.json")
    chemin_resume.write_text(json.dumps(_json_propre(synthese), sort_keys=True, indent=2) + '\n',
                             encoding='utf-8')
    if excel:
        chemin_xlsx = chemin_csv.with_suffix('.xlsx')
        chemin_xlsx.write_bytes(convert_df_to_excel(table))
        log_export('Excel', len(table), str(chemin_xlsx))

    log_performance('évaluation', time.perf_counter() - debut, len(table))
    logger.info(
        f"{settings.MESSAGES['success']['evaluation']} : succès "
        f"{formater_pourcentage(synthese['fraction_succes'])}, {synthese['nb_pareto']} sur le front"
    )
    return table, synthese

# ==============================================================================
# FONCTION 6 : PAYSAGES
# ==============================================================================

def lire_table_scores(chemin_csv):
    """CSV des scores ; un fichier vide donne un DataFrame vide."""
    try:
        return pd.read_csv(chemin_csv)
    except pd.errors.EmptyDataError:
        return pd.DataFrame()


def cmd_landscape(chemin_csv, chemin_svg, fp='carve', metrique='amplitude', axes=('d2', 'd3'),
                  toutes=False, html=False, seuils=False):
    """
    Paysage des scores en SVG déterministe.

    Args:
        chemin_csv (str): CSV de cmd_evaluate
        chemin_svg (str): SVG à écrire
        fp (str): FP colorée (ignorée si `toutes`)
        metrique (str): Métrique colorée (ignorée si `toutes`)
        axes (tuple): Colonnes en abscisse et ordonnée
        toutes (bool): Grille 3 x 3
        html (bool): Écrire aussi la version Plotly (.html)
        seuils (bool): Tracer la courbe de seuil d'amplitude à la place

    Returns:
        Path: SVG écrit

    Raises:
        ErreurEntree: Colonne inconnue
    """
    table = lire_table_scores(chemin_csv)
    axe_x, axe_y = axes
    if seuils:
        colonnes = [f"{nom}_amplitude" for nom in settings.ORDRE_FP] + ['complet']
    elif toutes:
        colonnes = [axe_x, axe_y] + [f"score_{f}_{m}" for f in settings.ORDRE_FP for m in settings.METRIQUES]
    else:
        colonnes = [axe_x, axe_y, f"score_{fp}_{metrique}"]
    manquantes = valider_colonnes(table, colonnes) if len(table.columns) else []
    if manquantes:
        raise ErreurEntree(f"{settings.MESSAGES['error']['unknown_column']} : {', '.join(manquantes)}")

    if seuils:
        if len(table.columns) == 0:
            table = pd.DataFrame(columns=colonnes)
        figure = charts.creer_courbe_seuil(courbe_seuil(table))
    elif toutes:
        figure = charts.creer_grille_paysages(table, axe_x, axe_y)
    else:
        figure = charts.creer_paysage(table, f"score_{fp}_{metrique}", axe_x, axe_y)

    chemin_svg = Path(chemin_svg)
    chemin_svg.parent.mkdir(parents=True, exist_ok=True)
    chemin_svg.write_bytes(charts.figure_vers_svg(figure))
    log_export('SVG', len(table), str(chemin_svg))

    if html and not seuils and len(table):
        interactif = charts.creer_paysage_interactif(table, f"score_{fp}_{metrique}", axe_x, axe_y, toutes)
        chemin_html = chemin_svg.with_suffix('.html')
        chemin_html.write_bytes(charts.figure_vers_html(interactif))
        log_export('HTML', len(table), str(chemin_html))
    return chemin_svg
