"""
==============================================================================
CONFIGURATION CENTRALE DE LA CONCEPTION DE MAINS PORTE-OUTIL
==============================================================================
Fichier de configuration centralisé pour le pipeline de conception de
mains robotiques multi-doigts capables de manier un outil cylindrique
(échantillonnage des conceptions, planification des trajectoires,
évaluation des candidats).

Ce fichier contient :
- Chemins des répertoires de sortie et de logs
- Bornes de l'espace de conception (d1..d6) et longueur totale des doigts
- Géométrie de l'outil, modèle de frottement, effort de pointe
- Paramètres de l'échantillonneur RRT et du planificateur
- Tolérances des solveurs QP / NLP
- Tables des poses fondamentales (carve, poke, press)
- Paramètres visuels, logs et export
- Chargement / validation d'un fichier de configuration JSON

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

# ==============================================================================
# CHEMINS DES FICHIERS
# ==============================================================================

# Répertoire de base du projet
BASE_DIR = Path(__file__).resolve().parent.parent

# Répertoire des logs (créé au besoin)
LOGS_DIR = BASE_DIR / "logs"
LOGS_DIR.mkdir(parents=True, exist_ok=True)

# ==============================================================================
# CONFIGURATION DE L'APPLICATION
# ==============================================================================

APP_CONFIG = {
    'nom': 'conception-main-outil',
    'description': 'Conception de mains multi-doigts par poses fondamentales',
    'version': '1.0',
    'year': 2026
}

# ==============================================================================
# ESPACE DE CONCEPTION
# ==============================================================================

# Longueur totale d'un doigt (phalange proximale + distale), en mm
L_TOT = 100.0

# Noms et unités des six paramètres de conception
NOMS_PARAMETRES = ['d1', 'd2', 'd3', 'd4', 'd5', 'd6']

LABELS_PARAMETRES = {
    'd1': 'Longueur distale (mm)',
    'd2': 'Longueur de paume (mm)',
    'd3': 'Demi-largeur de paume (mm)',
    'd4': 'Rayon des doigts (mm)',
    'd5': 'Angle de paume (rad)',
    'd6': 'Angle du pouce (rad)'
}

BORNES_CONCEPTION = {
    'd_min': [30.0, 40.0, 15.0, 5.0, -0.6, 0.3],
    'd_max': [70.0, 110.0, 45.0, 12.0, 0.6, 1.5]
}

# Conception initiale (graine de l'arbre RRT), validée par `validate-seed`
CONCEPTION_INITIALE = [45.0, 55.0, 25.0, 7.0, 0.0, 0.9]

# Indices actifs en mode 2D : longueur et demi-largeur de paume
INDICES_MODE_2D = [1, 2]

# ==============================================================================
# OUTIL, FROTTEMENT ET EFFORT DE POINTE
# ==============================================================================

OUTIL_CONFIG = {
    'rayon': 5.0,        # mm
    'longueur': 150.0,   # mm
    'pointe': 150.0      # coordonnée axiale de la pointe (mm)
}

FROTTEMENT_CONFIG = {
    'mu': 0.5,
    'nb_facettes': 8,
    'force_normale_min': 0.1   # N
}

EFFORT_POINTE_CONFIG = {
    'magnitude': 10.0          # N
}

# Marge de collision entre segments (mm)
MARGE_COLLISION = 1.0

# ==============================================================================
# ARTICULATIONS DES DOIGTS
# ==============================================================================

# Bornes [min, max] de u_f1 (flexion MCP), u_f2 (abduction MCP), u_f3 (IP)
LIMITES_ARTICULAIRES = {
    'min': [-0.35, -0.6, 0.0],
    'max': [1.6, 0.6, 1.75]
}

# Roulis fixe du pouce autour de son axe longitudinal (rad)
ROULIS_POUCE = math.pi / 4

# Contact sur la phalange distale : distance minimale à l'articulation IP,
# exprimée en rayons de doigt
MARGE_CONTACT_IP = 1.0

# Cartes de la calotte distale : seuils de changement de carte (rad)
CARTES_CONFIG = {
    'seuil_pole': 0.05,        # carte 0 -> carte 1 à moins de 0.05 rad du pôle
    'seuil_retour': 0.3,       # carte 1 -> carte 0 au-delà de pi/2 - 0.3
    'marge_domaine': 0.02      # bornes des coordonnées dans le solveur
}

# ==============================================================================
# ÉCHANTILLONNAGE RRT
# ==============================================================================

ECHANTILLONNAGE_CONFIG = {
    'pas': 0.02,
    'distance_min': 0.015,
    'nb_candidats_cible': 100,
    'seuil_efficacite': 0.01,
    'fenetre_efficacite': 500,
    'graine': 0,
    'lambda_abduction': 0.5,
    'conditionnement_max': 1e6,
    'mode': '2d',
    'intervalle_progression': 50
}

# ==============================================================================
# PLANIFICATION DES TRAJECTOIRES
# ==============================================================================

PLANIFICATION_CONFIG = {
    'vitesse_outil': 0.2,        # rad/s
    'pas_temps': 0.02,           # s
    'nb_pas_max': 500,
    'regularisation': 1e-6,
    'pas_blocage': 3,
    'facteur_mediane': 10.0,
    'projection': True,
    'tolerance_projection': 1e-10,
    'iterations_projection': 5
}

# ==============================================================================
# SOLVEURS
# ==============================================================================

SOLVEUR_CONFIG = {
    'tol_con': 1e-8,
    'tol_opt': 1e-6,
    'max_iter_nlp': 200,
    'max_iter_qp': 500,
    'tol_qp': 1e-9,
    'tol_etat_perime': 1e-4
}

# ==============================================================================
# POSES FONDAMENTALES (FP)
# ==============================================================================
# Doigts : 0 index, 1 majeur, 2 annulaire, 3 pouce.
# Les paires de pincement sont des indices de contacts (pas de doigts).
# `coords_doigt` : a_f1 en fraction de la longueur cylindrique distale, a_f2 en rad.

FP_CONFIG = {
    'carve': {
        'doigts': [3, 0, 1],
        'mobiles': [3, 0, 1],
        'paires_pincement': [],
        'regle_axe': 'centroide',
        'selecteur_cout': 'carve_moment',
        'posture_repos': [1.3, 0.0, 1.4],
        'boite_poignet': [40.0, 40.0, 40.0, 0.8, 0.8, 0.8],
        'bornes_a_t1': [5.0, 145.0],
        'disposition_nominale': {
            'regle_axe_initiale': 'normale_plan',
            'postures': [[0.6, 0.0, 0.6], [1.1, 0.25, 1.0], [1.1, -0.05, 1.0]],
            'coords_doigt': [[0.75, -1.5708], [0.75, -1.5708], [0.75, -1.5708]],
            'hauteur_prise': 100.0
        }
    },
    'poke': {
        'doigts': [0, 2, 3, 1],
        'mobiles': [3, 1],
        'paires_pincement': [[0, 1], [2, 3]],
        'regle_axe': 'pincement',
        'selecteur_cout': 'pinch_alignment',
        'posture_repos': [1.3, 0.0, 1.4],
        'boite_poignet': [40.0, 40.0, 40.0, 0.8, 0.8, 0.8],
        'bornes_a_t1': [5.0, 145.0],
        'disposition_nominale': {
            'regle_axe_initiale': 'milieux',
            'postures': [[1.0, 0.3, 0.8], [1.0, -0.3, 0.8], [0.5, 0.0, 0.5], [1.0, 0.0, 1.2]],
            'coords_doigt': [[0.7, 0.0], [0.7, 3.1416], [0.75, -1.5708], [0.75, -1.5708]],
            'hauteur_prise': 60.0
        }
    },
    'press': {
        'doigts': [1, 3, 0, 2],
        'mobiles': [0, 2],
        'paires_pincement': [[0, 1]],
        'regle_axe': 'pincement',
        'selecteur_cout': 'pinch_alignment',
        'posture_repos': [1.3, 0.0, 1.4],
        'boite_poignet': [40.0, 40.0, 40.0, 0.8, 0.8, 0.8],
        'bornes_a_t1': [5.0, 145.0],
        'disposition_nominale': {
            'regle_axe_initiale': 'extremites',
            'postures': [[1.3, 0.0, 1.0], [0.6, 0.0, 0.5], [0.9, 0.0, 0.6], [0.9, 0.0, 0.6]],
            'coords_doigt': [[0.75, -1.5708], [0.75, -1.5708], [0.75, -1.5708], [0.75, -1.5708]],
            'hauteur_prise': 75.0
        }
    }
}

# Ordre canonique des FP dans les fichiers et les tableaux de scores
ORDRE_FP = ['carve', 'poke', 'press']

# ==============================================================================
# MÉTRIQUES ET SCORES
# ==============================================================================

METRIQUES = {
    'amplitude': {'label': 'Amplitude de rotation (rad)', 'orientation': 'higher_better'},
    'glissement': {'label': 'Glissement moyen (mm/s)', 'orientation': 'lower_better'},
    'couple': {'label': 'Couple articulaire max (N.mm)', 'orientation': 'lower_better'}
}

# Seuils d'amplitude (rad) pour la courbe de seuil
SEUILS_AMPLITUDE = [0.0, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0, 3.0, 4.0]

# ==============================================================================
# COULEURS ET GRAPHIQUES
# ==============================================================================

COULEURS_FP = {
    'carve': '#1f4e79',
    'poke': '#2e8b57',
    'press': '#c0392b'
}

GRAPH_CONFIG = {
    'font_family': 'DejaVu Sans',
    'font_size': 10,
    'title_font_size': 12,
    'colormap': 'viridis',
    'taille_figure': [6.0, 5.0],
    'taille_grille': [13.0, 12.0],
    'taille_point': 18,
    'couleur_pareto': '#c0392b',
    'hashsalt': 'conception-main-outil'
}

PLOTLY_TEMPLATE = 'plotly_white'

# ==============================================================================
# CONFIGURATION DES LOGS
# ==============================================================================

LOGGING_CONFIG = {
    'level': 'INFO',  # Niveaux : DEBUG, INFO, WARNING, ERROR, CRITICAL
    'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    'date_format': '%Y-%m-%d %H:%M:%S',
    'max_bytes': 10 * 1024 * 1024,  # 10 MB
    'backup_count': 5,
    'log_file': str(LOGS_DIR / 'pipeline.log'),
    'encoding': 'utf-8',
    'seuil_lent': 5.0  # secondes
}

# ==============================================================================
# PARAMÈTRES D'EXPORT
# ==============================================================================

EXPORT_CONFIG = {
    'csv': {
        'encoding': 'utf-8',
        'sep': ',',
        'index': False,
        'float_format': '%.10g'
    },
    'excel': {
        'engine': 'openpyxl',
        'index': False,
        'sheet_name': 'Scores'
    },
    'fichier_candidats': 'candidats.jsonl',
    'fichier_etats_initiaux': 'etats_initiaux.json',
    'prefixe_chemins': 'chemins_candidat',
    'fichier_manifeste': 'manifeste.json'
}

# ==============================================================================
# MESSAGES SYSTÈME
# ==============================================================================

MESSAGES = {
    'success': {
        'graine_valide': '✅ Graine validée sur les trois poses fondamentales',
        'echantillonnage': '✅ Échantillonnage terminé',
        'planification': '✅ Planification terminée',
        'evaluation': '✅ Évaluation terminée',
        'export_success': '✅ Export réussi'
    },
    'error': {
        'file_not_found': '❌ Fichier introuvable',
        'invalid_config': '❌ Configuration invalide',
        'invalid_seed': '❌ Graine invalide',
        'unknown_column': '❌ Colonne inconnue'
    },
    'warning': {
        'ligne_corrompue': '⚠️ Ligne corrompue ignorée',
        'chemins_incomplets': '⚠️ Chemins incomplets pour un candidat'
    }
}

# ==============================================================================
# CONFIGURATION DU PIPELINE (FICHIER JSON)
# ==============================================================================

# Sections d'un fichier de configuration et valeurs par défaut associées
SECTIONS_PIPELINE = {
    'bornes': BORNES_CONCEPTION,
    'outil': OUTIL_CONFIG,
    'frottement': FROTTEMENT_CONFIG,
    'effort_pointe': EFFORT_POINTE_CONFIG,
    'echantillonnage': ECHANTILLONNAGE_CONFIG,
    'planification': PLANIFICATION_CONFIG,
    'solveur': SOLVEUR_CONFIG,
    'limites_articulaires': LIMITES_ARTICULAIRES,
    'fp': FP_CONFIG
}

CLES_SIMPLES = {
    'conception_initiale': CONCEPTION_INITIALE,
    'chemin_etats_initiaux': None,
    'nb_workers': 1,
    'marge_collision': MARGE_COLLISION,
    'l_tot': L_TOT
}


class ErreurConfigurationFichier(ValueError):
    """Erreur de lecture ou de validation d'un fichier de configuration."""


@dataclass
class PipelineConfig:
    """Configuration complète d'une exécution du pipeline."""
    bornes: dict = field(default_factory=lambda: copy.deepcopy(BORNES_CONCEPTION))
    outil: dict = field(default_factory=lambda: copy.deepcopy(OUTIL_CONFIG))
    frottement: dict = field(default_factory=lambda: copy.deepcopy(FROTTEMENT_CONFIG))
    effort_pointe: dict = field(default_factory=lambda: copy.deepcopy(EFFORT_POINTE_CONFIG))
    echantillonnage: dict = field(default_factory=lambda: copy.deepcopy(ECHANTILLONNAGE_CONFIG))
    planification: dict = field(default_factory=lambda: copy.deepcopy(PLANIFICATION_CONFIG))
    solveur: dict = field(default_factory=lambda: copy.deepcopy(SOLVEUR_CONFIG))
    limites_articulaires: dict = field(default_factory=lambda: copy.deepcopy(LIMITES_ARTICULAIRES))
    fp: dict = field(default_factory=lambda: copy.deepcopy(FP_CONFIG))
    conception_initiale: list = field(default_factory=lambda: list(CONCEPTION_INITIALE))
    chemin_etats_initiaux: str = None
    nb_workers: int = 1
    marge_collision: float = MARGE_COLLISION
    l_tot: float = L_TOT

    def vers_dict(self):
        """Représentation JSON canonique (utilisée pour l'en-tête et le hash)."""
        return {
            'bornes': self.bornes,
            'outil': self.outil,
            'frottement': self.frottement,
            'effort_pointe': self.effort_pointe,
            'echantillonnage': self.echantillonnage,
            'planification': self.planification,
            'solveur': self.solveur,
            'limites_articulaires': self.limites_articulaires,
            'fp': self.fp,
            'conception_initiale': list(self.conception_initiale),
            'chemin_etats_initiaux': self.chemin_etats_initiaux,
            'nb_workers': self.nb_workers,
            'marge_collision': self.marge_collision,
            'l_tot': self.l_tot
        }


def _sans_commentaires(valeur):
    """Retire récursivement les clés commençant par '_' (commentaires JSON)."""
    if isinstance(valeur, dict):
        return {k: _sans_commentaires(v) for k, v in valeur.items() if not str(k).startswith('_')}
    if isinstance(valeur, list):
        return [_sans_commentaires(v) for v in valeur]
    return valeur


def _fusionner(defaut, surcharge, chemin):
    """
    Fusion profonde de `surcharge` sur `defaut`, en refusant les clés inconnues.

    Les tables des FP acceptent de nouvelles clés de premier niveau
    uniquement pour les noms carve / poke / press.
    """
    resultat = copy.deepcopy(defaut)
    for cle, valeur in surcharge.items():
        if cle not in defaut:
            raise ErreurConfigurationFichier(f"Clé inconnue : {chemin}{cle}")
        if isinstance(defaut[cle], dict) and isinstance(valeur, dict):
            resultat[cle] = _fusionner(defaut[cle], valeur, f"{chemin}{cle}.")
        else:
            resultat[cle] = copy.deepcopy(valeur)
    return resultat


def valider_config_pipeline(config):
    """
    Vérifie les invariants de type de toutes les sections.

    Args:
        config (PipelineConfig): Configuration à valider

    Raises:
        ErreurConfigurationFichier: Au premier invariant violé
    """
    def exiger(condition, message):
        if not condition:
            raise ErreurConfigurationFichier(message)

    d_min = config.bornes['d_min']
    d_max = config.bornes['d_max']
    exiger(len(d_min) == 6 and len(d_max) == 6, "bornes : six valeurs attendues")
    exiger(all(a < b for a, b in zip(d_min, d_max)), "bornes : d_min < d_max requis")
    exiger(config.l_tot > 0, "l_tot doit être positif")
    exiger(0 < d_min[0] and d_max[0] < config.l_tot, "bornes : 0 < d1 < l_tot requis")
    exiger(d_min[3] > 0, "bornes : rayon de doigt positif requis")

    conception = config.conception_initiale
    exiger(len(conception) == 6, "conception_initiale : six valeurs attendues")
    exiger(all(a <= v <= b for v, a, b in zip(conception, d_min, d_max)),
           "conception_initiale hors bornes")

    outil = config.outil
    exiger(outil['rayon'] > 0, "outil : rayon > 0 requis")
    exiger(0 < outil['pointe'] <= outil['longueur'], "outil : 0 < pointe <= longueur requis")

    fr = config.frottement
    exiger(fr['mu'] > 0, "frottement : mu > 0 requis")
    exiger(int(fr['nb_facettes']) >= 4, "frottement : nb_facettes >= 4 requis")
    exiger(fr['force_normale_min'] >= 0, "frottement : force_normale_min >= 0 requis")
    exiger(config.effort_pointe['magnitude'] >= 0, "effort_pointe : magnitude >= 0 requise")

    ech = config.echantillonnage
    exiger(ech['pas'] > 0, "echantillonnage : pas > 0 requis")
    exiger(0 < ech['distance_min'] <= ech['pas'], "echantillonnage : 0 < distance_min <= pas requis")
    exiger(0 < ech['seuil_efficacite'] < 1, "echantillonnage : 0 < seuil_efficacite < 1 requis")
    exiger(int(ech['fenetre_efficacite']) >= 1, "echantillonnage : fenetre_efficacite >= 1 requise")
    exiger(int(ech['nb_candidats_cible']) >= 1, "echantillonnage : nb_candidats_cible >= 1 requis")
    exiger(ech['mode'] in ('2d', '6d'), "echantillonnage : mode '2d' ou '6d' requis")

    plan = config.planification
    exiger(plan['vitesse_outil'] > 0, "planification : vitesse_outil > 0 requise")
    exiger(plan['pas_temps'] > 0, "planification : pas_temps > 0 requis")
    exiger(int(plan['nb_pas_max']) >= 1, "planification : nb_pas_max >= 1 requis")

    lim = config.limites_articulaires
    exiger(all(a < b for a, b in zip(lim['min'], lim['max'])), "limites_articulaires : min < max requis")

    exiger(set(config.fp) == set(ORDRE_FP), "fp : tables carve, poke et press requises")
    for nom, table in config.fp.items():
        n = len(table['doigts'])
        mobiles = set(table['mobiles'])
        exiger(len(set(table['doigts'])) == n, f"fp.{nom} : un seul contact par doigt")
        exiger(mobiles <= set(table['doigts']), f"fp.{nom} : doigts mobiles hors contacts")
        if nom == 'carve':
            exiger(n == 3 and len(mobiles) == 3, "fp.carve : 3 contacts tous mobiles requis")
        else:
            exiger(n == 4 and len(mobiles) == 2, f"fp.{nom} : 4 contacts dont 2 mobiles requis")
        exiger(table['regle_axe'] in ('centroide', 'pincement'), f"fp.{nom} : regle_axe inconnue")
        exiger(table['selecteur_cout'] in ('carve_moment', 'pinch_alignment'),
               f"fp.{nom} : selecteur_cout inconnu")

    exiger(int(config.nb_workers) >= 1, "nb_workers >= 1 requis")
    exiger(config.marge_collision >= 0, "marge_collision >= 0 requise")


def charger_config_pipeline(chemin=None):
    """
    Charge un fichier de configuration JSON et le fusionne sur les défauts.

    Les clés commençant par '_' sont des commentaires et sont ignorées ;
    toute autre clé inconnue est refusée.

    Args:
        chemin (str ou Path, optional): Fichier JSON. Si None, défauts seuls.

    Returns:
        PipelineConfig: Configuration validée

    Raises:
        ErreurConfigurationFichier: Fichier illisible, clé inconnue ou invariant violé

    Example:
        >>> config = charger_config_pipeline('config/exemple_config.json')
        >>> config.echantillonnage['pas']
        0.02
    """
    brut = {}
    if chemin is not None:
        try:
            with open(chemin, 'r', encoding='utf-8') as f:
                brut = _sans_commentaires(json.load(f))
        except FileNotFoundError as e:
            raise ErreurConfigurationFichier(f"Fichier de configuration introuvable : {chemin}") from e
        except json.JSONDecodeError as e:
            raise ErreurConfigurationFichier(f"JSON invalide dans {chemin} : {e}") from e
        if not isinstance(brut, dict):
            raise ErreurConfigurationFichier("La configuration doit être un objet JSON")
    return config_depuis_dict(brut)


def config_depuis_dict(brut):
    """
    Fusionne un dict (déjà sans commentaires) sur les défauts et le valide.

    Sert aussi à relire la configuration enregistrée dans l'en-tête d'un
    fichier de candidats.

    Raises:
        ErreurConfigurationFichier: Clé inconnue ou invariant violé
    """
    valeurs = {}
    for cle, valeur in brut.items():
        if cle in SECTIONS_PIPELINE:
            if not isinstance(valeur, dict):
                raise ErreurConfigurationFichier(f"Section {cle} : objet attendu")
            valeurs[cle] = _fusionner(SECTIONS_PIPELINE[cle], valeur, f"{cle}.")
        elif cle in CLES_SIMPLES:
            valeurs[cle] = valeur
        else:
            raise ErreurConfigurationFichier(f"Clé inconnue : {cle}")

    try:
        config = PipelineConfig(**valeurs)
    except TypeError as e:
        raise ErreurConfigurationFichier(str(e)) from e
    try:
        valider_config_pipeline(config)
    except (KeyError, TypeError) as e:
        raise ErreurConfigurationFichier(f"Configuration incomplète : {e}") from e
    return config


def hash_config(config):
    """SHA-256 du JSON canonique (clés triées) d'une PipelineConfig."""
    texte = json.dumps(config.vers_dict(), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(texte.encode('utf-8')).hexdigest()

# ==============================================================================
# FONCTIONS UTILITAIRES
# ==============================================================================

def get_config(key, default=None):
    """
    Récupère une valeur de configuration.

    Args:
        key (str): Clé de configuration (ex: 'ECHANTILLONNAGE_CONFIG.pas')
        default: Valeur par défaut si la clé n'existe pas

    Returns:
        La valeur de configuration ou la valeur par défaut
    """
    try:
        parts = key.split('.')
        value = globals()[parts[0]]
        for part in parts[1:]:
            value = value[part]
        return value
    except (KeyError, TypeError):
        return default


def get_color(fp, default='#1f4e79'):
    """Retourne la couleur associée à une pose fondamentale."""
    return COULEURS_FP.get(fp, default)
