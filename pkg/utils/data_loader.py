"""
==============================================================================
MODULE DE PERSISTANCE DES DONNÉES
==============================================================================
Ce module gère l'écriture et la relecture de tous les fichiers du pipeline :
fichier de candidats (en-tête + CandidateRecord en JSON ligne par ligne),
fichiers de trajectoires par candidat, états initiaux de la graine et
manifeste d'exécution.

Fonctions principales :
- serialiser_*() / deserialiser_*() : conversion des types du moteur en JSON
- EcrivainJsonl : écrivain unique en ajout (une ligne par enregistrement)
- lire_jsonl() : lecture tolérante avec rapport des lignes corrompues
- charger_candidats() : en-tête + candidats d'un fichier d'échantillonnage
- ecrire_chemins() / charger_chemins() : trajectoires d'un candidat
- ecrire_etats_initiaux() / charger_etats_initiaux() : graine validée
- ecrire_manifeste() / lire_manifeste() : bilan d'exécution

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import json
import math
import sys
from pathlib import Path

import numpy as np

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings
from core import ErreurConfiguration, __version__ as VERSION_MOTEUR
from core.contact import ContactPair, SystemState
from core.model import DesignParams
from core.planner import PasTrajectoire, PathRecord
from core.sampler import CandidateRecord
from utils.logger import log_chargement, log_erreur, setup_logger

logger = setup_logger('data_loader')

# ==============================================================================
# FONCTION 1 : SÉRIALISATION DES TYPES DU MOTEUR
# ==============================================================================

def _liste(valeur):
    """ndarray ou None -> liste JSON (None conservé)."""
    if valeur is None:
        return None
    return np.asarray(valeur, dtype=float).tolist()


def _flottant(valeur):
    if valeur is None:
        return None
    valeur = float(valeur)
    return valeur if math.isfinite(valeur) else None


def _tableau(valeur):
    return None if valeur is None else np.asarray(valeur, dtype=float)


def serialiser_conception(d):
    return {'d': d.vecteur().tolist(), 'l_tot': float(d.l_tot)}


def deserialiser_conception(donnees):
    return DesignParams.depuis_vecteur(donnees['d'], l_tot=float(donnees.get('l_tot', settings.L_TOT)))


def serialiser_etat(state):
    """
    Example:
        >>> serialiser_etat(etat)['contacts'][0]['carte']
        0
    """
    return {
        'theta_h': list(state.theta_h),
        'contacts': [
            {
                'doigt': c.doigt, 'spin': c.spin, 'a_t1': c.a_t1, 'a_t2': c.a_t2,
                'u': list(c.u), 'a_f1': c.a_f1, 'a_f2': c.a_f2, 'carte': c.carte
            }
            for c in state.contacts
        ]
    }


def deserialiser_etat(donnees):
    contacts = [
        ContactPair(
            doigt=int(c['doigt']), spin=float(c['spin']), a_t1=float(c['a_t1']),
            a_t2=float(c['a_t2']), u=tuple(c['u']), a_f1=float(c['a_f1']),
            a_f2=float(c['a_f2']), carte=int(c.get('carte', 0))
        )
        for c in donnees['contacts']
    ]
    return SystemState(tuple(donnees['theta_h']), tuple(contacts))


def serialiser_candidat(record):
    return {
        'type': 'candidat',
        'indice': int(record.indice),
        'conception': serialiser_conception(record.d),
        'etats': {nom: serialiser_etat(e) for nom, e in record.etats.items()},
        'parent': int(record.parent),
        'appel': int(record.appel),
        'couts': {nom: _flottant(c) for nom, c in record.couts.items()}
    }


def deserialiser_candidat(donnees):
    return CandidateRecord(
        indice=int(donnees['indice']),
        d=deserialiser_conception(donnees['conception']),
        etats={nom: deserialiser_etat(e) for nom, e in donnees['etats'].items()},
        parent=int(donnees['parent']),
        appel=int(donnees['appel']),
        couts={nom: (np.nan if c is None else float(c)) for nom, c in donnees['couts'].items()}
    )


def serialiser_chemin(record):
    return {
        'type': 'chemin',
        'candidat': int(record.candidat),
        'fp': record.fp,
        'direction': int(record.direction),
        'raison': record.raison,
        'pas': [
            {
                'phi': float(p.phi),
                'etat': serialiser_etat(p.etat),
                'equilibre': bool(p.equilibre),
                'forces': _liste(p.forces),
                'vitesses': _liste(p.vitesses),
                'glissements': _liste(p.glissements),
                'vitesses_normales': _liste(p.vitesses_normales),
                'objectif': _flottant(p.objectif)
            }
            for p in record.pas
        ]
    }


def deserialiser_chemin(donnees):
    pas = [
        PasTrajectoire(
            phi=float(p['phi']),
            etat=deserialiser_etat(p['etat']),
            equilibre=bool(p['equilibre']),
            forces=_tableau(p.get('forces')),
            vitesses=_tableau(p.get('vitesses')),
            glissements=_tableau(p.get('glissements')),
            vitesses_normales=_tableau(p.get('vitesses_normales')),
            objectif=p.get('objectif')
        )
        for p in donnees['pas']
    ]
    return PathRecord(int(donnees['candidat']), donnees['fp'], int(donnees['direction']),
                      pas, donnees['raison'])


def entete(config, hash_cfg, mode):
    """Premier enregistrement d'un fichier de candidats."""
    return {
        'type': 'entete',
        'version': VERSION_MOTEUR,
        'hash_config': hash_cfg,
        'mode': mode,
        'config': config.vers_dict()
    }


def ligne_json(objet):
    """JSON canonique sur une ligne (clés triées, sans espaces)."""
    return json.dumps(objet, sort_keys=True, separators=(',', ':'), ensure_ascii=False)

# ==============================================================================
# FONCTION 2 : ÉCRITURE / LECTURE JSON LIGNE PAR LIGNE
# ==============================================================================

class EcrivainJsonl:
    """
    Écrivain unique d'un fichier JSONL, chaque ligne vidée sur disque dès
    son écriture.

    Example:
        >>> with EcrivainJsonl('out/candidats.jsonl') as w:
        ...     w.ecrire(entete(config, h, '2d'))
    """

    def __init__(self, chemin, ajout=False):
        self.chemin = Path(chemin)
        self.chemin.parent.mkdir(parents=True, exist_ok=True)
        self._fichier = open(self.chemin, 'a' if ajout else 'w', encoding='utf-8', newline='\n')
        self.nb_lignes = 0

    def ecrire(self, objet):
        self._fichier.write(ligne_json(objet) + '\n')
        self._fichier.flush()
        self.nb_lignes += 1

    def fermer(self):
        if not self._fichier.closed:
            self._fichier.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.fermer()
        return False


def lire_jsonl(chemin):
    """
    Lit un fichier JSONL en ignorant les lignes corrompues.

    Args:
        chemin (str ou Path): Fichier à lire

    Returns:
        tuple: (enregistrements, erreurs) où erreurs est une liste de
        dicts {'ligne': numéro (1-based), 'message': str}

    Raises:
        FileNotFoundError: Si le fichier n'existe pas
    """
    chemin = Path(chemin)
    if not chemin.exists():
        raise FileNotFoundError(f"{settings.MESSAGES['error']['file_not_found']} : {chemin}")

    enregistrements, erreurs = [], []
    with open(chemin, 'r', encoding='utf-8') as f:
        for numero, ligne in enumerate(f, start=1):
            ligne = ligne.strip()
            if not ligne:
                continue
            try:
                objet = json.loads(ligne)
                if not isinstance(objet, dict):
                    raise ValueError("objet JSON attendu")
                enregistrements.append(objet)
            except (json.JSONDecodeError, ValueError) as e:
                erreurs.append({'ligne': numero, 'message': str(e)})
                logger.warning(f"{settings.MESSAGES['warning']['ligne_corrompue']} ({chemin.name}:{numero})")
    log_chargement(chemin.name, len(enregistrements), success=not erreurs)
    return enregistrements, erreurs

# ==============================================================================
# FONCTION 3 : FICHIER DE CANDIDATS
# ==============================================================================

def charger_candidats(chemin):
    """
    Charge un fichier de candidats.

    Les lignes illisibles (JSON invalide ou champs manquants) sont ignorées
    et rapportées.

    Returns:
        tuple: (entete ou None, liste de CandidateRecord, erreurs)
    """
    enregistrements, erreurs = lire_jsonl(chemin)
    tete = None
    candidats = []
    for position, objet in enumerate(enregistrements):
        if objet.get('type') == 'entete':
            tete = objet
            continue
        try:
            candidats.append(deserialiser_candidat(objet))
        except (KeyError, TypeError, ValueError) as e:
            erreurs.append({'ligne': None, 'message': f"enregistrement {position} : {e}"})
            logger.warning(f"{settings.MESSAGES['warning']['ligne_corrompue']} : {e}")
    return tete, candidats, erreurs


def ecrire_candidats(chemin, tete, candidats):
    with EcrivainJsonl(chemin) as w:
        w.ecrire(tete)
        for c in candidats:
            w.ecrire(serialiser_candidat(c))

# ==============================================================================
# FONCTION 4 : TRAJECTOIRES
# ==============================================================================

def ecrire_chemins(chemin, chemins):
    """
    Écrit les trajectoires d'un candidat dans un fichier temporaire puis le
    renomme, un fichier présent est donc toujours complet.
    """
    chemin = Path(chemin)
    temporaire = chemin.with_suffix(chemin.suffix + '.tmp')
    with EcrivainJsonl(temporaire) as w:
        for record in chemins:
            w.ecrire(serialiser_chemin(record))
    temporaire.replace(chemin)


def charger_chemins(chemin):
    """
    Returns:
        tuple: (liste de PathRecord, erreurs)
    """
    enregistrements, erreurs = lire_jsonl(chemin)
    chemins = []
    for objet in enregistrements:
        try:
            chemins.append(deserialiser_chemin(objet))
        except (KeyError, TypeError, ValueError) as e:
            erreurs.append({'ligne': None, 'message': str(e)})
    return chemins, erreurs


def chemins_complets(chemins, noms_fp=None):
    """True si les six trajectoires (trois FP x deux sens) sont présentes."""
    noms_fp = noms_fp or settings.ORDRE_FP
    presentes = {(c.fp, c.direction) for c in chemins}
    return all((nom, s) in presentes for nom in noms_fp for s in (1, -1))

# ==============================================================================
# FONCTION 5 : ÉTATS INITIAUX ET MANIFESTE
# ==============================================================================

def ecrire_etats_initiaux(chemin, d, etats):
    chemin = Path(chemin)
    chemin.parent.mkdir(parents=True, exist_ok=True)
    contenu = {
        'conception': serialiser_conception(d),
        'etats': {nom: serialiser_etat(e) for nom, e in etats.items()}
    }
    chemin.write_text(json.dumps(contenu, sort_keys=True, indent=2) + '\n', encoding='utf-8')


def charger_etats_initiaux(chemin):
    """
    Returns:
        tuple: (DesignParams, dict nom FP -> SystemState)

    Raises:
        ErreurConfiguration: Fichier absent ou illisible
    """
    try:
        contenu = json.loads(Path(chemin).read_text(encoding='utf-8'))
        d = deserialiser_conception(contenu['conception'])
        etats = {nom: deserialiser_etat(e) for nom, e in contenu['etats'].items()}
    except FileNotFoundError as e:
        raise ErreurConfiguration(f"États initiaux introuvables : {chemin}") from e
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        log_erreur('charger_etats_initiaux', f"Fichier {chemin} illisible", e)
        raise ErreurConfiguration(f"États initiaux illisibles ({chemin}) : {e}") from e
    log_chargement(Path(chemin).name, len(etats))
    return d, etats


def ecrire_manifeste(dossier, contenu):
    chemin = Path(dossier) / settings.EXPORT_CONFIG['fichier_manifeste']
    chemin.parent.mkdir(parents=True, exist_ok=True)
    chemin.write_text(json.dumps(contenu, sort_keys=True, indent=2) + '\n', encoding='utf-8')
    return chemin


def lire_manifeste(dossier):
    """Manifeste d'un dossier de sortie, dict vide s'il n'existe pas."""
    chemin = Path(dossier) / settings.EXPORT_CONFIG['fichier_manifeste']
    if not chemin.exists():
        return {}
    return json.loads(chemin.read_text(encoding='utf-8'))
