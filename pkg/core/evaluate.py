"""
==============================================================================
MODULE D'ÉVALUATION DES CANDIDATS
==============================================================================
Trois métriques par FP (amplitude de rotation, glissement moyen, couple
articulaire maximal), normalisation 0-100 sur la population, front de
Pareto sur les neuf scores et table des scores (pandas).

Fonctions principales :
- metric_motion_range() / metric_mean_sliding() / metric_max_torque()
- normalize_scores() : transformation affine vers [0, 100]
- pareto_front() : candidats non dominés (dominance faible, égalités conservées)
- construire_table_scores() : DataFrame complet des scores
- courbe_seuil() : fraction de candidats au-delà d'un seuil d'amplitude
- diagnostic_echecs() : raisons d'arrêt des trajectoires nulles
- choisir_conception_pareto() : conception suggérée sur le front
- resume() : synthèse JSON de l'évaluation

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import sys
from collections import Counter
from pathlib import Path

import numpy as np
import pandas as pd

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings
from core.mechanics import joint_torques
from utils.logger import setup_logger

logger = setup_logger('evaluate')

# ==============================================================================
# FONCTION 1 : MÉTRIQUES PAR FP
# ==============================================================================

def metric_motion_range(chemins):
    """
    Amplitude totale |φ_fin(+)| + |φ_fin(-)| (rad).

    Example:
        >>> metric_motion_range([chemin_plus, chemin_moins])  # +0.8 et -0.5
        1.3
    """
    return float(sum(c.amplitude for c in chemins))


def metric_mean_sliding(chemins):
    """Moyenne des vitesses de glissement sur tous les pas et contacts des deux sens (mm/s)."""
    valeurs = [p.glissements for c in chemins for p in c.pas if p.glissements is not None]
    if not valeurs:
        return 0.0
    return float(np.mean(np.concatenate(valeurs)))


def metric_max_torque(chemins, d, fp, tool):
    """
    Couple articulaire maximal (N.mm) des doigts en contact le long des
    trajectoires, avec les efforts de norme minimale enregistrés.

    Les états sans efforts (équilibre impossible, fin de trajectoire) sont
    ignorés ; NaN si aucun état n'a d'efforts.
    """
    maximum = np.nan
    for chemin in chemins:
        for pas in chemin.pas:
            if pas.forces is None:
                continue
            couples = joint_torques(pas.etat, d, fp, tool, pas.forces)
            valeur = max(float(np.abs(tau).max()) for tau in couples.values())
            maximum = valeur if np.isnan(maximum) else max(maximum, valeur)
    return maximum


def metriques_candidat(d, chemins, ctx):
    """
    Les neuf métriques d'un candidat.

    Args:
        d (DesignParams): Conception
        chemins (list): PathRecord du candidat
        ctx (ContexteConception): FP et outil

    Returns:
        dict: '{fp}_{metrique}' -> valeur
    """
    valeurs = {}
    for nom, fp in ctx.fps.items():
        par_fp = [c for c in chemins if c.fp == nom]
        valeurs[f"{nom}_amplitude"] = metric_motion_range(par_fp)
        valeurs[f"{nom}_glissement"] = metric_mean_sliding(par_fp)
        valeurs[f"{nom}_couple"] = metric_max_torque(par_fp, d, fp, ctx.outil)
    return valeurs

# ==============================================================================
# FONCTION 2 : NORMALISATION ET FRONT DE PARETO
# ==============================================================================

def normalize_scores(values, orientation='higher_better'):
    """
    Transformation affine des valeurs vers [0, 100] : le pire à 0, le meilleur à 100.

    Toutes les valeurs égales donnent 100. Les NaN restent NaN.

    Args:
        values (array-like): Valeurs brutes
        orientation (str): 'higher_better' ou 'lower_better'

    Returns:
        np.ndarray: Scores

    Example:
        >>> normalize_scores([1, 2, 3], 'lower_better')
        array([100.,  50.,   0.])
    """
    if orientation not in ('higher_better', 'lower_better'):
        raise ValueError(f"Orientation inconnue : {orientation}")
    v = np.asarray(values, dtype=float)
    finies = v[np.isfinite(v)]
    if finies.size == 0:
        return np.full(v.shape, np.nan)
    bas, haut = finies.min(), finies.max()
    if haut == bas:
        return np.where(np.isfinite(v), 100.0, np.nan)
    scores = 100.0 * (v - bas) / (haut - bas)
    return scores if orientation == 'higher_better' else 100.0 - scores


def domine(a, b):
    """True si a domine b (>= partout, > au moins une fois)."""
    return bool(np.all(a >= b) and np.any(a > b))


def pareto_front(scores):
    """
    Indices des lignes non dominées (scores orientés : plus grand = meilleur).

    Les lignes identiques sont toutes conservées.

    Args:
        scores (array-like): Matrice (N, k)

    Returns:
        list: Indices triés

    Example:
        >>> pareto_front([[1, 1], [2, 2], [2, 2]])
        [1, 2]
    """
    S = np.atleast_2d(np.asarray(scores, dtype=float))
    front = []
    for i in range(S.shape[0]):
        superieurs = np.all(S >= S[i], axis=1) & np.any(S > S[i], axis=1)
        if not superieurs.any():
            front.append(i)
    return front

# ==============================================================================
# FONCTION 3 : TABLE DES SCORES
# ==============================================================================

def colonnes_metriques():
    return [f"{fp}_{m}" for fp in settings.ORDRE_FP for m in settings.METRIQUES]


def construire_table_scores(lignes):
    """
    Assemble la table des scores.

    Args:
        lignes (list): dicts avec 'candidat', 'd' (6 valeurs), les neuf
            métriques et 'complet' (trajectoires toutes présentes)

    Returns:
        pd.DataFrame: colonnes candidat, d1..d6, neuf métriques, neuf scores,
        pareto, succes_maniement, complet ; les candidats incomplets sont
        exclus de la normalisation et du front
    """
    metriques = colonnes_metriques()
    colonnes = ['candidat', *settings.NOMS_PARAMETRES, *metriques]
    enregistrements = []
    for ligne in lignes:
        enreg = {'candidat': int(ligne['candidat'])}
        enreg.update(dict(zip(settings.NOMS_PARAMETRES, [float(x) for x in ligne['d']])))
        enreg.update({m: float(ligne.get(m, np.nan)) for m in metriques})
        enreg['complet'] = bool(ligne.get('complet', True))
        enregistrements.append(enreg)
    table = pd.DataFrame(enregistrements, columns=[*colonnes, 'complet'])
    table = table.sort_values('candidat', kind='stable').reset_index(drop=True)

    complets = table['complet'].astype(bool).to_numpy()
    for m in metriques:
        orientation = settings.METRIQUES[m.split('_', 1)[1]]['orientation']
        scores = np.full(len(table), np.nan)
        if complets.any():
            scores[complets] = normalize_scores(table.loc[complets, m].to_numpy(), orientation)
        table[f"score_{m}"] = scores

    pareto = np.zeros(len(table), dtype=bool)
    colonnes_scores = [f"score_{m}" for m in metriques]
    if complets.any():
        matrice = table.loc[complets, colonnes_scores].fillna(0.0).to_numpy()
        indices = np.flatnonzero(complets)
        pareto[indices[pareto_front(matrice)]] = True
    table['pareto'] = pareto

    amplitudes = table[[f"{fp}_amplitude" for fp in settings.ORDRE_FP]].to_numpy()
    table['succes_maniement'] = complets & np.all(amplitudes > 0, axis=1)
    colonnes_finales = [*colonnes, *colonnes_scores, 'pareto', 'succes_maniement', 'complet']
    return table[colonnes_finales]

# ==============================================================================
# FONCTION 4 : ANALYSES COMPLÉMENTAIRES
# ==============================================================================

def courbe_seuil(table, seuils=None):
    """
    Fraction des candidats complets dont l'amplitude dépasse chaque seuil,
    globalement (les trois FP) et par FP.

    Returns:
        pd.DataFrame: colonnes seuil, global, carve, poke, press
    """
    seuils = settings.SEUILS_AMPLITUDE if seuils is None else seuils
    complets = table[table['complet'].astype(bool)]
    lignes = []
    for eta in seuils:
        ligne = {'seuil': float(eta)}
        if len(complets) == 0:
            ligne.update({'global': np.nan, **{fp: np.nan for fp in settings.ORDRE_FP}})
        else:
            masques = {fp: complets[f"{fp}_amplitude"].to_numpy() > eta for fp in settings.ORDRE_FP}
            ligne['global'] = float(np.mean(np.all(list(masques.values()), axis=0)))
            ligne.update({fp: float(np.mean(m)) for fp, m in masques.items()})
        lignes.append(ligne)
    return pd.DataFrame(lignes, columns=['seuil', 'global', *settings.ORDRE_FP])


def diagnostic_echecs(chemins_par_candidat):
    """
    Raisons d'arrêt par FP.

    Pour chaque FP : raisons des trajectoires des candidats d'amplitude
    nulle, nombre de trajectoires arrêtées par perte d'équilibre après un
    mouvement des doigts, et nombre de butées atteintes dès la FP.

    Args:
        chemins_par_candidat (dict): indice -> liste de PathRecord

    Returns:
        dict
    """
    diagnostic = {}
    for nom in settings.ORDRE_FP:
        raisons_nulles = Counter()
        equilibre_perdu = 0
        limite_fp = 0
        for chemins in chemins_par_candidat.values():
            par_fp = [c for c in chemins if c.fp == nom]
            if par_fp and metric_motion_range(par_fp) == 0.0:
                raisons_nulles.update(c.raison for c in par_fp)
            for c in par_fp:
                if c.raison == 'equilibrium_infeasible' and c.nb_pas > 1:
                    equilibre_perdu += 1
                if c.raison == 'joint_limit' and c.nb_pas == 1:
                    limite_fp += 1
        diagnostic[nom] = {
            'raisons_amplitude_nulle': dict(sorted(raisons_nulles.items())),
            'equilibre_perdu': equilibre_perdu,
            'butee_a_la_fp': limite_fp
        }
    return diagnostic


def choisir_conception_pareto(table, poids=None):
    """
    Membre du front de Pareto de meilleur score moyen pondéré.

    Args:
        table (pd.DataFrame): Table des scores
        poids (dict, optional): colonne métrique -> poids (égaux par défaut)

    Returns:
        pd.Series ou None si le front est vide
    """
    front = table[table['pareto']]
    if front.empty:
        return None
    metriques = colonnes_metriques()
    poids = poids or {m: 1.0 for m in metriques}
    w = np.array([float(poids.get(m, 0.0)) for m in metriques])
    scores = front[[f"score_{m}" for m in metriques]].fillna(0.0).to_numpy()
    moyenne = scores @ w / w.sum()
    return front.iloc[int(np.argmax(moyenne))]


def resume(table, chemins_par_candidat=None, couverture=None):
    """
    Synthèse de l'évaluation (sérialisable en JSON).

    Returns:
        dict: effectifs, fractions de succès (global et par FP), taille du
        front, couverture, courbe de seuil, diagnostic, conception suggérée
    """
    complets = table[table['complet'].astype(bool)]
    nb = len(complets)
    fractions = {fp: (float((complets[f"{fp}_amplitude"] > 0).mean()) if nb else None)
                 for fp in settings.ORDRE_FP}
    choix = choisir_conception_pareto(table)
    synthese = {
        'nb_candidats': int(len(table)),
        'nb_complets': int(nb),
        'fraction_succes': float(complets['succes_maniement'].mean()) if nb else None,
        'fraction_succes_par_fp': fractions,
        'nb_pareto': int(table['pareto'].sum()),
        'couverture': couverture,
        'courbe_seuil': courbe_seuil(table).to_dict(orient='records'),
        'diagnostic': diagnostic_echecs(chemins_par_candidat) if chemins_par_candidat else {},
        'conception_suggeree': None
    }
    if choix is not None:
        synthese['conception_suggeree'] = {
            'candidat': int(choix['candidat']),
            **{p: float(choix[p]) for p in settings.NOMS_PARAMETRES}
        }
    logger.info(f"📊 {nb} candidats évalués, {synthese['nb_pareto']} sur le front de Pareto")
    return synthese
