"""
==============================================================================
TESTS - ÉVALUATION DES CANDIDATS
==============================================================================
Métriques de trajectoire, normalisation 0-100, front de Pareto, table
des scores, courbe de seuil et diagnostic des échecs.

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import math

import numpy as np
import pandas as pd
import pytest

from core.contact import ContactPair, SystemState, geometries, placer_main_sur_contact
from core.evaluate import (
    choisir_conception_pareto,
    colonnes_metriques,
    construire_table_scores,
    courbe_seuil,
    diagnostic_echecs,
    metric_max_torque,
    metric_mean_sliding,
    metric_motion_range,
    normalize_scores,
    pareto_front,
    resume,
)
from core.planner import PasTrajectoire, PathRecord


def _chemin(fp, direction, phis, raison='max_steps', glissements=None):
    pas = [PasTrajectoire(phi, None, True) for phi in phis]
    for p, g in zip(pas, glissements or []):
        p.glissements = np.asarray(g, dtype=float)
    return PathRecord(0, fp, direction, pas, raison)


def _ligne(candidat, amplitude=1.0, glissement=0.1, couple=100.0, complet=True, d2=55.0):
    ligne = {'candidat': candidat, 'd': [45.0, d2, 25.0, 7.0, 0.0, 0.9], 'complet': complet}
    for fp in ('carve', 'poke', 'press'):
        ligne[f"{fp}_amplitude"] = amplitude
        ligne[f"{fp}_glissement"] = glissement
        ligne[f"{fp}_couple"] = couple
    return ligne


# ==============================================================================
# MÉTRIQUES
# ==============================================================================

def test_amplitude_deux_sens():
    chemins = [_chemin('poke', 1, [0.0, 0.4, 0.8]), _chemin('poke', -1, [0.0, -0.5])]
    assert metric_motion_range(chemins) == pytest.approx(1.3)


def test_amplitude_nulle():
    chemins = [_chemin('press', 1, [0.0], 'joint_limit'), _chemin('press', -1, [0.0], 'qp_failure')]
    assert metric_motion_range(chemins) == 0.0


def test_glissement_moyen():
    chemins = [_chemin('carve', 1, [0.0, 0.004], glissements=[[0.0, 0.2, 0.4]]),
               _chemin('carve', -1, [0.0, -0.004], glissements=[[0.6, 0.0, 0.2]])]
    assert metric_mean_sliding(chemins) == pytest.approx(0.2)


def test_glissement_sans_pas_resolu():
    assert metric_mean_sliding([_chemin('carve', 1, [0.0])]) == 0.0


def test_couple_sans_efforts():
    assert math.isnan(metric_max_torque([_chemin('carve', 1, [0.0])], None, None, None))


def test_couple_maximal_bras_de_levier(conception, outil, fps, pole_distal):
    contact = ContactPair(0, 0.0, 75.0, 0.0, (0.0, 0.0, 0.0), pole_distal, 0.0, 0)
    etat = SystemState(placer_main_sur_contact(conception, outil, contact), (contact,))
    g = geometries(etat, conception, outil)[0]
    faible = (g.outil.R.T @ (5.0 * g.axes[:, 1]))[None, :]
    fort = (g.outil.R.T @ (10.0 * g.axes[:, 1]))[None, :]
    chemin = PathRecord(0, 'carve', 1, [PasTrajectoire(0.0, etat, True, faible),
                                        PasTrajectoire(0.004, etat, True, fort),
                                        PasTrajectoire(0.008, etat, False)])
    assert metric_max_torque([chemin], conception, fps['carve'], outil) == pytest.approx(1000.0, rel=1e-9)


# ==============================================================================
# NORMALISATION ET PARETO
# ==============================================================================

def test_normalisation_orientations():
    np.testing.assert_allclose(normalize_scores([1, 2, 3], 'higher_better'), [0.0, 50.0, 100.0])
    np.testing.assert_allclose(normalize_scores([1, 2, 3], 'lower_better'), [100.0, 50.0, 0.0])


def test_normalisation_valeurs_egales():
    np.testing.assert_allclose(normalize_scores([4.0, 4.0, 4.0], 'lower_better'), [100.0] * 3)


def test_normalisation_nan_conserve():
    scores = normalize_scores([1.0, np.nan, 3.0])
    assert math.isnan(scores[1])
    np.testing.assert_allclose(scores[[0, 2]], [0.0, 100.0])


def test_normalisation_orientation_inconnue():
    with pytest.raises(ValueError):
        normalize_scores([1, 2], 'plus_grand')


def test_pareto_exemple():
    assert pareto_front([[1, 1], [2, 2], [2, 2]]) == [1, 2]
    assert pareto_front([[1, 0], [0, 1], [0, 0]]) == [0, 1]


def test_pareto_force_brute():
    rng = np.random.default_rng(11)
    S = rng.integers(0, 5, size=(200, 3)).astype(float)
    attendu = [i for i in range(200)
               if not any(np.all(S[j] >= S[i]) and np.any(S[j] > S[i]) for j in range(200))]
    assert pareto_front(S) == attendu


def test_pareto_invariant_transformation_monotone():
    rng = np.random.default_rng(5)
    S = rng.uniform(0.0, 1.0, size=(60, 4))
    assert pareto_front(S) == pareto_front(np.exp(3.0 * S) - 2.0)


# ==============================================================================
# TABLE DES SCORES
# ==============================================================================

def test_table_colonnes_et_tri():
    table = construire_table_scores([_ligne(2, amplitude=0.5), _ligne(0, amplitude=1.5), _ligne(1)])
    assert table['candidat'].tolist() == [0, 1, 2]
    attendues = ['candidat', 'd1', 'd2', 'd3', 'd4', 'd5', 'd6', *colonnes_metriques(),
                 *[f"score_{m}" for m in colonnes_metriques()], 'pareto', 'succes_maniement', 'complet']
    assert table.columns.tolist() == attendues
    np.testing.assert_allclose(table['score_carve_amplitude'], [100.0, 50.0, 0.0])
    assert table['pareto'].tolist() == [True, False, False]


def test_table_candidats_incomplets_exclus():
    table = construire_table_scores([_ligne(0, amplitude=2.0, complet=False), _ligne(1, amplitude=1.0),
                                     _ligne(2, amplitude=0.0)])
    assert math.isnan(table.loc[0, 'score_poke_amplitude'])
    assert not table.loc[0, 'pareto']
    assert table.loc[1, 'score_poke_amplitude'] == pytest.approx(100.0)
    assert table['succes_maniement'].tolist() == [False, True, False]


def test_table_couple_manquant():
    ligne = _ligne(1, couple=50.0)
    ligne['press_couple'] = float('nan')
    table = construire_table_scores([_ligne(0), ligne])
    assert math.isnan(table.loc[1, 'score_press_couple'])
    assert table['pareto'].any()


def test_courbe_seuil():
    table = construire_table_scores([_ligne(0, amplitude=0.0), _ligne(1, amplitude=0.5), _ligne(2, amplitude=2.0)])
    courbe = courbe_seuil(table, seuils=[0.0, 1.0, 3.0])
    assert courbe.columns.tolist() == ['seuil', 'global', 'carve', 'poke', 'press']
    np.testing.assert_allclose(courbe['global'], [2 / 3, 1 / 3, 0.0])


def test_courbe_seuil_sans_candidat_complet():
    table = construire_table_scores([_ligne(0, complet=False)])
    assert courbe_seuil(table, seuils=[0.0])['global'].isna().all()


def test_diagnostic_echecs():
    chemins = {
        0: [_chemin('carve', 1, [0.0], 'joint_limit'), _chemin('carve', -1, [0.0], 'qp_failure')],
        1: [_chemin('carve', 1, [0.0, 0.004, 0.008], 'equilibrium_infeasible'),
            _chemin('carve', -1, [0.0], 'equilibrium_infeasible')],
    }
    diagnostic = diagnostic_echecs(chemins)
    assert diagnostic['carve']['raisons_amplitude_nulle'] == {'joint_limit': 1, 'qp_failure': 1}
    assert diagnostic['carve']['equilibre_perdu'] == 1
    assert diagnostic['carve']['butee_a_la_fp'] == 1
    assert diagnostic['poke']['equilibre_perdu'] == 0


def test_conception_suggeree():
    table = construire_table_scores([_ligne(0, amplitude=0.5, d2=50.0), _ligne(1, amplitude=1.5, d2=80.0)])
    choix = choisir_conception_pareto(table)
    assert int(choix['candidat']) == 1
    assert choisir_conception_pareto(table.iloc[0:0]) is None


def test_resume():
    table = construire_table_scores([_ligne(0, amplitude=0.0), _ligne(1, amplitude=1.0),
                                     _ligne(2, complet=False)])
    synthese = resume(table, couverture=0.25)
    assert synthese['nb_candidats'] == 3
    assert synthese['nb_complets'] == 2
    assert synthese['fraction_succes'] == pytest.approx(0.5)
    assert synthese['fraction_succes_par_fp']['press'] == pytest.approx(0.5)
    assert synthese['couverture'] == 0.25
    assert synthese['conception_suggeree']['candidat'] == 1


def test_resume_table_vide():
    table = construire_table_scores([])
    synthese = resume(table)
    assert synthese['nb_candidats'] == 0
    assert synthese['fraction_succes'] is None
    assert isinstance(table, pd.DataFrame)
