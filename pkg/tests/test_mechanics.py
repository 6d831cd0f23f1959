"""
==============================================================================
TESTS - MÉCANIQUE
==============================================================================
Distances entre segments, pyramide de frottement, faisabilité de
l'équilibre, couples articulaires et gradients de collision.

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import math

import numpy as np
import pytest

from core import AxeDegenere
from core.contact import ContactPair, SystemState, geometries, placer_main_sur_contact
from core.mechanics import (
    FrictionModel,
    TipForce,
    collision_jacobian,
    collision_values,
    equilibre_fp,
    equilibrium_feasible,
    faisabilite_efforts,
    forces_norme_minimale,
    joint_torques,
    lignes_pyramide,
    rapport_collisions,
    segment_distance,
    tangente_coupe,
)
from tests.conftest import differences_finies


# ==============================================================================
# DISTANCE ENTRE SEGMENTS
# ==============================================================================

def test_segments_paralleles():
    distance, _ = segment_distance([0, 0, 0], [1, 0, 0], [0, 0, 3], [1, 0, 3])
    assert distance == pytest.approx(3.0)


def test_segments_colineaires_recouvrants():
    distance, _ = segment_distance([0, 0, 0], [2, 0, 0], [1, 0, 0], [3, 0, 0])
    assert distance == pytest.approx(0.0)


def test_segment_degenere():
    distance, (P, Q) = segment_distance([0, 0, 1], [0, 0, 1], [-1, 0, 0], [1, 0, 0])
    assert distance == pytest.approx(1.0)
    np.testing.assert_allclose(Q, [0.0, 0.0, 0.0], atol=1e-12)


def test_segments_croises():
    distance, (P, Q) = segment_distance([-1, 0, 0], [1, 0, 0], [0, -1, 2], [0, 1, 2])
    assert distance == pytest.approx(2.0)
    np.testing.assert_allclose(P, [0.0, 0.0, 0.0], atol=1e-12)


def test_segments_contre_grille():
    """La distance exacte minore la grille et s'en approche au pas près."""
    rng = np.random.default_rng(3)
    s = np.linspace(0.0, 1.0, 201)
    for _ in range(20):
        p1, q1, p2, q2 = rng.normal(size=(4, 3))
        distance, _ = segment_distance(p1, q1, p2, q2)
        A = p1 + s[:, None] * (q1 - p1)
        B = p2 + s[:, None] * (q2 - p2)
        grille = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2).min()
        ecart_max = (np.linalg.norm(q1 - p1) + np.linalg.norm(q2 - p2)) / 200
        assert distance <= grille + 1e-12
        assert grille - distance <= ecart_max


# ==============================================================================
# FROTTEMENT ET ÉQUILIBRE
# ==============================================================================

def test_pyramide_dimensions():
    A, b = lignes_pyramide(FrictionModel(0.5, 8, 0.1), 3)
    assert A.shape == (27, 9)
    assert b.shape == (27,)


def test_pyramide_appartenance():
    fric = FrictionModel(0.5, 8, 0.1)
    A, b = lignes_pyramide(fric, 1)
    assert np.all(A @ np.array([0.0, 0.0, 1.0]) >= b)
    assert np.all(A @ np.array([0.4, 0.0, 1.0]) >= b)
    assert not np.all(A @ np.array([1.0, 0.0, 0.1]) >= b)


@pytest.mark.parametrize('parametres', [(0.0, 8, 0.1), (0.5, 3, 0.1), (0.5, 8, -1.0)])
def test_frottement_invalide(parametres):
    with pytest.raises(ValueError):
        FrictionModel(*parametres)


def _prehension_pincement():
    """Deux contacts antipodaux en (±1, 0, 0), normales vers l'intérieur de l'objet."""
    reperes = [
        (np.array([-1.0, 0.0, 0.0]), np.column_stack([[0, 1, 0], [0, 0, 1], [1, 0, 0]])),
        (np.array([1.0, 0.0, 0.0]), np.column_stack([[0, 1, 0], [0, 0, -1], [-1, 0, 0]])),
    ]
    G = np.zeros((6, 6))
    for i, (p, R) in enumerate(reperes):
        G[:3, 3 * i:3 * i + 3] = R
        G[3:, 3 * i:3 * i + 3] = np.cross(p, R.T).T
    return G


def test_pincement_porte_une_charge():
    G = _prehension_pincement()
    res = faisabilite_efforts(G, np.array([0.0, 0.0, -10.0, 0.0, 0.0, 0.0]), FrictionModel(0.5, 8, 0.1))
    assert res.faisable
    np.testing.assert_allclose(G @ res.forces.ravel(), [0.0, 0.0, 10.0, 0.0, 0.0, 0.0], atol=1e-6)


def test_pincement_ne_resiste_pas_au_couple_axial():
    G = _prehension_pincement()
    res = faisabilite_efforts(G, np.array([0.0, 0.0, 0.0, 1.0, 0.0, 0.0]), FrictionModel(0.5, 8, 0.1))
    assert not res.faisable


@pytest.mark.parametrize('torseur', [
    [0.0, 0.0, -1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0, 0.3],
    [0.0, 0.0, 0.0, 0.5, 0.0, 0.0],
    [3.0, 0.0, 1.0, 0.0, 0.2, 0.0],
])
def test_faisabilite_homogene(torseur):
    """Sans effort normal minimal, la faisabilité ne dépend pas de la magnitude."""
    G = _prehension_pincement()
    fric = FrictionModel(0.5, 8, 0.0)
    w = np.array(torseur)
    assert faisabilite_efforts(G, 10.0 * w, fric).faisable == faisabilite_efforts(G, 5.0 * w, fric).faisable


def test_equilibre_sans_charge(etat_carve, conception, outil, fps):
    res = equilibrium_feasible(etat_carve, conception, fps['carve'], outil,
                               TipForce(0.0), FrictionModel(0.5, 8, 0.0))
    assert res.faisable


def test_tangente_de_coupe(outil):
    axe = (np.zeros(3), np.array([1.0, 0.0, 0.0]))
    np.testing.assert_allclose(tangente_coupe(axe, outil), [0.0, -1.0, 0.0], atol=1e-12)


def test_pointe_sur_l_axe_equilibre_infaisable(etat_carve, conception, outil, fps):
    """Tangente de coupe indéfinie : équilibre infaisable, pas d'erreur numérique."""
    axe = (np.zeros(3), np.array([0.0, 0.0, 1.0]))
    fric = FrictionModel(0.5, 8, 0.0)
    with pytest.raises(AxeDegenere):
        tangente_coupe(axe, outil)
    res = equilibrium_feasible(etat_carve, conception, fps['carve'], outil, TipForce(10.0), fric, axe)
    assert not res.faisable
    assert not forces_norme_minimale(etat_carve, conception, fps['carve'], outil, TipForce(10.0), fric, axe).faisable
    ok, detail = equilibre_fp(etat_carve, conception, fps['carve'], outil, fric, 10.0, axe)
    assert not ok
    assert 'cut_tangent_positive' in detail


def test_effort_oppose_au_mouvement():
    assert TipForce(10.0).oppose_au_mouvement(1).regle == 'cut_tangent_negative'
    assert TipForce(10.0).oppose_au_mouvement(-1).regle == 'cut_tangent_positive'


def test_effort_explicite_non_unitaire():
    with pytest.raises(ValueError):
        TipForce(10.0, 'explicite', (1.0, 1.0, 0.0))


# ==============================================================================
# COUPLES ARTICULAIRES
# ==============================================================================

def test_bras_de_levier(conception, outil, fps, pole_distal):
    """Doigt tendu, effort perpendiculaire au bout : F.L_tot au MCP, F.d1 à l'IP."""
    contact = ContactPair(0, 0.0, 75.0, 0.0, (0.0, 0.0, 0.0), pole_distal, 0.0, 0)
    etat = SystemState(placer_main_sur_contact(conception, outil, contact), (contact,))
    g = geometries(etat, conception, outil)[0]
    F = 10.0
    f_O = F * g.axes[:, 1]
    couples = joint_torques(etat, conception, fps['carve'], outil, (g.outil.R.T @ f_O)[None, :])
    tau = couples[0]
    assert abs(tau[0]) == pytest.approx(F * conception.l_tot, rel=1e-9)
    assert abs(tau[1]) == pytest.approx(0.0, abs=1e-9)
    assert abs(tau[2]) == pytest.approx(F * conception.d1, rel=1e-9)


# ==============================================================================
# COLLISIONS
# ==============================================================================

def test_collisions_identifiants(etat_carve, conception, outil, fps):
    valeurs, idents = collision_values(etat_carve, conception, fps['carve'], outil)
    assert len(valeurs) == len(idents)
    assert not any(ident.startswith(('d3_distal|outil', 'd0_distal|outil', 'd1_distal|outil'))
                   for ident in idents)
    assert 'd2_distal|outil' in idents
    assert rapport_collisions(etat_carve, conception, fps['carve'], outil).minimum == pytest.approx(valeurs.min())


def test_gradient_collision_differences_finies(etat_carve, conception, outil, fps):
    fp = fps['carve']
    x0 = etat_carve.vecteur()

    def jeux(x):
        return collision_values(etat_carve.avec_vecteur(x), conception, fp, outil)[0]

    J = collision_jacobian(etat_carve, conception, fp, outil)
    numerique = differences_finies(jeux, x0, h=1e-6)
    grossier = differences_finies(jeux, x0, h=1e-4)
    # lignes où la distance est dérivable (plus proches points uniques)
    lisses = np.abs(numerique - grossier).max(axis=1) < 1e-4
    assert lisses.sum() > len(J) // 2
    np.testing.assert_allclose(J[lisses], numerique[lisses], atol=1e-5)
