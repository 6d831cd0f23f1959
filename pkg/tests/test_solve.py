"""
==============================================================================
TESTS - SOLVEURS QP ET SQP
==============================================================================
Comparaison du QP à ensemble actif avec le vérificateur KKT et avec
scipy, cas irréalisables et petits NLP de référence.

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import numpy as np
import pytest
from scipy.optimize import minimize

from core.solve import NLPProblem, QPProblem, solve_nlp, solve_qp, verifier_kkt


# ==============================================================================
# QP
# ==============================================================================

def test_qp_sans_contrainte():
    p = QPProblem(H=2.0 * np.eye(2), g=np.array([-2.0, -4.0]))
    res = solve_qp(p)
    assert res.statut == 'optimal'
    np.testing.assert_allclose(res.x, [1.0, 2.0], atol=1e-9)


def test_qp_egalite():
    p = QPProblem(H=2.0 * np.eye(2), g=np.array([-2.0, -2.0]),
                  A_eq=np.array([[1.0, 1.0]]), b_eq=np.array([1.0]))
    res = solve_qp(p)
    assert res.statut == 'optimal'
    np.testing.assert_allclose(res.x, [0.5, 0.5], atol=1e-9)
    assert verifier_kkt(p, res)['ok']


def test_qp_borne_active():
    p = QPProblem(H=np.eye(1), g=np.array([-1.0]), ub=np.array([0.5]))
    res = solve_qp(p)
    np.testing.assert_allclose(res.x, [0.5], atol=1e-9)
    assert res.lambda_ub[0] == pytest.approx(0.5, abs=1e-8)
    assert verifier_kkt(p, res)['ok']


def test_qp_irrealisable():
    p = QPProblem(H=np.eye(1), g=np.zeros(1), A_in=np.array([[1.0], [-1.0]]), b_in=np.array([1.0, 0.0]))
    assert solve_qp(p).statut == 'infeasible'


@pytest.mark.parametrize('matrice', [
    np.array([[1.0, 2.0], [0.0, 1.0]]),
    np.array([[1.0, 0.0], [0.0, -1.0]]),
    np.ones((2, 3)),
])
def test_qp_hessienne_invalide(matrice):
    with pytest.raises(ValueError):
        QPProblem(H=matrice, g=np.zeros(matrice.shape[0]))


def _qp_aleatoire(rng, n, m_eq, m_in):
    """QP convexe réalisable par construction (x_f strictement dans les bornes)."""
    M = rng.normal(size=(n, n))
    H = M @ M.T + 0.1 * np.eye(n)
    g = rng.normal(size=n)
    x_f = rng.uniform(-1.0, 1.0, size=n)
    A_eq = rng.normal(size=(m_eq, n))
    A_in = rng.normal(size=(m_in, n))
    b_in = A_in @ x_f - rng.uniform(0.0, 1.0, size=m_in)
    return QPProblem(H=H, g=g, A_eq=A_eq, b_eq=A_eq @ x_f, A_in=A_in, b_in=b_in,
                     lb=np.full(n, -2.0), ub=np.full(n, 2.0))


def _reference_slsqp(p):
    return minimize(
        p.objectif, np.zeros(p.n), jac=lambda x: p.H @ x + p.g, method='SLSQP',
        bounds=list(zip(p.lb, p.ub)),
        constraints=[{'type': 'eq', 'fun': lambda x: p.A_eq @ x - p.b_eq},
                     {'type': 'ineq', 'fun': lambda x: p.A_in @ x - p.b_in}],
        options={'ftol': 1e-12, 'maxiter': 1000}
    )


@pytest.mark.parametrize('n', [4, 12, 27])
def test_qp_aleatoires_contre_scipy(n):
    """QP convexes aléatoires réalisables : toujours optimal, KKT satisfait, objectif <= SLSQP."""
    rng = np.random.default_rng(7 + n)
    for _ in range(10):
        p = _qp_aleatoire(rng, n, m_eq=n // 3, m_in=n)
        res = solve_qp(p)
        assert res.statut == 'optimal'
        assert verifier_kkt(p, res)['ok']
        reference = _reference_slsqp(p)
        if reference.success:
            assert res.objectif <= reference.fun + 1e-6 * (1.0 + abs(reference.fun))


def test_qp_sommet_degenere_sans_cyclage():
    """Départ sur un sommet où 40 contraintes (dont des doublons) sont actives."""
    rng = np.random.default_rng(3)
    n = 6
    lignes = rng.normal(size=(20, n))
    A_in = np.vstack([lignes, lignes, np.eye(n)])
    p = QPProblem(H=np.eye(n), g=-lignes.sum(axis=0), A_in=A_in, b_in=np.zeros(A_in.shape[0]))
    res = solve_qp(p, x0=np.zeros(n), actifs=range(A_in.shape[0]))
    assert res.statut == 'optimal'
    assert res.iterations < 200
    assert verifier_kkt(p, res)['ok']
    assert len(res.actifs) <= n


def test_qp_egalites_pleines_avec_bornes():
    """Forme des sous-problèmes élastiques : H = I, 27 variables, égalités de rang plein."""
    rng = np.random.default_rng(11)
    n = 27
    A_eq = rng.normal(size=(10, n))
    x_f = rng.uniform(-0.5, 0.5, size=n)
    p = QPProblem(H=np.eye(n), g=rng.normal(size=n) * 10.0, A_eq=A_eq, b_eq=A_eq @ x_f,
                  lb=np.full(n, -1.0), ub=np.full(n, 1.0))
    res = solve_qp(p, x0=x_f)
    assert res.statut == 'optimal'
    assert verifier_kkt(p, res)['ok']
    reference = _reference_slsqp(p)
    assert res.objectif == pytest.approx(reference.fun, rel=1e-6, abs=1e-6)


def test_qp_courbure_nulle_bornee():
    """Direction sans courbure arrêtée par une borne."""
    p = QPProblem(H=np.diag([1.0, 0.0]), g=np.array([0.0, -1.0]), ub=np.array([np.inf, 2.0]))
    res = solve_qp(p)
    assert res.statut == 'optimal'
    np.testing.assert_allclose(res.x, [0.0, 2.0], atol=1e-9)
    assert res.lambda_ub[1] == pytest.approx(1.0, abs=1e-8)


def test_qp_non_borne():
    p = QPProblem(H=np.zeros((1, 1)), g=np.array([-1.0]))
    assert solve_qp(p).statut == 'iteration_limit'


def test_qp_demarrage_a_chaud():
    p = QPProblem(H=2.0 * np.eye(2), g=np.array([-2.0, -2.0]),
                  A_in=np.array([[-1.0, -1.0]]), b_in=np.array([-1.0]))
    froid = solve_qp(p)
    chaud = solve_qp(p, actifs=froid.actifs)
    np.testing.assert_allclose(chaud.x, froid.x, atol=1e-9)


# ==============================================================================
# NLP
# ==============================================================================

def test_nlp_inegalite():
    p = NLPProblem(lambda x: (x[0] - 1.0) ** 2, lambda x: 2.0 * (x - 1.0), np.zeros(1),
                   inegalites=lambda x: 0.5 - x, jac_inegalites=lambda x: -np.eye(1))
    res = solve_nlp(p)
    assert res.statut == 'optimal'
    np.testing.assert_allclose(res.x, [0.5], atol=1e-6)


def test_nlp_cercle():
    """min x + y sur le cercle unité : (-1/√2, -1/√2)."""
    p = NLPProblem(
        cout=lambda x: x[0] + x[1],
        gradient=lambda x: np.array([1.0, 1.0]),
        x0=np.array([1.0, 0.0]),
        egalites=lambda x: np.array([x @ x - 1.0]),
        jac_egalites=lambda x: 2.0 * x[None, :]
    )
    res = solve_nlp(p)
    assert res.statut == 'optimal'
    np.testing.assert_allclose(res.x, [-np.sqrt(0.5)] * 2, atol=1e-5)


def test_nlp_respecte_les_bornes():
    p = NLPProblem(lambda x: float(np.sum((x - 3.0) ** 2)), lambda x: 2.0 * (x - 3.0), np.zeros(2),
                   lb=np.array([-1.0, -1.0]), ub=np.array([1.0, 2.0]))
    res = solve_nlp(p)
    np.testing.assert_allclose(res.x, [1.0, 2.0], atol=1e-6)


def test_nlp_bornes_incoherentes():
    with pytest.raises(ValueError):
        NLPProblem(lambda x: 0.0, lambda x: np.zeros(1), np.zeros(1), lb=np.ones(1), ub=np.zeros(1))
