"""
==============================================================================
MODULE SOLVEURS DENSES : QP À ENSEMBLE ACTIF ET SQP
==============================================================================
Solveurs de petite taille utilisés par l'échantillonneur (attempt_fps) et
par le planificateur (QP de glissement minimal) :

- QP convexe : min 1/2 x'Hx + g'x  s.c.  A_eq x = b_eq, A_in x >= b_in,
  lb <= x <= ub ; méthode primale à ensemble actif, phase 1 par
  programmation linéaire (scipy.optimize.linprog / HiGHS).
- NLP : programmation quadratique successive (SQP) avec BFGS amorti,
  recherche linéaire sur la fonction de mérite l1 et mode élastique
  lorsque le sous-problème linéarisé est irréalisable.

Les solveurs ne lèvent pas d'exception sur un échec numérique : ils
retournent un statut ('optimal', 'infeasible', 'iteration_limit',
'line_search_failure', 'qp_failure').

Fonctions principales :
- solve_qp() : QP à ensemble actif avec démarrage à chaud
- verifier_kkt() : vérificateur indépendant des conditions KKT
- solve_nlp() : SQP à mérite l1

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings
from core import ErreurConception
from utils.logger import setup_logger

logger = setup_logger('solve')

DECALAGE_PSD = 1e-8

# ==============================================================================
# FONCTION 1 : DÉFINITION DU PROBLÈME QP
# ==============================================================================

def _matrice(A, n):
    if A is None:
        return np.zeros((0, n))
    return np.atleast_2d(np.asarray(A, dtype=float)).reshape(-1, n)


def _vecteur(b, m):
    if b is None:
        return np.zeros(m)
    return np.asarray(b, dtype=float).reshape(m)


@dataclass
class QPProblem:
    """
    Problème quadratique convexe dense.

    min 1/2 x'Hx + g'x  s.c.  A_eq x = b_eq ; A_in x >= b_in ; lb <= x <= ub.
    """
    H: np.ndarray
    g: np.ndarray
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_in: Optional[np.ndarray] = None
    b_in: Optional[np.ndarray] = None
    lb: Optional[np.ndarray] = None
    ub: Optional[np.ndarray] = None

    def __post_init__(self):
        self.H = np.atleast_2d(np.asarray(self.H, dtype=float))
        n = self.H.shape[0]
        if self.H.shape != (n, n):
            raise ValueError("H doit être carrée")
        self.g = _vecteur(self.g, n)
        self.A_eq = _matrice(self.A_eq, n)
        self.b_eq = _vecteur(self.b_eq, self.A_eq.shape[0])
        self.A_in = _matrice(self.A_in, n)
        self.b_in = _vecteur(self.b_in, self.A_in.shape[0])
        self.lb = np.full(n, -np.inf) if self.lb is None else np.asarray(self.lb, dtype=float).reshape(n)
        self.ub = np.full(n, np.inf) if self.ub is None else np.asarray(self.ub, dtype=float).reshape(n)
        if not np.allclose(self.H, self.H.T, atol=1e-10 * max(1.0, np.abs(self.H).max(initial=0.0))):
            raise ValueError("H doit être symétrique")
        self.H = 0.5 * (self.H + self.H.T)
        try:
            np.linalg.cholesky(self.H + DECALAGE_PSD * np.eye(n))
        except np.linalg.LinAlgError as e:
            raise ValueError("H n'est pas semi-définie positive") from e

    @property
    def n(self):
        return self.H.shape[0]

    def contraintes_assemblees(self):
        """
        Inégalités assemblées A x >= b : lignes A_in, puis bornes inférieures
        finies, puis bornes supérieures finies.

        Returns:
            tuple: (A, b, type, indice) où type vaut 0 (A_in), 1 (lb), 2 (ub)
        """
        n = self.n
        idx_lb = np.flatnonzero(np.isfinite(self.lb))
        idx_ub = np.flatnonzero(np.isfinite(self.ub))
        identite = np.eye(n)
        A = np.vstack([self.A_in, identite[idx_lb], -identite[idx_ub]])
        b = np.concatenate([self.b_in, self.lb[idx_lb], -self.ub[idx_ub]])
        types = np.concatenate([np.zeros(self.A_in.shape[0], dtype=int),
                                np.ones(idx_lb.size, dtype=int), np.full(idx_ub.size, 2)])
        indices = np.concatenate([np.arange(self.A_in.shape[0]), idx_lb, idx_ub]).astype(int)
        return A, b, types, indices

    def objectif(self, x):
        return float(0.5 * x @ self.H @ x + self.g @ x)


@dataclass
class ResultatQP:
    x: Optional[np.ndarray]
    statut: str
    actifs: tuple = ()
    lambda_eq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lambda_in: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lambda_lb: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lambda_ub: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0
    objectif: float = float('nan')

# ==============================================================================
# FONCTION 2 : PHASE 1 (POINT RÉALISABLE)
# ==============================================================================

def _est_realisable(p, x, A, b, tol):
    echelle = 1.0 + np.abs(x).max(initial=0.0)
    if p.A_eq.shape[0] and np.abs(p.A_eq @ x - p.b_eq).max() > tol * echelle:
        return False
    if A.shape[0] and (A @ x - b).min() < -tol * echelle:
        return False
    return True


def _point_realisable(p, A, b, x0, tol):
    """
    Point de départ réalisable : x0 s'il convient, sinon programme linéaire
    maximisant la marge commune t des inégalités (A x - b >= t, t <= 1).

    Le point obtenu est intérieur dès que le domaine l'autorise, ce qui
    évite de démarrer sur un sommet dégénéré.
    """
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float).reshape(p.n)
        if _est_realisable(p, x0, A, b, tol):
            return x0
    n = p.n
    m = A.shape[0]
    m_eq = p.A_eq.shape[0]
    c = np.zeros(n + 1)
    c[-1] = -1.0 if m else 0.0
    res = linprog(
        c=c,
        A_ub=np.hstack([-A, np.ones((m, 1))]) if m else None,
        b_ub=-b if m else None,
        A_eq=np.hstack([p.A_eq, np.zeros((m_eq, 1))]) if m_eq else None,
        b_eq=p.b_eq if m_eq else None,
        bounds=[(None, None)] * n + [(None, 1.0) if m else (0.0, 0.0)],
        method='highs'
    )
    if res.status != 0:
        return None
    if m and res.x[-1] < -1e-7 * (1.0 + np.abs(b).max()):
        return None
    return np.asarray(res.x[:n], dtype=float)


def _independante(base, ligne):
    """Vrai si `ligne` n'appartient pas à l'espace engendré par les lignes de `base`."""
    if base.shape[0] == 0:
        return np.linalg.norm(ligne) > 1e-12
    rang = np.linalg.matrix_rank(base, tol=1e-10)
    return np.linalg.matrix_rank(np.vstack([base, ligne]), tol=1e-10) > rang


def _direction(H, A_w, grad, tol):
    """
    Pas de Newton sur la variété de travail par la méthode de l'espace nul.

    Returns:
        tuple: (pas, borne) ; borne vaut False si `pas` est une direction de
        descente à courbure nulle (problème non borné le long de cette direction)
    """
    n = H.shape[0]
    if A_w.shape[0]:
        _, valeurs_sing, Vt = np.linalg.svd(A_w)
        rang = int(np.sum(valeurs_sing > 1e-10 * max(1.0, valeurs_sing[0])))
        Z = Vt[rang:].T
    else:
        Z = np.eye(n)
    if Z.shape[1] == 0:
        return np.zeros(n), True
    valeurs, vecteurs = np.linalg.eigh(Z.T @ H @ Z)
    coeffs = vecteurs.T @ (Z.T @ grad)
    plates = valeurs <= 1e-13 * max(1.0, np.abs(valeurs).max())
    if np.any(np.abs(coeffs[plates]) > tol * (1.0 + np.abs(grad).max())):
        return -Z @ (vecteurs[:, plates] @ coeffs[plates]), False
    u = -vecteurs[:, ~plates] @ (coeffs[~plates] / valeurs[~plates])
    return Z @ u, True

# ==============================================================================
# FONCTION 3 : QP À ENSEMBLE ACTIF
# ==============================================================================

def solve_qp(p, tol=None, max_iter=None, x0=None, actifs=None):
    """
    Résout un QP convexe par la méthode primale à ensemble actif.

    Args:
        p (QPProblem): Problème
        tol (float, optional): Tolérance KKT (défaut SOLVEUR_CONFIG['tol_qp'])
        max_iter (int, optional): Itérations maximales (défaut SOLVEUR_CONFIG['max_iter_qp'])
        x0 (np.ndarray, optional): Point de départ (utilisé s'il est réalisable)
        actifs (iterable, optional): Ensemble actif de départ (indices des
            contraintes assemblées), typiquement celui du pas précédent

    Returns:
        ResultatQP: statut 'optimal', 'infeasible' ou 'iteration_limit'

    Example:
        >>> res = solve_qp(QPProblem(np.eye(2), np.zeros(2), A_eq=[[1, 1]], b_eq=[1]))
        >>> res.x
        array([0.5, 0.5])
    """
    tol = settings.SOLVEUR_CONFIG['tol_qp'] if tol is None else tol
    max_iter = settings.SOLVEUR_CONFIG['max_iter_qp'] if max_iter is None else max_iter
    A, b, types, indices = p.contraintes_assemblees()
    m_eq = p.A_eq.shape[0]

    x = _point_realisable(p, A, b, x0, tol)
    if x is None:
        return ResultatQP(x=None, statut='infeasible')

    echelle = 1.0 + np.abs(x).max(initial=0.0)
    residus = A @ x - b
    normes = np.linalg.norm(A, axis=1)
    # Départ à chaud : seules les contraintes proposées, actives et indépendantes
    W = []
    base = p.A_eq.copy()
    for i in sorted({int(i) for i in actifs}) if actifs is not None else []:
        if 0 <= i < A.shape[0] and residus[i] <= tol * echelle and _independante(base, A[i]):
            W.append(i)
            base = np.vstack([base, A[i]])

    degenere = False
    # Vrai après un pas complet : x minimise déjà le QP sur la variété de travail
    sur_minimum = False
    for iteration in range(1, max_iter + 1):
        grad = p.H @ x + p.g
        A_w = np.vstack([p.A_eq, A[W]]) if W else p.A_eq
        pas, borne = _direction(p.H, A_w, grad, tol)
        norme_pas = float(np.linalg.norm(pas))

        if borne and (sur_minimum or norme_pas <= 1e-12 * echelle):
            sur_minimum = False
            lam = np.linalg.lstsq(A_w.T, grad, rcond=None)[0] if A_w.shape[0] else np.zeros(0)
            lam_w = lam[m_eq:]
            seuil = tol * (1.0 + np.abs(grad).max(initial=0.0))
            if len(W) == 0 or lam_w.min() >= -seuil:
                return _resultat_optimal(p, x, W, lam, types, indices, iteration)
            negatifs = np.flatnonzero(lam_w < -seuil)
            if degenere:
                # Règle de Bland : plus petit indice après un pas nul
                retrait = min(negatifs, key=lambda k: W[k])
            else:
                retrait = int(np.argmin(lam_w))
            W.pop(int(retrait))
            continue

        # Test du rapport : seuil relatif, ex aequo départagés par le plus petit indice
        Ap = A @ pas
        hors = np.ones(A.shape[0], dtype=bool)
        hors[W] = False
        candidats = np.flatnonzero(hors & (Ap < -1e-12 * normes * norme_pas))
        ratios = np.maximum(0.0, (A[candidats] @ x - b[candidats]) / -Ap[candidats])
        alpha_max = 1.0 if borne else np.inf
        alpha = alpha_max
        bloquante = None
        rmin = None
        for k in np.lexsort((candidats, ratios)):
            if ratios[k] >= alpha_max or (rmin is not None and ratios[k] > rmin + 1e-12 * (1.0 + rmin)):
                break
            if not _independante(A_w, A[candidats[k]]):
                continue
            if rmin is None:
                rmin = float(ratios[k])
                alpha = rmin
            if bloquante is None or candidats[k] < bloquante:
                bloquante = int(candidats[k])
        if bloquante is None and not borne:
            logger.debug("QP non borné détecté")
            return ResultatQP(x=x, statut='iteration_limit', actifs=tuple(W),
                              iterations=iteration, objectif=p.objectif(x))
        x = x + alpha * pas
        echelle = 1.0 + np.abs(x).max(initial=0.0)
        degenere = alpha * norme_pas <= 1e-14 * echelle
        if bloquante is not None:
            W.append(bloquante)
        else:
            sur_minimum = True

    return ResultatQP(x=x, statut='iteration_limit', actifs=tuple(W),
                      iterations=max_iter, objectif=p.objectif(x))


def _resultat_optimal(p, x, W, lam, types, indices, iterations):
    """Répartit les multiplicateurs de l'ensemble actif par type de contrainte."""
    n = p.n
    m_eq = p.A_eq.shape[0]
    lambda_in = np.zeros(p.A_in.shape[0])
    lambda_lb = np.zeros(n)
    lambda_ub = np.zeros(n)
    for k, i in enumerate(W):
        valeur = max(0.0, lam[m_eq + k])
        if types[i] == 0:
            lambda_in[indices[i]] = valeur
        elif types[i] == 1:
            lambda_lb[indices[i]] = valeur
        else:
            lambda_ub[indices[i]] = valeur
    return ResultatQP(
        x=x, statut='optimal', actifs=tuple(W),
        lambda_eq=lam[:m_eq].copy(), lambda_in=lambda_in,
        lambda_lb=lambda_lb, lambda_ub=lambda_ub,
        iterations=iterations, objectif=p.objectif(x)
    )


def verifier_kkt(p, res, tol=None):
    """
    Vérificateur KKT indépendant du solveur.

    Args:
        p (QPProblem): Problème
        res (ResultatQP): Solution annoncée optimale
        tol (float, optional): Tolérance de base (le seuil est 10·tol)

    Returns:
        dict: résidus 'stationnarite', 'primal', 'dual', 'complementarite' et 'ok'
    """
    tol = settings.SOLVEUR_CONFIG['tol_qp'] if tol is None else tol
    x = res.x
    gradient = p.H @ x + p.g - p.A_eq.T @ res.lambda_eq - p.A_in.T @ res.lambda_in - res.lambda_lb + res.lambda_ub
    ecarts_in = p.A_in @ x - p.b_in
    finis_lb = np.isfinite(p.lb)
    finis_ub = np.isfinite(p.ub)
    ecarts_lb = (x - p.lb)[finis_lb]
    ecarts_ub = (p.ub - x)[finis_ub]
    primal = max(
        np.abs(p.A_eq @ x - p.b_eq).max(initial=0.0),
        max(0.0, -ecarts_in.min(initial=0.0)),
        max(0.0, -ecarts_lb.min(initial=0.0)),
        max(0.0, -ecarts_ub.min(initial=0.0))
    )
    multiplicateurs = np.concatenate([res.lambda_in, res.lambda_lb, res.lambda_ub])
    dual = max(0.0, -multiplicateurs.min(initial=0.0))
    complementarite = max(
        np.abs(res.lambda_in * ecarts_in).max(initial=0.0),
        np.abs(res.lambda_lb[finis_lb] * ecarts_lb).max(initial=0.0),
        np.abs(res.lambda_ub[finis_ub] * ecarts_ub).max(initial=0.0)
    )
    echelle = 1.0 + max(np.abs(p.g).max(initial=0.0), np.abs(p.H).max(initial=0.0) * np.abs(x).max(initial=0.0))
    stationnarite = float(np.abs(gradient).max(initial=0.0))
    seuil = 10.0 * tol * echelle
    return {
        'stationnarite': stationnarite,
        'primal': float(primal),
        'dual': float(dual),
        'complementarite': float(complementarite),
        'ok': bool(stationnarite <= seuil and primal <= seuil and dual <= seuil and complementarite <= seuil)
    }

# ==============================================================================
# FONCTION 4 : PROBLÈME NON LINÉAIRE ET SQP
# ==============================================================================

@dataclass
class NLPProblem:
    """
    min f(x)  s.c.  c_E(x) = 0 ; c_I(x) >= 0 ; lb <= x <= ub.

    Les jacobiennes retournent des matrices (m, n).
    """
    cout: Callable
    gradient: Callable
    x0: np.ndarray
    egalites: Optional[Callable] = None
    jac_egalites: Optional[Callable] = None
    inegalites: Optional[Callable] = None
    jac_inegalites: Optional[Callable] = None
    lb: Optional[np.ndarray] = None
    ub: Optional[np.ndarray] = None

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        n = self.x0.size
        self.lb = np.full(n, -np.inf) if self.lb is None else np.asarray(self.lb, dtype=float)
        self.ub = np.full(n, np.inf) if self.ub is None else np.asarray(self.ub, dtype=float)
        if np.any(self.lb > self.ub):
            raise ValueError("Bornes incohérentes (lb > ub)")


@dataclass
class ResultatNLP:
    x: np.ndarray
    statut: str
    iterations: int
    violation: float
    optimalite: float
    cout: float
    lambda_eq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lambda_in: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _evaluer(p, x):
    """Évalue coût, gradient, contraintes et jacobiennes en x."""
    n = x.size
    f = float(p.cout(x))
    gf = np.asarray(p.gradient(x), dtype=float).reshape(n)
    if p.egalites is not None:
        cE = np.asarray(p.egalites(x), dtype=float).ravel()
        JE = np.asarray(p.jac_egalites(x), dtype=float).reshape(cE.size, n)
    else:
        cE, JE = np.zeros(0), np.zeros((0, n))
    if p.inegalites is not None:
        cI = np.asarray(p.inegalites(x), dtype=float).ravel()
        JI = np.asarray(p.jac_inegalites(x), dtype=float).reshape(cI.size, n)
    else:
        cI, JI = np.zeros(0), np.zeros((0, n))
    return f, gf, cE, JE, cI, JI


def _violation_l1(cE, cI):
    return float(np.abs(cE).sum() + np.maximum(0.0, -cI).sum())


def _violation_max(cE, cI):
    return float(max(np.abs(cE).max(initial=0.0), np.maximum(0.0, -cI).max(initial=0.0)))


def _merite(p, x, nu):
    """Fonction de mérite l1 ; +inf si l'évaluation échoue hors domaine."""
    try:
        f = float(p.cout(x))
        cE = np.asarray(p.egalites(x), dtype=float).ravel() if p.egalites is not None else np.zeros(0)
        cI = np.asarray(p.inegalites(x), dtype=float).ravel() if p.inegalites is not None else np.zeros(0)
    except (ErreurConception, FloatingPointError, ValueError):
        return np.inf, None
    if not (np.isfinite(f) and np.all(np.isfinite(cE)) and np.all(np.isfinite(cI))):
        return np.inf, None
    return f + nu * _violation_l1(cE, cI), cE


def _qp_elastique(B, gf, cE, JE, cI, JI, lb, ub, rho, max_iter):
    """
    Sous-problème élastique : contraintes linéarisées relâchées par des
    écarts positifs pénalisés en l1.
    """
    n = gf.size
    mE, mI = cE.size, cI.size
    ne = n + 2 * mE + mI
    H = np.zeros((ne, ne))
    H[:n, :n] = B
    H[n:, n:] = 1e-6 * np.eye(ne - n)
    g = np.concatenate([gf, np.full(ne - n, rho)])
    A_eq = np.hstack([JE, -np.eye(mE), np.eye(mE), np.zeros((mE, mI))]) if mE else None
    A_in = np.hstack([JI, np.zeros((mI, 2 * mE)), np.eye(mI)]) if mI else None
    borne_inf = np.concatenate([lb, np.zeros(ne - n)])
    borne_sup = np.concatenate([ub, np.full(ne - n, np.inf)])
    depart = np.concatenate([np.zeros(n), np.maximum(cE, 0.0), np.maximum(-cE, 0.0), np.maximum(-cI, 0.0)])
    qp = QPProblem(H, g, A_eq, -cE if mE else None, A_in, -cI if mI else None, borne_inf, borne_sup)
    res = solve_qp(qp, max_iter=max_iter, x0=depart)
    if res.statut != 'optimal':
        return None
    return res.x[:n], res.lambda_eq[:mE], res.lambda_in[:mI], res.lambda_lb[:n], res.lambda_ub[:n]


def solve_nlp(p, tol_con=None, tol_opt=None, max_iter=None, max_iter_qp=None):
    """
    Résout un NLP par SQP (BFGS amorti, mérite l1, mode élastique).

    Args:
        p (NLPProblem): Problème ; x0 est ramené dans les bornes
        tol_con (float, optional): Tolérance sur la violation des contraintes
        tol_opt (float, optional): Tolérance d'optimalité du premier ordre
        max_iter (int, optional): Itérations SQP maximales
        max_iter_qp (int, optional): Itérations maximales des sous-problèmes

    Returns:
        ResultatNLP: statut 'optimal', 'iteration_limit',
        'line_search_failure' ou 'qp_failure' ; x est toujours dans les bornes

    Example:
        >>> prob = NLPProblem(lambda x: (x[0] - 1) ** 2, lambda x: 2 * (x - 1), np.zeros(1),
        ...                   inegalites=lambda x: 0.5 - x, jac_inegalites=lambda x: -np.eye(1))
        >>> solve_nlp(prob).x
        array([0.5])
    """
    cfg = settings.SOLVEUR_CONFIG
    tol_con = cfg['tol_con'] if tol_con is None else tol_con
    tol_opt = cfg['tol_opt'] if tol_opt is None else tol_opt
    max_iter = cfg['max_iter_nlp'] if max_iter is None else max_iter
    max_iter_qp = cfg['max_iter_qp'] if max_iter_qp is None else max_iter_qp

    x = np.clip(p.x0, p.lb, p.ub)
    n = x.size
    try:
        f, gf, cE, JE, cI, JI = _evaluer(p, x)
    except (ErreurConception, FloatingPointError, ValueError) as e:
        logger.debug(f"Évaluation initiale impossible : {e}")
        return ResultatNLP(x=x, statut='line_search_failure', iterations=0,
                           violation=np.inf, optimalite=np.inf, cout=np.inf)

    B = np.eye(n)
    nu = 1.0
    lamE, lamI = np.zeros(cE.size), np.zeros(cI.size)
    optimalite = np.inf
    for iteration in range(1, max_iter + 1):
        violation = _violation_max(cE, cI)
        qp = QPProblem(B, gf, JE if cE.size else None, -cE if cE.size else None,
                       JI if cI.size else None, -cI if cI.size else None, p.lb - x, p.ub - x)
        res = solve_qp(qp, max_iter=max_iter_qp, x0=np.zeros(n))
        elastique = res.statut != 'optimal'
        if elastique:
            sortie = _qp_elastique(B, gf, cE, JE, cI, JI, p.lb - x, p.ub - x, 10.0 * nu, max_iter_qp)
            if sortie is None:
                return ResultatNLP(x=x, statut='qp_failure', iterations=iteration,
                                   violation=violation, optimalite=optimalite, cout=f,
                                   lambda_eq=lamE, lambda_in=lamI)
            pas, lamE, lamI, lam_lb, lam_ub = sortie
        else:
            pas, lamE, lamI, lam_lb, lam_ub = res.x, res.lambda_eq, res.lambda_in, res.lambda_lb, res.lambda_ub

        grad_L = gf - JE.T @ lamE - JI.T @ lamI - lam_lb + lam_ub
        optimalite = float(np.abs(grad_L).max(initial=0.0))
        if violation <= tol_con and (optimalite <= tol_opt or np.abs(pas).max(initial=0.0) <= 1e-14):
            return ResultatNLP(x=x, statut='optimal', iterations=iteration, violation=violation,
                               optimalite=optimalite, cout=f, lambda_eq=lamE, lambda_in=lamI)

        multiplicateurs = np.concatenate([np.abs(lamE), lamI])
        nu = max(nu, 1.1 * multiplicateurs.max(initial=0.0) + 1e-3)

        phi0 = f + nu * _violation_l1(cE, cI)
        lineaire_E = cE + JE @ pas
        lineaire_I = cI + JI @ pas
        derivee = float(gf @ pas) - nu * (_violation_l1(cE, cI) - _violation_l1(lineaire_E, lineaire_I))

        alpha = 1.0
        x_nouveau = None
        while alpha >= 1e-10:
            essai = np.clip(x + alpha * pas, p.lb, p.ub)
            phi, cE_essai = _merite(p, essai, nu)
            if phi <= phi0 + 1e-4 * alpha * derivee:
                x_nouveau = essai
                break
            if alpha == 1.0 and cE_essai is not None and cE.size:
                # Correction du second ordre sur les égalités
                correction = -JE.T @ np.linalg.lstsq(JE @ JE.T, cE_essai, rcond=None)[0]
                essai_soc = np.clip(x + pas + correction, p.lb, p.ub)
                phi_soc, _ = _merite(p, essai_soc, nu)
                if phi_soc <= phi0 + 1e-4 * derivee:
                    x_nouveau = essai_soc
                    break
            alpha *= 0.5
        if x_nouveau is None:
            statut = 'optimal' if violation <= tol_con and optimalite <= 10.0 * tol_opt else 'line_search_failure'
            return ResultatNLP(x=x, statut=statut, iterations=iteration, violation=violation,
                               optimalite=optimalite, cout=f, lambda_eq=lamE, lambda_in=lamI)

        try:
            f_n, gf_n, cE_n, JE_n, cI_n, JI_n = _evaluer(p, x_nouveau)
        except (ErreurConception, FloatingPointError, ValueError):
            return ResultatNLP(x=x, statut='line_search_failure', iterations=iteration,
                               violation=violation, optimalite=optimalite, cout=f,
                               lambda_eq=lamE, lambda_in=lamI)

        # Mise à jour BFGS amortie (Powell)
        s = x_nouveau - x
        y = (gf_n - JE_n.T @ lamE - JI_n.T @ lamI) - (gf - JE.T @ lamE - JI.T @ lamI)
        Bs = B @ s
        sBs = float(s @ Bs)
        if sBs > 1e-16:
            sy = float(s @ y)
            if sy < 0.2 * sBs:
                theta = 0.8 * sBs / (sBs - sy)
                y = theta * y + (1.0 - theta) * Bs
                sy = float(s @ y)
            B = B + np.outer(y, y) / sy - np.outer(Bs, Bs) / sBs
            B = 0.5 * (B + B.T)

        x, f, gf, cE, JE, cI, JI = x_nouveau, f_n, gf_n, cE_n, JE_n, cI_n, JI_n

    violation = _violation_max(cE, cI)
    return ResultatNLP(x=x, statut='iteration_limit', iterations=max_iter, violation=violation,
                       optimalite=optimalite, cout=f, lambda_eq=lamE, lambda_in=lamI)
