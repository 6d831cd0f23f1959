"""
==============================================================================
MODULE STATIQUE ET COLLISIONS
==============================================================================
Équilibre statique de l'outil sous l'effort de pointe et les efforts de
contact (pyramide de frottement linéarisée), couples articulaires et
contraintes de non-collision entre capsules.

Convention d'effort : f_i est l'effort exercé par le doigt sur l'outil,
exprimé dans le repère de Gauss non tourné {C0} du contact (z_C0 normale
entrante de l'outil) ; l'équilibre est écrit au point origine de {O}.

Fonctions principales :
- equilibrium_feasible() : programme linéaire de faisabilité (scipy linprog)
- equilibre_fp() : faisabilité pour les deux sens de l'effort de pointe
- forces_norme_minimale() : efforts de norme minimale (QP)
- joint_torques() : couples τ = Jᵀ(-f) par doigt en contact
- segment_distance() : distance exacte entre deux segments
- collision_values() / collision_jacobian() : jeux entre capsules

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings
from core import AxeDegenere
from core.contact import ContexteMain, articulations_completes, axe_rotation, geometries, indices_doigt
from core.model import points_liens
from core.solve import QPProblem, solve_qp
from utils.logger import setup_logger

logger = setup_logger('mechanics')

# ==============================================================================
# FONCTION 1 : TYPES DE DOMAINE
# ==============================================================================

@dataclass(frozen=True)
class FrictionModel:
    """Coulomb linéarisé : coefficient, nombre de facettes, effort normal minimal (N)."""
    mu: float = 0.5
    nb_facettes: int = 8
    force_normale_min: float = 0.1

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("Coefficient de frottement non positif")
        if self.nb_facettes < 4:
            raise ValueError("Pyramide de frottement : au moins 4 facettes")
        if self.force_normale_min < 0:
            raise ValueError("Effort normal minimal négatif")

    @classmethod
    def depuis_config(cls, frottement=None):
        frottement = frottement or settings.FROTTEMENT_CONFIG
        return cls(float(frottement['mu']), int(frottement['nb_facettes']),
                   float(frottement['force_normale_min']))


REGLES_EFFORT = ('cut_tangent_positive', 'cut_tangent_negative', 'explicite')


@dataclass(frozen=True)
class TipForce:
    """Effort externe à la pointe de l'outil (N)."""
    magnitude: float
    regle: str = 'cut_tangent_positive'
    vecteur: tuple = None

    def __post_init__(self):
        if self.magnitude < 0:
            raise ValueError("Magnitude d'effort négative")
        if self.regle not in REGLES_EFFORT:
            raise ValueError(f"Règle d'effort inconnue : {self.regle}")
        if self.regle == 'explicite':
            if self.vecteur is None or abs(np.linalg.norm(self.vecteur) - 1.0) > 1e-9:
                raise ValueError("Direction explicite absente ou non unitaire")

    def oppose_au_mouvement(self, direction):
        """Effort de coupe résistant à une rotation de l'outil dans le sens `direction`."""
        regle = 'cut_tangent_negative' if direction > 0 else 'cut_tangent_positive'
        return TipForce(self.magnitude, regle)


@dataclass
class CollisionReport:
    """Jeux (mm) de toutes les paires vérifiées."""
    paires: list = field(default_factory=list)

    @property
    def minimum(self):
        return min((jeu for _, jeu in self.paires), default=math.inf)


@dataclass
class ResultatEquilibre:
    faisable: bool
    forces: np.ndarray = None
    statut: str = ''

# ==============================================================================
# FONCTION 2 : ÉQUILIBRE STATIQUE
# ==============================================================================

def point_pointe(tool):
    return np.array([0.0, 0.0, tool.pointe])


def tangente_coupe(axe, tool):
    """Direction de déplacement de la pointe pour une rotation positive de l'outil."""
    centre, k = axe
    t = np.cross(k, point_pointe(tool) - centre)
    norme = np.linalg.norm(t)
    if norme < 1e-12:
        raise AxeDegenere("Pointe de l'outil sur l'axe de rotation")
    return t / norme


def direction_effort_pointe(tip, axe, tool):
    if tip.regle == 'explicite':
        return np.asarray(tip.vecteur, dtype=float)
    t = tangente_coupe(axe, tool)
    return t if tip.regle == 'cut_tangent_positive' else -t


def torseur_pointe(tip, axe, tool):
    force = tip.magnitude * direction_effort_pointe(tip, axe, tool)
    return np.concatenate([force, np.cross(point_pointe(tool), force)])


def _torseur_ou_aucun(tip, axe, tool):
    """Torseur de pointe, ou None si la tangente de coupe est indéfinie."""
    if tip.magnitude <= 0:
        return np.zeros(6)
    try:
        return torseur_pointe(tip, axe, tool)
    except AxeDegenere as e:
        logger.debug(f"Équilibre déclaré infaisable : {e}")
        return None


def matrice_prehension(state, d, tool):
    """Matrice (6, 3n) des torseurs au point origine pour des efforts exprimés dans {C0}."""
    G = np.zeros((6, 3 * state.n))
    for i, g in enumerate(geometries(state, d, tool)):
        R0 = g.outil.R
        G[:3, 3 * i:3 * i + 3] = R0
        G[3:, 3 * i:3 * i + 3] = np.cross(g.outil.p, R0.T).T
    return G


def lignes_pyramide(fric, n):
    """
    Contraintes A f >= b de la pyramide linéarisée pour n contacts.

    Facette m : mu cos(pi/N) f_z - (cos θm f_x + sin θm f_y) >= 0 avec
    θm = 2π(m + 1/2)/N, plus f_z >= force_normale_min.
    """
    N = fric.nb_facettes
    bloc = np.zeros((N + 1, 3))
    for m in range(N):
        theta = 2.0 * math.pi * (m + 0.5) / N
        bloc[m] = [-math.cos(theta), -math.sin(theta), fric.mu * math.cos(math.pi / N)]
    bloc[N] = [0.0, 0.0, 1.0]
    A = np.kron(np.eye(n), bloc)
    b = np.tile(np.concatenate([np.zeros(N), [fric.force_normale_min]]), n)
    return A, b


def faisabilite_efforts(G, w_tip, fric):
    """Programme linéaire Σ G_i f_i + w_tip = 0, f_i dans la pyramide."""
    n = G.shape[1] // 3
    A, b = lignes_pyramide(fric, n)
    res = linprog(np.zeros(3 * n), A_ub=-A, b_ub=-b, A_eq=G, b_eq=-w_tip,
                  bounds=[(None, None)] * (3 * n), method='highs')
    if res.status == 0:
        return ResultatEquilibre(True, res.x.reshape(n, 3), 'faisable')
    return ResultatEquilibre(False, None, 'infaisable' if res.status == 2 else res.message)


def equilibrium_feasible(state, d, fp, tool, tip, fric, axe=None):
    """
    Faisabilité de l'équilibre statique de l'outil.

    Args:
        state (SystemState): État (résidu de contact satisfait)
        d, fp, tool: Conception, pose fondamentale, outil
        tip (TipForce): Effort de pointe
        fric (FrictionModel): Modèle de frottement
        axe (tuple, optional): Axe (c, k) ; nécessaire pour les règles tangentielles

    Returns:
        ResultatEquilibre: forces (n, 3) dans {C0} si faisable

    Example:
        >>> res = equilibrium_feasible(etat, d, fp, tool, TipForce(0.0), FrictionModel(0.5, 8, 0.0))
        >>> res.faisable
        True
    """
    if tip.regle != 'explicite' and axe is None:
        axe = axe_rotation(state, d, fp, tool)
    w_tip = _torseur_ou_aucun(tip, axe, tool)
    if w_tip is None:
        return ResultatEquilibre(False, None, "pointe sur l'axe de rotation")
    G = matrice_prehension(state, d, tool)
    return faisabilite_efforts(G, w_tip, fric)


def equilibre_fp(state, d, fp, tool, fric, magnitude=None, axe=None):
    """
    Équilibre pour les deux sens de l'effort de pointe tangent à la coupe.

    Returns:
        tuple: (faisable, détail) ; détail nomme le sens en échec
    """
    magnitude = settings.EFFORT_POINTE_CONFIG['magnitude'] if magnitude is None else magnitude
    axe = axe if axe is not None else axe_rotation(state, d, fp, tool)
    for regle in ('cut_tangent_positive', 'cut_tangent_negative'):
        res = equilibrium_feasible(state, d, fp, tool, TipForce(magnitude, regle), fric, axe)
        if not res.faisable:
            return False, f"équilibre impossible ({regle})"
    return True, ''


def forces_norme_minimale(state, d, fp, tool, tip, fric, axe=None):
    """
    Efforts de contact faisables de norme euclidienne minimale.

    Le QP est initialisé au point du programme linéaire.

    Returns:
        ResultatEquilibre
    """
    if tip.regle != 'explicite' and axe is None:
        axe = axe_rotation(state, d, fp, tool)
    w_tip = _torseur_ou_aucun(tip, axe, tool)
    if w_tip is None:
        return ResultatEquilibre(False, None, "pointe sur l'axe de rotation")
    G = matrice_prehension(state, d, tool)
    lp = faisabilite_efforts(G, w_tip, fric)
    if not lp.faisable:
        return lp
    n = state.n
    A, b = lignes_pyramide(fric, n)
    qp = QPProblem(H=2.0 * np.eye(3 * n), g=np.zeros(3 * n), A_eq=G, b_eq=-w_tip, A_in=A, b_in=b)
    res = solve_qp(qp, x0=lp.forces.ravel())
    if res.statut != 'optimal':
        logger.debug(f"QP de norme minimale : statut {res.statut}, efforts du LP conservés")
        return lp
    return ResultatEquilibre(True, res.x.reshape(n, 3), 'faisable')

# ==============================================================================
# FONCTION 3 : COUPLES ARTICULAIRES
# ==============================================================================

def joint_torques(state, d, fp, tool, forces):
    """
    Couples articulaires (N.mm) des doigts en contact : τ = Jᵀ(-f).

    Args:
        state (SystemState): État
        d, fp, tool: Conception, pose fondamentale, outil
        forces (np.ndarray): Efforts (n, 3) des doigts sur l'outil, dans {C0}

    Returns:
        dict: doigt -> np.ndarray (3) [MCP flexion, MCP abduction, IP]
    """
    forces = np.asarray(forces, dtype=float).reshape(state.n, 3)
    couples = {}
    for i, g in enumerate(geometries(state, d, tool)):
        f_O = g.outil.R @ forces[i]
        J = np.column_stack([np.cross(g.axes[:, j], g.p_P - g.origines[:, j]) for j in range(3)])
        couples[state.contacts[i].doigt] = J.T @ (-f_O)
    return couples

# ==============================================================================
# FONCTION 4 : DISTANCE ENTRE SEGMENTS
# ==============================================================================

def _projeter_sur_segment(x, a, b):
    ab = b - a
    denom = float(ab @ ab)
    if denom < 1e-12:
        return 0.0
    return min(1.0, max(0.0, float((x - a) @ ab) / denom))


def plus_proches(p1, q1, p2, q2, eps=1e-12):
    """
    Paramètres (s, t) des points les plus proches sur [p1, q1] et [p2, q2].

    Candidat intérieur (si les droites ne sont pas parallèles) puis les
    quatre projections d'extrémités ; le meilleur candidat est retenu.
    """
    p1, q1, p2, q2 = (np.asarray(x, dtype=float) for x in (p1, q1, p2, q2))
    u = q1 - p1
    v = q2 - p2
    w0 = p1 - p2
    a, b, c = u @ u, u @ v, v @ v
    dd, e = u @ w0, v @ w0
    D = a * c - b * b

    candidats = []
    if D > eps * max(a * c, 1.0):
        s = (b * e - c * dd) / D
        t = (a * e - b * dd) / D
        if 0.0 <= s <= 1.0 and 0.0 <= t <= 1.0:
            candidats.append((s, t))
    candidats.append((_projeter_sur_segment(p2, p1, q1), 0.0))
    candidats.append((_projeter_sur_segment(q2, p1, q1), 1.0))
    candidats.append((0.0, _projeter_sur_segment(p1, p2, q2)))
    candidats.append((1.0, _projeter_sur_segment(q1, p2, q2)))

    meilleur = None
    for s, t in candidats:
        ecart = (p1 + s * u) - (p2 + t * v)
        d2 = float(ecart @ ecart)
        if meilleur is None or d2 < meilleur[0]:
            meilleur = (d2, s, t)
    d2, s, t = meilleur
    return math.sqrt(d2), s, t


def segment_distance(p1, q1, p2, q2):
    """
    Distance minimale exacte entre deux segments (cas parallèles et dégénérés inclus).

    Returns:
        tuple: (distance, (point sur le premier segment, point sur le second))

    Example:
        >>> segment_distance([0, 0, 0], [1, 0, 0], [0, 0, 3], [1, 0, 3])[0]
        3.0
    """
    distance, s, t = plus_proches(p1, q1, p2, q2)
    p1, q1, p2, q2 = (np.asarray(x, dtype=float) for x in (p1, q1, p2, q2))
    return distance, (p1 + s * (q1 - p1), p2 + t * (q2 - p2))

# ==============================================================================
# FONCTION 5 : CONTRAINTES DE COLLISION
# ==============================================================================

@dataclass
class Lien:
    """Segment d'une capsule dans {O} et dérivées de ses extrémités."""
    ident: str
    doigt: int
    p: np.ndarray
    q: np.ndarray
    rayon: float
    dp_theta: np.ndarray = None
    dq_theta: np.ndarray = None
    dp_u: np.ndarray = None
    dq_u: np.ndarray = None


def liens_main(state, d, fp):
    """Huit phalanges dans {O} avec dérivées par rapport à θ_h et aux articulations."""
    contexte = ContexteMain(state, d)
    articulations = articulations_completes(state, fp)
    liens = []
    for doigt in range(4):
        p_HR, R_HR = contexte.racines[doigt]
        R_OR = contexte.R_OH @ R_HR
        points, dpoints = points_liens(d, articulations[doigt])
        for nom, debut, fin in (('proximal', 'mcp', 'ip'), ('distal', 'ip', 'bout')):
            liens.append(Lien(
                ident=f"d{doigt}_{nom}", doigt=doigt,
                p=contexte.vers_O(doigt, points[debut]), q=contexte.vers_O(doigt, points[fin]),
                rayon=d.d4,
                dp_theta=contexte.derivees_theta(doigt, points[debut]),
                dq_theta=contexte.derivees_theta(doigt, points[fin]),
                dp_u=R_OR @ dpoints[debut], dq_u=R_OR @ dpoints[fin]
            ))
    return liens


def lien_outil(tool):
    zeros = np.zeros((3, 6))
    return Lien('outil', -1, np.zeros(3), np.array([0.0, 0.0, tool.longueur]), tool.rayon,
                zeros, zeros, np.zeros((3, 3)), np.zeros((3, 3)))


def paires_collision(liens, fp):
    """
    Paires vérifiées : liens de doigts différents, puis outil contre chaque
    lien sauf la phalange distale d'un doigt en contact.
    """
    paires = []
    for a in range(len(liens)):
        for b in range(a + 1, len(liens)):
            if liens[a].doigt != liens[b].doigt:
                paires.append((a, b))
    for a, lien in enumerate(liens):
        if not (lien.doigt in fp.doigts and lien.ident.endswith('distal')):
            paires.append((a, -1))
    return paires


def _jeu(l1, l2, marge):
    distance, s, t = plus_proches(l1.p, l1.q, l2.p, l2.q)
    return distance - (l1.rayon + l2.rayon + marge), distance, s, t


def collision_values(state, d, fp, tool, marge=None):
    """
    Jeux signés distance - (r_a + r_b + marge) de toutes les paires vérifiées.

    Returns:
        tuple: (np.ndarray des jeux, liste des identifiants 'a|b')
    """
    marge = settings.MARGE_COLLISION if marge is None else marge
    liens = liens_main(state, d, fp)
    outil = lien_outil(tool)
    valeurs, idents = [], []
    for a, b in paires_collision(liens, fp):
        l2 = outil if b < 0 else liens[b]
        valeurs.append(_jeu(liens[a], l2, marge)[0])
        idents.append(f"{liens[a].ident}|{l2.ident}")
    return np.array(valeurs), idents


def rapport_collisions(state, d, fp, tool, marge=None):
    valeurs, idents = collision_values(state, d, fp, tool, marge)
    return CollisionReport(list(zip(idents, valeurs.tolist())))


def _gradient_paire(l1, l2, s, t, distance, dP1, dQ1, dP2, dQ2):
    """Gradient de la distance par rapport aux variables dont dérivent les extrémités."""
    if distance < 1e-12:
        return np.zeros(dP1.shape[1])
    P = l1.p + s * (l1.q - l1.p)
    Q = l2.p + t * (l2.q - l2.p)
    normale = (P - Q) / distance
    return normale @ ((1 - s) * dP1 + s * dQ1 - (1 - t) * dP2 - t * dQ2)


def collision_jacobian(state, d, fp, tool, marge=None):
    """
    Jacobienne (nb_paires, 8n+6) des jeux par rapport au vecteur d'état.

    Seuls θ_h et les articulations des doigts en contact interviennent.
    """
    marge = settings.MARGE_COLLISION if marge is None else marge
    liens = liens_main(state, d, fp)
    outil = lien_outil(tool)
    n = state.n
    dim = 8 * n + 6

    def derivees(lien):
        dP = np.zeros((3, dim))
        dQ = np.zeros((3, dim))
        dP[:, :6] = lien.dp_theta
        dQ[:, :6] = lien.dq_theta
        if lien.doigt in fp.doigts:
            cols = indices_doigt(n, fp.indice_contact(lien.doigt))[:3]
            dP[:, cols] = lien.dp_u
            dQ[:, cols] = lien.dq_u
        return dP, dQ

    cache = [derivees(lien) for lien in liens]
    zeros = (np.zeros((3, dim)), np.zeros((3, dim)))
    paires = paires_collision(liens, fp)
    J = np.zeros((len(paires), dim))
    for r, (a, b) in enumerate(paires):
        l2 = outil if b < 0 else liens[b]
        _, distance, s, t = _jeu(liens[a], l2, marge)
        dP2, dQ2 = zeros if b < 0 else cache[b]
        J[r] = _gradient_paire(liens[a], l2, s, t, distance, *cache[a], dP2, dQ2)
    return J


def taux_collision(state, d, fp, tool, axe, marge=None):
    """
    Valeurs des jeux et leurs dérivées temporelles par unité de
    [u̇_t ; u̇_f des doigts mobiles] ; dans {O} la main tourne de -φ.

    Returns:
        tuple: (valeurs (P,), matrice (P, 1 + 3m))
    """
    marge = settings.MARGE_COLLISION if marge is None else marge
    centre, k = axe
    liens = liens_main(state, d, fp)
    outil = lien_outil(tool)
    m = len(fp.mobiles)

    def vitesses(lien):
        if lien.doigt < 0:
            return np.zeros((3, 1 + 3 * m)), np.zeros((3, 1 + 3 * m))
        dP = np.zeros((3, 1 + 3 * m))
        dQ = np.zeros((3, 1 + 3 * m))
        dP[:, 0] = -np.cross(k, lien.p - centre)
        dQ[:, 0] = -np.cross(k, lien.q - centre)
        if lien.doigt in fp.mobiles:
            b = fp.mobiles.index(lien.doigt)
            dP[:, 1 + 3 * b:4 + 3 * b] = lien.dp_u
            dQ[:, 1 + 3 * b:4 + 3 * b] = lien.dq_u
        return dP, dQ

    paires = paires_collision(liens, fp)
    valeurs = np.zeros(len(paires))
    D = np.zeros((len(paires), 1 + 3 * m))
    for r, (a, b) in enumerate(paires):
        l2 = outil if b < 0 else liens[b]
        valeurs[r], distance, s, t = _jeu(liens[a], l2, marge)
        D[r] = _gradient_paire(liens[a], l2, s, t, distance, *vitesses(liens[a]), *vitesses(l2))
    return valeurs, D
