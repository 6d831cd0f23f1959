"""
==============================================================================
MODULE DE PLANIFICATION DU MANIEMENT DE L'OUTIL
==============================================================================
Depuis chaque FP, l'outil tourne à vitesse prescrite u̇_t autour de l'axe
de la FP ; à chaque pas un QP choisit les vitesses articulaires des doigts
mobiles qui minimisent le glissement aux contacts, puis les coordonnées de
contact sont intégrées par Runge-Kutta d'ordre 4.

Raisons d'arrêt : qp_failure, equilibrium_infeasible, joint_limit,
max_steps, singularity.

Fonctions principales :
- plan_step() : QP de glissement minimal pour un pas
- advance() : intégration RK4 d'un pas (et projection sur la variété)
- plan_path() : trajectoire complète depuis une FP dans un sens
- plan_all() : les six trajectoires d'un candidat (3 FP x 2 sens)

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings
from core import ErreurConception, ErreurDomaine, SingulariteCarte
from core.contact import (
    SystemState, axe_rotation, bornes_coordonnees_doigt, contact_evolution,
    contact_jacobian, indices_doigt, indices_outil, jacobien_reduit, reancrer_etat,
    residu_reduit
)
from core.mechanics import TipForce, forces_norme_minimale, taux_collision
from core.model import pose_depuis_theta, rotation_axe, theta_depuis_pose
from core.solve import QPProblem, solve_qp
from utils.logger import log_trajectoire, setup_logger

logger = setup_logger('planner')

RAISONS_ARRET = ('qp_failure', 'equilibrium_infeasible', 'joint_limit', 'max_steps', 'singularity')

# ==============================================================================
# FONCTION 1 : CONFIGURATION ET ENREGISTREMENTS
# ==============================================================================

@dataclass(frozen=True)
class PlanConfig:
    """Paramètres du planificateur."""
    vitesse_outil: float = 0.2
    pas_temps: float = 0.02
    nb_pas_max: int = 500
    regularisation: float = 1e-6
    pas_blocage: int = 3
    facteur_mediane: float = 10.0
    projection: bool = True
    tolerance_projection: float = 1e-10
    iterations_projection: int = 5
    direction: int = 1

    def __post_init__(self):
        if self.vitesse_outil <= 0 or self.pas_temps <= 0:
            raise ValueError("vitesse_outil > 0 et pas_temps > 0 requis")
        if self.direction not in (1, -1):
            raise ValueError("direction : +1 ou -1")

    @classmethod
    def depuis_config(cls, planification=None):
        p = planification or settings.PLANIFICATION_CONFIG
        return cls(
            vitesse_outil=float(p['vitesse_outil']),
            pas_temps=float(p['pas_temps']),
            nb_pas_max=int(p['nb_pas_max']),
            regularisation=float(p['regularisation']),
            pas_blocage=int(p['pas_blocage']),
            facteur_mediane=float(p['facteur_mediane']),
            projection=bool(p['projection']),
            tolerance_projection=float(p['tolerance_projection']),
            iterations_projection=int(p['iterations_projection'])
        )

    @property
    def vitesse_signee(self):
        return self.direction * self.vitesse_outil


@dataclass
class PasTrajectoire:
    """
    Un état visité. `vitesses`, `glissements` et `objectif` sont None au
    dernier état si le QP n'a pas été résolu.
    """
    phi: float
    etat: SystemState
    equilibre: bool
    forces: np.ndarray = None
    vitesses: np.ndarray = None
    glissements: np.ndarray = None
    vitesses_normales: np.ndarray = None
    objectif: float = None


@dataclass
class PathRecord:
    """Trajectoire d'un candidat depuis une FP dans un sens."""
    candidat: int
    fp: str
    direction: int
    pas: list = field(default_factory=list)
    raison: str = ''

    @property
    def amplitude(self):
        """Angle final |φ| atteint (rad)."""
        return abs(self.pas[-1].phi) if self.pas else 0.0

    @property
    def nb_pas(self):
        return len(self.pas)


@dataclass
class ResultatPas:
    statut: str
    vitesses: np.ndarray = None
    objectif: float = None
    v_cp: np.ndarray = None
    actifs: tuple = ()
    borne_active: bool = False

# ==============================================================================
# FONCTION 2 : QP DE GLISSEMENT MINIMAL
# ==============================================================================

def matrice_evolution(state, d, fp, tool, axe):
    """
    Matrice (5n, 1 + 3m) des dérivées des coordonnées de contact par unité
    de [u̇_t ; u̇_f] (les taux sont linéaires en ces vitesses).
    Lignes par contact : a_t1, a_t2, spin, a_f1, a_f2.
    """
    m = len(fp.mobiles)
    colonnes = []
    for j in range(1 + 3 * m):
        e = np.zeros(1 + 3 * m)
        e[j] = 1.0
        colonnes.append(contact_evolution(state, d, fp, tool, e[0], e[1:], axe).ravel())
    return np.column_stack(colonnes)


def _lignes_amplitude(state, d, fp, tool, axe, u_t, dt):
    """
    Contraintes d'amplitude A z >= b en Euler explicite sur les coordonnées
    de contact (a_t1 et a_f), pour z = u̇_f.
    """
    E = matrice_evolution(state, d, fp, tool, axe)
    lignes, seconds = [], []
    for i, c in enumerate(state.contacts):
        a_min, a_max = bornes_coordonnees_doigt(d, c.carte)
        coordonnees = [(0, c.a_t1, fp.bornes_a_t1[0], fp.bornes_a_t1[1]),
                       (3, c.a_f1, a_min[0], a_max[0]),
                       (4, c.a_f2, a_min[1], a_max[1])]
        for k, valeur, bas, haut in coordonnees:
            ligne = E[5 * i + k]
            if np.isfinite(bas):
                lignes.append(dt * ligne[1:])
                seconds.append(bas - valeur - dt * ligne[0] * u_t)
            if np.isfinite(haut):
                lignes.append(-dt * ligne[1:])
                seconds.append(valeur + dt * ligne[0] * u_t - haut)
    return np.array(lignes).reshape(-1, E.shape[1] - 1), np.array(seconds)


def plan_step(state, d, fp, tool, cfg, axe=None, limites=None, marge=None, actifs=None):
    """
    QP sur les vitesses articulaires des doigts mobiles.

    min ‖E_xy v_CP‖² + ε‖u̇_f‖²  s.c.  E_z v_CP = 0, amplitude (Euler
    explicite) dans les bornes, collisions linéarisées
    c + Δt ċ >= min(c, 0).

    Args:
        state (SystemState): État sur la variété de contact
        d, fp, tool: Conception, pose fondamentale, outil
        cfg (PlanConfig): Vitesse prescrite, pas de temps, direction
        axe (tuple, optional): Axe (c, k) de la FP
        limites (dict, optional): Limites articulaires 'min' / 'max'
        marge (float, optional): Marge de collision
        actifs (tuple, optional): Ensemble actif du pas précédent

    Returns:
        ResultatPas: statut 'optimal', 'qp_failure' ou 'joint_limit'
    """
    axe = axe if axe is not None else axe_rotation(state, d, fp, tool)
    limites = limites or {k: np.asarray(v) for k, v in settings.LIMITES_ARTICULAIRES.items()}
    u_t = cfg.vitesse_signee
    dt = cfg.pas_temps
    m = len(fp.mobiles)
    n = state.n

    J = contact_jacobian(state, d, fp, tool, axe)
    tangentielles = np.array([3 * i + k for i in range(n) for k in (0, 1)])
    normales = np.array([3 * i + 2 for i in range(n)])
    B = J[tangentielles, 1:]
    a = J[tangentielles, 0] * u_t
    H = 2.0 * B.T @ B + 2.0 * cfg.regularisation * np.eye(3 * m)
    g = 2.0 * B.T @ a

    A_eq = J[normales, 1:]
    b_eq = -J[normales, 0] * u_t
    garder = (np.abs(A_eq).max(axis=1) > 1e-12) | (np.abs(b_eq) > 1e-12)
    A_eq, b_eq = A_eq[garder], b_eq[garder]

    q = np.concatenate([np.asarray(state.contacts[fp.indice_contact(f)].u) for f in fp.mobiles])
    q_min = np.tile(limites['min'], m)
    q_max = np.tile(limites['max'], m)
    lb = (q_min - q) / dt
    ub = (q_max - q) / dt

    A_amp, b_amp = _lignes_amplitude(state, d, fp, tool, axe, u_t, dt)
    valeurs, D = taux_collision(state, d, fp, tool, axe, marge)
    A_col = dt * D[:, 1:]
    b_col = np.minimum(valeurs, 0.0) - valeurs - dt * D[:, 0] * u_t

    qp = QPProblem(H=H, g=g, A_eq=A_eq, b_eq=b_eq,
                   A_in=np.vstack([A_amp, A_col]), b_in=np.concatenate([b_amp, b_col]), lb=lb, ub=ub)
    res = solve_qp(qp, actifs=actifs)
    if res.statut != 'optimal':
        sans_amplitude = QPProblem(H=H, g=g, A_eq=A_eq, b_eq=b_eq, A_in=A_col, b_in=b_col)
        if solve_qp(sans_amplitude).statut == 'optimal':
            return ResultatPas('joint_limit')
        return ResultatPas('qp_failure')

    z = res.x
    v = J[:, 0] * u_t + J[:, 1:] @ z
    ecart_amp = A_amp @ z - b_amp if A_amp.size else np.zeros(0)
    borne_active = bool(np.any(ecart_amp < 1e-9) or np.any(z - lb < 1e-9) or np.any(ub - z < 1e-9))
    objectif = float(np.sum(v[tangentielles] ** 2))
    return ResultatPas('optimal', z.reshape(m, 3), objectif, v, res.actifs, borne_active)

# ==============================================================================
# FONCTION 3 : INTÉGRATION RK4
# ==============================================================================

def _etat_au_temps(state, fp, T0, q0, axe, u_t, u_f, tau, y):
    """État à l'instant τ d'un pas : pose et articulations exactes, coordonnées y."""
    centre, k = axe
    theta = theta_depuis_pose(rotation_axe(centre, k, -u_t * tau) @ T0)
    contacts = []
    for i, c in enumerate(state.contacts):
        u = c.u
        if c.doigt in fp.mobiles:
            u = tuple(q0[c.doigt] + tau * u_f[fp.mobiles.index(c.doigt)])
        a_t1, a_t2, spin, a_f1, a_f2 = y[i]
        contacts.append(replace(c, spin=spin, a_t1=a_t1, a_t2=a_t2, u=u, a_f1=a_f1, a_f2=a_f2))
    return SystemState(theta, tuple(contacts))


def projeter_sur_variete(state, d, fp, tool, tolerance, iterations):
    """
    Gauss-Newton sur le résidu réduit, par rapport aux articulations des
    doigts mobiles et aux coordonnées de contact (a_t1, a_t2, a_f1, a_f2) ;
    θ_h, spins et doigts stationnaires restent inchangés.
    """
    n = state.n
    colonnes = []
    for i, c in enumerate(state.contacts):
        io = indices_outil(n, i)
        idf = indices_doigt(n, i)
        colonnes.extend(io[1:])
        colonnes.extend(idf[3:])
        if c.doigt in fp.mobiles:
            colonnes.extend(idf[:3])
    colonnes = np.array(sorted(colonnes))
    x = state.vecteur()
    for _ in range(iterations):
        etat = state.avec_vecteur(x)
        r = residu_reduit(etat, d, fp, tool)
        if np.abs(r).max() <= tolerance:
            break
        J = jacobien_reduit(etat, d, fp, tool)[:, colonnes]
        x[colonnes] -= np.linalg.lstsq(J, r, rcond=None)[0]
    return state.avec_vecteur(x)


def advance(state, d, fp, tool, u_t, u_f, dt, axe=None, projeter=False, cfg=None):
    """
    Un pas RK4 sur les coordonnées de contact.

    La pose de la main est la rotation exacte de -u_t τ autour de l'axe et
    les articulations des doigts mobiles varient linéairement ; les taux de
    contact sont réévalués à chaque étage.

    Args:
        state (SystemState): État au début du pas
        d, fp, tool: Conception, pose fondamentale, outil
        u_t (float): Vitesse signée de l'outil (rad/s)
        u_f (np.ndarray): Vitesses des doigts mobiles (m, 3)
        dt (float): Pas de temps (s)
        axe (tuple, optional): Axe (c, k) de la FP
        projeter (bool): Projection de Gauss-Newton après le pas
        cfg (PlanConfig, optional): Tolérance et itérations de projection

    Returns:
        SystemState

    Raises:
        SingulariteCarte: Un étage atteint le pôle d'une carte
    """
    axe = axe if axe is not None else axe_rotation(state, d, fp, tool)
    u_f = np.asarray(u_f, dtype=float).reshape(len(fp.mobiles), 3)
    T0 = pose_depuis_theta(state.theta_h)
    q0 = {c.doigt: np.asarray(c.u) for c in state.contacts}
    y0 = np.array([[c.a_t1, c.a_t2, c.spin, c.a_f1, c.a_f2] for c in state.contacts])

    def f(tau, y):
        etat = _etat_au_temps(state, fp, T0, q0, axe, u_t, u_f, tau, y)
        return contact_evolution(etat, d, fp, tool, u_t, u_f, axe)

    k1 = f(0.0, y0)
    k2 = f(0.5 * dt, y0 + 0.5 * dt * k1)
    k3 = f(0.5 * dt, y0 + 0.5 * dt * k2)
    k4 = f(dt, y0 + dt * k3)
    y1 = y0 + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    suivant = _etat_au_temps(state, fp, T0, q0, axe, u_t, u_f, dt, y1)
    if projeter:
        cfg = cfg or PlanConfig()
        suivant = projeter_sur_variete(suivant, d, fp, tool, cfg.tolerance_projection,
                                       cfg.iterations_projection)
    return suivant

# ==============================================================================
# FONCTION 4 : TRAJECTOIRES
# ==============================================================================

def _avancer_avec_reprise(etat, d, fp, tool, u_t, u_f, dt, axe, cfg):
    """advance() avec un changement de carte forcé et une seule reprise."""
    try:
        return advance(etat, d, fp, tool, u_t, u_f, dt, axe, cfg.projection, cfg)
    except SingulariteCarte:
        etat = reancrer_etat(etat, d, tool, forcer=True)
        return advance(etat, d, fp, tool, u_t, u_f, dt, axe, cfg.projection, cfg)


def plan_path(candidat, nom_fp, ctx, cfg):
    """
    Trajectoire depuis la FP `nom_fp` d'un candidat dans le sens cfg.direction.

    Chaque itération : réancrage, équilibre (effort de pointe opposé au
    mouvement, efforts de norme minimale), QP, puis pas RK4.

    Args:
        candidat (CandidateRecord): Candidat et ses états FP
        nom_fp (str): 'carve', 'poke' ou 'press'
        ctx (ContexteConception): Outil, frottement, limites, marge
        cfg (PlanConfig): Paramètres (direction incluse)

    Returns:
        PathRecord
    """
    fp = ctx.fps[nom_fp]
    d = candidat.d
    tool = ctx.outil
    etat = candidat.etats[nom_fp]
    axe = axe_rotation(etat, d, fp, tool)
    effort = TipForce(ctx.magnitude).oppose_au_mouvement(cfg.direction)
    record = PathRecord(candidat.indice, nom_fp, cfg.direction)
    actifs = None
    objectifs = []
    blocage = 0

    for k in range(cfg.nb_pas_max + 1):
        phi = cfg.direction * cfg.vitesse_outil * k * cfg.pas_temps
        etat = reancrer_etat(etat, d, tool)
        equilibre = forces_norme_minimale(etat, d, fp, tool, effort, ctx.frottement, axe)
        pas = PasTrajectoire(phi, etat, equilibre.faisable, equilibre.forces)
        record.pas.append(pas)
        if not equilibre.faisable:
            record.raison = 'equilibrium_infeasible'
            break
        if k == cfg.nb_pas_max:
            record.raison = 'max_steps'
            break

        try:
            resultat = plan_step(etat, d, fp, tool, cfg, axe, ctx.limites, ctx.marge, actifs)
        except SingulariteCarte:
            record.raison = 'singularity'
            break
        except ErreurConception:
            record.raison = 'qp_failure'
            break
        if resultat.statut != 'optimal':
            record.raison = resultat.statut
            break

        pas.vitesses = resultat.vitesses
        pas.objectif = resultat.objectif
        v = resultat.v_cp.reshape(-1, 3)
        pas.glissements = np.linalg.norm(v[:, :2], axis=1)
        pas.vitesses_normales = v[:, 2]
        actifs = resultat.actifs

        objectifs.append(resultat.objectif)
        mediane = float(np.median(objectifs))
        if resultat.borne_active and resultat.objectif > cfg.facteur_mediane * mediane:
            blocage += 1
        else:
            blocage = 0
        if blocage >= cfg.pas_blocage:
            record.raison = 'joint_limit'
            break

        try:
            etat = _avancer_avec_reprise(etat, d, fp, tool, cfg.vitesse_signee, resultat.vitesses,
                                         cfg.pas_temps, axe, cfg)
        except SingulariteCarte:
            record.raison = 'singularity'
            break
        except ErreurDomaine:
            record.raison = 'joint_limit'
            break

    log_trajectoire(candidat.indice, nom_fp, cfg.direction, record.nb_pas, record.raison)
    return record


def plan_all(candidat, ctx, cfg=None):
    """
    Les six trajectoires d'un candidat, dans l'ordre (carve, +), (carve, -),
    (poke, +), (poke, -), (press, +), (press, -).

    Returns:
        list: Six PathRecord
    """
    cfg = cfg or PlanConfig.depuis_config()
    chemins = []
    for nom in ctx.fps:
        for direction in (1, -1):
            chemins.append(plan_path(candidat, nom, ctx, replace(cfg, direction=direction)))
    return chemins


def amplitude_fp(chemins, nom_fp):
    """Amplitude totale |φ(+)| + |φ(-)| d'une FP."""
    return sum(c.amplitude for c in chemins if c.fp == nom_fp)
