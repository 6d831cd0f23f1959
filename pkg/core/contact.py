"""
==============================================================================
MODULE CONTACTS OUTIL-DOIGTS
==============================================================================
Contraintes de contact entre l'outil et les phalanges distales, système
reach_FP (6n équations, 8n+6 variables), jacobiennes de contact et
cinématique de roulement-glissement du premier ordre.

Vecteur d'état (dimension 8n+6) :
    [θ_h (6) ; pour chaque contact (spin, a_t1, a_t2) ;
     pour chaque contact (u1, u2, u3, a_f1, a_f2)]

Le spin est l'angle ψ de x_C0 (repère de Gauss non tourné de l'outil)
vers x_P autour de z_C0 ; il n'intervient pas dans les résidus et reste
égal à sa valeur géométrique.

Modèle de rotation : {O} est fixe ; en planification l'outil tourne d'un
angle φ autour d'un axe (c, k) figé à la pose fondamentale, soit dans
{O} : T_OH(φ) = Rot(c, k, -φ) · T_OH(0).

Fonctions principales :
- contact_residual() / reach_fp_residual() : résidus publics (6 par contact)
- residu_reduit() / jacobien_reduit() : forme de rang plein (5 par contact)
- axe_rotation() : axe de rotation de l'outil propre à chaque FP
- contact_jacobian() : vitesses relatives v_CP en fonction de (u̇_t, u̇_f)
- contact_evolution() : dérivées des coordonnées de contact
- reancrer_contact() / reancrer_etat() : changement de carte sur la calotte

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings
from core import EtatPerime, SingulariteCarte
from core.model import (
    FingerJoints, SurfaceCoords, cinematique_doigt, derivees_rotvec, domaine_capsule,
    envelopper_angle, pose_depuis_theta, racines_doigts, repere_cylindre, rotation_z,
    theta_depuis_pose, transformation, inverse_transformation
)

# ==============================================================================
# FONCTION 1 : TYPES DE DOMAINE
# ==============================================================================

@dataclass(frozen=True)
class ContactPair:
    """Un contact : coordonnées outil (spin, a_t1, a_t2), doigt, articulations, coordonnées doigt."""
    doigt: int
    spin: float
    a_t1: float
    a_t2: float
    u: tuple
    a_f1: float
    a_f2: float
    carte: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'u', tuple(float(x) for x in self.u))
        object.__setattr__(self, 'a_t2', envelopper_angle(float(self.a_t2)))
        object.__setattr__(self, 'spin', envelopper_angle(float(self.spin)))
        if self.carte == 0:
            object.__setattr__(self, 'a_f2', envelopper_angle(float(self.a_f2)))

    @property
    def coords_outil(self):
        return SurfaceCoords(self.a_t1, self.a_t2, self.spin)

    @property
    def articulations(self):
        return FingerJoints(*self.u)

    @property
    def coords_doigt(self):
        return SurfaceCoords(self.a_f1, self.a_f2)


@dataclass(frozen=True)
class SystemState:
    """Toutes les variables θ d'un système outil-main à une pose."""
    theta_h: tuple
    contacts: tuple

    def __post_init__(self):
        object.__setattr__(self, 'theta_h', tuple(float(x) for x in self.theta_h))
        object.__setattr__(self, 'contacts', tuple(self.contacts))

    @property
    def n(self):
        return len(self.contacts)

    @property
    def dimension(self):
        return 8 * self.n + 6

    def vecteur(self):
        n = self.n
        v = np.zeros(8 * n + 6)
        v[:6] = self.theta_h
        for i, c in enumerate(self.contacts):
            v[indices_outil(n, i)] = [c.spin, c.a_t1, c.a_t2]
            v[indices_doigt(n, i)] = [*c.u, c.a_f1, c.a_f2]
        return v

    def avec_vecteur(self, v):
        """Nouvel état de mêmes doigts et cartes avec les valeurs de `v`."""
        v = np.asarray(v, dtype=float)
        n = self.n
        contacts = []
        for i, c in enumerate(self.contacts):
            spin, a_t1, a_t2 = v[indices_outil(n, i)]
            u1, u2, u3, a_f1, a_f2 = v[indices_doigt(n, i)]
            contacts.append(ContactPair(c.doigt, spin, a_t1, a_t2, (u1, u2, u3), a_f1, a_f2, c.carte))
        return SystemState(tuple(v[:6]), tuple(contacts))


@dataclass(frozen=True)
class ContactVelocity:
    """Vitesse linéaire de {P} relative à {C}, exprimée dans {C}."""
    v: tuple

    @property
    def tangentielle(self):
        return np.asarray(self.v[:2])

    @property
    def normale(self):
        return float(self.v[2])

    @property
    def glissement(self):
        return float(np.linalg.norm(self.v[:2]))


def indices_outil(n, i):
    return np.arange(6 + 3 * i, 6 + 3 * i + 3)


def indices_doigt(n, i):
    base = 6 + 3 * n + 5 * i
    return np.arange(base, base + 5)


def articulations_completes(state, fp):
    """Articulations des quatre doigts : état pour les doigts en contact, repos sinon."""
    articulations = [np.asarray(fp.posture_repos, dtype=float) for _ in range(4)]
    for c in state.contacts:
        articulations[c.doigt] = np.asarray(c.u, dtype=float)
    return articulations

# ==============================================================================
# FONCTION 2 : GÉOMÉTRIE D'UN CONTACT
# ==============================================================================

@dataclass
class GeometrieContact:
    """
    Quantités d'un contact exprimées dans {O}.

    dp_P / dR_P : dérivées par rapport à [θ_h (6), u (3), a_f (2)].
    """
    outil: object
    R_C: np.ndarray
    doigt: object
    p_P: np.ndarray
    R_P: np.ndarray
    dp_P: np.ndarray
    dR_P: np.ndarray
    axes: np.ndarray
    origines: np.ndarray
    R_OH: np.ndarray
    t_OH: np.ndarray
    p_HR: np.ndarray
    R_HR: np.ndarray


class ContexteMain:
    """Quantités communes à tous les contacts d'un état (pose de la main, racines)."""

    def __init__(self, state, d):
        self.d = d
        self.T_OH = pose_depuis_theta(state.theta_h)
        self.R_OH = self.T_OH[:3, :3]
        self.t_OH = self.T_OH[:3, 3]
        self.dR_OH = derivees_rotvec(np.asarray(state.theta_h[3:]))
        self.racines = racines_doigts(d)

    def vers_O(self, doigt, x):
        p_HR, R_HR = self.racines[doigt]
        return self.t_OH + self.R_OH @ (p_HR + R_HR @ x)

    def derivees_theta(self, doigt, x_R):
        """Dérivée (3, 6) d'un point du doigt (coordonnées {R}) par rapport à θ_h."""
        p_HR, R_HR = self.racines[doigt]
        x_H = p_HR + R_HR @ x_R
        D = np.zeros((3, 6))
        D[:, :3] = np.eye(3)
        for k in range(3):
            D[:, 3 + k] = self.dR_OH[k] @ x_H
        return D


def geometrie_contact(state, d, tool, i, contexte=None):
    """
    Repères outil et doigt du contact i avec leurs dérivées.

    Args:
        state (SystemState): État
        d (DesignParams): Conception
        tool (ToolGeom): Outil
        i (int): Indice du contact
        contexte (ContexteMain, optional): Contexte partagé déjà calculé

    Returns:
        GeometrieContact
    """
    contexte = contexte or ContexteMain(state, d)
    c = state.contacts[i]
    outil = repere_cylindre(tool, c.a_t1, c.a_t2)
    R_C = outil.R @ rotation_z(c.spin)

    cin = cinematique_doigt(d, c.u, c.a_f1, c.a_f2, c.carte)
    p_HR, R_HR = contexte.racines[c.doigt]
    R_OR = contexte.R_OH @ R_HR
    p_P = contexte.vers_O(c.doigt, cin.p)
    R_P = R_OR @ cin.R

    dp_P = np.zeros((3, 11))
    dR_P = np.zeros((11, 3, 3))
    dp_P[:, :6] = contexte.derivees_theta(c.doigt, cin.p)
    R_HP = R_HR @ cin.R
    for k in range(3):
        dR_P[3 + k] = contexte.dR_OH[k] @ R_HP
    dp_P[:, 6:] = R_OR @ cin.dp
    for k in range(5):
        dR_P[6 + k] = R_OR @ cin.dR[k]

    axes = R_OR @ cin.axes
    origines = np.column_stack([contexte.vers_O(c.doigt, cin.origines[:, j]) for j in range(3)])
    return GeometrieContact(
        outil=outil, R_C=R_C, doigt=cin, p_P=p_P, R_P=R_P, dp_P=dp_P, dR_P=dR_P,
        axes=axes, origines=origines, R_OH=contexte.R_OH, t_OH=contexte.t_OH,
        p_HR=p_HR, R_HR=R_HR
    )


def geometries(state, d, tool):
    contexte = ContexteMain(state, d)
    return [geometrie_contact(state, d, tool, i, contexte) for i in range(state.n)]

# ==============================================================================
# FONCTION 3 : RÉSIDUS DE CONTACT
# ==============================================================================

def contact_residual(T_OC, T_OP):
    """
    Résidu d'un contact : [p_C - p_P ; z_C + z_P].

    Nul si et seulement si les origines coïncident et les normales sont opposées.

    Example:
        >>> T_C = np.eye(4); T_P = np.eye(4); T_P[:3, :3] = np.diag([1, -1, -1])
        >>> contact_residual(T_C, T_P)
        array([0., 0., 0., 0., 0., 0.])
    """
    return np.concatenate([T_OC[:3, 3] - T_OP[:3, 3], T_OC[:3, 2] + T_OP[:3, 2]])


def reach_fp_residual(state, d, fp, tool):
    """Résidus empilés (6n) des contacts de la pose fondamentale."""
    if state.n != fp.n_contacts:
        raise ValueError(f"{state.n} contacts pour la pose {fp.nom} ({fp.n_contacts} attendus)")
    r = np.zeros(6 * state.n)
    for i, g in enumerate(geometries(state, d, tool)):
        r[6 * i:6 * i + 3] = g.outil.p - g.p_P
        r[6 * i + 3:6 * i + 6] = g.outil.R[:, 2] + g.R_P[:, 2]
    return r


def reach_fp_jacobian(state, d, fp, tool):
    """Jacobienne analytique (6n, 8n+6) de reach_fp_residual."""
    n = state.n
    J = np.zeros((6 * n, 8 * n + 6))
    for i, g in enumerate(geometries(state, d, tool)):
        lignes_p = slice(6 * i, 6 * i + 3)
        lignes_z = slice(6 * i + 3, 6 * i + 6)
        colonnes = np.concatenate([np.arange(6), indices_doigt(n, i)])
        J[lignes_p, colonnes] = -g.dp_P
        J[lignes_z, colonnes] = np.stack([g.dR_P[k][:, 2] for k in range(11)], axis=1)
        io = indices_outil(n, i)
        J[lignes_p, io[1:]] = g.outil.dp
        J[lignes_z, io[1]] = g.outil.dR[0][:, 2]
        J[lignes_z, io[2]] = g.outil.dR[1][:, 2]
    return J


def residu_reduit(state, d, fp, tool):
    """
    Résidu de rang plein (5n) : position, puis (z_C + z_P) projeté sur x_C0, y_C0.

    Équivalent au résidu public sur la variété de contact.
    """
    r = np.zeros(5 * state.n)
    for i, g in enumerate(geometries(state, d, tool)):
        somme = g.outil.R[:, 2] + g.R_P[:, 2]
        r[5 * i:5 * i + 3] = g.outil.p - g.p_P
        r[5 * i + 3] = g.outil.R[:, 0] @ somme
        r[5 * i + 4] = g.outil.R[:, 1] @ somme
    return r


def jacobien_reduit(state, d, fp, tool):
    """Jacobienne analytique (5n, 8n+6) du résidu réduit."""
    n = state.n
    J = np.zeros((5 * n, 8 * n + 6))
    for i, g in enumerate(geometries(state, d, tool)):
        x0, y0, z0 = g.outil.R[:, 0], g.outil.R[:, 1], g.outil.R[:, 2]
        somme = z0 + g.R_P[:, 2]
        colonnes = np.concatenate([np.arange(6), indices_doigt(n, i)])
        dz_P = np.stack([g.dR_P[k][:, 2] for k in range(11)], axis=1)
        J[5 * i:5 * i + 3, colonnes] = -g.dp_P
        J[5 * i + 3, colonnes] = x0 @ dz_P
        J[5 * i + 4, colonnes] = y0 @ dz_P
        io = indices_outil(n, i)
        J[5 * i:5 * i + 3, io[1:]] = g.outil.dp
        for k in range(2):
            dR = g.outil.dR[k]
            J[5 * i + 3, io[1 + k]] = dR[:, 0] @ somme + x0 @ dR[:, 2]
            J[5 * i + 4, io[1 + k]] = dR[:, 1] @ somme + y0 @ dR[:, 2]
    return J


def angle_spin(g):
    """Angle ψ de x_C0 vers x_P autour de z_C0."""
    x_P = g.R_P[:, 0]
    return math.atan2(float(x_P @ g.outil.R[:, 1]), float(x_P @ g.outil.R[:, 0]))


def synchroniser_spin(state, d, tool):
    """Remplace chaque spin par sa valeur géométrique ψ."""
    contacts = [replace(c, spin=angle_spin(g)) for c, g in zip(state.contacts, geometries(state, d, tool))]
    return SystemState(state.theta_h, tuple(contacts))


def placer_main_sur_contact(d, tool, contact, rotation_normale=0.0):
    """
    Pose θ_h de la main qui réalise exactement un contact donné.

    Le repère du doigt est aligné sur le repère de l'outil aux coordonnées
    (a_t1, a_t2), normales opposées, x_P tourné de `rotation_normale`.

    Args:
        d (DesignParams): Conception
        tool (ToolGeom): Outil
        contact (ContactPair): Articulations et coordonnées (doigt, outil)
        rotation_normale (float): Angle ψ imposé entre x_C0 et x_P

    Returns:
        np.ndarray: θ_h (6)
    """
    outil = repere_cylindre(tool, contact.a_t1, contact.a_t2)
    x0, y0, z0 = outil.R[:, 0], outil.R[:, 1], outil.R[:, 2]
    c, s = math.cos(rotation_normale), math.sin(rotation_normale)
    R_cible = np.column_stack([c * x0 + s * y0, s * x0 - c * y0, -z0])
    cin = cinematique_doigt(d, contact.u, contact.a_f1, contact.a_f2, contact.carte)
    p_HR, R_HR = racines_doigts(d)[contact.doigt]
    T_HP = transformation(R_HR @ cin.R, p_HR + R_HR @ cin.p)
    T_OH = transformation(R_cible, outil.p) @ inverse_transformation(T_HP)
    return theta_depuis_pose(T_OH)

# ==============================================================================
# FONCTION 4 : AXE DE ROTATION DE L'OUTIL
# ==============================================================================

def _orienter(k):
    """Orientation déterministe d'une direction : composante dominante positive."""
    return k if k[int(np.argmax(np.abs(k)))] >= 0 else -k


def axe_rotation(state, d, fp, tool):
    """
    Axe (c, k) de rotation de l'outil dans {O}, figé à la pose fondamentale.

    carve : par le barycentre c des trois points de contact,
    k = e_z x (pointe - c), perpendiculaire à l'axe de l'outil et au bras
    de levier de la pointe ; si le barycentre est sur l'axe de l'outil,
    la normale de la paume projetée orthogonalement à e_z remplace le bras
    de levier. poke / press : droite passant par les deux contacts du
    pincement stationnaire.

    Returns:
        tuple: (c, k) avec k unitaire
    """
    points = [repere_cylindre(tool, c.a_t1, c.a_t2).p for c in state.contacts]
    if fp.regle_axe == 'centroide':
        centre = np.mean(points, axis=0)
        e = np.array([0.0, 0.0, 1.0])
        levier = np.array([0.0, 0.0, tool.pointe]) - centre
        k = np.cross(e, levier)
        if np.linalg.norm(k) < 1e-9 * max(1.0, np.linalg.norm(levier)):
            R_OH = ContexteMain(state, d).R_OH
            normale = R_OH[:, 2] - R_OH[2, 2] * e
            if np.linalg.norm(normale) < 1e-9:
                normale = R_OH[:, 0] - R_OH[2, 0] * e
            k = np.cross(e, normale)
        return centre, k / np.linalg.norm(k)
    stationnaires = [i for i, c in enumerate(state.contacts) if c.doigt in fp.stationnaires]
    a, b = points[stationnaires[0]], points[stationnaires[1]]
    k = b - a
    norme = np.linalg.norm(k)
    if norme < 1e-12:
        raise EtatPerime("Contacts stationnaires confondus : axe indéfini")
    return a, _orienter(k / norme)

# ==============================================================================
# FONCTION 5 : JACOBIENNE DE CONTACT
# ==============================================================================

def vitesses_materielles(g, axe, doigt_mobile):
    """
    Vitesse (3, 4) du point matériel du doigt au contact dans {O}, par
    unité de [u̇_t, u̇_1, u̇_2, u̇_3] ; colonnes articulaires nulles si le
    doigt est stationnaire. Retourne aussi les vitesses angulaires (3, 4).
    """
    centre, k = axe
    x = g.p_P
    V = np.zeros((3, 4))
    W = np.zeros((3, 4))
    V[:, 0] = -np.cross(k, x - centre)
    W[:, 0] = -k
    if doigt_mobile:
        for j in range(3):
            V[:, 1 + j] = np.cross(g.axes[:, j], x - g.origines[:, j])
            W[:, 1 + j] = g.axes[:, j]
    return V, W


def contact_jacobian(state, d, fp, tool, axe=None, verifier=True):
    """
    Application linéaire J : [u̇_t ; u̇_f des doigts mobiles] -> v_CP empilés.

    v_CP est la vitesse de {P} relative à {C} exprimée dans {C}. Pour
    u̇_t = 1 et u̇_f = 0, v_CP = -k x (x - c) : dans {O} la main tourne de
    -φ autour de l'axe.

    Args:
        state (SystemState): État sur la variété de contact
        d (DesignParams), fp (FPSpec), tool (ToolGeom)
        axe (tuple, optional): (c, k) ; par défaut axe_rotation(state)
        verifier (bool): Contrôle de la distance à la variété

    Returns:
        np.ndarray: J de forme (3n, 1 + 3m), m = nombre de doigts mobiles

    Raises:
        EtatPerime: Résidu réduit supérieur à la tolérance
    """
    if verifier:
        ecart = np.abs(residu_reduit(state, d, fp, tool)).max(initial=0.0)
        if ecart > settings.SOLVEUR_CONFIG['tol_etat_perime']:
            raise EtatPerime(f"État éloigné de la variété de contact (résidu {ecart:.3e})")
    axe = axe if axe is not None else axe_rotation(state, d, fp, tool)
    n = state.n
    m = len(fp.mobiles)
    J = np.zeros((3 * n, 1 + 3 * m))
    for i, g in enumerate(geometries(state, d, tool)):
        doigt = state.contacts[i].doigt
        mobile = doigt in fp.mobiles
        V, _ = vitesses_materielles(g, axe, mobile)
        lignes = slice(3 * i, 3 * i + 3)
        J[lignes, 0] = g.R_C.T @ V[:, 0]
        if mobile:
            b = fp.mobiles.index(doigt)
            J[lignes, 1 + 3 * b:4 + 3 * b] = g.R_C.T @ V[:, 1:]
    return J

# ==============================================================================
# FONCTION 6 : CINÉMATIQUE DE ROULEMENT-GLISSEMENT
# ==============================================================================

def taux_contact(outil, doigt_surface, psi, v, omega):
    """
    Taux des coordonnées d'un contact à partir des grandeurs locales.

    Args:
        outil (RepereSurface): Repère non tourné de l'outil (dans {O})
        doigt_surface (RepereSurface): Surface du doigt (formes intrinsèques)
        psi (float): Angle de x_C0 vers x_P
        v (np.ndarray): Vitesse relative du point matériel du doigt, dans {C0}
        omega (np.ndarray): Vitesse angulaire relative, dans {C0}

    Returns:
        np.ndarray: [ȧ_t1, ȧ_t2, ψ̇, ȧ_f1, ȧ_f2]
    """
    c, s = math.cos(psi), math.sin(psi)
    R_psi = np.array([[c, s], [s, -c]])
    K_o = outil.courbure
    K_f = doigt_surface.courbure
    v_t = np.asarray(v[:2], dtype=float)
    second_membre = R_psi @ (np.array([omega[1], -omega[0]]) + K_o @ v_t)
    A_f = -np.linalg.lstsq(K_f + R_psi @ K_o @ R_psi, second_membre, rcond=None)[0]
    A_o = v_t + R_psi @ A_f
    psi_point = omega[2] - doigt_surface.torsion @ A_f - outil.torsion @ A_o
    return np.array([
        A_o[0] / outil.metrique[0],
        A_o[1] / outil.metrique[1],
        psi_point,
        A_f[0] / doigt_surface.metrique[0],
        A_f[1] / doigt_surface.metrique[1]
    ])


def verifier_singularite(contact, d):
    """Lève SingulariteCarte si le contact est trop près d'un pôle de sa carte."""
    seuil = settings.CARTES_CONFIG['seuil_pole']
    r = d.d4
    if contact.carte == 0:
        beta = (contact.a_f1 - d.longueur_cylindrique) / r
        if beta > math.pi / 2 - seuil:
            raise SingulariteCarte(f"Contact du doigt {contact.doigt} au pôle de la calotte")
    elif abs(contact.a_f1 / r) > math.pi / 2 - seuil:
        raise SingulariteCarte(f"Contact du doigt {contact.doigt} au pôle de la carte tournée")


def contact_evolution(state, d, fp, tool, u_t, u_f, axe=None):
    """
    Dérivées temporelles des coordonnées de contact.

    Args:
        state (SystemState): État sur la variété de contact
        d, fp, tool: Conception, pose fondamentale, outil
        u_t (float): Vitesse de rotation de l'outil (rad/s)
        u_f (array-like): Vitesses articulaires des doigts mobiles (m, 3)
        axe (tuple, optional): Axe (c, k) de la pose fondamentale

    Returns:
        np.ndarray: (n, 5), par contact [ȧ_t1, ȧ_t2, ψ̇, ȧ_f1, ȧ_f2]

    Raises:
        SingulariteCarte: Contact au pôle d'une carte
    """
    axe = axe if axe is not None else axe_rotation(state, d, fp, tool)
    u_f = np.asarray(u_f, dtype=float).reshape(len(fp.mobiles), 3)
    taux = np.zeros((state.n, 5))
    for i, g in enumerate(geometries(state, d, tool)):
        contact = state.contacts[i]
        verifier_singularite(contact, d)
        mobile = contact.doigt in fp.mobiles
        V, W = vitesses_materielles(g, axe, mobile)
        vitesses = np.zeros(4)
        vitesses[0] = u_t
        if mobile:
            vitesses[1:] = u_f[fp.mobiles.index(contact.doigt)]
        R0 = g.outil.R
        v = R0.T @ (V @ vitesses)
        omega = R0.T @ (W @ vitesses)
        taux[i] = taux_contact(g.outil, g.doigt.surface, angle_spin(g), v, omega)
    return taux

# ==============================================================================
# FONCTION 7 : CHANGEMENT DE CARTE SUR LA CALOTTE DISTALE
# ==============================================================================

def _direction_calotte(contact, d):
    """Direction unitaire s du centre de la calotte vers le point de contact (repère du lien)."""
    r = d.d4
    if contact.carte == 0:
        beta = (contact.a_f1 - d.longueur_cylindrique) / r
        cb, sb = math.cos(beta), math.sin(beta)
        return np.array([sb, cb * math.cos(contact.a_f2), cb * math.sin(contact.a_f2)])
    beta = contact.a_f1 / r
    cb, sb = math.cos(beta), math.sin(beta)
    return np.array([cb * math.cos(contact.a_f2), sb, -cb * math.sin(contact.a_f2)])


def reancrer_contact(contact, d, forcer=False):
    """
    Change de carte si nécessaire (avec hystérésis).

    Carte 0 -> carte 1 à moins de `seuil_pole` rad du pôle ; carte 1 ->
    carte 0 au-delà de pi/2 - `seuil_retour` sur l'une des coordonnées.
    Avec `forcer`, tout contact de la calotte change de carte.
    Le spin n'est pas recalculé (voir reancrer_etat).

    Returns:
        ContactPair: Contact inchangé ou exprimé dans l'autre carte
    """
    cfg = settings.CARTES_CONFIG
    r = d.d4
    if contact.carte == 0:
        beta = (contact.a_f1 - d.longueur_cylindrique) / r
        seuil = 0.0 if forcer else math.pi / 2 - cfg['seuil_pole']
        if beta <= seuil:
            return contact
        s = _direction_calotte(contact, d)
        beta1 = math.asin(max(-1.0, min(1.0, s[1])))
        alpha = math.atan2(-s[2], s[0])
        return replace(contact, a_f1=r * beta1, a_f2=alpha, carte=1)

    limite = math.pi / 2 - cfg['seuil_retour']
    if not forcer and abs(contact.a_f1 / r) <= limite and abs(contact.a_f2) <= limite:
        return contact
    s = _direction_calotte(contact, d)
    beta0 = math.asin(max(0.0, min(1.0, s[0])))
    a2 = math.atan2(s[2], s[1])
    return replace(contact, a_f1=d.longueur_cylindrique + r * beta0, a_f2=a2, carte=0)


def reancrer_etat(state, d, tool, forcer=False):
    """Réancre chaque contact puis resynchronise les spins modifiés."""
    contacts = tuple(reancrer_contact(c, d, forcer) for c in state.contacts)
    if contacts == state.contacts:
        return state
    return synchroniser_spin(SystemState(state.theta_h, contacts), d, tool)


def bornes_coordonnees_doigt(d, carte):
    """Bornes (min, max) de (a_f1, a_f2) utilisées par les solveurs, selon la carte."""
    marge = settings.CARTES_CONFIG['marge_domaine']
    a1_min, a1_max, a2_min, a2_max = domaine_capsule(d.d4, d.longueur_cylindrique, carte, marge)
    if carte == 0:
        a1_min = settings.MARGE_CONTACT_IP * d.d4
        a2_min, a2_max = -np.inf, np.inf
    return np.array([a1_min, a2_min]), np.array([a1_max, a2_max])
