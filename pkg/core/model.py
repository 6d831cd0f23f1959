"""
==============================================================================
MODULE MODÈLE GÉOMÉTRIQUE DE LA MAIN ET DE L'OUTIL
==============================================================================
Géométrie paramétrique de l'outil cylindrique et de la main à quatre
doigts : gabarit de conception (d1..d6), cinématique directe des doigts,
repères de Gauss sur les surfaces (cylindre, capsule distale),
standardisation de l'espace de conception et description des poses
fondamentales.

Conventions :
- Outil : axe z de {O}, coordonnée axiale dans [0, longueur].
- Doigt {R} : x le long du doigt tendu, y axe de flexion, z face dorsale ;
  une flexion positive enroule le doigt vers -z.
- Main {H} : paume dans le plan xy, face palmaire du côté -z.
- θ_h = [t (mm) ; ω (vecteur rotation)] donne {H} dans {O}.

Fonctions principales :
- cylinder_frame() / capsule_frame() : repères de Gauss (matrices 4x4)
- repere_cylindre() / repere_capsule() : repères avec dérivées et formes
- finger_fk() / cinematique_doigt() : cinématique directe d'un doigt
- hand_fk() : segments des huit phalanges dans {O}
- standardize() / destandardize() : espace de conception normalisé

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings
from core import ErreurConfiguration, ErreurDomaine, ErreurHorsBornes

TOLERANCE_DOMAINE = 1e-9

NOMS_DOIGTS = {0: 'index', 1: 'majeur', 2: 'annulaire', 3: 'pouce'}

# ==============================================================================
# FONCTION 1 : OUTILS DE ROTATION
# ==============================================================================

def envelopper_angle(angle):
    """Ramène un angle dans l'intervalle (-pi, pi]."""
    return angle - 2.0 * math.pi * math.ceil((angle - math.pi) / (2.0 * math.pi))


def rotation_x(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_y(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def antisymetrique(v):
    """Matrice [v]x telle que [v]x w = v x w."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0]
    ])


def transformation(R, p):
    """Assemble une transformation homogène 4x4."""
    T = np.eye(4)
    T[:3, :3] = R
    T[:3, 3] = p
    return T


def inverse_transformation(T):
    R = T[:3, :3]
    return transformation(R.T, -R.T @ T[:3, 3])


def rotation_axe(centre, axe, angle):
    """
    Rotation rigide d'angle `angle` autour de la droite (centre, axe).

    Args:
        centre (np.ndarray): Point de l'axe
        axe (np.ndarray): Direction unitaire
        angle (float): Angle (rad), sens direct autour de `axe`

    Returns:
        np.ndarray: Transformation 4x4
    """
    R = Rotation.from_rotvec(angle * np.asarray(axe, dtype=float)).as_matrix()
    c = np.asarray(centre, dtype=float)
    return transformation(R, c - R @ c)


def pose_depuis_theta(theta_h):
    """Transformation T_OH à partir de θ_h = [t ; ω]."""
    theta_h = np.asarray(theta_h, dtype=float)
    R = Rotation.from_rotvec(theta_h[3:]).as_matrix()
    return transformation(R, theta_h[:3])


def theta_depuis_pose(T):
    """Inverse de pose_depuis_theta (vecteur rotation de norme <= pi)."""
    omega = Rotation.from_matrix(T[:3, :3]).as_rotvec()
    return np.concatenate([T[:3, 3], omega])


def derivees_rotvec(omega):
    """
    Dérivées dR/dω_i de la carte exponentielle, i = 0..2.

    Returns:
        np.ndarray: Tableau (3, 3, 3), [i] = dR/dω_i
    """
    omega = np.asarray(omega, dtype=float)
    R = Rotation.from_rotvec(omega).as_matrix()
    norme2 = float(omega @ omega)
    dR = np.zeros((3, 3, 3))
    identite = np.eye(3)
    for i in range(3):
        if norme2 < 1e-16:
            dR[i] = antisymetrique(identite[i]) @ R
        else:
            v = np.cross(omega, (identite - R) @ identite[i])
            dR[i] = (omega[i] * antisymetrique(omega) + antisymetrique(v)) @ R / norme2
    return dR

# ==============================================================================
# FONCTION 2 : TYPES DE DOMAINE
# ==============================================================================

@dataclass(frozen=True)
class DesignParams:
    """
    Les six paramètres de conception d'une main.

    d1 longueur distale (mm), d2 longueur de paume (mm), d3 demi-largeur
    de paume (mm), d4 rayon des doigts (mm), d5 angle de paume (rad),
    d6 angle de montage du pouce (rad).
    """
    d1: float
    d2: float
    d3: float
    d4: float
    d5: float
    d6: float
    l_tot: float = settings.L_TOT

    def __post_init__(self):
        valeurs = [self.d1, self.d2, self.d3, self.d4, self.d5, self.d6]
        if not all(math.isfinite(v) for v in valeurs):
            raise ErreurHorsBornes("Paramètres de conception non finis")
        if not 0.0 < self.d1 < self.l_tot:
            raise ErreurHorsBornes(f"d1 = {self.d1} hors de ]0, {self.l_tot}[")
        if self.d4 <= 0.0:
            raise ErreurHorsBornes(f"Rayon de doigt d4 = {self.d4} non positif")
        if self.d3 <= self.d4:
            raise ErreurHorsBornes(f"Demi-largeur d3 = {self.d3} <= rayon d4 = {self.d4}")
        if self.d1 <= self.d4:
            raise ErreurHorsBornes(f"Longueur distale d1 = {self.d1} <= rayon d4 = {self.d4}")

    @property
    def longueur_proximale(self):
        return self.l_tot - self.d1

    @property
    def longueur_cylindrique(self):
        """Longueur du corps cylindrique de la phalange distale (avant la calotte)."""
        return self.d1 - self.d4

    def vecteur(self):
        return np.array([self.d1, self.d2, self.d3, self.d4, self.d5, self.d6])

    @classmethod
    def depuis_vecteur(cls, v, l_tot=settings.L_TOT):
        v = [float(x) for x in v]
        return cls(*v, l_tot=l_tot)

    def verifier_bornes(self, d_min, d_max):
        """Lève ErreurHorsBornes si la conception sort de [d_min, d_max]."""
        v = self.vecteur()
        if np.any(v < np.asarray(d_min) - 1e-12) or np.any(v > np.asarray(d_max) + 1e-12):
            raise ErreurHorsBornes(f"Conception {v.tolist()} hors des bornes")


@dataclass(frozen=True)
class ToolGeom:
    """Outil cylindrique : rayon, longueur et coordonnée axiale de la pointe (mm)."""
    rayon: float
    longueur: float
    pointe: float

    def __post_init__(self):
        if self.rayon <= 0:
            raise ErreurConfiguration("Rayon d'outil non positif")
        if not 0 < self.pointe <= self.longueur:
            raise ErreurConfiguration("Pointe d'outil hors de ]0, longueur]")

    @classmethod
    def depuis_config(cls, outil=None):
        outil = outil or settings.OUTIL_CONFIG
        return cls(float(outil['rayon']), float(outil['longueur']), float(outil['pointe']))


@dataclass(frozen=True)
class SurfaceCoords:
    """Coordonnées de surface (a1, a2) et rotation propre `spin` autour de la normale."""
    a1: float
    a2: float
    spin: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'a2', envelopper_angle(float(self.a2)))


@dataclass(frozen=True)
class FingerJoints:
    """Angles articulaires d'un doigt : flexion MCP, abduction MCP, flexion IP."""
    u1: float
    u2: float
    u3: float

    def vecteur(self):
        return np.array([self.u1, self.u2, self.u3])

    def dans_limites(self, lim_min, lim_max, tol=1e-12):
        v = self.vecteur()
        return bool(np.all(v >= np.asarray(lim_min) - tol) and np.all(v <= np.asarray(lim_max) + tol))


@dataclass(frozen=True)
class HandPose6D:
    """Pose de {H} dans {O} en coordonnées exponentielles."""
    theta: tuple

    def __post_init__(self):
        theta = tuple(float(x) for x in self.theta)
        if len(theta) != 6 or not all(math.isfinite(x) for x in theta):
            raise ErreurDomaine("θ_h doit contenir six valeurs finies")
        if np.linalg.norm(theta[3:]) >= math.pi:
            raise ErreurDomaine("Vecteur rotation de norme >= pi")
        object.__setattr__(self, 'theta', theta)

    def transformation(self):
        return pose_depuis_theta(self.theta)

    @classmethod
    def depuis_transformation(cls, T):
        return cls(tuple(theta_depuis_pose(T)))


@dataclass(frozen=True)
class FPSpec:
    """
    Description d'une pose fondamentale.

    `doigts[i]` est le doigt du contact i ; `paires_pincement` contient des
    paires d'indices de contacts.
    """
    nom: str
    doigts: tuple
    mobiles: tuple
    paires_pincement: tuple
    regle_axe: str
    selecteur_cout: str
    posture_repos: tuple
    boite_poignet: tuple
    bornes_a_t1: tuple
    disposition: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = len(self.doigts)
        if self.nom not in ('carve', 'poke', 'press'):
            raise ErreurConfiguration(f"Pose fondamentale inconnue : {self.nom}")
        if self.nom == 'carve' and not (n == 3 and set(self.mobiles) == set(self.doigts)):
            raise ErreurConfiguration("carve : 3 contacts, tous mobiles")
        if self.nom != 'carve' and not (n == 4 and len(self.mobiles) == 2
                                        and set(self.mobiles) <= set(self.doigts)):
            raise ErreurConfiguration(f"{self.nom} : 4 contacts dont 2 mobiles")
        if len(set(self.doigts)) != n:
            raise ErreurConfiguration(f"{self.nom} : un seul contact par doigt")

    @property
    def n_contacts(self):
        return len(self.doigts)

    @property
    def stationnaires(self):
        return tuple(f for f in self.doigts if f not in self.mobiles)

    @property
    def doigts_libres(self):
        return tuple(f for f in range(4) if f not in self.doigts)

    def indice_contact(self, doigt):
        return self.doigts.index(doigt)


def construire_fp(nom, table):
    """
    Construit une FPSpec depuis une table de configuration.

    Args:
        nom (str): 'carve', 'poke' ou 'press'
        table (dict): Entrée de FP_CONFIG

    Returns:
        FPSpec
    """
    return FPSpec(
        nom=nom,
        doigts=tuple(int(f) for f in table['doigts']),
        mobiles=tuple(int(f) for f in table['mobiles']),
        paires_pincement=tuple(tuple(int(i) for i in p) for p in table['paires_pincement']),
        regle_axe=table['regle_axe'],
        selecteur_cout=table['selecteur_cout'],
        posture_repos=tuple(float(x) for x in table['posture_repos']),
        boite_poignet=tuple(float(x) for x in table['boite_poignet']),
        bornes_a_t1=tuple(float(x) for x in table['bornes_a_t1']),
        disposition=dict(table.get('disposition_nominale', {}))
    )


def construire_fps(tables=None):
    """Dictionnaire ordonné nom -> FPSpec pour carve, poke, press."""
    tables = tables or settings.FP_CONFIG
    return {nom: construire_fp(nom, tables[nom]) for nom in settings.ORDRE_FP}

# ==============================================================================
# FONCTION 3 : REPÈRES DE GAUSS SUR LES SURFACES
# ==============================================================================

@dataclass
class RepereSurface:
    """
    Repère de Gauss non tourné et formes géométriques en un point.

    dp[:, k] = dp/da_k ; dR[k] = dR/da_k ; metrique = diag(M) ;
    courbure K telle que dz/da = -[x y] K M ; torsion T = y.(dx/da) M^-1.
    """
    p: np.ndarray
    R: np.ndarray
    dp: np.ndarray
    dR: np.ndarray
    metrique: np.ndarray
    courbure: np.ndarray
    torsion: np.ndarray


def repere_cylindre(geom, a1, a2):
    """Repère de Gauss (sans spin) sur le cylindre de l'outil, avec dérivées."""
    if a1 < -TOLERANCE_DOMAINE or a1 > geom.longueur + TOLERANCE_DOMAINE:
        raise ErreurDomaine(f"a1 = {a1} hors de [0, {geom.longueur}]")
    r = geom.rayon
    c, s = math.cos(a2), math.sin(a2)
    p = np.array([r * c, r * s, a1])
    R = np.array([
        [0.0, -s, -c],
        [0.0, c, -s],
        [1.0, 0.0, 0.0]
    ])
    dp = np.array([[0.0, -r * s], [0.0, r * c], [1.0, 0.0]])
    dR = np.zeros((2, 3, 3))
    dR[1] = np.array([
        [0.0, -c, s],
        [0.0, -s, -c],
        [0.0, 0.0, 0.0]
    ])
    return RepereSurface(
        p=p, R=R, dp=dp, dR=dR,
        metrique=np.array([1.0, r]),
        courbure=np.diag([0.0, 1.0 / r]),
        torsion=np.zeros(2)
    )


def _repere_sphere(rayon, centre, k, i, j, beta, alpha):
    """
    Repère sur une sphère paramétrée par (beta, alpha) autour du triplet (k, i, j).

    s = sin(beta) k + cos(beta) (cos(alpha) i + sin(alpha) j).
    Les dérivées sont rendues par rapport à (beta, alpha).
    """
    cb, sb = math.cos(beta), math.sin(beta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    e_r = ca * i + sa * j
    e_t = -sa * i + ca * j
    s = sb * k + cb * e_r
    x = cb * k - sb * e_r
    y = e_t
    z = -s
    p = centre + rayon * s
    R = np.column_stack([x, y, z])
    dp = np.column_stack([rayon * x, rayon * cb * e_t])
    dR = np.zeros((2, 3, 3))
    dR[0] = np.column_stack([z, np.zeros(3), -x])
    dR[1] = np.column_stack([-sb * e_t, -e_r, -cb * e_t])
    return p, R, dp, dR, cb, sb


def domaine_capsule(rayon, longueur_cyl, carte=0, marge=0.0):
    """
    Bornes (a1_min, a1_max, a2_min, a2_max) du domaine d'une carte de capsule.

    Carte 0 : corps cylindrique puis calotte distale, abscisse curviligne.
    Carte 1 : carte sphérique tournée centrée sur le pôle de la calotte.
    """
    if carte == 0:
        return 0.0, longueur_cyl + rayon * (math.pi / 2 - marge), -math.pi, math.pi
    demi = math.pi / 2 - marge
    return -rayon * demi, rayon * demi, -demi, demi


def repere_capsule(rayon, longueur_cyl, a1, a2, carte=0):
    """
    Repère de Gauss (sans spin) sur la phalange distale, axe e_x du lien.

    Args:
        rayon (float): Rayon du doigt (mm)
        longueur_cyl (float): Longueur du corps cylindrique (mm)
        a1, a2 (float): Coordonnées de surface dans la carte choisie
        carte (int): 0 carte standard, 1 carte tournée sur la calotte

    Returns:
        RepereSurface

    Raises:
        ErreurDomaine: Coordonnées hors du domaine de la carte
    """
    a1_min, a1_max, a2_min, a2_max = domaine_capsule(rayon, longueur_cyl, carte)
    if a1 < a1_min - TOLERANCE_DOMAINE or a1 > a1_max + TOLERANCE_DOMAINE:
        raise ErreurDomaine(f"a1 = {a1} hors de [{a1_min}, {a1_max}] (carte {carte})")
    if carte == 1 and (a2 < a2_min - TOLERANCE_DOMAINE or a2 > a2_max + TOLERANCE_DOMAINE):
        raise ErreurDomaine(f"a2 = {a2} hors de [{a2_min}, {a2_max}] (carte 1)")

    ex, ey, ez = np.eye(3)
    r = rayon
    if carte == 0 and a1 <= longueur_cyl:
        c, s = math.cos(a2), math.sin(a2)
        e_r = c * ey + s * ez
        e_t = -s * ey + c * ez
        p = a1 * ex + r * e_r
        R = np.column_stack([ex, e_t, -e_r])
        dp = np.column_stack([ex, r * e_t])
        dR = np.zeros((2, 3, 3))
        dR[1] = np.column_stack([np.zeros(3), -e_r, -e_t])
        return RepereSurface(
            p=p, R=R, dp=dp, dR=dR,
            metrique=np.array([1.0, r]),
            courbure=np.diag([0.0, 1.0 / r]),
            torsion=np.zeros(2)
        )

    centre = longueur_cyl * ex
    if carte == 0:
        beta = (a1 - longueur_cyl) / r
        p, R, dp_s, dR_s, cb, sb = _repere_sphere(r, centre, ex, ey, ez, beta, a2)
    else:
        beta = a1 / r
        p, R, dp_s, dR_s, cb, sb = _repere_sphere(r, centre, ey, ex, -ez, beta, a2)
    dp = dp_s.copy()
    dp[:, 0] /= r
    dR = dR_s.copy()
    dR[0] /= r
    return RepereSurface(
        p=p, R=R, dp=dp, dR=dR,
        metrique=np.array([1.0, r * cb]),
        courbure=np.diag([1.0 / r, 1.0 / r]),
        torsion=np.array([0.0, -sb / (r * cb) if abs(cb) > 1e-15 else -np.inf])
    )


def cylinder_frame(geom, c):
    """
    Repère de Gauss T_OC sur le cylindre de l'outil, tourné de `spin` autour de z.

    Args:
        geom (ToolGeom): Géométrie de l'outil
        c (SurfaceCoords): Coordonnées (a1 axiale en mm, a2 angle, spin)

    Returns:
        np.ndarray: Transformation 4x4

    Example:
        >>> T = cylinder_frame(ToolGeom(5, 150, 150), SurfaceCoords(0, 0))
        >>> T[:3, 3], T[:3, 2]
        (array([5., 0., 0.]), array([-1., 0., 0.]))
    """
    repere = repere_cylindre(geom, c.a1, c.a2)
    return transformation(repere.R @ rotation_z(c.spin), repere.p)


def capsule_frame(rayon, longueur_cyl, c, carte=0):
    """Repère de Gauss sur la capsule distale, tourné de `spin` autour de z."""
    repere = repere_capsule(rayon, longueur_cyl, c.a1, c.a2, carte)
    return transformation(repere.R @ rotation_z(c.spin), repere.p)

# ==============================================================================
# FONCTION 4 : CINÉMATIQUE DIRECTE DES DOIGTS
# ==============================================================================

@dataclass
class CinematiqueDoigt:
    """
    Repère de contact {P} d'un doigt dans son repère racine {R}.

    Dérivées par rapport à [u1, u2, u3, a1, a2]. `axes[:, j]` et
    `origines[:, j]` décrivent l'axe de l'articulation j ; `points` donne
    MCP, IP et extrémité de l'axe distal avec leurs dérivées articulaires.
    """
    p: np.ndarray
    R: np.ndarray
    dp: np.ndarray
    dR: np.ndarray
    axes: np.ndarray
    origines: np.ndarray
    points: dict
    dpoints: dict
    surface: RepereSurface
    R_distal: np.ndarray


def _chaine_doigt(d, u):
    """Rotations, axes articulaires et points caractéristiques d'un doigt."""
    u1, u2, u3 = (float(x) for x in u)
    R_flex = rotation_y(u1)
    R1 = R_flex @ rotation_z(u2)
    R_D = R1 @ rotation_y(u3)
    o_ip = R1 @ np.array([d.longueur_proximale, 0.0, 0.0])
    bout = o_ip + R_D @ np.array([d.longueur_cylindrique, 0.0, 0.0])

    axes = np.column_stack([np.array([0.0, 1.0, 0.0]), R_flex @ np.array([0.0, 0.0, 1.0]), R1[:, 1]])
    origines = np.column_stack([np.zeros(3), np.zeros(3), o_ip])

    points = {'mcp': np.zeros(3), 'ip': o_ip, 'bout': bout}
    dpoints = {
        'mcp': np.zeros((3, 3)),
        'ip': np.column_stack([np.cross(axes[:, 0], o_ip), np.cross(axes[:, 1], o_ip), np.zeros(3)]),
        'bout': np.column_stack([np.cross(axes[:, j], bout - origines[:, j]) for j in range(3)])
    }
    return R_D, axes, origines, points, dpoints


def points_liens(d, u):
    """Points MCP / IP / bout d'un doigt dans {R} et leurs dérivées articulaires."""
    _, _, _, points, dpoints = _chaine_doigt(d, u)
    return points, dpoints


def cinematique_doigt(d, u, a1, a2, carte=0):
    """
    Cinématique directe complète d'un doigt jusqu'au point de contact.

    Args:
        d (DesignParams): Conception
        u (array-like): [u1, u2, u3]
        a1, a2 (float): Coordonnées de surface sur la phalange distale
        carte (int): Carte de la capsule

    Returns:
        CinematiqueDoigt
    """
    R_D, axes, origines, points, dpoints = _chaine_doigt(d, u)
    surface = repere_capsule(d.d4, d.longueur_cylindrique, a1, a2, carte)

    p = points['ip'] + R_D @ surface.p
    R = R_D @ surface.R

    dp = np.zeros((3, 5))
    dR = np.zeros((5, 3, 3))
    for j in range(3):
        w = axes[:, j]
        dp[:, j] = np.cross(w, p - origines[:, j])
        dR[j] = antisymetrique(w) @ R
    for k in range(2):
        dp[:, 3 + k] = R_D @ surface.dp[:, k]
        dR[3 + k] = R_D @ surface.dR[k]

    return CinematiqueDoigt(
        p=p, R=R, dp=dp, dR=dR, axes=axes, origines=origines,
        points=points, dpoints=dpoints, surface=surface, R_distal=R_D
    )


def finger_fk(d, u, c, carte=0):
    """
    Transformation T_RP du repère racine du doigt au repère de contact.

    MCP (flexion autour de y puis abduction autour du z résultant),
    phalange proximale de longueur L_tot - d1, IP (flexion autour de y),
    puis repère de Gauss sur la capsule distale (longueur d1, rayon d4).

    Args:
        d (DesignParams): Conception
        u (FingerJoints): Articulations
        c (SurfaceCoords): Coordonnées sur la phalange distale
        carte (int): Carte de la capsule

    Returns:
        np.ndarray: Transformation 4x4

    Example:
        >>> d = DesignParams(45, 55, 25, 7, 0, 0.9)
        >>> T = finger_fk(d, FingerJoints(0, 0, 0), SurfaceCoords(38 + 7 * math.pi / 2, 0))
        >>> T[:3, 3]
        array([100.,   0.,   0.])
    """
    cin = cinematique_doigt(d, u.vecteur(), c.a1, c.a2, carte)
    return transformation(cin.R @ rotation_z(c.spin), cin.p)

# ==============================================================================
# FONCTION 5 : DISPOSITION DES DOIGTS ET CINÉMATIQUE DE LA MAIN
# ==============================================================================

def racines_doigts(d, roulis_pouce=None):
    """
    Repères racines des quatre doigts dans {H}.

    Index, majeur, annulaire au bord distal de la paume (x = d2) aux
    abscisses latérales -d3, 0, +d3, inclinés de d5 autour de y ; pouce
    au coin proximal-latéral (0, -d3, 0), orienté de -d6 autour de la
    normale puis roulé de `roulis_pouce` autour de son axe.

    Returns:
        list: Quatre couples (p_HR, R_HR)
    """
    if roulis_pouce is None:
        roulis_pouce = settings.ROULIS_POUCE
    R_doigt = rotation_y(d.d5)
    racines = [
        (np.array([d.d2, -d.d3, 0.0]), R_doigt),
        (np.array([d.d2, 0.0, 0.0]), R_doigt),
        (np.array([d.d2, d.d3, 0.0]), R_doigt),
        (np.array([0.0, -d.d3, 0.0]), rotation_z(-d.d6) @ rotation_x(roulis_pouce))
    ]
    return racines


@dataclass
class Segment:
    """Segment d'un lien (capsule) dans {O}."""
    ident: str
    doigt: int
    lien: str
    p: np.ndarray
    q: np.ndarray
    rayon: float


def hand_fk(d, theta_h, articulations):
    """
    Segments des huit phalanges et placement de la paume dans {O}.

    Args:
        d (DesignParams): Conception
        theta_h (array-like): Pose θ_h de la main
        articulations (list): Quatre vecteurs [u1, u2, u3], un par doigt

    Returns:
        dict: 'T_OH' (4x4), 'racines' (quatre 4x4 dans {O}), 'segments'
        (liste de Segment : proximal MCP->IP, distal IP->bout de l'axe)
    """
    T_OH = pose_depuis_theta(theta_h)
    R_OH, t = T_OH[:3, :3], T_OH[:3, 3]
    racines = []
    segments = []
    for doigt, (p_HR, R_HR) in enumerate(racines_doigts(d)):
        racines.append(T_OH @ transformation(R_HR, p_HR))
        points, _ = points_liens(d, articulations[doigt])
        vers_O = lambda x: t + R_OH @ (p_HR + R_HR @ x)
        segments.append(Segment(f"d{doigt}_proximal", doigt, 'proximal',
                                vers_O(points['mcp']), vers_O(points['ip']), d.d4))
        segments.append(Segment(f"d{doigt}_distal", doigt, 'distal',
                                vers_O(points['ip']), vers_O(points['bout']), d.d4))
    return {'T_OH': T_OH, 'racines': racines, 'segments': segments}

# ==============================================================================
# FONCTION 6 : STANDARDISATION DE L'ESPACE DE CONCEPTION
# ==============================================================================

def standardize(d, d_min, d_max):
    """
    Projette une conception dans [-0.5, 0.5]^6.

    Args:
        d (DesignParams ou array-like): Conception
        d_min, d_max (array-like): Bornes

    Returns:
        np.ndarray: Coordonnées standardisées

    Raises:
        ErreurHorsBornes: Conception hors bornes (pas de saturation)
    """
    v = d.vecteur() if isinstance(d, DesignParams) else np.asarray(d, dtype=float)
    d_min = np.asarray(d_min, dtype=float)
    d_max = np.asarray(d_max, dtype=float)
    if np.any(d_min >= d_max):
        raise ErreurHorsBornes("Bornes de conception dégénérées (d_min >= d_max)")
    etendue = d_max - d_min
    if np.any(v < d_min - 1e-12 * etendue) or np.any(v > d_max + 1e-12 * etendue):
        raise ErreurHorsBornes(f"Conception {v.tolist()} hors des bornes")
    return (v - 0.5 * (d_min + d_max)) / etendue


def destandardize(x, d_min, d_max, l_tot=settings.L_TOT):
    """Inverse de standardize ; retourne une DesignParams."""
    d_min = np.asarray(d_min, dtype=float)
    d_max = np.asarray(d_max, dtype=float)
    v = 0.5 * (d_min + d_max) + np.asarray(x, dtype=float) * (d_max - d_min)
    return DesignParams.depuis_vecteur(v, l_tot=l_tot)
