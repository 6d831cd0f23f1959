"""
==============================================================================
MODULE D'ÉCHANTILLONNAGE DES CONCEPTIONS (RRT)
==============================================================================
Exploration de l'espace de conception standardisé par un arbre RRT :
chaque proposition est amenée à ses trois poses fondamentales (FP) par
optimisation non linéaire, puis acceptée si les contacts, l'absence de
collision et l'équilibre statique (deux sens d'effort) sont vérifiés.

Fonctions principales :
- rrt_propose() : proposition d'une conception près du plus proche candidat
- fp_cost() : coût propre à chaque FP (moment de coupe, alignement de pincement)
- attempt_fps() : résolution des trois FP pour une nouvelle conception
- run_sampling() : boucle d'échantillonnage avec arrêt sur efficacité
- coverage_estimate() : estimation de couverture par boules disjointes
- construire_etat_initial() : amorçage d'un état FP depuis la disposition nominale

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import approx_fprime, least_squares
from scipy.spatial import cKDTree
from scipy.special import gamma

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings
from core import ErreurConception, ErreurConfiguration
from core.contact import (
    ContactPair, SystemState, _orienter, axe_rotation, bornes_coordonnees_doigt,
    contact_jacobian, geometries, indices_doigt, indices_outil, jacobien_reduit,
    reach_fp_residual, reancrer_etat, residu_reduit, synchroniser_spin
)
from core.mechanics import (
    FrictionModel, collision_jacobian, collision_values, equilibre_fp, tangente_coupe
)
from core.model import (
    DesignParams, ToolGeom, cinematique_doigt, construire_fps, destandardize,
    racines_doigts, standardize, theta_depuis_pose, transformation
)
from core.solve import NLPProblem, solve_nlp
from utils.logger import log_echantillonnage, setup_logger

logger = setup_logger('sampler')

# ==============================================================================
# FONCTION 1 : CONFIGURATION ET ENREGISTREMENTS
# ==============================================================================

@dataclass(frozen=True)
class SamplerConfig:
    """Paramètres de l'échantillonneur (distances dans l'espace standardisé)."""
    pas: float = 0.02
    distance_min: float = 0.015
    nb_candidats_cible: int = 100
    seuil_efficacite: float = 0.01
    fenetre_efficacite: int = 500
    graine: int = 0
    lambda_abduction: float = 0.5
    conditionnement_max: float = 1e6
    mode: str = '2d'
    intervalle_progression: int = 50

    def __post_init__(self):
        if self.pas <= 0:
            raise ErreurConfiguration("pas > 0 requis")
        if not 0 < self.distance_min <= self.pas:
            raise ErreurConfiguration("0 < distance_min <= pas requis")
        if not 0 < self.seuil_efficacite < 1:
            raise ErreurConfiguration("0 < seuil_efficacite < 1 requis")
        if self.mode not in ('2d', '6d'):
            raise ErreurConfiguration(f"Mode inconnu : {self.mode}")

    @classmethod
    def depuis_config(cls, echantillonnage=None, **surcharges):
        valeurs = dict(echantillonnage or settings.ECHANTILLONNAGE_CONFIG)
        valeurs.update({k: v for k, v in surcharges.items() if v is not None})
        return cls(
            pas=float(valeurs['pas']),
            distance_min=float(valeurs['distance_min']),
            nb_candidats_cible=int(valeurs['nb_candidats_cible']),
            seuil_efficacite=float(valeurs['seuil_efficacite']),
            fenetre_efficacite=int(valeurs['fenetre_efficacite']),
            graine=int(valeurs['graine']),
            lambda_abduction=float(valeurs['lambda_abduction']),
            conditionnement_max=float(valeurs['conditionnement_max']),
            mode=valeurs['mode'],
            intervalle_progression=int(valeurs['intervalle_progression'])
        )

    @property
    def indices_actifs(self):
        return list(settings.INDICES_MODE_2D) if self.mode == '2d' else list(range(6))


@dataclass
class ContexteConception:
    """Tout ce dont la résolution des FP a besoin, hors conception."""
    fps: dict
    outil: ToolGeom
    frottement: FrictionModel
    d_min: np.ndarray
    d_max: np.ndarray
    limites: dict
    solveur: dict
    magnitude: float
    marge: float
    l_tot: float
    lambda_abduction: float = 0.5
    conditionnement_max: float = 1e6
    references: dict = field(default_factory=dict)

    @classmethod
    def depuis_config(cls, config):
        """
        Construit le contexte depuis une PipelineConfig.

        Args:
            config (PipelineConfig): Configuration validée

        Returns:
            ContexteConception
        """
        try:
            fps = construire_fps(config.fp)
            outil = ToolGeom.depuis_config(config.outil)
            frottement = FrictionModel.depuis_config(config.frottement)
        except (ValueError, KeyError) as e:
            raise ErreurConfiguration(str(e)) from e
        return cls(
            fps=fps, outil=outil, frottement=frottement,
            d_min=np.asarray(config.bornes['d_min'], dtype=float),
            d_max=np.asarray(config.bornes['d_max'], dtype=float),
            limites={k: np.asarray(v, dtype=float) for k, v in config.limites_articulaires.items()},
            solveur=dict(config.solveur),
            magnitude=float(config.effort_pointe['magnitude']),
            marge=float(config.marge_collision),
            l_tot=float(config.l_tot),
            lambda_abduction=float(config.echantillonnage['lambda_abduction']),
            conditionnement_max=float(config.echantillonnage['conditionnement_max'])
        )


@dataclass
class CandidateRecord:
    """Conception acceptée et ses états aux trois FP."""
    indice: int
    d: DesignParams
    etats: dict
    parent: int
    appel: int
    couts: dict

    def standardise(self, d_min, d_max):
        return standardize(self.d, d_min, d_max)


@dataclass
class ResultatEchantillonnage:
    candidats: list
    efficacites: list
    nb_appels: int
    raison_arret: str

# ==============================================================================
# FONCTION 2 : PROPOSITION RRT
# ==============================================================================

def plus_proche(X, q):
    """Indice du plus proche voisin (distance euclidienne, premier en cas d'égalité)."""
    ecarts = np.asarray(X) - q
    return int(np.argmin(np.einsum('ij,ij->i', ecarts, ecarts)))


def rrt_propose(X, rng, cfg):
    """
    Propose une conception standardisée depuis le candidat le plus proche d'un tirage.

    q est tiré uniformément dans [-0.5, 0.5] sur les dimensions actives (les
    autres restent à la valeur du premier candidat) ; la proposition avance
    du plus proche candidat vers q d'au plus `pas`.

    Args:
        X (np.ndarray): Candidats standardisés (N, 6)
        rng (np.random.Generator): Générateur aléatoire
        cfg (SamplerConfig): Configuration

    Returns:
        tuple: (x_nouveau (6,), indice du plus proche i*)

    Example:
        >>> x, i = rrt_propose(np.zeros((1, 6)), np.random.default_rng(0), SamplerConfig(mode='6d'))
        >>> float(np.linalg.norm(x)) <= 0.02
        True
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    actifs = cfg.indices_actifs
    q = X[0].copy()
    q[actifs] = rng.uniform(-0.5, 0.5, size=len(actifs))
    return pas_vers(X, q, cfg.pas)


def pas_vers(X, q, pas):
    """Pas RRT vers q depuis le plus proche candidat de X."""
    i_star = plus_proche(X, q)
    direction = q - X[i_star]
    distance = float(np.linalg.norm(direction))
    if distance <= pas:
        return q.copy(), i_star
    return X[i_star] + (pas / distance) * direction, i_star

# ==============================================================================
# FONCTION 3 : COÛTS DES POSES FONDAMENTALES
# ==============================================================================

def fp_cost(state, d, fp, tool, lambda_abduction=None, axe=None):
    """
    Coût d'une FP à minimiser.

    carve : -moyenne des composantes signées des normales intérieures de
    l'outil le long de la tangente de coupe (dans [-1, 1]) ; poke / press :
    somme des produits scalaires des normales des paires de pincement (-1
    par paire parfaitement opposée). Plus λ Σ u2² sur les doigts en contact.

    Args:
        state (SystemState): État
        d, fp, tool: Conception, pose fondamentale, outil
        lambda_abduction (float, optional): Poids de la régularisation d'abduction
        axe (tuple, optional): Axe de rotation imposé (carve)

    Returns:
        float: Coût
    """
    lam = settings.ECHANTILLONNAGE_CONFIG['lambda_abduction'] if lambda_abduction is None else lambda_abduction
    normales = [g.outil.R[:, 2] for g in geometries(state, d, tool)]
    if fp.selecteur_cout == 'carve_moment':
        axe = axe if axe is not None else axe_rotation(state, d, fp, tool)
        t = tangente_coupe(axe, tool)
        terme = -float(np.mean([z @ t for z in normales]))
    else:
        terme = float(sum(normales[a] @ normales[b] for a, b in fp.paires_pincement))
    return terme + lam * sum(c.u[1] ** 2 for c in state.contacts)

# ==============================================================================
# FONCTION 4 : RÉSOLUTION DES POSES FONDAMENTALES
# ==============================================================================

def bornes_etat(state, d, fp, ctx, theta_ref):
    """
    Bornes absolues (lb, ub) du vecteur d'état pour une FP.

    Boîte de poignet autour de θ_ref, a_t1 dans bornes_a_t1, articulations
    dans leurs limites, coordonnées doigt dans le domaine de leur carte ;
    les spins sont figés.
    """
    n = state.n
    x = state.vecteur()
    lb = np.full(8 * n + 6, -np.inf)
    ub = np.full(8 * n + 6, np.inf)
    boite = np.asarray(fp.boite_poignet, dtype=float)
    lb[:6] = np.asarray(theta_ref) - boite
    ub[:6] = np.asarray(theta_ref) + boite
    for i, c in enumerate(state.contacts):
        io = indices_outil(n, i)
        lb[io[0]] = ub[io[0]] = x[io[0]]
        lb[io[1]], ub[io[1]] = fp.bornes_a_t1
        idf = indices_doigt(n, i)
        lb[idf[:3]] = ctx.limites['min']
        ub[idf[:3]] = ctx.limites['max']
        a_min, a_max = bornes_coordonnees_doigt(d, c.carte)
        lb[idf[3:]] = a_min
        ub[idf[3:]] = a_max
    return lb, ub


def indices_libres(n):
    """Indices du vecteur d'état hors spins."""
    spins = {6 + 3 * i for i in range(n)}
    return np.array([k for k in range(8 * n + 6) if k not in spins])


def verifier_etat_fp(state, d, fp, ctx):
    """
    Conditions d'acceptation d'un état FP.

    Returns:
        tuple: (ok, raison) ; raison nomme la première condition en échec
    """
    tol = ctx.solveur['tol_con']
    residu = np.abs(reach_fp_residual(state, d, fp, ctx.outil)).max()
    if not residu < tol:
        return False, f"{fp.nom} : résidu de contact {residu:.2e}"
    jeux, idents = collision_values(state, d, fp, ctx.outil, ctx.marge)
    if jeux.size and jeux.min() < 0:
        return False, f"{fp.nom} : collision {idents[int(np.argmin(jeux))]}"
    ok, detail = equilibre_fp(state, d, fp, ctx.outil, ctx.frottement, ctx.magnitude)
    if not ok:
        return False, f"{fp.nom} : {detail}"
    conditionnement = np.linalg.cond(contact_jacobian(state, d, fp, ctx.outil, verifier=False))
    if not conditionnement <= ctx.conditionnement_max:
        return False, f"{fp.nom} : jacobienne de contact mal conditionnée ({conditionnement:.2e})"
    return True, ''


def resoudre_fp(d, etat_init, fp, ctx):
    """
    Amène la conception `d` à une FP depuis l'état d'un candidat voisin.

    NLP sur Δθ initialisé à zéro : coût de la FP, résidu réduit nul, jeux
    de collision positifs, bornes de la FP.

    Returns:
        tuple: (SystemState ou None, coût ou raison d'échec)
    """
    tol_con = ctx.solveur['tol_con']
    theta_ref = ctx.references.get(fp.nom, etat_init.theta_h)
    x0 = etat_init.vecteur()
    libres = indices_libres(etat_init.n)
    lb, ub = bornes_etat(etat_init, d, fp, ctx, theta_ref)

    def etat(delta):
        x = x0.copy()
        x[libres] += delta
        return etat_init.avec_vecteur(x)

    def cout(delta):
        return fp_cost(etat(delta), d, fp, ctx.outil, ctx.lambda_abduction)

    probleme = NLPProblem(
        cout=cout,
        gradient=lambda delta: approx_fprime(delta, cout),
        x0=np.zeros(libres.size),
        egalites=lambda delta: residu_reduit(etat(delta), d, fp, ctx.outil),
        jac_egalites=lambda delta: jacobien_reduit(etat(delta), d, fp, ctx.outil)[:, libres],
        inegalites=lambda delta: collision_values(etat(delta), d, fp, ctx.outil, ctx.marge)[0] - tol_con,
        jac_inegalites=lambda delta: collision_jacobian(etat(delta), d, fp, ctx.outil, ctx.marge)[:, libres],
        lb=lb[libres] - x0[libres],
        ub=ub[libres] - x0[libres]
    )
    resultat = solve_nlp(probleme, tol_con=0.1 * tol_con, tol_opt=ctx.solveur['tol_opt'],
                         max_iter=int(ctx.solveur['max_iter_nlp']),
                         max_iter_qp=int(ctx.solveur['max_iter_qp']))
    if resultat.statut != 'optimal':
        return None, f"{fp.nom} : NLP {resultat.statut}"
    solution = synchroniser_spin(reancrer_etat(etat(resultat.x), d, ctx.outil), d, ctx.outil)
    ok, raison = verifier_etat_fp(solution, d, fp, ctx)
    if not ok:
        return None, raison
    return solution, fp_cost(solution, d, fp, ctx.outil, ctx.lambda_abduction)


def attempt_fps(d_new, etats_init, ctx):
    """
    Tente d'amener une conception à ses trois FP.

    Args:
        d_new (DesignParams): Conception proposée
        etats_init (dict): nom de FP -> SystemState du candidat voisin
        ctx (ContexteConception): Contexte de résolution

    Returns:
        tuple: (dict des états, dict des coûts) si succès, sinon (None, raison)
    """
    etats, couts = {}, {}
    for nom, fp in ctx.fps.items():
        try:
            etat, cout = resoudre_fp(d_new, etats_init[nom], fp, ctx)
        except ErreurConception as e:
            return None, f"{nom} : {e}"
        if etat is None:
            return None, cout
        etats[nom] = etat
        couts[nom] = cout
    return etats, couts

# ==============================================================================
# FONCTION 5 : BOUCLE D'ÉCHANTILLONNAGE
# ==============================================================================

def run_sampling(cfg, ctx, d_graine, etats_graine, rappel=None):
    """
    Boucle RRT : proposition, distance minimale, attempt_fps, acceptation.

    Arrêt quand le nombre cible de candidats est atteint, ou quand la
    moyenne glissante des acceptations sur `fenetre_efficacite` appels
    passe sous `seuil_efficacite`.

    Args:
        cfg (SamplerConfig): Configuration
        ctx (ContexteConception): Contexte de résolution
        d_graine (DesignParams): Conception initiale
        etats_graine (dict): États FP initiaux de la graine
        rappel (callable, optional): Appelé sur chaque CandidateRecord accepté

    Returns:
        ResultatEchantillonnage

    Raises:
        ErreurConfiguration: La graine ne valide pas ses FP
    """
    for nom, etat in etats_graine.items():
        ctx.references.setdefault(nom, np.asarray(etat.theta_h))
    etats, couts = attempt_fps(d_graine, etats_graine, ctx)
    if etats is None:
        raise ErreurConfiguration(f"Graine invalide : {couts}")
    graine = CandidateRecord(0, d_graine, etats, -1, 0, couts)
    candidats = [graine]
    if rappel:
        rappel(graine)
    X = [standardize(d_graine, ctx.d_min, ctx.d_max)]
    if cfg.nb_candidats_cible <= 1:
        return ResultatEchantillonnage(candidats, [], 0, 'cible')

    rng = np.random.default_rng(cfg.graine)
    acceptations = []
    efficacites = []
    appel = 0
    raison = 'cible'
    while len(candidats) < cfg.nb_candidats_cible:
        appel += 1
        x_new, i_star = rrt_propose(np.array(X), rng, cfg)
        accepte = False
        ecarts = np.linalg.norm(np.array(X) - x_new, axis=1)
        if ecarts.min() >= cfg.distance_min:
            try:
                d_new = destandardize(x_new, ctx.d_min, ctx.d_max, ctx.l_tot)
                etats, couts = attempt_fps(d_new, candidats[i_star].etats, ctx)
            except ErreurConception as e:
                etats, couts = None, str(e)
            if etats is not None:
                record = CandidateRecord(len(candidats), d_new, etats, i_star, appel, couts)
                candidats.append(record)
                X.append(x_new)
                accepte = True
                if rappel:
                    rappel(record)
            else:
                logger.debug(f"Appel {appel} rejeté : {couts}")

        acceptations.append(1.0 if accepte else 0.0)
        fenetre = acceptations[-cfg.fenetre_efficacite:]
        efficacites.append(float(np.mean(fenetre)))
        if appel % cfg.intervalle_progression == 0:
            log_echantillonnage(len(candidats), appel, efficacites[-1])
        if appel >= cfg.fenetre_efficacite and efficacites[-1] < cfg.seuil_efficacite:
            raison = 'efficacite'
            break

    log_echantillonnage(len(candidats), appel, efficacites[-1] if efficacites else 1.0)
    return ResultatEchantillonnage(candidats, efficacites, appel, raison)

# ==============================================================================
# FONCTION 6 : COUVERTURE DE L'ESPACE DE CONCEPTION
# ==============================================================================

def volume_boule(dim, rayon):
    return math.pi ** (dim / 2) / gamma(dim / 2 + 1) * rayon ** dim


def volume_couverture(nb_candidats, rayon, dim):
    """N boules disjointes de rayon `rayon` dans le cube unité, sans correction de recouvrement."""
    return nb_candidats * volume_boule(dim, rayon)


def coverage_estimate(X, dim=None):
    """
    Fraction du volume standardisé couverte par des boules de rayon égal à
    la moitié de la distance minimale entre candidats.

    Args:
        X (np.ndarray): Candidats standardisés (N, k)
        dim (int, optional): Dimension ; par défaut le nombre de colonnes

    Returns:
        float

    Example:
        >>> coverage_estimate(np.array([[0.0, 0.0], [0.5, 0.0]]))
        0.39269908169872414
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] < 2:
        raise ValueError("Au moins deux candidats requis")
    dim = X.shape[1] if dim is None else dim
    distances, _ = cKDTree(X).query(X, k=2)
    return volume_couverture(X.shape[0], 0.5 * float(distances[:, 1].min()), dim)

# ==============================================================================
# FONCTION 7 : AMORÇAGE DES ÉTATS INITIAUX
# ==============================================================================

def _points_nominaux(d, fp, disposition):
    """Points de contact des doigts (repère {H}) dans leurs postures nominales."""
    racines = racines_doigts(d)
    points = []
    for i, doigt in enumerate(fp.doigts):
        fraction, a2 = disposition['coords_doigt'][i]
        cin = cinematique_doigt(d, disposition['postures'][i], fraction * d.longueur_cylindrique, a2)
        p_HR, R_HR = racines[doigt]
        points.append(p_HR + R_HR @ cin.p)
    return np.array(points)


def _axe_initial(points, fp, regle):
    """Droite (a, u) dans {H} autour de laquelle l'outil est placé."""
    if regle == 'normale_plan':
        centre = points.mean(axis=0)
        _, _, Vt = np.linalg.svd(points - centre)
        return centre, _orienter(Vt[2])
    if regle == 'milieux':
        (a0, b0), (a1, b1) = fp.paires_pincement[:2]
        m0 = 0.5 * (points[a0] + points[b0])
        m1 = 0.5 * (points[a1] + points[b1])
        u = m1 - m0
        return 0.5 * (m0 + m1), _orienter(u / np.linalg.norm(u))
    if regle == 'extremites':
        dans_paire = {i for paire in fp.paires_pincement for i in paire}
        bouts = [i for i in range(len(points)) if i not in dans_paire]
        u = points[bouts[1]] - points[bouts[0]]
        return points.mean(axis=0), _orienter(u / np.linalg.norm(u))
    raise ErreurConfiguration(f"Règle d'axe initiale inconnue : {regle}")


def _rotation_alignant(u, v):
    """Rotation minimale envoyant le vecteur unitaire u sur v."""
    axe = np.cross(u, v)
    s = np.linalg.norm(axe)
    c = float(u @ v)
    if s < 1e-12:
        if c > 0:
            return np.eye(3)
        perp = np.cross(u, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-6:
            perp = np.cross(u, [0.0, 1.0, 0.0])
        perp /= np.linalg.norm(perp)
        return 2.0 * np.outer(perp, perp) - np.eye(3)
    K = np.array([[0, -axe[2], axe[1]], [axe[2], 0, -axe[0]], [-axe[1], axe[0], 0]]) / s
    return np.eye(3) + s * K + (1 - c) * K @ K


def construire_etat_initial(d, fp, ctx):
    """
    Construit un état FP depuis la disposition nominale de la FP.

    Les doigts sont mis dans leurs postures nominales, l'outil est aligné
    sur une droite ajustée aux points de contact (placée à la hauteur de
    prise), puis un moindres carrés borné (scipy) annule le résidu réduit ;
    l'état obtenu est enfin passé par resoudre_fp sur lui-même.

    Args:
        d (DesignParams): Conception
        fp (FPSpec): Pose fondamentale (avec sa disposition nominale)
        ctx (ContexteConception): Contexte

    Returns:
        SystemState

    Raises:
        ErreurConfiguration: Aucun état acceptable trouvé
    """
    disposition = fp.disposition
    points = _points_nominaux(d, fp, disposition)
    a, u = _axe_initial(points, fp, disposition['regle_axe_initiale'])
    R_OH = _rotation_alignant(u, np.array([0.0, 0.0, 1.0]))
    t_OH = np.array([0.0, 0.0, disposition['hauteur_prise']]) - R_OH @ a
    theta_h = theta_depuis_pose(transformation(R_OH, t_OH))

    contacts = []
    for i, doigt in enumerate(fp.doigts):
        p = R_OH @ points[i] + t_OH
        fraction, a2 = disposition['coords_doigt'][i]
        a_t1 = float(np.clip(p[2], *fp.bornes_a_t1))
        contacts.append(ContactPair(doigt, 0.0, a_t1, math.atan2(p[1], p[0]),
                                    tuple(disposition['postures'][i]),
                                    fraction * d.longueur_cylindrique, a2, 0))
    etat = synchroniser_spin(SystemState(theta_h, tuple(contacts)), d, ctx.outil)

    libres = indices_libres(etat.n)
    x0 = etat.vecteur()
    lb, ub = bornes_etat(etat, d, fp, ctx, theta_h)
    largeur = np.where(np.isfinite(ub - lb), ub - lb, 1.0)
    depart = np.clip(x0[libres], lb[libres] + 1e-6 * largeur[libres], ub[libres] - 1e-6 * largeur[libres])

    def complet(z):
        x = x0.copy()
        x[libres] = z
        return etat.avec_vecteur(x)

    ajustement = least_squares(
        lambda z: residu_reduit(complet(z), d, fp, ctx.outil),
        depart,
        jac=lambda z: jacobien_reduit(complet(z), d, fp, ctx.outil)[:, libres],
        bounds=(lb[libres], ub[libres]),
        method='trf', xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=500
    )
    logger.debug(f"{fp.nom} : amorçage moindres carrés, résidu {np.abs(ajustement.fun).max():.2e}")
    etat = synchroniser_spin(reancrer_etat(complet(ajustement.x), d, ctx.outil), d, ctx.outil)

    ctx.references.setdefault(fp.nom, np.asarray(etat.theta_h))
    solution, detail = resoudre_fp(d, etat, fp, ctx)
    if solution is None:
        raise ErreurConfiguration(f"Graine invalide - {detail}")
    return solution


def amorcer_graine(d, ctx):
    """États initiaux des trois FP pour la conception graine."""
    etats = {}
    for nom, fp in ctx.fps.items():
        etats[nom] = construire_etat_initial(d, fp, ctx)
        logger.info(f"✅ Pose {nom} amorcée pour la graine")
    return etats
