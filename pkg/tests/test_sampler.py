"""
==============================================================================
TESTS - ÉCHANTILLONNAGE DES CONCEPTIONS
==============================================================================
Proposition RRT, configuration, coûts des poses fondamentales, boucle
d'échantillonnage (résolution des FP simulée) et estimation de couverture.

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import math
from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from config import charger_config_pipeline, settings
from core import ErreurConfiguration
from core import sampler
from core.contact import SystemState, axe_rotation
from core.mechanics import tangente_coupe
from core.model import repere_cylindre
from core.sampler import (
    ContexteConception,
    SamplerConfig,
    coverage_estimate,
    fp_cost,
    indices_libres,
    pas_vers,
    plus_proche,
    rrt_propose,
    run_sampling,
    volume_couverture,
)


# ==============================================================================
# CONFIGURATION
# ==============================================================================

@pytest.mark.parametrize('surcharges', [
    {'pas': 0.0},
    {'distance_min': 0.05},
    {'seuil_efficacite': 1.5},
    {'mode': '3d'},
])
def test_configuration_invalide(surcharges):
    with pytest.raises(ErreurConfiguration):
        SamplerConfig(**surcharges)


def test_configuration_depuis_settings():
    cfg = SamplerConfig.depuis_config(mode='6d', graine=None)
    assert cfg.mode == '6d'
    assert cfg.graine == settings.ECHANTILLONNAGE_CONFIG['graine']
    assert cfg.indices_actifs == list(range(6))
    assert SamplerConfig(mode='2d').indices_actifs == list(settings.INDICES_MODE_2D)


# ==============================================================================
# PROPOSITION RRT
# ==============================================================================

def test_plus_proche_premier_en_cas_egalite():
    X = np.array([[1.0, 0.0], [-1.0, 0.0]])
    assert plus_proche(X, np.zeros(2)) == 0


def test_pas_vers_borne():
    X = np.zeros((1, 6))
    q = np.full(6, 0.4)
    x, i = pas_vers(X, q, 0.02)
    assert i == 0
    assert np.linalg.norm(x) == pytest.approx(0.02)


def test_pas_vers_cible_proche():
    X = np.zeros((1, 6))
    q = np.full(6, 0.001)
    x, _ = pas_vers(X, q, 0.02)
    np.testing.assert_allclose(x, q)


def test_proposition_longueur_de_pas():
    rng = np.random.default_rng(1)
    cfg = SamplerConfig(mode='6d')
    X = rng.uniform(-0.5, 0.5, size=(10, 6))
    for _ in range(50):
        x, i = rrt_propose(X, rng, cfg)
        assert np.linalg.norm(x - X[i]) <= cfg.pas + 1e-12


def test_proposition_mode_2d_fige_les_autres_dimensions():
    rng = np.random.default_rng(2)
    cfg = SamplerConfig(mode='2d')
    X = np.tile(np.array([0.1, 0.0, 0.0, -0.2, 0.3, 0.05]), (4, 1))
    X[:, 1] = [0.0, 0.1, -0.1, 0.2]
    X[:, 2] = [0.0, -0.2, 0.1, 0.3]
    figes = [k for k in range(6) if k not in settings.INDICES_MODE_2D]
    for _ in range(30):
        x, _ = rrt_propose(X, rng, cfg)
        np.testing.assert_allclose(x[figes], X[0, figes])


# ==============================================================================
# COÛTS ET VARIABLES
# ==============================================================================

def test_indices_libres_sans_spins():
    libres = indices_libres(3)
    assert libres.size == 27
    assert not {6, 9, 12} & set(libres.tolist())


def test_regularisation_abduction(etat_carve, conception, outil, fps):
    fp = fps['carve']
    sans = fp_cost(etat_carve, conception, fp, outil, lambda_abduction=0.0)
    avec = fp_cost(etat_carve, conception, fp, outil, lambda_abduction=1.0)
    abductions = sum(c.u[1] ** 2 for c in etat_carve.contacts)
    assert avec - sans == pytest.approx(abductions)


def test_cout_carve_borne(etat_carve, conception, outil, fps):
    """Moyenne de composantes de vecteurs unitaires : dans [-1, 1]."""
    cout = fp_cost(etat_carve, conception, fps['carve'], outil, lambda_abduction=0.0)
    assert -1.0 <= cout <= 1.0


def test_cout_carve_change_de_signe_avec_l_axe(etat_carve, conception, outil, fps):
    """Inverser l'axe inverse la tangente de coupe, donc le coût."""
    fp = fps['carve']
    centre, k = axe_rotation(etat_carve, conception, fp, outil)
    direct = fp_cost(etat_carve, conception, fp, outil, lambda_abduction=0.0, axe=(centre, k))
    inverse = fp_cost(etat_carve, conception, fp, outil, lambda_abduction=0.0, axe=(centre, -k))
    assert abs(direct) > 1e-6
    assert inverse == pytest.approx(-direct, abs=1e-12)


def test_cout_carve_balayage_monotone(etat_carve, conception, outil, fps):
    """Le coût décroît quand la normale d'un contact tourne vers la tangente de coupe."""
    fp = fps['carve']
    axe = axe_rotation(etat_carve, conception, fp, outil)
    t = tangente_coupe(axe, outil)
    contact = etat_carve.contacts[1]
    projections, couts = [], []
    for angle in np.linspace(-math.pi, math.pi, 73)[:-1]:
        contacts = list(etat_carve.contacts)
        contacts[1] = replace(contact, a_t2=angle)
        etat = SystemState(etat_carve.theta_h, contacts)
        projections.append(repere_cylindre(outil, contact.a_t1, angle).R[:, 2] @ t)
        couts.append(fp_cost(etat, conception, fp, outil, lambda_abduction=0.0, axe=axe))
    projections, couts = np.array(projections), np.array(couts)
    ordre = np.argsort(projections)
    assert np.all(np.diff(couts[ordre]) <= 1e-12)
    # Seule la composante du contact balayé varie : pente -1/3
    np.testing.assert_allclose(couts + projections / 3.0, (couts + projections / 3.0)[0], atol=1e-12)


# ==============================================================================
# BOUCLE D'ÉCHANTILLONNAGE (RÉSOLUTION SIMULÉE)
# ==============================================================================

@pytest.fixture
def contexte():
    return ContexteConception.depuis_config(charger_config_pipeline())


def _etats_factices(ctx):
    return {nom: SimpleNamespace(theta_h=np.zeros(6)) for nom in ctx.fps}


def _resolution_simulee(accepter):
    def attempt(d_new, etats_init, ctx):
        if accepter(d_new):
            return {nom: etats_init[nom] for nom in ctx.fps}, {nom: 0.0 for nom in ctx.fps}
        return None, 'rejet simulé'
    return attempt


def test_graine_candidat_zero(monkeypatch, contexte, conception):
    monkeypatch.setattr(sampler, 'attempt_fps', _resolution_simulee(lambda d: True))
    etats = _etats_factices(contexte)
    cfg = SamplerConfig(nb_candidats_cible=12, graine=4)
    resultat = run_sampling(cfg, contexte, conception, etats)
    assert len(resultat.candidats) == 12
    assert resultat.raison_arret == 'cible'
    graine = resultat.candidats[0]
    assert graine.indice == 0 and graine.parent == -1
    X = np.array([c.standardise(contexte.d_min, contexte.d_max) for c in resultat.candidats])
    distances = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=2)
    np.fill_diagonal(distances, np.inf)
    assert distances.min() >= cfg.distance_min - 1e-12
    for c in resultat.candidats[1:]:
        assert 0 <= c.parent < c.indice


def test_arret_sur_efficacite(monkeypatch, contexte, conception):
    def attempt(d_new, etats_init, ctx):
        if d_new is conception:
            return dict(etats_init), {nom: 0.0 for nom in ctx.fps}
        return None, 'rejet simulé'

    monkeypatch.setattr(sampler, 'attempt_fps', attempt)
    cfg = SamplerConfig(nb_candidats_cible=50, fenetre_efficacite=20, seuil_efficacite=0.05)
    resultat = run_sampling(cfg, contexte, conception, _etats_factices(contexte))
    assert resultat.raison_arret == 'efficacite'
    assert resultat.nb_appels == 20
    assert len(resultat.candidats) == 1


def test_graine_refusee(monkeypatch, contexte, conception):
    monkeypatch.setattr(sampler, 'attempt_fps', _resolution_simulee(lambda d: False))
    with pytest.raises(ErreurConfiguration):
        run_sampling(SamplerConfig(), contexte, conception, _etats_factices(contexte))


# ==============================================================================
# COUVERTURE
# ==============================================================================

def test_couverture_deux_points():
    assert coverage_estimate(np.array([[0.0, 0.0], [0.5, 0.0]])) == pytest.approx(math.pi / 8, abs=1e-12)


def test_couverture_grille_reguliere():
    """Grille 3 x 3 de pas 0.25 : neuf disques de rayon 0.125."""
    axe = np.array([-0.25, 0.0, 0.25])
    X = np.array([[a, b] for a in axe for b in axe])
    attendu = 9 * math.pi * 0.125 ** 2
    assert coverage_estimate(X) == pytest.approx(attendu, abs=1e-10)


def test_couverture_un_seul_candidat():
    with pytest.raises(ValueError):
        coverage_estimate(np.zeros((1, 6)))


def test_couverture_formule_2d():
    """785 candidats à demi-distance minimale 1/60 : environ 68,50 % du plan."""
    assert volume_couverture(785, 1.0 / 60.0, 2) == pytest.approx(0.6850, abs=5e-5)


def test_couverture_formule_6d():
    """10 000 candidats, même rayon, en dimension 6 : environ 1,11e-4 %."""
    assert 100 * volume_couverture(10000, 1.0 / 60.0, 6) == pytest.approx(1.11e-4, rel=5e-3)
