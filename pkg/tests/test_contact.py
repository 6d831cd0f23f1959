"""
==============================================================================
TESTS - CONTACTS DE ROULEMENT
==============================================================================
Résidus et jacobiennes de contact, placement de la main, changement de
carte sur la calotte distale.

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from core.contact import (
    ContactPair,
    SystemState,
    axe_rotation,
    contact_evolution,
    contact_jacobian,
    contact_residual,
    geometries,
    jacobien_reduit,
    reach_fp_jacobian,
    reach_fp_residual,
    reancrer_contact,
    residu_reduit,
)
from core.model import cinematique_doigt, repere_cylindre
from tests.conftest import differences_finies


def test_residu_repères_opposes():
    T_C = np.eye(4)
    T_P = np.eye(4)
    T_P[:3, :3] = np.diag([1.0, -1.0, -1.0])
    np.testing.assert_allclose(contact_residual(T_C, T_P), np.zeros(6))


def test_residu_decalage():
    T_C = np.eye(4)
    T_P = np.eye(4)
    T_P[:3, :3] = np.diag([1.0, -1.0, -1.0])
    T_P[:3, 3] = [0.0, 0.0, 2.0]
    np.testing.assert_allclose(contact_residual(T_C, T_P)[:3], [0.0, 0.0, -2.0])


def test_main_placee_realise_le_contact(etat_carve, conception, outil, fps):
    r = reach_fp_residual(etat_carve, conception, fps['carve'], outil)
    assert r.shape == (18,)
    np.testing.assert_allclose(r[:6], 0.0, atol=1e-9)


def test_residu_mauvais_nombre_de_contacts(etat_un_contact, conception, outil, fps):
    with pytest.raises(ValueError):
        reach_fp_residual(etat_un_contact, conception, fps['carve'], outil)


def test_jacobienne_differences_finies(etat_carve, conception, outil, fps):
    fp = fps['carve']
    x0 = etat_carve.vecteur()
    J = reach_fp_jacobian(etat_carve, conception, fp, outil)
    numerique = differences_finies(
        lambda x: reach_fp_residual(etat_carve.avec_vecteur(x), conception, fp, outil), x0)
    assert J.shape == (18, 30)
    np.testing.assert_allclose(J, numerique, atol=1e-5)


def test_jacobienne_reduite_differences_finies(etat_carve, conception, outil, fps):
    fp = fps['carve']
    x0 = etat_carve.vecteur()
    J = jacobien_reduit(etat_carve, conception, fp, outil)
    numerique = differences_finies(
        lambda x: residu_reduit(etat_carve.avec_vecteur(x), conception, fp, outil), x0)
    assert J.shape == (15, 30)
    np.testing.assert_allclose(J, numerique, atol=1e-5)


def test_normales_opposees_au_contact_place(etat_un_contact, conception, outil):
    g = geometries(etat_un_contact, conception, outil)[0]
    np.testing.assert_allclose(g.outil.p, g.p_P, atol=1e-9)
    np.testing.assert_allclose(g.outil.R[:, 2], -g.R_P[:, 2], atol=1e-9)


def test_jacobienne_de_contact_dimensions(etat_carve, conception, outil, fps):
    J = contact_jacobian(etat_carve, conception, fps['carve'], outil, verifier=False)
    assert J.shape == (9, 10)


def test_evolution_lineaire_en_vitesses(etat_carve, conception, outil, fps):
    fp = fps['carve']
    u_f = np.full((3, 3), 0.1)
    simple = contact_evolution(etat_carve, conception, fp, outil, 0.2, u_f)
    double = contact_evolution(etat_carve, conception, fp, outil, 0.4, 2.0 * u_f)
    assert simple.shape == (3, 5)
    np.testing.assert_allclose(double, 2.0 * simple, atol=1e-9)


# ==============================================================================
# CARTES DE LA CALOTTE
# ==============================================================================

def test_changement_de_carte_pres_du_pole(conception, pole_distal):
    contact = ContactPair(0, 0.0, 50.0, 0.0, (0.2, 0.0, 0.3), pole_distal - 0.01 * conception.d4, 0.4, 0)
    avant = cinematique_doigt(conception, contact.u, contact.a_f1, contact.a_f2, 0).p
    reancre = reancrer_contact(contact, conception)
    assert reancre.carte == 1
    apres = cinematique_doigt(conception, reancre.u, reancre.a_f1, reancre.a_f2, 1).p
    np.testing.assert_allclose(apres, avant, atol=1e-9)


def test_pas_de_changement_loin_du_pole(conception):
    contact = ContactPair(0, 0.0, 50.0, 0.0, (0.2, 0.0, 0.3), 20.0, 0.4, 0)
    assert reancrer_contact(contact, conception) is contact


def test_retour_force_carte_standard(conception):
    contact = ContactPair(0, 0.0, 50.0, 0.0, (0.2, 0.0, 0.3), 0.2 * conception.d4, -0.3, 1)
    avant = cinematique_doigt(conception, contact.u, contact.a_f1, contact.a_f2, 1).p
    reancre = reancrer_contact(contact, conception, forcer=True)
    assert reancre.carte == 0
    assert reancre.a_f1 >= conception.longueur_cylindrique
    apres = cinematique_doigt(conception, reancre.u, reancre.a_f1, reancre.a_f2, 0).p
    np.testing.assert_allclose(apres, avant, atol=1e-9)


def test_hysteresis_carte_tournee(conception):
    """Un contact proche du pôle reste dans la carte tournée."""
    contact = ContactPair(0, 0.0, 50.0, 0.0, (0.2, 0.0, 0.3), 0.1 * conception.d4, 0.1, 1)
    assert reancrer_contact(contact, conception).carte == 1
    assert math.isclose(reancrer_contact(contact, conception).a_f1, contact.a_f1)


# ==============================================================================
# AXE DE ROTATION
# ==============================================================================

def test_axe_carve_perpendiculaire_au_levier(etat_carve, conception, outil, fps):
    centre, k = axe_rotation(etat_carve, conception, fps['carve'], outil)
    points = [repere_cylindre(outil, c.a_t1, c.a_t2).p for c in etat_carve.contacts]
    np.testing.assert_allclose(centre, np.mean(points, axis=0), atol=1e-12)
    levier = np.array([0.0, 0.0, outil.pointe]) - centre
    assert np.linalg.norm(k) == pytest.approx(1.0)
    assert k @ np.array([0.0, 0.0, 1.0]) == pytest.approx(0.0, abs=1e-12)
    assert k @ levier == pytest.approx(0.0, abs=1e-9)


def test_axe_carve_barycentre_sur_l_axe(etat_carve, conception, outil, fps):
    """Trois contacts à 120° : le bras de levier est porté par e_z, l'axe reste défini."""
    contacts = tuple(
        replace(c, a_t1=80.0, a_t2=2.0 * math.pi * i / 3.0)
        for i, c in enumerate(etat_carve.contacts)
    )
    etat = SystemState(etat_carve.theta_h, contacts)
    centre, k = axe_rotation(etat, conception, fps['carve'], outil)
    np.testing.assert_allclose(centre[:2], [0.0, 0.0], atol=1e-9)
    assert np.linalg.norm(k) == pytest.approx(1.0)
    assert k[2] == pytest.approx(0.0, abs=1e-12)
