"""
==============================================================================
FIXTURES DE TEST
==============================================================================
Conception graine, outil, poses fondamentales et états de contact
construits à la main pour les tests du moteur.

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Ajouter le projet au path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import settings
from core.contact import ContactPair, SystemState, placer_main_sur_contact, synchroniser_spin
from core.model import DesignParams, ToolGeom, construire_fps


def pytest_configure(config):
    config.addinivalue_line('markers', "lent: tests d'intégration numérique plus longs")


def differences_finies(fonction, x, h=1e-6):
    """Jacobienne (m, n) d'une fonction vectorielle par différences centrées."""
    x = np.asarray(x, dtype=float)
    colonnes = []
    for k in range(x.size):
        e = np.zeros(x.size)
        e[k] = h
        colonnes.append((np.asarray(fonction(x + e)) - np.asarray(fonction(x - e))) / (2 * h))
    return np.column_stack(colonnes)


@pytest.fixture
def conception():
    return DesignParams(*settings.CONCEPTION_INITIALE)


@pytest.fixture
def outil():
    return ToolGeom(5.0, 150.0, 150.0)


@pytest.fixture
def fps():
    return construire_fps()


def contact_place(d, tool, doigt, a_t1, a_t2, u, a_f1, a_f2, rotation_normale=0.0):
    """Contact et pose de main qui le réalise exactement."""
    contact = ContactPair(doigt, 0.0, a_t1, a_t2, u, a_f1, a_f2, 0)
    theta_h = placer_main_sur_contact(d, tool, contact, rotation_normale)
    return contact, theta_h


@pytest.fixture
def etat_un_contact(conception, outil):
    """Index au contact de l'outil au milieu de la phalange distale."""
    contact, theta_h = contact_place(conception, outil, 0, 75.0, 0.4, (0.3, 0.1, 0.5), 20.0, 0.3, 0.5)
    return synchroniser_spin(SystemState(theta_h, (contact,)), conception, outil)


@pytest.fixture
def etat_carve(conception, outil):
    """
    État à trois contacts (doigts 3, 0, 1) : le premier est exact, les
    deux autres quelconques mais dans le domaine des cartes.
    """
    premier, theta_h = contact_place(conception, outil, 3, 70.0, 0.2, (0.4, 0.05, 0.6), 22.0, 0.1, 0.6)
    autres = (
        ContactPair(0, 0.0, 80.0, 2.0, (0.5, -0.1, 0.7), 18.0, -0.2, 0),
        ContactPair(1, 0.0, 90.0, -2.0, (0.6, 0.1, 0.4), 25.0, 0.5, 0),
    )
    etat = SystemState(theta_h, (premier,) + autres)
    return synchroniser_spin(etat, conception, outil)


@pytest.fixture
def pole_distal(conception):
    """Coordonnée a_f1 du pôle de la calotte (carte 0)."""
    return conception.longueur_cylindrique + conception.d4 * math.pi / 2
