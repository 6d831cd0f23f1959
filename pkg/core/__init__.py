"""
==============================================================================
MODULE CORE - MOTEUR NUMÉRIQUE
==============================================================================
Géométrie de la main et de l'outil, contacts roulement-glissement,
statique, solveurs QP/NLP, échantillonnage RRT, planification et
évaluation des conceptions.

Ce fichier définit la hiérarchie d'exceptions partagée par tous les
modules du moteur.

Date: Octobre 2026
Version: 1.0
==============================================================================
"""


class ErreurConception(Exception):
    """Erreur de base du moteur de conception."""


class ErreurDomaine(ErreurConception):
    """Coordonnée de surface hors de son domaine paramétrique."""


class ErreurHorsBornes(ErreurConception):
    """Conception hors de [d_min, d_max] ou invariant géométrique violé."""


class SingulariteCarte(ErreurConception):
    """Contact sur une singularité de paramétrisation (pôle de calotte)."""


class EtatPerime(ErreurConception):
    """État trop éloigné de la variété de contact."""


class AxeDegenere(ErreurConception):
    """Pointe de l'outil sur l'axe de rotation : tangente de coupe indéfinie."""


class ErreurConfiguration(ErreurConception):
    """Configuration invalide ou graine qui ne valide pas les poses fondamentales."""


__version__ = '1.0'

__all__ = [
    'ErreurConception',
    'ErreurDomaine',
    'ErreurHorsBornes',
    'SingulariteCarte',
    'EtatPerime',
    'AxeDegenere',
    'ErreurConfiguration'
]
