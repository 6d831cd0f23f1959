"""
==============================================================================
MODULE DES FONCTIONS UTILITAIRES
==============================================================================
Ce module centralise les petites fonctions répétées dans le pipeline.

Fonctions principales :
- formater_nombre() : Format avec espaces milliers
- formater_pourcentage() : Fraction -> '68,50 %'
- formater_duree() : Secondes -> '1 h 02 min 05 s'
- hash_fichier() : SHA-256 d'un fichier
- generer_nom_fichier() : Nom de fichier standardisé
- nom_fichier_chemins() : Fichier de trajectoires d'un candidat
- convert_df_to_csv() : Export CSV (octets)
- convert_df_to_excel() : Export Excel (octets)
- valider_colonnes() : Colonnes requises d'une table

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import hashlib
import io
import sys
from datetime import datetime
from pathlib import Path

import pandas as pd

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings

# ==============================================================================
# FONCTION 1 : FORMATAGE DE NOMBRES
# ==============================================================================

def formater_nombre(nombre, decimales=0, separateur=' '):
    """
    Formate un nombre avec séparateur de milliers.

    Args:
        nombre (int, float): Nombre à formater
        decimales (int): Nombre de décimales
        separateur (str): Séparateur de milliers (espace par défaut)

    Returns:
        str: Nombre formaté

    Example:
        >>> formater_nombre(78511)
        '78 511'
        >>> formater_nombre(1500.5, decimales=2)
        '1 500,50'
    """
    try:
        if pd.isna(nombre):
            return '0'
        nombre = float(nombre)
        if decimales == 0:
            return f"{int(round(nombre)):,}".replace(',', separateur)
        return f"{nombre:,.{decimales}f}".replace(',', separateur).replace('.', ',')
    except (ValueError, TypeError):
        return str(nombre)


def formater_pourcentage(fraction, decimales=2):
    """
    Example:
        >>> formater_pourcentage(0.685)
        '68,50 %'
    """
    if fraction is None or pd.isna(fraction):
        return 'n/d'
    return f"{formater_nombre(100.0 * fraction, decimales)} %"


def formater_duree(secondes):
    """
    Formate une durée en heures, minutes, secondes.

    Example:
        >>> formater_duree(3725)
        '1 h 02 min 05 s'
        >>> formater_duree(12.4)
        '12 s'
    """
    secondes = int(round(float(secondes)))
    heures, reste = divmod(secondes, 3600)
    minutes, sec = divmod(reste, 60)
    if heures:
        return f"{heures} h {minutes:02d} min {sec:02d} s"
    if minutes:
        return f"{minutes} min {sec:02d} s"
    return f"{sec} s"

# ==============================================================================
# FONCTION 2 : FICHIERS
# ==============================================================================

def hash_fichier(chemin, taille_bloc=1 << 16):
    """SHA-256 hexadécimal du contenu d'un fichier."""
    h = hashlib.sha256()
    with open(chemin, 'rb') as f:
        for bloc in iter(lambda: f.read(taille_bloc), b''):
            h.update(bloc)
    return h.hexdigest()


def generer_nom_fichier(prefixe, extension='csv', include_timestamp=False):
    """
    Génère un nom de fichier standardisé.

    Les sorties du pipeline n'ont pas d'horodatage par défaut, pour que deux
    exécutions identiques écrivent les mêmes fichiers.

    Example:
        >>> generer_nom_fichier('scores')
        'scores.csv'
        >>> generer_nom_fichier('scores', 'xlsx', include_timestamp=True)
        'scores_2026-10-19_14-30-25.xlsx'
    """
    if include_timestamp:
        return f"{prefixe}_{datetime.now().strftime('%Y-%m-%d_%H-%M-%S')}.{extension}"
    return f"{prefixe}.{extension}"


def nom_fichier_chemins(indice):
    """
    Example:
        >>> nom_fichier_chemins(12)
        'chemins_candidat_000012.jsonl'
    """
    return f"{settings.EXPORT_CONFIG['prefixe_chemins']}_{int(indice):06d}.jsonl"

# ==============================================================================
# FONCTION 3 : EXPORTS CSV / EXCEL
# ==============================================================================

def convert_df_to_csv(df):
    """
    Convertit un DataFrame en CSV (octets UTF-8, format flottant fixe).

    Args:
        df (pd.DataFrame): DataFrame à exporter

    Returns:
        bytes: Contenu du CSV
    """
    options = settings.EXPORT_CONFIG['csv']
    return df.to_csv(
        index=options['index'],
        sep=options['sep'],
        float_format=options['float_format'],
        lineterminator='\n'
    ).encode(options['encoding'])


def convert_df_to_excel(df, sheet_name=None):
    """
    Convertit un DataFrame en fichier Excel (.xlsx).

    Args:
        df (pd.DataFrame): DataFrame à exporter
        sheet_name (str, optional): Nom de la feuille

    Returns:
        bytes: Contenu du fichier Excel
    """
    options = settings.EXPORT_CONFIG['excel']
    output = io.BytesIO()
    with pd.ExcelWriter(output, engine=options['engine']) as writer:
        df.to_excel(writer, sheet_name=sheet_name or options['sheet_name'], index=options['index'])
    return output.getvalue()

# ==============================================================================
# FONCTION 4 : VALIDATION
# ==============================================================================

def valider_colonnes(df, colonnes):
    """
    Retourne la liste des colonnes absentes du DataFrame (vide si tout est là).

    Example:
        >>> valider_colonnes(pd.DataFrame(columns=['d2', 'd3']), ['d2', 'd9'])
        ['d9']
    """
    return [c for c in colonnes if c not in df.columns]
