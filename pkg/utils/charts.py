"""
==============================================================================
MODULE DE CRÉATION DE GRAPHIQUES
==============================================================================
Paysages de scores des conceptions candidates : nuage de points sur deux
paramètres de conception (ou deux colonnes d'un plongement externe),
coloré par un score normalisé, membres du front de Pareto cerclés.

Deux rendus :
- matplotlib -> SVG déterministe (mêmes octets pour la même table)
- Plotly -> HTML interactif (survol : candidat, paramètres, score)

Fonctions disponibles :
- creer_paysage() : un paysage (une FP, une métrique)
- creer_grille_paysages() : grille 3 x 3 (FP x métrique)
- creer_courbe_seuil() : fraction de candidats au-delà d'un seuil d'amplitude
- figure_vers_svg() : sérialisation SVG déterministe
- creer_paysage_interactif() : version Plotly
- figure_vers_html() : sérialisation HTML Plotly

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import io
import sys
from pathlib import Path

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
import plotly.graph_objects as go
from plotly.subplots import make_subplots

# Import de la configuration
sys.path.append(str(Path(__file__).parent.parent))

from config import settings

# ==============================================================================
# STYLE COMMUN
# ==============================================================================

def _style():
    """Paramètres matplotlib figés pour un rendu reproductible."""
    return {
        'svg.hashsalt': settings.GRAPH_CONFIG['hashsalt'],
        'svg.fonttype': 'path',
        'font.family': settings.GRAPH_CONFIG['font_family'],
        'font.size': settings.GRAPH_CONFIG['font_size'],
        'axes.titlesize': settings.GRAPH_CONFIG['title_font_size'],
        'path.simplify': False
    }


def libelle_colonne(colonne):
    """
    Libellé lisible d'une colonne de la table des scores.

    Example:
        >>> libelle_colonne('score_carve_couple')
        'Score carve - Couple articulaire max (N.mm)'
    """
    if colonne in settings.LABELS_PARAMETRES:
        return settings.LABELS_PARAMETRES[colonne]
    prefixe = ''
    nom = colonne
    if nom.startswith('score_'):
        prefixe = 'Score '
        nom = nom[len('score_'):]
    fp, _, metrique = nom.partition('_')
    if metrique in settings.METRIQUES:
        return f"{prefixe}{fp} - {settings.METRIQUES[metrique]['label']}"
    return colonne

# ==============================================================================
# FONCTION 1 : PAYSAGE MATPLOTLIB
# ==============================================================================

def _tracer_paysage(ax, table, colonne_score, axe_x, axe_y, titre=None):
    """Trace un paysage sur un axe existant et retourne le nuage (ou None si vide)."""
    cfg = settings.GRAPH_CONFIG
    ax.set_xlabel(libelle_colonne(axe_x))
    ax.set_ylabel(libelle_colonne(axe_y))
    ax.set_title(titre or libelle_colonne(colonne_score))
    ax.grid(True, linewidth=0.3, alpha=0.5)
    if table is None or len(table) == 0:
        return None

    scores = table[colonne_score].to_numpy(dtype=float)
    nuage = ax.scatter(
        table[axe_x].to_numpy(dtype=float),
        table[axe_y].to_numpy(dtype=float),
        c=np.nan_to_num(scores, nan=0.0),
        cmap=cfg['colormap'],
        vmin=0.0,
        vmax=100.0,
        s=cfg['taille_point'],
        linewidths=0
    )
    if 'pareto' in table.columns:
        front = table[table['pareto'].astype(bool)]
        if len(front):
            ax.scatter(
                front[axe_x].to_numpy(dtype=float),
                front[axe_y].to_numpy(dtype=float),
                facecolors='none',
                edgecolors=cfg['couleur_pareto'],
                s=cfg['taille_point'] * 2.5,
                linewidths=1.0,
                label='Front de Pareto'
            )
            ax.legend(loc='best', fontsize=settings.GRAPH_CONFIG['font_size'] - 2)
    return nuage


def creer_paysage(table, colonne_score, axe_x='d2', axe_y='d3', titre=None):
    """
    Crée un paysage de scores.

    Args:
        table (pd.DataFrame): Table des scores (ou None / vide : axes seuls)
        colonne_score (str): Colonne de couleur (ex: 'score_carve_amplitude')
        axe_x (str): Colonne en abscisse
        axe_y (str): Colonne en ordonnée
        titre (str, optional): Titre

    Returns:
        matplotlib.figure.Figure: Figure avec barre de couleur 0-100
    """
    with plt.rc_context(_style()):
        fig, ax = plt.subplots(figsize=settings.GRAPH_CONFIG['taille_figure'])
        nuage = _tracer_paysage(ax, table, colonne_score, axe_x, axe_y, titre)
        if nuage is None:
            nuage = plt.cm.ScalarMappable(
                norm=matplotlib.colors.Normalize(0.0, 100.0),
                cmap=settings.GRAPH_CONFIG['colormap']
            )
        fig.colorbar(nuage, ax=ax, label='Score')
        fig.tight_layout()
    return fig


def creer_grille_paysages(table, axe_x='d2', axe_y='d3'):
    """
    Grille 3 x 3 : lignes = FP (carve, poke, press), colonnes = métriques.

    Returns:
        matplotlib.figure.Figure
    """
    metriques = list(settings.METRIQUES)
    with plt.rc_context(_style()):
        fig, axes = plt.subplots(
            len(settings.ORDRE_FP), len(metriques),
            figsize=settings.GRAPH_CONFIG['taille_grille'],
            squeeze=False
        )
        for i, fp in enumerate(settings.ORDRE_FP):
            for j, metrique in enumerate(metriques):
                colonne = f"score_{fp}_{metrique}"
                titre = f"{fp} - {metrique}"
                _tracer_paysage(axes[i, j], table, colonne, axe_x, axe_y, titre)
        echelle = plt.cm.ScalarMappable(
            norm=matplotlib.colors.Normalize(0.0, 100.0),
            cmap=settings.GRAPH_CONFIG['colormap']
        )
        fig.colorbar(echelle, ax=axes.ravel().tolist(), label='Score', shrink=0.6)
    return fig


def creer_courbe_seuil(courbe):
    """
    Courbes « fraction de candidats dont l'amplitude dépasse le seuil ».

    Args:
        courbe (pd.DataFrame): Sortie de evaluate.courbe_seuil()

    Returns:
        matplotlib.figure.Figure
    """
    with plt.rc_context(_style()):
        fig, ax = plt.subplots(figsize=settings.GRAPH_CONFIG['taille_figure'])
        ax.plot(courbe['seuil'], 100.0 * courbe['global'], 'k-', linewidth=1.5, label='Toutes les FP')
        for fp in settings.ORDRE_FP:
            ax.plot(courbe['seuil'], 100.0 * courbe[fp], 'o-', markersize=3,
                    color=settings.get_color(fp), label=fp)
        ax.set_xlabel("Seuil d'amplitude (rad)")
        ax.set_ylabel('Candidats au-delà du seuil (%)')
        ax.set_ylim(0.0, 105.0)
        ax.grid(True, linewidth=0.3, alpha=0.5)
        ax.legend(loc='best')
        fig.tight_layout()
    return fig


def figure_vers_svg(fig):
    """
    Sérialise une figure en SVG (octets) sans date ni identifiant aléatoire.

    Example:
        >>> figure_vers_svg(creer_paysage(None, 'score_carve_amplitude'))[:5]
        b'<?xml'
    """
    tampon = io.BytesIO()
    with plt.rc_context(_style()):
        fig.savefig(tampon, format='svg', metadata={'Date': None})
    plt.close(fig)
    return tampon.getvalue()

# ==============================================================================
# FONCTION 2 : PAYSAGE INTERACTIF PLOTLY
# ==============================================================================

def _trace_plotly(table, colonne_score, axe_x, axe_y, barre=True):
    texte = [
        f"Candidat {int(c)}<br>{axe_x} = {x:.4g}<br>{axe_y} = {y:.4g}<br>Score = {s:.1f}"
        for c, x, y, s in zip(table['candidat'], table[axe_x], table[axe_y], table[colonne_score])
    ]
    return go.Scatter(
        x=table[axe_x],
        y=table[axe_y],
        mode='markers',
        text=texte,
        hovertemplate='%{text}<extra></extra>',
        marker=dict(
            color=table[colonne_score].fillna(0.0),
            colorscale=settings.GRAPH_CONFIG['colormap'].capitalize(),
            cmin=0.0,
            cmax=100.0,
            size=7,
            showscale=barre,
            line=dict(
                width=[1.5 if p else 0.0 for p in table.get('pareto', [False] * len(table))],
                color=settings.GRAPH_CONFIG['couleur_pareto']
            )
        ),
        showlegend=False
    )


def creer_paysage_interactif(table, colonne_score=None, axe_x='d2', axe_y='d3', toutes=False):
    """
    Paysage interactif : un seul score, ou la grille 3 x 3 si `toutes`.

    Returns:
        plotly.graph_objects.Figure
    """
    if not toutes:
        fig = go.Figure(data=[_trace_plotly(table, colonne_score, axe_x, axe_y)])
        fig.update_layout(
            title=libelle_colonne(colonne_score),
            xaxis_title=libelle_colonne(axe_x),
            yaxis_title=libelle_colonne(axe_y)
        )
    else:
        metriques = list(settings.METRIQUES)
        fig = make_subplots(
            rows=len(settings.ORDRE_FP), cols=len(metriques),
            subplot_titles=[f"{fp} - {m}" for fp in settings.ORDRE_FP for m in metriques]
        )
        for i, fp in enumerate(settings.ORDRE_FP):
            for j, m in enumerate(metriques):
                trace = _trace_plotly(table, f"score_{fp}_{m}", axe_x, axe_y, barre=(i == 0 and j == 0))
                fig.add_trace(trace, row=i + 1, col=j + 1)

    fig.update_layout(
        template=settings.PLOTLY_TEMPLATE,
        font=dict(family=settings.GRAPH_CONFIG['font_family'], size=settings.GRAPH_CONFIG['font_size']),
        title_font_size=settings.GRAPH_CONFIG['title_font_size'],
        height=900 if toutes else 550
    )
    return fig


def figure_vers_html(fig):
    """HTML autonome (plotly.js depuis le CDN), identifiant de div fixe."""
    return fig.to_html(include_plotlyjs='cdn', full_html=True, div_id='paysage').encode('utf-8')
