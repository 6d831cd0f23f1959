"""
==============================================================================
TESTS - PIPELINE, PERSISTANCE ET LIGNE DE COMMANDE
==============================================================================
Helpers de formatage, fichiers JSONL (lignes corrompues, reprise),
configuration JSON, enchaînement plan -> evaluate -> landscape avec une
planification simulée, déterminisme des SVG et codes de sortie.

Date: Octobre 2026
Version: 1.0
==============================================================================
"""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

import app
from config import charger_config_pipeline, hash_config
from config.settings import ErreurConfigurationFichier
from core import ErreurConfiguration
from core.planner import PasTrajectoire, PathRecord
from core.sampler import CandidateRecord
from utils import pipeline
from utils.data_loader import (
    charger_candidats,
    charger_chemins,
    charger_etats_initiaux,
    chemins_complets,
    ecrire_candidats,
    ecrire_etats_initiaux,
    entete,
    lire_jsonl,
    lire_manifeste,
)
from utils.helpers import (
    formater_duree,
    formater_nombre,
    formater_pourcentage,
    generer_nom_fichier,
    nom_fichier_chemins,
    valider_colonnes,
)

EXEMPLE_CONFIG = Path(__file__).parent.parent / 'config' / 'exemple_config.json'


# ==============================================================================
# HELPERS
# ==============================================================================

def test_formatage_nombres():
    assert formater_nombre(78511) == '78 511'
    assert formater_nombre(1500.5, decimales=2) == '1 500,50'
    assert formater_nombre(float('nan')) == '0'


def test_formatage_pourcentage_et_duree():
    assert formater_pourcentage(0.685) == '68,50 %'
    assert formater_pourcentage(None) == 'n/d'
    assert formater_duree(3725) == '1 h 02 min 05 s'
    assert formater_duree(12.4) == '12 s'


def test_noms_de_fichiers():
    assert generer_nom_fichier('scores') == 'scores.csv'
    assert nom_fichier_chemins(12) == 'chemins_candidat_000012.jsonl'


def test_valider_colonnes():
    assert valider_colonnes(pd.DataFrame(columns=['d2', 'd3']), ['d2', 'd9']) == ['d9']


# ==============================================================================
# CONFIGURATION
# ==============================================================================

def test_configuration_exemple():
    config = charger_config_pipeline(EXEMPLE_CONFIG)
    assert config.echantillonnage['mode'] == '2d'
    assert config.planification['regularisation'] == pytest.approx(1e-6)


def test_configuration_cle_inconnue(tmp_path):
    chemin = tmp_path / 'config.json'
    chemin.write_text(json.dumps({'echantillonnage': {'pas_inconnu': 1}}), encoding='utf-8')
    with pytest.raises(ErreurConfigurationFichier):
        charger_config_pipeline(chemin)


def test_configuration_invariant_viole(tmp_path):
    chemin = tmp_path / 'config.json'
    chemin.write_text(json.dumps({'echantillonnage': {'distance_min': 0.5}}), encoding='utf-8')
    with pytest.raises(ErreurConfigurationFichier):
        charger_config_pipeline(chemin)


def test_hash_configuration_stable():
    assert hash_config(charger_config_pipeline()) == hash_config(charger_config_pipeline())


# ==============================================================================
# PERSISTANCE
# ==============================================================================

def test_jsonl_lignes_corrompues(tmp_path):
    chemin = tmp_path / 'f.jsonl'
    chemin.write_text('{"a": 1}\n{"a": \n[1, 2]\n\n{"b": 2}\n', encoding='utf-8')
    enregistrements, erreurs = lire_jsonl(chemin)
    assert enregistrements == [{'a': 1}, {'b': 2}]
    assert [e['ligne'] for e in erreurs] == [2, 3]


def test_jsonl_absent(tmp_path):
    with pytest.raises(FileNotFoundError):
        lire_jsonl(tmp_path / 'absent.jsonl')


def test_etats_initiaux(tmp_path, conception, etat_carve):
    chemin = tmp_path / 'etats.json'
    ecrire_etats_initiaux(chemin, conception, {'carve': etat_carve})
    d, etats = charger_etats_initiaux(chemin)
    np.testing.assert_allclose(d.vecteur(), conception.vecteur())
    np.testing.assert_allclose(etats['carve'].vecteur(), etat_carve.vecteur())


def test_etats_initiaux_illisibles(tmp_path):
    chemin = tmp_path / 'etats.json'
    chemin.write_text('{"conception": ', encoding='utf-8')
    with pytest.raises(ErreurConfiguration):
        charger_etats_initiaux(chemin)
    with pytest.raises(ErreurConfiguration):
        charger_etats_initiaux(tmp_path / 'absent.json')


# ==============================================================================
# ENCHAÎNEMENT AVEC PLANIFICATION SIMULÉE
# ==============================================================================

def _chemins_simules(candidat, ctx, cfg=None):
    """Six trajectoires dont l'amplitude croît avec l'indice du candidat."""
    chemins = []
    for nom in ctx.fps:
        etat = candidat.etats[nom]
        for direction in (1, -1):
            fin = direction * 0.1 * (candidat.indice + 1)
            pas = [PasTrajectoire(0.0, etat, True, forces=np.zeros((etat.n, 3)),
                                  glissements=np.full(etat.n, 0.01 * candidat.indice)),
                   PasTrajectoire(fin, etat, True)]
            chemins.append(PathRecord(candidat.indice, nom, direction, pas, 'max_steps'))
    return chemins


@pytest.fixture
def fichier_candidats(tmp_path, conception, etat_carve):
    config = charger_config_pipeline()
    candidats = []
    for i, d2 in enumerate([55.0, 60.0, 65.0]):
        d = type(conception)(45.0, d2, 25.0, 7.0, 0.0, 0.9)
        candidats.append(CandidateRecord(i, d, {nom: etat_carve for nom in config.fp}, i - 1, i, {'carve': -0.5}))
    chemin = tmp_path / 'candidats.jsonl'
    ecrire_candidats(chemin, entete(config, hash_config(config), '2d'), candidats)
    return chemin


@pytest.fixture
def planification_simulee(monkeypatch):
    appels = []

    def plan_all(candidat, ctx, cfg=None):
        appels.append(candidat.indice)
        return _chemins_simules(candidat, ctx, cfg)

    monkeypatch.setattr(pipeline, 'plan_all', plan_all)
    return appels


def test_candidats_relus(fichier_candidats):
    tete, candidats, erreurs = charger_candidats(fichier_candidats)
    assert tete['type'] == 'entete' and tete['mode'] == '2d'
    assert [c.indice for c in candidats] == [0, 1, 2]
    assert candidats[0].parent == -1
    assert np.isnan(candidats[1].couts.get('poke', np.nan))
    assert not erreurs


def test_candidats_ligne_corrompue(fichier_candidats):
    with open(fichier_candidats, 'a', encoding='utf-8') as f:
        f.write('{"type": "candidat", "indice": 9\n')
    _, candidats, erreurs = charger_candidats(fichier_candidats)
    assert len(candidats) == 3
    assert len(erreurs) == 1


def test_plan_puis_reprise(tmp_path, fichier_candidats, planification_simulee):
    dossier = tmp_path / 'chemins'
    manifeste = pipeline.cmd_plan(str(fichier_candidats), str(dossier), nb_workers=1)
    assert manifeste['nb_planifies'] == 3
    assert planification_simulee == [0, 1, 2]
    chemins, erreurs = charger_chemins(dossier / nom_fichier_chemins(1))
    assert not erreurs and chemins_complets(chemins)
    assert lire_manifeste(dossier)['commande'] == 'plan'

    (dossier / nom_fichier_chemins(2)).unlink()
    manifeste = pipeline.cmd_plan(str(fichier_candidats), str(dossier), nb_workers=1, reprise=True)
    assert manifeste['nb_repris'] == 2
    assert planification_simulee[3:] == [2]


def test_evaluation_et_paysages(tmp_path, fichier_candidats, planification_simulee):
    dossier = tmp_path / 'chemins'
    pipeline.cmd_plan(str(fichier_candidats), str(dossier), nb_workers=1)
    (dossier / nom_fichier_chemins(0)).unlink()

    csv = tmp_path / 'scores.csv'
    table, synthese = pipeline.cmd_evaluate(str(fichier_candidats), str(dossier), str(csv), nb_workers=1, excel=True)
    assert table['complet'].tolist() == [False, True, True]
    assert table.loc[2, 'carve_amplitude'] == pytest.approx(0.6)
    assert table.loc[2, 'score_carve_amplitude'] == pytest.approx(100.0)
    assert table.loc[2, 'score_carve_glissement'] == pytest.approx(0.0)
    assert table['pareto'].tolist() == [False, True, True]
    assert synthese['nb_complets'] == 2
    assert csv.with_suffix('.xlsx').exists()

    resume_json = json.loads(csv.with_name('scores_resume.json').read_text(encoding='utf-8'))
    assert resume_json['nb_candidats'] == 3
    assert resume_json['couverture'] == pytest.approx(synthese['couverture'], abs=1e-12)

    relue = pd.read_csv(csv)
    assert relue.columns.tolist() == table.columns.tolist()

    svg1 = pipeline.cmd_landscape(str(csv), str(tmp_path / 'a.svg'), 'poke', 'couple')
    svg2 = pipeline.cmd_landscape(str(csv), str(tmp_path / 'b.svg'), 'poke', 'couple')
    assert svg1.read_bytes() == svg2.read_bytes()
    assert svg1.read_bytes().startswith(b'<?xml')

    grille = pipeline.cmd_landscape(str(csv), str(tmp_path / 'g.svg'), toutes=True, html=True)
    assert grille.with_suffix('.html').exists()
    seuils = pipeline.cmd_landscape(str(csv), str(tmp_path / 's.svg'), seuils=True)
    assert seuils.exists()


def test_paysage_csv_vide(tmp_path):
    csv = tmp_path / 'vide.csv'
    csv.write_text('', encoding='utf-8')
    svg = pipeline.cmd_landscape(str(csv), str(tmp_path / 'vide.svg'))
    assert svg.read_bytes().startswith(b'<?xml')


def test_paysage_colonne_inconnue(tmp_path):
    csv = tmp_path / 'scores.csv'
    pd.DataFrame({'d2': [1.0], 'd3': [2.0]}).to_csv(csv, index=False)
    with pytest.raises(pipeline.ErreurEntree):
        pipeline.cmd_landscape(str(csv), str(tmp_path / 'p.svg'), axes=('d2', 'd9'))


def test_executer_par_lots_ordonne():
    assert list(pipeline.executer_par_lots(abs, [-3, 1, -2], 1)) == [3, 1, 2]


# ==============================================================================
# LIGNE DE COMMANDE
# ==============================================================================

def test_cli_paysage_vide(tmp_path):
    csv = tmp_path / 'vide.csv'
    csv.write_text('', encoding='utf-8')
    code = app.main(['landscape', '--csv', str(csv), '--out', str(tmp_path / 'p.svg'), '--fp', 'poke'])
    assert code == app.CODE_SUCCES


def test_cli_colonne_inconnue(tmp_path):
    csv = tmp_path / 'scores.csv'
    pd.DataFrame({'d2': [1.0], 'd3': [2.0]}).to_csv(csv, index=False)
    code = app.main(['landscape', '--csv', str(csv), '--out', str(tmp_path / 'p.svg'), '--axes', 'd2', 'd9'])
    assert code == app.CODE_ERREUR_UTILISATEUR


def test_cli_csv_absent(tmp_path):
    code = app.main(['landscape', '--csv', str(tmp_path / 'absent.csv'), '--out', str(tmp_path / 'p.svg')])
    assert code == app.CODE_ERREUR_UTILISATEUR


def test_cli_configuration_invalide(tmp_path):
    chemin = tmp_path / 'config.json'
    chemin.write_text(json.dumps({'inconnue': 1}), encoding='utf-8')
    code = app.main(['validate-seed', '--config', str(chemin), '--out', str(tmp_path)])
    assert code == app.CODE_ERREUR_UTILISATEUR


def test_cli_graine_invariant_viole(tmp_path):
    """Graine dans les bornes mais demi-largeur de paume <= rayon de doigt."""
    chemin = tmp_path / 'config.json'
    chemin.write_text(json.dumps({
        'bornes': {'d_min': [30.0, 40.0, 5.0, 5.0, -0.6, 0.3], 'd_max': [70.0, 110.0, 45.0, 12.0, 0.6, 1.5]},
        'conception_initiale': [45.0, 55.0, 6.0, 7.0, 0.0, 0.9]
    }), encoding='utf-8')
    config = charger_config_pipeline(chemin)
    with pytest.raises(ErreurConfiguration):
        pipeline._graine(config, None)
    code = app.main(['validate-seed', '--config', str(chemin), '--out', str(tmp_path)])
    assert code == app.CODE_ERREUR_UTILISATEUR


def test_cli_erreur_interne(tmp_path, monkeypatch):
    def echec(*args, **kwargs):
        raise RuntimeError('panne')

    monkeypatch.setattr(pipeline, 'cmd_landscape', echec)
    code = app.main(['landscape', '--csv', 'x.csv', '--out', str(tmp_path / 'p.svg')])
    assert code == app.CODE_ERREUR_INTERNE


def test_cli_sous_commande_obligatoire():
    with pytest.raises(SystemExit):
        app.main([])
