import json
import os
from fractions import Fraction as F

import pytest

from multimarket.errors import NonPositiveNumeraire, SchemaError, UnknownSubmarket
from multimarket.market import (
    Submarket,
    discounted_prices,
    load_market,
    scale_submarket,
    serialize_market,
    validate_model,
)
from multimarket.tree import build_tree


def test_load_m2_document(m2_path, m2):
    with open(m2_path) as fh:
        model = load_market(json.load(fh))
    assert model.labels == ("tau1", "tau2")
    assert model.exact
    assert model.tree.leaves == ("r.0", "r.1")
    assert model.submarket("tau2").assets["r.0"] == (F(36, 5),)
    assert model.submarket("tau2").numeraire["r.0"] == F(6, 5)
    assert model.claim("Stau1").payoff == {"r.0": F(6), "r.1": F(3)}


def test_zero_numeraire_rejected():
    doc = {
        "tree": {"branching": [2], "atom_probs": ["1/2", "1/2"]},
        "submarkets": [
            {
                "label": "tau1",
                "dim": 1,
                "numeraire": {"r": "1", "r.0": "0", "r.1": "1"},
                "assets": {"r": ["1"], "r.0": ["1"], "r.1": ["1"]},
            }
        ],
    }
    with pytest.raises(NonPositiveNumeraire):
        load_market(doc)


def test_single_submarket_classic_form():
    doc = {
        "tree": {"branching": [2], "atom_probs": ["1/2", "1/2"]},
        "submarkets": [
            {
                "label": "only",
                "dim": 1,
                "numeraire": {"r": "1", "r.0": "1", "r.1": "1"},
                "assets": {"r": ["2"], "r.0": ["3"], "r.1": ["1"]},
            }
        ],
    }
    model = load_market(doc)
    assert model.labels == ("only",)
    assert model.numeraire_ratio("only") == {"r.0": F(1), "r.1": F(1)}


def test_discounted_prices(m2):
    tilde = discounted_prices(m2, "tau2")
    assert tilde["r"] == (F(5),)
    assert tilde["r.0"] == (F(6),)
    assert tilde["r.1"] == (F(22, 5),)
    assert discounted_prices(m2, "tau1")["r.0"] == (F(6),)
    with pytest.raises(UnknownSubmarket):
        discounted_prices(m2, "tau9")


def test_discounted_times_numeraire_recovers_assets(m2):
    for sub in m2.submarkets:
        tilde = discounted_prices(m2, sub.label)
        for node_id in m2.tree.nodes:
            rebuilt = tuple(v * sub.numeraire[node_id] for v in tilde[node_id])
            assert rebuilt == sub.assets[node_id]


def test_validate_reports_bound(m2):
    report = validate_model(m2)
    assert report.ok
    assert report.bound == F(6)


def test_declared_bound_constant_is_checked(m2):
    from dataclasses import replace

    roomy = replace(m2, bound_constant=F(6))
    assert validate_model(roomy).ok
    tight = replace(m2, bound_constant=F(5))
    report = validate_model(tight)
    assert not report.ok
    assert any(i.code == "BoundExceeded" for i in report.issues)


def test_validate_flags_negative_numeraire():
    tree = build_tree([2], ["1/2", "1/2"])
    bad = Submarket(
        "bad",
        1,
        {n: (F(1),) for n in tree.nodes},
        {"r": F(1), "r.0": F(-1), "r.1": F(1)},
    )
    from multimarket.market import MarketModel

    model = MarketModel(tree=tree, submarkets=(bad,), exact=True)
    report = validate_model(model)
    assert not report.ok
    assert any(
        i.code == "NonPositiveNumeraire" and "r.0" in i.where for i in report.issues
    )


def test_validate_empty_market():
    tree = build_tree([2], ["1/2", "1/2"])
    from multimarket.market import MarketModel

    report = validate_model(MarketModel(tree=tree, submarkets=(), exact=True))
    assert not report.ok


def test_document_round_trip(m2_path):
    with open(m2_path) as fh:
        model = load_market(json.load(fh))
    doc = serialize_market(model)
    again = load_market(doc)
    assert serialize_market(again) == doc
    assert again.labels == model.labels
    for sub, sub2 in zip(model.submarkets, again.submarkets):
        assert sub == sub2
    assert again.tree.atom_probs == model.tree.atom_probs


def test_missing_sections_schema_errors():
    with pytest.raises(SchemaError):
        load_market({"submarkets": []})
    with pytest.raises(SchemaError):
        load_market({"tree": {"branching": [2], "atom_probs": ["1/2", "1/2"]}})


def test_scale_submarket_positive_only(m2):
    scaled = scale_submarket(m2, "tau2", F(7))
    assert scaled.submarket("tau2").numeraire["r.0"] == F(42, 5)
    assert scaled.submarket("tau1") == m2.submarket("tau1")
    with pytest.raises(NonPositiveNumeraire):
        scale_submarket(m2, "tau2", F(0))


def test_float_mode_inference():
    doc = {
        "tree": {"branching": [2], "atom_probs": [0.5, 0.5]},
        "submarkets": [
            {
                "label": "only",
                "dim": 1,
                "numeraire": {"r": 1.0, "r.0": 1.0, "r.1": 1.0},
                "assets": {"r": [2.0], "r.0": [3.0], "r.1": [1.0]},
            }
        ],
    }
    model = load_market(doc)
    assert not model.exact
    assert isinstance(model.submarket("only").assets["r"][0], float)
