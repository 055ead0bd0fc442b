import os
import sys
from fractions import Fraction as F

import hypothesis
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from multimarket.market import Submarket, make_model
from multimarket.tree import build_tree

hypothesis.settings.register_profile(
    "suite", max_examples=30, deadline=None, derandomize=True
)
hypothesis.settings.load_profile("suite")

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def desk_market_m2():
    """Two one-period submarkets, one stochastic numeraire; arbitrage free
    with a unique common deflator (2/3, 4/3)."""
    tree = build_tree([2], {"r.0": "1/2", "r.1": "1/2"})
    tau1 = Submarket(
        "tau1",
        1,
        {"r": (F(4),), "r.0": (F(6),), "r.1": (F(3),)},
        {"r": F(1), "r.0": F(1), "r.1": F(1)},
    )
    tau2 = Submarket(
        "tau2",
        1,
        {"r": (F(5),), "r.0": (F(36, 5),), "r.1": (F(22, 5),)},
        {"r": F(1), "r.0": F(6, 5), "r.1": F(1)},
    )
    return make_model(tree, [tau1, tau2])


def desk_market_m1():
    """M2 with the second submarket's down state lowered to 4: each submarket
    alone is clean but the pair admits a cross-market arbitrage."""
    tree = build_tree([2], {"r.0": "1/2", "r.1": "1/2"})
    tau1 = Submarket(
        "tau1",
        1,
        {"r": (F(4),), "r.0": (F(6),), "r.1": (F(3),)},
        {"r": F(1), "r.0": F(1), "r.1": F(1)},
    )
    tau2 = Submarket(
        "tau2",
        1,
        {"r": (F(5),), "r.0": (F(36, 5),), "r.1": (F(4),)},
        {"r": F(1), "r.0": F(6, 5), "r.1": F(1)},
    )
    return make_model(tree, [tau1, tau2])


@pytest.fixture
def m2():
    return desk_market_m2()


@pytest.fixture
def m1():
    return desk_market_m1()


@pytest.fixture
def m2_path():
    return os.path.join(FIXTURES, "m2.json")


@pytest.fixture
def m1_path():
    return os.path.join(FIXTURES, "m1.json")


@pytest.fixture
def cotrade_path():
    return os.path.join(FIXTURES, "cotrade.json")
