import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from multimarket.arbitrage import check_global_nfl
from multimarket.errors import (
    CertificateViolation,
    ConditionNotMet,
    DimensionNotOne,
    GlobalArbitrage,
    SubmarketArbitrage,
    WrongShape,
)
from multimarket.gains import strategy_wealth
from multimarket.generate import random_claim, random_model
from multimarket.market import Submarket, make_model, scale_submarket
from multimarket.pricing import (
    basis_swap_price,
    dual_bounds_global,
    dual_certificate_global,
    fractional_reciprocal,
    one_dim_identity_suite,
    price_constant_ratio,
    price_fractional,
    price_global,
    price_lower,
    price_submarket,
    price_upper,
    terminal_asset_claim,
    two_market_report,
)


def test_submarket_prices_m2(m2):
    h = terminal_asset_claim(m2, "tau1")
    assert price_submarket(m2, h, "tau1").price == F(4)
    report = price_submarket(m2, h, "tau2")
    assert report.price == F(15, 4)
    assert report.duality_gap == 0
    assert report.dual_witness.values == {"r.0": F(3, 8), "r.1": F(5, 8)}


def test_zero_claim_prices_zero(m2):
    zero = {a: F(0) for a in m2.tree.leaves}
    assert price_submarket(m2, zero, "tau1").price == 0
    assert price_global(m2, zero).price == 0
    assert price_upper(m2, zero).price == 0


def test_lower_and_upper_m2(m2):
    h = terminal_asset_claim(m2, "tau1")
    lower = price_lower(m2, h)
    assert (lower.price, lower.selected_submarket) == (F(15, 4), "tau2")
    upper = price_upper(m2, h)
    assert (upper.price, upper.selected_submarket) == (F(4), "tau1")

    ratio2 = dict(m2.numeraire_ratio("tau2"))
    assert price_submarket(m2, ratio2, "tau1").price == F(16, 15)
    assert price_submarket(m2, ratio2, "tau2").price == F(1)
    assert price_lower(m2, ratio2).price == F(1)
    assert price_lower(m2, ratio2).selected_submarket == "tau2"


def test_single_submarket_lower_equals_submarket(m2):
    solo = make_model(m2.tree, [m2.submarket("tau1")])
    h = terminal_asset_claim(solo, "tau1")
    assert price_lower(solo, h).price == price_submarket(solo, h, "tau1").price


def test_global_price_m2(m2):
    h = terminal_asset_claim(m2, "tau1")
    report = price_global(m2, h)
    assert report.price == F(15, 4)
    assert dict(report.allocation) == {"tau1": F(0), "tau2": F(15, 4)}
    assert report.hedge.risky["tau1"]["r"] == (F(3, 4),)
    assert report.duality_gap == 0
    # hedge superreplicates with equality here
    assert strategy_wealth(m2, report.hedge) == dict(h)


def test_global_price_numeraire_claim(m2):
    ratio2 = dict(m2.numeraire_ratio("tau2"))
    report = price_global(m2, ratio2)
    assert report.price == F(1)
    assert dict(report.allocation) == {"tau1": F(0), "tau2": F(1)}
    scaled = {a: F(7, 2) * v for a, v in ratio2.items()}
    assert price_global(m2, scaled).price == F(7, 2)


def test_price_on_arbitrage_model_raises(m1):
    h = terminal_asset_claim(m1, "tau1")
    with pytest.raises(GlobalArbitrage):
        price_global(m1, h)
    rising = Submarket(
        "up",
        1,
        {"r": (F(2),), "r.0": (F(3),), "r.1": (F(5, 2),)},
        {n: F(1) for n in m1.tree.nodes},
    )
    bad = make_model(m1.tree, [rising])
    with pytest.raises(SubmarketArbitrage):
        price_submarket(bad, {"r.0": F(1), "r.1": F(1)}, "up")


def test_superreplication_attained_with_tight_atom(m2):
    rng = random.Random(1)
    for _ in range(5):
        h = random_claim(rng, m2)
        report = price_global(m2, h)
        wealth = strategy_wealth(m2, report.hedge)
        slacks = [wealth[a] - h[a] for a in m2.tree.leaves]
        assert all(s >= 0 for s in slacks)
        if report.price > 0:
            assert any(s == 0 for s in slacks)


def test_dual_certificate_m2(m2):
    h = terminal_asset_claim(m2, "tau1")
    allocation = {"tau1": F(0), "tau2": F(15, 4)}
    assert dual_certificate_global(m2, h, allocation, {"tau1": F(1)}) == 0
    assert dual_certificate_global(m2, h, allocation, {"tau1": F(1), "tau2": F(1)}) == 0
    zero = {a: F(0) for a in m2.tree.leaves}
    assert dual_certificate_global(m2, zero, {}, {"tau1": F(1)}) == 0
    over = {"tau1": F(1), "tau2": F(15, 4)}
    with pytest.raises(CertificateViolation) as err:
        dual_certificate_global(m2, h, over, {"tau1": F(1)})
    assert err.value.value < 0


def test_dual_bounds_m2(m2):
    ratio2 = dict(m2.numeraire_ratio("tau2"))
    lower, upper = dual_bounds_global(m2, ratio2)
    assert lower == F(1)
    assert upper == F(16, 15)

    solo = make_model(m2.tree, [m2.submarket("tau1")])
    h = terminal_asset_claim(solo, "tau1")
    lo, hi = dual_bounds_global(solo, h)
    assert lo == hi == price_global(solo, h).price


def test_price_fractional_and_reciprocal(m2):
    h = terminal_asset_claim(m2, "tau1")
    ratio2 = m2.numeraire_ratio("tau2")
    assert price_fractional(m2, h, ratio2) == F(15, 4)
    assert fractional_reciprocal(m2, h, ratio2) == F(15, 4)
    assert price_fractional(m2, dict(ratio2), ratio2) == 1


def test_one_dim_identity_suite_m2(m2):
    report = one_dim_identity_suite(m2, "tau1", "tau2")
    assert report.ok
    checks = report.checks
    assert checks["own_venue"].lhs == F(4)
    assert checks["cross_venue_sup"].lhs == F(15, 4)
    assert checks["swap_decomposition"].lhs == F(15, 4) - F(5)
    degenerate = one_dim_identity_suite(m2, "tau1", "tau1")
    assert degenerate.checks["swap_decomposition"].lhs == 0
    assert degenerate.ok


def test_identity_suite_requires_dimension_one(m2):
    wide = Submarket(
        "wide",
        2,
        {n: (F(1), F(2)) for n in m2.tree.nodes},
        {n: F(1) for n in m2.tree.nodes},
    )
    model = make_model(m2.tree, [m2.submarket("tau1"), wide])
    with pytest.raises(DimensionNotOne):
        one_dim_identity_suite(model, "tau1", "wide")


def test_identity_suite_zero_residual_on_random_complete_pairs():
    from multimarket.generate import random_complete_pair

    for seed in range(20):
        model = random_complete_pair(seed)
        report = one_dim_identity_suite(model, *model.labels)
        assert report.ok, (seed, report.residuals())
        flipped = one_dim_identity_suite(model, *reversed(model.labels))
        assert flipped.ok, (seed, flipped.residuals())


def test_identity_factorized_form_needs_a_pinned_venue():
    # hedging venue with a flat asset: its measure set is the whole simplex,
    # the LP price is the claim's maximum, and the factorized form undershoots
    from multimarket.tree import build_tree

    tree = build_tree([2], ["1/2", "1/2"])
    flat_venue = Submarket(
        "venue", 1, {n: (F(1),) for n in tree.nodes}, {n: F(1) for n in tree.nodes}
    )
    moving = Submarket(
        "asset",
        1,
        {"r": (F(1),), "r.0": (F(4),), "r.1": (F(1, 4),)},
        {"r": F(1), "r.0": F(2), "r.1": F(1, 2)},
    )
    model = make_model(tree, [moving, flat_venue])
    assert check_global_nfl(model).ok
    report = one_dim_identity_suite(model, "asset", "venue")
    assert price_submarket(model, terminal_asset_claim(model, "asset"), "venue").price == F(4)
    assert report.checks["cross_venue_sup"].rhs == F(2)
    assert not report.ok


def test_basis_swap_venues(m2):
    assert basis_swap_price(m2, "tau1", "tau2", "tau2").price == F(-5, 4)
    assert basis_swap_price(m2, "tau1", "tau2", "tau1").price == F(-4, 3)
    assert basis_swap_price(m2, "tau1", "tau2", "global").price == F(0)
    assert basis_swap_price(m2, "tau1", "tau1", "global").price == 0
    assert basis_swap_price(m2, "tau1", "tau1", "tau2").price == 0
    # decomposition: swap price plus own-asset price recovers the cross price
    swap = basis_swap_price(m2, "tau1", "tau2", "tau2").price
    own = price_submarket(m2, terminal_asset_claim(m2, "tau2"), "tau2").price
    cross = price_submarket(m2, terminal_asset_claim(m2, "tau1"), "tau2").price
    assert swap + own == cross


def test_constant_ratio_m2(m2):
    h = terminal_asset_claim(m2, "tau1")
    report = price_constant_ratio(m2, h, {"tau2": F(1)})
    assert report.price == F(15, 4)
    assert report.tau_max == "tau2"
    assert report.c_values == {"tau1": F(15, 16), "tau2": F(1)}
    assert dict(report.allocation) == {"tau2": F(15, 4)}
    assert report.lp_price == report.price


def test_constant_ratio_single_submarket(m2):
    solo = make_model(m2.tree, [m2.submarket("tau1")])
    h = terminal_asset_claim(solo, "tau1")
    report = price_constant_ratio(solo, h, {"tau1": F(1)})
    assert report.c_values == {"tau1": F(1)}
    assert report.price == price_submarket(solo, h, "tau1").price


def test_constant_ratio_condition_not_met():
    # incomplete market (3 atoms, 1 effective constraint): the measure set is
    # a segment, and a stochastic foreign growth ratio varies across it
    from multimarket.tree import build_tree

    tree = build_tree([3], ["1/3", "1/3", "1/3"])
    base = Submarket(
        "base",
        1,
        {"r": (F(2),), "r.0": (F(1),), "r.1": (F(2),), "r.2": (F(3),)},
        {n: F(1) for n in tree.nodes},
    )
    carry = Submarket(
        "carry",
        1,
        {"r": (F(1),), "r.0": (F(1),), "r.1": (F(3, 2),), "r.2": (F(1),)},
        {"r": F(1), "r.0": F(1), "r.1": F(3, 2), "r.2": F(1)},
    )
    model = make_model(tree, [base, carry])
    assert check_global_nfl(model).ok
    with pytest.raises(ConditionNotMet):
        price_constant_ratio(model, {"r.0": F(1), "r.1": F(1), "r.2": F(1)}, {"base": F(1)})


def test_constant_ratio_deterministic_numeraires_match_global():
    for seed in (0, 2, 4, 6):
        model = random_model(
            seed, arbitrage_free=True, submarkets=2, deterministic_numeraires=True
        )
        rng = random.Random(seed + 100)
        h = random_claim(rng, model)
        ratios = {lab: next(iter(model.numeraire_ratio(lab).values())) for lab in model.labels}
        tau_max = max(model.labels, key=lambda lab: ratios[lab])
        report = price_constant_ratio(model, h, {tau_max: F(1)})
        assert report.price == price_global(model, h).price
        assert set(report.allocation) == {report.tau_max}


def test_two_market_m2(m2):
    report = two_market_report(m2)
    assert not report.hypothesis_holds  # cross price 15/4 below the spot 5
    assert report.swap_formulas is None
    assert report.swap_lp_price == 0
    for check in report.min_formula.values():
        assert check.residual == 0
    assert report.p_cross["tau1"] == F(15, 4)


def test_two_market_symmetric_copy(m2):
    tau1 = m2.submarket("tau1")
    clone = Submarket("copy", 1, tau1.assets, tau1.numeraire)
    model = make_model(m2.tree, [tau1, clone])
    report = two_market_report(model)
    assert report.hypothesis_holds
    assert report.swap_lp_price == 0
    for check in report.min_formula.values():
        assert check.lhs == F(4)
        assert check.residual == 0
    for check in report.swap_formulas.values():
        assert check.residual == 0


def test_two_market_wrong_shape(m2):
    solo = make_model(m2.tree, [m2.submarket("tau1")])
    with pytest.raises(WrongShape):
        two_market_report(solo)


def test_two_market_random_closed_forms():
    hypothesis_hits = 0
    for seed in range(0, 60, 2):
        model = random_model(seed, arbitrage_free=True, submarkets=2, dims=[1, 1])
        report = two_market_report(model)
        for check in report.min_formula.values():
            assert check.residual == 0, seed
        if report.hypothesis_holds:
            hypothesis_hits += 1
            for check in report.swap_formulas.values():
                assert check.residual == 0, (seed, report)
    assert hypothesis_hits > 0


@given(st.integers(0, 30), st.fractions(min_value=0, max_value=9))
def test_positive_homogeneity(seed, scale):
    model = random_model(seed % 6, arbitrage_free=True)
    rng = random.Random(seed)
    h = random_claim(rng, model)
    scaled = {a: scale * v for a, v in h.items()}
    assert price_global(model, scaled).price == scale * price_global(model, h).price
    label = model.labels[0]
    assert (
        price_submarket(model, scaled, label).price
        == scale * price_submarket(model, h, label).price
    )


@given(st.integers(0, 30))
def test_monotonicity(seed):
    model = random_model(seed % 6, arbitrage_free=True)
    rng = random.Random(seed)
    h = random_claim(rng, model)
    bigger = {a: v + F(rng.randint(0, 5)) for a, v in h.items()}
    assert price_global(model, bigger).price >= price_global(model, h).price
    assert price_lower(model, bigger).price >= price_lower(model, h).price


def test_numeraire_scaling_invariance(m2):
    h = terminal_asset_claim(m2, "tau1")
    scaled = scale_submarket(scale_submarket(m2, "tau2", F(9, 2)), "tau1", F(3))
    h_scaled = {a: F(3) * v for a, v in h.items()}  # claim follows tau1's asset
    assert price_global(scaled, h_scaled).price == F(3) * price_global(m2, h).price
    assert (
        price_submarket(scaled, dict(h), "tau2").price
        == price_submarket(m2, dict(h), "tau2").price
    )


def test_ordering_on_random_models():
    for seed in range(0, 30):
        model = random_model(seed)
        if not check_global_nfl(model).ok:
            continue
        rng = random.Random(1000 + seed)
        for _ in range(2):
            h = random_claim(rng, model)
            joint = price_global(model, h).price
            lower = price_lower(model, h).price
            upper = price_upper(model, h).price
            assert joint <= lower <= upper
