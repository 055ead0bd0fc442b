import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from multimarket.errors import DegenerateDenominator
from multimarket.lp import (
    GE,
    INFEASIBLE,
    LE,
    OPTIMAL,
    UNBOUNDED,
    lp,
    solve_fractional,
    solve_lp,
)


def test_bounded_maximum():
    out = solve_lp(lp("max", [1], [([1], LE, 3)]))
    assert out.status == OPTIMAL
    assert out.value == 3
    assert out.x == (F(3),)


def test_unbounded_with_ray():
    out = solve_lp(lp("max", [1], []))
    assert out.status == UNBOUNDED
    assert out.ray == (F(1),)


def test_infeasible_with_farkas():
    out = solve_lp(lp("min", [0], [([1], LE, -1)]))
    assert out.status == INFEASIBLE
    assert out.farkas is not None  # verified internally before return


def test_equality_and_free_variables():
    out = solve_lp(
        lp(
            "min",
            [1, 1],
            [([1, 2], "==", 4), ([1, -1], GE, 0)],
            bounds=[(None, None), (0, None)],
        )
    )
    assert out.status == OPTIMAL
    assert out.value == F(8, 3)


def test_mirrored_upper_bound_variable():
    out = solve_lp(lp("max", [1, 1], [([1, 1], LE, 10)], bounds=[(None, 4), (0, None)]))
    assert out.status == OPTIMAL
    assert out.value == 10


def test_degenerate_rows_handled():
    # duplicated equality rows force a redundant artificial
    out = solve_lp(
        lp("min", [1], [([1], "==", 2), ([1], "==", 2), ([2], "==", 4)])
    )
    assert out.status == OPTIMAL
    assert out.x == (F(2),)


@given(st.integers(0, 5000))
def test_strong_duality_on_random_programs(seed):
    rng = random.Random(seed)
    nvars = rng.randint(1, 4)
    nrows = rng.randint(1, 4)
    rows = []
    for _ in range(nrows):
        coeffs = [F(rng.randint(-4, 4)) for _ in range(nvars)]
        rel = rng.choice([LE, GE, "=="])
        rows.append((coeffs, rel, F(rng.randint(-6, 6))))
    objective = [F(rng.randint(-4, 4)) for _ in range(nvars)]
    bounds = [rng.choice([(0, None), (None, None)]) for _ in range(nvars)]
    out = solve_lp(lp("min", objective, rows, bounds))
    if out.status == OPTIMAL:
        # primal value equals the dual bound assembled from row multipliers:
        # verified internally; spot-check complementary slackness here
        for (coeffs, rel, rhs), dual in zip(rows, out.row_duals):
            slack = sum(c * v for c, v in zip(coeffs, out.x)) - rhs
            if rel != "==":
                assert slack * dual == 0
    elif out.status == INFEASIBLE:
        assert out.farkas is not None
    else:
        assert out.ray is not None


def test_row_duals_price_the_rhs():
    out = solve_lp(lp("min", [3, 2], [([1, 1], GE, 4), ([1, 3], GE, 6)]))
    assert out.status == OPTIMAL
    assert out.value == sum(d * r for d, r in zip(out.row_duals, (4, 6)))


def test_fractional_identical_functionals_give_one():
    cone = [([F(1), F(-1)], "==", 0)]
    num = [F(1, 2), F(1, 2)]
    out = solve_fractional(num, num, cone)
    assert out.value == 1


def test_fractional_m2_cross_price(m2):
    from multimarket.arbitrage import deflator_cone_rows

    tree = m2.tree
    probs = [tree.atom_probs[a] for a in tree.leaves]
    h = [F(6), F(3)]
    ratio2 = [F(6, 5), F(1)]
    out = solve_fractional(
        [p * v for p, v in zip(probs, h)],
        [p * v for p, v in zip(probs, ratio2)],
        deflator_cone_rows(m2),
    )
    assert out.value == F(15, 4)


def test_fractional_complete_market_risk_neutral_price():
    # single binary-market cone: 2 X_u = X_d, so E[XH]/E[X 1] is the unique
    # risk-neutral expectation of H
    cone = [([F(1, 2) * F(2), F(1, 2) * F(-1)], "==", 0)]
    h = [F(6), F(3)]
    num = [F(1, 2) * h[0], F(1, 2) * h[1]]
    den = [F(1, 2), F(1, 2)]
    out = solve_fractional(num, den, cone)
    assert out.value == F(1, 3) * 6 + F(2, 3) * 3 == F(4)


@given(st.integers(1, 40))
def test_fractional_positively_homogeneous(c):
    cone = [([F(1), F(-2)], "==", 0)]
    num = [F(3, 4), F(1, 8)]
    den = [F(1, 2), F(1, 2)]
    base = solve_fractional(num, den, cone).value
    scaled = solve_fractional([F(c) * v for v in num], den, cone).value
    assert scaled == F(c) * base


def test_degenerate_denominator():
    cone = [([F(1), F(0)], "==", 0), ([F(0), F(1)], "==", 0)]
    with pytest.raises(DegenerateDenominator):
        solve_fractional([F(1), F(1)], [F(1), F(1)], cone)


def test_float_mode_matches_exact_on_small_lp():
    rows = [([1.0, 2.0], LE, 7.0), ([3.0, 1.0], LE, 9.0)]
    out = solve_lp(lp("max", [2.0, 3.0], rows), exact=False)
    exact = solve_lp(lp("max", [F(2), F(3)], [([F(1), F(2)], LE, F(7)), ([F(3), F(1)], LE, F(9))]))
    assert out.status == exact.status == OPTIMAL
    assert abs(out.value - float(exact.value)) < 1e-9


def test_float_and_exact_modes_agree_on_random_programs():
    for seed in range(400):
        rng = random.Random(seed)
        nvars = rng.randint(1, 3)
        nrows = rng.randint(1, 4)
        rows = [
            (
                [rng.randint(-4, 4) for _ in range(nvars)],
                rng.choice([LE, GE, "=="]),
                rng.randint(-6, 6),
            )
            for _ in range(nrows)
        ]
        objective = [rng.randint(-4, 4) for _ in range(nvars)]
        bounds = [rng.choice([(0, None), (None, None)]) for _ in range(nvars)]
        exact = solve_lp(lp("min", [F(c) for c in objective],
                            [([F(v) for v in r], rel, F(b)) for r, rel, b in rows], bounds))
        approx = solve_lp(lp("min", [float(c) for c in objective],
                             [([float(v) for v in r], rel, float(b)) for r, rel, b in rows],
                             bounds), exact=False)
        assert approx.status == exact.status, seed
        if exact.status == OPTIMAL:
            assert abs(approx.value - float(exact.value)) < 1e-7, seed
