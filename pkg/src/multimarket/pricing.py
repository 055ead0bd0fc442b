"""Superreplication prices across hedging venues, with duality certificates.

Four prices coexist because hedging can use one submarket, the cheapest
submarket, every submarket separately, or all submarkets jointly with the
initial wealth split between them (and no borrowing across the split).
Every price is computed twice: a primal hedging LP and an independent dual
program over the matching weighted measure set, with the gap asserted zero
(exactly in rational mode).  Closed-form identities for one-dimensional
submarkets, constant growth ratios, and the two-submarket case are evaluated
against the LPs rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .arbitrage import (
    GLOBAL,
    MeasureSelector,
    check_global_nfl,
    check_submarket_nfl,
    deflator_cone_rows,
    scope_basis,
)
from .errors import (
    CertificateViolation,
    ConditionNotMet,
    DimensionNotOne,
    GlobalArbitrage,
    NonPositiveWeight,
    SubmarketArbitrage,
    WrongShape,
)
from .gains import (
    SimpleStrategy,
    complete_self_financing,
    strategy_from_coefficients,
)
from .lp import EQ, GE, LE, OPTIMAL, lp, solve_fractional, solve_lp
from .market import Claim, MarketModel
from .numbers import Num

VENUE_GLOBAL = "global"
VENUE_LOWER = "lower"
VENUE_UPPER = "upper"


@dataclass(frozen=True)
class DualWitness:
    kind: str  # "measure" over atoms, or "cone" element (deflator direction)
    values: Mapping[str, Num]
    boundary: bool


@dataclass(frozen=True)
class PriceReport:
    venue: str
    status: str  # "optimal" | "infeasible"
    price: Num | None
    allocation: Mapping[str, Num]
    hedge: SimpleStrategy | None
    dual_value: Num | None
    dual_witness: DualWitness | None
    duality_gap: Num | None
    selected_submarket: str | None = None


def _payoff_vector(model: MarketModel, claim) -> list[Num]:
    if isinstance(claim, Claim):
        claim = claim.payoff
    return [claim[a] for a in model.tree.leaves]


def terminal_asset_claim(model: MarketModel, label: str, asset: int = 0) -> dict[str, Num]:
    """The claim paying the submarket asset's terminal value."""
    sub = model.submarket(label)
    if asset >= sub.dim:
        raise WrongShape(f"submarket {label!r} has no asset {asset}")
    return {a: sub.assets[a][asset] for a in model.tree.leaves}


def _gap(primal: Num, dual: Num, exact: bool) -> Num:
    gap = primal - dual
    if exact:
        assert gap == 0, f"duality gap {gap}"
    else:
        assert abs(gap) <= 1e-7 * (1 + abs(primal)), f"duality gap {gap}"
    return gap


def _measure_witness(model, selector_weight, cone_x) -> DualWitness:
    """Map a normalized deflator-cone witness to its measure q = P X Z."""
    tree = model.tree
    values = {
        a: tree.atom_probs[a] * cone_x[k] * selector_weight[a]
        for k, a in enumerate(tree.leaves)
    }
    total = sum(values.values())
    if total != 0:
        values = {a: v / total for a, v in values.items()}
    boundary = any(v == 0 for v in values.values()) if model.exact else any(
        abs(v) <= 1e-12 for v in values.values()
    )
    return DualWitness(kind="measure", values=values, boundary=boundary)


def _require_submarket_nfl(model, label):
    result = check_submarket_nfl(model, label)
    if not result.ok:
        raise SubmarketArbitrage(result.witness, f"submarket {label!r} admits arbitrage")
    return result.certificate


def _require_global_nfl(model):
    result = check_global_nfl(model)
    if not result.ok:
        raise GlobalArbitrage(result.witness, "global market admits arbitrage")
    return result.certificate


def price_submarket(model: MarketModel, claim, label: str) -> PriceReport:
    """Classical superreplication price hedging only inside one submarket.

    Primal: minimal initial capital x (of either sign) such that x units of
    numeraire growth plus some zero-cost gain dominates the claim atom-wise.
    Dual: the weighted measure set of the submarket's own growth; the gap is
    asserted zero.
    """
    _require_submarket_nfl(model, label)
    h = _payoff_vector(model, claim)
    tree = model.tree
    basis = scope_basis(model, label)
    ratio = model.numeraire_ratio(label)
    nb = len(basis)
    rows = []
    for k, atom in enumerate(tree.leaves):
        coeffs = [ratio[atom]] + [g.payoff[k] for g in basis]
        rows.append((coeffs, GE, h[k]))
    prog = lp("min", [1] + [0] * nb, rows, bounds=[(None, None)] * (1 + nb))
    out = solve_lp(prog, model.exact)
    if out.status != OPTIMAL:
        raise SubmarketArbitrage(None, f"hedging LP in {label!r} is {out.status}")
    price = out.value
    hedge_risky = strategy_from_coefficients(model, basis, out.x[1:])
    hedge = complete_self_financing(model, {label: price}, hedge_risky)

    probs = [tree.atom_probs[a] for a in tree.leaves]
    dual = solve_fractional(
        [p * v for p, v in zip(probs, h)],
        [p * ratio[a] for p, a in zip(probs, tree.leaves)],
        deflator_cone_rows(model, label),
        sense="max",
        exact=model.exact,
    )
    gap = _gap(price, dual.value, model.exact)
    return PriceReport(
        venue=f"submarket:{label}",
        status="optimal",
        price=price,
        allocation={label: price},
        hedge=hedge,
        dual_value=dual.value,
        dual_witness=_measure_witness(model, ratio, dual.witness),
        duality_gap=gap,
    )


def _extreme_submarket(model, claim, pick) -> PriceReport:
    reports = [price_submarket(model, claim, s.label) for s in model.submarkets]
    prices = [r.price for r in reports]
    best = prices.index(pick(prices))  # first hit wins: declared order
    chosen = reports[best]
    return PriceReport(
        venue=VENUE_LOWER if pick is min else VENUE_UPPER,
        status=chosen.status,
        price=chosen.price,
        allocation=chosen.allocation,
        hedge=chosen.hedge,
        dual_value=chosen.dual_value,
        dual_witness=chosen.dual_witness,
        duality_gap=chosen.duality_gap,
        selected_submarket=model.submarkets[best].label,
    )


def price_lower(model: MarketModel, claim) -> PriceReport:
    """Cheapest single submarket that superreplicates the claim alone."""
    return _extreme_submarket(model, claim, min)


def price_upper(model: MarketModel, claim) -> PriceReport:
    """Capital sufficient to superreplicate inside every submarket
    separately."""
    return _extreme_submarket(model, claim, max)


def price_global(model: MarketModel, claim) -> PriceReport:
    """Joint-venue price: split nonnegative initial wealth across submarkets,
    trade each only internally, and dominate the claim with the summed
    terminal wealth.  The minimum is attained (polyhedral program); the
    report carries the attaining allocation and hedge.

    The independent dual maximizes the claim's value over deflator-cone
    directions whose growth-weighted mass stays within every submarket's
    budget row; the gap is asserted zero.
    """
    _require_global_nfl(model)
    h = _payoff_vector(model, claim)
    tree = model.tree
    labels = list(model.labels)
    ratios = {lab: model.numeraire_ratio(lab) for lab in labels}
    basis = scope_basis(model, GLOBAL)
    ns, nb = len(labels), len(basis)
    rows = []
    for k, atom in enumerate(tree.leaves):
        coeffs = [ratios[lab][atom] for lab in labels] + [g.payoff[k] for g in basis]
        rows.append((coeffs, GE, h[k]))
    bounds = [(0, None)] * ns + [(None, None)] * nb
    prog = lp("min", [1] * ns + [0] * nb, rows, bounds=bounds)
    out = solve_lp(prog, model.exact)
    if out.status != OPTIMAL:
        raise GlobalArbitrage(None, f"global hedging LP is {out.status}")
    price = out.value
    allocation = dict(zip(labels, out.x[:ns]))
    hedge_risky = strategy_from_coefficients(model, basis, out.x[ns:])
    hedge = complete_self_financing(model, allocation, hedge_risky)

    # independent dual: max q.H st q >= 0, q orthogonal to all gains,
    # sum_w q(w) ratio_tau(w) <= 1 for every tau
    probs = [tree.atom_probs[a] for a in tree.leaves]
    dual_rows = []
    for g in basis:
        dual_rows.append((list(g.payoff), EQ, 0))
    for lab in labels:
        dual_rows.append(([ratios[lab][a] for a in tree.leaves], LE, 1))
    dual_out = solve_lp(lp("max", h, dual_rows), model.exact)
    assert dual_out.status == OPTIMAL, f"global dual LP is {dual_out.status}"
    gap = _gap(price, dual_out.value, model.exact)
    cone_values = {
        a: dual_out.x[k] / probs[k] for k, a in enumerate(tree.leaves)
    }
    boundary = any(v == 0 for v in dual_out.x) if model.exact else any(
        abs(v) <= 1e-12 for v in dual_out.x
    )
    return PriceReport(
        venue=VENUE_GLOBAL,
        status="optimal",
        price=price,
        allocation=allocation,
        hedge=hedge,
        dual_value=dual_out.value,
        dual_witness=DualWitness(kind="cone", values=cone_values, boundary=boundary),
        duality_gap=gap,
    )


def price_fractional(
    model: MarketModel,
    claim,
    weight: Mapping[str, Num],
    scope: str = GLOBAL,
    sense: str = "max",
) -> Num:
    """Extreme of E_Q[H/Z] over the closed weighted measure set: computed as
    the ratio program extreme of E[X H]/E[X Z] over the deflator cone."""
    tree = model.tree
    for atom in tree.leaves:
        if weight[atom] <= 0:
            raise NonPositiveWeight(f"weight {weight[atom]} at atom {atom!r}")
    h = _payoff_vector(model, claim)
    probs = [tree.atom_probs[a] for a in tree.leaves]
    out = solve_fractional(
        [p * v for p, v in zip(probs, h)],
        [p * weight[a] for p, a in zip(probs, tree.leaves)],
        deflator_cone_rows(model, scope),
        sense=sense,
        exact=model.exact,
    )
    return out.value


def fractional_reciprocal(model: MarketModel, claim, weight: Mapping[str, Num], scope: str = GLOBAL) -> Num:
    """The reciprocal route to the same supremum, available when the claim is
    strictly positive: one over the infimum of E_Q[Z/H] over the measure set
    weighted by the claim itself."""
    h = _payoff_vector(model, claim)
    if any(v <= 0 for v in h):
        raise NonPositiveWeight("reciprocal identity needs a strictly positive claim")
    h_map = dict(zip(model.tree.leaves, h))
    inf_value = price_fractional(model, dict(weight), h_map, scope=scope, sense="min")
    return 1 / inf_value


def dual_certificate_global(
    model: MarketModel,
    claim,
    allocation: Mapping[str, Num],
    lam: Mapping[str, Num],
    check: bool = True,
) -> Num:
    """Certificate of optimality for a global-venue allocation: the residual
    claim (claim minus funded numeraire legs), valued through the measure set
    weighted by the lambda-mix, must have supremum exactly zero at an
    attaining allocation.  Over-funding drives it strictly negative."""
    selector = MeasureSelector.linear_combination(model, lam)
    tree = model.tree
    h = _payoff_vector(model, claim)
    residual = []
    for k, atom in enumerate(tree.leaves):
        funded = sum(
            allocation.get(lab, 0) * model.numeraire_ratio(lab)[atom]
            for lab in model.labels
        )
        residual.append(h[k] - funded)
    value = price_fractional(
        model, dict(zip(tree.leaves, residual)), selector.weight, scope=GLOBAL, sense="max"
    )
    tol = 0 if model.exact else 1e-7
    if check and abs(value) > tol:
        raise CertificateViolation(value)
    return value


def dual_bounds_global(model: MarketModel, claim) -> tuple[Num, Num]:
    """Bracket the joint-venue price by the best-growth and worst-growth
    weighted measure sets."""
    lower = price_fractional(model, claim, MeasureSelector.max_ratio(model).weight)
    upper = price_fractional(model, claim, MeasureSelector.min_ratio(model).weight)
    price = price_global(model, claim).price
    if model.exact:
        assert lower <= price <= upper, f"bounds {lower}, {upper} miss price {price}"
    else:
        assert lower <= price + 1e-7 and price <= upper + 1e-7
    return lower, upper


# --- one-dimensional identity suite ------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    lhs: Num
    rhs: Num

    @property
    def residual(self) -> Num:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class IdentityReport:
    checks: Mapping[str, IdentityCheck]

    def residuals(self) -> dict[str, Num]:
        return {name: c.residual for name, c in self.checks.items()}

    @property
    def ok(self) -> bool:
        return all(c.residual == 0 for c in self.checks.values())


def one_dim_identity_suite(model: MarketModel, label: str, other: str) -> IdentityReport:
    """Evaluate the one-dimensional pricing identities between two submarkets
    (both hedged venues are priced through their own uni-market measure set):

    own_venue: the asset's own-venue price is its spot price;
    cross_venue: the other venue's price of the asset via the growth-ratio
      supremum and, equivalently, the reciprocal infimum;
    swap_decomposition: linearity of the swap price in the hedging venue;
    swap_own_venue: the swap's own-venue price via the infimum factor, and
      equivalently via the inf/sup correction on the cross asset;
    price_ratio: cross-multiplied ratio identity between venues.
    """
    for lab in (label, other):
        if model.submarket(lab).dim != 1:
            raise DimensionNotOne(f"submarket {lab!r} has dim != 1")
    s_t = terminal_asset_claim(model, label)
    s_bar = terminal_asset_claim(model, other)
    tree = model.tree
    swap = {a: s_t[a] - s_bar[a] for a in tree.leaves}
    root = tree.path(tree.leaves[0])[0]
    spot = model.submarket(label).assets[root][0]
    spot_bar = model.submarket(other).assets[root][0]
    ratio = model.numeraire_ratio(label)
    ratio_bar = model.numeraire_ratio(other)

    pi_own = price_submarket(model, s_t, label).price
    pi_cross = price_submarket(model, s_t, other).price
    pi_bar_own = price_submarket(model, s_bar, other).price
    pi_swap_cross = price_submarket(model, swap, other).price
    pi_swap_own = price_submarket(model, swap, label).price
    pi_bar_in_label = price_submarket(model, s_bar, label).price

    sup_growth = price_fractional(model, ratio, ratio_bar, scope=other, sense="max")
    inf_inv = price_fractional(model, ratio_bar, ratio, scope=label, sense="min")
    sup_inv = price_fractional(model, ratio_bar, ratio, scope=label, sense="max")

    checks = {
        "own_venue": IdentityCheck(pi_own, spot),
        "cross_venue_sup": IdentityCheck(pi_cross, spot * sup_growth),
        "cross_venue_reciprocal": IdentityCheck(pi_cross, spot / inf_inv),
        "swap_decomposition": IdentityCheck(pi_swap_cross, pi_cross - pi_bar_own),
        "swap_own_venue": IdentityCheck(pi_swap_own, inf_inv * (pi_cross - pi_bar_own)),
        "swap_own_venue_correction": IdentityCheck(
            pi_swap_own, pi_own - pi_bar_in_label * inf_inv / sup_inv
        ),
        "price_ratio": IdentityCheck(pi_swap_cross * pi_own, pi_swap_own * pi_cross),
    }
    return IdentityReport(checks=checks)


def basis_swap_price(model: MarketModel, label: str, other: str, venue: str) -> PriceReport:
    """Price the long-`label` short-`other` terminal exchange in the chosen
    venue (one of the two submarkets, or 'global')."""
    for lab in (label, other):
        if model.submarket(lab).dim != 1:
            raise DimensionNotOne(f"submarket {lab!r} has dim != 1")
    s_t = terminal_asset_claim(model, label)
    s_bar = terminal_asset_claim(model, other)
    swap = {a: s_t[a] - s_bar[a] for a in model.tree.leaves}
    if venue == VENUE_GLOBAL:
        return price_global(model, swap)
    return price_submarket(model, swap, venue)


# --- constant growth-ratio shortcut ------------------------------------------


@dataclass(frozen=True)
class ConstantRatioReport:
    price: Num
    tau_max: str
    c_values: Mapping[str, Num]
    allocation: Mapping[str, Num]
    lp_price: Num
    report: PriceReport


def price_constant_ratio(model: MarketModel, claim, lam: Mapping[str, Num]) -> ConstantRatioReport:
    """Shortcut valid when every submarket's growth, deflated by the
    lambda-mix, has a constant expectation across the whole mixed measure
    set: the joint price is that measure-set supremum rescaled by the best
    constant, and all initial wealth sits in the best submarket.

    The constancy hypothesis is verified by solving the max and the min of
    each expectation and comparing; ConditionNotMet is raised otherwise
    (callers can fall back to price_global, which is also the cross-check).
    """
    _require_global_nfl(model)
    selector = MeasureSelector.linear_combination(model, lam)
    tree = model.tree
    c_values: dict[str, Num] = {}
    for lab in model.labels:
        ratio = model.numeraire_ratio(lab)
        hi = price_fractional(model, ratio, selector.weight, sense="max")
        lo = price_fractional(model, ratio, selector.weight, sense="min")
        tol = 0 if model.exact else 1e-9
        if abs(hi - lo) > tol:
            raise ConditionNotMet(
                f"expected growth of {lab!r} varies over the measure set: [{lo}, {hi}]"
            )
        c_values[lab] = hi
    tau_max = max(model.labels, key=lambda lab: (c_values[lab],))
    # deterministic tie-break: first label attaining the max
    for lab in model.labels:
        if c_values[lab] == c_values[tau_max]:
            tau_max = lab
            break
    sup_h = price_fractional(model, claim, selector.weight, sense="max")
    price = sup_h / c_values[tau_max]

    # funding constrained to tau_max, trading global: feasibility cross-check
    h = _payoff_vector(model, claim)
    basis = scope_basis(model, GLOBAL)
    ratio_max = model.numeraire_ratio(tau_max)
    rows = []
    for k, atom in enumerate(tree.leaves):
        coeffs = [ratio_max[atom]] + [g.payoff[k] for g in basis]
        rows.append((coeffs, GE, h[k]))
    bounds = [(0, None)] + [(None, None)] * len(basis)
    concentrated = solve_lp(lp("min", [1] + [0] * len(basis), rows, bounds=bounds), model.exact)
    assert concentrated.status == OPTIMAL
    full = price_global(model, claim)
    if model.exact:
        assert concentrated.value == price, (
            f"concentrated funding LP {concentrated.value} != shortcut {price}"
        )
        assert full.price == price, f"joint LP {full.price} != shortcut {price}"
    return ConstantRatioReport(
        price=price,
        tau_max=tau_max,
        c_values=c_values,
        allocation={tau_max: price},
        lp_price=full.price,
        report=full,
    )


# --- two-submarket closed forms ------------------------------------------------


@dataclass(frozen=True)
class TwoMarketReport:
    min_formula: Mapping[str, IdentityCheck]  # per asset label
    hypothesis_holds: bool
    swap_lp_price: Num
    swap_formulas: Mapping[str, IdentityCheck] | None
    p_cross: Mapping[str, Num]


def two_market_report(model: MarketModel) -> TwoMarketReport:
    """Closed forms for exactly two one-dimensional submarkets.

    Each asset's joint price is the smaller of its own-venue price and its
    cross price through the other submarket's global measure set.  The swap's
    closed forms apply only under the documented hypothesis (cross price of
    the first asset at least the second's spot); when it fails the LP value
    is still reported and the closed forms are marked not applicable.
    """
    if len(model.submarkets) != 2:
        raise WrongShape(f"need exactly 2 submarkets, have {len(model.submarkets)}")
    lab1, lab2 = model.labels
    for lab in (lab1, lab2):
        if model.submarket(lab).dim != 1:
            raise DimensionNotOne(f"submarket {lab!r} has dim != 1")
    _require_global_nfl(model)
    tree = model.tree
    s1 = terminal_asset_claim(model, lab1)
    s2 = terminal_asset_claim(model, lab2)
    ratio2 = model.numeraire_ratio(lab2)

    p_cross = {
        lab1: price_fractional(model, s1, ratio2, scope=GLOBAL, sense="max"),
        lab2: price_fractional(model, s2, model.numeraire_ratio(lab1), scope=GLOBAL, sense="max"),
    }
    own = {
        lab1: price_submarket(model, s1, lab1).price,
        lab2: price_submarket(model, s2, lab2).price,
    }
    joint = {
        lab1: price_global(model, s1).price,
        lab2: price_global(model, s2).price,
    }
    min_formula = {
        lab1: IdentityCheck(joint[lab1], min(p_cross[lab1], own[lab1])),
        lab2: IdentityCheck(joint[lab2], min(p_cross[lab2], own[lab2])),
    }

    hypothesis = p_cross[lab1] >= own[lab2]
    swap = {a: s1[a] - s2[a] for a in tree.leaves}
    swap_lp = price_global(model, swap).price
    formulas = None
    if hypothesis:
        factor = min(own[lab1] / p_cross[lab1], 1)
        product_form = factor * (p_cross[lab1] - own[lab2])
        ratio1 = model.numeraire_ratio(lab1)
        sup_rel = price_fractional(model, ratio1, ratio2, scope=GLOBAL, sense="max")
        inf_rel = price_fractional(model, ratio1, ratio2, scope=GLOBAL, sense="min")
        difference_form = joint[lab1] - joint[lab2] * max(inf_rel, 1) / max(sup_rel, 1)
        formulas = {
            "product_form": IdentityCheck(swap_lp, product_form),
            "difference_form": IdentityCheck(swap_lp, difference_form),
        }
    return TwoMarketReport(
        min_formula=min_formula,
        hypothesis_holds=hypothesis,
        swap_lp_price=swap_lp,
        swap_formulas=formulas,
        p_cross=p_cross,
    )
