"""No-free-lunch verification and common-deflator extraction.

On a finite tree the attainable-at-zero-cost cone is polyhedral, hence
closed, so no-free-lunch coincides with plain no-arbitrage and both reduce
to linear programming.  The certificate of absence is a strictly positive
deflator orthogonal to every elementary gain of every submarket; it is
built constructively by per-atom maximization (push mass onto one atom at a
time, then average), and the failure of any atom's program yields an
explicit arbitrage witness through LP duality.

All martingale measures, state price deflators, and weighted measure sets
are derived from that one common deflator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ArbitrageExists, NonPositiveWeight, NumericBreakdown
from .gains import (
    GainAtom,
    SimpleStrategy,
    complete_self_financing,
    elementary_gains,
    global_gains,
    strategy_from_coefficients,
    terminal_value,
)
from .lp import EQ, INFEASIBLE, OPTIMAL, UNBOUNDED, lp, solve_lp
from .market import MarketModel
from .numbers import Num

GLOBAL = "global"


@dataclass(frozen=True)
class DeflatorCertificate:
    """Strictly positive deflator with unit mean, orthogonal to every gain
    in `basis_checked`; per-atom sub-solutions witness the positivity."""

    scope: str
    xstar: Mapping[str, Num]
    per_atom_solutions: Mapping[str, Mapping[str, Num]]
    basis_checked: tuple[GainAtom, ...]

    def verify(self, model: MarketModel) -> None:
        tree = model.tree
        mean = sum(tree.atom_probs[a] * self.xstar[a] for a in tree.leaves)
        assert all(self.xstar[a] > 0 for a in tree.leaves), "deflator not positive"
        if model.exact:
            assert mean == 1, f"deflator mean {mean} != 1"
        else:
            assert abs(mean - 1) <= 1e-9, f"deflator mean {mean} != 1"
        for g in self.basis_checked:
            r = sum(
                tree.atom_probs[a] * self.xstar[a] * g.payoff[k]
                for k, a in enumerate(tree.leaves)
            )
            ok = (r == 0) if model.exact else abs(r) <= 1e-8
            assert ok, f"deflator not orthogonal to gain {g.submarket}/{g.node}/{g.asset}: {r}"


@dataclass(frozen=True)
class ArbitrageWitness:
    """Zero-cost-per-submarket strategy with nonnegative, nonzero payoff."""

    scope: str
    strategy: SimpleStrategy
    payoff: Mapping[str, Num]
    violating_atoms: tuple[str, ...]


@dataclass(frozen=True)
class NflResult:
    ok: bool
    certificate: DeflatorCertificate | None = None
    witness: ArbitrageWitness | None = None


@dataclass(frozen=True)
class MeasureSelector:
    """A weighted measure set: the cone (global or one submarket) carves the
    orthogonality constraints, the strictly positive weight Z reweights the
    deflators into measures."""

    scope: str
    weight: Mapping[str, Num]

    @staticmethod
    def hat(model: MarketModel, label: str) -> "MeasureSelector":
        """The classical uni-market measure set of a submarket."""
        model.submarket(label)
        return MeasureSelector(scope=label, weight=model.numeraire_ratio(label))

    @staticmethod
    def global_ratio(model: MarketModel, label: str) -> "MeasureSelector":
        """Global cone weighted by one submarket's numeraire growth."""
        return MeasureSelector(scope=GLOBAL, weight=model.numeraire_ratio(label))

    @staticmethod
    def linear_combination(model: MarketModel, lam: Mapping[str, Num]) -> "MeasureSelector":
        """Global cone weighted by a nonnegative mix of numeraire growths;
        the mix must stay positive on every atom."""
        weight = {}
        for atom in model.tree.leaves:
            total = 0
            for label, coeff in lam.items():
                if coeff < 0:
                    raise NonPositiveWeight(f"negative weight for {label!r}")
                total += coeff * model.numeraire_ratio(label)[atom]
            weight[atom] = total
        _require_positive(weight)
        return MeasureSelector(scope=GLOBAL, weight=weight)

    @staticmethod
    def max_ratio(model: MarketModel) -> "MeasureSelector":
        ratios = [model.numeraire_ratio(s.label) for s in model.submarkets]
        return MeasureSelector(
            scope=GLOBAL,
            weight={a: max(r[a] for r in ratios) for a in model.tree.leaves},
        )

    @staticmethod
    def min_ratio(model: MarketModel) -> "MeasureSelector":
        ratios = [model.numeraire_ratio(s.label) for s in model.submarkets]
        return MeasureSelector(
            scope=GLOBAL,
            weight={a: min(r[a] for r in ratios) for a in model.tree.leaves},
        )


def _require_positive(weight: Mapping[str, Num]) -> None:
    for atom, value in weight.items():
        if value <= 0:
            raise NonPositiveWeight(f"weight {value} at atom {atom!r}")


def scope_basis(model: MarketModel, scope: str) -> tuple[GainAtom, ...]:
    if scope == GLOBAL:
        return global_gains(model).flat
    return elementary_gains(model, scope)


def _orthogonality_rows(model: MarketModel, basis: Sequence[GainAtom]):
    """P-weighted orthogonality rows E[X g] = 0 over atom variables."""
    tree = model.tree
    probs = [tree.atom_probs[a] for a in tree.leaves]
    return [
        ([p * v for p, v in zip(probs, g.payoff)], EQ, 0)
        for g in basis
    ]


def deflator_cone_rows(model: MarketModel, scope: str = GLOBAL):
    return _orthogonality_rows(model, scope_basis(model, scope))


def _witness_from_coeffs(
    model: MarketModel, basis: Sequence[GainAtom], coeffs: Sequence[Num], scope: str
) -> ArbitrageWitness | None:
    tol = 0 if model.exact else 1e-9
    strategy = strategy_from_coefficients(model, basis, coeffs)
    payoff = terminal_value(model, {}, strategy)
    values = [payoff[a] for a in model.tree.leaves]
    if any(v < -tol for v in values) or not any(v > tol for v in values):
        return None
    completed = complete_self_financing(model, {}, strategy)
    return ArbitrageWitness(
        scope=scope,
        strategy=completed,
        payoff=payoff,
        violating_atoms=tuple(
            a for a in model.tree.leaves if payoff[a] > tol
        ),
    )


def _witness_or_fail(model, basis, coeffs, scope) -> ArbitrageWitness:
    for candidate in (coeffs, [-c for c in coeffs]):
        witness = _witness_from_coeffs(model, basis, candidate, scope)
        if witness is not None:
            return witness
    # robust fallback: the direct arbitrage LP has a verified improving ray
    value, witness = arbitrage_lp(model, scope)
    if witness is None:
        raise NumericBreakdown("arbitrage detected but no witness recovered")
    return witness


def arbitrage_lp(model: MarketModel, scope: str = GLOBAL):
    """The direct check: maximize total payoff mass over the zero-cost cone
    intersected with the nonnegative orthant.  Optimum 0 means no arbitrage;
    an unbounded ray exhibits one."""
    basis = scope_basis(model, scope)
    tree = model.tree
    atoms = tree.leaves
    nb = len(basis)
    na = len(atoms)
    # variables: basis coefficients (free), then payoff values W (>= 0)
    rows = []
    for k, atom in enumerate(atoms):
        coeffs = [g.payoff[k] for g in basis] + [0] * na
        coeffs[nb + k] = -1
        rows.append((coeffs, EQ, 0))
    objective = [0] * nb + [tree.atom_probs[a] for a in atoms]
    bounds = [(None, None)] * nb + [(0, None)] * na
    out = solve_lp(lp("max", objective, rows, bounds), model.exact)
    if out.status == OPTIMAL:
        return out.value, None
    if out.status == UNBOUNDED:
        coeffs = out.ray[:nb]
        witness = _witness_from_coeffs(model, basis, coeffs, scope)
        if witness is None:
            raise NumericBreakdown("unbounded ray failed witness verification")
        return None, witness
    raise NumericBreakdown(f"direct arbitrage LP returned {out.status}")


def extract_deflator(model: MarketModel, scope: str = GLOBAL) -> DeflatorCertificate:
    """Atom-by-atom construction: for each atom maximize the deflator's value there
    subject to positivity, orthogonality to every gain, and unit mean; the
    average of the maximizers is strictly positive everywhere iff no
    arbitrage exists.  A zero optimum (or an empty feasible set) converts,
    through the dual, into an arbitrage witness financed at zero cost.

    Raises ArbitrageExists carrying the witness on failure.
    """
    tree = model.tree
    atoms = tree.leaves
    basis = scope_basis(model, scope)
    probs = [tree.atom_probs[a] for a in atoms]
    rows = _orthogonality_rows(model, basis) + [(probs, EQ, 1)]
    tol = 0 if model.exact else 1e-9
    per_atom: dict[str, dict[str, Num]] = {}
    for k, atom in enumerate(atoms):
        objective = [0] * len(atoms)
        objective[k] = 1
        out = solve_lp(lp("max", objective, rows), model.exact)
        if out.status == INFEASIBLE:
            coeffs = [out.farkas[i] for i in range(len(basis))]
            witness = _witness_or_fail(model, basis, coeffs, scope)
            raise ArbitrageExists(witness)
        if out.status != OPTIMAL:
            raise NumericBreakdown(f"atom program returned {out.status}")
        if out.value <= tol:
            coeffs = [out.row_duals[i] for i in range(len(basis))]
            witness = _witness_or_fail(model, basis, coeffs, scope)
            raise ArbitrageExists(witness)
        per_atom[atom] = dict(zip(atoms, out.x))
    count = len(atoms)
    xstar = {
        a: sum(per_atom[b][a] for b in atoms) / count
        for a in atoms
    }
    certificate = DeflatorCertificate(
        scope=scope,
        xstar=xstar,
        per_atom_solutions=per_atom,
        basis_checked=basis,
    )
    certificate.verify(model)
    return certificate


def check_global_nfl(model: MarketModel) -> NflResult:
    """No free lunch across all submarkets jointly; on finite trees this is
    the no-arbitrage check, and it is strictly stronger than every
    per-submarket check combined."""
    try:
        return NflResult(ok=True, certificate=extract_deflator(model, GLOBAL))
    except ArbitrageExists as exc:
        return NflResult(ok=False, witness=exc.witness)


def check_submarket_nfl(model: MarketModel, label: str) -> NflResult:
    model.submarket(label)
    try:
        return NflResult(ok=True, certificate=extract_deflator(model, label))
    except ArbitrageExists as exc:
        return NflResult(ok=False, witness=exc.witness)


# --- measures built from a certificate --------------------------------------


def measure_from_weight(
    model: MarketModel, certificate: DeflatorCertificate, weight: Mapping[str, Num]
) -> dict[str, Num]:
    """Reweight the deflator into the measure with density X* Z / E[X* Z]."""
    _require_positive(weight)
    tree = model.tree
    raw = {
        a: tree.atom_probs[a] * certificate.xstar[a] * weight[a] for a in tree.leaves
    }
    total = sum(raw.values())
    return {a: v / total for a, v in raw.items()}


def martingale_measure(
    model: MarketModel, certificate: DeflatorCertificate, label: str
) -> dict[str, Num]:
    """The submarket's risk-neutral measure built from the common deflator."""
    return measure_from_weight(model, certificate, model.numeraire_ratio(label))


def state_price_deflator(
    model: MarketModel, certificate: DeflatorCertificate, label: str
) -> dict[str, Num]:
    """Node process D with D * S a martingale under the atom probabilities."""
    tree = model.tree
    sub = model.submarket(label)
    out = {}
    for node_id in tree.nodes:
        atoms = tree.atoms_under(node_id)
        node_prob = sum(tree.atom_probs[a] for a in atoms)
        cond = sum(
            tree.atom_probs[a] * certificate.xstar[a] * sub.numeraire[a] for a in atoms
        ) / node_prob
        out[node_id] = cond / sub.numeraire[node_id]
    return out


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    residuals: Mapping[str, Num]
    equivalent: bool


def check_measure_membership(
    model: MarketModel, q: Mapping[str, Num], selector: MeasureSelector
) -> MembershipReport:
    """Does q lie in the closed weighted measure set of the selector?

    Recovers the implied deflator X = (q/P)/Z and tests orthogonality
    against the selector cone's gains.  Atoms with zero q-mass keep the
    measure on the set's boundary: membership in the closure is reported
    with ``equivalent=False``.
    """
    tree = model.tree
    _require_positive(selector.weight)
    tol = 0 if model.exact else 1e-8
    total = sum(q.get(a, 0) for a in tree.leaves)
    if any(q.get(a, 0) < -tol for a in tree.leaves) or abs(total - 1) > tol:
        return MembershipReport(member=False, residuals={}, equivalent=False)
    implied_x = {
        a: q.get(a, 0) / (tree.atom_probs[a] * selector.weight[a])
        for a in tree.leaves
    }
    basis = scope_basis(model, selector.scope)
    residuals = {}
    member = True
    for g in basis:
        r = sum(
            tree.atom_probs[a] * implied_x[a] * g.payoff[k]
            for k, a in enumerate(tree.leaves)
        )
        residuals[f"{g.submarket}/{g.node}/{g.asset}"] = r
        violated = (r != 0) if model.exact else (abs(r) > 1e-8)
        if violated:
            member = False
    equivalent = member and all(q.get(a, 0) > 0 for a in tree.leaves)
    return MembershipReport(member=member, residuals=residuals, equivalent=equivalent)
