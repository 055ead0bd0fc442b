"""Simple strategies, self-financing bookkeeping, and zero-cost claim spaces.

On a finite tree every simple strategy over stopping times generates the same
claims as one-step node-indexed predictable positions, so the attainable
zero-cost cone of a submarket is spanned by the elementary gains: hold one
unit of one asset over one step under one node, financed by the numeraire.
The spanning reduction is a tested property, not an assumption (see the
arbitrage test suite).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DimensionMismatch
from .lp import EQ, INFEASIBLE, lp, solve_lp
from .market import MarketModel, discounted_prices
from .numbers import Num


@dataclass(frozen=True)
class GainAtom:
    """One elementary zero-cost payoff: unit position in `asset` of
    `submarket` held over the step under `node`."""

    submarket: str
    node: str
    asset: int
    payoff: tuple[Num, ...]  # by tree.leaves order


@dataclass(frozen=True)
class GainsBasis:
    per_submarket: Mapping[str, tuple[GainAtom, ...]]
    flat: tuple[GainAtom, ...]


@dataclass(frozen=True)
class SimpleStrategy:
    """Predictable one-step positions per submarket.

    ``risky[label][node]`` is the vector held from `node` to its children;
    ``numeraire[label][node]`` the numeraire position over the same step
    (None until filled in by :func:`complete_self_financing`).
    """

    risky: Mapping[str, Mapping[str, tuple[Num, ...]]]
    numeraire: Mapping[str, Mapping[str, Num]] | None = None


def elementary_gains(model: MarketModel, label: str) -> tuple[GainAtom, ...]:
    """One payoff vector per (non-terminal node, asset index), deterministic
    order: nodes as indexed by the tree, then asset index."""
    sub = model.submarket(label)
    tree = model.tree
    tilde = discounted_prices(model, label)
    out = []
    for node_id in tree.nonterminal():
        for i in range(sub.dim):
            payoff = []
            for leaf in tree.leaves:
                path = tree.path(leaf)
                if node_id in path:
                    succ = path[path.index(node_id) + 1]
                    move = tilde[succ][i] - tilde[node_id][i]
                    payoff.append(sub.numeraire[leaf] * move)
                else:
                    payoff.append(sub.numeraire[leaf] * 0)
            out.append(GainAtom(label, node_id, i, tuple(payoff)))
    return tuple(out)


def global_gains(model: MarketModel) -> GainsBasis:
    """Concatenation of every submarket's elementary gains, declared order."""
    per = {sub.label: elementary_gains(model, sub.label) for sub in model.submarkets}
    flat = tuple(g for sub in model.submarkets for g in per[sub.label])
    return GainsBasis(per_submarket=per, flat=flat)


def strategy_from_coefficients(
    model: MarketModel, basis: Sequence[GainAtom], coeffs: Sequence[Num]
) -> SimpleStrategy:
    """Assemble one-step risky positions from coefficients on basis gains."""
    risky: dict[str, dict[str, list[Num]]] = {s.label: {} for s in model.submarkets}
    dims = {s.label: s.dim for s in model.submarkets}
    for g, c in zip(basis, coeffs):
        positions = risky[g.submarket].setdefault(g.node, [0] * dims[g.submarket])
        positions[g.asset] = positions[g.asset] + c
    return SimpleStrategy(
        risky={
            label: {node: tuple(vals) for node, vals in nodes.items()}
            for label, nodes in risky.items()
        }
    )


def _positions(strategy_risky, label, node_id, dim):
    by_node = strategy_risky.get(label, {})
    vec = by_node.get(node_id)
    if vec is None:
        return (0,) * dim
    if len(vec) != dim:
        raise DimensionMismatch(
            f"{len(vec)} positions for submarket {label!r} of dim {dim}"
        )
    return tuple(vec)


def terminal_value(
    model: MarketModel,
    initial_wealth: Mapping[str, Num],
    strategy: SimpleStrategy | Mapping,
) -> dict[str, Num]:
    """Terminal wealth per atom: each submarket compounds its initial wealth
    in its own numeraire and accumulates the discounted one-step gains."""
    risky = strategy.risky if isinstance(strategy, SimpleStrategy) else strategy
    tree = model.tree
    tildes = {s.label: discounted_prices(model, s.label) for s in model.submarkets}
    out = {}
    for leaf in tree.leaves:
        total = 0
        path = tree.path(leaf)
        for sub in model.submarkets:
            x0 = initial_wealth.get(sub.label, 0)
            tilde = tildes[sub.label]
            acc = x0 / sub.numeraire[path[0]]
            for step, node_id in enumerate(path[:-1]):
                phi = _positions(risky, sub.label, node_id, sub.dim)
                succ = path[step + 1]
                for i in range(sub.dim):
                    acc += phi[i] * (tilde[succ][i] - tilde[node_id][i])
            total += sub.numeraire[leaf] * acc
        out[leaf] = total
    return out


def complete_self_financing(
    model: MarketModel,
    initial_wealth: Mapping[str, Num],
    strategy: SimpleStrategy | Mapping,
) -> SimpleStrategy:
    """Fill in the numeraire legs so each submarket trades self-financed from
    its own initial wealth.

    At the root the numeraire position absorbs whatever the risky positions
    do not use; at each later rebalancing node it pays for the change in the
    risky positions at current prices.
    """
    risky_in = strategy.risky if isinstance(strategy, SimpleStrategy) else strategy
    tree = model.tree
    risky: dict[str, dict[str, tuple[Num, ...]]] = {}
    numeraire: dict[str, dict[str, Num]] = {}
    root = tree.path(tree.leaves[0])[0]
    for sub in model.submarkets:
        risky[sub.label] = {
            n: _positions(risky_in, sub.label, n, sub.dim) for n in tree.nonterminal()
        }
        phi0: dict[str, Num] = {}
        x0 = initial_wealth.get(sub.label, 0)
        phi_root = risky[sub.label][root]
        spent = sum(p * s for p, s in zip(phi_root, sub.assets[root]))
        phi0[root] = (x0 - spent) / sub.numeraire[root]
        for node_id in tree.nonterminal():
            if node_id == root:
                continue
            parent = tree.node(node_id).parent
            prev_phi = risky[sub.label][parent]
            prev_num = phi0[parent]
            cur_phi = risky[sub.label][node_id]
            change = sum(
                (p - c) * s for p, c, s in zip(prev_phi, cur_phi, sub.assets[node_id])
            )
            phi0[node_id] = prev_num + change / sub.numeraire[node_id]
        numeraire[sub.label] = phi0
    return SimpleStrategy(risky=risky, numeraire=numeraire)


def strategy_cost(model: MarketModel, strategy: SimpleStrategy) -> dict[str, Num]:
    """Initial cost per submarket (risky plus numeraire legs at time 0)."""
    if strategy.numeraire is None:
        raise DimensionMismatch("strategy has no numeraire legs; complete it first")
    tree = model.tree
    root = tree.path(tree.leaves[0])[0]
    out = {}
    for sub in model.submarkets:
        phi = _positions(strategy.risky, sub.label, root, sub.dim)
        cost = sum(p * s for p, s in zip(phi, sub.assets[root]))
        cost += strategy.numeraire[sub.label][root] * sub.numeraire[root]
        out[sub.label] = cost
    return out


def strategy_wealth(model: MarketModel, strategy: SimpleStrategy) -> dict[str, Num]:
    """Terminal wealth per atom of a completed strategy, by direct valuation
    of the positions entering each leaf."""
    if strategy.numeraire is None:
        raise DimensionMismatch("strategy has no numeraire legs; complete it first")
    tree = model.tree
    out = {}
    for leaf in tree.leaves:
        parent = tree.node(leaf).parent
        total = 0
        for sub in model.submarkets:
            phi = _positions(strategy.risky, sub.label, parent, sub.dim)
            total += sum(p * s for p, s in zip(phi, sub.assets[leaf]))
            total += strategy.numeraire[sub.label][parent] * sub.numeraire[leaf]
        out[leaf] = total
    return out


def self_financing_residuals(model: MarketModel, strategy: SimpleStrategy) -> dict[str, Num]:
    """Rebalancing-identity residual per (submarket, node); all zero for a
    self-financed strategy."""
    if strategy.numeraire is None:
        raise DimensionMismatch("strategy has no numeraire legs; complete it first")
    tree = model.tree
    out = {}
    for sub in model.submarkets:
        for node_id in tree.nonterminal():
            parent = tree.node(node_id).parent
            if parent is None:
                continue
            prev_phi = _positions(strategy.risky, sub.label, parent, sub.dim)
            cur_phi = _positions(strategy.risky, sub.label, node_id, sub.dim)
            prev_val = sum(p * s for p, s in zip(prev_phi, sub.assets[node_id]))
            prev_val += strategy.numeraire[sub.label][parent] * sub.numeraire[node_id]
            cur_val = sum(p * s for p, s in zip(cur_phi, sub.assets[node_id]))
            cur_val += strategy.numeraire[sub.label][node_id] * sub.numeraire[node_id]
            out[f"{sub.label}/{node_id}"] = cur_val - prev_val
    return out


def in_span(
    vectors: Sequence[Sequence[Num]],
    target: Sequence[Num],
    exact: bool = True,
    tol: float = 1e-9,
) -> bool:
    """Feasibility of writing `target` as a linear combination of `vectors`."""
    nvars = len(vectors)
    rows = []
    for k in range(len(target)):
        coeffs = [vectors[j][k] for j in range(nvars)]
        rows.append((coeffs, EQ, target[k]))
    prog = lp("min", [0] * nvars, rows, bounds=[(None, None)] * nvars)
    return solve_lp(prog, exact, tol).status != INFEASIBLE
