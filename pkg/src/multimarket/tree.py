"""Finite event trees: the probability space, filtration, and stopping times.

A scenario tree encodes a finite filtered probability space on a discrete
time grid ``0..horizon``.  Nodes are the cells of the filtration; leaves are
the atoms of the terminal sigma-algebra and carry strictly positive
probabilities summing to one.  Node ids are stable path strings ("r",
"r.0", "r.0.1", ...) so that a fixed build spec always produces the same
indexing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import MalformedTopology, NonPositiveProbability, ProbabilitySumMismatch
from .numbers import Num, parse_scalar

ROOT_ID = "r"


@dataclass(frozen=True)
class Node:
    id: str
    time: int
    parent: str | None
    children: tuple[str, ...]

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class ScenarioTree:
    """Immutable event tree.  Construct via :func:`build_tree` only.

    ``nodes`` is insertion-ordered by (time, sibling index); ``leaves`` is the
    deterministic atom order used for every payoff vector in the package.
    """

    nodes: Mapping[str, Node]
    leaves: tuple[str, ...]
    atom_probs: Mapping[str, Num]
    horizon: int
    exact: bool
    _atoms_under: Mapping[str, tuple[str, ...]] = field(repr=False, default_factory=dict)
    _paths: Mapping[str, tuple[str, ...]] = field(repr=False, default_factory=dict)

    # -- queries ----------------------------------------------------------

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise MalformedTopology(f"unknown node {node_id!r}") from None

    def children(self, node_id: str) -> tuple[str, ...]:
        return self.node(node_id).children

    def atoms_under(self, node_id: str) -> tuple[str, ...]:
        return self._atoms_under[node_id]

    def path(self, leaf_id: str) -> tuple[str, ...]:
        """Root-to-leaf node sequence."""
        return self._paths[leaf_id]

    def node_prob(self, node_id: str) -> Num:
        return sum(self.atom_probs[a] for a in self.atoms_under(node_id))

    def nonterminal(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if self.nodes[n].children)

    def node_on_path(self, leaf_id: str, antichain: frozenset[str]) -> str:
        for node_id in self.path(leaf_id):
            if node_id in antichain:
                return node_id
        raise MalformedTopology(f"antichain misses atom {leaf_id!r}")

    def as_vector(self, mapping: Mapping[str, Num]) -> tuple[Num, ...]:
        return tuple(mapping[a] for a in self.leaves)

    def as_mapping(self, vector: Sequence[Num]) -> dict[str, Num]:
        return dict(zip(self.leaves, vector))


@dataclass(frozen=True)
class StoppingTime:
    """An antichain of nodes crossed exactly once by every root-to-leaf path."""

    antichain: frozenset[str]

    def validate(self, tree: ScenarioTree) -> None:
        for node_id in self.antichain:
            tree.node(node_id)
        for leaf in tree.leaves:
            hits = [n for n in tree.path(leaf) if n in self.antichain]
            if len(hits) != 1:
                raise MalformedTopology(
                    f"antichain crosses atom {leaf!r} {len(hits)} times"
                )

    def value_at(self, tree: ScenarioTree, leaf: str) -> int:
        return tree.node(tree.node_on_path(leaf, self.antichain)).time


def _explicit_nodes(spec) -> dict[str, Node]:
    """Assemble nodes from an explicit [(id, parent)] listing."""
    parents: dict[str, str | None] = {}
    order: list[str] = []
    for entry in spec:
        if isinstance(entry, dict):
            node_id, parent = entry["id"], entry.get("parent")
        else:
            node_id, parent = entry
        if node_id in parents:
            raise MalformedTopology(f"duplicate node id {node_id!r}")
        parents[node_id] = parent
        order.append(node_id)
    roots = [n for n, p in parents.items() if p is None]
    if len(roots) != 1:
        raise MalformedTopology(f"expected exactly one root, found {len(roots)}")
    children: dict[str, list[str]] = {n: [] for n in order}
    for node_id in order:
        parent = parents[node_id]
        if parent is None:
            continue
        if parent not in parents:
            raise MalformedTopology(f"node {node_id!r} has unknown parent {parent!r}")
        children[parent].append(node_id)

    times: dict[str, int] = {}

    def set_time(node_id: str) -> int:
        if node_id not in times:
            parent = parents[node_id]
            times[node_id] = 0 if parent is None else set_time(parent) + 1
        return times[node_id]

    for node_id in order:
        set_time(node_id)
    return {
        n: Node(n, times[n], parents[n], tuple(children[n]))
        for n in sorted(order, key=lambda n: (times[n], order.index(n)))
    }


def _branching_nodes(branching: Sequence[int]) -> dict[str, Node]:
    if not branching or any((not isinstance(b, int)) or b < 1 for b in branching):
        raise MalformedTopology(f"branching counts must be positive ints: {branching!r}")
    levels: list[list[str]] = [[ROOT_ID]]
    parents: dict[str, str | None] = {ROOT_ID: None}
    for count in branching:
        nxt: list[str] = []
        for node_id in levels[-1]:
            for k in range(count):
                child = f"{node_id}.{k}"
                parents[child] = node_id
                nxt.append(child)
        levels.append(nxt)
    children: dict[str, list[str]] = {n: [] for n in parents}
    for node_id, parent in parents.items():
        if parent is not None:
            children[parent].append(node_id)
    nodes: dict[str, Node] = {}
    for t, level in enumerate(levels):
        for node_id in level:
            nodes[node_id] = Node(node_id, t, parents[node_id], tuple(children[node_id]))
    return nodes


def build_tree(branching_spec, atom_probs, exact: bool | None = None) -> ScenarioTree:
    """Build and validate a scenario tree.

    ``branching_spec`` is either per-level branching counts (e.g. ``[2, 2]``)
    or an explicit node listing of ``(id, parent)`` pairs / ``{"id", "parent"}``
    dicts.  ``atom_probs`` maps leaf id to probability, or lists probabilities
    in leaf order.  Probabilities must be strictly positive and sum to one
    (exactly in rational mode, within 1e-9 in float mode).
    """
    if branching_spec and not isinstance(branching_spec[0], int):
        nodes = _explicit_nodes(branching_spec)
    else:
        nodes = _branching_nodes(branching_spec)

    leaves = tuple(n for n in nodes if not nodes[n].children)
    horizon = max(nodes[n].time for n in nodes)
    for leaf in leaves:
        if nodes[leaf].time != horizon:
            raise MalformedTopology(
                f"leaf {leaf!r} terminates at t={nodes[leaf].time} < horizon {horizon}"
            )

    if isinstance(atom_probs, Mapping):
        raw = dict(atom_probs)
    else:
        if len(atom_probs) != len(leaves):
            raise MalformedTopology(
                f"{len(atom_probs)} probabilities for {len(leaves)} atoms"
            )
        raw = dict(zip(leaves, atom_probs))
    if set(raw) != set(leaves):
        raise MalformedTopology("atom probabilities must cover exactly the leaves")

    if exact is None:
        exact = not any(isinstance(v, float) for v in raw.values())
    probs = {leaf: parse_scalar(raw[leaf], exact) for leaf in leaves}
    for leaf, p in probs.items():
        if p <= 0:
            raise NonPositiveProbability(f"atom {leaf!r} has probability {p}")
    total = sum(probs.values())
    if exact:
        if total != 1:
            raise ProbabilitySumMismatch(f"atom probabilities sum to {total}, not 1")
    elif abs(total - 1) > 1e-9:
        raise ProbabilitySumMismatch(f"atom probabilities sum to {total}, not 1")

    atoms_under: dict[str, tuple[str, ...]] = {}

    def collect(node_id: str) -> tuple[str, ...]:
        node = nodes[node_id]
        result = (node_id,) if node.is_leaf else tuple(
            a for c in node.children for a in collect(c)
        )
        atoms_under[node_id] = result
        return result

    collect(ROOT_ID if ROOT_ID in nodes else next(iter(nodes)))
    if len(atoms_under) != len(nodes):
        raise MalformedTopology("tree has nodes unreachable from the root")

    paths: dict[str, tuple[str, ...]] = {}
    for leaf in leaves:
        path = [leaf]
        while nodes[path[-1]].parent is not None:
            path.append(nodes[path[-1]].parent)
        paths[leaf] = tuple(reversed(path))

    return ScenarioTree(
        nodes=nodes,
        leaves=leaves,
        atom_probs=probs,
        horizon=horizon,
        exact=exact,
        _atoms_under=atoms_under,
        _paths=paths,
    )


def _random_cut(tree: ScenarioTree, rng: random.Random, stop_within: frozenset[str] | None) -> frozenset[str]:
    """Random antichain covering all atoms; never descends past `stop_within`."""
    chosen: list[str] = []

    def walk(node_id: str) -> None:
        node = tree.node(node_id)
        must_stop = node.is_leaf or (stop_within is not None and node_id in stop_within)
        if must_stop or rng.random() < 0.5:
            chosen.append(node_id)
        else:
            for child in node.children:
                walk(child)

    root = tree.path(tree.leaves[0])[0]
    walk(root)
    return frozenset(chosen)


def sample_stopping_times(tree: ScenarioTree, count: int, seed: int) -> list[StoppingTime]:
    """Deterministically sample valid stopping times (as antichains)."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        st = StoppingTime(_random_cut(tree, rng, None))
        st.validate(tree)
        out.append(st)
    return out


def sample_stopping_time_pairs(
    tree: ScenarioTree, count: int, seed: int
) -> list[tuple[StoppingTime, StoppingTime]]:
    """Sample ordered pairs b1 <= b2: b1's crossing node is always an ancestor
    (or equal) of b2's on every path."""
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        later = StoppingTime(_random_cut(tree, rng, None))
        earlier = StoppingTime(_random_cut(tree, rng, later.antichain))
        later.validate(tree)
        earlier.validate(tree)
        pairs.append((earlier, later))
    return pairs


def enumerate_stopping_times(tree: ScenarioTree) -> list[frozenset[str]]:
    """All antichains covering the atom set (exponential; small trees only)."""

    def cuts(node_id: str) -> list[list[str]]:
        node = tree.node(node_id)
        result = [[node_id]]
        if node.children:
            partial: list[list[str]] = [[]]
            for child in node.children:
                partial = [p + c for p in partial for c in cuts(child)]
            result.extend(partial)
        return result

    root = tree.path(tree.leaves[0])[0]
    return [frozenset(c) for c in cuts(root)]
