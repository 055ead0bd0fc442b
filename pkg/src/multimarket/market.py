"""The global market: one tree, several submarkets, no cross trading.

Each submarket carries its own risky assets and a strictly positive tradable
numeraire, all adapted by construction (one value per node).  Claims are
terminal payoffs given per atom.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .errors import (
    DimensionMismatch,
    MissingNodeValue,
    NonPositiveNumeraire,
    SchemaError,
    UnknownSubmarket,
)
from .numbers import Num, parse_scalar, scalar_to_json
from .tree import ScenarioTree, build_tree


@dataclass(frozen=True)
class Submarket:
    """One trading segment: d risky assets plus its own numeraire."""

    label: str
    dim: int
    assets: Mapping[str, tuple[Num, ...]]
    numeraire: Mapping[str, Num]


@dataclass(frozen=True)
class Claim:
    label: str
    payoff: Mapping[str, Num]


@dataclass(frozen=True)
class MarketModel:
    """Immutable after construction: safe to share across threads, and every
    operation in the package treats it as read-only."""

    tree: ScenarioTree
    submarkets: tuple[Submarket, ...]
    bound_constant: Num | None = None
    claims: tuple[Claim, ...] = ()
    exact: bool = True

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.submarkets)

    def submarket(self, label: str) -> Submarket:
        for sub in self.submarkets:
            if sub.label == label:
                return sub
        raise UnknownSubmarket(f"no submarket {label!r} (have {self.labels})")

    def claim(self, label: str) -> Claim:
        for claim in self.claims:
            if claim.label == label:
                return claim
        raise SchemaError(f"no claim {label!r} in document")

    def numeraire_ratio(self, label: str) -> dict[str, Num]:
        """Terminal numeraire growth per atom: S0_T(w) / S0_0."""
        sub = self.submarket(label)
        root = self.tree.path(self.tree.leaves[0])[0]
        initial = sub.numeraire[root]
        return {a: sub.numeraire[a] / initial for a in self.tree.leaves}

    def terminal_assets(self, label: str) -> dict[str, tuple[Num, ...]]:
        sub = self.submarket(label)
        return {a: sub.assets[a] for a in self.tree.leaves}


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    where: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[ValidationIssue, ...]
    bound: Num | None


def make_model(
    tree: ScenarioTree,
    submarkets: Sequence[Submarket],
    bound_constant: Num | None = None,
    claims: Sequence[Claim] = (),
    exact: bool | None = None,
) -> MarketModel:
    """Assemble and validate a model; raises on structural defects."""
    if exact is None:
        exact = tree.exact
    model = MarketModel(
        tree=tree,
        submarkets=tuple(submarkets),
        bound_constant=bound_constant,
        claims=tuple(claims),
        exact=exact,
    )
    report = validate_model(model)
    if not report.ok:
        issue = report.issues[0]
        exc = {
            "NonPositiveNumeraire": NonPositiveNumeraire,
            "MissingNodeValue": MissingNodeValue,
            "DimensionMismatch": DimensionMismatch,
        }.get(issue.code, SchemaError)
        raise exc(f"{issue.code} at {issue.where}: {issue.detail}")
    return model


def validate_model(model: MarketModel) -> ValidationReport:
    """Non-raising structural audit; also computes the tightest bound K."""
    issues: list[ValidationIssue] = []
    tree = model.tree
    if not model.submarkets:
        issues.append(ValidationIssue("EmptyMarket", "-", "no submarkets declared"))
    seen = set()
    for sub in model.submarkets:
        if sub.label in seen:
            issues.append(ValidationIssue("DuplicateLabel", sub.label, "label reused"))
        seen.add(sub.label)
        if sub.dim < 1:
            issues.append(ValidationIssue("DimensionMismatch", sub.label, f"dim={sub.dim}"))
        for node_id in tree.nodes:
            if node_id not in sub.numeraire:
                issues.append(
                    ValidationIssue("MissingNodeValue", f"{sub.label}/{node_id}", "numeraire missing")
                )
                continue
            if node_id not in sub.assets:
                issues.append(
                    ValidationIssue("MissingNodeValue", f"{sub.label}/{node_id}", "assets missing")
                )
                continue
            if sub.numeraire[node_id] <= 0:
                issues.append(
                    ValidationIssue(
                        "NonPositiveNumeraire",
                        f"{sub.label}/{node_id}",
                        f"numeraire={sub.numeraire[node_id]}",
                    )
                )
            if len(sub.assets[node_id]) != sub.dim:
                issues.append(
                    ValidationIssue(
                        "DimensionMismatch",
                        f"{sub.label}/{node_id}",
                        f"{len(sub.assets[node_id])} values for dim {sub.dim}",
                    )
                )

    bound: Num | None = None
    if not issues:
        candidates: list[Num] = []
        for sub in model.submarkets:
            for node_id in tree.nodes:
                num = sub.numeraire[node_id]
                candidates.append(num)
                candidates.extend(abs(v) / num for v in sub.assets[node_id])
        bound = max(candidates) if candidates else None
        if model.bound_constant is not None and bound is not None and bound > model.bound_constant:
            issues.append(
                ValidationIssue(
                    "BoundExceeded",
                    "-",
                    f"tightest bound {bound} exceeds declared constant {model.bound_constant}",
                )
            )
    for claim in model.claims:
        for atom in tree.leaves:
            if atom not in claim.payoff:
                issues.append(
                    ValidationIssue("MissingNodeValue", f"claim {claim.label}/{atom}", "payoff missing")
                )
    return ValidationReport(ok=not issues, issues=tuple(issues), bound=bound)


def discounted_prices(model: MarketModel, label: str) -> dict[str, tuple[Num, ...]]:
    """Asset values deflated by the submarket's own numeraire, node by node."""
    sub = model.submarket(label)
    return {
        node_id: tuple(v / sub.numeraire[node_id] for v in sub.assets[node_id])
        for node_id in model.tree.nodes
    }


# --- document ingestion ----------------------------------------------------
#
# Schema (see README for the full description):
#   {"mode": "rational"|"float",                     -- optional
#    "tree": {"branching": [..] | "nodes": [..],
#             "atom_probs": {leaf: value} | [..]},
#    "submarkets": [{"label", "dim", "numeraire": {node: v},
#                    "assets": {node: [v, ..]}}, ..],
#    "bound_constant": v,                            -- optional
#    "rate_structure": {...}, "zc_quotes": {...},    -- optional (multicurve)
#    "claims": [{"label", "payoff": {atom: v}}, ..]} -- optional
#
# Numbers given as strings ("3/4", "0.75") or ints are exact; JSON floats
# switch the document to float mode unless "mode" overrides.


def _document_has_floats(obj) -> bool:
    if isinstance(obj, float):
        return True
    if isinstance(obj, Mapping):
        return any(_document_has_floats(v) for v in obj.values())
    if isinstance(obj, (list, tuple)):
        return any(_document_has_floats(v) for v in obj)
    return False


def load_market(document: Mapping) -> MarketModel:
    """Parse and validate a market-spec document (already JSON-decoded)."""
    if not isinstance(document, Mapping):
        raise SchemaError("document must be a mapping")
    mode = document.get("mode")
    if mode not in (None, "rational", "float"):
        raise SchemaError(f"unknown mode {mode!r}")
    exact = (mode != "float") if mode else not _document_has_floats(document)

    tree_spec = document.get("tree")
    if not isinstance(tree_spec, Mapping):
        raise SchemaError("document lacks a 'tree' section")
    if "branching" in tree_spec:
        shape = tree_spec["branching"]
    elif "nodes" in tree_spec:
        shape = tree_spec["nodes"]
    else:
        raise SchemaError("tree section needs 'branching' or 'nodes'")
    if "atom_probs" not in tree_spec:
        raise SchemaError("tree section lacks 'atom_probs'")
    tree = build_tree(shape, tree_spec["atom_probs"], exact=exact)

    subs_spec = document.get("submarkets")
    if not isinstance(subs_spec, Sequence) or not subs_spec:
        raise SchemaError("document needs a non-empty 'submarkets' list")

    rate_structure = document.get("rate_structure")
    submarkets = []
    for entry in subs_spec:
        label = entry.get("label")
        if not label:
            raise SchemaError("submarket without label")
        dim = entry.get("dim", 1)
        assets_raw = entry.get("assets")
        if not isinstance(assets_raw, Mapping):
            raise SchemaError(f"submarket {label!r} lacks an 'assets' map")
        assets = {}
        for node_id, values in assets_raw.items():
            if not isinstance(values, Sequence) or isinstance(values, str):
                raise SchemaError(f"asset values at {label}/{node_id} must be a list")
            assets[node_id] = tuple(parse_scalar(v, exact) for v in values)
        if "numeraire" in entry:
            numeraire = {
                node_id: parse_scalar(v, exact)
                for node_id, v in entry["numeraire"].items()
            }
        elif rate_structure is not None:
            numeraire = _numeraire_from_rates(tree, rate_structure, label, exact)
        else:
            raise SchemaError(f"submarket {label!r} lacks a 'numeraire' map")
        submarkets.append(Submarket(label=label, dim=dim, assets=assets, numeraire=numeraire))

    bound = document.get("bound_constant")
    bound_c = parse_scalar(bound, exact) if bound is not None else None
    claims = tuple(
        Claim(
            label=c["label"],
            payoff={a: parse_scalar(v, exact) for a, v in c["payoff"].items()},
        )
        for c in document.get("claims", ())
    )
    return make_model(tree, submarkets, bound_constant=bound_c, claims=claims, exact=exact)


def _numeraire_from_rates(tree, rate_structure, label, exact) -> dict[str, Num]:
    # lazy import: multicurve builds on this module
    from .multicurve import RateStructure, numeraire_from_rates

    rs = RateStructure.from_document(tree, rate_structure, exact)
    if label not in rs.spreads:
        raise SchemaError(f"rate_structure lacks a spread entry for {label!r}")
    return numeraire_from_rates(tree, rs, label)


def serialize_market(model: MarketModel) -> dict:
    """Canonical document for a model: load(serialize(load(d))) == load(d)."""
    tree = model.tree
    doc: dict = {
        "mode": "rational" if model.exact else "float",
        "tree": {
            "nodes": [
                {"id": n, "parent": tree.nodes[n].parent} for n in tree.nodes
            ],
            "atom_probs": {a: scalar_to_json(tree.atom_probs[a]) for a in tree.leaves},
        },
        "submarkets": [
            {
                "label": sub.label,
                "dim": sub.dim,
                "numeraire": {n: scalar_to_json(sub.numeraire[n]) for n in tree.nodes},
                "assets": {n: [scalar_to_json(v) for v in sub.assets[n]] for n in tree.nodes},
            }
            for sub in model.submarkets
        ],
    }
    if model.bound_constant is not None:
        doc["bound_constant"] = scalar_to_json(model.bound_constant)
    if model.claims:
        doc["claims"] = [
            {"label": c.label, "payoff": {a: scalar_to_json(v) for a, v in c.payoff.items()}}
            for c in model.claims
        ]
    return doc


def scale_submarket(model: MarketModel, label: str, factor: Num) -> MarketModel:
    """Multiply one submarket's assets and numeraire by a common constant."""
    if factor <= 0:
        raise NonPositiveNumeraire(f"scale factor must be positive, got {factor}")
    subs = []
    for sub in model.submarkets:
        if sub.label == label:
            sub = replace(
                sub,
                assets={n: tuple(factor * v for v in vals) for n, vals in sub.assets.items()},
                numeraire={n: factor * v for n, v in sub.numeraire.items()},
            )
        subs.append(sub)
    return replace(model, submarkets=tuple(subs))
