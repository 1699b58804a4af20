#!/usr/bin/env python3
"""
Knowledge Lattice for OODN-KE
Closure of basic classes under the exploiters, subsumption order, Hasse covers,
bounds, lattice-law verification, relation counting and object classification
"""

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from itertools import combinations
from math import comb
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from .errors import (
    EvaluationError,
    LatticeError,
    LimitExceededError,
    NonUniqueBoundError,
    UnknownNodeError,
)
from .exploiters import INTERSECTION_SUFFIX, UNION_SUFFIX, intersection, rank_key, union
from .model import ClassSpec, ObjectInstance, Provenance, ProvenanceKind, validate_object

logger = logging.getLogger(__name__)

DEFAULT_MAX_N = 12


class LatticeMode(Enum):
    NAMED = "named"
    STRICT = "strict"


def transliterate(name: str) -> str:
    """ASCII form of a node name: ∪ -> _u, ∩ -> _n"""
    return name.replace(UNION_SUFFIX, "_u").replace(INTERSECTION_SUFFIX, "_n")


class KnowledgeLattice:
    """Closed set of classes with its subsumption order"""

    def __init__(
        self,
        mode: LatticeMode,
        basics: Sequence[ClassSpec],
        nodes: Sequence[ClassSpec],
        leq: np.ndarray,
        keys: Mapping[str, Provenance],
        key_nodes: Mapping[str, str],
        aliases: Sequence[Sequence[str]] = (),
        hasse: Optional[Sequence[Tuple[str, str]]] = None,
        top: Optional[str] = None,
        bottom: Optional[str] = None,
        empty_intersections: Sequence[str] = (),
        warnings: Sequence[str] = (),
    ):
        self.mode = mode
        self.basics: Tuple[ClassSpec, ...] = tuple(basics)
        self.nodes: Dict[str, ClassSpec] = {node.name: node for node in nodes}
        self.leq = leq
        self.keys: Dict[str, Provenance] = dict(keys)
        self.key_nodes: Dict[str, str] = dict(key_nodes)
        self.aliases: Tuple[Tuple[str, ...], ...] = tuple(tuple(g) for g in aliases)
        self.empty_intersections: Tuple[str, ...] = tuple(empty_intersections)
        self.warnings: List[str] = list(warnings)
        self.ranking: Dict[str, int] = {c.name: i for i, c in enumerate(self.basics)}
        self._index = {name: i for i, name in enumerate(self.nodes)}

        self._group_of: Dict[str, Tuple[str, ...]] = {}
        for group in self.aliases:
            for name in group:
                self._group_of[name] = group

        names = [c.name for c in self.basics]
        self.top = top or self.key_nodes.get("".join(names) + UNION_SUFFIX, names[0])
        self.bottom = bottom or self.key_nodes.get("".join(names) + INTERSECTION_SUFFIX, names[0])
        self.hasse: Tuple[Tuple[str, str], ...] = tuple(hasse) if hasse is not None else self._covering_edges()

    @classmethod
    def from_order_pairs(cls, mode: LatticeMode, basics, nodes, order: Iterable[Tuple[str, str]], **kwargs):
        """Rebuild from a stored order relation"""
        index = {node.name: i for i, node in enumerate(nodes)}
        leq = np.zeros((len(index), len(index)), dtype=bool)
        for a, b in order:
            if a not in index or b not in index:
                raise UnknownNodeError(f"Order pair ({a}, {b}) names an unknown node")
            leq[index[a], index[b]] = True
        return cls(mode, basics, nodes, leq, **kwargs)

    # Lookup

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, name: object) -> bool:
        return name in self.nodes

    def resolve(self, name: str) -> str:
        """Node name for a node name, a generation key or their ASCII forms"""
        for candidate in (name, name.replace("_u", UNION_SUFFIX).replace("_n", INTERSECTION_SUFFIX)):
            if candidate in self.nodes:
                return candidate
            if candidate in self.key_nodes:
                return self.key_nodes[candidate]
        raise UnknownNodeError(f"Unknown node: {name}")

    def node(self, name: str) -> ClassSpec:
        return self.nodes[self.resolve(name)]

    def subsumes(self, a: str, b: str) -> bool:
        """a ⊆ b"""
        return bool(self.leq[self._index[self.resolve(a)], self._index[self.resolve(b)]])

    def alias_group(self, name: str) -> Tuple[str, ...]:
        return self._group_of.get(name, (name,))

    def representative(self, name: str) -> str:
        return self.alias_group(name)[0]

    @property
    def order(self) -> List[Tuple[str, str]]:
        """All (a, b) with a ⊆ b, reflexive pairs included"""
        names = list(self.nodes)
        rows, cols = np.nonzero(self.leq)
        return [(names[i], names[j]) for i, j in zip(rows.tolist(), cols.tolist())]

    @property
    def generated(self) -> List[ClassSpec]:
        basics = {c.name for c in self.basics}
        return [node for name, node in self.nodes.items() if name not in basics]

    def _covering_edges(self) -> Tuple[Tuple[str, str], ...]:
        """Transitive reduction of the strict order on alias groups, expanded to members"""
        graph = nx.DiGraph()
        representatives = [name for name in self.nodes if self.representative(name) == name]
        graph.add_nodes_from(representatives)
        for a in representatives:
            for b in representatives:
                if a != b and self.leq[self._index[a], self._index[b]]:
                    graph.add_edge(a, b)

        reduced = nx.transitive_reduction(graph)
        edges = set()
        for a, b in reduced.edges():
            for x in self.alias_group(a):
                for y in self.alias_group(b):
                    if x in self.nodes and y in self.nodes:
                        edges.add((x, y))
        return tuple(sorted(edges))


# ---------------------------------------------------------------------------
# Counting


@dataclass
class CountReport:
    n: int
    predicted_union: int
    predicted_intersection: int
    predicted_total: int
    observed_union: Optional[int] = None
    observed_intersection: Optional[int] = None
    observed_total: Optional[int] = None
    alias_count: int = 0

    def to_dict(self) -> Dict:
        return asdict(self)


def predict_counts(n: int) -> CountReport:
    """2^n - n - 1 classes per exploiter, 2^(n+1) - 2(n+1) in total"""
    if n < 1:
        raise LatticeError(f"Class count must be at least 1, got {n}")
    per_exploiter = 2 ** n - n - 1
    return CountReport(n, per_exploiter, per_exploiter, 2 ** (n + 1) - 2 * (n + 1))


def predict_types(n: int) -> List[Dict[str, int]]:
    """Per subset size k: how many classes each exploiter yields and how many types each describes"""
    if n < 1:
        raise LatticeError(f"Class count must be at least 1, got {n}")
    return [
        {"k": k, "classes": comb(n, k), "union_types": k, "intersection_types": 1}
        for k in range(2, n + 1)
    ]


def count_report(lattice: KnowledgeLattice) -> CountReport:
    """Predictions next to the structurally distinct classes the closure produced"""
    report = predict_counts(len(lattice.basics))
    basic_prints = {c.fingerprint for c in lattice.basics}

    def distinct(kind: ProvenanceKind) -> Set[FrozenSet]:
        prints = set()
        for key, provenance in lattice.keys.items():
            if provenance.kind is kind:
                prints.add(lattice.nodes[lattice.key_nodes[key]].fingerprint)
        return prints - basic_prints

    unions = distinct(ProvenanceKind.UNION)
    intersections = distinct(ProvenanceKind.INTERSECTION)
    report.observed_union = len(unions)
    report.observed_intersection = len(intersections)
    report.observed_total = len(unions | intersections)
    report.alias_count = sum(len(group) - 1 for group in lattice.aliases)
    return report


def types_described(node: ClassSpec) -> int:
    return len(node.types)


# ---------------------------------------------------------------------------
# Closure


def _order_matrix(nodes: Sequence[ClassSpec]) -> np.ndarray:
    """leq[a, b] when every type of a is a subtype of some type of b"""
    type_index: Dict[FrozenSet, int] = {}
    node_types: List[List[int]] = []
    for node in nodes:
        ids = []
        for t in node.types:
            ids.append(type_index.setdefault(t.fingerprint, len(type_index)))
        node_types.append(ids)

    member_index: Dict[tuple, int] = {}
    for fingerprint in type_index:
        for member in fingerprint:
            member_index.setdefault(member, len(member_index))

    incidence = np.zeros((len(type_index), max(len(member_index), 1)), dtype=np.int64)
    for fingerprint, row in type_index.items():
        for member in fingerprint:
            incidence[row, member_index[member]] = 1
    subtype = (incidence @ (1 - incidence).T) == 0

    node_incidence = np.zeros((len(nodes), len(type_index)), dtype=np.int64)
    for row, ids in enumerate(node_types):
        node_incidence[row, ids] = 1
    covered = (subtype.astype(np.int64) @ node_incidence.T) > 0
    return (node_incidence @ (~covered).astype(np.int64)) == 0


def _representative_key(node: ClassSpec, ranking: Mapping[str, int]) -> tuple:
    """A basic first, then the class built from the most basics, then the lowest-ranked name"""
    basic = node.name in ranking
    return (0 if basic else 1, -len(node.provenance.constituents), rank_key(node.name, ranking))


def close_under_exploiters(
    basics: Sequence[ClassSpec], mode: LatticeMode = LatticeMode.NAMED, max_n: int = DEFAULT_MAX_N
) -> KnowledgeLattice:
    """Apply union and intersection to every subset of two or more basic classes"""
    basics = list(basics)
    n = len(basics)
    if n < 1:
        raise LatticeError("At least one basic class is required")
    if n > max_n:
        raise LimitExceededError(f"{n} basic classes exceed the closure limit of {max_n}")
    names = [c.name for c in basics]
    if len(set(names)) != n:
        raise LatticeError(f"Basic class names are not distinct: {names}")

    ranking = {name: i for i, name in enumerate(names)}
    keys: Dict[str, Provenance] = {c.name: Provenance.basic(c.name) for c in basics}
    candidates: List[ClassSpec] = list(basics)
    empty: List[str] = []

    for k in range(2, n + 1):
        subsets = list(combinations(basics, k))
        for subset in subsets:
            members = tuple(c.name for c in subset)
            key = "".join(members) + UNION_SUFFIX
            provenance = Provenance(ProvenanceKind.UNION, members)
            candidates.append(union(subset, ranking).renamed(key, provenance))
            keys[key] = provenance
        for subset in subsets:
            members = tuple(c.name for c in subset)
            key = "".join(members) + INTERSECTION_SUFFIX
            provenance = Provenance(ProvenanceKind.INTERSECTION, members)
            result = intersection(subset, ranking)
            if result.is_empty:
                empty.append(key)
            candidates.append(result.renamed(key, provenance))
            keys[key] = provenance
        logger.info(f"Closure: {len(subsets)} subsets of size {k}, {len(candidates)} classes so far")

    groups: Dict[FrozenSet, List[ClassSpec]] = {}
    for node in candidates:
        groups.setdefault(node.fingerprint, []).append(node)

    aliases: List[Tuple[str, ...]] = []
    representative: Dict[FrozenSet, str] = {}
    for fingerprint, members in groups.items():
        ordered = sorted(members, key=lambda c: _representative_key(c, ranking))
        representative[fingerprint] = ordered[0].name
        if len(ordered) > 1:
            aliases.append(tuple(c.name for c in ordered))
    aliases.sort(key=lambda g: rank_key(g[0], ranking))

    if mode is LatticeMode.STRICT:
        nodes = [c for c in candidates if representative[c.fingerprint] == c.name]
        key_nodes = {c.name: representative[c.fingerprint] for c in candidates}
    else:
        nodes = candidates
        key_nodes = {c.name: c.name for c in candidates}

    if aliases:
        logger.info(f"{len(aliases)} alias group(s) covering {sum(len(g) for g in aliases)} classes")

    lattice = KnowledgeLattice(
        mode,
        basics,
        nodes,
        _order_matrix(nodes),
        keys,
        key_nodes,
        aliases=aliases,
        empty_intersections=empty,
    )
    _check_extremes(lattice)
    logger.info(f"Lattice ({mode.value}): {len(lattice)} nodes, top {lattice.top}, bottom {lattice.bottom}")
    return lattice


def _check_extremes(lattice: KnowledgeLattice):
    top = lattice._index[lattice.top]
    bottom = lattice._index[lattice.bottom]
    if not lattice.leq[:, top].all():
        message = f"Top {lattice.top} is not above every class"
        logger.warning(message)
        lattice.warnings.append(message)
    if not lattice.leq[bottom, :].all():
        message = f"Bottom {lattice.bottom} is not below every class"
        logger.warning(message)
        lattice.warnings.append(message)


# ---------------------------------------------------------------------------
# Bounds


def _bound(lattice: KnowledgeLattice, a: str, b: str, upper: bool) -> str:
    a, b = lattice.resolve(a), lattice.resolve(b)
    leq = lattice.leq if upper else lattice.leq.T
    index = lattice._index
    names = list(lattice.nodes)

    candidates = [i for i in range(len(names)) if leq[index[a], i] and leq[index[b], i]]
    extreme = [i for i in candidates if not any(leq[j, i] and not leq[i, j] for j in candidates)]
    groups = sorted({lattice.representative(names[i]) for i in extreme}, key=lambda n: index[n])

    what = "least upper" if upper else "greatest lower"
    if not groups:
        raise LatticeError(f"{a} and {b} have no common {'upper' if upper else 'lower'} bound")
    if len(groups) > 1:
        logger.warning(f"No unique {what} bound for {a} and {b}")
        raise NonUniqueBoundError(f"No unique {what} bound for {a} and {b}", groups)

    kind = ProvenanceKind.UNION if upper else ProvenanceKind.INTERSECTION
    wanted = set(lattice.nodes[a].provenance.constituents) | set(lattice.nodes[b].provenance.constituents)
    for name in lattice.alias_group(groups[0]):
        node = lattice.nodes.get(name)
        if node is not None and node.provenance.kind is kind and set(node.provenance.constituents) == wanted:
            return name
    return groups[0]


def lub(lattice: KnowledgeLattice, a: str, b: str) -> str:
    """Unique minimal node above both a and b"""
    return _bound(lattice, a, b, upper=True)


def glb(lattice: KnowledgeLattice, a: str, b: str) -> str:
    """Unique maximal node below both a and b"""
    return _bound(lattice, a, b, upper=False)


def hasse(lattice: KnowledgeLattice) -> Tuple[Tuple[str, str], ...]:
    """Covering pairs (a, b): a below b with nothing strictly between"""
    return lattice.hasse


# ---------------------------------------------------------------------------
# Law verification


@dataclass
class LawResult:
    name: str
    description: str
    passed: bool = True
    checked: int = 0
    counterexample: Optional[Tuple[str, ...]] = None

    def record(self, holds: bool, *witness: str):
        self.checked += 1
        if not holds and self.passed:
            self.passed = False
            self.counterexample = tuple(witness)


@dataclass
class LawReport:
    samples: int
    seed: int
    results: List[LawResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def law(self, name: str) -> LawResult:
        for result in self.results:
            if result.name == name:
                return result
        raise KeyError(name)

    def to_dict(self) -> Dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed,
            "laws": [asdict(r) for r in self.results],
        }


class _Exploiters:
    """Memoized binary exploiter applications over lattice nodes"""

    def __init__(self, lattice: KnowledgeLattice):
        self.lattice = lattice
        self._cache: Dict[Tuple[str, FrozenSet, FrozenSet], ClassSpec] = {}

    def join(self, a: ClassSpec, b: ClassSpec) -> ClassSpec:
        return self._apply("union", a, b)

    def meet(self, a: ClassSpec, b: ClassSpec) -> ClassSpec:
        return self._apply("intersection", a, b)

    def _apply(self, which: str, a: ClassSpec, b: ClassSpec) -> ClassSpec:
        key = (which, a.fingerprint, b.fingerprint)
        if key not in self._cache:
            operation = union if which == "union" else intersection
            self._cache[key] = operation([a, b], self.lattice.ranking)
        return self._cache[key]


def _same(a: ClassSpec, b: ClassSpec) -> bool:
    return a.fingerprint == b.fingerprint


def verify_laws(
    lattice: KnowledgeLattice, samples: int = 1000, seed: int = 42, pair_limit: int = 10000
) -> LawReport:
    """Check the lattice laws, the order laws and the partial-order properties"""
    rng = np.random.default_rng(seed)
    names = list(lattice.nodes)
    nodes = [lattice.nodes[n] for n in names]
    ops = _Exploiters(lattice)
    report = LawReport(samples, seed)

    associative = LawResult("L1", "(a ∪ b) ∪ c = a ∪ (b ∪ c) and (a ∩ b) ∩ c = a ∩ (b ∩ c)")
    commutative = LawResult("L2", "a ∪ b = b ∪ a and a ∩ b = b ∩ a")
    idempotent = LawResult("L3", "a ∪ a = a and a ∩ a = a")
    for i, j, k in rng.integers(0, len(nodes), size=(samples, 3)).tolist():
        a, b, c = nodes[i], nodes[j], nodes[k]
        witness = (a.name, b.name, c.name)
        associative.record(
            _same(ops.join(ops.join(a, b), c), ops.join(a, ops.join(b, c)))
            and _same(ops.meet(ops.meet(a, b), c), ops.meet(a, ops.meet(b, c))),
            *witness,
        )
        commutative.record(_same(ops.join(a, b), ops.join(b, a)) and _same(ops.meet(a, b), ops.meet(b, a)), *witness)
        idempotent.record(_same(ops.join(a, a), a) and _same(ops.meet(a, a), a), *witness)

    if len(nodes) ** 2 <= pair_limit:
        pairs = [(i, j) for i in range(len(nodes)) for j in range(len(nodes))]
    else:
        pairs = [tuple(p) for p in rng.integers(0, len(nodes), size=(samples, 2)).tolist()]
    logger.debug(f"Checking {samples} triples and {len(pairs)} pairs")

    absorption = LawResult("L4", "a ∪ (a ∩ b) = a and a ∩ (a ∪ b) = a")
    order_join = LawResult("order-union", "a ⊆ b ⇔ a ∪ b = b")
    order_meet = LawResult("order-intersection", "a ⊆ b ⇔ a ∩ b = a")
    for i, j in pairs:
        a, b = nodes[i], nodes[j]
        absorption.record(_same(ops.join(a, ops.meet(a, b)), a) and _same(ops.meet(a, ops.join(a, b)), a), a.name, b.name)
        below = bool(lattice.leq[i, j])
        order_join.record(below == _same(ops.join(a, b), b), a.name, b.name)
        order_meet.record(below == _same(ops.meet(a, b), a), a.name, b.name)

    identity = LawResult("L5", "a ∪ 0 = a, a ∩ 1 = a, a ∪ 1 = 1, a ∩ 0 = 0")
    top, bottom = lattice.nodes[lattice.top], lattice.nodes[lattice.bottom]
    for a in nodes:
        identity.record(
            _same(ops.join(a, bottom), a)
            and _same(ops.meet(a, top), a)
            and _same(ops.join(a, top), top)
            and _same(ops.meet(a, bottom), bottom),
            a.name,
        )

    report.results.extend([associative, commutative, idempotent, absorption, identity, order_join, order_meet])
    report.results.extend(_partial_order_checks(lattice, names))
    for result in report.results:
        if not result.passed:
            logger.warning(f"Law {result.name} fails on {result.counterexample}")
    return report


def _partial_order_checks(lattice: KnowledgeLattice, names: List[str]) -> List[LawResult]:
    leq = lattice.leq
    reflexive = LawResult("reflexive", "a ⊆ a", checked=len(names))
    missing = np.nonzero(~np.diag(leq))[0]
    if missing.size:
        reflexive.passed = False
        reflexive.counterexample = (names[missing[0]],)

    transitive = LawResult("transitive", "a ⊆ b ∧ b ⊆ c ⇒ a ⊆ c", checked=len(names) ** 2)
    broken = np.argwhere(((leq.astype(np.int64) @ leq.astype(np.int64)) > 0) & ~leq)
    if broken.size:
        i, k = broken[0].tolist()
        j = int(np.nonzero(leq[i] & leq[:, k])[0][0])
        transitive.passed = False
        transitive.counterexample = (names[i], names[j], names[k])

    description = "a ⊆ b ∧ b ⊆ a ⇒ a = b"
    if lattice.mode is LatticeMode.NAMED:
        description = "a ⊆ b ∧ b ⊆ a ⇒ a and b are aliases"
    antisymmetric = LawResult("antisymmetric", description, checked=len(names) ** 2)
    for i, j in np.argwhere(leq & leq.T).tolist():
        if i != j and lattice.representative(names[i]) != lattice.representative(names[j]):
            antisymmetric.passed = False
            antisymmetric.counterexample = (names[i], names[j])
            break
    return [reflexive, transitive, antisymmetric]


# ---------------------------------------------------------------------------
# Relations


@dataclass
class RelationReport:
    subsumptions: List[Tuple[str, str]]
    chains: List[Tuple[str, str]]
    families: Dict[str, int]

    @property
    def total_chains(self) -> int:
        return len(self.chains)

    def to_dict(self) -> Dict:
        return {
            "subsumptions": [list(p) for p in self.subsumptions],
            "subsumption_count": len(self.subsumptions),
            "chains": [list(p) for p in self.chains],
            "chain_count": self.total_chains,
            "families": self.families,
        }


def family_name(size: int) -> str:
    return {1: "basics", 2: "pairs", 3: "triples"}.get(size, f"{size}-sets")


def enumerate_relations(lattice: KnowledgeLattice) -> RelationReport:
    """Strict subsumption pairs, plus constituent-chain links grouped by family"""
    subsumptions = [(a, b) for a, b in lattice.order if a != b]

    chains: List[Tuple[str, str]] = []
    families: Dict[str, int] = {}
    keys = list(lattice.keys.items())
    for key, provenance in keys:
        own = set(provenance.constituents)
        if provenance.kind is ProvenanceKind.BASIC:
            targets = (ProvenanceKind.UNION, ProvenanceKind.INTERSECTION)
        else:
            targets = (provenance.kind,)
        links = [
            (key, other)
            for other, theirs in keys
            if theirs.kind in targets and own < set(theirs.constituents)
        ]
        chains.extend(links)
        family = family_name(len(own))
        families[family] = families.get(family, 0) + len(links)

    return RelationReport(subsumptions, chains, families)


# ---------------------------------------------------------------------------
# Classification


def classify_object(lattice: KnowledgeLattice, obj: ObjectInstance) -> List[str]:
    """Nodes with at least one type whose verification functions accept the object"""
    accepted = []
    for name, node in lattice.nodes.items():
        for type_spec in node.types:
            try:
                if validate_object(obj, type_spec):
                    accepted.append(name)
                    break
            except EvaluationError as e:
                logger.debug(f"{obj.name} cannot be checked against {type_spec.name}: {e}")
    return accepted
