"""Communication patterns as directed graphs.

An edge ``(i, j)`` means party ``j``'s output may depend on ``x_i``. Every
party may always read its own input, so ``Dep(i) = {i} | {j : (j, i) in edges}``.

Separability only looks at input dependence. Letting outputs inside a block
also depend on other outputs of that block adds nothing at the level of
extreme points, because any randomised strategy splits into deterministic
ones whose outputs are functions of inputs alone.
"""
from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field

from .core import check_party_count

PP = "PP"
TP = "TP"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class CommGraph:
    m: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        check_party_count(self.m)
        clean = set()
        for e in self.edges:
            i, j = (int(v) for v in e)
            if not (1 <= i <= self.m and 1 <= j <= self.m):
                raise GraphError(f"edge {e} out of range for m={self.m}")
            if i == j:
                warnings.warn(f"ignoring self-loop on party {i}; self-dependence is implicit", stacklevel=3)
                continue
            clean.add((i, j))
        object.__setattr__(self, "edges", frozenset(clean))

    def with_edge(self, i: int, j: int) -> CommGraph:
        return CommGraph(self.m, self.edges | {(i, j)})

    @classmethod
    def from_deps(cls, m: int, deps) -> CommGraph:
        """Build the graph whose dependency sets are ``deps[i]`` (1-based dict or sequence)."""
        if not isinstance(deps, dict):
            deps = {i + 1: d for i, d in enumerate(deps)}
        return cls(m, frozenset((j, i) for i, d in deps.items() for j in d if j != i))

    def to_json(self) -> dict:
        return {"m": self.m, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, doc: dict) -> CommGraph:
        return cls(int(doc["m"]), frozenset(tuple(e) for e in doc.get("edges", [])))

    @classmethod
    def load(cls, path) -> CommGraph:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def dependency_sets(g: CommGraph) -> dict[int, frozenset[int]]:
    deps = {i: {i} for i in range(1, g.m + 1)}
    for j, i in g.edges:
        deps[i].add(j)
    return {i: frozenset(d) for i, d in deps.items()}


@dataclass(frozen=True)
class Classification:
    kind: str
    witness: tuple[int, int] | None = None
    cover: dict | None = None  # (i, j) -> k with {i, j} <= Dep(k), TP only

    def to_json(self) -> dict:
        doc = {"class": self.kind}
        if self.kind == PP:
            doc["witness"] = list(self.witness)
        else:
            doc["witness"] = {f"{i},{j}": k for (i, j), k in sorted(self.cover.items())}
        return doc


def classify(g: CommGraph) -> Classification:
    """PP if some pair of inputs is never seen together by one party, else TP.

    Witnesses are the lexicographically smallest unpaired pair, or for TP the
    lowest-index covering party of every pair.
    """
    if g.m < 2:
        raise GraphError("classification needs at least two parties")
    deps = dependency_sets(g)
    cover = {}
    for i, j in itertools.combinations(range(1, g.m + 1), 2):
        k = next((k for k in range(1, g.m + 1) if i in deps[k] and j in deps[k]), None)
        if k is None:
            return Classification(PP, witness=(i, j))
        cover[(i, j)] = k
    return Classification(TP, cover=cover)


def is_separable(g: CommGraph) -> bool:
    """True iff the undirected support of the edges is disconnected."""
    if g.m < 2:
        raise GraphError("separability needs at least two parties")
    adj = {i: set() for i in range(1, g.m + 1)}
    for i, j in g.edges:
        adj[i].add(j)
        adj[j].add(i)
    seen, stack = {1}, [1]
    while stack:
        for n in adj[stack.pop()] - seen:
            seen.add(n)
            stack.append(n)
    return len(seen) < g.m


def empty(m: int) -> CommGraph:
    return CommGraph(m)


def complete(m: int) -> CommGraph:
    return CommGraph(m, frozenset(itertools.permutations(range(1, m + 1), 2)))


def blocks(m: int, *parts) -> CommGraph:
    """Complete communication inside each block, none between blocks."""
    return CommGraph(m, frozenset(e for p in parts for e in itertools.permutations(p, 2)))


def fig2(m: int, k: int) -> CommGraph:
    """Most general partially paired graph with parties 1 and m unpaired.

    Circles {2..k} and {k+1..m-1} are internally complete and fully linked to
    each other; 1 talks both ways with the first circle and only listens to the
    second; m mirrors this. No arrows between 1 and m.
    """
    if m < 4 or not 2 <= k <= m - 2:
        raise GraphError(f"fig2 needs m >= 4 and 2 <= k <= m-2, got m={m}, k={k}")
    left, right = range(2, k + 1), range(k + 1, m)
    mid = [*left, *right]
    edges = set(itertools.permutations(mid, 2))
    edges |= {(1, a) for a in left} | {(a, 1) for a in left} | {(b, 1) for b in right}
    edges |= {(m, b) for b in right} | {(b, m) for b in right} | {(a, m) for a in left}
    return CommGraph(m, frozenset(edges))


_FIG1_DEPS = {
    "fig1_i": {1: {1}, 2: {2}, 3: {3}, 4: {4}},
    "fig1_iia": {1: {1, 3}, 2: {2, 4}, 3: {1, 3}, 4: {2, 4}},
    "fig1_iib": {1: {1, 2, 3}, 2: {1, 2, 3}, 3: {1, 2, 3}, 4: {4}},
    "fig1_iii": {1: {1, 2, 3}, 2: {1, 2, 4}, 3: {1, 2, 3}, 4: {1, 2, 4}},
    "fig1_iva": {1: {1, 2, 3, 4}, 2: {2}, 3: {3}, 4: {4}},
    "fig1_ivb": {1: {1, 3}, 2: {1, 2}, 3: {2, 3, 4}, 4: {1, 2, 4}},
    "fig1_v": {i: {1, 2, 3, 4} for i in range(1, 5)},
}

# a1(x1,x2), a2(x1,x2), a3(x2,x3): non-separable yet partially paired
NONSEPARABLE_PP_EXAMPLE = {1: {1, 2}, 2: {1, 2}, 3: {2, 3}}

CATALOG_NAMES = (*_FIG1_DEPS, "fig2", "empty", "complete", "nonseparable_pp")


def catalog(name: str, m: int | None = None, k: int | None = None) -> CommGraph:
    if name in _FIG1_DEPS:
        return CommGraph.from_deps(4, _FIG1_DEPS[name])
    if name == "nonseparable_pp":
        return CommGraph.from_deps(3, NONSEPARABLE_PP_EXAMPLE)
    if name in ("empty", "complete"):
        if m is None:
            raise GraphError(f"{name} needs m")
        return empty(m) if name == "empty" else complete(m)
    if name == "fig2":
        if m is None or k is None:
            raise GraphError("fig2 needs m and k")
        return fig2(m, k)
    raise GraphError(f"unknown catalog graph {name!r}")


def all_graphs(m: int):
    """Every directed graph on m parties (2**(m(m-1)) of them)."""
    pairs = list(itertools.permutations(range(1, m + 1), 2))
    for mask in range(1 << len(pairs)):
        yield CommGraph(m, frozenset(p for b, p in enumerate(pairs) if mask >> b & 1))


def random_graph(m: int, rng, p: float = 0.5) -> CommGraph:
    pairs = list(itertools.permutations(range(1, m + 1), 2))
    keep = rng.random(len(pairs)) < p
    return CommGraph(m, frozenset(e for e, k in zip(pairs, keep) if k))
