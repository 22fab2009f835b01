"""Dominating-set variants: verifiers, an exhaustive oracle, greedy baselines.

Three nested notions over an undirected graph:

* dominating set (DS): every vertex is in the set or adjacent to it;
* weakly connected dominating set (WCDS): additionally, the subgraph with
  vertex set N[S] and every graph edge that has at least one endpoint in S
  is connected;
* connected dominating set (CDS): additionally, the subgraph induced by S
  alone is connected.

Every CDS of a connected graph is a WCDS, and every WCDS is a DS, so
minimum sizes satisfy |DS| <= |WCDS| <= |CDS|.

All functions take any graph object with an integer field `n` and a method
`neighbors(i) -> set of int` (both `udg.UnitDiskGraph` and the fixture
helper `AdjacencyGraph` below qualify).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

VertexSet = frozenset[int]

# Subset enumeration is exponential; refuse graphs where 2^n is unreasonable.
EXHAUSTIVE_NODE_LIMIT = 20


class SetKind(Enum):
    DS = "DS"
    CDS = "CDS"
    WCDS = "WCDS"


class GreedyVariant(Enum):
    I = "I"
    II = "II"


class AdjacencyGraph:
    """Minimal undirected graph for hand-built fixtures (paths, cycles, stars)."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        self.n = n
        self._adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError("self loops not allowed")
            self._adj[u].add(v)
            self._adj[v].add(u)

    def neighbors(self, i: int) -> set[int]:
        if not 0 <= i < self.n:
            raise IndexError(f"node id {i} out of range for graph with n={self.n}")
        return self._adj[i]

    @classmethod
    def path(cls, n: int) -> "AdjacencyGraph":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "AdjacencyGraph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, leaves: int) -> "AdjacencyGraph":
        """K(1,leaves) with the center at node 0."""
        return cls(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


@dataclass(frozen=True)
class DomsetReport:
    """Classification of one vertex set against all three verifiers."""

    set_size: int
    is_dominating: bool
    is_cds: bool
    is_wcds: bool


def _check_members(g, s: Iterable[int]) -> frozenset[int]:
    members = frozenset(s)
    for v in members:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} not a valid node id (n={g.n})")
    return members


def _covered(g, s: frozenset[int]) -> set[int]:
    cov = set(s)
    for v in s:
        cov.update(g.neighbors(v))
    return cov


def _component_reach(adj: dict[int, set[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_dominating(g, s: Iterable[int]) -> bool:
    """True iff every vertex of g is in s or adjacent to a member of s."""
    members = _check_members(g, s)
    if g.n == 0:
        return True
    if not members:
        return False
    return len(_covered(g, members)) == g.n


def is_cds(g, s: Iterable[int]) -> bool:
    """True iff s dominates g and the subgraph induced by s is connected."""
    members = _check_members(g, s)
    if not is_dominating(g, members):
        return False
    if len(members) <= 1:
        return True
    adj = {v: g.neighbors(v) & members for v in members}
    start = min(members)
    return len(_component_reach(adj, start)) == len(members)


def is_wcds(g, s: Iterable[int]) -> bool:
    """True iff s dominates g and the weakly induced subgraph is connected.

    The weakly induced subgraph has vertex set N[s] (members plus all their
    neighbors) and every edge of g with at least one endpoint in s.
    """
    members = _check_members(g, s)
    if not is_dominating(g, members):
        return False
    if len(members) <= 1:
        return True
    verts = _covered(g, members)
    adj: dict[int, set[int]] = {v: set() for v in verts}
    for v in members:
        for w in g.neighbors(v):
            adj[v].add(w)
            adj[w].add(v)
    start = min(verts)
    return len(_component_reach(adj, start)) == len(verts)


def star_of(g, v: int) -> VertexSet:
    """Closed neighborhood of v: the vertex itself plus everything adjacent."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} not a valid node id (n={g.n})")
    return frozenset(g.neighbors(v)) | {v}


def classify(g, s: Iterable[int]) -> DomsetReport:
    members = _check_members(g, s)
    dom = is_dominating(g, members)
    return DomsetReport(
        set_size=len(members),
        is_dominating=dom,
        is_cds=dom and is_cds(g, members),
        is_wcds=dom and is_wcds(g, members),
    )


_VERIFIERS = {
    SetKind.DS: is_dominating,
    SetKind.CDS: is_cds,
    SetKind.WCDS: is_wcds,
}


def min_set_exhaustive(g, kind: SetKind) -> Optional[VertexSet]:
    """Minimum-cardinality set of the requested kind, by subset enumeration.

    Subsets are enumerated in increasing cardinality and, within one
    cardinality, in lexicographic member order, so the first hit is both
    minimum-size and the lexicographically smallest winner.  Returns None
    when no valid set exists (CDS/WCDS on a disconnected graph).  Guarded
    to g.n <= EXHAUSTIVE_NODE_LIMIT; this is an oracle for desk-scale
    graphs, not an algorithm.
    """
    if g.n > EXHAUSTIVE_NODE_LIMIT:
        raise ValueError(
            f"exhaustive search limited to n <= {EXHAUSTIVE_NODE_LIMIT}, got n={g.n}")
    verifier = _VERIFIERS[kind]
    if g.n == 0:
        return frozenset()
    for k in range(1, g.n + 1):
        for combo in itertools.combinations(range(g.n), k):
            s = frozenset(combo)
            if verifier(g, s):
                return s
    return None


def _greedy_variant_one(g, nodes: list[int]) -> set[int]:
    # Grow a connected set from the highest-degree vertex; each step adds the
    # frontier vertex covering the most still-uncovered vertices.
    node_set = set(nodes)
    start = max(nodes, key=lambda v: (len(g.neighbors(v) & node_set), -v))
    chosen = {start}
    covered = {start} | (g.neighbors(start) & node_set)
    while covered != node_set:
        frontier = sorted(
            v for c in chosen for v in g.neighbors(c)
            if v in node_set and v not in chosen
        )
        best = None
        best_gain = -1
        for v in frontier:
            gain = len((star_of(g, v) & node_set) - covered)
            if gain > best_gain:
                best, best_gain = v, gain
        if best is None or best_gain == 0:
            # Frontier exhausted with vertices left over can only happen on a
            # disconnected component passed in error; cover the rest directly.
            chosen.update(node_set - covered)
            break
        chosen.add(best)
        covered |= star_of(g, best) & node_set
    return chosen


def _greedy_variant_two(g, nodes: list[int]) -> set[int]:
    # Phase 1: plain greedy dominating set (max uncovered coverage).
    node_set = set(nodes)
    chosen: set[int] = set()
    covered: set[int] = set()
    while covered != node_set:
        best = None
        best_gain = -1
        for v in nodes:
            if v in chosen:
                continue
            gain = len((star_of(g, v) & node_set) - covered)
            if gain > best_gain:
                best, best_gain = v, gain
        chosen.add(best)
        covered |= star_of(g, best) & node_set

    # Phase 2: stitch the fragments of the induced subgraph together along
    # shortest paths in g, nearest fragment pair first.
    while True:
        fragments = _induced_fragments(g, chosen)
        if len(fragments) <= 1:
            break
        base = fragments[0]
        path = _shortest_path_to_other_fragment(g, node_set, base, chosen)
        if not path:
            break  # only possible if fed a disconnected vertex set
        chosen.update(path)
    return chosen


def _induced_fragments(g, chosen: set[int]) -> list[set[int]]:
    adj = {v: g.neighbors(v) & chosen for v in chosen}
    remaining = set(chosen)
    frags = []
    while remaining:
        start = min(remaining)
        comp = _component_reach(adj, start)
        frags.append(comp)
        remaining -= comp
    frags.sort(key=min)
    return frags


def _shortest_path_to_other_fragment(g, node_set: set[int], base: set[int],
                                     chosen: set[int]) -> list[int]:
    # BFS from the whole base fragment to the nearest vertex of any other
    # fragment; ties broken by visiting smaller node ids first.
    parent: dict[int, int | None] = {v: None for v in base}
    frontier = sorted(base)
    target = None
    while frontier and target is None:
        nxt = []
        for v in frontier:
            for w in sorted(g.neighbors(v) & node_set):
                if w in parent:
                    continue
                parent[w] = v
                if w in chosen:
                    target = w
                    break
                nxt.append(w)
            if target is not None:
                break
        frontier = nxt
    if target is None:
        return []  # no other fragment reachable within this component
    path = []
    v = parent[target]
    while v is not None and v not in base:
        path.append(v)
        v = parent[v]
    return path


def greedy_cds_baseline(g, variant: GreedyVariant) -> VertexSet:
    """Greedy connected-dominating-set heuristic, per connected component.

    These are documented stand-ins used for relative comparison only.
    Variant I grows a single connected set from the maximum-degree vertex,
    always adding the frontier vertex that covers the most uncovered
    vertices.  Variant II first builds a greedy dominating set, then joins
    its fragments along shortest paths.  All ties break toward the smaller
    node id.  On a disconnected graph the result is the per-component
    union, so is_cds holds on every component.
    """
    builder = _greedy_variant_one if variant is GreedyVariant.I else _greedy_variant_two
    adj = {v: g.neighbors(v) for v in range(g.n)}
    result: set[int] = set()
    remaining = set(range(g.n))
    while remaining:
        start = min(remaining)
        comp = _component_reach(adj, start)
        result |= builder(g, sorted(comp))
        remaining -= comp
    return frozenset(result)


def induced_subgraph(g, nodes: Iterable[int]) -> tuple[AdjacencyGraph, dict[int, int]]:
    """Subgraph induced on `nodes`, relabeled 0..m-1 in sorted-id order.

    Returns the new graph and the old-id -> new-id map.
    """
    keep = sorted(_check_members(g, nodes))
    relabel = {old: new for new, old in enumerate(keep)}
    edges = []
    for old in keep:
        for w in g.neighbors(old):
            if w in relabel and old < w:
                edges.append((relabel[old], relabel[w]))
    return AdjacencyGraph(len(keep), edges), relabel
