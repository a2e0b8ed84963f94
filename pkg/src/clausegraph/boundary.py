"""Ordered boundary specifications and the fragments they carve out of a graph.

A specification is an ordered tuple of distinct vertices plus a set of edges
touching them; a valid one determines a unique boundary-attached fragment:
the chosen vertices, everything reachable behind the chosen edges once the
boundary is deleted, and the edges among those.  ``enumerate_brep`` lists
every valid specification of bounded rank over a sample, fragments included.

Fragments keep their source vertex ids, so rebuilding one from the same
specification gives an identical object; deduplication up to isomorphism is
the caller's business (the learner collapses representations through the
fragments' canonical keys).
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional, Sequence

from .graphs import (
    EMPTY_INTERFACE_GRAPH,
    GraphWithInterface,
    LabeledGraph,
)


class BoundarySpec:
    """(source graph index, ordered boundary tuple, boundary edge set)."""

    __slots__ = ("source", "beta", "boundary_edges")

    def __init__(self, source: Optional[int], beta: Sequence[int],
                 boundary_edges: Iterable[tuple]):
        self.source = source
        self.beta = tuple(beta)
        self.boundary_edges = frozenset(
            (u, v) if u < v else (v, u) for u, v in boundary_edges)

    @property
    def rank(self) -> int:
        return len(self.beta)

    def __eq__(self, other):
        if not isinstance(other, BoundarySpec):
            return NotImplemented
        return (self.source == other.source and self.beta == other.beta
                and self.boundary_edges == other.boundary_edges)

    def __hash__(self):
        return hash((self.source, self.beta, self.boundary_edges))

    def __repr__(self):
        return f"BoundarySpec(source={self.source}, beta={self.beta}, eb={sorted(self.boundary_edges)})"


class BoundaryRep:
    """A specification together with the fragment it determines."""

    __slots__ = ("spec", "fragment")

    def __init__(self, spec: BoundarySpec, fragment: GraphWithInterface):
        self.spec = spec
        self.fragment = fragment

    @property
    def rank(self) -> int:
        return self.spec.rank

    def __eq__(self, other):
        if not isinstance(other, BoundaryRep):
            return NotImplemented
        return self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"BoundaryRep({self.spec!r})"


#: The distinguished empty representation: empty boundary, empty edge set,
#: empty fragment.  Its predicate is every hypothesis' start symbol.
EMPTY_REP = BoundaryRep(BoundarySpec(None, (), ()), EMPTY_INTERFACE_GRAPH)


def validate_spec(g: LabeledGraph, beta: Sequence[int], eb: Iterable[tuple]) -> bool:
    """True iff ``beta`` lists distinct vertices of ``g``, ``eb`` is a set of
    edges of ``g``, and every chosen edge meets the boundary set."""
    beta = tuple(beta)
    if len(set(beta)) != len(beta):
        return False
    vlabel = g.vlabel
    if any(v not in vlabel for v in beta):
        return False
    bset = set(beta)
    edges = g.edges
    for u, v in eb:
        key = (u, v) if u < v else (v, u)
        if key not in edges:
            return False
        if key[0] not in bset and key[1] not in bset:
            return False
    return True


def build_fragment(g: LabeledGraph, beta: Sequence[int],
                   eb: Iterable[tuple]) -> GraphWithInterface:
    """Fragment determined by a valid specification; raises on invalid input."""
    beta = tuple(beta)
    if not validate_spec(g, beta, eb):
        raise ValueError(f"invalid boundary specification beta={beta}")
    bset = set(beta)
    eb = {(u, v) if u < v else (v, u) for u, v in eb}
    seeds = []
    for u, v in eb:
        if u not in bset:
            seeds.append(u)
        if v not in bset:
            seeds.append(v)
    interior = set()
    queue = deque(seeds)
    while queue:
        x = queue.popleft()
        if x in interior:
            continue
        interior.add(x)
        for y, _ in g.neighbors(x):
            if y not in bset and y not in interior:
                queue.append(y)
    vlabel = {v: g.vlabel[v] for v in bset}
    vlabel.update((v, g.vlabel[v]) for v in interior)
    edges = {e: g.edges[e] for e in eb}
    for v in interior:
        for u, lab in g.neighbors(v):
            if u in interior:
                key = (u, v) if u < v else (v, u)
                edges[key] = lab
    return GraphWithInterface(LabeledGraph(vlabel, edges), beta)


def brep_for_graph(g: LabeledGraph, w: int, source: Optional[int] = None) -> list:
    """All boundary representations of rank 0..w for one graph.

    Deterministic order: rank ascending, boundary tuples in lexicographic
    vertex-id order, edge subsets in binary-counter order over the sorted
    incident edge list.
    """
    out = []
    verts = sorted(g.vertices)
    for r in range(w + 1):
        for beta in _tuples(verts, r):
            bset = set(beta)
            incident = sorted(e for e in g.edges
                              if e[0] in bset or e[1] in bset)
            for mask in range(1 << len(incident)):
                eb = [incident[i] for i in range(len(incident)) if mask >> i & 1]
                spec = BoundarySpec(source, beta, eb)
                out.append(BoundaryRep(spec, build_fragment(g, beta, eb)))
    return out


def _tuples(verts, r):
    """Ordered tuples of distinct vertices, lexicographically."""
    if r == 0:
        yield ()
        return
    def rec(prefix):
        if len(prefix) == r:
            yield tuple(prefix)
            return
        for v in verts:
            if v not in prefix:
                yield from rec(prefix + [v])
    yield from rec([])


def enumerate_brep(sample: Sequence[LabeledGraph], w: int, delta: int) -> list:
    """Every valid specification of rank 0..w over every sample graph, with
    fragments.  Distinct specifications stay distinct even when fragments are
    isomorphic.  A sample graph exceeding the degree bound is an error."""
    for i, g in enumerate(sample):
        if g.max_degree() > delta:
            raise ValueError(
                f"sample graph {i} has max degree {g.max_degree()}, "
                f"exceeding the bound {delta}")
    out = []
    for i, g in enumerate(sample):
        out.extend(brep_for_graph(g, w, source=i))
    return out


def rank_counts(reps: Iterable[BoundaryRep]) -> dict:
    counts = {}
    for rep in reps:
        counts[rep.rank] = counts.get(rep.rank, 0) + 1
    return dict(sorted(counts.items()))
