"""Predicate symbols, atoms, clauses, and whole clause systems.

A clause is fixed-interface when its body consists of star patterns matched
one-to-one with the head pattern's hyperedge occurrences by variable label.
``ClauseSystem`` enforces that shape on construction; the standalone checks
(`check_fixed_interface`, `check_bounded`, `check_degree_safe`) stay
available for validating foreign input.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Optional, Sequence

from .graphs import GraphPattern, canonical_key, is_star_pattern


@dataclass(frozen=True)
class PredicateSymbol:
    name: str
    irank: int

    def __post_init__(self):
        if self.irank < 0:
            raise ValueError(f"predicate {self.name!r}: negative interface rank")


class Atom:
    __slots__ = ("predicate", "pattern")

    def __init__(self, predicate: PredicateSymbol, pattern: GraphPattern):
        if pattern.rank != predicate.irank:
            raise ValueError(
                f"atom {predicate.name}: pattern interface rank {pattern.rank} "
                f"!= predicate rank {predicate.irank}")
        self.predicate = predicate
        self.pattern = pattern

    def __eq__(self, other):
        if not isinstance(other, Atom):
            return NotImplemented
        return self.predicate == other.predicate and self.pattern == other.pattern

    def __hash__(self):
        return hash((self.predicate, self.pattern))

    def __repr__(self):
        return f"Atom({self.predicate.name})"


class Clause:
    __slots__ = ("head", "body", "_shape_key")

    def __init__(self, head: Atom, body: Sequence[Atom] = ()):
        self.head = head
        self.body = tuple(body)
        self._shape_key = None

    @property
    def is_fact(self) -> bool:
        return not self.body

    def variables(self) -> dict:
        out = dict(self.head.pattern.variables())
        for atom in self.body:
            for lab, rank in atom.pattern.variables().items():
                if out.setdefault(lab, rank) != rank:
                    raise ValueError(f"variable {lab!r} used with two ranks in one clause")
        return out

    @property
    def shape_key(self):
        """Canonical key of the clause up to variable renaming and body order."""
        if self._shape_key is None:
            self._shape_key = _clause_shape_key(self)
        return self._shape_key

    def __repr__(self):
        return (f"Clause({self.head.predicate.name} <- "
                f"{', '.join(a.predicate.name for a in self.body)})")


def _clause_shape_key(clause: Clause):
    labels = sorted(clause.variables())
    if not labels:
        return (clause.head.predicate.name,
                canonical_key(clause.head.pattern),
                ())
    best = None
    for perm in permutations(range(len(labels))):
        rename = {lab: f"v{perm[i]}" for i, lab in enumerate(labels)}
        head_key = canonical_key(clause.head.pattern, rename_vars=rename)
        body_key = tuple(sorted(
            (rename[a.pattern.hyperedges[0].label],
             a.predicate.name,
             canonical_key(a.pattern, rename_vars=rename))
            for a in clause.body))
        cand = (clause.head.predicate.name, head_key, body_key)
        if best is None or cand < best:
            best = cand
    return best


def check_fixed_interface(clause: Clause) -> bool:
    """True iff every body atom is a star and the body atoms correspond
    one-to-one with the head's hyperedge occurrences by variable label and
    rank."""
    for atom in clause.body:
        if not is_star_pattern(atom.pattern):
            return False
    try:
        clause.variables()
    except ValueError:
        return False
    head_occ = sorted((h.label, h.rank) for h in clause.head.pattern.hyperedges)
    body_occ = sorted((a.pattern.hyperedges[0].label, a.pattern.hyperedges[0].rank)
                      for a in clause.body)
    return head_occ == body_occ


class ClauseSystem:
    """A finite set of fixed-interface clauses with a designated start symbol."""

    def __init__(self, predicates: Iterable[PredicateSymbol],
                 clauses: Iterable[Clause], start: PredicateSymbol):
        self.predicates = tuple(sorted(set(predicates), key=lambda p: (p.name, p.irank)))
        by_name = {}
        for p in self.predicates:
            if by_name.setdefault(p.name, p) != p:
                raise ValueError(f"predicate name {p.name!r} declared with two ranks")
        self.by_name = by_name
        if start.name not in by_name or by_name[start.name] != start:
            raise ValueError(f"start predicate {start.name!r} is not declared")
        if start.irank != 0:
            raise ValueError(f"start predicate {start.name!r} must have interface rank 0")
        self.start = start
        seen = {}
        kept = []
        for i, cl in enumerate(clauses):
            for atom in (cl.head, *cl.body):
                declared = by_name.get(atom.predicate.name)
                if declared is None or declared != atom.predicate:
                    raise ValueError(
                        f"clause {i}: predicate {atom.predicate.name!r} is not declared")
            if not check_fixed_interface(cl):
                raise ValueError(f"clause {i}: not a fixed-interface clause")
            key = cl.shape_key
            if key not in seen:
                seen[key] = cl
                kept.append(cl)
        self.clauses = tuple(kept)

    def clauses_for(self, pred_name: str) -> list:
        return [cl for cl in self.clauses if cl.head.predicate.name == pred_name]

    def digest_key(self) -> tuple:
        """Deterministic identity of the whole system up to clause order."""
        return (tuple((p.name, p.irank) for p in self.predicates),
                self.start.name,
                tuple(sorted(cl.shape_key for cl in self.clauses)))

    def __repr__(self):
        return (f"ClauseSystem(predicates={len(self.predicates)}, "
                f"clauses={len(self.clauses)}, start={self.start.name!r})")


@dataclass(frozen=True)
class ParamTuple:
    """Structural bounds: clause count, head hyperedges, body length, variable
    rank, pattern degree, generated-graph degree, and the head-pattern vertex
    cap that keeps the candidate space finite."""

    m: int
    s: int
    t: int
    w: int
    d: int
    delta: int
    h_max: int

    def __post_init__(self):
        for field in ("m", "s", "t", "w", "d", "delta", "h_max"):
            if getattr(self, field) < 0:
                raise ValueError(f"parameter {field} must be non-negative")


def check_bounded(gamma: ClauseSystem, params: ParamTuple) -> list:
    """Violations of the structural bounds; empty means bounded.  Only target
    systems are held to the clause-count bound — learned hypotheses may
    exceed it."""
    out = []
    if len(gamma.clauses) > params.m:
        out.append(f"clause count {len(gamma.clauses)} exceeds m={params.m}")
    for i, cl in enumerate(gamma.clauses):
        for lab, rank in sorted(cl.variables().items()):
            if rank > params.w:
                out.append(f"clause {i}: variable {lab!r} has rank {rank} > w={params.w}")
        if len(cl.head.pattern.hyperedges) > params.s:
            out.append(f"clause {i}: head has {len(cl.head.pattern.hyperedges)} "
                       f"hyperedges > s={params.s}")
        if len(cl.body) > params.t:
            out.append(f"clause {i}: body has {len(cl.body)} atoms > t={params.t}")
        for where, pattern in (("head", cl.head.pattern),
                               *((f"body[{j}]", a.pattern) for j, a in enumerate(cl.body))):
            deg = pattern.base.graph.max_degree()
            if deg > params.d:
                out.append(f"clause {i}: {where} pattern has max degree {deg} > d={params.d}")
    return out


def clause_degree_safe(clause: Clause) -> bool:
    """Every head port vertex sits in exactly one port list and touches no
    ordinary head edge."""
    head = clause.head.pattern
    counts = {}
    for h in head.hyperedges:
        for p in h.ports:
            counts[p] = counts.get(p, 0) + 1
    if any(c > 1 for c in counts.values()):
        return False
    g = head.base.graph
    return all(g.degree(p) == 0 for p in counts)


def check_degree_safe(gamma: ClauseSystem) -> bool:
    return all(clause_degree_safe(cl) for cl in gamma.clauses)


def predicate_for_fragment(fragment, rank: Optional[int] = None) -> PredicateSymbol:
    """Stable predicate symbol for a fragment class: rank plus a digest of the
    fragment's canonical key, so names agree across runs."""
    from .graphs import key_digest
    r = fragment.rank if rank is None else rank
    return PredicateSymbol(f"p{r}_{key_digest(fragment)}", r)
