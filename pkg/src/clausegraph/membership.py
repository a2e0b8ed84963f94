"""Bottom-up membership decision for fixed-interface clause systems.

The engine instantiates clauses over the universe of boundary-attached
fragments of the input graph (rank at most w), saturates the derivable
(predicate, fragment) pairs by semi-naive iteration, and finally matches the
whole input graph directly against realizations of start-predicate heads.
The whole-graph goal is matched directly because the empty boundary
specification yields the empty fragment, never the graph itself.

Provenance is kept for every derived pair, so a successful query can be
replayed as a derivation tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .boundary import brep_for_graph
from .clauses import Clause, ClauseSystem, ParamTuple, PredicateSymbol
from .graphs import (
    GraphWithInterface,
    LabeledGraph,
    closed,
    invariant_signature,
    iso_check,
    realize,
)


class FragmentUniverse:
    """Fragments of one host graph, deduplicated up to isomorphism.

    Lookup buckets on a cheap isomorphism-invariant signature and resolves
    within a bucket by exact isomorphism, which keeps the hot path free of
    full canonicalization.
    """

    def __init__(self):
        self.fragments: list[GraphWithInterface] = []
        self.by_rank: dict[int, list[int]] = {}
        self.by_rank_labels: dict[tuple, list[int]] = {}
        self._buckets: dict[tuple, list[int]] = {}

    def add(self, g: GraphWithInterface) -> int:
        idx = self.find(g)
        if idx is not None:
            return idx
        idx = len(self.fragments)
        self.fragments.append(g)
        self.by_rank.setdefault(g.rank, []).append(idx)
        self.by_rank_labels.setdefault((g.rank, g.interface_labels()), []).append(idx)
        self._buckets.setdefault(invariant_signature(g), []).append(idx)
        return idx

    def find(self, g: GraphWithInterface) -> Optional[int]:
        for idx in self._buckets.get(invariant_signature(g), ()):
            if iso_check(self.fragments[idx], g):
                return idx
        return None

    def __len__(self):
        return len(self.fragments)

    def __getitem__(self, idx: int) -> GraphWithInterface:
        return self.fragments[idx]


def sub_w(g: LabeledGraph, w: int) -> FragmentUniverse:
    """All boundary-attached fragments of ``g`` with rank <= w, one
    representative per isomorphism class, in deterministic enumeration
    order."""
    universe = FragmentUniverse()
    for rep in brep_for_graph(g, w):
        universe.add(rep.fragment)
    return universe


@dataclass
class Provenance:
    clause_index: int
    bindings: dict  # variable label -> fragment index


@dataclass
class DerivedAtomSet:
    universe: FragmentUniverse
    derived: dict = field(default_factory=dict)  # (pred name, frag idx) -> Provenance
    rounds: int = 0

    def holds(self, pred: str, frag_idx: int) -> bool:
        return (pred, frag_idx) in self.derived

    def by_predicate(self, pred: str) -> list:
        return sorted(idx for (p, idx) in self.derived if p == pred)


class _CompiledClause:
    """Per-clause data the fixpoint loop needs: distinct variables with their
    ranks, the star port labels each variable must satisfy, and the body
    atoms grouped per variable."""

    __slots__ = ("clause", "index", "head_pred", "pattern", "vars",
                 "var_ranks", "star_labels", "body_preds", "constraints")

    def __init__(self, clause: Clause, index: int):
        self.clause = clause
        self.index = index
        self.head_pred = clause.head.predicate.name
        self.pattern = clause.head.pattern
        self.var_ranks = clause.variables()
        self.vars = sorted(self.var_ranks)
        star_labels = {}
        body_preds = {v: [] for v in self.vars}
        for atom in clause.body:
            h = atom.pattern.hyperedges[0]
            labels = tuple(atom.pattern.base.graph.vlabel[p] for p in h.ports)
            star_labels.setdefault(h.label, set()).add(labels)
            body_preds[h.label].append(atom.predicate.name)
        self.star_labels = star_labels
        self.body_preds = body_preds
        # per variable: the (rank, interface labels) a binding must carry, or
        # None when the clause's stars disagree and nothing can ever bind
        self.constraints = {}
        for var in self.vars:
            wanted = star_labels.get(var)
            if not wanted:
                self.constraints[var] = (self.var_ranks[var], None)
            elif len(wanted) == 1:
                self.constraints[var] = (self.var_ranks[var], next(iter(wanted)))
            else:
                self.constraints[var] = None

    def binding_applies(self, var: str, fragment: GraphWithInterface) -> bool:
        """A bound graph fits a variable when every star atom over the
        variable can absorb it: interface labels equal the star's ports."""
        constraint = self.constraints[var]
        if constraint is None:
            return False
        rank, labels = constraint
        if fragment.rank != rank:
            return False
        return labels is None or fragment.interface_labels() == labels

    def admissible(self, var: str, universe: FragmentUniverse):
        """Universe indices a binding for ``var`` may range over."""
        constraint = self.constraints[var]
        if constraint is None:
            return ()
        rank, labels = constraint
        if labels is None:
            return universe.by_rank.get(rank, ())
        return universe.by_rank_labels.get((rank, labels), ())


def _compiled(gamma: ClauseSystem) -> list:
    cache = getattr(gamma, "_compiled_clauses", None)
    if cache is None:
        cache = [_CompiledClause(cl, i) for i, cl in enumerate(gamma.clauses)]
        gamma._compiled_clauses = cache
    return cache


def derive_fixpoint(gamma: ClauseSystem, g: LabeledGraph, w: int) -> DerivedAtomSet:
    """Least set of derivable (predicate, fragment) pairs over ``sub_w(g)``.

    Semi-naive: after the first round, a clause instantiation is retried
    only when at least one of its body pairs became derivable in the
    previous round.
    """
    universe = sub_w(g, w)
    out = DerivedAtomSet(universe)
    compiled = _compiled(gamma)
    facts = [c for c in compiled if not c.vars]
    rules = [c for c in compiled if c.vars]

    for c in facts:
        res = realize(c.pattern, {})
        if res is None:
            continue
        idx = universe.find(res)
        if idx is not None:
            out.derived.setdefault((c.head_pred, idx), Provenance(c.index, {}))

    realize_memo: dict = {}
    new_pairs = set(out.derived)
    by_pred: dict[str, list[int]] = {}
    for pred, idx in out.derived:
        by_pred.setdefault(pred, []).append(idx)

    while new_pairs:
        out.rounds += 1
        frontier_pairs = new_pairs
        frontier_by_pred: dict[str, set] = {}
        for pred, idx in frontier_pairs:
            frontier_by_pred.setdefault(pred, set()).add(idx)
        new_pairs = set()
        for c in rules:
            candidates = []
            feasible = True
            for var in c.vars:
                # a variable bound by several body atoms needs every one derived
                pools = [set(by_pred.get(pred, ())) for pred in c.body_preds[var]]
                pool = set.intersection(*pools) if pools else set()
                pool &= set(c.admissible(var, universe))
                if not pool:
                    feasible = False
                    break
                candidates.append(sorted(pool))
            if not feasible:
                continue
            frontier_sets = []
            for var in c.vars:
                fs = set()
                for pred in c.body_preds[var]:
                    fs |= frontier_by_pred.get(pred, set())
                frontier_sets.append(fs)
            for combo in product(*candidates):
                if not any(idx in frontier_sets[i] for i, idx in enumerate(combo)):
                    continue
                key = (c.index, combo)
                if key in realize_memo:
                    result_idx = realize_memo[key]
                else:
                    theta = {var: universe[idx] for var, idx in zip(c.vars, combo)}
                    res = realize(c.pattern, theta)
                    result_idx = universe.find(res) if res is not None else None
                    realize_memo[key] = result_idx
                if result_idx is None:
                    continue
                pair = (c.head_pred, result_idx)
                if pair not in out.derived:
                    out.derived[pair] = Provenance(
                        c.index, {var: idx for var, idx in zip(c.vars, combo)})
                    new_pairs.add(pair)
                    by_pred.setdefault(c.head_pred, []).append(result_idx)
    return out


@dataclass
class DerivationNode:
    predicate: str
    clause_index: int
    graph: GraphWithInterface
    children: dict  # variable label -> DerivationNode

    def replay(self, gamma: ClauseSystem) -> Optional[GraphWithInterface]:
        """Re-realize the recorded tree bottom-up; the result should be
        isomorphic to the recorded graph."""
        clause = gamma.clauses[self.clause_index]
        theta = {}
        for var, child in self.children.items():
            sub = child.replay(gamma)
            if sub is None:
                return None
            theta[var] = sub
        return realize(clause.head.pattern, theta)


def _expand_tree(gamma: ClauseSystem, derived: DerivedAtomSet,
                 pred: str, idx: int) -> DerivationNode:
    prov = derived.derived[(pred, idx)]
    node = DerivationNode(pred, prov.clause_index, derived.universe[idx], {})
    compiled = _compiled(gamma)[prov.clause_index]
    for var in compiled.vars:
        child_idx = prov.bindings[var]
        child_pred = compiled.body_preds[var][0]
        node.children[var] = _expand_tree(gamma, derived, child_pred, child_idx)
    return node


def member(gamma: ClauseSystem, p: PredicateSymbol, g: LabeledGraph,
           params: ParamTuple, want_tree: bool = False):
    """Does the start predicate derive ``g``?

    Inputs beyond the degree bound are rejected outright.  With
    ``want_tree`` the result is a (bool, DerivationNode-or-None) pair.
    """
    if p.name not in gamma.by_name or gamma.by_name[p.name].irank != 0:
        raise ValueError(f"predicate {p.name!r} is not a declared rank-0 predicate")
    if g.max_degree() > params.delta:
        return (False, None) if want_tree else False
    derived = derive_fixpoint(gamma, g, params.w)
    goal = closed(g)
    universe = derived.universe
    for c in _compiled(gamma):
        clause, ci = c.clause, c.index
        if clause.head.predicate.name != p.name:
            continue
        if not c.vars:
            res = realize(c.pattern, {})
            if res is not None and iso_check(res, goal):
                if want_tree:
                    return True, DerivationNode(p.name, ci, goal, {})
                return True
            continue
        pools = []
        feasible = True
        for var in c.vars:
            admissible = set(c.admissible(var, universe))
            pool = [idx for idx in _holding_all(derived, c.body_preds[var])
                    if idx in admissible]
            if not pool:
                feasible = False
                break
            pools.append(pool)
        if not feasible:
            continue
        for combo in product(*pools):
            theta = {var: universe[idx] for var, idx in zip(c.vars, combo)}
            res = realize(c.pattern, theta)
            if res is None or not iso_check(res, goal):
                continue
            if want_tree:
                node = DerivationNode(p.name, ci, goal, {})
                for var, idx in zip(c.vars, combo):
                    node.children[var] = _expand_tree(
                        gamma, derived, c.body_preds[var][0], idx)
                return True, node
            return True
    return (False, None) if want_tree else False


def _holding_all(derived: DerivedAtomSet, preds) -> list:
    sets = [set(derived.by_predicate(p)) for p in preds]
    if not sets:
        return []
    return sorted(set.intersection(*sets))


def format_tree(node: DerivationNode, indent: int = 0) -> str:
    pad = "  " * indent
    g = node.graph
    desc = (f"{pad}{node.predicate} derives [n={g.graph.n}, m={g.graph.m}, "
            f"rank={g.rank}] via clause {node.clause_index}")
    lines = [desc]
    for var in sorted(node.children):
        lines.append(f"{pad}  {var} :=")
        lines.append(format_tree(node.children[var], indent + 2))
    return "\n".join(lines)
