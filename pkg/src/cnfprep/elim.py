"""Satisfiability-preserving techniques: variable elimination, blocked clause
elimination and equivalent literal substitution.

Each technique records what it removed on an :class:`UndoStack` so that models
can be extended afterwards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set

from .core import Formula, Lits, normalize_clause, resolve, var
from .reconstruct import EeTable, UndoStack


def eliminate_variable(f: Formula, x: int, undo: UndoStack, force: bool = False) -> bool:
    """Replace every clause on ``x`` by the non-tautological resolvents on ``x``.

    Done only when that does not increase the number of clauses, unless
    ``force`` is set. Returns True if ``x`` was eliminated.
    """
    pos = sorted(f.occurrences(x))
    neg = sorted(f.occurrences(-x))
    if not pos and not neg:
        raise ValueError(f"variable {x} does not occur in the formula")
    bound = len(pos) + len(neg)
    resolvents: List[Lits] = []
    seen: Set[Lits] = set()
    for i in pos:
        for j in neg:
            r = resolve(f.clauses[i].lits, f.clauses[j].lits, x)
            if r is None or r in seen:
                continue
            seen.add(r)
            resolvents.append(r)
            if len(resolvents) > bound and not force:
                return False
    undo.push_ve(x, [f.clauses[i].lits for i in pos + neg])
    for i in pos + neg:
        f.delete(i)
    for r in resolvents:
        if r and any(f.clauses[i].lits == r for i in f.occurrences(r[0])):
            continue
        f.add_clause(r)
    return True


def ve_pass(
    f: Formula,
    undo: UndoStack,
    whitelist: Iterable[int] = (),
    blacklist: Iterable[int] = (),
    frozen: Iterable[int] = (),
) -> int:
    """Bounded variable elimination to fixpoint; returns the number eliminated.

    Candidates are tried cheapest first (fewest occurrences, then lowest
    index). Blacklisted variables are eliminated regardless of growth at the
    end of every sweep. ``frozen`` variables are skipped like whitelisted ones.
    """
    skip = set(whitelist) | set(frozen)
    black = sorted(set(blacklist) - set(whitelist))
    eliminated = 0
    while True:
        before = eliminated
        order = sorted(
            (v for v in f.live_variables() if v not in skip and v not in black),
            key=lambda v: (f.count(v), v),
        )
        for v in order:
            if f.count(v) and eliminate_variable(f, v, undo):
                eliminated += 1
                if f.has_empty_clause():
                    return eliminated
        for v in black:
            if f.count(v):
                eliminate_variable(f, v, undo, force=True)
                eliminated += 1
                if f.has_empty_clause():
                    return eliminated
        if eliminated == before:
            return eliminated


def is_blocked(f: Formula, clause: Sequence[int], lit: int) -> bool:
    """True iff every resolvent of ``clause`` on ``lit`` with ``f`` is a tautology."""
    if lit not in clause:
        raise ValueError(f"literal {lit} not in clause {list(clause)}")
    negated = {-l for l in clause if l != lit}
    for idx in f.occurrences(-lit):
        if not negated.intersection(f.clauses[idx].lits):
            return False
    return True


def bce_pass(
    f: Formula,
    undo: UndoStack,
    whitelist: Iterable[int] = (),
    rng: Optional[random.Random] = None,
) -> int:
    """Remove blocked clauses until none is left; returns the number removed.

    ``rng`` shuffles the visiting order (the result does not depend on it).
    """
    white = set(whitelist)
    removed = 0
    changed = True
    while changed:
        changed = False
        order = [idx for idx, _ in f.active()]
        if rng is not None:
            rng.shuffle(order)
        for idx in order:
            clause = f.clauses[idx]
            if clause.deleted:
                continue
            lits = list(clause.lits)
            if rng is not None:
                rng.shuffle(lits)
            for lit in lits:
                if var(lit) not in white and is_blocked(f, clause.lits, lit):
                    undo.push_bce(lit, clause.lits)
                    f.delete(idx)
                    removed += 1
                    changed = True
                    break
    return removed


@dataclass
class ImplicationGraph:
    """Binary implication graph: edge a -> b for every binary clause [-a, b]."""

    edges: Dict[int, Set[int]] = field(default_factory=dict)

    @property
    def nodes(self) -> List[int]:
        vs = {var(l) for l in self.edges} | {var(l) for s in self.edges.values() for l in s}
        return sorted([l for v in vs for l in (v, -v)], key=lambda l: (var(l), l < 0))

    def successors(self, lit: int) -> Set[int]:
        return self.edges.get(lit, set())

    def add(self, a: int, b: int) -> None:
        self.edges.setdefault(a, set()).add(b)
        self.edges.setdefault(-b, set()).add(-a)

    def is_skew_symmetric(self) -> bool:
        return all(-a in self.successors(-b) for a, bs in self.edges.items() for b in bs)


def build_big(f: Formula) -> ImplicationGraph:
    g = ImplicationGraph()
    for _, lits in f.active():
        if len(lits) == 2:
            a, b = lits
            g.add(-a, b)
    return g


def strongly_connected_components(g: ImplicationGraph) -> List[List[int]]:
    """Tarjan's algorithm, iterative; roots visited in ascending literal order."""
    index: Dict[int, int] = {}
    low: Dict[int, int] = {}
    on_stack: Set[int] = set()
    stack: List[int] = []
    comps: List[List[int]] = []
    counter = 0
    for root in g.nodes:
        if root in index:
            continue
        work = [(root, iter(sorted(g.successors(root), key=lambda l: (var(l), l < 0))))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = counter
                    counter += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append(
                        (succ, iter(sorted(g.successors(succ), key=lambda l: (var(l), l < 0))))
                    )
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[node])
                if low[node] == index[node]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == node:
                            break
                    comps.append(comp)
    return comps


@dataclass
class EquivalenceClasses:
    classes: List[Lits] = field(default_factory=list)
    contradiction: bool = False

    def __bool__(self) -> bool:
        return bool(self.classes)


def _canonical_class(lits: Iterable[int]) -> Lits:
    ordered = sorted(lits, key=var)
    if ordered[0] < 0:
        ordered = [-l for l in ordered]
    return tuple(ordered)


def find_equivalences(g: ImplicationGraph) -> EquivalenceClasses:
    """Equivalent literals from the SCCs of ``g``.

    Each class is sorted by variable with a positive representative first. A
    component holding both ``l`` and ``-l`` sets ``contradiction``.
    """
    classes = set()
    for comp in strongly_connected_components(g):
        if len(comp) < 2:
            continue
        members = set(comp)
        if any(-l in members for l in members):
            return EquivalenceClasses([], contradiction=True)
        classes.add(_canonical_class(comp))
    return EquivalenceClasses(sorted(classes))


def classes_from_pairs(pairs: Iterable[Sequence[int]]) -> EquivalenceClasses:
    """Merge literal equivalences ``a == b`` into canonical classes."""
    table = EeTable()
    try:
        table.add(pairs)
    except ValueError:
        return EquivalenceClasses([], contradiction=True)
    return EquivalenceClasses(table.classes)


def restrict_classes(e: EquivalenceClasses, whitelist: Iterable[int]) -> EquivalenceClasses:
    """Drop whitelisted variables from the substituted side of every class."""
    white = set(whitelist)
    if not white:
        return e
    out = []
    for cls in e.classes:
        kept = [cls[0]] + [m for m in cls[1:] if var(m) not in white]
        if len(kept) > 1:
            out.append(tuple(kept))
    return EquivalenceClasses(out, e.contradiction)


def apply_equivalences(
    f: Formula, e: EquivalenceClasses, undo: UndoStack, ee_table: EeTable
) -> int:
    """Substitute each class member by its representative; returns literals replaced."""
    if not e.classes:
        return 0
    subst: Dict[int, int] = {}
    for cls in e.classes:
        rep = cls[0]
        for member in cls[1:]:
            subst[member] = rep
            subst[-member] = -rep
    touched = sorted({idx for lit in subst for idx in f.occurrences(lit)})
    replaced = 0
    for idx in touched:
        lits = f.clauses[idx].lits
        new = [subst.get(l, l) for l in lits]
        replaced += sum(1 for a, b in zip(lits, new) if a != b)
        f.replace(idx, new)
    undo.push_ee()
    ee_table.add(e.classes)
    return replaced
