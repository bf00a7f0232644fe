"""Clause database, occurrence lists and unit propagation.

Literals are nonzero ints in DIMACS convention; ``-l`` is the negation of ``l``.
Clauses are stored as tuples sorted by variable index with no duplicates and
no complementary pairs.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

Lits = Tuple[int, ...]


def var(lit: int) -> int:
    return lit if lit > 0 else -lit


def normalize_clause(lits: Iterable[int]) -> Optional[Lits]:
    """Sort and deduplicate ``lits``.

    Returns ``None`` if the clause is a tautology (contains ``l`` and ``-l``).
    """
    seen = set()
    for lit in lits:
        if lit == 0:
            raise ValueError("literal 0 is not allowed")
        if -lit in seen:
            return None
        seen.add(lit)
    return tuple(sorted(seen, key=var))


def resolve(c: Sequence[int], d: Sequence[int], pivot: int) -> Optional[Lits]:
    """Resolvent of ``c`` and ``d`` on variable ``pivot``, or ``None`` if tautological."""
    if pivot in c and -pivot in d:
        pos, neg = c, d
    elif -pivot in c and pivot in d:
        pos, neg = d, c
    else:
        raise ValueError(f"variable {pivot} does not occur with opposite signs")
    return normalize_clause([l for l in pos if l != pivot] + [l for l in neg if l != -pivot])


class Clause:
    __slots__ = ("lits", "deleted")

    def __init__(self, lits: Lits):
        self.lits = lits
        self.deleted = False

    def __len__(self) -> int:
        return len(self.lits)

    def __repr__(self) -> str:
        state = " deleted" if self.deleted else ""
        return f"Clause({list(self.lits)}{state})"


class Formula:
    """Clause database with an exact literal -> clause-index occurrence map.

    Deletion is lazy: deleted clauses keep their slot until :meth:`compact`.
    """

    def __init__(self, clauses: Iterable[Iterable[int]] = (), num_variables: int = 0):
        self.clauses: List[Clause] = []
        self.occurs: Dict[int, Set[int]] = defaultdict(set)
        self.num_variables = num_variables
        self.tautologies_dropped = 0
        for lits in clauses:
            if self.add_clause(lits) is None:
                self.tautologies_dropped += 1

    def add_clause(self, lits: Iterable[int]) -> Optional[int]:
        """Normalize and append a clause; returns its index, or None for a tautology."""
        norm = normalize_clause(lits)
        if norm is None:
            return None
        idx = len(self.clauses)
        self.clauses.append(Clause(norm))
        for lit in norm:
            self.occurs[lit].add(idx)
        if norm:
            self.num_variables = max(self.num_variables, var(norm[-1]))
        return idx

    def delete(self, idx: int) -> None:
        clause = self.clauses[idx]
        if clause.deleted:
            return
        clause.deleted = True
        for lit in clause.lits:
            self.occurs[lit].discard(idx)

    def replace(self, idx: int, lits: Iterable[int]) -> bool:
        """Overwrite clause ``idx`` in place. A tautological replacement deletes it.

        Returns False if the clause was deleted.
        """
        norm = normalize_clause(lits)
        clause = self.clauses[idx]
        for lit in clause.lits:
            self.occurs[lit].discard(idx)
        if norm is None:
            clause.deleted = True
            return False
        clause.lits = norm
        for lit in norm:
            self.occurs[lit].add(idx)
        if norm:
            self.num_variables = max(self.num_variables, var(norm[-1]))
        return True

    def active(self) -> Iterator[Tuple[int, Lits]]:
        for idx, clause in enumerate(self.clauses):
            if not clause.deleted:
                yield idx, clause.lits

    def active_clauses(self) -> List[Lits]:
        return [lits for _, lits in self.active()]

    def num_active(self) -> int:
        return sum(1 for c in self.clauses if not c.deleted)

    def occurrences(self, lit: int) -> Set[int]:
        return self.occurs.get(lit, set())

    def count(self, v: int) -> int:
        return len(self.occurrences(v)) + len(self.occurrences(-v))

    def live_variables(self) -> List[int]:
        return sorted({var(l) for _, lits in self.active() for l in lits})

    def has_empty_clause(self) -> bool:
        return any(not lits for _, lits in self.active())

    def rebuild_occurrences(self) -> "Formula":
        occurs: Dict[int, Set[int]] = defaultdict(set)
        for idx, lits in self.active():
            for lit in lits:
                occurs[lit].add(idx)
        self.occurs = occurs
        return self

    def occurrences_valid(self) -> bool:
        """True iff the occurrence map matches the active clauses exactly."""
        expected: Dict[int, Set[int]] = defaultdict(set)
        for idx, lits in self.active():
            for lit in lits:
                expected[lit].add(idx)
        actual = {l: s for l, s in self.occurs.items() if s}
        return actual == dict(expected)

    def compact(self) -> "Formula":
        self.clauses = [c for c in self.clauses if not c.deleted]
        return self.rebuild_occurrences()

    def copy(self) -> "Formula":
        return Formula(self.active_clauses(), self.num_variables)

    def __repr__(self) -> str:
        return f"Formula(vars={self.num_variables}, clauses={self.active_clauses()})"


class Assignment:
    """Partial assignment with a trail in assignment order."""

    __slots__ = ("values", "trail")

    def __init__(self, lits: Iterable[int] = ()):
        self.values: Dict[int, bool] = {}
        self.trail: List[int] = []
        for lit in lits:
            self.assign(lit)

    def value(self, lit: int) -> Optional[bool]:
        val = self.values.get(var(lit))
        if val is None:
            return None
        return val if lit > 0 else not val

    def assign(self, lit: int) -> None:
        v = var(lit)
        if v in self.values:
            raise ValueError(f"variable {v} already assigned")
        self.values[v] = lit > 0
        self.trail.append(lit)

    def copy(self) -> "Assignment":
        a = Assignment()
        a.values = dict(self.values)
        a.trail = list(self.trail)
        return a

    def __contains__(self, lit: int) -> bool:
        return self.value(lit) is True

    def __len__(self) -> int:
        return len(self.trail)


def bcp(
    f: Formula,
    a: Assignment,
    roots: Iterable[int] = (),
    skip: Optional[int] = None,
) -> Optional[Assignment]:
    """Unit propagation from ``roots`` over the active clauses of ``f``.

    Extends ``a`` in place and returns it, or returns None on conflict (``a`` is
    then left partially extended). Literals already on the trail are taken as
    propagated. Clause index ``skip`` is ignored during propagation.
    """
    head = len(a.trail)
    for lit in roots:
        val = a.value(lit)
        if val is False:
            return None
        if val is None:
            a.assign(lit)
    clauses = f.clauses
    while head < len(a.trail):
        falsified = -a.trail[head]
        head += 1
        for idx in f.occurrences(falsified):
            if idx == skip:
                continue
            unit = 0
            free = 0
            for lit in clauses[idx].lits:
                val = a.value(lit)
                if val is True:
                    break
                if val is None:
                    free += 1
                    if free > 1:
                        break
                    unit = lit
            else:
                if free == 0:
                    return None
                a.assign(unit)
    return a
