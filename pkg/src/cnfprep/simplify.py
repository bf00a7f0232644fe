"""Equivalence-preserving techniques: hidden tautology elimination, probing,
vivification, subsumption and extended resolution.

None of these needs undo information, except that extended resolution adds
fresh variables which model extension simply drops.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Set, Tuple

from .core import Assignment, Formula, Lits, bcp, var


def hla(
    f: Formula,
    lits: Sequence[int],
    exclude: Optional[int] = None,
    rng: Optional[random.Random] = None,
    trace: Optional[List[Tuple[int, Lits]]] = None,
    until_tautology: bool = False,
) -> Set[int]:
    """Hidden literal addition closure of ``lits``.

    For every literal ``l`` already present and every binary clause
    ``[m, l]`` other than clause ``exclude``, ``-m`` is added. ``trace``
    collects ``(added literal, binary clause)`` in the order of addition.
    With ``until_tautology`` the extension stops at the first complementary
    pair instead of running to the fixpoint.
    """
    closure = set(lits)
    todo = list(lits)
    if rng is not None:
        rng.shuffle(todo)
    while todo:
        lit = todo.pop(0) if rng is None else todo.pop(rng.randrange(len(todo)))
        for idx in sorted(f.occurrences(lit)):
            if idx == exclude:
                continue
            clause = f.clauses[idx].lits
            if len(clause) != 2:
                continue
            other = clause[0] if clause[1] == lit else clause[1]
            if -other not in closure:
                closure.add(-other)
                todo.append(-other)
                if trace is not None:
                    trace.append((-other, clause))
                if until_tautology and other in closure:
                    return closure
    return closure


def hte_pass(f: Formula) -> int:
    """Delete every clause whose HLA closure is tautological."""
    removed = 0
    for idx, lits in list(f.active()):
        if f.clauses[idx].deleted:
            continue
        closure = hla(f, lits, exclude=idx, until_tautology=True)
        if any(-l in closure for l in closure):
            f.delete(idx)
            removed += 1
    return removed


@dataclass
class ProbeResult:
    units: Set[int] = field(default_factory=set)
    equivalences: Set[Tuple[int, int]] = field(default_factory=set)
    conflict_unit: Optional[int] = None
    unsat: bool = False
    steps: int = 0


def probe_variable(f: Formula, v: int, base: Optional[Assignment] = None) -> ProbeResult:
    """Propagate ``v`` and ``-v`` separately and compare what they imply.

    ``equivalences`` holds pairs ``(v, x)`` with ``v -> x`` and ``-v -> -x``.
    """
    start = base or Assignment()
    pos = bcp(f, start.copy(), [v])
    neg = bcp(f, start.copy(), [-v])
    steps = (len(pos) if pos else 0) + (len(neg) if neg else 0)
    if pos is None and neg is None:
        return ProbeResult(unsat=True, steps=steps)
    if pos is None:
        return ProbeResult(conflict_unit=-v, steps=steps)
    if neg is None:
        return ProbeResult(conflict_unit=v, steps=steps)
    known = set(start.trail)
    implied_pos = [l for l in pos.trail if l not in known and var(l) != v]
    implied_neg = set(neg.trail)
    units = {l for l in implied_pos if l in implied_neg}
    equivalences = {(v, l) for l in implied_pos if -l in implied_neg}
    return ProbeResult(units, equivalences, steps=steps)


def probe_clause(f: Formula, lits: Sequence[int]) -> Optional[Set[int]]:
    """Literals implied by every literal of the clause ``lits``.

    Conflicting branches are ignored; returns None when all branches conflict.
    """
    common: Optional[Set[int]] = None
    for lit in lits:
        a = bcp(f, Assignment(), [lit])
        if a is None:
            continue
        common = set(a.trail) if common is None else common & set(a.trail)
    return common


def vivify_clause(f: Formula, idx: int) -> Optional[Lits]:
    """Try to shorten clause ``idx`` by asserting its negated literals one by one.

    Returns the shorter replacement clause, or None when nothing was found.
    The clause itself takes no part in propagation.
    """
    lits = f.clauses[idx].lits
    n = len(lits)
    a = Assignment()
    # after each step any assigned later literal returns, so lits[i] is free here
    for i, lit in enumerate(lits):
        if bcp(f, a, [-lit], skip=idx) is None:
            return tuple(lits[: i + 1]) if i + 1 < n else None
        for j in range(i + 1, n):
            later = a.value(lits[j])
            if later is True:
                candidate = tuple(lits[: i + 1]) + (lits[j],)
                return candidate if len(candidate) < n else None
            if later is False:
                return tuple(l for k, l in enumerate(lits) if k != j)
    return None


def vivify_pass(f: Formula, min_length: int = 3) -> int:
    strengthened = 0
    for idx, lits in list(f.active()):
        if f.clauses[idx].deleted or len(lits) < min_length:
            continue
        new = vivify_clause(f, idx)
        if new is not None:
            f.replace(idx, new)
            strengthened += 1
    return strengthened


def _signature(lits: Iterable[int]) -> int:
    sig = 0
    for l in lits:
        sig |= 1 << (var(l) & 63)
    return sig


def subsumption_pass(f: Formula) -> Tuple[int, int]:
    """Subsumption and self-subsuming resolution to fixpoint.

    Returns ``(removed, strengthened)``.
    """
    removed = strengthened = 0
    changed = True
    while changed:
        changed = False
        order = sorted(f.active(), key=lambda item: (len(item[1]), item[0]))
        for idx, _ in order:
            clause = f.clauses[idx]
            if clause.deleted:
                continue
            lits = clause.lits
            sig = _signature(lits)
            for flipped in (None,) + lits:
                pattern = set(lits) if flipped is None else (set(lits) - {flipped}) | {-flipped}
                pivot = min(pattern, key=lambda l: len(f.occurrences(l)), default=None)
                if pivot is None:
                    break
                for other in sorted(f.occurrences(pivot)):
                    if other == idx:
                        continue
                    target = f.clauses[other]
                    if target.deleted or len(target.lits) < len(lits) or sig & ~_signature(target.lits):
                        continue
                    if not pattern.issubset(target.lits):
                        continue
                    if flipped is None:
                        f.delete(other)
                        removed += 1
                    else:
                        f.replace(other, [l for l in target.lits if l != -flipped])
                        strengthened += 1
                    changed = True
                if clause.deleted:
                    break
    return removed, strengthened


@dataclass(frozen=True)
class ErDefinition:
    variable: int
    left: int
    right: int

    @property
    def clauses(self) -> List[Lits]:
        v, a, b = self.variable, self.left, self.right
        return [(-a, v), (-b, v), (a, b, -v)]


def _pair_key(pair: Tuple[int, int]) -> Tuple[int, int, int, int]:
    a, b = pair
    return (var(a), a < 0, var(b), b < 0)


def er_pass(
    f: Formula,
    max_definitions: int = 0,
    min_pair_occurrences: int = 4,
    exclude: Iterable[int] = (),
) -> List[ErDefinition]:
    """Introduce ``v == a | b`` for the most frequent literal pairs.

    Pairs are counted over clauses with at least three literals; pairs
    touching a variable in ``exclude`` are not considered.
    """
    skip = set(exclude)
    defs: List[ErDefinition] = []
    while len(defs) < max_definitions:
        counts: Counter = Counter()
        for _, lits in f.active():
            if len(lits) < 3:
                continue
            usable = [l for l in lits if var(l) not in skip]
            counts.update(combinations(usable, 2))
        if not counts:
            break
        pair, n = min(counts.items(), key=lambda item: (-item[1], _pair_key(item[0])))
        if n < min_pair_occurrences:
            break
        a, b = pair
        v = f.num_variables + 1
        f.num_variables = v
        for idx in sorted(f.occurrences(a) & f.occurrences(b)):
            f.replace(idx, [l for l in f.clauses[idx].lits if l not in pair] + [v])
        d = ErDefinition(v, a, b)
        for c in d.clauses:
            f.add_clause(c)
        defs.append(d)
    return defs
