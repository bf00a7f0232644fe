"""Exhaustive reference solver and model checker for small formulas.

Deliberately independent of the propagation code in :mod:`cnfprep.core`: it
only evaluates clauses under partial assignments.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .core import Formula

ClauseSet = Union[Formula, Iterable[Sequence[int]]]


class OracleLimitError(ValueError):
    pass


def _clauses(f: ClauseSet) -> List[Tuple[int, ...]]:
    if isinstance(f, Formula):
        return f.active_clauses()
    return [tuple(c) for c in f]


def _search(clauses, order, values, on_model) -> bool:
    """Depth-first over ``order`` (true before false). ``on_model`` returns True to stop."""
    watch: Dict[int, List[Tuple[int, ...]]] = {}
    for c in clauses:
        for lit in c:
            watch.setdefault(-lit, []).append(c)

    def falsified(c) -> bool:
        return all(values.get(abs(l)) == (l < 0) for l in c)

    def rec(depth: int) -> bool:
        if depth == len(order):
            return on_model(values)
        v = order[depth]
        for val in (True, False):
            values[v] = val
            lit = v if val else -v
            if not any(falsified(c) for c in watch.get(lit, ())):
                if rec(depth + 1):
                    return True
            del values[v]
        return False

    if any(not c for c in clauses):
        return False
    return rec(0)


def solve_exhaustive(f: ClauseSet, var_limit: int = 26) -> Optional[List[int]]:
    """First model in lexicographic order (variable 1 first, true before false).

    Returns a total model over 1..n as a literal list, or None if unsatisfiable.
    """
    clauses = _clauses(f)
    live = sorted({abs(l) for c in clauses for l in c})
    if len(live) > var_limit:
        raise OracleLimitError(f"{len(live)} variables exceed the oracle limit of {var_limit}")
    top = max([f.num_variables if isinstance(f, Formula) else 0] + live)
    values: Dict[int, bool] = {}
    found: List[Dict[int, bool]] = []

    def keep(vals):
        found.append(dict(vals))
        return True

    if not _search(clauses, live, values, keep):
        return None
    model = found[0]
    return [v if model.get(v, True) else -v for v in range(1, top + 1)]


def check_model(f: ClauseSet, model: Iterable[int]) -> bool:
    true_lits = set(model)
    return all(any(l in true_lits for l in c) for c in _clauses(f))


def enumerate_models(f: ClauseSet, variables: Iterable[int], limit: int = 16) -> Set[Tuple[int, ...]]:
    """Projections onto ``variables`` of all models of ``f``.

    Each projection is a tuple of literals sorted by variable.
    """
    proj = sorted(set(variables))
    if len(proj) > limit:
        raise OracleLimitError(f"{len(proj)} projection variables exceed the limit of {limit}")
    clauses = _clauses(f)
    live = sorted({abs(l) for c in clauses for l in c})
    if len(set(live) | set(proj)) > 26:
        raise OracleLimitError("too many variables for enumeration")
    # projection variables first: once they are fixed, one completion suffices
    order = proj + [v for v in live if v not in set(proj)]
    models: Set[Tuple[int, ...]] = set()
    values: Dict[int, bool] = {}

    if not any(not c for c in clauses):
        _enumerate(clauses, order, len(proj), values, models)
    return models


def _enumerate(clauses, order, nproj, values, models) -> None:
    def rec_proj(depth: int) -> None:
        if depth == nproj:
            rest = {}
            rest.update(values)
            if _search(clauses, order[nproj:], rest, lambda _: True):
                models.add(tuple(v if values[v] else -v for v in order[:nproj]))
            return
        v = order[depth]
        for val in (True, False):
            values[v] = val
            lit = v if val else -v
            if not any(all(values.get(abs(l)) == (l < 0) for l in c) for c in clauses if -lit in c):
                rec_proj(depth + 1)
            del values[v]

    rec_proj(0)
