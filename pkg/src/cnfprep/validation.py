"""Input coercion shared by the estimator and the CLI."""

from __future__ import annotations

import numbers
from typing import Iterable, List, Optional

from .core import Formula, var
from .formula_io import DimacsDocument, parse_dimacs, parse_model


def check_formula(X, num_variables: Optional[int] = None) -> Formula:
    """Coerce ``X`` into a fresh :class:`Formula`.

    Accepts a Formula, a DimacsDocument, DIMACS text (str or bytes) or an
    iterable of clauses given as iterables of nonzero ints.
    """
    if isinstance(X, Formula):
        f = X.copy()
        f.tautologies_dropped = X.tautologies_dropped
        return f
    if isinstance(X, (str, bytes, bytearray)):
        X = parse_dimacs(X)
    if isinstance(X, DimacsDocument):
        return X.to_formula()
    try:
        clauses = [list(c) for c in X]
    except TypeError:
        raise TypeError(
            f"expected a formula, DIMACS text or a list of clauses, got {type(X).__name__}"
        ) from None
    for c in clauses:
        for lit in c:
            if not isinstance(lit, numbers.Integral) or isinstance(lit, bool):
                raise TypeError(f"literals must be integers, got {lit!r}")
            if lit == 0:
                raise ValueError("literal 0 is not allowed inside a clause")
    top = max((var(int(l)) for c in clauses for l in c), default=0)
    if num_variables is not None and top > num_variables:
        raise ValueError(f"literal over variable {top} exceeds num_variables={num_variables}")
    return Formula([[int(l) for l in c] for c in clauses], num_variables or top)


def check_model_input(model) -> List[int]:
    """Coerce a model (literal list or model-file text) into a literal list."""
    if isinstance(model, (str, bytes, bytearray)):
        return parse_model(model)
    lits = [int(l) for l in model]
    seen = set()
    for lit in lits:
        if lit == 0:
            raise ValueError("literal 0 is not allowed in a model")
        if var(lit) in seen:
            raise ValueError(f"variable {var(lit)} assigned twice")
        seen.add(var(lit))
    return lits


def check_variables(values: Optional[Iterable[int]], name: str) -> frozenset:
    if values is None:
        return frozenset()
    out = frozenset(int(v) for v in values)
    if any(v <= 0 for v in out):
        raise ValueError(f"{name} must contain positive variable indices")
    return out
