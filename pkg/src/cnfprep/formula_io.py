"""DIMACS CNF, model and variable-list files."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import List, Sequence, Set, Union

from .core import Formula, var

Text = Union[str, bytes]


class DimacsError(ValueError):
    pass


class ModelError(ValueError):
    pass


def _text(data: Text) -> str:
    return data.decode() if isinstance(data, (bytes, bytearray)) else data


@dataclass
class DimacsDocument:
    declared_variables: int
    declared_clauses: int
    clauses: List[List[int]] = field(default_factory=list)
    comments: List[str] = field(default_factory=list)

    def to_formula(self) -> Formula:
        return Formula(self.clauses, self.declared_variables)


def parse_dimacs(data: Text) -> DimacsDocument:
    comments: List[str] = []
    clauses: List[List[int]] = []
    header = None
    current: List[int] = []
    for lineno, line in enumerate(_text(data).splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("c"):
            comments.append(line)
            continue
        if stripped.startswith("p"):
            parts = stripped.split()
            if header is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {stripped!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {stripped!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsError(f"line {lineno}: negative count in header")
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before 'p cnf' header")
        for tok in stripped.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad token {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            elif var(lit) > header[0]:
                raise DimacsError(
                    f"line {lineno}: literal {lit} exceeds declared variable count {header[0]}"
                )
            else:
                current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        warnings.warn(
            f"header declares {header[1]} clauses, found {len(clauses)}", stacklevel=2
        )
    return DimacsDocument(header[0], header[1], clauses, comments)


def format_clause(lits: Sequence[int]) -> str:
    return " ".join([str(l) for l in lits] + ["0"])


def write_dimacs(f: Formula) -> bytes:
    clauses = f.active_clauses()
    top = max((var(l) for c in clauses for l in c), default=0)
    lines = [f"p cnf {top} {len(clauses)}"]
    lines.extend(format_clause(c) for c in clauses)
    return ("\n".join(lines) + "\n").encode()


def parse_model(data: Text) -> List[int]:
    lits: List[int] = []
    seen: Set[int] = set()
    last = None
    for line in _text(data).splitlines():
        parts = line.split()
        if not parts or parts[0] in ("s", "c"):
            continue
        if parts[0] == "v":
            parts = parts[1:]
        for tok in parts:
            try:
                lit = int(tok)
            except ValueError:
                raise ModelError(f"bad model token {tok!r}") from None
            last = lit
            if lit == 0:
                continue
            if var(lit) in seen:
                raise ModelError(f"variable {var(lit)} assigned twice")
            seen.add(var(lit))
            lits.append(lit)
    if last != 0:
        raise ModelError("model is not terminated by 0")
    return lits


def write_model(lits: Sequence[int]) -> bytes:
    return ("v " + format_clause(lits) + "\n").encode()


def parse_variable_list(data: Text) -> Set[int]:
    tokens = _text(data).split()
    out: Set[int] = set()
    for i, tok in enumerate(tokens):
        try:
            v = int(tok)
        except ValueError:
            raise ValueError(f"bad variable {tok!r}") from None
        if v == 0 and i == len(tokens) - 1:
            break
        if v <= 0:
            raise ValueError(f"variable list entries must be positive, got {v}")
        out.add(v)
    return out
