"""Undo records, variable compression, the map file and model extension.

The map file layout::

    original variables
    <n>
    compress tables | no table
      table 0 <v>
      <forward mapping> 0
      units 0
      <fixed literals> 0
      end table
    ee table
    <class> 0          one per equivalence class, representative first
    postprocess stack
    ee | bce <l> + clause | ve <v> <n> + n clauses

Steps in the stack are written in the order they were applied and undone in
reverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .core import Formula, Lits, var
from .formula_io import Text, _text, format_clause


class MapFileError(ValueError):
    pass


@dataclass(frozen=True)
class VeStep:
    variable: int
    clauses: Tuple[Lits, ...]

    def __post_init__(self):
        for c in self.clauses:
            if self.variable not in c and -self.variable not in c:
                raise ValueError(f"variable {self.variable} missing from stored clause {c}")


@dataclass(frozen=True)
class BceStep:
    literal: int
    clause: Lits

    def __post_init__(self):
        if self.literal not in self.clause:
            raise ValueError(f"blocking literal {self.literal} not in clause {self.clause}")


@dataclass(frozen=True)
class EeMarker:
    pass


UndoStep = Union[VeStep, BceStep, EeMarker]


class UndoStack(list):
    """Undo steps in application order."""

    def push_ve(self, variable: int, clauses: Iterable[Sequence[int]]) -> None:
        self.append(VeStep(variable, tuple(tuple(c) for c in clauses)))

    def push_bce(self, literal: int, clause: Sequence[int]) -> None:
        self.append(BceStep(literal, tuple(clause)))

    def push_ee(self) -> None:
        self.append(EeMarker())


class EeTable:
    """Cumulative equivalence classes, merged across EE runs.

    Each class is a tuple whose first element is the positive representative
    (the smallest variable of the class); the other members are signed
    relative to it.
    """

    def __init__(self, classes: Iterable[Sequence[int]] = ()):
        self._parent: Dict[int, Tuple[int, bool]] = {}
        self.add(classes)

    def _find(self, v: int) -> Tuple[int, bool]:
        flip = False
        path = []
        while v in self._parent:
            p, f = self._parent[v]
            path.append(v)
            flip ^= f
            v = p
        # path compression: every node on the path points straight at the root
        acc = flip
        for node in path:
            p, f = self._parent[node]
            self._parent[node] = (v, acc)
            acc ^= f
        return v, flip

    def _union(self, a: int, b: int, negated: bool) -> None:
        """Record var a == var b (xor ``negated``)."""
        ra, fa = self._find(a)
        rb, fb = self._find(b)
        rel = fa ^ fb ^ negated
        if ra == rb:
            if rel:
                raise ValueError(f"contradictory equivalence between {a} and {b}")
            return
        if rb < ra:
            ra, rb = rb, ra
        self._parent[rb] = (ra, rel)

    def add(self, classes: Iterable[Sequence[int]]) -> None:
        for cls in classes:
            rep = cls[0]
            for member in cls[1:]:
                self._union(var(rep), var(member), (rep > 0) != (member > 0))

    @property
    def classes(self) -> List[Lits]:
        groups: Dict[int, List[int]] = {}
        for v in list(self._parent):
            root, flip = self._find(v)
            groups.setdefault(root, []).append(-v if flip else v)
        return [tuple([root] + sorted(ms, key=var)) for root, ms in sorted(groups.items())]

    def __eq__(self, other) -> bool:
        return isinstance(other, EeTable) and self.classes == other.classes

    def __len__(self) -> int:
        return len(self.classes)

    def __repr__(self) -> str:
        return f"EeTable({self.classes})"


@dataclass
class CompressionTable:
    original_variable_count: int
    forward: List[int]
    units: List[int] = field(default_factory=list)
    index: int = 0

    def __post_init__(self):
        if len(set(self.forward)) != len(self.forward):
            raise ValueError("compression forward mapping has duplicates")
        if any(v < 1 or v > self.original_variable_count for v in self.forward):
            raise ValueError("compression forward entry out of range")
        if set(self.forward) & {var(u) for u in self.units}:
            raise ValueError("a variable is both compressed and fixed")

    def backward(self) -> Dict[int, int]:
        return {old: new for new, old in enumerate(self.forward, 1)}


@dataclass
class MapFile:
    original_variables: int
    compression: Optional[CompressionTable] = None
    ee_table: EeTable = field(default_factory=EeTable)
    stack: UndoStack = field(default_factory=UndoStack)


def compress(
    f: Formula, fixed_units: Sequence[int] = (), whitelist: Iterable[int] = ()
) -> Tuple[Formula, CompressionTable]:
    """Rename the live variables of ``f`` to 1..k, preserving their order."""
    if set(whitelist):
        raise ValueError("compression cannot be combined with a whitelist")
    forward = f.live_variables()
    table = CompressionTable(
        original_variable_count=max([f.num_variables, *forward, *(var(u) for u in fixed_units)]),
        forward=forward,
        units=list(fixed_units),
    )
    back = table.backward()
    out = Formula(num_variables=len(forward))
    for lits in f.active_clauses():
        out.add_clause([back[l] if l > 0 else -back[-l] for l in lits])
    return out, table


def write_map_file(m: MapFile) -> bytes:
    lines = ["original variables", str(m.original_variables)]
    if m.compression is None:
        lines.append("no table")
    else:
        t = m.compression
        lines += [
            "compress tables",
            f"table {t.index} {t.original_variable_count}",
            format_clause(t.forward),
            f"units {t.index}",
            format_clause(t.units),
            "end table",
        ]
    lines.append("ee table")
    lines.extend(format_clause(c) for c in m.ee_table.classes)
    lines.append("postprocess stack")
    for step in m.stack:
        if isinstance(step, EeMarker):
            lines.append("ee")
        elif isinstance(step, BceStep):
            lines += [f"bce {step.literal}", format_clause(step.clause)]
        else:
            lines.append(f"ve {step.variable} {len(step.clauses)}")
            lines.extend(format_clause(c) for c in step.clauses)
    return ("\n".join(lines) + "\n").encode()


class _Lines:
    def __init__(self, text: str):
        self.lines = [l.strip() for l in text.splitlines()]
        while self.lines and not self.lines[-1]:
            self.lines.pop()
        self.pos = 0

    def done(self) -> bool:
        return self.pos >= len(self.lines)

    def peek(self) -> Optional[str]:
        return None if self.done() else self.lines[self.pos]

    def next(self, what: str) -> str:
        if self.done():
            raise MapFileError(f"unexpected end of map file, expected {what}")
        self.pos += 1
        return self.lines[self.pos - 1]

    def expect(self, keyword: str) -> None:
        line = self.next(f"'{keyword}'")
        if line != keyword:
            raise MapFileError(f"line {self.pos}: expected '{keyword}', got {line!r}")

    def literals(self, what: str) -> List[int]:
        line = self.next(what)
        try:
            nums = [int(t) for t in line.split()]
        except ValueError:
            raise MapFileError(f"line {self.pos}: expected {what}, got {line!r}") from None
        if not nums or nums[-1] != 0 or 0 in nums[:-1]:
            raise MapFileError(f"line {self.pos}: {what} is not 0-terminated")
        return nums[:-1]

    def ints(self, keyword: str, count: int) -> List[int]:
        line = self.next(f"'{keyword}' line")
        parts = line.split()
        if len(parts) != count + 1 or parts[0] != keyword:
            raise MapFileError(f"line {self.pos}: expected '{keyword}' record, got {line!r}")
        try:
            return [int(p) for p in parts[1:]]
        except ValueError:
            raise MapFileError(f"line {self.pos}: bad number in {line!r}") from None


def parse_map_file(data: Text) -> MapFile:
    src = _Lines(_text(data))
    src.expect("original variables")
    try:
        original = int(src.next("variable count"))
    except ValueError:
        raise MapFileError(f"line {src.pos}: variable count is not a number") from None

    compression = None
    head = src.next("'compress tables' or 'no table'")
    if head in ("compress tables", "compress table"):
        index, count = src.ints("table", 2)
        if index != 0:
            raise MapFileError(f"line {src.pos}: only table 0 is supported, got {index}")
        forward = src.literals("compression mapping")
        (uindex,) = src.ints("units", 1)
        if uindex != index:
            raise MapFileError(f"line {src.pos}: units index {uindex} != table index {index}")
        units = src.literals("units line")
        src.expect("end table")
        try:
            compression = CompressionTable(count, forward, units, index)
        except ValueError as exc:
            raise MapFileError(f"compress tables: {exc}") from None
    elif head != "no table":
        raise MapFileError(f"line {src.pos}: expected 'compress tables' or 'no table', got {head!r}")

    src.expect("ee table")
    classes = []
    while src.peek() != "postprocess stack":
        if src.done():
            raise MapFileError("unexpected end of map file, expected 'postprocess stack'")
        classes.append(src.literals("ee class"))
    try:
        ee_table = EeTable(classes)
    except ValueError as exc:
        raise MapFileError(f"ee table: {exc}") from None
    src.expect("postprocess stack")

    stack = UndoStack()
    while not src.done():
        line = src.peek()
        kind = line.split()[0] if line else ""
        if line == "ee":
            src.next("ee")
            stack.push_ee()
        elif kind == "bce":
            (lit,) = src.ints("bce", 1)
            clause = src.literals("blocked clause")
            try:
                stack.push_bce(lit, clause)
            except ValueError as exc:
                raise MapFileError(f"line {src.pos}: {exc}") from None
        elif kind == "ve":
            v, n = src.ints("ve", 2)
            clauses = [src.literals(f"clause {i + 1} of {n} for ve {v}") for i in range(n)]
            try:
                stack.push_ve(v, clauses)
            except ValueError as exc:
                raise MapFileError(f"line {src.pos}: {exc}") from None
        else:
            raise MapFileError(f"line {src.pos + 1}: unknown postprocess stack entry {line!r}")
    return MapFile(original, compression, ee_table, stack)


def _satisfied(clause: Sequence[int], values: Dict[int, bool]) -> bool:
    return any(values.get(var(l), False) == (l > 0) for l in clause)


def extend_model(model: Sequence[int], m: MapFile) -> List[int]:
    """Turn a model of the preprocessed formula into one of the original.

    Variables the model leaves open are taken as false.
    """
    values: Dict[int, bool] = {}
    if m.compression is not None:
        forward = m.compression.forward
        for lit in model:
            if var(lit) > len(forward):
                raise ValueError(
                    f"model variable {var(lit)} outside compressed range 1..{len(forward)}"
                )
            values[forward[var(lit) - 1]] = lit > 0
        for lit in m.compression.units:
            values[var(lit)] = lit > 0
    else:
        for lit in model:
            values[var(lit)] = lit > 0

    classes = m.ee_table.classes
    for step in reversed(m.stack):
        if isinstance(step, VeStep):
            x = step.variable
            for clause in step.clauses:
                if not _satisfied(clause, values):
                    values[x] = x in clause
        elif isinstance(step, BceStep):
            if not _satisfied(step.clause, values):
                values[var(step.literal)] = step.literal > 0
        else:
            for cls in classes:
                rep_value = values.get(cls[0], False)
                for member in cls[1:]:
                    values[var(member)] = rep_value if member > 0 else not rep_value
    return [v if values.get(v, False) else -v for v in range(1, m.original_variables + 1)]


def replay_check(model: Sequence[int], m: MapFile) -> List[str]:
    """Consistency problems of an extended model against the map's own records.

    Every stored clause and equivalence over original variables must hold in a
    correctly extended model; clauses mentioning auxiliary variables are skipped.
    """
    values = {var(l): l > 0 for l in model}
    limit = m.original_variables
    problems = []
    if m.compression is not None:
        for lit in m.compression.units:
            if var(lit) <= limit and values.get(var(lit)) != (lit > 0):
                problems.append(f"unit {lit} not respected")
    for cls in m.ee_table.classes:
        if any(var(l) > limit for l in cls):
            continue
        rep = values.get(cls[0], False)
        for member in cls[1:]:
            if values.get(var(member), False) != (rep if member > 0 else not rep):
                problems.append(f"equivalence {cls[0]} = {member} violated")
    for step in m.stack:
        stored = step.clauses if isinstance(step, VeStep) else (
            (step.clause,) if isinstance(step, BceStep) else ()
        )
        for clause in stored:
            if all(var(l) <= limit for l in clause) and not _satisfied(clause, values):
                problems.append(f"stored clause {format_clause(clause)} falsified")
    return problems
