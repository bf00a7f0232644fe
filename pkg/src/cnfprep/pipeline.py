"""The technique loop."""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Set

from .core import Assignment, Formula, bcp, var
from .elim import (
    EquivalenceClasses,
    apply_equivalences,
    bce_pass,
    build_big,
    classes_from_pairs,
    find_equivalences,
    restrict_classes,
    ve_pass,
)
from .reconstruct import EeTable, MapFile, UndoStack, compress
from .simplify import er_pass, hte_pass, probe_clause, probe_variable, subsumption_pass, vivify_pass

logger = logging.getLogger(__name__)

TECHNIQUES = ("subsume", "ee", "hte", "probe", "vivify", "ve", "bce", "er")
DEFAULT_TECHNIQUES = frozenset(TECHNIQUES) - {"er"}


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    techniques: FrozenSet[str] = DEFAULT_TECHNIQUES
    loop_limit: int = 5
    whitelist: FrozenSet[int] = frozenset()
    blacklist: FrozenSet[int] = frozenset()
    compress_output: bool = False
    er_max_definitions: int = 0
    er_min_pair: int = 4
    probe_budget: int = 200_000

    def __post_init__(self):
        self.techniques = frozenset(t.lower() for t in self.techniques)
        self.whitelist = frozenset(self.whitelist)
        self.blacklist = frozenset(self.blacklist)
        self.validate()

    def validate(self) -> None:
        unknown = self.techniques - set(TECHNIQUES)
        if unknown:
            raise ConfigError(f"unknown technique(s): {', '.join(sorted(unknown))}")
        if self.compress_output and self.whitelist:
            raise ConfigError("compression cannot be combined with a whitelist")
        both = self.whitelist & self.blacklist
        if both:
            raise ConfigError(f"variables on both white- and blacklist: {sorted(both)}")
        if self.loop_limit < 0 or self.er_max_definitions < 0 or self.probe_budget < 0:
            raise ConfigError("limits must be non-negative")


@dataclass
class PipelineStats:
    counters: Counter = field(default_factory=Counter)
    iterations: int = 0
    wall_time: float = 0.0
    variables_before: int = 0
    variables_after: int = 0
    clauses_before: int = 0
    clauses_after: int = 0

    def bump(self, key: str, amount: int = 1) -> None:
        if amount:
            self.counters[key] += amount

    @property
    def clause_reduction(self) -> float:
        if not self.clauses_before:
            return 0.0
        return 100.0 * (self.clauses_before - self.clauses_after) / self.clauses_before


@dataclass
class PreprocessResult:
    formula: Optional[Formula]
    map_file: MapFile
    stats: PipelineStats
    ee_classes: List[tuple] = field(default_factory=list)

    @property
    def unsat(self) -> bool:
        return self.formula is None


class _Unsat(Exception):
    pass


class _Run:
    def __init__(self, f: Formula, cfg: PipelineConfig, original: int):
        self.f = f
        self.cfg = cfg
        self.original = original
        self.undo = UndoStack()
        self.ee_table = EeTable()
        self.root = Assignment()
        self.pending: List[int] = []
        self.stats = PipelineStats()
        self.er_vars: Set[int] = set()

    def check(self) -> None:
        if self.f.has_empty_clause():
            raise _Unsat()

    def propagate(self) -> int:
        """Root-level BCP of unit clauses and queued units; simplifies the formula."""
        roots = [lits[0] for _, lits in self.f.active() if len(lits) == 1] + self.pending
        self.pending = []
        if not roots:
            return 0
        start = len(self.root.trail)
        if bcp(self.f, self.root, roots) is None:
            raise _Unsat()
        new = self.root.trail[start:]
        for lit in new:
            for idx in sorted(self.f.occurrences(lit)):
                self.f.delete(idx)
        for lit in new:
            for idx in sorted(self.f.occurrences(-lit)):
                self.f.replace(idx, [l for l in self.f.clauses[idx].lits if l != -lit])
        self.check()
        self.stats.bump("bcp.units", len(new))
        return len(new)

    def substitute(self, e: EquivalenceClasses, key: str) -> int:
        if e.contradiction:
            raise _Unsat()
        e = restrict_classes(e, self.cfg.whitelist)
        if not e.classes:
            return 0
        replaced = apply_equivalences(self.f, e, self.undo, self.ee_table)
        self.stats.bump(f"{key}.classes", len(e.classes))
        self.stats.bump(f"{key}.literals_replaced", replaced)
        return len(e.classes)

    def run_subsume(self) -> int:
        removed, strengthened = subsumption_pass(self.f)
        self.stats.bump("subsume.removed", removed)
        self.stats.bump("subsume.strengthened", strengthened)
        return removed + strengthened

    def run_ee(self) -> int:
        return self.substitute(find_equivalences(build_big(self.f)), "ee")

    def run_hte(self) -> int:
        removed = hte_pass(self.f)
        self.stats.bump("hte.removed", removed)
        return removed

    def run_probe(self) -> int:
        budget = self.cfg.probe_budget
        binary_count: Counter = Counter()
        for _, lits in self.f.active():
            if len(lits) == 2:
                binary_count.update(var(l) for l in lits)
        candidates = sorted(v for v, n in binary_count.items() if n >= 2)
        pairs = []
        found = 0
        for v in candidates:
            if budget <= 0:
                break
            if v in self.root.values or not self.f.count(v):
                continue
            res = probe_variable(self.f, v)
            budget -= res.steps
            if res.unsat:
                raise _Unsat()
            units = [res.conflict_unit] if res.conflict_unit else sorted(res.units, key=var)
            if units:
                self.pending.extend(units)
                self.stats.bump("probe.units", len(units))
                found += len(units)
                self.propagate()
            pairs.extend(sorted(res.equivalences))
        for idx, lits in list(self.f.active()):
            if budget <= 0:
                break
            if self.f.clauses[idx].deleted or not 2 <= len(lits) <= 3:
                continue
            common = probe_clause(self.f, lits)
            budget -= len(lits)
            if common is None:
                raise _Unsat()
            units = sorted((u for u in common if u not in self.root), key=var)
            if units:
                self.pending.extend(units)
                self.stats.bump("probe.clause_units", len(units))
                found += len(units)
                self.propagate()
        pairs = [p for p in pairs if var(p[0]) not in self.root.values and var(p[1]) not in self.root.values]
        if pairs:
            self.stats.bump("probe.equivalences", len(pairs))
            found += self.substitute(classes_from_pairs(pairs), "probe")
        return found

    def run_vivify(self) -> int:
        n = vivify_pass(self.f)
        self.stats.bump("vivify.strengthened", n)
        return n

    def run_ve(self) -> int:
        before = self.f.num_active()
        n = ve_pass(
            self.f, self.undo, self.cfg.whitelist, self.cfg.blacklist, frozen=self.er_vars
        )
        self.stats.bump("ve.eliminated", n)
        self.stats.bump("ve.clauses_removed", max(0, before - self.f.num_active()))
        return n

    def run_bce(self) -> int:
        n = bce_pass(self.f, self.undo, self.cfg.whitelist)
        self.stats.bump("bce.removed", n)
        return n

    def run_er(self) -> int:
        defs = er_pass(
            self.f, self.cfg.er_max_definitions, self.cfg.er_min_pair, exclude=self.cfg.whitelist
        )
        self.er_vars.update(d.variable for d in defs)
        self.stats.bump("er.definitions", len(defs))
        self.stats.bump("er.clauses_added", 3 * len(defs))
        return len(defs)

    def loop(self) -> None:
        self.check()
        self.propagate()
        for _ in range(self.cfg.loop_limit):
            self.stats.iterations += 1
            changed = 0
            for name in TECHNIQUES:
                if name not in self.cfg.techniques:
                    continue
                n = getattr(self, f"run_{name}")()
                self.check()
                if n:
                    logger.debug("iteration %d: %s changed %d", self.stats.iterations, name, n)
                changed += n + self.propagate()
            if not changed:
                break

    def finish(self) -> PreprocessResult:
        m = MapFile(original_variables=self.original, ee_table=self.ee_table, stack=self.undo)
        fixed = list(self.root.trail)
        if self.cfg.compress_output:
            out, table = compress(self.f, fixed)
            m.compression = table
        else:
            out = Formula(self.f.active_clauses(), self.f.num_variables)
            for lit in fixed:
                out.add_clause([lit])
        return PreprocessResult(out, m, self.stats, self.ee_table.classes)


def preprocess(f: Formula, cfg: Optional[PipelineConfig] = None) -> PreprocessResult:
    """Run the enabled techniques in a loop on a copy of ``f``.

    Returns the reduced formula together with the map file needed to extend
    its models; ``result.formula`` is None when the input was found
    unsatisfiable.
    """
    cfg = cfg or PipelineConfig()
    cfg.validate()
    started = time.perf_counter()
    run = _Run(f.copy(), cfg, f.num_variables)
    run.stats.variables_before = f.num_variables
    run.stats.clauses_before = f.num_active()
    run.stats.bump("normalize.tautologies", f.tautologies_dropped)
    try:
        run.loop()
        result = run.finish()
        run.stats.clauses_after = result.formula.num_active()
        run.stats.variables_after = len(result.formula.live_variables())
    except _Unsat:
        m = MapFile(original_variables=f.num_variables, ee_table=run.ee_table, stack=run.undo)
        result = PreprocessResult(None, m, run.stats, run.ee_table.classes)
        run.stats.clauses_after = 1
        run.stats.variables_after = 0
    run.stats.wall_time = time.perf_counter() - started
    return result


UNSAT_CNF = b"p cnf 0 1\n0\n"


def preprocess_and_emit(doc, cfg: PipelineConfig, out_formula, out_map=None) -> int:
    """Preprocess a parsed DIMACS document and write F' and the map file.

    ``out_formula``/``out_map`` are binary file-like objects. Returns 20 when
    the input was found unsatisfiable, otherwise 0.
    """
    from .formula_io import write_dimacs
    from .reconstruct import write_map_file

    result = preprocess(doc.to_formula(), cfg)
    out_formula.write(UNSAT_CNF if result.unsat else write_dimacs(result.formula))
    if out_map is not None:
        out_map.write(write_map_file(result.map_file))
    return 20 if result.unsat else 0
