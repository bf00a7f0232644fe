import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnfprep.core import Assignment, Formula, bcp, normalize_clause, resolve

from .conftest import PROBE_CARRIER

literal = st.integers(1, 8).flatmap(lambda v: st.sampled_from([v, -v]))
clause = st.lists(literal, max_size=6)


def test_normalize_examples():
    assert normalize_clause([1, 1, 3]) == (1, 3)
    assert normalize_clause([1, 3, -2, 2]) is None
    assert normalize_clause([2, -1]) == (-1, 2)


def test_normalize_rejects_zero():
    with pytest.raises(ValueError):
        normalize_clause([1, 0])


@given(clause)
def test_normalize_idempotent(c):
    once = normalize_clause(c)
    if once is not None:
        assert normalize_clause(once) == once
        assert list(once) == sorted(set(once), key=abs)


def test_resolve_examples():
    assert resolve([1, 3], [-3, 4], 3) == (1, 4)
    assert resolve([1, 3], [-1, -3], 3) is None
    assert resolve([1, 4], [-1, -4], 1) is None


def test_resolve_requires_opposite_pivot():
    with pytest.raises(ValueError):
        resolve([1, 2], [1, 3], 1)


@given(clause, clause, st.integers(1, 8))
def test_resolve_symmetric(c, d, v):
    c = [l for l in c if abs(l) != v] + [v]
    d = [l for l in d if abs(l) != v] + [-v]
    assert resolve(c, d, v) == resolve(d, c, v)


def test_bcp_probe_table():
    f = Formula(PROBE_CARRIER)
    a = bcp(f, Assignment(), [1])
    assert set(a.trail) - {1} == {2, 3, 4, -5, -7}
    a = bcp(f, Assignment(), [-1])
    assert set(a.trail) - {-1} == {2, -4, 6, 7}


def test_bcp_no_roots_is_noop():
    f = Formula([[1, 2], [-1, 3]])
    a = Assignment([5])
    assert bcp(f, a, []) is a
    assert a.trail == [5]


def test_bcp_conflict():
    assert bcp(Formula([[1, 2], [1, -2]]), Assignment(), [-1]) is None


def test_bcp_root_against_assignment():
    assert bcp(Formula(), Assignment([1]), [-1]) is None


def test_bcp_skip_clause():
    f = Formula([[1, 2], [1, 3]])
    a = bcp(f, Assignment(), [-1], skip=0)
    assert set(a.trail) == {-1, 3}


@settings(max_examples=60)
@given(st.lists(st.lists(literal, min_size=1, max_size=3), max_size=15), st.lists(literal, max_size=3), st.integers(0, 10**6))
def test_bcp_order_independent(clauses, roots, seed):
    f = Formula(clauses)
    first = bcp(f, Assignment(), roots)
    shuffled = list(f.active_clauses())
    random.Random(seed).shuffle(shuffled)
    second = bcp(Formula(shuffled), Assignment(), roots)
    assert (first is None) == (second is None)
    if first is not None:
        assert set(first.trail) == set(second.trail)


def test_occurrence_index():
    f = Formula([[1, 2]])
    assert f.occurrences(1) == {0} and f.occurrences(2) == {0}
    f.add_clause([3, 4])
    f.delete(1)
    assert f.occurrences(3) == set()
    f.rebuild_occurrences()
    snapshot = {k: set(v) for k, v in f.occurs.items() if v}
    f.rebuild_occurrences()
    assert {k: set(v) for k, v in f.occurs.items() if v} == snapshot
    assert f.occurrences_valid()


def test_replace_and_compact():
    f = Formula([[1, 2, 3], [-1, 4]])
    f.replace(0, [3, 1])
    assert f.clauses[0].lits == (1, 3)
    assert f.occurrences(2) == set()
    assert not f.replace(1, [4, -4])
    f.compact()
    assert f.active_clauses() == [(1, 3)]
    assert f.occurrences_valid()


def test_tautologies_dropped_on_load():
    f = Formula([[1, -1], [2, 2]])
    assert f.active_clauses() == [(2,)]
    assert f.tautologies_dropped == 1


def test_assignment():
    a = Assignment([1, -3])
    assert a.value(1) is True and a.value(-1) is False and a.value(3) is False
    assert a.value(2) is None
    with pytest.raises(ValueError):
        a.assign(-1)
