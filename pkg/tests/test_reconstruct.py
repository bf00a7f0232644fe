import random

import pytest

from cnfprep.core import Formula
from cnfprep.oracle import check_model
from cnfprep.reconstruct import (
    BceStep,
    CompressionTable,
    EeMarker,
    EeTable,
    MapFile,
    MapFileError,
    UndoStack,
    VeStep,
    compress,
    extend_model,
    parse_map_file,
    replay_check,
    write_map_file,
)

from .conftest import WORKED

WORKED_STACK = UndoStack(
    [
        EeMarker(),
        VeStep(3, ((1, 3), (-1, -3), (-3, 4))),
        BceStep(1, (1, 4)),
        BceStep(-1, (-1, -4)),
    ]
)


def worked_map():
    return MapFile(4, None, EeTable([(1, 2)]), UndoStack(WORKED_STACK))


def test_fig1_header_and_table():
    m = MapFile(
        30867,
        CompressionTable(30867, [1, 2, 3, 5, 6, 7, 9, 10, 11], [-31, 32, -30666, -30822]),
        EeTable([(1, -19), (2, -20)]),
        UndoStack([EeMarker(), BceStep(523, (-81, 523, -6716)), VeStep(812, ((-812, -74),))]),
    )
    text = write_map_file(m).decode()
    assert text.splitlines()[:4] == ["original variables", "30867", "compress tables", "table 0 30867"]
    assert (
        "table 0 30867\n1 2 3 5 6 7 9 10 11 0\nunits 0\n-31 32 -30666 -30822 0\nend table\n"
        "ee table\n1 -19 0\n2 -20 0\npostprocess stack\nee\n" in text
    )
    assert "bce 523\n-81 523 -6716 0\n" in text
    assert text.endswith("ve 812 1\n-812 -74 0\n")
    assert parse_map_file(text).stack == m.stack


def test_no_table_branch():
    text = write_map_file(MapFile(3)).decode()
    assert text == "original variables\n3\nno table\nee table\npostprocess stack\n"
    assert parse_map_file(text).compression is None


def test_parse_fig1_fragment_order():
    text = (
        "original variables\n30867\nno table\nee table\n1 -19 0\npostprocess stack\nee\n"
        "bce 523\n-81 523 -6716 0\nbce 10623\n-10429 10623 -30296 0\n"
        "ve 6587 2\n6587 6615 0\n-79 6587 0\n"
    )
    m = parse_map_file(text)
    assert m.stack == [
        EeMarker(),
        BceStep(523, (-81, 523, -6716)),
        BceStep(10623, (-10429, 10623, -30296)),
        VeStep(6587, ((6587, 6615), (-79, 6587))),
    ]
    assert write_map_file(m).decode() == text


def test_singular_compress_keyword_accepted():
    text = "original variables\n2\ncompress table\ntable 0 2\n2 0\nunits 0\n-1 0\nend table\nee table\npostprocess stack\n"
    m = parse_map_file(text)
    assert m.compression.forward == [2] and m.compression.units == [-1]


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("original variables\n3\nno table\nee table\n", "postprocess stack"),
        ("original variables\n3\nee table\npostprocess stack\n", "compress tables"),
        ("original variables\n3\nno table\nee table\n1 2\npostprocess stack\n", "0-terminated"),
        ("original variables\n3\nno table\nee table\npostprocess stack\nve 1 2\n1 2 0\n", "ve 1"),
        ("original variables\n3\ncompress tables\ntable 1 3\n1 0\nunits 1\n0\nend table\nee table\npostprocess stack\n", "table 0"),
        ("original variables\n3\nno table\nee table\npostprocess stack\nfoo\n", "unknown"),
        ("original variables\n3\nno table\nee table\npostprocess stack\nbce 2\n1 3 0\n", "blocking literal"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(MapFileError, match=fragment):
        parse_map_file(text)


def random_map(rng):
    n = rng.randint(1, 60)
    lit = lambda: rng.choice([1, -1]) * rng.randint(1, n)
    compression = None
    if rng.random() < 0.5:
        vs = list(range(1, n + 1))
        rng.shuffle(vs)
        k = rng.randint(0, n)
        fixed = vs[k:][: rng.randint(0, n - k)]
        compression = CompressionTable(n, sorted(vs[:k]), [v * rng.choice([1, -1]) for v in fixed])
    vs = list(range(1, n + 1))
    rng.shuffle(vs)
    classes, pos = [], 0
    while pos < len(vs) - 1 and rng.random() < 0.6:
        size = rng.randint(2, 4)
        group = sorted(vs[pos : pos + size])
        pos += size
        if len(group) > 1:
            classes.append([group[0]] + [v * rng.choice([1, -1]) for v in group[1:]])
    stack = UndoStack()
    for _ in range(rng.randint(0, 12)):
        kind = rng.random()
        if kind < 0.2:
            stack.push_ee()
        elif kind < 0.6:
            l = lit()
            stack.push_bce(l, sorted({l, *(lit() for _ in range(rng.randint(0, 3)))} - {-l}, key=abs))
        else:
            x = rng.randint(1, n)
            stack.push_ve(x, [[x * rng.choice([1, -1])] + [lit() for _ in range(rng.randint(0, 3))] for _ in range(rng.randint(0, 4))])
    return MapFile(n, compression, EeTable(classes), stack)


def test_random_round_trip():
    rng = random.Random(8)
    for _ in range(200):
        m = random_map(rng)
        data = write_map_file(m)
        back = parse_map_file(data)
        assert back == m
        assert write_map_file(back) == data


def test_ee_table_merges_classes():
    t = EeTable([(3, 5)])
    t.add([(1, -3)])
    assert t.classes == [(1, -3, -5)]
    t.add([(2, 7)])
    assert t.classes == [(1, -3, -5), (2, 7)]
    with pytest.raises(ValueError):
        t.add([(1, 3)])


def test_compress_examples():
    f = Formula([[2, 5], [5, -9]], 9)
    out, table = compress(f)
    assert table.forward == [2, 5, 9]
    assert out.active_clauses() == [(1, 2), (2, -3)]
    back = {new: old for old, new in table.backward().items()}
    assert [back[v] for v in (1, 2, 3)] == table.forward

    dense = Formula([[1, 2], [-2, 3]])
    out, table = compress(dense)
    assert table.forward == [1, 2, 3]
    assert out.active_clauses() == dense.active_clauses()

    out, table = compress(Formula([[1, 2]], 7), fixed_units=[-7])
    assert table.units == [-7] and 7 not in table.forward


def test_compress_rejects_whitelist():
    with pytest.raises(ValueError):
        compress(Formula([[1]]), whitelist={1})


def test_extend_worked_example():
    model = extend_model([], worked_map())
    assert check_model(WORKED, model)
    assert model == [1, 2, -3, -4]
    assert replay_check(model, worked_map()) == []


def test_extend_identity():
    assert extend_model([1, -2], MapFile(2)) == [1, -2]


def test_extend_single_bce_flip():
    m = MapFile(4, stack=UndoStack([BceStep(1, (1, 4))]))
    model = extend_model([-1, -4], m)
    assert model[0] == 1
    assert check_model([[1, 4], [-1, -4]], model)


def test_extend_with_compression():
    m = MapFile(9, CompressionTable(9, [2, 5, 9], [-7, 3]))
    assert extend_model([1, -2, 3], m) == [-1, 2, 3, -4, -5, -6, -7, -8, 9]
    with pytest.raises(ValueError):
        extend_model([4], m)


def test_extend_truncates_auxiliary_variables():
    m = MapFile(3, stack=UndoStack([VeStep(5, ((5, 1),))]))
    assert extend_model([-1, 4], m) == [-1, -2, -3]


def _replay_forward(model, m):
    """Same step semantics as extend_model, but in application order."""
    values = {abs(l): l > 0 for l in model}
    sat = lambda c: any(values.get(abs(l), False) == (l > 0) for l in c)
    for step in m.stack:
        if isinstance(step, VeStep):
            for c in step.clauses:
                if not sat(c):
                    values[step.variable] = step.variable in c
        elif isinstance(step, BceStep):
            if not sat(step.clause):
                values[abs(step.literal)] = step.literal > 0
        else:
            for cls in m.ee_table.classes:
                for member in cls[1:]:
                    values[abs(member)] = values.get(cls[0], False) == (member > 0)
    return [v if values.get(v, False) else -v for v in range(1, m.original_variables + 1)]


def test_reverse_order_is_necessary():
    m = worked_map()
    assert not check_model(WORKED, _replay_forward([], m))
    assert check_model(WORKED, extend_model([], m))


def test_replay_check_detects_inconsistent_map():
    m = MapFile(1, stack=UndoStack([BceStep(-1, (-1,)), BceStep(1, (1,))]))
    assert replay_check(extend_model([], m), m)


def test_undo_step_invariants():
    with pytest.raises(ValueError):
        VeStep(3, ((1, 2),))
    with pytest.raises(ValueError):
        BceStep(3, (1, 2))
    with pytest.raises(ValueError):
        CompressionTable(3, [1, 1])
    with pytest.raises(ValueError):
        CompressionTable(3, [1, 2], [-2])
