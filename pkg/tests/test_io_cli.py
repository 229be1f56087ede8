import io
import json
import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ssd_rerank import InputError, ItemCandidate, RawPool
from ssd_rerank.bench import synthetic_pool
from ssd_rerank.cli import main
from ssd_rerank.io import REPORT_COLUMNS, load_candidates, read_candidates, save_candidates, write_candidates


def _lines(*records):
    return io.StringIO("".join(json.dumps(r) + "\n" for r in records))


def _rec(i, dim=4, **extra):
    return {"id": f"i{i}", "quality": float(i), "embedding": [float(i + k) for k in range(dim)], **extra}


def test_read_two_lines():
    pool = read_candidates(_lines(_rec(1), _rec(2, taxonomy="news")))
    assert len(pool.items) == 2 and pool.raw_dim == 4
    assert pool.items[1].taxonomy == "news" and not pool.items[0].blocked


def test_length_mismatch_cites_line():
    with pytest.raises(InputError, match="line 3"):
        read_candidates(_lines(_rec(1), _rec(2), _rec(3, dim=5)))


def test_duplicate_id_cites_line():
    with pytest.raises(InputError, match="line 2.*duplicate"):
        read_candidates(_lines(_rec(1), _rec(1)))


def test_malformed_json_cites_line():
    with pytest.raises(InputError, match="line 2: malformed"):
        read_candidates(io.StringIO(json.dumps(_rec(1)) + "\n{nope\n"))


@pytest.mark.parametrize("bad", [
    {"quality": 1.0, "embedding": [1.0]},
    {"id": 3, "quality": 1.0, "embedding": [1.0]},
    {"id": "a", "quality": "x", "embedding": [1.0]},
    {"id": "a", "quality": 1.0, "embedding": []},
    {"id": "a", "quality": 1.0, "embedding": [1.0], "blocked": "yes"},
])
def test_bad_fields_rejected(bad):
    with pytest.raises(InputError, match="line 1"):
        read_candidates(_lines(bad))


def test_empty_file(tmp_path):
    p = tmp_path / "empty.jsonl"
    p.write_text("\n\n")
    with pytest.raises(InputError, match="empty"):
        load_candidates(p)


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_candidates(tmp_path / "nope.jsonl")


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(finite, st.lists(finite, min_size=3, max_size=3),
                          st.one_of(st.none(), st.text(max_size=5)), st.booleans()),
                min_size=1, max_size=6))
def test_round_trip_preserves_fields(rows):
    items = [ItemCandidate(f"id{k}", q, e, t, b) for k, (q, e, t, b) in enumerate(rows)]
    buf = io.StringIO()
    write_candidates(items, buf)
    back = read_candidates(io.StringIO(buf.getvalue())).items
    for a, b in zip(items, back):
        assert (a.id, a.quality, a.taxonomy, a.blocked) == (b.id, b.quality, b.taxonomy, b.blocked)
        assert np.array_equal(a.raw_embedding, b.raw_embedding)


# -- command line ------------------------------------------------------------

@pytest.fixture
def pool_file(tmp_path):
    path = tmp_path / "pool.jsonl"
    save_candidates(synthetic_pool(600, 65, seed=1).items, path)
    return path


def _run(*argv):
    return main([str(a) for a in argv])


def test_star_on_600_items_gives_80_unique_ids(pool_file, tmp_path):
    out = tmp_path / "out.txt"
    assert _run("--input", pool_file, "--algo", "ssd-star", "--length", 80, "--window", 10,
                "--gamma", 0.5, "--output", out) == 0
    ids = out.read_text().splitlines()
    assert len(ids) == 80 and len(set(ids)) == 80
    known = {it.id for it in load_candidates(pool_file).items}
    assert set(ids) <= known


def test_gamma_zero_is_quality_order(pool_file, tmp_path):
    out = tmp_path / "out.txt"
    assert _run("--input", pool_file, "--algo", "ssd-star", "--gamma", 0, "--output", out) == 0
    items = load_candidates(pool_file).items
    order = sorted(range(len(items)), key=lambda k: (-items[k].quality, k))
    assert out.read_text().splitlines() == [items[k].id for k in order[:80]]


def test_blocked_items_never_returned(tmp_path):
    items = list(synthetic_pool(30, 5, seed=2).items)
    items[0] = ItemCandidate(items[0].id, 99.0, items[0].raw_embedding, blocked=True)
    path, out = tmp_path / "p.jsonl", tmp_path / "o.txt"
    save_candidates(items, path)
    assert _run("--input", path, "--length", 29, "--output", out) == 0
    ids = out.read_text().splitlines()
    assert items[0].id not in ids and len(ids) == 29


@pytest.mark.parametrize("algo", ["ssd-nowindow", "ssd-window", "ssd-star", "dpp-nowindow", "dpp-window"])
def test_repeat_runs_are_byte_identical(pool_file, tmp_path, algo):
    outs = []
    for k in range(2):
        o, r = tmp_path / f"o{k}", tmp_path / f"r{k}"
        assert _run("--input", pool_file, "--algo", algo, "--output", o, "--report", r) == 0
        outs.append((o.read_bytes(), r.read_bytes()))
    assert outs[0] == outs[1]


def test_report_columns(pool_file, tmp_path):
    r = tmp_path / "r.csv"
    assert _run("--input", pool_file, "--length", 5, "--output", tmp_path / "o", "--report", r) == 0
    lines = r.read_text().splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS) and len(lines) == 6


def test_exit_codes(pool_file, tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{oops\n")
    assert _run("--input", bad) == 2
    assert _run("--input", tmp_path / "missing.jsonl") == 2
    assert _run("--input", pool_file, "--length", 601) == 3
    assert _run("--input", pool_file, "--window", 1) == 3
    assert _run() == 3
    with pytest.raises(SystemExit) as exc:
        _run("--algo", "nope")
    assert exc.value.code == 3
    assert "exceeds pool size" in capsys.readouterr().err


def test_ignored_window_warns(pool_file, tmp_path, caplog):
    with caplog.at_level(logging.WARNING, logger="ssd_rerank"):
        assert _run("--input", pool_file, "--algo", "ssd-nowindow", "--window", 4,
                    "--output", tmp_path / "o") == 0
    assert "--window is ignored" in caplog.text


def test_seeded_synthetic_mode_is_deterministic(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert _run("--seed", 4, "--output", a) == 0
    assert _run("--seed", 4, "--output", b) == 0
    assert _run("--seed", 5, "--output", c) == 0
    assert a.read_bytes() == b.read_bytes() != c.read_bytes()
    assert len(a.read_text().splitlines()) == 80
