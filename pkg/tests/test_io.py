import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dhs.io import read_report, read_signal, to_jsonable, write_report, write_signal
from dhs.spectral import GridSignal


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(1e-3, 1.0), st.floats(-50.0, 50.0))
def test_signal_roundtrip_is_exact(seed, dx, x0):
    import tempfile
    from pathlib import Path

    f = GridSignal(np.random.default_rng(seed).standard_normal(64), dx, x0)
    with tempfile.TemporaryDirectory() as d:
        p = Path(d) / "f.csv"
        write_signal(f, p)
        back = read_signal(p)
        assert np.array_equal(back.samples, f.samples)
        assert back.n == f.n
        assert back.x0 == f.x0
        assert back.dx == pytest.approx(f.dx, rel=1e-12)


def test_signal_file_is_stable(tmp_path):
    f = GridSignal(np.linspace(-1, 1, 32), 0.1, -1.6)
    write_signal(f, tmp_path / "a.csv")
    write_signal(f, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.csv").read_text().startswith("x,y\n")


def test_nonuniform_x_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,y\n0,1\n1,2\n3,3\n4,4\n")
    with pytest.raises(ValueError, match="uniformly"):
        read_signal(p)


def test_bad_header_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,v\n0,1\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        read_signal(p)


def test_missing_file_names_path(tmp_path):
    with pytest.raises(OSError, match="missing.csv"):
        read_signal(tmp_path / "missing.csv")


def test_report_roundtrip(tmp_path):
    rep = {"b": 1.0 / 3.0, "a": [1, 2.5e-300, True, None], "c": {"x": np.float64(0.1)},
           "top": math.inf, "bottom": -math.inf, "n": np.int64(7)}
    write_report(rep, tmp_path / "r.json")
    back = read_report(tmp_path / "r.json")
    assert back["b"] == 1.0 / 3.0
    assert back["a"] == [1, 2.5e-300, True, None]
    assert back["c"] == {"x": 0.1}
    assert back["top"] == math.inf and back["bottom"] == -math.inf
    assert back["n"] == 7


def test_report_keys_sorted_and_idempotent(tmp_path):
    rep = {"z": 1, "a": {"y": 2, "b": 3}}
    write_report(rep, tmp_path / "r.json")
    first = (tmp_path / "r.json").read_bytes()
    write_report(rep, tmp_path / "r.json")
    assert (tmp_path / "r.json").read_bytes() == first
    text = first.decode()
    assert text.index('"a"') < text.index('"z"')
    assert text.endswith("\n")
    json.loads(text)


def test_nan_rejected_before_write(tmp_path):
    with pytest.raises(ValueError, match="inner.value"):
        write_report({"inner": {"value": math.nan}}, tmp_path / "r.json")
    assert not (tmp_path / "r.json").exists()


def test_unserializable_rejected():
    with pytest.raises(TypeError):
        to_jsonable({"obj": object()})


def test_unwritable_directory_names_path(tmp_path):
    target = tmp_path / "no" / "such" / "dir" / "r.json"
    with pytest.raises(OSError, match="dir"):
        write_report({"a": 1}, target)
    with pytest.raises(OSError, match="dir"):
        write_signal(GridSignal(np.zeros(4), 1.0), tmp_path / "no" / "dir" / "f.csv")
