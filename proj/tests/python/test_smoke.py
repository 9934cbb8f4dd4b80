import math

import pytest

import johnson_lab as jl


def test_closed_form_peak():
    # peak of the closed form sits at amplitude 2 q^2
    assert jl.one_soliton(0.0, 1.0, 2.0, 2.0, 0.0, 2.0) == pytest.approx(2.0, rel=1e-14)


def test_atom_field_matches_closed_form_at_mirrored_momentum():
    p, q, c, y, t = 0.3, 0.9, 1.4, 0.5, 2.0
    for x in (-1.0, 0.5, 2.0):
        s = jl.atom_field(p, q, c, x, y, t)
        assert s["v"] == pytest.approx(jl.one_soliton(-p, q, c, x, y, t), rel=1e-8)
        assert s["min_eig"] >= -1e-10


def test_gram_determinants():
    g, q = jl.gram_determinants(2)
    assert g == pytest.approx(2 * math.pi, rel=1e-14)
    assert q == 1.0


def test_builtins_validate_and_hash():
    assert set(jl.builtin_names()) == {"example1", "example2", "example3"}
    sc = jl.builtin("example2")
    ok, text = jl.validate(sc)
    assert ok, text
    assert jl.scenario_hash(sc) == jl.scenario_hash(jl.builtin("example2"))


def test_invalid_scenario_raises():
    sc = jl.builtin("example2")
    sc["grid"]["t"] = [2.0, 1.0]
    with pytest.raises(jl.ValidationError):
        jl.validate(sc)


def test_zero_measure_run(tmp_path):
    sc = jl.builtin("example2")
    sc["measure"]["density"] = None
    sc["paths"] = ["marchenko"]
    sc["domain"]["p_range"] = [-1.0, 1.0]
    sc["grid"]["x"] = {"min": -1.0, "max": 1.0, "count": 3, "frame": "lab"}
    sc["grid"]["t"] = [1.0]
    rows, summary = jl.run(sc, out_dir=str(tmp_path))
    assert len(rows) == 3
    assert all(r["v"] == 0.0 for r in rows)
    assert summary["rows"] == 3
    assert summary["failed_rows"] == 0


def test_phase_shift_example2():
    sc = jl.builtin("example2")
    assert jl.phase_shift(sc, 1) == pytest.approx(math.sqrt(math.pi) / 2 ** 2.5, rel=1e-12)
