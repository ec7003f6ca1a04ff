import math

import numpy as np
import pytest

import gapbound as gb


def test_two_site_equality():
    spec = gb.ModelSpec(2)
    spec.add_hopping(1, 2, np.array([[-1.0]]))
    sp = gb.lowest_two(spec)
    assert sp.gap == pytest.approx(2.0, abs=1e-14)
    p = gb.density(sp.psi0, spec)
    st = gb.position_stats(p)
    assert st.variance == pytest.approx(0.25, abs=1e-14)


def test_assemble_is_hermitian():
    spec = gb.ModelSpec(3, n0=2)
    spec.add_hopping(1, 2, np.array([[1 + 2j, 0.5], [0, -1j]]))
    spec.add_onsite(2, np.array([[1.0, 0.5j], [-0.5j, -2.0]]))
    m = gb.assemble(spec)
    assert m.shape == (6, 6)
    assert np.array_equal(m, m.conj().T)


def test_parse_model_and_round_trip():
    text = "L 2\nN0 1\nlabel demo\nT 1 2 1 1 -1 0\n"
    spec = gb.parse_model(text)
    assert spec.label == "demo"
    again = gb.parse_model(spec.to_text())
    assert np.array_equal(gb.assemble(again), gb.assemble(spec))


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError, match="line 3"):
        gb.parse_model("L 2\nN0 1\nT 2 1 1 1 1 0\n")
    with pytest.raises(ValueError):
        gb.impurity_model(3, -1.0)
    spec = gb.ModelSpec(2)
    spec.add_onsite(1, np.array([[0.5]]))
    spec.add_onsite(2, np.array([[0.5]]))
    with pytest.raises(gb.InvariantError):
        gb.lowest_two(spec)


def test_impurity_bounds_hold():
    spec = gb.impurity_model(200, -1.0)
    assert gb.check_nearest_neighbor(spec) == 1.0
    cv, mu = gb.fit_envelope(spec, 1.0)
    assert cv == pytest.approx(math.e)
    sp = gb.lowest_two(spec)
    p = gb.density(sp.psi0, spec)
    st = gb.position_stats(p)
    t1 = gb.theorem1_bound(cv, mu, sp.gap, 0.5, st.std_dev)
    t2 = gb.theorem2_bound(1.0, sp.gap, 0.5, st.std_dev)
    assert t2.xi2 < t1.xi1
    assert gb.verify_envelope(p, st.mean, t1).passed
    check = gb.verify_envelope(p, st.mean, t2, grid_step=0.25)
    assert check.passed and len(check.radii) > 0
    fit = gb.fit_localization_length(p, 101)
    assert fit.xi_fit == pytest.approx(st.std_dev / math.sqrt(2), rel=0.1)


def test_c1_constant():
    assert gb.c1_constant(1.0, 1.0) == pytest.approx(21.6625, abs=1e-4)


def test_sweep_and_fuzz():
    rows = gb.run_sweep(40, gb.log_spaced_h0(4), threads=1)
    assert len(rows) == 4
    assert all(r.ratio2 <= r.ratio1 and r.violations1 == 0 for r in rows)
    rep = gb.run_fuzz(seed=1, trials=20)
    assert rep.ok and rep.failed_check is None
    assert rep.to_text() == gb.run_fuzz(seed=1, trials=20).to_text()
