import numpy as np
import pytest

from spdcarray import SpectrumGrid, WavelengthMap, disorder_sweep, run_ensemble
from spdcarray.dynamics import NumericalDiagnosticError
from spdcarray.ensemble import GUARD_TOL, guard_check

from conftest import nominal_spec


def test_zero_disorder_is_trivial(geometry):
    st = run_ensemble(nominal_spec(geometry), 0.0, n=5, master_seed=3)
    assert st.overlap_mean == pytest.approx(1.0, abs=1e-12)
    assert st.overlap_std == pytest.approx(0.0, abs=1e-12)
    assert st.shift_mean_nm == 0.0 and st.shift_std_nm == 0.0


def test_needs_two_realizations():
    with pytest.raises(ValueError):
        run_ensemble(nominal_spec("ssh"), 0.2, n=1)


def test_thread_count_does_not_change_results():
    spec = nominal_spec("homogeneous")
    a = run_ensemble(spec, 0.3, n=24, master_seed=9, threads=1, keep_realizations=True)
    b = run_ensemble(spec, 0.3, n=24, master_seed=9, threads=4, keep_realizations=True)
    assert a == b


def test_seed_changes_results():
    spec = nominal_spec("homogeneous")
    a = run_ensemble(spec, 0.3, n=10, master_seed=1)
    b = run_ensemble(spec, 0.3, n=10, master_seed=2)
    assert a.shift_std_nm != b.shift_std_nm


def test_sweep_rows_independent_of_extension():
    spec = nominal_spec("trivial")
    short = disorder_sweep(spec, [0.1, 0.2], n=12, master_seed=4)
    long = disorder_sweep(spec, [0.1, 0.2, 0.3], n=12, master_seed=4)
    assert short.rows == long.rows[:2]
    assert np.array_equal(long.disorders, [0.1, 0.2, 0.3])


@pytest.mark.parametrize("bad", [[], [0.2, 0.1], [0.1, 0.1], [-0.1], [0.5, 1.0]])
def test_sweep_rejects_bad_strengths(bad):
    with pytest.raises(ValueError):
        disorder_sweep(nominal_spec("ssh"), bad, n=4, guard=False)


def test_guard_check_passes():
    spec = nominal_spec("ssh")
    err = guard_check(spec, [0.2, 0.4], 50, 7, SpectrumGrid.default(2.5))
    assert err < GUARD_TOL


def test_guard_check_raises_when_tolerance_exceeded(monkeypatch):
    import spdcarray.ensemble as ens

    monkeypatch.setattr(ens, "GUARD_TOL", 1e-30)
    with pytest.raises(NumericalDiagnosticError):
        guard_check(nominal_spec("ssh"), [0.4], 10, 7, SpectrumGrid.default(2.5))


def test_wavelength_slope_rescales_shifts():
    spec = nominal_spec("homogeneous")
    a = run_ensemble(spec, 0.3, n=10, master_seed=2, wmap=WavelengthMap(3.0))
    b = run_ensemble(spec, 0.3, n=10, master_seed=2, wmap=WavelengthMap(1.5))
    assert b.shift_std_nm == pytest.approx(2 * a.shift_std_nm, rel=1e-12)
    assert b.overlap_mean == a.overlap_mean


def test_homogeneous_shift_about_two_tenths_nm():
    st = run_ensemble(nominal_spec("homogeneous"), 0.4, n=300, master_seed=11)
    assert 0.1 <= st.shift_std_nm <= 0.3


def test_ssh_protected_at_twenty_percent():
    st = run_ensemble(nominal_spec("ssh"), 0.2, n=300, master_seed=11)
    assert st.shift_std_nm < 0.02
    assert st.overlap_mean > 0.95


def test_trivial_mode_trend():
    strengths = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4]
    sw = disorder_sweep(nominal_spec("trivial"), strengths, n=150, master_seed=5, guard=False)
    y = sw.column("shift_std_nm")
    slope, icpt = np.polyfit(strengths, y, 1)
    resid = y - (slope * np.array(strengths) + icpt)
    r2 = 1 - np.sum(resid**2) / np.sum((y - y.mean()) ** 2)
    assert slope > 0 and r2 > 0.9
    ov, se = sw.column("overlap_mean"), sw.column("overlap_std") / np.sqrt(150)
    assert np.all(np.diff(ov) <= 2 * np.hypot(se[1:], se[:-1]))


def test_keep_realizations():
    st = run_ensemble(nominal_spec("ssh"), 0.2, n=3, keep_realizations=True)
    assert [r.index for r in st.per_realization] == [0, 1, 2]
    assert st.shift_std_nm == pytest.approx(np.std([r.shift_nm for r in st.per_realization], ddof=1))
