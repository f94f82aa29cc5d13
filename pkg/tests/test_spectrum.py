import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdcarray import (
    DisorderSpec,
    Lattice,
    SpectrumGrid,
    WavelengthMap,
    apply_disorder,
    build_lattice,
    detune_to_wavelength,
    peak_shift,
    resonance_spectrum,
    spectral_overlap,
)
from spdcarray.spectrum import BoundaryPeakWarning, GridMismatchError, spectrum_from_intensity

from conftest import nominal_spec

# nm per mm^-1 at a = 3 ps/mm, lambda0 = 775 nm: lambda0^2 / (2 pi c a), evaluated by hand
NM_PER_MM_INV = 0.10628734995791615
# Bhattacharyya coefficient of sinc^2(x) and sinc^2(x - pi) restricted to |x| <= 200,
# from adaptive quadrature (scipy.integrate.quad, half-period panels)
SINC_OFFSET_BC = 0.4931630270802145


def single(detune=0.0, length=2.0):
    return Lattice([], [], [detune], length)


def test_single_guide_sinc_squared():
    grid = SpectrumGrid.uniform(-12, 12, 601)
    s = resonance_spectrum(single(), grid)
    ref = np.sinc(grid.points / np.pi) ** 2  # sinc^2(dbeta L / 2) with L = 2
    np.testing.assert_allclose(s.intensity, ref / np.trapezoid(ref, grid.points), rtol=1e-9, atol=1e-14)
    assert s.peak_detune == pytest.approx(0.0, abs=1e-12)
    # zeros at +/- pi
    raw = s.intensity * s.raw_scale
    at_pi = np.interp([-np.pi, np.pi], grid.points, raw)
    z = resonance_spectrum(single(), SpectrumGrid(np.array([-np.pi, 0.0, np.pi])), warn=False)
    assert z.intensity[0] < 1e-20 and z.intensity[2] < 1e-20
    assert np.all(at_pi < 1e-2 * raw.max())


def test_normalisation(geometry):
    lat = apply_disorder(build_lattice(nominal_spec(geometry)), DisorderSpec(0.4, 1, 1))
    grid = SpectrumGrid.default(2.5)
    s = resonance_spectrum(lat, grid)
    assert abs(np.trapezoid(s.intensity, grid.points) - 1) < 1e-12
    assert np.all(s.intensity >= 0)
    assert grid.points[0] <= s.peak_detune <= grid.points[-1]


def test_gain_invariance():
    base = apply_disorder(build_lattice(nominal_spec("homogeneous")), DisorderSpec(0.3, 1, 1))
    scaled = Lattice(base.couplings_spdc, base.couplings_pump, base.detunings, base.length, 17.0)
    grid = SpectrumGrid.default(2.5)
    a, b = resonance_spectrum(base, grid), resonance_spectrum(scaled, grid)
    np.testing.assert_allclose(a.intensity, b.intensity, rtol=1e-12)
    assert b.raw_scale == pytest.approx(17.0**2 * a.raw_scale, rel=1e-12)


def test_nominal_ssh_centred_single_peak():
    grid = SpectrumGrid.default(2.5)
    s = resonance_spectrum(build_lattice(nominal_spec("ssh")), grid)
    step = grid.points[1] - grid.points[0]
    assert abs(s.peak_detune) < step
    y = s.intensity
    peaks = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])) + 1
    assert np.sum(y[peaks] > 0.2 * y.max()) == 1
    # near-symmetric: overlap with its own mirror image
    mirrored = spectrum_from_intensity(grid, y[::-1].copy())
    assert spectral_overlap(s, mirrored) > 0.98


@pytest.mark.parametrize("geometry_name", ["homogeneous", "ssh"])
def test_peak_centred_without_pump_diffraction(geometry_name):
    grid = SpectrumGrid.default(2.5)
    s = resonance_spectrum(build_lattice(nominal_spec(geometry_name, pump_ratio=1e-4)), grid)
    assert abs(s.peak_detune) < 0.01 * (grid.points[1] - grid.points[0])


def test_solvers_agree_on_nominal_ssh():
    grid = SpectrumGrid.default(2.5)
    lat = build_lattice(nominal_spec("ssh"))
    cf = resonance_spectrum(lat, grid, "closed_form")
    ode = resonance_spectrum(lat, grid, "ode")
    assert np.max(np.abs(cf.intensity - ode.intensity)) < 1e-6 * cf.intensity.max()


def test_unknown_solver():
    with pytest.raises(ValueError):
        resonance_spectrum(single(), SpectrumGrid.default(1.0), "euler")


def test_boundary_peak_flagged():
    grid = SpectrumGrid.uniform(1.0, 3.0, 21)
    with pytest.warns(BoundaryPeakWarning):
        s = resonance_spectrum(single(), grid)
    assert s.peak_on_boundary


def test_grid_validation():
    with pytest.raises(ValueError):
        SpectrumGrid(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        SpectrumGrid(np.array([0.0, 2.0, 1.0]))


def test_wavelength_conversion():
    wm = WavelengthMap(3.0, 775.0)
    assert detune_to_wavelength(0.0, wm) == 0.0
    assert detune_to_wavelength(1.0, wm) == pytest.approx(-NM_PER_MM_INV, rel=1e-9)
    assert detune_to_wavelength(2.0, wm) == pytest.approx(2 * detune_to_wavelength(1.0, wm), rel=1e-15)
    # a only rescales the axis
    assert detune_to_wavelength(1.0, WavelengthMap(6.0)) == pytest.approx(-NM_PER_MM_INV / 2, rel=1e-12)
    with pytest.raises(ValueError):
        WavelengthMap(0.0)


def test_peak_shift():
    grid = SpectrumGrid.uniform(-10, 10, 401)
    wm = WavelengthMap()
    ref = resonance_spectrum(single(0.0), grid)
    assert peak_shift(ref, ref, wm) == 0.0
    # detuning -1 moves the resonance to dbeta0 = +1 -> shorter wavelength
    moved = resonance_spectrum(single(-1.0), grid)
    assert moved.peak_detune == pytest.approx(1.0, abs=1e-3)
    assert peak_shift(moved, ref, wm) == pytest.approx(-NM_PER_MM_INV, rel=1e-2)


def test_parabolic_peak_exact_for_parabola():
    grid = SpectrumGrid.uniform(-1, 1, 21)
    y = 5.0 - (grid.points - 0.0371) ** 2
    assert spectrum_from_intensity(grid, y).peak_detune == pytest.approx(0.0371, abs=1e-12)
    xs = np.array([-1.0, -0.3, 0.1, 0.45, 1.0])
    y = 2.0 - 3.0 * (xs - 0.2) ** 2
    assert spectrum_from_intensity(SpectrumGrid(xs), y).peak_detune == pytest.approx(0.2, abs=1e-12)


@pytest.mark.parametrize("offset", [0.0, 0.0131, 0.0217, -0.029])
def test_parabolic_peak_on_sinc(offset):
    grid = SpectrumGrid.default(2.5)
    h = grid.points[1] - grid.points[0]
    s = resonance_spectrum(single(-offset), grid)
    assert abs(s.peak_detune - offset) < h**2 / 8


def test_overlap_identical_and_disjoint():
    grid = SpectrumGrid.uniform(0, 10, 101)
    a = spectrum_from_intensity(grid, np.where(grid.points < 4, 1.0, 0.0))
    b = spectrum_from_intensity(grid, np.where(grid.points > 6, 1.0, 0.0))
    assert spectral_overlap(a, a) == pytest.approx(1.0, abs=1e-12)
    assert spectral_overlap(a, b) == 0.0


def test_overlap_offset_sinc_matches_quadrature():
    grid = SpectrumGrid.uniform(-200, 200, 80001)
    a = resonance_spectrum(single(0.0), grid)
    b = resonance_spectrum(single(-np.pi), grid)  # resonance at +pi
    assert spectral_overlap(a, b) == pytest.approx(SINC_OFFSET_BC, abs=1e-3)


def test_grid_mismatch():
    a = resonance_spectrum(single(), SpectrumGrid.uniform(-5, 5, 51))
    b = resonance_spectrum(single(), SpectrumGrid.uniform(-5, 5, 53))
    with pytest.raises(GridMismatchError):
        spectral_overlap(a, b)
    with pytest.raises(GridMismatchError):
        peak_shift(a, b, WavelengthMap())


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(0, 10), min_size=5, max_size=5),
    st.lists(st.floats(0, 10), min_size=5, max_size=5),
)
def test_overlap_symmetric_bounded(p, q):
    grid = SpectrumGrid.uniform(0, 1, 5)
    if np.trapezoid(p, grid.points) <= 0 or np.trapezoid(q, grid.points) <= 0:
        return
    a, b = spectrum_from_intensity(grid, p), spectrum_from_intensity(grid, q)
    ab, ba = spectral_overlap(a, b), spectral_overlap(b, a)
    assert ab == ba
    assert 0.0 <= ab <= 1.0
    if np.allclose(a.intensity, b.intensity, rtol=0, atol=1e-9):
        assert ab == pytest.approx(1.0, abs=1e-6)
    else:
        assert ab < 1.0
