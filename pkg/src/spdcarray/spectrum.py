"""Resonance spectra of the central guide and their comparison.

The spectral variable is the single-waveguide phase mismatch ``dbeta0``
(mm^-1). It maps linearly to the pump frequency through
``dbeta0 = a (omega_p - omega_p0)``, and from there to a wavelength offset
around ``lambda0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .dynamics import integrate_biphoton
from .lattice import Lattice
from .supermodes import CentralResonance

SOLVERS = ("closed_form", "ode")


class BoundaryPeakWarning(UserWarning):
    """The spectrum maximum sits on the first or last grid point."""


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class SpectrumGrid:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 3:
            raise ValueError("a spectrum grid needs at least 3 points")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly ascending")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, lo: float, hi: float, n: int = 481) -> "SpectrumGrid":
        return cls(np.linspace(lo, hi, n))

    @classmethod
    def default(cls, mean_coupling: float, n: int = 481) -> "SpectrumGrid":
        return cls.uniform(-6.0 * mean_coupling, 6.0 * mean_coupling, n)

    def __eq__(self, other):
        return isinstance(other, SpectrumGrid) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())


@dataclass(frozen=True)
class WavelengthMap:
    """Linear map between phase mismatch and pump wavelength.

    ``a_ps_per_mm`` is the slope ``d(dbeta0)/d(omega_p)`` in ps/mm.
    """

    a_ps_per_mm: float = 3.0
    lambda0_nm: float = 775.0
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if self.a_ps_per_mm == 0 or not np.isfinite(self.a_ps_per_mm):
            raise ValueError("dispersion slope a must be finite and non-zero")
        if not self.lambda0_nm > 0:
            raise ValueError("lambda0 must be positive")

    @property
    def nm_per_mm_inv(self) -> float:
        """Wavelength offset (nm) produced by a +1 mm^-1 mismatch."""
        lam = self.lambda0_nm * 1e-9
        domega = 1.0 / (self.a_ps_per_mm * 1e-12)  # rad/s for 1 mm^-1
        return -lam**2 / (2 * math.pi * self.c) * domega * 1e9


def detune_to_wavelength(d, wmap: WavelengthMap):
    """Linearised pump-wavelength offset (nm) for mismatch ``d`` (mm^-1)."""
    out = np.asarray(d, dtype=float) * wmap.nm_per_mm_inv + 0.0
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Spectrum:
    grid: SpectrumGrid
    intensity: np.ndarray
    peak_detune: float
    raw_scale: float
    peak_on_boundary: bool = False


def _parabolic_peak(x: np.ndarray, y: np.ndarray) -> tuple[float, bool]:
    k = int(np.argmax(y))
    if k == 0 or k == y.size - 1:
        return float(x[k]), True
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    x0, x1, x2 = x[k - 1], x[k], x[k + 1]
    # vertex of the parabola through three (possibly non-uniform) points
    num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
    den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if den == 0:
        return float(x1), False
    return float(x1 - 0.5 * num / den), False


def spectrum_from_intensity(grid: SpectrumGrid, raw: np.ndarray) -> Spectrum:
    """Normalise ``raw`` to unit trapezoidal area and locate its peak."""
    raw = np.asarray(raw, dtype=float)
    area = float(np.trapezoid(raw, grid.points))
    if not area > 0:
        raise ValueError("spectrum has zero area")
    intensity = raw / area
    peak, boundary = _parabolic_peak(grid.points, intensity)
    intensity.setflags(write=False)
    return Spectrum(grid, intensity, peak, area, boundary)


def resonance_spectrum(lat: Lattice, grid: SpectrumGrid, solver: str = "closed_form", warn: bool = True) -> Spectrum:
    """``|Psi_00(L)|^2`` over ``grid``, normalised to unit area.

    Emits :class:`BoundaryPeakWarning` when the maximum lies on the grid
    edge, unless ``warn`` is false (the flag stays on the result).
    """
    if solver == "closed_form":
        amp = CentralResonance(lat).amplitude(grid.points)
    elif solver == "ode":
        amp = integrate_biphoton(lat, grid.points).central
    else:
        raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")
    spec = spectrum_from_intensity(grid, np.abs(amp) ** 2)
    if warn and spec.peak_on_boundary:
        warnings.warn("resonance peak on the grid boundary; widen the grid", BoundaryPeakWarning, stacklevel=2)
    return spec


def _check_grids(s1: Spectrum, s2: Spectrum):
    if s1.grid != s2.grid:
        raise GridMismatchError("spectra are sampled on different grids")


def peak_shift(s: Spectrum, reference: Spectrum, wmap: WavelengthMap) -> float:
    """Peak wavelength shift (nm) of ``s`` relative to ``reference``."""
    _check_grids(s, reference)
    return float(detune_to_wavelength(s.peak_detune - reference.peak_detune, wmap))


def spectral_overlap(s1: Spectrum, s2: Spectrum) -> float:
    """Bhattacharyya coefficient of two unit-area spectra."""
    _check_grids(s1, s2)
    bc = float(np.trapezoid(np.sqrt(s1.intensity * s2.intensity), s1.grid.points))
    return min(max(bc, 0.0), 1.0)
