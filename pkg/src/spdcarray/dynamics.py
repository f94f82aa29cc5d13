"""Fixed-step RK4 propagation of the pump and of the biphoton amplitude.

Convention used throughout the package::

    dA/dz   = i H_p A,                       A(0) = e_center
    dPsi/dz = i (H_s Psi + Psi H_s) + gamma diag(A(z)) exp(-i dbeta0 z),
    Psi(0)  = 0

``H_p`` and ``H_s`` are the tridiagonal coupling matrices of the pump and of
the photon pair (off-diagonals = couplings, diagonal = detunings) and
``dbeta0`` is the single-waveguide phase mismatch. This is the complex
conjugate of the other common way of writing the source term with ``A*``;
``|Psi|`` is the same for zero-diagonal lattices. With a detuning ``delta`` on
a single guide the resonance sits at ``dbeta0 = -delta``.

The pump is co-integrated with ``Psi`` on the same grid. Several phase
mismatches can be integrated at once: the batch axis comes first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import Lattice

PUMP_NORM_TOL = 1e-9


class NumericalDiagnosticError(RuntimeError):
    """Raised when a post-hoc accuracy check of the integrator fails."""


@dataclass(frozen=True)
class PumpField:
    amplitudes: np.ndarray
    z: float

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class BiphotonState:
    """Biphoton amplitude ``psi[n_s, n_i]`` at position ``z``.

    ``psi`` may carry a leading batch axis (one slice per phase mismatch).
    """

    psi: np.ndarray
    z: float

    @property
    def central(self):
        n0 = self.psi.shape[-1] // 2
        return self.psi[..., n0, n0]


def default_steps(lat: Lattice) -> int:
    """Number of RK4 steps over the full length.

    Sized so that the fastest phase in the biphoton generator advances by at
    most ~0.025 rad per step. The generator ``i(H_s x 1 + 1 x H_s)`` has
    spectral radius ``<= 2 (max|detuning| + 2 C_max)``.
    """
    radius = 2.0 * (float(np.max(np.abs(lat.detunings))) + 2.0 * lat.max_coupling)
    return max(400, math.ceil(40.0 * radius * lat.length))


def _rk4_step(f, z, h, y):
    k1 = f(z, y)
    k2 = f(z + 0.5 * h, tuple(a + 0.5 * h * b for a, b in zip(y, k1)))
    k3 = f(z + 0.5 * h, tuple(a + 0.5 * h * b for a, b in zip(y, k2)))
    k4 = f(z + h, tuple(a + h * b for a, b in zip(y, k3)))
    return tuple(a + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4) for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))


def _integrate(f, y, z0, z1, steps):
    h = (z1 - z0) / steps
    for k in range(steps):
        y = _rk4_step(f, z0 + k * h, h, y)
    return y


def _injection(n: int) -> np.ndarray:
    a = np.zeros(n, dtype=complex)
    a[n // 2] = 1.0
    return a


def propagate_pump(lat: Lattice, z_samples, steps: int | None = None) -> list[PumpField]:
    """Pump amplitudes at each position of ``z_samples`` (ascending, in [0, L]).

    ``steps`` is the step count per full length ``L``; the default follows
    :func:`default_steps`.
    """
    z_samples = np.asarray(z_samples, dtype=float)
    if z_samples.size and (np.any(np.diff(z_samples) < 0) or z_samples[0] < 0 or z_samples[-1] > lat.length * (1 + 1e-12)):
        raise ValueError("z_samples must be ascending and inside [0, L]")
    steps = steps or default_steps(lat)
    h_max = lat.length / steps
    hp = lat.hamiltonian("pump")

    def rhs(z, y):
        return (1j * (hp @ y[0]),)

    out = []
    z = 0.0
    state = (_injection(lat.n_guides),)
    for zs in z_samples:
        if zs > z:
            state = _integrate(rhs, state, z, zs, max(1, math.ceil((zs - z) / h_max - 1e-9)))
            z = float(zs)
        out.append(PumpField(state[0].copy(), float(zs)))
    if out and abs(out[-1].norm - 1.0) > PUMP_NORM_TOL:
        raise NumericalDiagnosticError(f"pump norm drifted to {out[-1].norm!r}")
    return out


def _biphoton_rhs(hs, hp, gain, dbeta, diag_idx):
    def rhs(z, y):
        a, psi = y
        dpsi = 1j * (np.matmul(hs, psi) + np.matmul(psi, hs))
        dpsi[:, diag_idx, diag_idx] += gain * np.exp(-1j * dbeta * z)[:, None] * a[None, :]
        return 1j * (hp @ a), dpsi

    return rhs


def _run_biphoton(rhs, n, batch, length, steps):
    y = (_injection(n), np.zeros((batch, n, n), dtype=complex))
    a, psi = _integrate(rhs, y, 0.0, length, steps)
    if abs(float(np.sum(np.abs(a) ** 2)) - 1.0) > PUMP_NORM_TOL:
        raise NumericalDiagnosticError("pump norm not conserved; reduce the step size")
    return psi


def _shape_output(psi, detune, length):
    if np.ndim(detune) == 0:
        psi = psi[0]
    return BiphotonState(psi, length)


def integrate_biphoton(lat: Lattice, detune, steps: int | None = None, check_tol: float | None = None) -> BiphotonState:
    """Integrate the biphoton amplitude to ``z = L``.

    ``detune`` is a phase mismatch in mm^-1 or an array of them. When
    ``check_tol`` is given the run is repeated with twice the steps and a
    :class:`NumericalDiagnosticError` is raised if ``|Psi_00|`` moves by more
    than ``check_tol`` relative to its largest value.
    """
    dbeta = np.atleast_1d(np.asarray(detune, dtype=float))
    n = lat.n_guides
    steps = steps or default_steps(lat)
    rhs = _biphoton_rhs(
        lat.hamiltonian("spdc"), lat.hamiltonian("pump"), lat.spdc_gain, dbeta, np.arange(n)
    )
    psi = _run_biphoton(rhs, n, dbeta.size, lat.length, steps)
    if check_tol is not None:
        fine = _run_biphoton(rhs, n, dbeta.size, lat.length, 2 * steps)
        c0, c1 = psi[:, n // 2, n // 2], fine[:, n // 2, n // 2]
        scale = max(np.max(np.abs(c1)), np.finfo(float).tiny)
        if np.max(np.abs(np.abs(c0) - np.abs(c1))) > check_tol * scale:
            raise NumericalDiagnosticError("step doubling changed |Psi_00| beyond tolerance")
    return _shape_output(psi, detune, lat.length)


def integrate_biphoton_rotating(lat: Lattice, detune, steps: int | None = None) -> BiphotonState:
    """Same physics as :func:`integrate_biphoton` in the rotating frame.

    The detunings ``D`` are removed from the diagonal: coupling ``n -> m``
    picks up the phase ``exp(i (D_m - D_n) z)`` and guide ``n`` sees the
    mismatch ``dbeta0 + D_n`` in the source term. The returned amplitude
    differs from the diagonal form by the phases ``exp(i (D_a + D_b) L)``
    only, so ``|Psi|`` agrees.
    """
    dbeta = np.atleast_1d(np.asarray(detune, dtype=float))
    n = lat.n_guides
    steps = steps or default_steps(lat)
    d = lat.detunings
    hs0 = lat.hamiltonian("spdc") - np.diag(d)
    hp0 = lat.hamiltonian("pump") - np.diag(d)
    gap = d[None, :] - d[:, None]
    idx = np.arange(n)
    mismatch = dbeta[:, None] + d[None, :]

    def rhs(z, y):
        a, psi = y
        rot = np.exp(1j * gap * z)
        hs = hs0 * rot
        hp = hp0 * rot
        dpsi = 1j * (np.matmul(hs, psi) + np.matmul(psi, hs.T))
        dpsi[:, idx, idx] += lat.spdc_gain * np.exp(-1j * mismatch * z) * a[None, :]
        return 1j * (hp @ a), dpsi

    psi = _run_biphoton(rhs, n, dbeta.size, lat.length, steps)
    return _shape_output(psi, detune, lat.length)
