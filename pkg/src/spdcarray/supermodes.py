"""Supermode analysis and the closed-form biphoton amplitude.

In the eigenbasis of the coupling matrices the biphoton equation decouples.
With pump supermodes ``W`` (eigenvalues ``nu``) and photon supermodes ``V``
(eigenvalues ``mu``), and ``theta = nu_q - dbeta0 - mu_s - mu_i``::

    Psi_hat[s, i](L) = gamma * sum_q W[0, q] G[q, s, i] exp(i (mu_s + mu_i) L)
                       * integral_0^L exp(i theta z) dz
    G[q, s, i]       = sum_n W[n, q] V[n, s] V[n, i]
    Psi              = V Psi_hat V^T

where ``0`` is the central guide and the integral equals
``L exp(i theta L / 2) sinc(theta L / 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .dynamics import BiphotonState
from .lattice import Lattice

ZERO_MODE_SUBLATTICE_TOL = 1e-6


@dataclass(frozen=True)
class SupermodeBasis:
    """Eigenvalues (ascending, mm^-1) and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.size


@dataclass(frozen=True)
class OverlapTensor:
    gamma: np.ndarray
    pump_weights: np.ndarray


@dataclass(frozen=True)
class ModeDiagnostics:
    mode_index: int
    zero_mode_eigenvalue: float
    localization_ratio: float
    participation_ratio: float
    central_overlap: float
    gap: float


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    mags = np.abs(vecs)
    # first entry within rounding of the column maximum decides the sign
    lead = np.argmax(mags >= mags.max(axis=0) * (1 - 1e-9), axis=0)
    signs = np.sign(vecs[lead, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def eigendecompose(lat: Lattice, field: str = "spdc") -> SupermodeBasis:
    """Full spectrum of the photon (``"spdc"``) or ``"pump"`` coupling matrix.

    Each eigenvector is signed so that its largest-magnitude entry is
    positive.
    """
    if field not in ("spdc", "pump"):
        raise ValueError(f"field must be 'spdc' or 'pump', got {field!r}")
    off = lat.couplings_spdc if field == "spdc" else lat.couplings_pump
    if lat.n_guides == 1:
        vals, vecs = lat.detunings.copy(), np.ones((1, 1))
    else:
        vals, vecs = eigh_tridiagonal(lat.detunings, off)
    return SupermodeBasis(vals, _fix_signs(vecs))


def overlap_tensor(basis_pump: SupermodeBasis, basis_spdc: SupermodeBasis) -> OverlapTensor:
    w, v = basis_pump.eigenvectors, basis_spdc.eigenvectors
    if w.shape != v.shape:
        raise ValueError("pump and photon bases have different dimensions")
    gamma = np.einsum("nq,ns,ni->qsi", w, v, v)
    # exact s <-> i symmetry regardless of summation order
    gamma = 0.5 * (gamma + gamma.transpose(0, 2, 1))
    return OverlapTensor(gamma=gamma, pump_weights=w[w.shape[0] // 2].copy())


def _propagator_integral(theta, length):
    """``integral_0^L exp(i theta z) dz`` evaluated without cancellation."""
    x = 0.5 * theta * length
    return length * np.exp(1j * x) * np.sinc(x / np.pi)


def closed_form_biphoton(lat: Lattice, detune) -> BiphotonState:
    """Exact biphoton amplitude at ``z = L`` from the supermode expansion.

    ``detune`` may be a scalar or an array; arrays add a leading batch axis.
    """
    dbeta = np.atleast_1d(np.asarray(detune, dtype=float))
    spdc = eigendecompose(lat, "spdc")
    pump = eigendecompose(lat, "pump")
    ov = overlap_tensor(pump, spdc)
    mu, nu, v = spdc.eigenvalues, pump.eigenvalues, spdc.eigenvectors
    L = lat.length
    pair = mu[:, None] + mu[None, :]
    theta = nu[None, :, None, None] - dbeta[:, None, None, None] - pair[None, None]
    weights = ov.pump_weights[:, None, None] * ov.gamma * np.exp(1j * pair * L)[None]
    psi_hat = lat.spdc_gain * np.einsum("qsi,bqsi->bsi", weights, _propagator_integral(theta, L))
    psi = v[None] @ psi_hat @ v.T[None]
    if np.ndim(detune) == 0:
        psi = psi[0]
    return BiphotonState(psi, L)


class CentralResonance:
    """Fast evaluation of ``Psi_00(L)`` over many phase mismatches.

    The central amplitude is a sum of ``N^2 (N+1) / 2`` terms
    ``c_j * integral_0^L exp(i (theta_j - dbeta0) z) dz``. Writing the
    integral as ``(exp(i theta_j L) exp(-i dbeta0 L) - 1) / (i (theta_j - dbeta0))``
    splits the sum into two real-kernel matrix products. Pairs with
    ``|theta_j - dbeta0| L < SMALL`` use a Taylor series instead.
    """

    SMALL = 1e-4

    def __init__(self, lat: Lattice):
        spdc = eigendecompose(lat, "spdc")
        pump = eigendecompose(lat, "pump")
        ov = overlap_tensor(pump, spdc)
        mu, nu = spdc.eigenvalues, pump.eigenvalues
        v0 = spdc.eigenvectors[lat.center]
        L = lat.length
        s, i = np.triu_indices(mu.size)
        mult = np.where(s == i, 1.0, 2.0)
        pair = mu[s] + mu[i]
        coef = (
            lat.spdc_gain
            * ov.pump_weights[:, None]
            * ov.gamma[:, s, i]
            * (mult * v0[s] * v0[i] * np.exp(1j * pair * L))[None, :]
        )
        self.length = L
        self.coef = coef.ravel()
        self.theta = (nu[:, None] - pair[None, :]).ravel()
        self._coef_phase = self.coef * np.exp(1j * self.theta * L)

    def amplitude(self, detune) -> np.ndarray:
        d = np.atleast_1d(np.asarray(detune, dtype=float))
        L = self.length
        delta = self.theta[None, :] - d[:, None]
        small = np.abs(delta) * L < self.SMALL
        with np.errstate(divide="ignore"):
            inv = 1.0 / delta
        inv[small] = 0.0
        a, b = self._coef_phase, self.coef
        ra = inv @ a.real + 1j * (inv @ a.imag)
        rb = inv @ b.real + 1j * (inv @ b.imag)
        out = -1j * (np.exp(-1j * d * L) * ra - rb)
        if small.any():
            rows, cols = np.nonzero(small)
            x = delta[rows, cols] * L
            series = L * (1.0 + 0.5j * x - x**2 / 6.0 - 1j * x**3 / 24.0)
            np.add.at(out, rows, self.coef[cols] * series)
        return out[0] if np.ndim(detune) == 0 else out


def participation_ratio(vecs: np.ndarray) -> np.ndarray:
    return 1.0 / np.sum(np.abs(vecs) ** 4, axis=0)


def odd_sublattice_weight(vecs: np.ndarray) -> np.ndarray:
    """Weight of each mode on guides at odd distance from the centre."""
    n = vecs.shape[0]
    odd = (np.arange(n) - n // 2) % 2 == 1
    return np.sum(np.abs(vecs[odd]) ** 2, axis=0)


def localized_mode_index(basis: SupermodeBasis, lat: Lattice) -> int:
    """Index of the mode localized on the central guide.

    Zero-diagonal lattices: the chiral zero mode (closest to 0 among modes
    with no weight on the odd sublattice). Otherwise: the mode with the
    largest central weight.
    """
    vals, vecs = basis.eigenvalues, basis.eigenvectors
    if not np.any(lat.detunings):
        cand = np.flatnonzero(odd_sublattice_weight(vecs) < ZERO_MODE_SUBLATTICE_TOL)
        if cand.size:
            return int(cand[np.argmin(np.abs(vals[cand]))])
    return int(np.argmax(vecs[lat.center] ** 2))


def mode_diagnostics(basis: SupermodeBasis, lat: Lattice) -> ModeDiagnostics:
    """Describe the central localized mode of ``basis``.

    ``localization_ratio`` is ``|v[c+2] / v[c]|`` (decay per unit cell to the
    right of the centre ``c``; NaN when ``N < 5``) and ``gap`` the distance
    from the mode's eigenvalue to the closest other eigenvalue.
    """
    k = localized_mode_index(basis, lat)
    vals, vecs = basis.eigenvalues, basis.eigenvectors
    vec = vecs[:, k]
    c = lat.center
    ratio = float(abs(vec[c + 2] / vec[c])) if lat.n_guides >= 5 and vec[c] != 0 else float("nan")
    others = np.delete(vals, k)
    gap = float(np.min(np.abs(others - vals[k]))) if others.size else float("inf")
    return ModeDiagnostics(
        mode_index=k,
        zero_mode_eigenvalue=float(vals[k]),
        localization_ratio=ratio,
        participation_ratio=float(participation_ratio(vec[:, None])[0]),
        central_overlap=float(vec[c] ** 2),
        gap=gap,
    )
