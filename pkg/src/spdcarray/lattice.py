"""Waveguide-array geometries and seeded coupling disorder.

Three nominal geometries are supported:

* ``homogeneous`` -- identical couplings ``C`` everywhere.
* ``trivial`` -- identical couplings plus a propagation-constant offset on the
  central guide (a wider central waveguide), seen identically by pump and
  photon pair.
* ``ssh`` -- alternating couplings ``C(1 +/- K)`` with an extra long spacing at
  the centre, so both couplings touching the central guide are weak.

Disorder is multiplicative and off-diagonal: each photon coupling is scaled by
``1 + u`` with ``u ~ U[-strength, strength]`` and the pump couplings follow as
``pump_ratio`` times the disordered photon couplings.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

#: Identifier written to run manifests. Changing the stream derivation must
#: change this string.
RNG_SCHEME = "numpy.PCG64/SeedSequence[master_seed, sweep_index, realization_index]/uniform(-1,1)*strength"


class Geometry(str, enum.Enum):
    HOMOGENEOUS = "homogeneous"
    TRIVIAL = "trivial"
    SSH = "ssh"

    @classmethod
    def parse(cls, value) -> "Geometry":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {
            "homogeneous": cls.HOMOGENEOUS,
            "periodic": cls.HOMOGENEOUS,
            "trivial": cls.TRIVIAL,
            "trivial_mode": cls.TRIVIAL,
            "trivialmode": cls.TRIVIAL,
            "ssh": cls.SSH,
            "topological": cls.SSH,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown geometry {value!r}") from None


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry parameters of an array.

    Couplings and detunings are in mm^-1, the length in mm.
    """

    geometry: Geometry = Geometry.HOMOGENEOUS
    n_guides: int = 13
    mean_coupling: float = 2.5
    dimerization: float = 0.0
    defect_detune: float = 0.0
    pump_ratio: float = 0.2
    length: float = 2.0
    spdc_gain: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "geometry", Geometry.parse(self.geometry))
        n = self.n_guides
        if int(n) != n or n < 1 or n % 2 == 0:
            raise ValueError(f"n_guides must be a positive odd integer, got {n}")
        object.__setattr__(self, "n_guides", int(n))
        if not self.mean_coupling > 0:
            raise ValueError("mean_coupling must be positive")
        if not 0 <= self.dimerization < 1:
            raise ValueError("dimerization must lie in [0, 1)")
        if not self.pump_ratio > 0:
            raise ValueError("pump_ratio must be positive")
        if not self.length > 0:
            raise ValueError("length must be positive")
        if not np.isfinite(self.defect_detune):
            raise ValueError("defect_detune must be finite")

    @property
    def center(self) -> int:
        return self.n_guides // 2


@dataclass(frozen=True)
class Lattice:
    """A concrete array: couplings, per-guide detunings, length and gain."""

    couplings_spdc: np.ndarray
    couplings_pump: np.ndarray
    detunings: np.ndarray
    length: float
    spdc_gain: float = 1.0
    pump_ratio: float | None = None

    def __post_init__(self):
        cs = np.asarray(self.couplings_spdc, dtype=float)
        cp = np.asarray(self.couplings_pump, dtype=float)
        det = np.asarray(self.detunings, dtype=float)
        if det.ndim != 1 or det.size < 1:
            raise ValueError("detunings must be a non-empty 1-D sequence")
        if cs.shape != (det.size - 1,) or cp.shape != cs.shape:
            raise ValueError("need N-1 couplings for N guides")
        if np.any(cs <= 0) or np.any(cp <= 0):
            raise ValueError("couplings must be positive")
        for name, arr in (("couplings_spdc", cs), ("couplings_pump", cp), ("detunings", det)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_guides(self) -> int:
        return self.detunings.size

    @property
    def center(self) -> int:
        return self.n_guides // 2

    @property
    def max_coupling(self) -> float:
        if self.couplings_spdc.size == 0:
            return 0.0
        return float(max(self.couplings_spdc.max(), self.couplings_pump.max()))

    def hamiltonian(self, field: str = "spdc") -> np.ndarray:
        """Dense real symmetric tridiagonal coupling matrix for ``field``."""
        off = self.couplings_spdc if field == "spdc" else self.couplings_pump
        return np.diag(self.detunings) + np.diag(off, 1) + np.diag(off, -1)

    def same_as(self, other: "Lattice") -> bool:
        return (
            np.array_equal(self.couplings_spdc, other.couplings_spdc)
            and np.array_equal(self.couplings_pump, other.couplings_pump)
            and np.array_equal(self.detunings, other.detunings)
            and self.length == other.length
            and self.spdc_gain == other.spdc_gain
            and self.pump_ratio == other.pump_ratio
        )


@dataclass(frozen=True)
class DisorderSpec:
    """Disorder strength plus the keys of the random stream.

    ``sweep_index`` separates the streams of different rows of a disorder
    sweep. ``diagonal`` is an experimental absolute (mm^-1) half-width of
    on-site disorder; it breaks the chiral symmetry and is off by default.
    """

    strength: float = 0.0
    master_seed: int = 0
    realization_index: int = 0
    sweep_index: int = 0
    diagonal: float = 0.0

    def __post_init__(self):
        if not 0 <= self.strength < 1:
            raise ValueError("disorder strength must lie in [0, 1)")
        if self.diagonal < 0:
            raise ValueError("diagonal disorder width must be non-negative")
        for name in ("master_seed", "realization_index", "sweep_index"):
            if int(getattr(self, name)) < 0:
                raise ValueError(f"{name} must be non-negative")


def _ssh_couplings(n_guides: int, c: float, k: float) -> np.ndarray:
    half = (n_guides - 1) // 2
    # outward from the centre: weak, strong, weak, ...
    right = np.array([c * (1 - k) if j % 2 == 0 else c * (1 + k) for j in range(half)])
    return np.concatenate([right[::-1], right])


def build_lattice(spec: LatticeSpec) -> Lattice:
    """Nominal (disorder-free) lattice for ``spec``."""
    n = spec.n_guides
    c = spec.mean_coupling
    detunings = np.zeros(n)
    if spec.geometry is Geometry.SSH:
        if spec.dimerization == 0:
            warnings.warn("SSH lattice with K=0 is the homogeneous lattice", stacklevel=2)
        couplings = _ssh_couplings(n, c, spec.dimerization)
    else:
        couplings = np.full(n - 1, c, dtype=float)
        if spec.geometry is Geometry.TRIVIAL:
            detunings[spec.center] = spec.defect_detune
    return Lattice(
        couplings_spdc=couplings,
        couplings_pump=spec.pump_ratio * couplings,
        detunings=detunings,
        length=spec.length,
        spdc_gain=spec.spdc_gain,
        pump_ratio=spec.pump_ratio,
    )


def disorder_rng(master_seed: int, realization_index: int, sweep_index: int = 0) -> np.random.Generator:
    """Generator for one realization; see :data:`RNG_SCHEME`."""
    seq = np.random.SeedSequence([int(master_seed), int(sweep_index), int(realization_index)])
    return np.random.Generator(np.random.PCG64(seq))


def apply_disorder(lat: Lattice, dis: DisorderSpec) -> Lattice:
    """Disordered copy of ``lat``.

    Draws are consumed in ascending coupling index, then (only if
    ``dis.diagonal > 0``) one draw per guide for the on-site disorder.
    """
    if dis.strength == 0 and dis.diagonal == 0:
        return lat
    rng = disorder_rng(dis.master_seed, dis.realization_index, dis.sweep_index)
    u = rng.uniform(-1.0, 1.0, size=lat.couplings_spdc.size) * dis.strength
    couplings = lat.couplings_spdc * (1.0 + u)
    # keep the pump/photon ratio bit-exact
    ratio = lat.pump_ratio
    if ratio is None:
        ratio = lat.couplings_pump / lat.couplings_spdc if couplings.size else np.empty(0)
    detunings = lat.detunings
    if dis.diagonal > 0:
        detunings = detunings + rng.uniform(-dis.diagonal, dis.diagonal, size=detunings.size)
    return Lattice(
        couplings_spdc=couplings,
        couplings_pump=ratio * couplings,
        detunings=detunings,
        length=lat.length,
        spdc_gain=lat.spdc_gain,
        pump_ratio=lat.pump_ratio,
    )
