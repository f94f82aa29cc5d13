"""Photon-pair generation in disordered nonlinear waveguide arrays."""

__version__ = "0.1.0"

from .dynamics import (
    BiphotonState,
    NumericalDiagnosticError,
    PumpField,
    integrate_biphoton,
    integrate_biphoton_rotating,
    propagate_pump,
)
from .ensemble import EnsembleStats, SweepResult, disorder_sweep, run_ensemble
from .lattice import DisorderSpec, Geometry, Lattice, LatticeSpec, apply_disorder, build_lattice
from .spectrum import (
    Spectrum,
    SpectrumGrid,
    WavelengthMap,
    detune_to_wavelength,
    peak_shift,
    resonance_spectrum,
    spectral_overlap,
)
from .supermodes import (
    CentralResonance,
    SupermodeBasis,
    closed_form_biphoton,
    eigendecompose,
    mode_diagnostics,
    overlap_tensor,
)
