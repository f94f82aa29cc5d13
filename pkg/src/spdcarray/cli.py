"""Command-line front end: ``spdcarray {spectrum,sweep,modes,compare}``.

Configuration is a TOML file (or the ``config`` block of a previous
``manifest.json``); a few flags override it. See README.md for the schema.

Exit codes: 0 success, 2 configuration error, 3 numerical diagnostic failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import logging
import sys
import time
import warnings
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .dynamics import NumericalDiagnosticError
from .ensemble import EnsembleStats, disorder_sweep
from .lattice import RNG_SCHEME, DisorderSpec, Geometry, LatticeSpec, apply_disorder, build_lattice
from .spectrum import (
    SOLVERS,
    BoundaryPeakWarning,
    SpectrumGrid,
    WavelengthMap,
    detune_to_wavelength,
    peak_shift,
    resonance_spectrum,
    spectral_overlap,
)
from .supermodes import eigendecompose, localized_mode_index, odd_sublattice_weight, participation_ratio

log = logging.getLogger("spdcarray")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

SWEEP_COLUMNS = [
    "geometry", "disorder", "n", "overlap_mean", "overlap_std",
    "shift_mean_nm", "shift_std_nm", "shift_mean_mm_inv", "shift_std_mm_inv",
]
SPECTRUM_COLUMNS = ["realization", "detune_mm_inv", "dlambda_nm", "intensity_norm"]
PEAK_COLUMNS = ["realization", "peak_detune_mm_inv", "peak_dlambda_nm", "shift_nm", "overlap"]
MODE_COLUMNS = ["index", "eigenvalue_mm_inv", "participation_ratio", "central_weight", "odd_sublattice_weight", "localized"]

DEFAULT_SWEEP = [round(0.05 * k, 2) for k in range(17)]
DEFAULT_COMPARE = [0.2, 0.4]

SCHEMA = {
    "lattice": {
        "geometry": str, "n_guides": int, "coupling": float, "dimerization": float,
        "defect_detune": float, "pump_ratio": float, "length": float, "gain": float,
    },
    "disorder": {
        "strength": float, "strengths": list, "realizations": int,
        "spectrum_realizations": int, "seed": int, "diagonal": float,
    },
    "grid": {"min": float, "max": float, "points": int},
    "wavelength": {"a_ps_per_mm": float, "lambda0_nm": float},
    "run": {"solver": str, "threads": int, "out": str, "geometries": list, "figures": bool},
}

DEFAULTS = {
    "lattice": {
        "geometry": "homogeneous", "n_guides": 13, "coupling": 2.5, "dimerization": 0.5,
        "defect_detune": None, "pump_ratio": 0.2, "length": 2.0, "gain": 1.0,
    },
    "disorder": {
        "strength": 0.4, "strengths": None, "realizations": 300,
        "spectrum_realizations": 4, "seed": 20251016, "diagonal": 0.0,
    },
    "grid": {"min": None, "max": None, "points": 481},
    "wavelength": {"a_ps_per_mm": 3.0, "lambda0_nm": 775.0},
    "run": {"solver": "closed_form", "threads": 1, "out": "out", "geometries": None, "figures": True},
}


class ConfigError(ValueError):
    pass


def _coerce(section, key, value):
    kind = SCHEMA[section][key]
    if value is None:
        return None
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind in (str, bool, list) and isinstance(value, kind):
        return value
    raise ConfigError(f"[{section}] {key}: expected {kind.__name__}, got {value!r}")


def load_config(path: str | Path | None) -> dict:
    """Read a TOML config (or a manifest's ``config`` block) and merge defaults."""
    raw: dict = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_bytes()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        try:
            if path.suffix == ".json":
                raw = json.loads(text)
                raw = raw.get("config", raw)
            else:
                raw = tomllib.loads(text.decode())
        except (ValueError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
    cfg = copy.deepcopy(DEFAULTS)
    for section, body in raw.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in body.items():
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key [{section}] {key}")
            cfg[section][key] = _coerce(section, key, value)
    return cfg


def apply_overrides(cfg: dict, args) -> dict:
    cfg = copy.deepcopy(cfg)
    if args.seed is not None:
        cfg["disorder"]["seed"] = args.seed
    if args.threads is not None:
        cfg["run"]["threads"] = args.threads
    if args.out is not None:
        cfg["run"]["out"] = args.out
    if args.solver is not None:
        cfg["run"]["solver"] = args.solver
    if args.geometry:
        cfg["lattice"]["geometry"] = args.geometry[0]
        cfg["run"]["geometries"] = list(args.geometry)
    if args.disorder is not None:
        try:
            vals = [float(x) for x in args.disorder.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"--disorder: cannot parse {args.disorder!r}") from None
        if not vals:
            raise ConfigError("--disorder: no values given")
        cfg["disorder"]["strengths"] = vals
        cfg["disorder"]["strength"] = vals[-1]
    if args.realizations is not None:
        cfg["disorder"]["realizations"] = args.realizations
    if args.no_figures:
        cfg["run"]["figures"] = False
    return cfg


def resolve(cfg: dict, command: str) -> dict:
    """Fill command-dependent defaults and validate everything."""
    cfg = copy.deepcopy(cfg)
    lat, dis, grid, run = cfg["lattice"], cfg["disorder"], cfg["grid"], cfg["run"]
    try:
        lat["geometry"] = Geometry.parse(lat["geometry"]).value
        geoms = run["geometries"]
        if geoms is None:
            geoms = [g.value for g in Geometry] if command == "compare" else [lat["geometry"]]
        run["geometries"] = [Geometry.parse(g).value for g in geoms]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if len(set(run["geometries"])) != len(run["geometries"]):
        raise ConfigError("duplicate geometries")
    if command == "compare" and len(run["geometries"]) < 2:
        raise ConfigError("compare needs at least two geometries")
    if lat["defect_detune"] is None:
        lat["defect_detune"] = 2.0 * lat["coupling"]
    if dis["strengths"] is None:
        dis["strengths"] = list(DEFAULT_COMPARE if command == "compare" else DEFAULT_SWEEP)
    try:
        dis["strengths"] = [float(x) for x in dis["strengths"]]
    except (TypeError, ValueError):
        raise ConfigError("[disorder] strengths must be a list of numbers") from None
    if grid["min"] is None:
        grid["min"] = -6.0 * lat["coupling"]
    if grid["max"] is None:
        grid["max"] = 6.0 * lat["coupling"]
    if run["solver"] not in SOLVERS:
        raise ConfigError(f"solver must be one of {SOLVERS}")
    if command in ("sweep", "compare") and run["solver"] != "closed_form":
        raise ConfigError("ensembles always use the closed_form solver")
    if run["threads"] < 1:
        raise ConfigError("threads must be >= 1")
    if dis["realizations"] < 2 or dis["spectrum_realizations"] < 0:
        raise ConfigError("need realizations >= 2 and spectrum_realizations >= 0")
    if dis["seed"] < 0:
        raise ConfigError("seed must be non-negative")
    s = dis["strengths"]
    if not s or any(b <= a for a, b in zip(s, s[1:])) or s[0] < 0 or s[-1] >= 1:
        raise ConfigError("strengths must be strictly ascending within [0, 1)")
    try:
        for g in run["geometries"]:
            lattice_spec(cfg, g)
        make_grid(cfg)
        make_wavelength_map(cfg)
        DisorderSpec(dis["strength"], dis["seed"], 0, 0, dis["diagonal"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def lattice_spec(cfg: dict, geometry: str | None = None) -> LatticeSpec:
    lat = cfg["lattice"]
    geometry = Geometry.parse(geometry or lat["geometry"])
    return LatticeSpec(
        geometry=geometry,
        n_guides=lat["n_guides"],
        mean_coupling=lat["coupling"],
        dimerization=lat["dimerization"] if geometry is Geometry.SSH else 0.0,
        defect_detune=lat["defect_detune"] if geometry is Geometry.TRIVIAL else 0.0,
        pump_ratio=lat["pump_ratio"],
        length=lat["length"],
        spdc_gain=lat["gain"],
    )


def make_grid(cfg: dict) -> SpectrumGrid:
    g = cfg["grid"]
    return SpectrumGrid.uniform(g["min"], g["max"], g["points"])


def make_wavelength_map(cfg: dict) -> WavelengthMap:
    w = cfg["wavelength"]
    return WavelengthMap(a_ps_per_mm=w["a_ps_per_mm"], lambda0_nm=w["lambda0_nm"])


def fmt(x) -> str:
    if isinstance(x, (str, bool, np.bool_)):
        return str(int(x)) if isinstance(x, (bool, np.bool_)) else x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x) + 0.0:.9g}"


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _stats_row(geometry: str, st: EnsembleStats):
    return [
        geometry, st.disorder, st.n_realizations, st.overlap_mean, st.overlap_std,
        st.shift_mean_nm, st.shift_std_nm, st.shift_mean_db, st.shift_std_db,
    ]


def cmd_spectrum(cfg: dict, out: Path) -> list[str]:
    spec = lattice_spec(cfg)
    grid, wmap = make_grid(cfg), make_wavelength_map(cfg)
    dis = cfg["disorder"]
    solver = cfg["run"]["solver"]
    nominal = build_lattice(spec)
    reference = resonance_spectrum(nominal, grid, solver)
    spectra = [("reference", reference)]
    if dis["strength"] > 0:
        for k in range(dis["spectrum_realizations"]):
            lat = apply_disorder(nominal, DisorderSpec(dis["strength"], dis["seed"], k, 0, dis["diagonal"]))
            spectra.append((str(k), resonance_spectrum(lat, grid, solver)))
    dl = detune_to_wavelength(grid.points, wmap)
    rows = []
    for label, s in spectra:
        rows.extend([label, d, l, i] for d, l, i in zip(grid.points, dl, s.intensity))
    write_csv(out / "spectrum.csv", SPECTRUM_COLUMNS, rows)
    peaks = [
        [label, s.peak_detune, detune_to_wavelength(s.peak_detune, wmap),
         peak_shift(s, reference, wmap), spectral_overlap(s, reference)]
        for label, s in spectra
    ]
    write_csv(out / "peaks.csv", PEAK_COLUMNS, peaks)
    files = ["spectrum.csv", "peaks.csv"]
    if cfg["run"]["figures"]:
        from .plotting import plot_spectra

        title = f"{spec.geometry.value}, N={spec.n_guides}, disorder {dis['strength']:g}"
        plot_spectra(out / "spectrum.svg", reference, [s for _, s in spectra[1:]], wmap, title)
        files.append("spectrum.svg")
    return files


def _sweeps(cfg: dict):
    dis, run = cfg["disorder"], cfg["run"]
    grid, wmap = make_grid(cfg), make_wavelength_map(cfg)
    out = []
    for g in run["geometries"]:
        log.info("sweeping %s over %d disorder values", g, len(dis["strengths"]))
        out.append(
            disorder_sweep(
                lattice_spec(cfg, g), dis["strengths"], dis["realizations"], dis["seed"], grid, wmap,
                threads=run["threads"], diagonal=dis["diagonal"],
            )
        )
    return out


def cmd_sweep(cfg: dict, out: Path) -> list[str]:
    sweeps = _sweeps(cfg)
    rows = [_stats_row(sw.geometry, st) for sw in sweeps for st in sw.rows]
    write_csv(out / "sweep.csv", SWEEP_COLUMNS, rows)
    files = ["sweep.csv"]
    if cfg["run"]["figures"]:
        from .plotting import plot_sweep

        plot_sweep(out / "sweep.svg", sweeps)
        files.append("sweep.svg")
    return files


def cmd_compare(cfg: dict, out: Path) -> list[str]:
    sweeps = _sweeps(cfg)
    rows = [_stats_row(sw.geometry, st) for sw in sweeps for st in sw.rows]
    write_csv(out / "compare.csv", SWEEP_COLUMNS, rows)
    files = ["compare.csv"]
    if cfg["run"]["figures"]:
        from .plotting import plot_compare

        plot_compare(out / "compare.svg", {sw.geometry: sw.rows for sw in sweeps})
        files.append("compare.svg")
    return files


def cmd_modes(cfg: dict, out: Path) -> list[str]:
    spec = lattice_spec(cfg)
    dis = cfg["disorder"]
    lat = apply_disorder(build_lattice(spec), DisorderSpec(dis["strength"], dis["seed"], 0, 0, dis["diagonal"]))
    basis = eigendecompose(lat, "spdc")
    vecs = basis.eigenvectors
    loc = localized_mode_index(basis, lat)
    pr = participation_ratio(vecs)
    odd = odd_sublattice_weight(vecs)
    central = vecs[lat.center] ** 2
    rows = [
        [k, basis.eigenvalues[k], pr[k], central[k], odd[k], k == loc]
        for k in range(basis.n_modes)
    ]
    write_csv(out / "modes.csv", MODE_COLUMNS, rows)
    n = lat.n_guides
    write_csv(
        out / "eigenvectors.csv",
        ["site"] + [f"mode_{k}" for k in range(n)],
        [[i - n // 2, *vecs[i]] for i in range(n)],
    )
    files = ["modes.csv", "eigenvectors.csv"]
    if cfg["run"]["figures"]:
        from .plotting import plot_modes

        plot_modes(out / "modes.svg", basis, loc, f"{spec.geometry.value}, disorder {dis['strength']:g}")
        files.append("modes.svg")
    return files


COMMANDS = {"spectrum": cmd_spectrum, "sweep": cmd_sweep, "modes": cmd_modes, "compare": cmd_compare}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spdcarray", description="SPDC resonance spectra of disordered waveguide arrays")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("spectrum", "disorder-free and disordered resonance spectra"),
        ("sweep", "overlap / peak-shift statistics versus disorder strength"),
        ("modes", "supermode spectrum and localized-mode diagnostics"),
        ("compare", "statistics of several geometries side by side"),
    ]:
        s = sub.add_parser(name, help=help_)
        s.add_argument("-c", "--config", help="TOML config file or manifest.json")
        s.add_argument("--seed", type=int, help="master seed")
        s.add_argument("--threads", type=int, help="worker threads for ensembles")
        s.add_argument("--out", help="output directory")
        s.add_argument("--solver", choices=SOLVERS)
        s.add_argument("--geometry", action="append", help="geometry (repeat for several)")
        s.add_argument("--disorder", help="comma-separated disorder strengths")
        s.add_argument("--realizations", type=int, help="realizations per disorder strength")
        s.add_argument("--no-figures", action="store_true", help="skip SVG output")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = resolve(apply_overrides(load_config(args.config), args), args.command)
    except ConfigError as exc:
        print(f"spdcarray: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg["run"]["out"])
    out.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("always", BoundaryPeakWarning)
        warnings.showwarning = _show_warning
        try:
            files = COMMANDS[args.command](cfg, out)
        except NumericalDiagnosticError as exc:
            print(f"spdcarray: numerical diagnostic failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
    manifest = {
        "tool": "spdcarray",
        "version": __version__,
        "command": args.command,
        "rng_scheme": RNG_SCHEME,
        "config": cfg,
        "started_utc": started.isoformat(timespec="seconds"),
        "wall_clock_s": round(time.perf_counter() - t0, 3),
        "files": files + ["manifest.json"],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"spdcarray: warning: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
