"""Command-line driver: config-driven scans, CSV/JSON output, analysis.

Commands:

    biphoton simulate --config cfg.json [--engine closed|oracle|both] [--out out.csv]
    biphoton analyze  --in out.csv [--window lo:hi] [--engine closed|oracle]
    biphoton compare  --config cfg.json

All config and output values at this boundary are human scale (nm, fs,
mm); conversion to SI happens exactly once, here.  CSV output uses a fixed
header and 9-significant-digit formatting, so identical configs produce
byte-identical files.

Exit codes: 0 success, 1 invalid config or input schema, 2 engine failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from . import analysis, modesim, units
from .errors import BiphotonError
from .interferometer import Interferogram, InterferometerConfig, scan
from .spatial import (
    SpatialAmplitude,
    SpatialGrid,
    gaussian_amplitude,
    hermite_gauss1_amplitude,
)
from .spectral import (
    Gaussian,
    Rectangular,
    SpectralDensity,
    default_frequency_grid,
)
from .states import AntiCorrelated, CorrelatedPump, TwoPhotonState

__all__ = ["main", "RunConfig", "load_config", "bundled_config_path"]

CSV_HEADER = "tau_fs,singles_port1,singles_port2,coincidence,engine"
COINCIDENCE_MATCH_TOL = 1e-6
ENERGY_TOL = 1e-9

_PROFILE_KINDS = ("gaussian", "hg1", "shifted_gaussian", "tabulated_file")
_FILTER_SHAPES = ("rectangular", "gaussian")
_ENGINES = ("closed", "oracle", "both")
_GAUSS_FWHM = 2.0 * np.sqrt(2.0 * np.log(2.0))


class ConfigError(Exception):
    """Invalid configuration; the message carries the offending field path."""


def bundled_config_path(name: str) -> Path:
    """Path of a configuration shipped with the package (e.g. 'default_mzi')."""
    return Path(resources.files("biphoton") / "configs" / f"{name}.json")


@dataclass(frozen=True)
class RunConfig:
    """Validated run description with all quantities converted to SI."""

    pump_wavelength: float
    profile_kind: str
    profile_params: dict
    filter_shape: str
    filter_center: float
    filter_bandwidth: float
    interferometer_kind: str
    delay_arm: str
    flip_arm: str
    tau_start: float
    tau_stop: float
    tau_step: float
    engine: str
    spatial_points: int
    spectral_points: int
    spatial_halfwidth: float
    output_path: str
    output_format: str

    @property
    def pump_frequency(self) -> float:
        return units.omega_from_wavelength(self.pump_wavelength)


def _require(mapping: dict, key: str, kind, path: str):
    if key not in mapping:
        raise ConfigError(f"{path}.{key}: missing required field")
    value = mapping[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind is str and isinstance(value, str):
        return value
    if kind is dict and isinstance(value, dict):
        return value
    raise ConfigError(f"{path}.{key}: expected {kind.__name__}, got {type(value).__name__}")


def load_config(path) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON (line {exc.lineno}): {exc.msg}")
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a JSON object")

    pump = _require(raw, "pump", dict, "")
    wavelength_nm = _require(pump, "wavelength_nm", float, "pump")
    if wavelength_nm <= 0.0:
        raise ConfigError("pump.wavelength_nm: must be positive")
    profile = _require(pump, "spatial_profile", dict, "pump")
    kind = _require(profile, "kind", str, "pump.spatial_profile")
    if kind not in _PROFILE_KINDS:
        raise ConfigError(
            f"pump.spatial_profile.kind: must be one of {_PROFILE_KINDS}, got {kind!r}")
    params = {k: v for k, v in profile.items() if k != "kind"}
    if kind in ("gaussian", "hg1", "shifted_gaussian"):
        waist = float(params.get("waist_mm", 1.0))
        if waist <= 0.0:
            raise ConfigError("pump.spatial_profile.waist_mm: must be positive")
        params["waist_mm"] = waist
    if kind == "shifted_gaussian":
        if "shift_mm" not in params:
            raise ConfigError("pump.spatial_profile.shift_mm: missing required field")
        params["shift_mm"] = float(params["shift_mm"])
    if kind == "tabulated_file" and "path" not in params:
        raise ConfigError("pump.spatial_profile.path: missing required field")

    filt = _require(raw, "filter", dict, "")
    center_nm = _require(filt, "center_nm", float, "filter")
    bandwidth_nm = _require(filt, "bandwidth_nm", float, "filter")
    shape = _require(filt, "shape", str, "filter")
    if center_nm <= 0.0:
        raise ConfigError("filter.center_nm: must be positive")
    if not 0.0 < bandwidth_nm < center_nm:
        raise ConfigError("filter.bandwidth_nm: must be positive and below center_nm")
    if shape not in _FILTER_SHAPES:
        raise ConfigError(f"filter.shape: must be one of {_FILTER_SHAPES}, got {shape!r}")

    itf = _require(raw, "interferometer", dict, "")
    ikind = _require(itf, "kind", str, "interferometer")
    if ikind not in ("mzi", "mzim"):
        raise ConfigError(f"interferometer.kind: must be 'mzi' or 'mzim', got {ikind!r}")
    delay_arm = str(itf.get("delay_arm", "b"))
    flip_arm = str(itf.get("flip_arm", "b"))
    for label, arm in (("delay_arm", delay_arm), ("flip_arm", flip_arm)):
        if arm not in ("a", "b"):
            raise ConfigError(f"interferometer.{label}: must be 'a' or 'b', got {arm!r}")

    scan_cfg = _require(raw, "scan", dict, "")
    tau_start_fs = _require(scan_cfg, "tau_start_fs", float, "scan")
    tau_stop_fs = _require(scan_cfg, "tau_stop_fs", float, "scan")
    tau_step_fs = _require(scan_cfg, "tau_step_fs", float, "scan")
    if tau_step_fs <= 0.0:
        raise ConfigError("scan.tau_step_fs: must be positive")
    if tau_stop_fs < tau_start_fs:
        raise ConfigError("scan.tau_stop_fs: must not precede tau_start_fs")
    pump_period_fs = 2.0 * np.pi / units.omega_from_wavelength(wavelength_nm * units.NM) / units.FS
    if tau_step_fs > 0.2 * pump_period_fs:
        raise ConfigError(
            f"scan.tau_step_fs: {tau_step_fs} exceeds 0.2 of the pump period "
            f"({pump_period_fs:.4f} fs); fringes would be undersampled")

    engine = str(raw.get("engine", "closed"))
    if engine not in _ENGINES:
        raise ConfigError(f"engine: must be one of {_ENGINES}, got {engine!r}")

    grids = _require(raw, "grids", dict, "")
    spatial_points = _require(grids, "spatial_points", int, "grids")
    spectral_points = _require(grids, "spectral_points", int, "grids")
    halfwidth_mm = _require(grids, "spatial_halfwidth_mm", float, "grids")
    for label, n in (("spatial_points", spatial_points), ("spectral_points", spectral_points)):
        if n < 3 or n % 2 == 0:
            raise ConfigError(f"grids.{label}: must be an odd integer >= 3, got {n}")
    if halfwidth_mm <= 0.0:
        raise ConfigError("grids.spatial_halfwidth_mm: must be positive")

    output = _require(raw, "output", dict, "")
    out_path = _require(output, "path", str, "output")
    out_format = _require(output, "format", str, "output")
    if out_format not in ("csv", "json"):
        raise ConfigError(f"output.format: must be 'csv' or 'json', got {out_format!r}")

    return RunConfig(
        pump_wavelength=wavelength_nm * units.NM,
        profile_kind=kind,
        profile_params=params,
        filter_shape=shape,
        filter_center=center_nm * units.NM,
        filter_bandwidth=bandwidth_nm * units.NM,
        interferometer_kind=ikind,
        delay_arm=delay_arm,
        flip_arm=flip_arm,
        tau_start=tau_start_fs * units.FS,
        tau_stop=tau_stop_fs * units.FS,
        tau_step=tau_step_fs * units.FS,
        engine=engine,
        spatial_points=spatial_points,
        spectral_points=spectral_points,
        spatial_halfwidth=halfwidth_mm * units.MM,
        output_path=out_path,
        output_format=out_format,
    )


def _pump_amplitude(cfg: RunConfig, grid: SpatialGrid) -> SpatialAmplitude:
    kind = cfg.profile_kind
    params = cfg.profile_params
    if kind == "gaussian":
        return gaussian_amplitude(grid, waist=params["waist_mm"] * units.MM)
    if kind == "hg1":
        return hermite_gauss1_amplitude(grid, waist=params["waist_mm"] * units.MM)
    if kind == "shifted_gaussian":
        return gaussian_amplitude(
            grid,
            waist=params["waist_mm"] * units.MM,
            center=params["shift_mm"] * units.MM)
    table = np.loadtxt(params["path"], delimiter=",", ndmin=2)
    if table.shape[1] not in (2, 3):
        raise ConfigError(
            "pump.spatial_profile.path: need columns x_mm,re[,im] in the table")
    x = grid.positions() / units.MM
    real = np.interp(x, table[:, 0], table[:, 1], left=0.0, right=0.0)
    imag = (np.interp(x, table[:, 0], table[:, 2], left=0.0, right=0.0)
            if table.shape[1] == 3 else 0.0)
    return SpatialAmplitude.from_samples(grid, real + 1j * imag)


def _spectral_density(cfg: RunConfig) -> SpectralDensity:
    width = units.bandwidth_to_angular(cfg.filter_center, cfg.filter_bandwidth)
    if cfg.filter_shape == "rectangular":
        return SpectralDensity(Rectangular(width))
    # Gaussian filter: the configured bandwidth is the FWHM of the density.
    return SpectralDensity(Gaussian(width / _GAUSS_FWHM))


def build_problem(cfg: RunConfig):
    """(state, interferometer config, spatial grid, frequency grid)."""
    sgrid = SpatialGrid(half_width=cfg.spatial_halfwidth, point_count=cfg.spatial_points)
    density = _spectral_density(cfg)
    fgrid = default_frequency_grid(density, point_count=cfg.spectral_points)
    state = TwoPhotonState(
        spatial=CorrelatedPump(_pump_amplitude(cfg, sgrid)),
        spectral=AntiCorrelated(density),
        pump_frequency=cfg.pump_frequency,
    )
    if cfg.interferometer_kind == "mzi":
        icfg = InterferometerConfig.mzi(cfg.pump_frequency, delay_arm=cfg.delay_arm)
    else:
        icfg = InterferometerConfig.mzim(
            cfg.pump_frequency, delay_arm=cfg.delay_arm, flip_arm=cfg.flip_arm)
    return state, icfg, sgrid, fgrid


def _run_engine(cfg: RunConfig, state, icfg, sgrid, fgrid, engine: str) -> Interferogram:
    if engine == "closed":
        return scan(state, icfg, cfg.tau_start, cfg.tau_stop, cfg.tau_step,
                    frequency_grid=fgrid)
    return modesim.oracle_scan(state, icfg, cfg.tau_start, cfg.tau_stop, cfg.tau_step,
                               spatial_grid=sgrid, frequency_grid=fgrid)


def _check_energy(gram: Interferogram):
    total = gram.singles_port1 + gram.singles_port2
    worst = float(np.max(np.abs(total - 2.0)))
    if worst > ENERGY_TOL:
        raise BiphotonError(
            f"port intensities violate the lossless-model sum rule by {worst:.3e}")


def _format_records(grams: List[Interferogram]) -> List[str]:
    lines = []
    length = grams[0].tau.size
    for i in range(length):
        for g in grams:
            lines.append(
                f"{g.tau[i] / units.FS:.9g},{g.singles_port1[i]:.9g},"
                f"{g.singles_port2[i]:.9g},{g.coincidences[i]:.9g},{g.engine}")
    return lines


def _write_output(path: str, fmt: str, grams: List[Interferogram]) -> None:
    if fmt == "csv":
        body = "\n".join([CSV_HEADER] + _format_records(grams)) + "\n"
        Path(path).write_text(body, newline="")
        return
    records = []
    for i in range(grams[0].tau.size):
        for g in grams:
            records.append({
                "tau_fs": g.tau[i] / units.FS,
                "singles_port1": float(g.singles_port1[i]),
                "singles_port2": float(g.singles_port2[i]),
                "coincidence": float(g.coincidences[i]),
                "engine": g.engine,
            })
    Path(path).write_text(json.dumps({"records": records}, indent=1) + "\n")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.engine:
        cfg = RunConfig(**{**cfg.__dict__, "engine": args.engine})
    if args.out:
        cfg = RunConfig(**{**cfg.__dict__, "output_path": args.out})
    state, icfg, sgrid, fgrid = build_problem(cfg)

    engines = ["closed", "oracle"] if cfg.engine == "both" else [cfg.engine]
    grams = [_run_engine(cfg, state, icfg, sgrid, fgrid, e) for e in engines]
    for g in grams:
        _check_energy(g)
    _write_output(cfg.output_path, cfg.output_format, grams)
    print(f"wrote {grams[0].tau.size} samples per engine to {cfg.output_path}")
    if len(grams) == 2:
        ds = float(np.max(np.abs(grams[0].singles_port1 - grams[1].singles_port1)))
        dc = float(np.max(np.abs(grams[0].coincidences - grams[1].coincidences)))
        print(f"engine agreement: max|d_singles|={ds:.3e} max|d_coincidence|={dc:.3e}")
    return 0


def _read_csv(path) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, List[str]]:
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise ConfigError(f"input file not found: {path}")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        got = lines[0] if lines else "<empty file>"
        raise ConfigError(
            f"unexpected CSV header: got {got!r}, expected {CSV_HEADER!r}")
    taus, s1, s2, cc, engines = [], [], [], [], []
    for ln_no, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 5:
            raise ConfigError(f"line {ln_no}: expected 5 fields, got {len(parts)}")
        try:
            taus.append(float(parts[0]))
            s1.append(float(parts[1]))
            s2.append(float(parts[2]))
            cc.append(float(parts[3]))
        except ValueError as exc:
            raise ConfigError(f"line {ln_no}: {exc}")
        engines.append(parts[4])
    return (np.array(taus), np.array(s1), np.array(s2), np.array(cc), engines)


def _report_to_json(rep: analysis.VisibilityReport) -> dict:
    def fs(value):
        return None if value is None else value / units.FS

    return {
        "v1": rep.v1,
        "v12": rep.v12,
        "complementarity_sum": rep.complementarity_sum,
        "window": [rep.window[0] / units.FS, rep.window[1] / units.FS],
        "fringe_period_singles": fs(rep.fringe_period_singles),
        "fringe_period_coincidence": fs(rep.fringe_period_coincidence),
        "hom_fwhm": fs(rep.hom_fwhm),
    }


def _parse_window(text: Optional[str]):
    if text is None:
        return None
    try:
        lo, hi = text.split(":")
        return (float(lo) * units.FS, float(hi) * units.FS)
    except ValueError:
        raise ConfigError(f"--window must look like 'lo:hi' in fs, got {text!r}")


def cmd_analyze(args) -> int:
    taus_fs, s1, _s2, cc, engines = _read_csv(args.infile)
    unique_engines = sorted(set(engines))
    if len(unique_engines) > 1:
        if not args.engine:
            raise ConfigError(
                f"file contains engines {unique_engines}; select one with --engine")
        mask = np.array([e == args.engine for e in engines])
        if not mask.any():
            raise ConfigError(f"no rows for engine {args.engine!r}")
        taus_fs, s1, cc = taus_fs[mask], s1[mask], cc[mask]
    tau = taus_fs * units.FS
    rep = analysis.report(tau, s1, tau, cc, window=_parse_window(args.window))
    print(json.dumps(_report_to_json(rep), indent=1))
    return 0


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    if cfg.engine == "both":
        raise ConfigError("engine: compare needs a single engine ('closed' or 'oracle')")
    results = {}
    grams = {}
    for kind in ("mzi", "mzim"):
        variant = RunConfig(**{**cfg.__dict__, "interferometer_kind": kind})
        state, icfg, sgrid, fgrid = build_problem(variant)
        gram = _run_engine(variant, state, icfg, sgrid, fgrid, cfg.engine)
        grams[kind] = gram
        rep = analysis.report(gram.tau, gram.singles_port1, gram.tau, gram.coincidences)
        results[f"{kind}_report"] = _report_to_json(rep)
    delta = float(np.max(np.abs(grams["mzi"].coincidences - grams["mzim"].coincidences)))
    results["max_coincidence_delta"] = delta
    results["coincidence_identical"] = bool(delta <= COINCIDENCE_MATCH_TOL)
    print(json.dumps(results, indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biphoton",
        description="Simulate and analyse two-photon Mach-Zehnder interferograms")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a delay scan from a JSON config")
    sim.add_argument("--config", required=True)
    sim.add_argument("--engine", choices=list(_ENGINES), default=None,
                     help="override the engine given in the config")
    sim.add_argument("--out", default=None, help="override the output path")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="summarise a scan CSV as JSON")
    ana.add_argument("--in", dest="infile", required=True)
    ana.add_argument("--window", default=None, help="visibility window 'lo:hi' in fs")
    ana.add_argument("--engine", choices=["closed", "oracle"], default=None,
                     help="row subset to analyse when the file holds both engines")
    ana.set_defaults(func=cmd_analyze)

    cmp_ = sub.add_parser("compare", help="run both interferometer variants and compare")
    cmp_.add_argument("--config", required=True)
    cmp_.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except BiphotonError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
