"""Configuration files, result serialization, and the command-line surface.

Configs are strict JSON: unknown keys are rejected with path-qualified
messages, and an empty object expands to the full default experiment.
Outputs are plot-ready CSV (9 significant digits, deterministic bytes)
plus a JSON metadata file echoing the full configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bloch import AtomSpec, StabilityError
from .defaults import DENSITY
from .experiments import (
    FitResult,
    ScanResult,
    SignalWindow,
    extract_signal_amplitude,
    run_delay_scan,
    run_density_scan,
    run_power_scan,
)
from .propagation import MediumSpec, PropagationGrid, PropagationResult, propagate
from .pulses import SequenceSpec, experiment_sequence

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

SCAN_KINDS = ("delay", "density", "power")

DEFAULT_SCAN_VALUES = {
    "delay": [float(d) for d in range(-100, 105, 5)],
    "density": [0.4e11, 0.8e11, 1.0e11],
    "power": [1.0, 0.5, 0.2, 0.1, 0.05],
}

ENVELOPE_HEADER = ("t_ns,abs_omega_ac,abs_omega_ab,re_omega_ac,im_omega_ac,"
                   "re_omega_ab,im_omega_ab")


class ConfigError(ValueError):
    """Configuration problem, tagged with the offending key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class ScanSpec:
    kind: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    formats: tuple[str, ...] = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    atom: AtomSpec = field(default_factory=AtomSpec)
    sequence: SequenceSpec = field(default_factory=experiment_sequence)
    medium: MediumSpec = field(default_factory=MediumSpec)
    grid: PropagationGrid = field(default_factory=PropagationGrid)
    scan: Optional[ScanSpec] = None
    output: OutputSpec = field(default_factory=OutputSpec)
    sequence_params: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Full canonical dictionary form (defaults applied)."""
        seq = {"peak_rabi": self.sequence.coupling1.peak_rabi,
               "mutual_delay": self.sequence.mutual_delay,
               "probe_gap": self.sequence.probe_gap,
               "rise": self.sequence.coupling1.rise}
        seq.update(self.sequence_params)
        return {
            "atom": {k: getattr(self.atom, k) for k in (
                "delta_a", "delta_b", "delta_c", "gamma_a", "gamma_b",
                "gamma_c", "deph_ab", "deph_ac", "deph_bc", "repopulation")},
            "sequence": seq,
            "medium": {"density": self.medium.density,
                       "length": self.medium.length,
                       "eta_ac": self.medium.eta_ac,
                       "eta_ab": self.medium.eta_ab},
            "grid": {"nz": self.grid.nz, "dt": self.grid.dt, "T": self.grid.T},
            "scan": (None if self.scan is None
                     else {"kind": self.scan.kind,
                           "values": list(self.scan.values)}),
            "output": {"directory": self.output.directory,
                       "formats": list(self.output.formats)},
        }


def _section(raw: dict, name: str, allowed: set[str]) -> dict:
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(name, "must be an object")
    for key in sec:
        if key not in allowed:
            raise ConfigError(f"{name}.{key}", "unknown key")
    return sec


def _number(sec: dict, path: str, key: str, default, minimum=None,
            strict_min=False):
    v = sec.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {v!r}")
    v = float(v)
    if minimum is not None:
        if strict_min and not v > minimum:
            raise ConfigError(f"{path}.{key}", f"must be > {minimum:g}")
        if not strict_min and not v >= minimum:
            raise ConfigError(f"{path}.{key}", f"must be >= {minimum:g}")
    return v


ATOM_KEYS = {"delta_a", "delta_b", "delta_c", "gamma_a", "gamma_b", "gamma_c",
             "deph_ab", "deph_ac", "deph_bc", "repopulation"}
SEQ_KEYS = {"peak_rabi", "mutual_delay", "probe_gap", "coupling1_duration",
            "coupling2_duration", "probe_duration", "rise"}
MEDIUM_KEYS = {"density", "length", "beta", "eta_ac", "eta_ab"}
GRID_KEYS = {"nz", "dt", "T"}
SCAN_KEYS = {"kind", "values"}
OUTPUT_KEYS = {"directory", "formats"}


def parse_config(raw: dict) -> RunConfig:
    """Validate a configuration dictionary, applying experiment defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("", "top level must be an object")
    for key in raw:
        if key not in {"atom", "sequence", "medium", "grid", "scan", "output"}:
            raise ConfigError(key, "unknown key")

    sec = _section(raw, "atom", ATOM_KEYS)
    defaults = AtomSpec()
    repop = sec.get("repopulation", defaults.repopulation)
    if not isinstance(repop, bool):
        raise ConfigError("atom.repopulation", "expected true/false")
    try:
        atom = AtomSpec(
            delta_a=_number(sec, "atom", "delta_a", defaults.delta_a),
            delta_b=_number(sec, "atom", "delta_b", defaults.delta_b),
            delta_c=_number(sec, "atom", "delta_c", defaults.delta_c),
            gamma_a=_number(sec, "atom", "gamma_a", defaults.gamma_a, 0.0),
            gamma_b=_number(sec, "atom", "gamma_b", defaults.gamma_b, 0.0),
            gamma_c=_number(sec, "atom", "gamma_c", defaults.gamma_c, 0.0),
            deph_ab=_number(sec, "atom", "deph_ab", defaults.deph_ab, 0.0),
            deph_ac=_number(sec, "atom", "deph_ac", defaults.deph_ac, 0.0),
            deph_bc=_number(sec, "atom", "deph_bc", defaults.deph_bc, 0.0),
            repopulation=repop)
    except ValueError as err:
        raise ConfigError("atom", str(err)) from err

    sec = _section(raw, "sequence", SEQ_KEYS)
    seq_params = {
        "peak": _number(sec, "sequence", "peak_rabi", None, 0.0)
        if "peak_rabi" in sec else None,
        "mutual_delay": _number(sec, "sequence", "mutual_delay", 0.0),
        "probe_gap": _number(sec, "sequence", "probe_gap", None, 0.0,
                             strict_min=True) if "probe_gap" in sec else None,
        "coupling1_duration": _number(sec, "sequence", "coupling1_duration",
                                      None, 0.0, strict_min=True)
        if "coupling1_duration" in sec else None,
        "coupling2_duration": _number(sec, "sequence", "coupling2_duration",
                                      None, 0.0, strict_min=True)
        if "coupling2_duration" in sec else None,
        "probe_duration": _number(sec, "sequence", "probe_duration",
                                  None, 0.0, strict_min=True)
        if "probe_duration" in sec else None,
        "rise": _number(sec, "sequence", "rise", None, 0.0, strict_min=True)
        if "rise" in sec else None,
    }
    seq_kwargs = {k: v for k, v in seq_params.items() if v is not None}
    try:
        sequence = experiment_sequence(**seq_kwargs)
    except ValueError as err:
        raise ConfigError("sequence", str(err)) from err

    sec = _section(raw, "medium", MEDIUM_KEYS)
    if ("beta" in sec) and ("eta_ac" in sec or "eta_ab" in sec):
        raise ConfigError("medium.beta", "give either beta or eta_ac/eta_ab, "
                                         "not both")
    density = _number(sec, "medium", "density", DENSITY, 0.0)
    length = _number(sec, "medium", "length", MediumSpec().length, 0.0,
                     strict_min=True)
    try:
        if "eta_ac" in sec or "eta_ab" in sec:
            base = MediumSpec(density=density, length=length)
            medium = MediumSpec(
                density=density, length=length,
                eta_ac=_number(sec, "medium", "eta_ac", base.eta_ac, 0.0),
                eta_ab=_number(sec, "medium", "eta_ab", base.eta_ab, 0.0))
        else:
            beta = _number(sec, "medium", "beta",
                           MediumSpec().depth_beta, 0.0)
            medium = MediumSpec.from_depth(beta, length=length,
                                           density=density)
    except ValueError as err:
        raise ConfigError("medium", str(err)) from err

    sec = _section(raw, "grid", GRID_KEYS)
    nz = sec.get("nz", PropagationGrid().nz)
    if isinstance(nz, bool) or not isinstance(nz, int):
        raise ConfigError("grid.nz", f"expected an integer, got {nz!r}")
    try:
        grid = PropagationGrid(
            nz=nz,
            dt=_number(sec, "grid", "dt", PropagationGrid().dt, 0.0,
                       strict_min=True),
            T=_number(sec, "grid", "T", None, 0.0, strict_min=True)
            if "T" in sec else None)
    except ValueError as err:
        raise ConfigError("grid", str(err)) from err

    scan = None
    if "scan" in raw and raw["scan"] is not None:
        sec = _section(raw, "scan", SCAN_KEYS)
        kind = sec.get("kind")
        if kind not in SCAN_KINDS:
            raise ConfigError("scan.kind", f"must be one of {SCAN_KINDS}")
        values = sec.get("values", DEFAULT_SCAN_VALUES[kind])
        if (not isinstance(values, list) or not values
                or not all(isinstance(v, (int, float))
                           and not isinstance(v, bool) for v in values)):
            raise ConfigError("scan.values", "expected a non-empty number list")
        scan = ScanSpec(kind, tuple(float(v) for v in values))

    sec = _section(raw, "output", OUTPUT_KEYS)
    directory = sec.get("directory", OutputSpec().directory)
    if not isinstance(directory, str):
        raise ConfigError("output.directory", "expected a string")
    formats = sec.get("formats", list(OutputSpec().formats))
    if (not isinstance(formats, list)
            or not all(f in ("csv", "json") for f in formats)):
        raise ConfigError("output.formats", 'entries must be "csv" or "json"')
    output = OutputSpec(directory, tuple(formats))

    return RunConfig(atom=atom, sequence=sequence, medium=medium, grid=grid,
                     scan=scan, output=output,
                     sequence_params={k: v for k, v in seq_params.items()
                                      if v is not None})


def load_config(path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(str(path), f"invalid JSON: {err}") from err
    return parse_config(raw)


# ---------------------------------------------------------------------------
# serialization

def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as err:
        raise OSError(f"cannot write {path}: {err}") from err


def scan_csv(scan: ScanResult) -> str:
    lines = ["param,efficiency"]
    lines += [f"{_fmt(v)},{_fmt(e)}" for v, e in scan.records]
    return "\n".join(lines) + "\n"


def envelope_csv(env) -> str:
    t = env.times
    cols = (t, np.abs(env.omega_ac), np.abs(env.omega_ab),
            env.omega_ac.real, env.omega_ac.imag,
            env.omega_ab.real, env.omega_ab.imag)
    lines = [ENVELOPE_HEADER]
    lines += [",".join(_fmt(col[i]) for col in cols) for i in range(len(t))]
    return "\n".join(lines) + "\n"


def serialize_results(result, out_dir, formats=("csv", "json"),
                      config_echo: Optional[dict] = None,
                      fit: Optional[FitResult] = None) -> list[Path]:
    """Write a ScanResult or PropagationResult to plot-ready files.

    CSV columns: scans are `param,efficiency`; envelopes carry the time
    column plus modulus and real/imaginary parts of both channels.  The
    JSON metadata echoes the configuration and any convergence report.
    Numbers are printed with 9 significant digits; output bytes depend
    only on the data.
    """
    out = Path(out_dir)
    written: list[Path] = []
    meta: dict = {"version": __version__}
    if config_echo is not None:
        meta["config"] = config_echo

    if isinstance(result, ScanResult):
        if "csv" in formats:
            p = out / f"{result.kind}_scan.csv"
            _write(p, scan_csv(result))
            written.append(p)
        meta["scan"] = {"kind": result.kind,
                        "n_points": len(result.records),
                        **result.metadata}
        if fit is not None:
            meta["intensity_fit"] = {"slope": fit.slope,
                                     "intercept": fit.intercept,
                                     "r_squared": fit.r_squared,
                                     "amplitude_slope": fit.slope / 2.0}
    elif isinstance(result, PropagationResult):
        if "csv" in formats:
            for name, env in (("envelopes_entry.csv", result.entry_envelopes),
                              ("envelopes_exit.csv", result.exit_envelopes)):
                p = out / name
                _write(p, envelope_csv(env))
                written.append(p)
        meta["propagation"] = {
            "convergence_report": result.convergence_report,
            "converged": result.converged,
            "probe_peak": result.probe_peak,
        }
    else:
        raise TypeError("expected a ScanResult or PropagationResult")

    if "json" in formats:
        p = out / "metadata.json"
        _write(p, json.dumps(meta, indent=2, sort_keys=True) + "\n")
        written.append(p)
    return written


# ---------------------------------------------------------------------------
# command-line interface

def _add_common(sub):
    sub.add_argument("--config", type=str, default=None,
                     help="JSON config file (defaults reproduce the "
                          "canonical experiment)")
    sub.add_argument("--out", type=str, default=None,
                     help="output directory (overrides config)")
    sub.add_argument("--format", type=str, default=None,
                     help="comma-separated output formats: csv,json")
    sub.add_argument("--threads", type=int, default=1,
                     help="parallel workers for scan points")
    sub.add_argument("--nz", type=int, default=None,
                     help="override spatial slice count")
    sub.add_argument("--dt", type=float, default=None,
                     help="override time step (ns)")


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else parse_config({})
    grid = cfg.grid
    if args.nz is not None or args.dt is not None:
        grid = PropagationGrid(nz=args.nz if args.nz is not None else grid.nz,
                               dt=args.dt if args.dt is not None else grid.dt,
                               T=grid.T)
    output = cfg.output
    if args.out is not None:
        output = OutputSpec(args.out, output.formats)
    if args.format is not None:
        formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
        for f in formats:
            if f not in ("csv", "json"):
                raise ConfigError("--format", f"unknown format {f!r}")
        output = OutputSpec(output.directory, formats)
    return RunConfig(atom=cfg.atom, sequence=cfg.sequence, medium=cfg.medium,
                     grid=grid, scan=cfg.scan, output=output,
                     sequence_params=cfg.sequence_params)


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    result = propagate(cfg.sequence, cfg.atom, cfg.medium, cfg.grid)
    window = SignalWindow.from_sequence(cfg.sequence)
    eff = extract_signal_amplitude(result, window)
    files = serialize_results(result, cfg.output.directory,
                              cfg.output.formats, cfg.echo())
    print(f"signal efficiency {eff:.4f} "
          f"(convergence {result.convergence_report:.2e})")
    for f in files:
        print(f"wrote {f}")
    return EXIT_OK if result.converged else EXIT_NUMERICAL


def _scan_values(cfg: RunConfig, kind: str) -> list[float]:
    if cfg.scan is not None and cfg.scan.kind == kind:
        return list(cfg.scan.values)
    return DEFAULT_SCAN_VALUES[kind]


def _cmd_scan(args, kind: str) -> int:
    cfg = _load(args)
    values = _scan_values(cfg, kind)
    fit = None
    if kind == "delay":
        scan = run_delay_scan(values, cfg.atom, cfg.sequence, cfg.medium,
                              cfg.grid, threads=args.threads)
    elif kind == "density":
        scan, fit = run_density_scan(values, cfg.atom, cfg.sequence,
                                     cfg.medium, cfg.grid,
                                     threads=args.threads)
    else:
        scan = run_power_scan(values, cfg.atom, cfg.sequence, cfg.medium,
                              cfg.grid, threads=args.threads)
    files = serialize_results(scan, cfg.output.directory, cfg.output.formats,
                              cfg.echo(), fit=fit)
    best = max(scan.records, key=lambda r: r[1])
    print(f"{kind} scan: {len(scan.records)} points, "
          f"max efficiency {best[1]:.4f} at {best[0]:g}")
    if fit is not None:
        print(f"intensity fit slope {fit.slope:.3f} (r^2 {fit.r_squared:.4f})")
    for f in files:
        print(f"wrote {f}")
    return EXIT_OK


def _cmd_rabi_check(args) -> int:
    """Run the built-in analytic oracles and print one line per check."""
    from .oracles import run_all_oracles

    results = run_all_oracles()
    ok = True
    for name, passed, detail in results:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok = ok and passed
    return EXIT_OK if ok else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramanbloch",
        description="Coherence-enhanced Raman generation in a three-level "
                    "Lambda medium: density-matrix dynamics plus 1-D field "
                    "propagation.")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("simulate",
                          help="one propagation; writes entry/exit envelopes")
    _add_common(sub)
    sub.set_defaults(func=_cmd_simulate)

    for kind, doc in (("delay", "efficiency vs mutual coupling delay"),
                      ("density", "efficiency vs atomic density, with "
                                  "intensity power-law fit"),
                      ("power", "efficiency vs total pulse power")):
        sub = subs.add_parser(f"{kind}-scan", help=doc)
        _add_common(sub)
        sub.set_defaults(func=lambda a, k=kind: _cmd_scan(a, k))

    sub = subs.add_parser("rabi-check",
                          help="run analytic oracles (Rabi, decay, dark "
                               "state, integrator order)")
    sub.set_defaults(func=_cmd_rabi_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (StabilityError,) as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
