"""Scripted measurements: signal extraction, delay/density/power scans.

Efficiency throughout is the amplitude ratio of Fig.-style traces: the
peak of the generated a-b field at the cell exit, inside an analysis
window tied to the probe timing, normalized to the entry probe peak.
Scans are embarrassingly parallel over their parameter and deterministic:
identical configurations give bit-identical results for any worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .bloch import AtomSpec
from .propagation import MediumSpec, PropagationGrid, PropagationResult, propagate
from .pulses import SequenceSpec

EFFICIENCY_CEILING = 1.5

# The analysis window opens 5 ns before the probe and closes 20 ns after
# it; if coupling2 has been delayed into that region, the opening is
# pushed past its half-maximum support by two rise times so the window
# measures generated light, not the coupling pulse's own tail.
WINDOW_PRE = 5.0
WINDOW_POST = 20.0
WINDOW_TAIL_PAD = 2.0


@dataclass(frozen=True)
class SignalWindow:
    """Time window on the a-b exit channel holding the generated pulse."""

    t_start: float
    t_end: float

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("signal window is empty (t_end <= t_start)")

    @classmethod
    def from_sequence(cls, seq: SequenceSpec) -> "SignalWindow":
        if seq.probe is None:
            raise ValueError("sequence has no probe pulse")
        on, off = seq.probe.half_max_window()
        t_start = on - WINDOW_PRE
        t_end = off + WINDOW_POST
        # keep clear of coupling2's support at half maximum
        c2_off = seq.coupling2.half_max_window()[1]
        pad = WINDOW_TAIL_PAD * seq.coupling2.rise
        if c2_off + pad > t_start:
            t_start = c2_off + pad
        return cls(t_start, t_end)

    def mask(self, times: np.ndarray) -> np.ndarray:
        m = (times >= self.t_start) & (times <= self.t_end)
        if not m.any():
            raise ValueError("signal window contains no grid points")
        return m


def extract_signal_amplitude(result: PropagationResult,
                             window: SignalWindow) -> float:
    """Peak |Omega_ab| at the exit inside the window, normalized to the
    entry probe peak."""
    times = result.exit_envelopes.times
    if window.t_start < times[0] or window.t_end > times[-1]:
        raise ValueError("signal window extends beyond the time grid")
    peak = np.abs(result.exit_envelopes.omega_ab[window.mask(times)]).max()
    if result.probe_peak is not None:
        ref = result.probe_peak
    else:
        ref = np.abs(result.entry_envelopes.omega_ac).max()
    if ref <= 0.0:
        return 0.0
    return float(peak / ref)


@dataclass(frozen=True)
class FitResult:
    """Ordinary least squares on (ln x, ln y)."""

    slope: float
    intercept: float
    r_squared: float


def fit_power_law(points: Sequence[tuple[float, float]]) -> FitResult:
    if len(points) < 2:
        raise ValueError("power-law fit needs at least 2 points")
    xs = np.array([p[0] for p in points], float)
    ys = np.array([p[1] for p in points], float)
    if not (np.all(xs > 0.0) and np.all(ys > 0.0)):
        raise ValueError("power-law fit requires strictly positive values")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot < 1e-30 else 1.0 - ss_res / ss_tot
    return FitResult(float(slope), float(intercept), r2)


@dataclass
class ScanResult:
    """(parameter value, efficiency) records plus reproducibility metadata."""

    kind: str
    records: list[tuple[float, float]]
    metadata: dict

    def __post_init__(self):
        self.records = sorted((float(v), float(e)) for v, e in self.records)
        for v, e in self.records:
            if not (0.0 <= e <= EFFICIENCY_CEILING):
                raise ValueError(f"efficiency {e:g} at {self.kind}={v:g} "
                                 f"outside [0, {EFFICIENCY_CEILING}]")

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.records])

    @property
    def efficiencies(self) -> np.ndarray:
        return np.array([e for _, e in self.records])


def _fingerprint(atom: AtomSpec, seq: SequenceSpec, medium: MediumSpec,
                 grid: PropagationGrid, kind: str, values) -> str:
    blob = json.dumps({"atom": asdict(atom), "sequence": asdict(seq),
                       "medium": asdict(medium), "grid": asdict(grid),
                       "scan": {"kind": kind, "values": list(map(float, values))}},
                      sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _run_points(worker, values, threads: int) -> list[float]:
    if threads <= 1:
        return [worker(v) for v in values]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, values))


def _scan_grid(seq: SequenceSpec, grid: PropagationGrid,
               duration: float) -> PropagationGrid:
    T = grid.T if grid.T is not None else duration
    return PropagationGrid(nz=grid.nz, dt=grid.dt, T=T)


def run_delay_scan(delays: Sequence[float], atom: AtomSpec,
                   sequence: SequenceSpec, medium: MediumSpec,
                   grid: PropagationGrid = PropagationGrid(),
                   threads: int = 1) -> ScanResult:
    """One propagation per mutual delay of coupling2; efficiency of the
    generated pulse at each delay.  All delays share one time grid."""
    delays = [float(d) for d in delays]
    shifted = [sequence.with_mutual_delay(d) for d in delays]
    duration = max(s.required_duration() for s in shifted + [sequence])
    common = _scan_grid(sequence, grid, duration)
    for s, d in zip(shifted, delays):
        if min(p.support()[0] for p in s.pulses()) < 0.0:
            raise ValueError(f"delay {d:g} ns pushes coupling2 before t = 0")

    def worker(delay: float) -> float:
        seq_d = sequence.with_mutual_delay(delay)
        result = propagate(seq_d, atom, medium, common,
                           convergence_check=False)
        return extract_signal_amplitude(result, SignalWindow.from_sequence(seq_d))

    t0 = time.perf_counter()
    effs = _run_points(worker, delays, threads)
    meta = {"fingerprint": _fingerprint(atom, sequence, medium, common,
                                        "delay", delays),
            "grid": {"nz": common.nz, "dt": common.dt, "T": common.T},
            "runtime_s": time.perf_counter() - t0}
    return ScanResult("delay", list(zip(delays, effs)), meta)


def run_density_scan(densities: Sequence[float], atom: AtomSpec,
                     sequence: SequenceSpec, medium: MediumSpec,
                     grid: PropagationGrid = PropagationGrid(),
                     threads: int = 1) -> tuple[ScanResult, Optional[FitResult]]:
    """Peak (zero-delay) efficiency per atomic density, with a log-log fit
    of signal intensity (efficiency squared) against density.

    The coupling constants scale linearly with density.  The quadratic
    density dependence of intensity corresponds to slope 2 of this fit
    (the amplitude reading is slope/2).  With fewer than two strictly
    positive densities the fit is omitted and the scan still returned.
    """
    densities = [float(n) for n in densities]
    if not densities:
        raise ValueError("density scan needs at least one density")
    duration = sequence.required_duration()
    common = _scan_grid(sequence, grid, duration)
    window = SignalWindow.from_sequence(sequence)

    def worker(density: float) -> float:
        result = propagate(sequence, atom, medium.with_density(density),
                           common, convergence_check=False)
        return extract_signal_amplitude(result, window)

    t0 = time.perf_counter()
    effs = _run_points(worker, densities, threads)
    meta = {"fingerprint": _fingerprint(atom, sequence, medium, common,
                                        "density", densities),
            "grid": {"nz": common.nz, "dt": common.dt, "T": common.T},
            "runtime_s": time.perf_counter() - t0}
    scan = ScanResult("density", list(zip(densities, effs)), meta)

    fit = None
    fit_points = [(n, e * e) for n, e in scan.records if n > 0.0 and e > 0.0]
    if len(fit_points) >= 2:
        fit = fit_power_law(fit_points)
    return scan, fit


def run_power_scan(scale_factors: Sequence[float], atom: AtomSpec,
                   sequence: SequenceSpec, medium: MediumSpec,
                   grid: PropagationGrid = PropagationGrid(),
                   threads: int = 1) -> ScanResult:
    """Efficiency versus total pulse power at zero delay.

    Power scales all pulse intensities together, so every peak Rabi
    frequency is multiplied by sqrt(scale); scale factors lie in (0, 1].
    """
    scales = [float(s) for s in scale_factors]
    for s in scales:
        if not 0.0 < s <= 1.0:
            raise ValueError(f"power scale {s:g} outside (0, 1]")
    duration = sequence.required_duration()
    common = _scan_grid(sequence, grid, duration)
    window = SignalWindow.from_sequence(sequence)

    def worker(scale: float) -> float:
        seq_s = sequence.scaled(math.sqrt(scale))
        result = propagate(seq_s, atom, medium, common,
                           convergence_check=False)
        return extract_signal_amplitude(result, window)

    t0 = time.perf_counter()
    effs = _run_points(worker, scales, threads)
    meta = {"fingerprint": _fingerprint(atom, sequence, medium, common,
                                        "power", scales),
            "grid": {"nz": common.nz, "dt": common.dt, "T": common.T},
            "runtime_s": time.perf_counter() - t0}
    return ScanResult("power", list(zip(scales, effs)), meta)
