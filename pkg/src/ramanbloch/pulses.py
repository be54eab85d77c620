"""Analytic pulse shapes and pulse-sequence construction.

Two shapes cover everything in the experiment: AOM-limited near-square
pulses with tanh edges (the measured pulse shapes) and Gaussians (clean
adiabatic-passage unit tests).  A sequence assigns pulses to the two
optical channels: coupling 1 and the probe share the a-c channel, the
second coupling pulse drives a-b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from .defaults import (
    COUPLING1_DURATION,
    COUPLING2_DURATION,
    OMEGA,
    PROBE_DURATION,
    PROBE_GAP,
    RISE_TIME,
)

GAUSSIAN = "gaussian"
SMOOTHED_SQUARE = "smoothed_square"

# Edge factor 1/2 (1 + tanh(2x)) drops below 1e-6 of peak at 5 rise times,
# and a Gaussian below 3e-8 of peak at 2.5 fwhm; used as support margins.
SQUARE_MARGIN = 5.0
GAUSSIAN_MARGIN = 2.5


@dataclass(frozen=True)
class PulseSpec:
    """One optical pulse: a smoothed square (t_on/t_off/rise) or a Gaussian
    (center/fwhm), with peak Rabi frequency in rad/ns."""

    shape: str
    peak_rabi: float
    t_on: float = 0.0
    t_off: float = 0.0
    rise: float = RISE_TIME
    center: float = 0.0
    fwhm: float = 0.0

    def __post_init__(self):
        if self.shape not in (GAUSSIAN, SMOOTHED_SQUARE):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if not (self.peak_rabi >= 0.0 and math.isfinite(self.peak_rabi)):
            raise ValueError("peak_rabi must be finite and >= 0")
        if self.shape == SMOOTHED_SQUARE:
            if not self.t_off > self.t_on:
                raise ValueError("smoothed_square requires t_off > t_on")
            if not self.rise > 0.0:
                raise ValueError("smoothed_square requires rise > 0")
        else:
            if not self.fwhm > 0.0:
                raise ValueError("gaussian requires fwhm > 0")

    def shifted(self, dt: float) -> "PulseSpec":
        """Translate the pulse in time by dt."""
        if self.shape == SMOOTHED_SQUARE:
            return replace(self, t_on=self.t_on + dt, t_off=self.t_off + dt)
        return replace(self, center=self.center + dt)

    def scaled(self, factor: float) -> "PulseSpec":
        return replace(self, peak_rabi=self.peak_rabi * factor)

    def half_max_window(self) -> tuple[float, float]:
        """Times bracketing the region where the envelope exceeds half peak.

        The tanh edge crosses 1/2 exactly at t_on and t_off; a Gaussian
        crosses at center +- fwhm/2.
        """
        if self.shape == SMOOTHED_SQUARE:
            return self.t_on, self.t_off
        return self.center - 0.5 * self.fwhm, self.center + 0.5 * self.fwhm

    def support(self) -> tuple[float, float]:
        """Interval outside which the envelope is negligible (< 1e-6 peak)."""
        if self.shape == SMOOTHED_SQUARE:
            m = SQUARE_MARGIN * self.rise
            return self.t_on - m, self.t_off + m
        m = GAUSSIAN_MARGIN * self.fwhm
        return self.center - m, self.center + m


def smoothed_square(peak: float, t_on: float, t_off: float,
                    rise: float = RISE_TIME) -> PulseSpec:
    return PulseSpec(SMOOTHED_SQUARE, peak, t_on=t_on, t_off=t_off, rise=rise)


def gaussian(peak: float, center: float, fwhm: float) -> PulseSpec:
    return PulseSpec(GAUSSIAN, peak, center=center, fwhm=fwhm)


def eval_pulse(p: PulseSpec, t):
    """Evaluate the pulse envelope at time(s) t (rad/ns, real).

    smoothed_square: peak * S((t - t_on)/rise) * S((t_off - t)/rise) with
    S(x) = (1 + tanh(2x))/2; gaussian: peak * exp(-4 ln2 (t-center)^2/fwhm^2).
    """
    t = np.asarray(t, dtype=float)
    if p.shape == SMOOTHED_SQUARE:
        s_on = 0.5 * (1.0 + np.tanh(2.0 * (t - p.t_on) / p.rise))
        s_off = 0.5 * (1.0 + np.tanh(2.0 * (p.t_off - t) / p.rise))
        return p.peak_rabi * s_on * s_off
    arg = -4.0 * math.log(2.0) * (t - p.center) ** 2 / p.fwhm**2
    return p.peak_rabi * np.exp(arg)


@dataclass(frozen=True)
class SequenceSpec:
    """Pulse assignment for one run: coupling1 and probe on channel a-c,
    coupling2 on channel a-b.  The probe is optional (bare STIRAP runs)."""

    coupling1: PulseSpec
    coupling2: PulseSpec
    probe: Optional[PulseSpec] = None
    overlap_warning: bool = False

    def __post_init__(self):
        if self.probe is not None and not self.probe_gap > 0.0:
            raise ValueError("probe must begin after coupling1 ends "
                             f"(probe_gap = {self.probe_gap:g} ns)")

    @property
    def mutual_delay(self) -> float:
        """Trailing-edge delay of coupling2 relative to coupling1 (ns).
        Zero means the tails switch off simultaneously."""
        return self.coupling2.half_max_window()[1] - self.coupling1.half_max_window()[1]

    @property
    def probe_gap(self) -> float:
        """Gap between coupling1 switch-off and probe turn-on (ns)."""
        if self.probe is None:
            return math.inf
        return self.probe.half_max_window()[0] - self.coupling1.half_max_window()[1]

    def pulses(self) -> list[PulseSpec]:
        out = [self.coupling1, self.coupling2]
        if self.probe is not None:
            out.append(self.probe)
        return out

    def with_mutual_delay(self, delay: float) -> "SequenceSpec":
        """Shift coupling2 rigidly so that mutual_delay equals `delay`."""
        return replace(self, coupling2=self.coupling2.shifted(delay - self.mutual_delay))

    def scaled(self, factor: float) -> "SequenceSpec":
        """Scale every peak Rabi frequency by `factor`."""
        probe = None if self.probe is None else self.probe.scaled(factor)
        return replace(self, coupling1=self.coupling1.scaled(factor),
                       coupling2=self.coupling2.scaled(factor), probe=probe)

    def required_duration(self) -> float:
        return max(p.support()[1] for p in self.pulses())


class ChannelEnvelope(NamedTuple):
    """Complex Rabi-frequency waveforms of both channels on a uniform grid."""

    dt: float
    omega_ac: np.ndarray
    omega_ab: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.omega_ac)) * self.dt

    @property
    def duration(self) -> float:
        return (len(self.omega_ac) - 1) * self.dt

    def max_rabi(self) -> float:
        return max(np.abs(self.omega_ac).max(), np.abs(self.omega_ab).max())


def build_channel_envelopes(seq: SequenceSpec, dt: float, T: float) -> ChannelEnvelope:
    """Sample the sequence onto a uniform grid covering [0, T].

    Channel a-c carries coupling1 plus the probe, channel a-b carries
    coupling2.  The grid has round(T/dt) + 1 points.  T must cover every
    pulse's support and no pulse may extend before t = 0.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    need = seq.required_duration()
    if T < need:
        raise ValueError(f"window T = {T:g} ns too short; sequence needs {need:g} ns")
    for p in seq.pulses():
        if p.support()[0] < 0.0:
            raise ValueError("pulse support extends before t = 0; shift the sequence")
    nt = int(round(T / dt)) + 1
    t = np.arange(nt) * dt
    om_ac = eval_pulse(seq.coupling1, t)
    if seq.probe is not None:
        om_ac = om_ac + eval_pulse(seq.probe, t)
    om_ab = eval_pulse(seq.coupling2, t)
    return ChannelEnvelope(dt, om_ac.astype(complex), om_ab.astype(complex))


def experiment_sequence(peak: float = OMEGA,
                        mutual_delay: float = 0.0,
                        probe_gap: float = PROBE_GAP,
                        coupling1_duration: float = COUPLING1_DURATION,
                        coupling2_duration: float = COUPLING2_DURATION,
                        probe_duration: float = PROBE_DURATION,
                        rise: float = RISE_TIME) -> SequenceSpec:
    """Canonical experiment: 150 ns coupling1 and, tails aligned at zero
    delay, a 20 ns coupling2; a 20 ns probe follows 100 ns after coupling1
    switches off.  All pulses share one peak Rabi frequency."""
    t_on1 = SQUARE_MARGIN * rise
    t_off1 = t_on1 + coupling1_duration
    c1 = smoothed_square(peak, t_on1, t_off1, rise)
    c2 = smoothed_square(peak, t_off1 - coupling2_duration + mutual_delay,
                         t_off1 + mutual_delay, rise)
    probe = smoothed_square(peak, t_off1 + probe_gap,
                            t_off1 + probe_gap + probe_duration, rise)
    return SequenceSpec(c1, c2, probe)


def stirap_sequence(peak: float, width: float, separation: float) -> SequenceSpec:
    """Counter-intuitive Gaussian pair for full b -> c transfer.

    The pulse on a-c (the transition not holding the initial population)
    comes first; the a-b pulse follows `separation` later.  Overlap
    requires separation < 2*width; a non-overlapping pair is still
    constructible but flagged, since adiabatic transfer will fail.
    """
    if separation <= 0.0:
        raise ValueError("separation must be > 0 (use fstirap_sequence for "
                         "coincident tails)")
    c1_center = GAUSSIAN_MARGIN * width
    c1 = gaussian(peak, c1_center, width)
    c2 = gaussian(peak, c1_center + separation, width)
    return SequenceSpec(c1, c2, overlap_warning=separation >= 2.0 * width)


def fstirap_sequence(peak: float, width: float) -> SequenceSpec:
    """Half transfer: smoothed squares with coincident trailing edges.

    Coupling1 leads by 6.5 widths (the 150/20 ns proportions of the
    experiment) and both switch off together, so the amplitude ratio on
    the shared tail tends to 1 and the atom is steered into the equal
    ground superposition with |rho_bc| -> 1/2.
    """
    if peak < 0.0 or width <= 0.0:
        raise ValueError("peak must be >= 0 and width > 0")
    rise = 0.45 * width
    t_on1 = SQUARE_MARGIN * rise
    t_off = t_on1 + 7.5 * width
    c1 = smoothed_square(peak, t_on1, t_off, rise)
    c2 = smoothed_square(peak, t_off - width, t_off, rise)
    return SequenceSpec(c1, c2)


class AdiabaticityMetric(NamedTuple):
    value: float
    adiabatic: bool


ADIABATIC_THRESHOLD = 10.0


def adiabaticity_metric(seq: SequenceSpec) -> AdiabaticityMetric:
    """Overlap duration of the two couplings (both above half maximum)
    times the root-sum-square of their peak Rabi frequencies; >= 10 marks
    the adiabatic-following regime."""
    on1, off1 = seq.coupling1.half_max_window()
    on2, off2 = seq.coupling2.half_max_window()
    overlap = max(0.0, min(off1, off2) - max(on1, on2))
    value = overlap * math.hypot(seq.coupling1.peak_rabi, seq.coupling2.peak_rabi)
    return AdiabaticityMetric(value, value >= ADIABATIC_THRESHOLD)
