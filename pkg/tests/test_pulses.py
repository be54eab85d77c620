"""Pulse shapes, sequence construction, and adiabatic-passage behavior."""

import numpy as np
import pytest

from ramanbloch import (
    B,
    C,
    SequenceSpec,
    adiabaticity_metric,
    build_channel_envelopes,
    decay_free,
    eval_pulse,
    evolve,
    experiment_sequence,
    fstirap_sequence,
    gaussian,
    ground_mixture,
    pure_state,
    smoothed_square,
    stirap_sequence,
)
from ramanbloch.defaults import DT, GAMMA, OMEGA


def evolve_sequence(seq, rho0, dt=DT):
    env = build_channel_envelopes(seq, dt, seq.required_duration())
    return evolve(rho0, env, decay_free())


# ---------------------------------------------------------------------------
# eval_pulse

def test_square_flat_top_reaches_peak():
    p = smoothed_square(2.0, t_on=100.0, t_off=300.0, rise=9.0)
    t_mid = 0.5 * (p.t_on + 5 * p.rise + p.t_off - 5 * p.rise)
    assert eval_pulse(p, t_mid) == pytest.approx(2.0, rel=1e-4)


def test_square_off_state():
    p = smoothed_square(2.0, t_on=100.0, t_off=300.0, rise=9.0)
    assert eval_pulse(p, p.t_on - 10 * p.rise) < 1e-6 * p.peak_rabi


def test_gaussian_fwhm_definition():
    p = gaussian(1.5, center=50.0, fwhm=20.0)
    assert eval_pulse(p, 40.0) == pytest.approx(0.75, abs=1e-12)
    assert eval_pulse(p, 60.0) == pytest.approx(0.75, abs=1e-12)


def test_pulse_validation():
    with pytest.raises(ValueError):
        smoothed_square(1.0, t_on=10.0, t_off=5.0)
    with pytest.raises(ValueError):
        gaussian(1.0, center=0.0, fwhm=-2.0)
    with pytest.raises(ValueError):
        smoothed_square(-1.0, t_on=0.0, t_off=10.0)


# ---------------------------------------------------------------------------
# envelope synthesis

def lobes_above(x, level):
    """Count contiguous runs where x exceeds level."""
    above = x > level
    return int(np.sum(above[1:] & ~above[:-1]) + (1 if above[0] else 0))


def test_default_experiment_channel_structure():
    seq = experiment_sequence()
    env = build_channel_envelopes(seq, DT, seq.required_duration())
    assert lobes_above(np.abs(env.omega_ac), 0.5 * OMEGA) == 2
    assert lobes_above(np.abs(env.omega_ab), 0.5 * OMEGA) == 1


def test_zero_peaks_give_zero_envelopes():
    seq = experiment_sequence(peak=0.0)
    env = build_channel_envelopes(seq, DT, seq.required_duration())
    assert np.all(env.omega_ac == 0.0) and np.all(env.omega_ab == 0.0)


def test_zero_delay_trailing_edges_cross_together():
    seq = experiment_sequence(mutual_delay=0.0)
    env = build_channel_envelopes(seq, DT, seq.required_duration())
    t = env.times
    half = 0.5 * OMEGA

    def trailing_crossing(x, t_from):
        region = t >= t_from
        idx = np.flatnonzero(region & (x >= half))
        return t[idx[-1]]

    # look after the flat tops only
    t1 = trailing_crossing(np.abs(env.omega_ac), 150.0)
    t2 = trailing_crossing(np.abs(env.omega_ab), 150.0)
    assert abs(t1 - t2) <= env.dt


def test_envelope_window_too_short_rejected():
    seq = experiment_sequence()
    with pytest.raises(ValueError):
        build_channel_envelopes(seq, DT, 0.5 * seq.required_duration())


def test_envelope_linearity_in_peak():
    seq = experiment_sequence()
    base = build_channel_envelopes(seq, DT, seq.required_duration())
    doubled = build_channel_envelopes(seq.scaled(2.0), DT,
                                      seq.required_duration())
    assert np.array_equal(doubled.omega_ac, 2.0 * base.omega_ac)
    assert np.array_equal(doubled.omega_ab, 2.0 * base.omega_ab)
    general = build_channel_envelopes(seq.scaled(1.7), DT,
                                      seq.required_duration())
    assert np.allclose(general.omega_ac, 1.7 * base.omega_ac, rtol=1e-14)


def test_envelope_time_shift_equivariance():
    # binary-exact grid so the shifted samples must match bin for bin
    dt = 0.0625
    shift = 16 * dt  # 1.0 ns
    seq = SequenceSpec(smoothed_square(1.0, 45.0, 195.0, 9.0),
                       smoothed_square(1.0, 175.0, 195.0, 9.0))
    shifted = SequenceSpec(seq.coupling1.shifted(shift),
                           seq.coupling2.shifted(shift))
    T = shifted.required_duration()
    a = build_channel_envelopes(seq, dt, T)
    b = build_channel_envelopes(shifted, dt, T)
    k = int(round(shift / dt))
    assert np.array_equal(b.omega_ac[k:], a.omega_ac[:-k])
    assert np.array_equal(b.omega_ab[k:], a.omega_ab[:-k])


# ---------------------------------------------------------------------------
# STIRAP

def test_stirap_transfers_population():
    seq = stirap_sequence(OMEGA, width=27.0, separation=20.0)
    traj = evolve_sequence(seq, pure_state(B))
    assert traj[-1, C, C].real >= 0.99


def test_stirap_reversed_order_fails():
    fwd = stirap_sequence(OMEGA, width=27.0, separation=20.0)
    # intuitive order: the a-b pulse arrives first
    rev = SequenceSpec(coupling1=fwd.coupling2.shifted(-20.0),
                       coupling2=fwd.coupling1.shifted(20.0))
    assert rev.coupling1.center > rev.coupling2.center  # a-c now second
    traj = evolve_sequence(rev, pure_state(B))
    assert traj[-1, C, C].real < 0.9


def test_stirap_zero_peak_leaves_state():
    seq = stirap_sequence(0.0, width=27.0, separation=20.0)
    traj = evolve_sequence(seq, pure_state(B))
    assert traj[-1, B, B].real == pytest.approx(1.0, abs=1e-12)


def test_stirap_rejects_non_positive_separation():
    with pytest.raises(ValueError):
        stirap_sequence(OMEGA, width=27.0, separation=0.0)


def test_stirap_warns_on_non_overlapping_pulses():
    seq = stirap_sequence(OMEGA, width=20.0, separation=45.0)
    assert seq.overlap_warning
    assert not stirap_sequence(OMEGA, 20.0, 15.0).overlap_warning


def test_stirap_efficiency_monotone_in_adiabaticity():
    # metric = overlap * sqrt(2) * peak with overlap = width - separation
    width, sep = 27.0, 20.0
    overlap = width - sep
    effs = []
    for metric in (2.0, 5.0, 10.0, 20.0):
        peak = metric / (np.sqrt(2.0) * overlap)
        seq = stirap_sequence(peak, width, sep)
        value = adiabaticity_metric(seq).value
        assert value == pytest.approx(metric, rel=1e-12)
        traj = evolve_sequence(seq, pure_state(B), dt=0.02)
        effs.append(traj[-1, C, C].real)
    assert all(b >= a - 1e-12 for a, b in zip(effs, effs[1:]))


# ---------------------------------------------------------------------------
# fractional STIRAP

def test_fstirap_reaches_maximal_coherence():
    seq = fstirap_sequence(OMEGA, width=40.0)
    traj = evolve_sequence(seq, pure_state(B))
    assert abs(traj[-1, B, C]) >= 0.49


def test_fstirap_from_equal_mixture():
    seq = fstirap_sequence(OMEGA, width=20.0)
    traj = evolve_sequence(seq, ground_mixture())
    assert abs(traj[-1, B, C]) > 0.2


def test_fstirap_zero_peak_no_coherence():
    seq = fstirap_sequence(0.0, width=20.0)
    traj = evolve_sequence(seq, pure_state(B))
    assert abs(traj[-1, B, C]) == 0.0


def test_fstirap_terminal_amplitude_ratio():
    seq = fstirap_sequence(OMEGA, width=20.0)
    env = build_channel_envelopes(seq, DT, seq.required_duration())
    tail = np.abs(env.omega_ac)
    t_off = seq.coupling1.t_off
    peak = seq.coupling1.peak_rabi
    decade = ((env.times > t_off)
              & (tail >= 0.01 * peak) & (tail <= 0.1 * peak))
    assert decade.sum() > 3
    ratio = np.abs(env.omega_ac[decade]) / np.abs(env.omega_ab[decade])
    assert np.abs(ratio - 1.0).max() <= 0.01


# ---------------------------------------------------------------------------
# adiabaticity metric

def test_metric_reference_value():
    # equal 10*gamma couplings overlapping for one lifetime: sqrt(200)
    seq = SequenceSpec(smoothed_square(OMEGA, 45.0, 195.0, 9.0),
                       smoothed_square(OMEGA, 195.0 - 27.0, 195.0, 9.0))
    m = adiabaticity_metric(seq)
    assert m.value == pytest.approx(np.sqrt(200.0), rel=1e-12)
    assert m.adiabatic


def test_metric_weak_drive():
    seq = SequenceSpec(smoothed_square(GAMMA, 45.0, 195.0, 9.0),
                       smoothed_square(GAMMA, 195.0 - 27.0, 195.0, 9.0))
    m = adiabaticity_metric(seq)
    assert m.value == pytest.approx(np.sqrt(2.0), rel=1e-12)
    assert not m.adiabatic


def test_metric_zero_overlap():
    seq = SequenceSpec(smoothed_square(OMEGA, 45.0, 100.0, 9.0),
                       smoothed_square(OMEGA, 150.0, 185.0, 9.0))
    m = adiabaticity_metric(seq)
    assert m.value == 0.0 and not m.adiabatic


def test_default_experiment_is_adiabatic():
    assert adiabaticity_metric(experiment_sequence()).adiabatic


# ---------------------------------------------------------------------------
# sequence plumbing

def test_mutual_delay_shift():
    seq = experiment_sequence()
    for d in (-60.0, 0.0, 35.0):
        assert seq.with_mutual_delay(d).mutual_delay == pytest.approx(d)


def test_probe_must_follow_coupling1():
    c1 = smoothed_square(OMEGA, 45.0, 195.0)
    c2 = smoothed_square(OMEGA, 175.0, 195.0)
    probe = smoothed_square(OMEGA, 100.0, 120.0)  # inside coupling1
    with pytest.raises(ValueError):
        SequenceSpec(c1, c2, probe)
