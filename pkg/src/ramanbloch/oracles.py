"""Built-in analytic self-checks for the integrator.

Each oracle has a closed-form solution independent of the solver: Rabi
oscillation on a two-level reduction, exponential decay, dark-state
stationarity, and the fourth-order convergence of the RK4 stepper.
They back the `ramanbloch rabi-check` command so the physics core can be
validated without writing any configuration.
"""

from __future__ import annotations

import math

import numpy as np

from .bloch import (
    coherent_ground_state,
    dark_state,
    decay_free,
    evolve,
    ground_mixture,
    pure_state,
    AtomSpec,
    A, B, C,
)
from .defaults import DT, GAMMA, OMEGA
from .pulses import ChannelEnvelope


def constant_envelope(omega_ac: complex, omega_ab: complex, dt: float,
                      T: float) -> ChannelEnvelope:
    nt = int(round(T / dt)) + 1
    return ChannelEnvelope(dt,
                           np.full(nt, complex(omega_ac)),
                           np.full(nt, complex(omega_ab)))


def rabi_error(dt: float = DT, omega: float = OMEGA,
               periods: int = 10) -> float:
    """Max deviation of rho_aa from sin^2(Omega t) on a two-level drive."""
    T = periods * math.pi / omega
    env = constant_envelope(0.0, omega, dt, T)
    traj = evolve(pure_state(B), env, decay_free())
    t = env.times
    return float(np.abs(traj[:, A, A].real - np.sin(omega * t) ** 2).max())


def decay_error(dt: float = DT, gamma: float = GAMMA,
                T: float = 150.0) -> float:
    """Max deviation of rho_aa from exp(-gamma t) with no fields."""
    atom = AtomSpec(gamma_a=gamma, deph_bc=0.0, repopulation=False)
    env = constant_envelope(0.0, 0.0, dt, T)
    traj = evolve(pure_state(A), env, atom)
    return float(np.abs(traj[:, A, A].real - np.exp(-gamma * env.times)).max())


def dark_state_infidelity(dt: float = DT, T: float = 200.0) -> float:
    """1 - <D|rho(T)|D> for a pure dark state under constant fields."""
    om_ac, om_ab = OMEGA, 0.6 * OMEGA
    alpha_b, alpha_c = dark_state(om_ac, om_ab)
    rho0 = coherent_ground_state(alpha_b, alpha_c)
    env = constant_envelope(om_ac, om_ab, dt, T)
    traj = evolve(rho0, env, decay_free())
    amps = np.array([0.0, alpha_b, alpha_c], complex)
    fidelity = np.real(amps.conj() @ traj[-1] @ amps)
    return float(1.0 - fidelity)


def rk4_order_factor(dt: float = 0.1, T: float = 102.4) -> float:
    """Error reduction when halving dt, measured against a dt/8 reference.

    Uses linearly ramped fields (exactly representable under the solver's
    linear field interpolation) with detuning, decay, and dephasing all
    active; a genuine 4th-order stepper gives a factor near 16.
    """
    atom = AtomSpec(delta_a=0.2, deph_bc=1e-3)
    rho0 = ground_mixture()

    def final_state(step: float) -> np.ndarray:
        nt = int(round(T / step)) + 1
        t = np.arange(nt) * step
        env = ChannelEnvelope(step,
                              (0.5 * OMEGA * (1.0 - t / T)).astype(complex),
                              (OMEGA * t / T).astype(complex))
        return evolve(rho0, env, atom)[-1]

    ref = final_state(dt / 8.0)
    err1 = np.abs(final_state(dt) - ref).max()
    err2 = np.abs(final_state(dt / 2.0) - ref).max()
    return float(err1 / err2)


def run_all_oracles() -> list[tuple[str, bool, str]]:
    checks = []
    e = rabi_error()
    checks.append(("rabi oscillation", e <= 1e-6,
                   f"max |rho_aa - sin^2| = {e:.2e} (tol 1e-6)"))
    e = decay_error()
    checks.append(("exponential decay", e <= 1e-8,
                   f"max |rho_aa - exp| = {e:.2e} (tol 1e-8)"))
    e = dark_state_infidelity()
    checks.append(("dark-state stationarity", e <= 1e-9,
                   f"infidelity = {e:.2e} (tol 1e-9)"))
    f = rk4_order_factor()
    checks.append(("rk4 order", 12.0 <= f <= 20.0,
                   f"dt-halving error factor = {f:.2f} (expect within [12, 20])"))
    return checks
