"""Single-atom three-level dynamics: Hamiltonian, relaxation, RK4 evolution.

The Lambda system has one excited level a and two ground levels b, c,
indexed (0, 1, 2).  The two optical channels drive a-b and a-c; in the
rotating frame the Hamiltonian is

    H/hbar = -(Omega_ab |a><b| + Omega_ac |a><c| + h.c.)
             - (Delta_a |a><a| + Delta_b |b><b| + Delta_c |c><c|)

and the density matrix obeys

    drho/dt = -i [H/hbar, rho] - (Gamma rho + rho Gamma)/2 - D o rho

with Gamma = diag(gamma_a, gamma_b, gamma_c), an elementwise pure-dephasing
matrix D (zero diagonal), and optional 1/2-1/2 repopulation of b and c
from the decaying excited state (making the a-decay a proper Lindblad
channel, so the trace is conserved).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .defaults import GAMMA, GROUND_DEPHASING
from .pulses import ChannelEnvelope

A, B, C = 0, 1, 2

# RK4 stays comfortably accurate while dt * max|Omega| is below this.
STABILITY_LIMIT = 0.05


class StabilityError(ValueError):
    """Raised when the requested time step violates the RK4 guard."""


class FieldSample(NamedTuple):
    """Instantaneous complex Rabi frequencies of the two channels (rad/ns)."""

    omega_ac: complex
    omega_ab: complex


@dataclass(frozen=True)
class AtomSpec:
    """Detunings, decay and dephasing rates of the Lambda atom.

    Defaults describe the experiment: resonant fields, 27 ns excited-state
    lifetime returned half/half to the ground levels, stable ground
    populations, and a ~1e3 ns ground-coherence lifetime realized as pure
    b-c dephasing.
    """

    delta_a: float = 0.0
    delta_b: float = 0.0
    delta_c: float = 0.0
    gamma_a: float = GAMMA
    gamma_b: float = 0.0
    gamma_c: float = 0.0
    deph_ab: float = 0.0
    deph_ac: float = 0.0
    deph_bc: float = GROUND_DEPHASING
    repopulation: bool = True

    def __post_init__(self):
        for name in ("gamma_a", "gamma_b", "gamma_c",
                     "deph_ab", "deph_ac", "deph_bc"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")
        for name in ("delta_a", "delta_b", "delta_c"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def params(self) -> np.ndarray:
        """Parameter vector consumed by the compiled kernels."""
        return np.array([self.delta_a, self.delta_b, self.delta_c,
                         self.gamma_a, self.gamma_b, self.gamma_c,
                         self.deph_ab, self.deph_ac, self.deph_bc,
                         1.0 if self.repopulation else 0.0])


def decay_free(atom: AtomSpec | None = None, **overrides) -> AtomSpec:
    """Atom with all decay and dephasing switched off (unit-test limit)."""
    base = dict(gamma_a=0.0, gamma_b=0.0, gamma_c=0.0,
                deph_ab=0.0, deph_ac=0.0, deph_bc=0.0, repopulation=False)
    base.update(overrides)
    return AtomSpec(**base)


# ---------------------------------------------------------------------------
# state constructors

def pure_state(level: int) -> np.ndarray:
    rho = np.zeros((3, 3), complex)
    rho[level, level] = 1.0
    return rho


def ground_mixture() -> np.ndarray:
    """Equal incoherent population of the two ground levels."""
    rho = np.zeros((3, 3), complex)
    rho[B, B] = 0.5
    rho[C, C] = 0.5
    return rho


def coherent_ground_state(alpha_b: complex, alpha_c: complex) -> np.ndarray:
    """Density matrix of the pure ground superposition alpha_b|b> + alpha_c|c>."""
    amps = np.array([0.0, alpha_b, alpha_c], complex)
    amps = amps / np.linalg.norm(amps)
    return np.outer(amps, amps.conj())


# ---------------------------------------------------------------------------
# operations

def _check_finite_fields(fields: FieldSample):
    if not (cmath.isfinite(complex(fields.omega_ac))
            and cmath.isfinite(complex(fields.omega_ab))):
        raise ValueError("non-finite Rabi frequency")


def build_hamiltonian(fields: FieldSample, atom: AtomSpec) -> np.ndarray:
    """Rotating-frame Hamiltonian over hbar (rad/ns); Hermitian 3x3."""
    _check_finite_fields(fields)
    h = np.zeros((3, 3), complex)
    h[A, A] = -atom.delta_a
    h[B, B] = -atom.delta_b
    h[C, C] = -atom.delta_c
    h[A, B] = -fields.omega_ab
    h[B, A] = -np.conj(fields.omega_ab)
    h[A, C] = -fields.omega_ac
    h[C, A] = -np.conj(fields.omega_ac)
    return h


def bloch_derivative(rho: np.ndarray, fields: FieldSample,
                     atom: AtomSpec) -> np.ndarray:
    """Right-hand side of the master equation at one instant."""
    _check_finite_fields(fields)
    rho = np.asarray(rho, complex)
    out = np.empty((3, 3), complex)
    _kernels.bloch_rhs(rho, complex(fields.omega_ac), complex(fields.omega_ab),
                       atom.params(), out)
    return out


def required_dt(envelope: ChannelEnvelope) -> float:
    """Largest stable step for this envelope under the RK4 guard."""
    peak = envelope.max_rabi()
    return math.inf if peak == 0.0 else STABILITY_LIMIT / peak


def evolve(rho0: np.ndarray, envelope: ChannelEnvelope, atom: AtomSpec,
           dt: float | None = None) -> np.ndarray:
    """Integrate the density matrix over the envelope's time grid.

    Classical fixed-step RK4 with fields linearly interpolated to the
    half-steps; the state is re-hermitized after every step.  Returns the
    trajectory rho(t) on the same grid, shape (nt, 3, 3).

    Raises StabilityError if dt * max|Omega| exceeds the guard, naming the
    step the envelope would need.
    """
    if dt is None:
        dt = envelope.dt
    elif not math.isclose(dt, envelope.dt, rel_tol=1e-12):
        raise ValueError("dt disagrees with the envelope sampling step")
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if len(envelope.omega_ac) < 2:
        raise ValueError("envelope must hold at least two samples")
    if not (np.all(np.isfinite(envelope.omega_ac))
            and np.all(np.isfinite(envelope.omega_ab))):
        raise ValueError("envelope contains non-finite samples")
    peak = envelope.max_rabi()
    if dt * peak > STABILITY_LIMIT:
        raise StabilityError(
            f"dt * max|Omega| = {dt * peak:.4g} exceeds {STABILITY_LIMIT}; "
            f"use dt <= {required_dt(envelope):.4g} ns")
    rho0 = np.asarray(rho0, complex)
    if rho0.shape != (3, 3):
        raise ValueError("rho0 must be 3x3")
    if np.abs(rho0 - rho0.conj().T).max() > 1e-9:
        raise ValueError("rho0 must be Hermitian")
    return _kernels.rk4_evolve(rho0, envelope.omega_ac, envelope.omega_ab,
                               atom.params(), dt)


def dark_state(omega_ac: complex, omega_ab: complex) -> tuple[complex, complex]:
    """Ground-state amplitudes (alpha_b, alpha_c) decoupled from the fields.

    Proportional to (omega_ac, -omega_ab), normalized; satisfies
    omega_ab * alpha_b + omega_ac * alpha_c = 0.
    """
    norm = math.hypot(abs(omega_ac), abs(omega_ab))
    if norm == 0.0:
        raise ValueError("dark state undefined for zero fields")
    return omega_ac / norm, -omega_ab / norm
