"""One-dimensional co-propagation through the vapor in retarded coordinates.

In the frame (xi = z, tau = t - z/c) each channel obeys a first-order
march in xi sourced by the local optical coherence,

    d Omega_ac / d xi = i eta_ac rho_ac(xi, tau)
    d Omega_ab / d xi = i eta_ab rho_ab(xi, tau)

closed self-consistently by the Bloch dynamics of each slice.  With the
Hamiltonian sign convention of `bloch`, the +i source gives absorption
for a ground-state medium (a resonant probe decays) and gain only where
the prepared coherence feeds the field.

The coupling constant eta is linear in atomic density.  Its absolute
value for the experiment is folded into the dimensionless depth
beta = eta * L / gamma, calibrated once in `defaults.DEPTH_BETA`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0, hbar

from . import _kernels
from .bloch import (
    STABILITY_LIMIT,
    AtomSpec,
    StabilityError,
    ground_mixture,
    required_dt,
)
from .defaults import CELL_LENGTH, DENSITY, DEPTH_BETA, DT, GAMMA, NZ
from .pulses import ChannelEnvelope, SequenceSpec, build_channel_envelopes, eval_pulse

CONVERGENCE_TOLERANCE = 0.05


def coupling_constant(nu: float, density: float, dipole: float) -> float:
    """Field-matter coupling eta in rad/(ns cm) for Rabi-frequency envelopes.

    Parameters: nu in rad/ns, density in atoms/cm^3, dipole in C m.

    The slowly-varying-envelope source for the field amplitude is
    nu N p / (2 eps0 c); dividing the field equation by hbar/p so it
    advances the Rabi frequency instead multiplies by another p/hbar,
    giving eta = nu N p^2 / (2 eps0 c hbar).  Unit bookkeeping:
    rad/ns = 1e9 rad/s, cm^-3 = 1e6 m^-3, and rad/(s m) = 1e-11 rad/(ns cm).
    """
    if nu < 0.0 or density < 0.0 or dipole < 0.0:
        raise ValueError("coupling_constant arguments must be >= 0")
    nu_si = nu * 1e9
    density_si = density * 1e6
    eta_si = nu_si * density_si * dipole**2 / (2.0 * epsilon_0 * C_LIGHT * hbar)
    return eta_si * 1e-11


@dataclass(frozen=True)
class MediumSpec:
    """Atomic density, cell length, and per-channel coupling constants."""

    density: float = DENSITY        # atoms/cm^3
    length: float = CELL_LENGTH     # cm
    eta_ac: float = DEPTH_BETA * GAMMA / CELL_LENGTH   # rad/(ns cm)
    eta_ab: float = DEPTH_BETA * GAMMA / CELL_LENGTH

    def __post_init__(self):
        if self.density < 0.0:
            raise ValueError("medium.density must be >= 0")
        if not self.length > 0.0:
            raise ValueError("medium.length must be > 0")
        if self.eta_ac < 0.0 or self.eta_ab < 0.0:
            raise ValueError("coupling constants must be >= 0")

    @classmethod
    def from_depth(cls, beta: float, length: float = CELL_LENGTH,
                   density: float = DENSITY, gamma: float = GAMMA) -> "MediumSpec":
        """Build both coupling constants from one dimensionless depth
        beta = eta * L / gamma (both channels share it)."""
        eta = beta * gamma / length
        return cls(density=density, length=length, eta_ac=eta, eta_ab=eta)

    def with_density(self, density: float) -> "MediumSpec":
        """Same medium at a different density; eta scales linearly with N."""
        if self.density <= 0.0:
            raise ValueError("reference density must be > 0 to rescale")
        s = density / self.density
        return replace(self, density=density,
                       eta_ac=self.eta_ac * s, eta_ab=self.eta_ab * s)

    @property
    def depth_beta(self) -> float:
        return self.eta_ac * self.length / GAMMA


@dataclass(frozen=True)
class PropagationGrid:
    nz: int = NZ
    dt: float = DT
    T: Optional[float] = None    # derived from the sequence when omitted

    def __post_init__(self):
        if self.nz < 2:
            raise ValueError("grid.nz must be >= 2")
        if not self.dt > 0.0:
            raise ValueError("grid.dt must be > 0")
        if self.T is not None and not self.T > 0.0:
            raise ValueError("grid.T must be > 0")


@dataclass
class PropagationResult:
    entry_envelopes: ChannelEnvelope
    exit_envelopes: ChannelEnvelope
    rho_snapshots: dict[int, np.ndarray]
    convergence_report: Optional[float]
    converged: bool
    sequence: Optional[SequenceSpec] = None
    probe_peak: Optional[float] = None


def _march(env: ChannelEnvelope, atom: AtomSpec, medium: MediumSpec,
           nz: int, rho0: np.ndarray, snapshot_slices: tuple[int, ...]):
    snap_idx = np.asarray(sorted(set(snapshot_slices)), np.int64)
    exit_ac, exit_ab, snaps = _kernels.propagate_heun(
        env.omega_ac, env.omega_ab, rho0, atom.params(), env.dt,
        medium.length / nz, nz, medium.eta_ac, medium.eta_ab, snap_idx)
    snapshots = {int(k): snaps[m] for m, k in enumerate(snap_idx)}
    return ChannelEnvelope(env.dt, exit_ac, exit_ab), snapshots


def propagate(sequence_or_envelope, atom: AtomSpec, medium: MediumSpec,
              grid: PropagationGrid = PropagationGrid(),
              rho0: Optional[np.ndarray] = None,
              snapshot_slices: tuple[int, ...] = (),
              convergence_check: bool = True) -> PropagationResult:
    """Propagate a pulse sequence (or a pre-sampled envelope) through the cell.

    The medium is sliced into grid.nz cells.  Each slice's Bloch dynamics
    are integrated over the full time grid (stability guard of `evolve`
    applies) and the fields advance with a Heun predictor-corrector in xi.
    The initial atomic state defaults to equal incoherent ground
    populations.

    With convergence_check on, the march is repeated at half the slice
    count and the relative change of the exit envelopes is reported; a
    change above 5% flags the result as unconverged (warning, not fatal).
    """
    if isinstance(sequence_or_envelope, SequenceSpec):
        seq = sequence_or_envelope
        T = grid.T if grid.T is not None else seq.required_duration()
        env = build_channel_envelopes(seq, grid.dt, T)
        probe_peak = None
        if seq.probe is not None:
            probe_peak = float(np.max(np.abs(eval_pulse(seq.probe, env.times))))
    elif isinstance(sequence_or_envelope, ChannelEnvelope):
        seq = None
        env = sequence_or_envelope
        if not math.isclose(env.dt, grid.dt, rel_tol=1e-12):
            raise ValueError("envelope dt disagrees with grid.dt")
        probe_peak = None
    else:
        raise TypeError("expected a SequenceSpec or ChannelEnvelope")

    if env.dt * env.max_rabi() > STABILITY_LIMIT:
        raise StabilityError(
            f"dt * max|Omega| = {env.dt * env.max_rabi():.4g} exceeds "
            f"{STABILITY_LIMIT}; use dt <= {required_dt(env):.4g} ns")

    if rho0 is None:
        rho0 = ground_mixture()
    rho0 = np.asarray(rho0, complex)

    exit_env, snapshots = _march(env, atom, medium, grid.nz, rho0,
                                 snapshot_slices)

    report = None
    converged = True
    if convergence_check:
        coarse, _ = _march(env, atom, medium, max(2, grid.nz // 2), rho0, ())
        scale = max(np.abs(exit_env.omega_ac).max(),
                    np.abs(exit_env.omega_ab).max())
        if scale > 0.0:
            diff = max(np.abs(exit_env.omega_ac - coarse.omega_ac).max(),
                       np.abs(exit_env.omega_ab - coarse.omega_ab).max())
            report = float(diff / scale)
        else:
            report = 0.0
        converged = report <= CONVERGENCE_TOLERANCE
        if not converged:
            warnings.warn(f"propagation not converged: exit envelopes move "
                          f"{report:.1%} between nz={grid.nz} and nz//2",
                          RuntimeWarning, stacklevel=2)

    return PropagationResult(entry_envelopes=env, exit_envelopes=exit_env,
                             rho_snapshots=snapshots,
                             convergence_report=report, converged=converged,
                             sequence=seq, probe_peak=probe_peak)
