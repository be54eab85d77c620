"""Single-atom dynamics: Hamiltonian, master-equation RHS, RK4 evolution."""

import numpy as np
import pytest

from ramanbloch import (
    A,
    B,
    C,
    AtomSpec,
    ChannelEnvelope,
    FieldSample,
    StabilityError,
    bloch_derivative,
    build_hamiltonian,
    coherent_ground_state,
    dark_state,
    decay_free,
    evolve,
    ground_mixture,
    pure_state,
)
from ramanbloch.defaults import DT, GAMMA, OMEGA
from ramanbloch.oracles import (
    constant_envelope,
    dark_state_infidelity,
    decay_error,
    rabi_error,
    rk4_order_factor,
)


def random_density_matrix(rng):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_fields(rng):
    z = rng.normal(size=4)
    return FieldSample(complex(z[0], z[1]), complex(z[2], z[3]))


# ---------------------------------------------------------------------------
# Hamiltonian

def test_hamiltonian_vacuum_is_zero():
    h = build_hamiltonian(FieldSample(0.0, 0.0), decay_free())
    assert np.all(h == 0.0)


def test_hamiltonian_symmetric_drive_eigenvalues():
    # independent oracle: dense eigensolve of the constructed matrix
    omega = OMEGA
    h = build_hamiltonian(FieldSample(omega, omega), decay_free())
    eig = np.sort(np.linalg.eigvalsh(h))
    expected = np.sort([0.0, np.sqrt(2.0) * omega, -np.sqrt(2.0) * omega])
    assert np.allclose(eig, expected, atol=1e-14)


def test_hamiltonian_hermitian_for_random_fields():
    rng = np.random.default_rng(7)
    for _ in range(50):
        atom = AtomSpec(delta_a=rng.normal(), delta_b=rng.normal(),
                        delta_c=rng.normal())
        h = build_hamiltonian(random_fields(rng), atom)
        assert np.abs(h - h.conj().T).max() == 0.0


def test_hamiltonian_layout():
    h = build_hamiltonian(FieldSample(omega_ac=2.0, omega_ab=3.0j),
                          AtomSpec(delta_a=0.5, delta_b=0.25, delta_c=0.125,
                                   deph_bc=0.0))
    assert h[A, C] == -2.0 and h[A, B] == -3.0j
    assert h[C, A] == -2.0 and h[B, A] == np.conj(-3.0j)
    assert h[A, A] == -0.5 and h[B, B] == -0.25 and h[C, C] == -0.125
    assert h[B, C] == 0.0


def test_hamiltonian_rejects_non_finite():
    with pytest.raises(ValueError):
        build_hamiltonian(FieldSample(np.nan, 0.0), AtomSpec())


# ---------------------------------------------------------------------------
# master-equation RHS

def test_derivative_free_stationary():
    rng = np.random.default_rng(3)
    rho = random_density_matrix(rng)
    d = bloch_derivative(rho, FieldSample(0.0, 0.0), decay_free())
    assert np.abs(d).max() < 1e-15


def test_derivative_pure_decay():
    atom = AtomSpec(gamma_a=GAMMA, deph_bc=0.0, repopulation=False)
    d = bloch_derivative(pure_state(A), FieldSample(0.0, 0.0), atom)
    assert d[A, A] == pytest.approx(-GAMMA, rel=1e-14)
    assert d[B, B] == 0.0 and d[C, C] == 0.0


def test_derivative_repopulation_conserves_trace():
    atom = AtomSpec(gamma_a=GAMMA, deph_bc=0.0, repopulation=True)
    d = bloch_derivative(pure_state(A), FieldSample(0.0, 0.0), atom)
    assert d[B, B] == pytest.approx(0.5 * GAMMA, rel=1e-14)
    assert d[C, C] == pytest.approx(0.5 * GAMMA, rel=1e-14)
    assert abs(np.trace(d)) < 1e-15


def test_derivative_matches_dense_formula():
    # independent path: assemble the same RHS from dense matrix algebra
    rng = np.random.default_rng(11)
    atom = AtomSpec(delta_a=0.3, delta_b=-0.1, delta_c=0.05,
                    gamma_a=GAMMA, gamma_b=0.01, gamma_c=0.02,
                    deph_ab=0.004, deph_ac=0.003, deph_bc=0.002,
                    repopulation=True)
    gam = np.diag([atom.gamma_a, atom.gamma_b, atom.gamma_c])
    deph = np.array([[0.0, atom.deph_ab, atom.deph_ac],
                     [atom.deph_ab, 0.0, atom.deph_bc],
                     [atom.deph_ac, atom.deph_bc, 0.0]])
    for _ in range(20):
        rho = random_density_matrix(rng)
        fields = random_fields(rng)
        h = build_hamiltonian(fields, atom)
        expected = (-1j * (h @ rho - rho @ h)
                    - 0.5 * (gam @ rho + rho @ gam) - deph * rho)
        expected[B, B] += 0.5 * atom.gamma_a * rho[A, A]
        expected[C, C] += 0.5 * atom.gamma_a * rho[A, A]
        got = bloch_derivative(rho, fields, atom)
        assert np.abs(got - expected).max() < 1e-13
        assert np.abs(got - got.conj().T).max() < 1e-13


# ---------------------------------------------------------------------------
# evolution

def test_evolve_identity_without_dynamics():
    rng = np.random.default_rng(5)
    rho0 = random_density_matrix(rng)
    env = constant_envelope(0.0, 0.0, DT, 50.0)
    traj = evolve(rho0, env, decay_free())
    assert np.abs(traj[-1] - rho0).max() < 1e-12


def test_evolve_rabi_oracle():
    assert rabi_error(dt=DT, omega=OMEGA, periods=10) <= 1e-6


def test_evolve_decay_oracle():
    assert decay_error(dt=DT, gamma=GAMMA) <= 1e-8


def test_evolve_stability_guard_names_required_dt():
    env = constant_envelope(10.0, 0.0, 0.05, 5.0)  # dt*Omega = 0.5
    with pytest.raises(StabilityError, match="0.005"):
        evolve(ground_mixture(), env, AtomSpec())


def test_evolve_rejects_dt_mismatch():
    env = constant_envelope(0.0, 0.1, DT, 10.0)
    with pytest.raises(ValueError):
        evolve(ground_mixture(), env, AtomSpec(), dt=2 * DT)


def test_evolve_rejects_non_hermitian_start():
    rho = np.zeros((3, 3), complex)
    rho[0, 1] = 1.0
    env = constant_envelope(0.0, 0.0, DT, 1.0)
    with pytest.raises(ValueError):
        evolve(rho, env, AtomSpec())


# ---------------------------------------------------------------------------
# invariants

def test_hermiticity_along_trajectory():
    rng = np.random.default_rng(2)
    nt = 2001
    om_ac = (0.3 * np.sin(0.04 * np.arange(nt))).astype(complex)
    om_ab = np.full(nt, 0.2 + 0.1j)
    env = ChannelEnvelope(DT, om_ac, om_ab)
    traj = evolve(random_density_matrix(rng), env,
                  AtomSpec(delta_a=0.1, deph_bc=1e-3))
    defect = np.abs(traj - traj.conj().transpose(0, 2, 1)).max()
    assert defect <= 1e-12


@pytest.mark.parametrize("atom", [
    decay_free(deph_ab=0.01, deph_ac=0.02, deph_bc=0.005),   # Gamma = 0
    AtomSpec(gamma_a=GAMMA, deph_bc=1e-3, repopulation=True),
])
def test_trace_conservation_1000_steps(atom):
    env = constant_envelope(OMEGA, 0.7 * OMEGA, DT, 1000 * DT)
    traj = evolve(ground_mixture(), env, atom)
    traces = np.einsum("nii->n", traj).real
    assert np.abs(traces - traces[0]).max() <= 1e-9


def test_positivity_under_drive_and_decay():
    env = constant_envelope(OMEGA, OMEGA, DT, 300.0)
    traj = evolve(ground_mixture(), env, AtomSpec())
    min_eig = np.linalg.eigvalsh(traj).min()
    assert min_eig >= -1e-6


def test_rk4_order_factor_near_16():
    factor = rk4_order_factor()
    assert 12.0 <= factor <= 20.0


def test_dark_state_stationary():
    assert dark_state_infidelity() <= 1e-9


# ---------------------------------------------------------------------------
# dark state

def test_dark_state_single_field_cases():
    assert dark_state(1.0, 0.0) == (1.0, 0.0)
    alpha_b, alpha_c = dark_state(0.0, 1.0)
    assert alpha_b == 0.0 and alpha_c == pytest.approx(-1.0)


def test_dark_state_symmetric_maximal_coherence():
    alpha_b, alpha_c = dark_state(1.0, 1.0)
    assert alpha_b == pytest.approx(1 / np.sqrt(2))
    assert alpha_c == pytest.approx(-1 / np.sqrt(2))
    rho = coherent_ground_state(alpha_b, alpha_c)
    assert rho[B, C] == pytest.approx(-0.5)


def test_dark_state_decoupling_random_fields():
    rng = np.random.default_rng(13)
    for _ in range(50):
        f = random_fields(rng)
        alpha_b, alpha_c = dark_state(f.omega_ac, f.omega_ab)
        assert abs(f.omega_ab * alpha_b + f.omega_ac * alpha_c) <= 1e-12
        assert abs(alpha_b) ** 2 + abs(alpha_c) ** 2 == pytest.approx(1.0)


def test_dark_state_rejects_zero_fields():
    with pytest.raises(ValueError):
        dark_state(0.0, 0.0)


def test_atom_spec_rejects_negative_rates():
    with pytest.raises(ValueError):
        AtomSpec(gamma_a=-1.0)
    with pytest.raises(ValueError):
        AtomSpec(deph_bc=-1e-3)
