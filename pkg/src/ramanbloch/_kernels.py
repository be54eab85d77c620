"""Compiled inner loops: Bloch RHS, RK4 stepping, and the spatial march.

All kernels take an 10-entry float64 parameter vector:

    p[0:3]  detunings delta_a, delta_b, delta_c   (rad/ns)
    p[3:6]  decay rates gamma_a, gamma_b, gamma_c (1/ns)
    p[6:9]  dephasing deph_ab, deph_ac, deph_bc   (1/ns)
    p[9]    repopulation flag (0.0 or 1.0)

Levels are indexed (a, b, c) = (0, 1, 2); the a-b field couples (0,1),
the a-c field couples (0,2).  No fastmath: results must be bitwise
reproducible regardless of threading.
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def bloch_rhs(rho, om_ac, om_ab, p, out):
    """d(rho)/dt = -i[H, rho] - (Gamma rho + rho Gamma)/2 - dephasing
    (+ repopulation of b, c from a when enabled); writes into `out`."""
    h00 = -p[0] + 0.0j
    h11 = -p[1] + 0.0j
    h22 = -p[2] + 0.0j
    h01 = -om_ab
    h02 = -om_ac
    h10 = np.conj(h01)
    h20 = np.conj(h02)
    for i in range(3):
        for j in range(3):
            # (H rho)_ij with the sparse H above
            if i == 0:
                acc = h00 * rho[0, j] + h01 * rho[1, j] + h02 * rho[2, j]
            elif i == 1:
                acc = h10 * rho[0, j] + h11 * rho[1, j]
            else:
                acc = h20 * rho[0, j] + h22 * rho[2, j]
            # minus (rho H)_ij
            if j == 0:
                acc -= rho[i, 0] * h00 + rho[i, 1] * h10 + rho[i, 2] * h20
            elif j == 1:
                acc -= rho[i, 0] * h01 + rho[i, 1] * h11
            else:
                acc -= rho[i, 0] * h02 + rho[i, 2] * h22
            out[i, j] = -1j * acc - 0.5 * (p[3 + i] + p[3 + j]) * rho[i, j]
    out[0, 1] -= p[6] * rho[0, 1]
    out[1, 0] -= p[6] * rho[1, 0]
    out[0, 2] -= p[7] * rho[0, 2]
    out[2, 0] -= p[7] * rho[2, 0]
    out[1, 2] -= p[8] * rho[1, 2]
    out[2, 1] -= p[8] * rho[2, 1]
    if p[9] != 0.0:
        out[1, 1] += 0.5 * p[3] * rho[0, 0]
        out[2, 2] += 0.5 * p[3] * rho[0, 0]


@njit(**_JIT)
def rk4_evolve(rho0, om_ac, om_ab, p, dt):
    """Classical RK4 over the envelope grid, fields linearly interpolated
    to half-steps; rho re-hermitized after every step.  Returns the full
    trajectory, shape (nt, 3, 3)."""
    nt = om_ac.shape[0]
    traj = np.empty((nt, 3, 3), np.complex128)
    rho = rho0.astype(np.complex128).copy()
    traj[0] = rho
    k1 = np.empty((3, 3), np.complex128)
    k2 = np.empty((3, 3), np.complex128)
    k3 = np.empty((3, 3), np.complex128)
    k4 = np.empty((3, 3), np.complex128)
    tmp = np.empty((3, 3), np.complex128)
    for n in range(nt - 1):
        f0ac = om_ac[n]
        f0ab = om_ab[n]
        f1ac = om_ac[n + 1]
        f1ab = om_ab[n + 1]
        fmac = 0.5 * (f0ac + f1ac)
        fmab = 0.5 * (f0ab + f1ab)
        bloch_rhs(rho, f0ac, f0ab, p, k1)
        for i in range(3):
            for j in range(3):
                tmp[i, j] = rho[i, j] + 0.5 * dt * k1[i, j]
        bloch_rhs(tmp, fmac, fmab, p, k2)
        for i in range(3):
            for j in range(3):
                tmp[i, j] = rho[i, j] + 0.5 * dt * k2[i, j]
        bloch_rhs(tmp, fmac, fmab, p, k3)
        for i in range(3):
            for j in range(3):
                tmp[i, j] = rho[i, j] + dt * k3[i, j]
        bloch_rhs(tmp, f1ac, f1ab, p, k4)
        for i in range(3):
            for j in range(3):
                rho[i, j] = rho[i, j] + (dt / 6.0) * (
                    k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        for i in range(3):
            for j in range(i + 1, 3):
                m = 0.5 * (rho[i, j] + np.conj(rho[j, i]))
                rho[i, j] = m
                rho[j, i] = np.conj(m)
            rho[i, i] = complex(rho[i, i].real, 0.0)
        traj[n + 1] = rho
    return traj


@njit(**_JIT)
def _optical_coherences(rho0, om_ac, om_ab, p, dt):
    traj = rk4_evolve(rho0, om_ac, om_ab, p, dt)
    nt = om_ac.shape[0]
    r_ac = np.empty(nt, np.complex128)
    r_ab = np.empty(nt, np.complex128)
    for n in range(nt):
        r_ac[n] = traj[n, 0, 2]
        r_ab[n] = traj[n, 0, 1]
    return r_ac, r_ab, traj


@njit(**_JIT)
def propagate_heun(e_ac, e_ab, rho0, p, dt, dxi, nz, eta_ac, eta_ab, snap_idx):
    """March the envelopes slice by slice through the medium.

    Per slice: integrate the local Bloch dynamics, source the fields with
    i*eta*rho_opt, predict the next slice's fields, integrate there, and
    correct with the averaged source (Heun).  Full density-matrix
    trajectories are recorded at the slice indices in `snap_idx`.
    """
    nt = e_ac.shape[0]
    cur_ac = e_ac.copy()
    cur_ab = e_ab.copy()
    snaps = np.empty((snap_idx.shape[0], nt, 3, 3), np.complex128)
    for k in range(nz):
        r_ac, r_ab, traj = _optical_coherences(rho0, cur_ac, cur_ab, p, dt)
        for m in range(snap_idx.shape[0]):
            if snap_idx[m] == k:
                snaps[m] = traj
        pred_ac = cur_ac + dxi * 1j * eta_ac * r_ac
        pred_ab = cur_ab + dxi * 1j * eta_ab * r_ab
        q_ac, q_ab, _ = _optical_coherences(rho0, pred_ac, pred_ab, p, dt)
        cur_ac = cur_ac + 0.5 * dxi * 1j * eta_ac * (r_ac + q_ac)
        cur_ab = cur_ab + 0.5 * dxi * 1j * eta_ab * (r_ab + q_ab)
    return cur_ac, cur_ab, snaps
