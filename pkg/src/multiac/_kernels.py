"""Numba-compiled inner loops for propagation and the optimizer.

The Hamiltonian is affine in the control value, H(lam) = Hb + lam*diag(c),
so each kernel takes the base matrix and the control diagonal and never
touches the model objects.  Each time step applies the exact unitary
exp(-i H dt) built from an eigendecomposition.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _step(Hb, c, lam, dt, psi):
    """Advance psi by exp(-i (Hb + lam*diag(c)) dt)."""
    H = Hb.copy()
    for i in range(H.shape[0]):
        H[i, i] = H[i, i] + lam * c[i]
    E, V = np.linalg.eigh(H)
    return V @ (np.exp(-1j * E * dt) * (np.conj(V.T) @ psi))


@njit(cache=True)
def propagate_kernel(Hb, c, lam, dt, psi0, forward):
    """Trajectory of M+1 states in physical time order.

    forward: psi0 is the state at t=0 and dt steps run left to right.
    backward: psi0 is the state at t=T and steps run right to left with the
    inverse unitary, so traj[k] is the state at t_k for both directions.
    """
    M = lam.shape[0]
    N = psi0.shape[0]
    traj = np.empty((M + 1, N), np.complex128)
    if forward:
        traj[0] = psi0
        for k in range(M):
            traj[k + 1] = _step(Hb, c, lam[k], dt, traj[k])
    else:
        traj[M] = psi0
        for k in range(M - 1, -1, -1):
            traj[k] = _step(Hb, c, lam[k], -dt, traj[k + 1])
    return traj


@njit(cache=True)
def krotov_kernel(Hb, c, lam, dt, psi0, goal, alpha, max_iters, threshold,
                  mono_tol, stall_iters):
    """Sequential-update optimization loop.

    Returns (infidelities, final field, status) with status one of
    0: hit the infidelity threshold, 1: ran out of iterations,
    2: stalled (update identically zero for stall_iters iterations),
    3: monotonicity violated beyond mono_tol (caller raises).
    """
    M = lam.shape[0]
    N = psi0.shape[0]
    lam = lam.copy()
    infid = np.empty(max_iters)
    psi_traj = np.empty((M + 1, N), np.complex128)
    chi = np.empty(N, np.complex128)
    chi_traj = np.empty((M + 1, N), np.complex128)

    psi_traj[0] = psi0
    for k in range(M):
        psi_traj[k + 1] = _step(Hb, c, lam[k], dt, psi_traj[k])

    status = 1
    n_used = 0
    flat_run = 0
    for it in range(max_iters):
        ov = np.vdot(goal, psi_traj[M])
        chi_traj[M] = ov * goal
        for k in range(M - 1, -1, -1):
            chi_traj[k] = _step(Hb, c, lam[k], -dt, chi_traj[k + 1])

        psi = psi0.copy()
        max_upd = 0.0
        for k in range(M):
            chi = chi_traj[k]
            acc = 0.0
            for i in range(N):
                acc += (np.conj(chi[i]) * c[i] * psi[i]).imag
            lam[k] = lam[k] + acc / alpha[k]
            if abs(acc) > max_upd:
                max_upd = abs(acc)
            psi = _step(Hb, c, lam[k], dt, psi)
            psi_traj[k + 1] = psi

        f = abs(np.vdot(goal, psi)) ** 2
        infid[it] = 1.0 - f
        n_used = it + 1
        if it > 0 and infid[it] > infid[it - 1] + mono_tol:
            status = 3
            break
        if infid[it] < threshold:
            status = 0
            break
        if max_upd == 0.0:
            flat_run += 1
            if flat_run >= stall_iters:
                status = 2
                break
        else:
            flat_run = 0
    return infid[:n_used], lam, status


@njit(cache=True)
def rk4_reference(Hb, c, lam, dt, psi0, substeps):
    """Classic 4th-order integrator on a refined grid; oracle only.

    Within each interval the field is constant, so the only error is the
    RK4 truncation error of the linear ODE, O((dt/substeps)^4).
    """
    M = lam.shape[0]
    N = psi0.shape[0]
    psi = psi0.astype(np.complex128).copy()
    h = dt / substeps
    H = np.empty((N, N), np.complex128)
    for k in range(M):
        H[:, :] = Hb
        for i in range(N):
            H[i, i] = H[i, i] + lam[k] * c[i]
        A = -1j * H
        for _ in range(substeps):
            k1 = A @ psi
            k2 = A @ (psi + 0.5 * h * k1)
            k3 = A @ (psi + 0.5 * h * k2)
            k4 = A @ (psi + h * k3)
            psi = psi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi
