"""Slow, independent reference computations used to validate the main propagator.

Nothing here shares the stepping rule or the exponential routine with
:mod:`lzbattery.dynamics`: the brute-force product samples the Hamiltonian at
the left end of each step, and every step exponential is formed densely from
an eigendecomposition.
"""
from __future__ import annotations

import math

import numpy as np

from .dynamics import DriveProtocol, PropagationSettings, sample_times
from .errors import IntegrityError
from .operators import ChainSpec, build_battery_hamiltonian, build_drive_generator


def _real_if_possible(h: np.ndarray) -> np.ndarray:
    return h.real.copy() if not np.any(h.imag) else h


def _step_unitary(h: np.ndarray, dt: float) -> np.ndarray:
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * dt * evals)) @ evecs.conj().T


def _step_apply(h: np.ndarray, dt: float, psi: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(h)
    return evecs @ (np.exp(-1j * dt * evals) * (evecs.conj().T @ psi))


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if rho.shape[0] & (rho.shape[0] - 1):
        raise ValueError(f"dimension {rho.shape[0]} is not a power of two")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise IntegrityError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise IntegrityError(f"density matrix trace {np.trace(rho).real} != 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise IntegrityError("density matrix has a negative eigenvalue")
    return rho


def pure_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def brute_force_propagate(spec: ChainSpec, drive: DriveProtocol, psi0: np.ndarray, tau_max: float,
                          dt_fine: float = 1e-5) -> np.ndarray:
    """Ordered product of ``exp(-i dt H_c(k dt))``, oldest step first (first order in dt)."""
    n_steps = max(1, int(round(tau_max / dt_fine)))
    dt = tau_max / n_steps
    h0 = _real_if_possible(np.array(build_battery_hamiltonian(spec)))
    dgen = np.diag(build_drive_generator(spec.n_spins)).real
    diag = np.diag_indices_from(h0)
    psi = np.array(psi0, dtype=complex)
    for k in range(n_steps):
        h = h0.copy()
        h[diag] += float(drive.field(k * dt)) * dgen
        psi = _step_apply(h, dt, psi)
    return psi


def brute_force_extrapolated(spec: ChainSpec, drive: DriveProtocol, psi0: np.ndarray,
                             tau_max: float, dt_fine: float = 1e-5) -> np.ndarray:
    """Richardson combination ``2 psi(dt/2) - psi(dt)`` of two brute-force runs.

    Cancels the first-order error of the left-endpoint product; the result is
    renormalized.
    """
    coarse = brute_force_propagate(spec, drive, psi0, tau_max, dt_fine)
    fine = brute_force_propagate(spec, drive, psi0, tau_max, dt_fine / 2)
    psi = 2 * fine - coarse
    return psi / np.linalg.norm(psi)


def density_matrix_propagate(spec: ChainSpec, drive: DriveProtocol, rho0: np.ndarray,
                             tau_max: float, settings: PropagationSettings | None = None,
                             n_samples: int = 2, full_output: bool = False):
    """Liouville-von Neumann evolution of a density matrix, ``rho <- U rho U^dagger`` per step.

    Uses the midpoint rule with the step halved until successive final
    density matrices agree to ``settings.rel_tol`` in Frobenius norm. Returns
    the final density matrix, or ``(taus, rhos)`` at ``n_samples`` uniform
    times when ``full_output`` is set.
    """
    settings = settings or PropagationSettings()
    rho0 = check_density_matrix(rho0)
    taus = sample_times(tau_max, n_samples)
    h0 = _real_if_possible(np.array(build_battery_hamiltonian(spec)))
    dgen = np.diag(build_drive_generator(spec.n_spins)).real

    def run(m):
        dt = tau_max / ((n_samples - 1) * m)
        rho = rho0.copy()
        out = [rho0.copy()]
        for s in range(1, n_samples):
            for k in range(m):
                h = h0.copy()
                h[np.diag_indices_from(h)] += float(drive.field(((s - 1) * m + k + 0.5) * dt)) * dgen
                u = _step_unitary(h, dt)
                rho = u @ rho @ u.conj().T
            out.append(rho)
        return np.array(out)

    m = max(1, math.ceil(taus[1] / settings.dt_initial - 1e-9))
    rhos = run(m)
    for _ in range(settings.max_halvings):
        m *= 2
        finer = run(m)
        done = np.linalg.norm(finer[-1] - rhos[-1]) < settings.rel_tol
        rhos = finer
        if done:
            break
    if full_output:
        return taus, rhos
    return rhos[-1]


def density_matrix_trajectory(spec: ChainSpec, drive: DriveProtocol, rho0: np.ndarray, taus: np.ndarray,
                              dt: float) -> np.ndarray:
    """Density matrices at ``taus`` using a fixed midpoint step ``dt`` (no convergence loop).

    ``taus`` must be uniformly spaced from 0 with spacing an integer multiple of ``dt``.
    """
    m = int(round(taus[1] / dt))
    h0 = _real_if_possible(np.array(build_battery_hamiltonian(spec)))
    dgen = np.diag(build_drive_generator(spec.n_spins)).real
    rho = check_density_matrix(rho0)
    out = [rho.copy()]
    for s in range(1, len(taus)):
        for k in range(m):
            h = h0.copy()
            h[np.diag_indices_from(h)] += float(drive.field(((s - 1) * m + k + 0.5) * dt)) * dgen
            u = _step_unitary(h, dt)
            rho = u @ rho @ u.conj().T
        out.append(rho)
    return np.array(out)


def _su2_exp(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i dt h) for a real symmetric 2x2 ``h`` in closed form."""
    mean = 0.5 * (h[0, 0] + h[1, 1])
    dz = 0.5 * (h[0, 0] - h[1, 1])
    dx = h[0, 1]
    r = math.hypot(dz, dx)
    c, s = math.cos(r * dt), math.sin(r * dt)
    if r == 0:
        rot = np.eye(2, dtype=complex)
    else:
        rot = np.array([[c - 1j * s * dz / r, -1j * s * dx / r],
                        [-1j * s * dx / r, c + 1j * s * dz / r]])
    return np.exp(-1j * mean * dt) * rot


def two_spin_block_work(g: float, gamma: float, drive: DriveProtocol, taus: np.ndarray,
                        n_steps_per_sample: int = 1000, field_b: float = 1.0) -> np.ndarray:
    """W(tau) for the N=2 nearest-neighbour battery from its 2x2 parity blocks.

    In the basis (uu, ud, du, dd) the battery splits into an even block
    {uu, dd} with ``[[2B + 2h, -g gamma], [-g gamma, -2B - 2h]]`` and an odd
    block {ud, du} with ``[[0, -g], [-g, 0]]`` that the drive does not touch.
    The ground state lies in whichever block has the lower bottom eigenvalue
    (odd block on ties).
    """
    taus = np.asarray(taus, dtype=float)
    even_ground = -math.hypot(2 * field_b, g * gamma)
    odd_ground = -g
    if not even_ground < odd_ground:
        # odd block: eigenstate of the time-independent block Hamiltonian
        return np.zeros_like(taus)
    block0 = np.array([[2 * field_b, -g * gamma], [-g * gamma, -2 * field_b]])
    evals, evecs = np.linalg.eigh(block0)
    psi = evecs[:, 0].astype(complex)
    e0 = evals[0]
    work = [0.0]
    dt = (taus[1] - taus[0]) / n_steps_per_sample
    for s in range(1, len(taus)):
        for k in range(n_steps_per_sample):
            t_mid = taus[s - 1] + (k + 0.5) * dt
            h = float(drive.field(t_mid))
            psi = _su2_exp(block0 + np.diag([2 * h, -2 * h]), dt) @ psi
        work.append(float(np.vdot(psi, block0 @ psi).real - e0))
    return np.array(work)


# (n_spins, coupling, g, gamma, drive kind) at v = 10, omega = 4 and tau_max = 1.
PANEL = (
    (2, "nn", 10.0, 1.0, "linear"),
    (2, "lr", 10.0, 0.5, "sin"),
    (3, "nn", 10.0, 0.5, "linear"),
    (3, "lr", 10.0, 0.5, "sin"),
    (3, "nn", 5.0, 1.0, "sin"),
    (3, "lr", 20.0, -0.5, "linear"),
    (4, "nn", 10.0, 0.5, "linear"),
    (4, "lr", 10.0, 0.8, "linear"),
    (4, "nn", 15.0, 0.3, "sin"),
    (4, "lr", 10.0, 0.5, "sin"),
)
