"""Deposited work, average power and windowed maximum work."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import DriveProtocol, PropagationSettings, Trajectory, propagate
from .errors import IntegrityError, NumericError
from .operators import ChainSpec, build_battery_hamiltonian
from .spectrum import ground_state

NEGATIVE_WORK_TOL = 1e-8
BOUND_SLACK = 1e-6


@dataclass
class ChargingTrace:
    taus: np.ndarray
    work: np.ndarray
    power: np.ndarray
    spec: ChainSpec
    drive: DriveProtocol
    dt_used: float = float("nan")
    converged: bool = True
    degenerate: bool = False

    @property
    def w_max(self) -> float:
        return float(self.work.max())

    @property
    def tau_at_max(self) -> float:
        return float(self.taus[int(np.argmax(self.work))])

    def charge_time(self, fraction: float = 0.9) -> float:
        """Earliest sampled tau at which W reaches ``fraction`` of its maximum."""
        target = fraction * self.work.max()
        return float(self.taus[int(np.argmax(self.work >= target))])

    def work_at(self, tau: float) -> float:
        """Work at the sample nearest to ``tau``."""
        return float(self.work[int(np.argmin(np.abs(self.taus - tau)))])


@dataclass(frozen=True)
class WMaxRecord:
    w_max: float
    tau_at_max: float
    spec: ChainSpec
    drive: DriveProtocol
    tau_max: float
    degenerate: bool = False
    dt_used: float = float("nan")


def work_and_power(traj: Trajectory, h0: np.ndarray, e0: float, bandwidth: float | None = None,
                   require_converged: bool = True) -> ChargingTrace:
    """W(tau) = <psi(tau)|H0|psi(tau)> - e0 and P(tau) = W / tau with P(0) = 0.

    ``e0`` must be the energy of the initial state, which has to be the
    ground state: work below ``-1e-8`` raises ``IntegrityError`` and smaller
    negative noise is clamped to zero. When ``bandwidth`` (e_max - e_min) is
    given or computable, every sample is also checked against it.
    """
    if require_converged and not traj.converged:
        raise NumericError(f"trajectory did not converge (last deviation {traj.deviation:.2e})")
    states = traj.states
    h0 = np.asarray(h0)
    if h0.shape != (states.shape[1], states.shape[1]):
        raise ValueError(f"Hamiltonian shape {h0.shape} does not match state dimension {states.shape[1]}")
    # Rayleigh quotient of the shifted operator: no cancellation against e0, and
    # the 1e-15 norm drift accumulated over thousands of steps divides out
    shifted = h0 - e0 * np.eye(h0.shape[0])
    norms = np.einsum("ki,ki->k", states.conj(), states).real
    work = np.einsum("ki,ki->k", states.conj(), states @ shifted.T).real / norms
    work[0] = 0.0
    if work.min() < -NEGATIVE_WORK_TOL:
        raise IntegrityError(
            f"negative work {work.min():.3e}: the initial state is not the ground state")
    work = np.maximum(work, 0.0)
    if bandwidth is None:
        evals = np.linalg.eigvalsh(h0)
        bandwidth = float(evals[-1] - evals[0])
    if work.max() > bandwidth + BOUND_SLACK:
        raise IntegrityError(f"work {work.max():.6g} exceeds the spectral width {bandwidth:.6g}")
    power = np.zeros_like(work)
    power[1:] = work[1:] / traj.taus[1:]
    return ChargingTrace(taus=traj.taus, work=work, power=power, spec=traj.spec,
                         drive=traj.drive, dt_used=traj.dt_used, converged=traj.converged)


def charge(spec: ChainSpec, drive: DriveProtocol, tau_max: float, n_samples: int = 400,
           settings: PropagationSettings | None = None,
           require_converged: bool = True) -> ChargingTrace:
    """Ground state -> unitary charging -> work and power, for one parameter point."""
    h0 = build_battery_hamiltonian(spec)
    e0, psi0, summary = ground_state(h0)
    traj = propagate(spec, drive, psi0, tau_max, n_samples, settings, h0=h0)
    trace = work_and_power(traj, h0, e0, bandwidth=summary.bandwidth,
                           require_converged=require_converged)
    trace.degenerate = summary.degenerate
    return trace


def max_work_scan(spec: ChainSpec, drive: DriveProtocol, tau_max: float,
                  settings: PropagationSettings | None = None, n_samples: int = 2000) -> WMaxRecord:
    """Maximum of W over a dense uniform grid on [0, tau_max]."""
    if not tau_max > 0:
        raise ValueError(f"tau_max must be > 0, got {tau_max}")
    if n_samples < 2000:
        raise ValueError(f"n_samples must be >= 2000 for a W_max scan, got {n_samples}")
    trace = charge(spec, drive, tau_max, n_samples, settings)
    return WMaxRecord(w_max=trace.w_max, tau_at_max=trace.tau_at_max, spec=spec, drive=drive,
                      tau_max=tau_max, degenerate=trace.degenerate, dt_used=trace.dt_used)
