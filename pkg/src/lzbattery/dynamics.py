"""Unitary charging dynamics under H_c(tau) = H0 + h(tau) * sum_i sigma_i^z.

Each step of width ``dt`` applies ``exp(-i dt H_c(t + dt/2))`` (the
second-order midpoint/Magnus rule). The step exponential acts on the state
vector through a Chebyshev expansion, which is accurate to roughly machine
precision for any step size. A whole run is repeated with ``dt`` halved until
two successive final states agree to ``rel_tol``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import sparse

from . import _kernels
from .errors import IntegrityError
from .operators import ChainSpec, build_battery_hamiltonian, check_hermitian, magnetization_diagonal
from .spectrum import check_state


@dataclass(frozen=True)
class Linear:
    """Landau-Zener ramp h(tau) = v * tau."""

    v: float

    def __post_init__(self):
        if not 0 <= self.v < math.inf:
            raise ValueError(f"drive slope v must be finite and >= 0, got {self.v}")

    def field(self, tau):
        return self.v * tau

    def label(self) -> str:
        return "linear"


@dataclass(frozen=True)
class Sinusoidal:
    """Periodic drive h(tau) = v * sin(omega * tau)."""

    v: float
    omega: float

    def __post_init__(self):
        if not 0 <= self.v < math.inf:
            raise ValueError(f"drive amplitude v must be finite and >= 0, got {self.v}")
        if not 0 < self.omega < math.inf:
            raise ValueError(f"drive frequency omega must be finite and > 0, got {self.omega}")

    def field(self, tau):
        return self.v * np.sin(self.omega * tau)

    def label(self) -> str:
        return "sin"


@dataclass(frozen=True)
class NoDrive:
    def field(self, tau):
        return 0.0 * tau

    def label(self) -> str:
        return "none"


DriveProtocol = Union[Linear, Sinusoidal, NoDrive]


@dataclass(frozen=True)
class PropagationSettings:
    dt_initial: float = 1e-3
    rel_tol: float = 1e-8
    max_halvings: int = 12
    scheme: str = field(default="midpoint", init=False)

    def __post_init__(self):
        if not self.dt_initial > 0:
            raise ValueError(f"dt_initial must be > 0, got {self.dt_initial}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if int(self.max_halvings) != self.max_halvings or self.max_halvings < 0:
            raise ValueError(f"max_halvings must be a non-negative integer, got {self.max_halvings}")


@dataclass
class Trajectory:
    taus: np.ndarray
    states: np.ndarray
    spec: ChainSpec
    drive: DriveProtocol
    dt_used: float
    converged: bool
    # ray distance between the final states of the last two runs
    deviation: float = float("nan")
    halvings: int = 0


def charging_hamiltonian(spec: ChainSpec, drive: DriveProtocol, tau: float) -> np.ndarray:
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    h0 = build_battery_hamiltonian(spec)
    h = float(drive.field(tau))
    if h == 0.0:
        return h0
    out = h0 + h * np.diag(magnetization_diagonal(spec.n_spins))
    out.flags.writeable = False
    return out


def ray_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_theta ||a - exp(i theta) b||``: distance between the physical states."""
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


class _HermitianAction:
    """Apply ``exp(-i t (O + diag(d)))`` to vectors for a fixed off-diagonal part ``O``.

    Spectral bounds come from Gershgorin discs, so a varying diagonal needs no
    extra eigenvalue work.
    """

    def __init__(self, operator: np.ndarray):
        offdiag = np.array(operator)
        np.fill_diagonal(offdiag, 0)
        if not np.any(offdiag.imag):
            offdiag = offdiag.real
        csr = sparse.csr_matrix(offdiag)
        self.indptr = csr.indptr.astype(np.int64)
        self.indices = csr.indices.astype(np.int64)
        self.data = csr.data
        self.radius = np.asarray(abs(csr).sum(axis=1)).ravel().astype(float)
        self.dim = offdiag.shape[0]
        self._work = np.empty((3, self.dim), dtype=complex)
        self._shifted = np.empty(self.dim)

    def apply(self, diag: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
        out = np.empty(self.dim, dtype=complex)
        _kernels.chebyshev_apply(self.indptr, self.indices, self.data, self.radius,
                                 np.ascontiguousarray(diag, dtype=float),
                                 np.ascontiguousarray(v, dtype=complex), float(t), out,
                                 self._work, self._shifted)
        return out


def expm_multiply_hermitian(a: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i t a) @ v`` for Hermitian ``a``."""
    a = np.asarray(a)
    return _HermitianAction(a).apply(np.real(np.diag(a)), v, t)


def _drive_code(drive: DriveProtocol) -> tuple[int, float, float]:
    if isinstance(drive, Linear):
        return _kernels.DRIVE_LINEAR, float(drive.v), 0.0
    if isinstance(drive, Sinusoidal):
        return _kernels.DRIVE_SIN, float(drive.v), float(drive.omega)
    if isinstance(drive, NoDrive):
        return _kernels.DRIVE_NONE, 0.0, 0.0
    raise TypeError(f"unknown drive protocol {drive!r}")


class Stepper:
    """Midpoint-rule time stepping for H0 + h(t) * D with diagonal D."""

    def __init__(self, h0: np.ndarray, drive: DriveProtocol):
        h0 = check_hermitian(h0)
        n_spins = int(round(math.log2(h0.shape[0])))
        self.dim = h0.shape[0]
        self.drive = drive
        self.base_diag = np.real(np.diag(h0)).copy()
        self.generator = magnetization_diagonal(n_spins)
        self.action = _HermitianAction(h0)
        self._code = _drive_code(drive)

    def step(self, psi: np.ndarray, t_mid: float, dt: float) -> np.ndarray:
        h = _kernels.drive_field(*self._code, float(t_mid))
        return self.action.apply(self.base_diag + h * self.generator, psi, dt)

    def evolve(self, psi: np.ndarray, t_start: float, t_end: float, n_steps: int) -> np.ndarray:
        """Take ``n_steps`` equal midpoint steps from ``t_start`` to ``t_end``.

        ``t_end < t_start`` runs the schedule backwards, which inverts the
        forward evolution step by step.
        """
        dt = (t_end - t_start) / n_steps
        for k in range(n_steps):
            psi = self.step(psi, t_start + (k + 0.5) * dt, dt)
        return psi

    def run(self, psi0: np.ndarray, taus: np.ndarray, steps_per_sample: int) -> tuple[np.ndarray, float]:
        """States at every uniformly spaced sample time in ``taus`` (``taus[0] == 0``)."""
        n = len(taus)
        dt = float(taus[-1]) / ((n - 1) * steps_per_sample)
        states = np.empty((n, self.dim), dtype=complex)
        a = self.action
        _kernels.midpoint_run(a.indptr, a.indices, a.data, a.radius, self.base_diag,
                              self.generator, *self._code,
                              np.ascontiguousarray(psi0, dtype=complex), n,
                              steps_per_sample, dt, states)
        return states, dt


def evolve(h0: np.ndarray, drive: DriveProtocol, psi: np.ndarray, t_start: float, t_end: float,
           n_steps: int) -> np.ndarray:
    """Fixed-step midpoint evolution between two times; see :meth:`Stepper.evolve`."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    return Stepper(h0, drive).evolve(np.asarray(psi, dtype=complex), t_start, t_end, n_steps)


def sample_times(tau_max: float, n_samples: int) -> np.ndarray:
    return np.linspace(0.0, tau_max, n_samples)


def propagate(spec: ChainSpec, drive: DriveProtocol, psi0: np.ndarray, tau_max: float,
              n_samples: int = 400, settings: PropagationSettings | None = None,
              h0: np.ndarray | None = None) -> Trajectory:
    """Time-ordered evolution of ``psi0`` sampled on ``n_samples`` uniform times in [0, tau_max].

    The run is repeated with the step halved until the final states of two
    successive runs lie within ``settings.rel_tol`` of each other (measured as
    a ray distance, so a global phase does not count). The finer of the two
    runs is returned. After ``max_halvings`` unsuccessful halvings the finest
    run comes back with ``converged=False``.
    """
    settings = settings or PropagationSettings()
    if not tau_max > 0:
        raise ValueError(f"tau_max must be > 0, got {tau_max}")
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    if h0 is None:
        h0 = build_battery_hamiltonian(spec)
    if h0.shape != (spec.dim, spec.dim):
        raise ValueError(f"Hamiltonian shape {h0.shape} does not match {spec.n_spins} spins")
    psi0 = check_state(psi0, spec.dim, atol=1e-8)

    taus = sample_times(tau_max, n_samples)
    stepper = Stepper(h0, drive)
    m = max(1, math.ceil(taus[1] / settings.dt_initial - 1e-9))
    states, dt = stepper.run(psi0, taus, m)
    deviation = float("inf")
    halvings = 0
    converged = False
    while halvings < settings.max_halvings:
        m *= 2
        halvings += 1
        finer, dt = stepper.run(psi0, taus, m)
        deviation = ray_distance(finer[-1], states[-1])
        states = finer
        if deviation < settings.rel_tol:
            converged = True
            break
    norms = np.linalg.norm(states, axis=1)
    if converged and np.abs(norms - 1).max() > 1e-8:
        raise IntegrityError(f"norm drift {np.abs(norms - 1).max():.2e} exceeds 1e-8")
    return Trajectory(taus=taus, states=states, spec=spec, drive=drive, dt_used=dt,
                      converged=converged, deviation=deviation, halvings=halvings)
