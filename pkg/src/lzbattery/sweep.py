"""Parameter sweeps over coupling, drive, anisotropy and chain length.

Every grid cell is an independent call of :func:`~lzbattery.energetics.charge`;
cells may run in worker processes and are always assembled in index order.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .dynamics import DriveProtocol, Linear, PropagationSettings, sample_times
from .energetics import WMaxRecord, charge, max_work_scan
from .operators import ChainSpec, LongRange, NearestNeighbor

SPEC_PARAMS = ("g", "gamma", "n_spins")
DRIVE_PARAMS = ("v", "omega")
PARAMS = SPEC_PARAMS + DRIVE_PARAMS


@dataclass
class GridResult:
    """W(tau)/B on a grid of one or two swept parameters times the tau samples.

    ``work`` has shape ``(*axis lengths, n_taus)``; the per-cell metadata
    arrays have shape ``(*axis lengths)``.
    """

    axis_names: tuple
    axis_values: tuple
    taus: np.ndarray
    work: np.ndarray
    dt_used: np.ndarray
    converged: np.ndarray
    degenerate: np.ndarray
    base: ChainSpec
    drive: DriveProtocol
    settings: PropagationSettings = field(default_factory=PropagationSettings)

    def max(self) -> float:
        return float(self.work.max())

    def at_tau(self, tau: float) -> np.ndarray:
        """Slice of the grid at the tau sample nearest to ``tau``."""
        return self.work[..., int(np.argmin(np.abs(self.taus - tau)))]


def _check_axis(name: str, values) -> np.ndarray:
    if name not in PARAMS:
        raise ValueError(f"cannot sweep {name!r}; choose from {', '.join(PARAMS)}")
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"axis {name!r} needs a non-empty list of values")
    if np.any(np.diff(arr) <= 0):
        raise ValueError(f"axis {name!r} values must be strictly increasing")
    if name == "n_spins":
        if np.any(arr != np.round(arr)):
            raise ValueError("n_spins values must be integers")
        return arr.astype(int)
    return arr


def apply_params(base: ChainSpec, drive: DriveProtocol, params: dict) -> tuple[ChainSpec, DriveProtocol]:
    """Return copies of ``base`` and ``drive`` with the named parameters replaced."""
    spec_changes = {k: v for k, v in params.items() if k in SPEC_PARAMS}
    drive_changes = {k: v for k, v in params.items() if k in DRIVE_PARAMS}
    if "n_spins" in spec_changes:
        spec_changes["n_spins"] = int(spec_changes["n_spins"])
    spec = replace(base, **{k: (v if k == "n_spins" else float(v)) for k, v in spec_changes.items()})
    if drive_changes:
        missing = [k for k in drive_changes if not hasattr(drive, k)]
        if missing:
            raise ValueError(f"drive {drive!r} has no parameter {missing[0]!r}")
        drive = replace(drive, **{k: float(v) for k, v in drive_changes.items()})
    return spec, drive


def _cell(args):
    spec, drive, tau_max, n_samples, settings = args
    trace = charge(spec, drive, tau_max, n_samples, settings, require_converged=False)
    return trace.work, trace.dt_used, trace.converged, trace.degenerate


def _map(func, jobs, n_jobs: int):
    if n_jobs == 1 or len(jobs) <= 1:
        return [func(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(func, jobs))


def run_grid(base: ChainSpec, drive: DriveProtocol, axes: dict, tau_max: float,
             n_samples: int = 400, settings: PropagationSettings | None = None,
             n_jobs: int = 1) -> GridResult:
    """Charge the battery at every point of the cartesian product of ``axes``.

    ``axes`` maps one or two parameter names (``g``, ``gamma``, ``n_spins``,
    ``v``, ``omega``) to value lists. Cells that fail to converge are kept and
    marked in ``converged``.
    """
    settings = settings or PropagationSettings()
    if not 1 <= len(axes) <= 2:
        raise ValueError(f"expected one or two sweep axes, got {len(axes)}")
    names = tuple(axes)
    values = tuple(_check_axis(n, axes[n]) for n in names)
    shape = tuple(len(v) for v in values)
    jobs = []
    for point in itertools.product(*values):
        spec, cell_drive = apply_params(base, drive, dict(zip(names, point)))
        jobs.append((spec, cell_drive, tau_max, n_samples, settings))
    results = _map(_cell, jobs, n_jobs)
    work = np.array([r[0] for r in results]).reshape(shape + (n_samples,))
    return GridResult(
        axis_names=names,
        axis_values=values,
        taus=sample_times(tau_max, n_samples),
        work=work,
        dt_used=np.array([r[1] for r in results]).reshape(shape),
        converged=np.array([r[2] for r in results]).reshape(shape),
        degenerate=np.array([r[3] for r in results]).reshape(shape),
        base=base,
        drive=drive,
        settings=settings,
    )


def sweep_coupling(base: ChainSpec, g_values: Sequence[float], drive: DriveProtocol, tau_max: float,
                   settings: PropagationSettings | None = None, n_samples: int = 400,
                   n_jobs: int = 1) -> GridResult:
    return run_grid(base, drive, {"g": g_values}, tau_max, n_samples, settings, n_jobs)


def sweep_drive(base: ChainSpec, v_values: Sequence[float], tau_max: float,
                settings: PropagationSettings | None = None, n_samples: int = 400,
                n_jobs: int = 1) -> GridResult:
    """Grid over the Landau-Zener slope v."""
    return run_grid(base, Linear(v=0.0), {"v": v_values}, tau_max, n_samples, settings, n_jobs)


def sweep_anisotropy(n_values: Sequence[int], gamma_values: Sequence[float], base: ChainSpec,
                     drive: DriveProtocol, tau_max: float,
                     settings: PropagationSettings | None = None, n_samples: int = 400,
                     n_jobs: int = 1) -> dict[int, GridResult]:
    """One (gamma, tau) grid per chain length."""
    return {
        int(n): run_grid(replace(base, n_spins=int(n)), drive, {"gamma": gamma_values}, tau_max,
                         n_samples, settings, n_jobs)
        for n in _check_axis("n_spins", n_values)
    }


def _wmax_cell(args):
    return max_work_scan(*args)


def wmax_table(n_values: Sequence[int], base: ChainSpec, drives: Sequence[DriveProtocol],
               couplings: Sequence = (NearestNeighbor(), LongRange(1.0)), tau_max: float = 20.0,
               settings: PropagationSettings | None = None, n_samples: int = 2000,
               n_jobs: int = 1) -> list[WMaxRecord]:
    """W_max for every (N, coupling, drive) combination, in that nesting order."""
    jobs = []
    for n in _check_axis("n_spins", n_values):
        for coupling in couplings:
            spec = replace(base, n_spins=int(n), coupling=coupling)
            for drive in drives:
                jobs.append((spec, drive, tau_max, settings, n_samples))
    return _map(_wmax_cell, jobs, n_jobs)


def compare_protocols(n_values: Sequence[int], base: ChainSpec, linear: DriveProtocol,
                      periodic: DriveProtocol, tau_max: float = 20.0,
                      settings: PropagationSettings | None = None,
                      couplings: Sequence = (NearestNeighbor(), LongRange(1.0)),
                      n_samples: int = 2000, n_jobs: int = 1) -> list[WMaxRecord]:
    """Linear-versus-periodic W_max bars; rows ordered by N, coupling, then (linear, periodic)."""
    return wmax_table(n_values, base, (linear, periodic), couplings, tau_max, settings,
                      n_samples, n_jobs)
