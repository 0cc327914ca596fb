"""Self-checks behind ``lzbattery validate``: oracle agreement and physical invariants.

Each check returns ``(passed, detail)``. The Hamiltonian builder is injectable
so a deliberately broken one can be shown to fail.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .dynamics import Linear, NoDrive, PropagationSettings, Sinusoidal, Stepper, propagate
from .energetics import work_and_power
from .operators import (ChainSpec, LongRange, NearestNeighbor, build_battery_hamiltonian,
                        build_drive_generator, check_hermitian, site_rotation)
from .oracle import (PANEL, brute_force_extrapolated, density_matrix_trajectory,
                     pure_density, two_spin_block_work)
from .spectrum import energy_expectation, ground_state

Builder = Callable[[ChainSpec], np.ndarray]

V, OMEGA = 10.0, 4.0


def _drive(kind: str):
    return Linear(V) if kind == "linear" else Sinusoidal(V, OMEGA)


def _coupling(name: str):
    return NearestNeighbor() if name == "nn" else LongRange(1.0)


def _trace(builder: Builder, spec: ChainSpec, drive, tau_max: float, n_samples: int,
           settings: PropagationSettings):
    h0 = builder(spec)
    e0, psi0, summary = ground_state(h0)
    traj = propagate(spec, drive, psi0, tau_max, n_samples, settings, h0=h0)
    return traj, work_and_power(traj, h0, e0, bandwidth=summary.bandwidth), summary


def check_hermiticity(builder: Builder):
    for n in (1, 2, 3, 4):
        for coupling in (NearestNeighbor(), LongRange(1.0)):
            h = builder(ChainSpec(n, g=7.0, gamma=0.3, coupling=coupling))
            check_hermitian(h)
            if abs(np.trace(h)) > 1e-12:
                return False, f"N={n}: trace {np.trace(h):.3e}"
    return True, "H0 Hermitian and traceless for N=1..4"


def check_rotation_covariance(builder: Builder):
    worst = 0.0
    for n in (2, 3):
        for coupling in (NearestNeighbor(), LongRange(1.0)):
            u = site_rotation(n)
            plus = builder(ChainSpec(n, g=3.0, gamma=0.4, coupling=coupling))
            minus = builder(ChainSpec(n, g=3.0, gamma=-0.4, coupling=coupling))
            rotated = u[:, None] * plus * u.conj()[None, :]
            worst = max(worst, float(np.abs(rotated - minus).max()))
    return worst < 1e-12, f"max |U H0(gamma) U^+ - H0(-gamma)| = {worst:.2e}"


def check_zero_coupling(builder: Builder, settings: PropagationSettings):
    worst = 0.0
    for drive in (Linear(V), Sinusoidal(V, OMEGA)):
        _, trace, _ = _trace(builder, ChainSpec(3, g=0.0, gamma=0.5), drive, 2.0, 50, settings)
        worst = max(worst, float(np.abs(trace.work).max()))
    return worst == 0.0, f"max W(g=0) = {worst:.2e}"


def check_isotropic(builder: Builder, settings: PropagationSettings):
    worst = 0.0
    for coupling in (NearestNeighbor(), LongRange(1.0)):
        _, trace, summary = _trace(builder, ChainSpec(3, g=10.0, gamma=0.0, coupling=coupling),
                                   Linear(V), 2.0, 50, settings)
        if summary.degenerate:
            return False, "isotropic test point has a degenerate ground state"
        worst = max(worst, float(trace.work.max()))
    return worst <= 1e-6, f"max W(gamma=0) = {worst:.2e}"


def check_norm_and_bounds(builder: Builder, settings: PropagationSettings):
    spec = ChainSpec(4, g=10.0, gamma=0.5)
    traj, trace, summary = _trace(builder, spec, Linear(V), 2.0, 100, settings)
    drift = float(np.abs(np.linalg.norm(traj.states, axis=1) - 1).max())
    ok = (traj.converged and drift <= 1e-8 and trace.work.min() >= 0
          and trace.work.max() <= summary.bandwidth)
    return ok, f"norm drift {drift:.2e}, W in [{trace.work.min():.3g}, {trace.work.max():.6g}] <= {summary.bandwidth:.6g}"


def check_gamma_symmetry(builder: Builder, settings: PropagationSettings):
    worst = 0.0
    for coupling in (NearestNeighbor(), LongRange(1.0)):
        _, plus, _ = _trace(builder, ChainSpec(3, g=10.0, gamma=0.6, coupling=coupling),
                            Sinusoidal(V, OMEGA), 2.0, 50, settings)
        _, minus, _ = _trace(builder, ChainSpec(3, g=10.0, gamma=-0.6, coupling=coupling),
                             Sinusoidal(V, OMEGA), 2.0, 50, settings)
        worst = max(worst, float(np.abs(plus.work - minus.work).max()))
    return worst <= 10 * settings.rel_tol, f"max |W(gamma) - W(-gamma)| = {worst:.2e}"


def check_time_reversal(builder: Builder, settings: PropagationSettings):
    spec = ChainSpec(3, g=10.0, gamma=0.5)
    h0 = builder(spec)
    _, psi0, _ = ground_state(h0)
    stepper = Stepper(h0, Linear(V))
    there = stepper.evolve(psi0, 0.0, 2.0, 2000)
    back = stepper.evolve(there, 2.0, 0.0, 2000)
    err = float(np.linalg.norm(back - psi0))
    return err <= 10 * settings.rel_tol, f"|psi(0) - reversed| = {err:.2e}"


def check_oracle_panel(builder: Builder, settings: PropagationSettings, dt_fine: float = 5e-5):
    worst = 0.0
    for n, coupling, g, gamma, kind in PANEL:
        spec = ChainSpec(n, g=g, gamma=gamma, coupling=_coupling(coupling))
        drive = _drive(kind)
        h0 = builder(spec)
        e0, psi0, _ = ground_state(h0)
        traj = propagate(spec, drive, psi0, 1.0, 2, settings, h0=h0)
        reference = brute_force_extrapolated(spec, drive, psi0, 1.0, dt_fine)
        w_main = energy_expectation(h0, traj.states[-1]) - e0
        w_ref = energy_expectation(h0, reference) - e0
        worst = max(worst, abs(w_main - w_ref))
    return worst <= 1e-5, f"max |W_main - W_oracle| over {len(PANEL)} points = {worst:.2e}"


def check_density_equivalence(builder: Builder, settings: PropagationSettings):
    spec = ChainSpec(3, g=10.0, gamma=0.5, coupling=LongRange(1.0))
    h0 = builder(spec)
    e0, psi0, _ = ground_state(h0)
    traj = propagate(spec, Linear(V), psi0, 1.0, 11, settings, h0=h0)
    rhos = density_matrix_trajectory(spec, Linear(V), pure_density(psi0), traj.taus, traj.dt_used)
    w_pure = np.array([energy_expectation(h0, s) for s in traj.states])
    w_mixed = np.einsum("kij,ji->k", rhos, h0).real
    worst = float(np.abs(w_pure - w_mixed).max())
    return worst <= 1e-8, f"max |<psi|H0|psi> - Tr[rho H0]| = {worst:.2e}"


def check_two_spin_block(builder: Builder, settings: PropagationSettings):
    spec = ChainSpec(2, g=10.0, gamma=1.0)
    _, trace, _ = _trace(builder, spec, Linear(V), 2.0, 21, settings)
    block = two_spin_block_work(10.0, 1.0, Linear(V), trace.taus, n_steps_per_sample=2000)
    worst = float(np.abs(trace.work - block).max())
    return worst <= 1e-6, f"max |W_N=2 - W_block| = {worst:.2e}"


def check_integrator_order(builder: Builder):
    spec = ChainSpec(4, g=10.0, gamma=0.5)
    h0 = builder(spec)
    _, psi0, _ = ground_state(h0)
    stepper = Stepper(h0, Linear(V))
    n = 500
    ref = stepper.evolve(psi0, 0.0, 2.0, 8 * n)
    e1 = np.linalg.norm(stepper.evolve(psi0, 0.0, 2.0, n) - ref)
    e2 = np.linalg.norm(stepper.evolve(psi0, 0.0, 2.0, 2 * n) - ref)
    ratio = float(e1 / e2)
    return 3.4 <= ratio <= 4.6, f"error ratio under dt halving = {ratio:.3f}"


def run_checks(builder: Builder = build_battery_hamiltonian,
               settings: PropagationSettings | None = None):
    """Run every check; yields ``(name, passed, detail)``. Exceptions count as failures."""
    settings = settings or PropagationSettings()
    checks = [
        ("hermiticity", lambda: check_hermiticity(builder)),
        ("gamma_rotation", lambda: check_rotation_covariance(builder)),
        ("zero_coupling_null", lambda: check_zero_coupling(builder, settings)),
        ("isotropic_null", lambda: check_isotropic(builder, settings)),
        ("norm_and_spectral_bound", lambda: check_norm_and_bounds(builder, settings)),
        ("gamma_symmetry", lambda: check_gamma_symmetry(builder, settings)),
        ("time_reversal", lambda: check_time_reversal(builder, settings)),
        ("two_spin_block", lambda: check_two_spin_block(builder, settings)),
        ("density_equivalence", lambda: check_density_equivalence(builder, settings)),
        ("integrator_order", lambda: check_integrator_order(builder)),
        ("oracle_panel", lambda: check_oracle_panel(builder, settings)),
    ]
    for name, check in checks:
        try:
            passed, detail = check()
        except Exception as exc:  # a broken build must still produce a report line
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, bool(passed), detail
