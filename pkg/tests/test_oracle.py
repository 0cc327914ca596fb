import numpy as np
import pytest

from lzbattery.dynamics import Linear, NoDrive, PropagationSettings, Sinusoidal, propagate
from lzbattery.energetics import charge
from lzbattery.errors import IntegrityError
from lzbattery.operators import ChainSpec, LongRange, NearestNeighbor, build_battery_hamiltonian
from lzbattery.oracle import (PANEL, brute_force_extrapolated, brute_force_propagate, check_density_matrix,
                              density_matrix_propagate, density_matrix_trajectory, pure_density,
                              two_spin_block_work)
from lzbattery.spectrum import energy_expectation, ground_state

TIGHT = PropagationSettings(rel_tol=1e-8)


def _drive(kind):
    return Linear(10.0) if kind == "linear" else Sinusoidal(10.0, 4.0)


def _spec(n, coupling, g, gamma):
    return ChainSpec(n, g=g, gamma=gamma, coupling=NearestNeighbor() if coupling == "nn" else LongRange(1.0))


def test_panel_covers_both_couplings_protocols_and_sizes():
    assert len(PANEL) == 10
    assert {p[0] for p in PANEL} == {2, 3, 4}
    assert {p[1] for p in PANEL} == {"nn", "lr"}
    assert {p[4] for p in PANEL} == {"linear", "sin"}


@pytest.mark.slow
@pytest.mark.parametrize("point", PANEL, ids=lambda p: "-".join(map(str, p)))
def test_panel_agreement(point):
    n, coupling, g, gamma, kind = point
    spec = _spec(n, coupling, g, gamma)
    h0 = build_battery_hamiltonian(spec)
    e0, psi0, _ = ground_state(h0)
    main = charge(spec, _drive(kind), 1.0, 2, TIGHT).work[-1]
    ref = energy_expectation(h0, brute_force_extrapolated(spec, _drive(kind), psi0, 1.0, dt_fine=5e-5)) - e0
    assert abs(main - ref) <= 1e-5


def test_uncoupled_oracle_only_acquires_phase():
    spec = ChainSpec(3, g=0.0, gamma=0.5)
    _, psi0, _ = ground_state(build_battery_hamiltonian(spec))
    psi = brute_force_propagate(spec, Linear(10.0), psi0, 1.0, dt_fine=1e-3)
    assert abs(abs(np.vdot(psi0, psi)) - 1) <= 1e-9


def test_oracle_fidelity_three_spins():
    spec = ChainSpec(3, g=10.0, gamma=0.5)
    _, psi0, _ = ground_state(build_battery_hamiltonian(spec))
    main = propagate(spec, Linear(10.0), psi0, 2.0, 2, TIGHT).states[-1]
    ref = brute_force_extrapolated(spec, Linear(10.0), psi0, 2.0, dt_fine=5e-5)
    assert abs(np.vdot(ref, main)) >= 1 - 1e-6


def test_plain_product_is_first_order():
    spec = ChainSpec(2, g=10.0, gamma=1.0)
    _, psi0, _ = ground_state(build_battery_hamiltonian(spec))
    ref = brute_force_extrapolated(spec, Linear(10.0), psi0, 1.0, dt_fine=1e-4)
    e1 = np.linalg.norm(brute_force_propagate(spec, Linear(10.0), psi0, 1.0, 2e-3) - ref)
    e2 = np.linalg.norm(brute_force_propagate(spec, Linear(10.0), psi0, 1.0, 1e-3) - ref)
    assert 1.7 < e1 / e2 < 2.3


@pytest.mark.parametrize("g, gamma", [(10.0, 0.5), (10.0, 1.0), (3.0, 0.8), (10.0, 0.99)])
@pytest.mark.parametrize("kind", ["linear", "sin"])
def test_two_spin_closed_form(g, gamma, kind):
    spec = ChainSpec(2, g=g, gamma=gamma)
    trace = charge(spec, _drive(kind), 2.0, 11, TIGHT)
    block = two_spin_block_work(g, gamma, _drive(kind), trace.taus, n_steps_per_sample=8000)
    np.testing.assert_allclose(trace.work, block, atol=1e-6)


def test_two_spin_symmetric_state_is_dark():
    # g = 10, gamma = 0.5: the ground state lies in the undriven odd block
    taus = np.linspace(0, 2, 5)
    assert not two_spin_block_work(10.0, 0.5, Linear(10.0), taus).any()


@pytest.mark.parametrize("kind", ["linear", "sin"])
def test_density_matrix_matches_pure_state(kind):
    spec = ChainSpec(3, g=10.0, gamma=0.5, coupling=LongRange(1.0))
    h0 = build_battery_hamiltonian(spec)
    e0, psi0, summary = ground_state(h0)
    traj = propagate(spec, _drive(kind), psi0, 1.0, 6, TIGHT, h0=h0)
    rhos = density_matrix_trajectory(spec, _drive(kind), pure_density(psi0), traj.taus, traj.dt_used)
    w_rho = np.einsum("kij,ji->k", rhos, h0).real - e0
    w_psi = np.einsum("ki,ij,kj->k", traj.states.conj(), h0, traj.states).real - e0
    np.testing.assert_allclose(w_rho, w_psi, atol=1e-8)
    np.testing.assert_allclose(np.einsum("kii->k", rhos).real, 1.0, atol=1e-10)


def test_maximally_mixed_state_is_invariant():
    spec = ChainSpec(2, g=10.0, gamma=0.5)
    rho0 = np.eye(4) / 4
    rho = density_matrix_propagate(spec, Linear(10.0), rho0, 1.0,
                                   PropagationSettings(dt_initial=0.01, rel_tol=1e-8))
    np.testing.assert_allclose(rho, rho0, atol=1e-12)


def test_density_propagation_converges_to_pure_result():
    spec = ChainSpec(2, g=10.0, gamma=1.0)
    h0 = build_battery_hamiltonian(spec)
    e0, psi0, _ = ground_state(h0)
    settings = PropagationSettings(dt_initial=0.01, rel_tol=1e-8)
    taus, rhos = density_matrix_propagate(spec, Sinusoidal(10.0, 4.0), pure_density(psi0), 1.0,
                                          settings, n_samples=3, full_output=True)
    assert rhos.shape == (3, 4, 4)
    main = charge(spec, Sinusoidal(10.0, 4.0), 1.0, 3, TIGHT)
    np.testing.assert_allclose(np.einsum("kij,ji->k", rhos, h0).real - e0, main.work, atol=1e-7)


@pytest.mark.parametrize("rho", [np.eye(2) / 3, np.array([[1, 1], [0, 0]]), np.diag([1.5, -0.5]),
                                 np.eye(3) / 3])
def test_density_matrix_validation(rho):
    with pytest.raises((IntegrityError, ValueError)):
        check_density_matrix(rho)


def test_undriven_oracle_is_stationary_for_ground_state():
    spec = ChainSpec(3, g=5.0, gamma=0.5, coupling=LongRange(1.0))
    _, psi0, _ = ground_state(build_battery_hamiltonian(spec))
    psi = brute_force_propagate(spec, NoDrive(), psi0, 0.5, dt_fine=1e-2)
    assert abs(abs(np.vdot(psi0, psi)) - 1) < 1e-12
