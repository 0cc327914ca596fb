import numpy as np
import pytest

from lzbattery.dynamics import Linear, NoDrive, PropagationSettings, Sinusoidal, Trajectory, propagate
from lzbattery.energetics import ChargingTrace, charge, max_work_scan, work_and_power
from lzbattery.errors import IntegrityError, NumericError
from lzbattery.operators import ChainSpec, LongRange, NearestNeighbor, build_battery_hamiltonian
from lzbattery.spectrum import ground_state

TIGHT = PropagationSettings(rel_tol=1e-8)
DRIVES = [Linear(10.0), Sinusoidal(10.0, 4.0)]


@pytest.mark.parametrize("drive", DRIVES)
@pytest.mark.parametrize("coupling", [NearestNeighbor(), LongRange(1.0)])
def test_zero_coupling_stores_nothing(drive, coupling):
    trace = charge(ChainSpec(4, g=0.0, gamma=0.5, coupling=coupling), drive, 5.0, 50, TIGHT)
    assert not trace.work.any()
    assert not trace.power.any()


@pytest.mark.parametrize("drive", DRIVES)
def test_first_sample_is_zero(drive):
    trace = charge(ChainSpec(3, g=8.0, gamma=0.5), drive, 1.0, 11, TIGHT)
    assert trace.taus[0] == 0.0
    assert trace.work[0] == 0.0 and trace.power[0] == 0.0


def test_power_is_work_over_time():
    trace = charge(ChainSpec(3, g=8.0, gamma=0.5, coupling=LongRange(1.0)), Linear(10.0), 2.0, 21, TIGHT)
    np.testing.assert_allclose(trace.power[1:], trace.work[1:] / trace.taus[1:], rtol=1e-15)


@pytest.mark.parametrize("drive", DRIVES)
@pytest.mark.parametrize("gamma", [0.2, 0.5, 1.0, -0.7])
def test_work_within_spectral_window(drive, gamma):
    spec = ChainSpec(4, g=12.0, gamma=gamma, coupling=LongRange(1.0))
    _, _, summary = ground_state(build_battery_hamiltonian(spec))
    trace = charge(spec, drive, 4.0, 80, TIGHT)
    assert trace.work.min() >= 0.0
    assert trace.work.max() <= summary.bandwidth + 1e-6


@pytest.mark.parametrize("drive", DRIVES)
def test_single_spin_cannot_be_charged(drive):
    rec = max_work_scan(ChainSpec(1, g=5.0), drive, 3.0, TIGHT)
    assert rec.w_max == 0.0
    assert 0.0 <= rec.tau_at_max <= 3.0


@pytest.mark.parametrize("coupling", [NearestNeighbor(), LongRange(1.0)])
def test_isotropic_null(coupling):
    spec = ChainSpec(4, g=10.0, gamma=0.0, coupling=coupling)
    trace = charge(spec, Linear(10.0), 5.0, 100, TIGHT)
    assert not trace.degenerate
    assert trace.w_max <= 1e-6


def test_anisotropy_sign_gives_identical_traces():
    spec = ChainSpec(4, g=10.0, gamma=0.5, coupling=LongRange(1.0))
    a = charge(spec, Linear(10.0), 3.0, 60, TIGHT)
    b = charge(spec.replace(gamma=-0.5), Linear(10.0), 3.0, 60, TIGHT)
    np.testing.assert_allclose(a.work, b.work, atol=10 * TIGHT.rel_tol * a.w_max)
    assert a.tau_at_max == b.tau_at_max


def test_wmax_scan_needs_dense_grid():
    with pytest.raises(ValueError):
        max_work_scan(ChainSpec(2, g=1.0), Linear(1.0), 1.0, TIGHT, n_samples=1000)
    with pytest.raises(ValueError):
        max_work_scan(ChainSpec(2, g=1.0), Linear(1.0), 0.0, TIGHT)


def test_wmax_grid_resolution_is_stable():
    spec = ChainSpec(4, g=10.0, gamma=0.5)
    coarse = max_work_scan(spec, Linear(10.0), 4.0, TIGHT, n_samples=2000)
    fine = max_work_scan(spec, Linear(10.0), 4.0, TIGHT, n_samples=4000)
    assert abs(fine.w_max - coarse.w_max) < 0.005 * fine.w_max


def _trajectory(spec, states, converged=True):
    taus = np.linspace(0, 1, len(states))
    return Trajectory(taus=taus, states=np.array(states, dtype=complex), spec=spec, drive=NoDrive(),
                      dt_used=0.1, converged=converged)


def test_rejects_unconverged_trajectory():
    spec = ChainSpec(1)
    traj = _trajectory(spec, [[0, 1], [0, 1]], converged=False)
    with pytest.raises(NumericError):
        work_and_power(traj, build_battery_hamiltonian(spec), -1.0)
    trace = work_and_power(traj, build_battery_hamiltonian(spec), -1.0, require_converged=False)
    assert isinstance(trace, ChargingTrace) and not trace.converged


def test_start_above_ground_is_an_integrity_error():
    spec = ChainSpec(1)
    # claiming the excited energy as e0 makes the later ground-state sample negative
    traj = _trajectory(spec, [[1, 0], [0, 1]])
    with pytest.raises(IntegrityError):
        work_and_power(traj, build_battery_hamiltonian(spec), 1.0)


def test_tiny_negative_work_is_clamped():
    spec = ChainSpec(1)
    traj = _trajectory(spec, [[0, 1], [0, 1]])
    trace = work_and_power(traj, build_battery_hamiltonian(spec), -1.0 + 1e-10)
    assert trace.work[1] == 0.0


def test_dimension_mismatch():
    traj = _trajectory(ChainSpec(1), [[0, 1], [0, 1]])
    with pytest.raises(ValueError):
        work_and_power(traj, build_battery_hamiltonian(ChainSpec(2)), -2.0)


def test_charge_time_and_lookup():
    trace = ChargingTrace(taus=np.array([0.0, 1.0, 2.0, 3.0]), work=np.array([0.0, 5.0, 9.5, 10.0]),
                          power=np.zeros(4), spec=ChainSpec(1), drive=NoDrive())
    assert trace.w_max == 10.0 and trace.tau_at_max == 3.0
    assert trace.charge_time(0.9) == 2.0
    assert trace.work_at(1.2) == 5.0


def test_small_chain_charges_early():
    # same qualitative picture as the eight-spin chain: most of the plateau is reached fast
    trace = charge(ChainSpec(4, g=10.0, gamma=0.5), Linear(10.0), 10.0, 400, TIGHT)
    assert trace.work_at(3.0) > 0.5 * trace.w_max
