"""Ground state and spectral bounds of the battery Hamiltonian."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrityError, NumericError
from .operators import check_hermitian

MAX_DIM = 4096
DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class SpectralSummary:
    e_min: float
    e_max: float
    gap: float
    degenerate: bool

    @property
    def bandwidth(self) -> float:
        """Largest energy any unitary protocol can deposit from the ground state."""
        return self.e_max - self.e_min


def canonical_phase(psi: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Rotate ``psi`` so its largest amplitude is real and positive.

    Amplitudes whose magnitude lies within ``rtol`` of the maximum count as
    tied; the lowest basis index among them is used.
    """
    psi = np.asarray(psi, dtype=complex)
    mag = np.abs(psi)
    top = mag.max()
    if top == 0:
        raise ValueError("zero vector has no phase")
    k = int(np.flatnonzero(mag >= top * (1 - rtol))[0])
    out = psi * (abs(psi[k]) / psi[k])
    out[k] = abs(psi[k])  # exactly real, not just to rounding
    return out


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return psi / nrm


def check_state(psi, dim: int | None = None, atol: float = 1e-10) -> np.ndarray:
    """Validate a pure state vector: unit norm within ``atol``, optional dimension."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"state must be a vector, got shape {psi.shape}")
    if dim is not None and psi.shape[0] != dim:
        raise ValueError(f"state dimension {psi.shape[0]} does not match {dim}")
    if abs(np.vdot(psi, psi).real - 1.0) > atol:
        raise IntegrityError("state is not normalized")
    return psi


def ground_state(h: np.ndarray) -> tuple[float, np.ndarray, SpectralSummary]:
    """Lowest eigenpair of ``h`` from a full dense diagonalization.

    Returns ``(energy, state, summary)``. The state carries the canonical
    phase of :func:`canonical_phase`. ``summary.degenerate`` is set when the
    two lowest levels are closer than ``1e-10 * max(1, max|h_ij|)``; the
    returned vector is then one arbitrary member of the degenerate space.
    """
    h = check_hermitian(h)
    dim = h.shape[0]
    if dim > MAX_DIM:
        raise ValueError(f"dimension {dim} exceeds the dense limit {MAX_DIM}")
    if np.isrealobj(h) or not np.any(h.imag):
        h = h.real
    try:
        evals, evecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver did not converge: {exc}") from exc
    e0 = float(evals[0])
    gap = float(evals[1] - evals[0]) if dim > 1 else np.inf
    scale = max(1.0, float(np.abs(h).max()))
    summary = SpectralSummary(
        e_min=e0,
        e_max=float(evals[-1]),
        gap=max(gap, 0.0),
        degenerate=bool(gap < DEGENERACY_RTOL * scale),
    )
    state = canonical_phase(normalize(evecs[:, 0]))
    return e0, state, summary


def energy_expectation(h: np.ndarray, psi: np.ndarray) -> float:
    """``<psi|h|psi>`` as a real number; the imaginary residue must stay below 1e-10."""
    h = np.asarray(h)
    psi = np.asarray(psi)
    if psi.ndim != 1 or h.shape != (psi.shape[0], psi.shape[0]):
        raise ValueError(f"dimension mismatch: operator {h.shape}, state {psi.shape}")
    value = np.vdot(psi, h @ psi)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise IntegrityError(f"expectation value has imaginary part {value.imag:.3e}")
    return float(value.real)
