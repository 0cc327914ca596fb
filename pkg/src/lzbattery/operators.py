"""Pauli embeddings and the spin-chain battery Hamiltonian.

Basis convention: basis index ``b`` has bit ``k`` (counted from the most
significant end, site 0 first) equal to 1 when site ``k`` is spin-down,
i.e. in the sigma^z = -1 eigenstate. With this ordering ``np.kron`` of the
single-site factors in site order gives the embedded operator directly.

All builders return dense complex ``ndarray`` objects flagged read-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Union

import numpy as np

from .errors import IntegrityError

MAX_SPINS = 12

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class NearestNeighbor:
    """Open-chain coupling between adjacent sites only."""

    def strength(self, g: float, i: int, j: int) -> float:
        return g if abs(i - j) == 1 else 0.0

    def label(self) -> str:
        return "nn"


@dataclass(frozen=True)
class LongRange:
    """Power-law coupling ``g / |i - j|**exponent`` between every pair."""

    exponent: float = 1.0

    def __post_init__(self):
        if not self.exponent >= 0:
            raise ValueError(f"long-range exponent must be >= 0, got {self.exponent}")

    def strength(self, g: float, i: int, j: int) -> float:
        return g / abs(i - j) ** self.exponent

    def label(self) -> str:
        return "lr"


CouplingScheme = Union[NearestNeighbor, LongRange]


@dataclass(frozen=True)
class ChainSpec:
    """Static description of the battery.

    Energies are in the same units as ``field_b``; with the defaults
    (``field_b=1``) every energy is already expressed in units of B.
    """

    n_spins: int
    g: float = 0.0
    gamma: float = 0.0
    coupling: CouplingScheme = field(default_factory=NearestNeighbor)
    field_b: float = 1.0

    def __post_init__(self):
        if isinstance(self.n_spins, bool) or int(self.n_spins) != self.n_spins:
            raise ValueError(f"n_spins must be an integer, got {self.n_spins!r}")
        if not 1 <= self.n_spins <= MAX_SPINS:
            raise ValueError(f"n_spins must lie in [1, {MAX_SPINS}], got {self.n_spins}")
        if not self.g >= 0:
            raise ValueError(f"coupling g must be >= 0, got {self.g}")
        if not -1.0 <= self.gamma <= 1.0:
            raise ValueError(f"anisotropy gamma must lie in [-1, 1], got {self.gamma}")
        if not np.isfinite(self.field_b):
            raise ValueError(f"field_b must be finite, got {self.field_b}")
        if not isinstance(self.coupling, (NearestNeighbor, LongRange)):
            raise TypeError(f"unknown coupling scheme {self.coupling!r}")

    @property
    def dim(self) -> int:
        return 2 ** self.n_spins

    def replace(self, **changes) -> "ChainSpec":
        return replace(self, **changes)

    def pair_couplings(self):
        """Yield ``(i, j, g_ij)`` for every pair ``i < j`` with nonzero coupling."""
        for i in range(self.n_spins):
            for j in range(i + 1, self.n_spins):
                gij = self.coupling.strength(self.g, i, j)
                if gij != 0.0:
                    yield i, j, gij


def _freeze(m: np.ndarray) -> np.ndarray:
    m.flags.writeable = False
    return m


def pauli_at(axis: str, site: int, n_spins: int) -> np.ndarray:
    """Embed the Pauli matrix ``axis`` at ``site`` of an ``n_spins`` chain."""
    if axis not in PAULI:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    if not 1 <= n_spins <= MAX_SPINS:
        raise ValueError(f"n_spins must lie in [1, {MAX_SPINS}], got {n_spins}")
    if not 0 <= site < n_spins:
        raise ValueError(f"site {site} out of range for {n_spins} spins")
    eye = np.eye(2, dtype=complex)
    factors = [PAULI[axis] if k == site else eye for k in range(n_spins)]
    return _freeze(reduce(np.kron, factors))


def magnetization_diagonal(n_spins: int) -> np.ndarray:
    """Diagonal of sum_i sigma_i^z: ``n_spins - 2 * popcount(b)`` for each basis index."""
    b = np.arange(2 ** n_spins)
    popcount = np.zeros_like(b)
    for k in range(n_spins):
        popcount += (b >> k) & 1
    return (n_spins - 2 * popcount).astype(float)


def build_field_term(spec: ChainSpec) -> np.ndarray:
    return _freeze(np.diag(spec.field_b * magnetization_diagonal(spec.n_spins)).astype(complex))


def build_interaction(spec: ChainSpec) -> np.ndarray:
    """XY pair interaction ``-1/2 sum_{i<j} g_ij [(1+gamma) XX + (1-gamma) YY]``."""
    n = spec.n_spins
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    for i, j, gij in spec.pair_couplings():
        xx = pauli_at("x", i, n) @ pauli_at("x", j, n)
        yy = pauli_at("y", i, n) @ pauli_at("y", j, n)
        h -= 0.5 * gij * ((1 + spec.gamma) * xx + (1 - spec.gamma) * yy)
    # symmetric assembly keeps the result exactly Hermitian
    h = 0.5 * (h + h.conj().T)
    return _freeze(h)


def build_battery_hamiltonian(spec: ChainSpec) -> np.ndarray:
    return _freeze(build_field_term(spec) + build_interaction(spec))


def build_drive_generator(n_spins: int) -> np.ndarray:
    """Total magnetization sum_i sigma_i^z, the operator multiplied by h(tau)."""
    if not 1 <= n_spins <= MAX_SPINS:
        raise ValueError(f"n_spins must lie in [1, {MAX_SPINS}], got {n_spins}")
    return _freeze(np.diag(magnetization_diagonal(n_spins)).astype(complex))


def check_hermitian(h: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Return ``h`` as a square complex array, raising ``IntegrityError`` unless Hermitian.

    The tolerance is relative to the largest entry magnitude.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    dim = h.shape[0]
    if dim & (dim - 1) or dim == 0:
        raise ValueError(f"dimension {dim} is not a power of two")
    scale = max(np.abs(h).max(), 1e-300)
    if np.abs(h - h.conj().T).max() > rtol * scale:
        raise IntegrityError("operator is not Hermitian")
    return h


def site_rotation(n_spins: int) -> np.ndarray:
    """Diagonal of the product of per-site rotations exp(-i pi sigma^z / 4).

    Conjugating by this operator maps the interaction at anisotropy gamma to
    the one at -gamma.
    """
    return np.exp(-0.25j * np.pi * magnetization_diagonal(n_spins))
