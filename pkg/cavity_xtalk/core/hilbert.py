"""Register basis and total-excitation sectors.

Every Hamiltonian handled by the package is a sum of flip-flop terms
``σ+σ-`` plus diagonal ``σzσz`` terms, so it conserves the number of
excited qubits.  This module enumerates the computational basis of an
``N``-qubit register split into those Hamming-weight sectors and builds
the sparse matrix of a single flip-flop inside one sector.

Conventions
-----------

* Qubits are indexed from ``0``.  Qubits ``0`` and ``1`` are the two
  active (``on``) qubits, ``2 … N-1`` are idle.
* A basis state is an integer whose bit ``q`` is the state of qubit ``q``
  (qubit 0 is the least significant bit).  Inside a sector the states are
  sorted ascending as integers.
* :func:`basis_label` prints qubit 0 first, so ``basis_label(1, 3)`` is
  ``"100"``.

Example:

.. code-block:: python

    from cavity_xtalk.core.hilbert import Register, enumerate_sectors

    sectors = enumerate_sectors(Register(4))
    [s.size for s in sectors]   # [1, 4, 6, 4, 1]

"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Tuple

import numpy as np
from scipy import sparse

MAX_QUBITS = 16
ACTIVE_QUBITS: Tuple[int, int] = (0, 1)


class RegisterError(ValueError):
    """Raised for registers or qubit indices outside the supported range."""


@dataclass(frozen=True)
class Register:
    """An ``N``-qubit register with two active qubits and ``N - 2`` idle ones."""

    n_qubits: int
    active_indices: Tuple[int, int] = ACTIVE_QUBITS

    def __post_init__(self) -> None:
        if not isinstance(self.n_qubits, (int, np.integer)):
            raise RegisterError(f"n_qubits must be an integer, got {self.n_qubits!r}")
        if self.n_qubits < 2:
            raise RegisterError(f"a register needs at least 2 qubits, got {self.n_qubits}")
        if self.n_qubits > MAX_QUBITS:
            raise RegisterError(
                f"n_qubits={self.n_qubits} exceeds the supported maximum of {MAX_QUBITS}"
            )
        if tuple(self.active_indices) != ACTIVE_QUBITS:
            raise RegisterError("active qubits are fixed to indices (0, 1)")

    @property
    def idle_count(self) -> int:
        return self.n_qubits - 2

    @property
    def idle_indices(self) -> Tuple[int, ...]:
        return tuple(range(2, self.n_qubits))

    @property
    def dimension(self) -> int:
        return 1 << self.n_qubits

    def check_index(self, q: int) -> None:
        if not 0 <= q < self.n_qubits:
            raise RegisterError(f"qubit index {q} out of range for {self.n_qubits} qubits")


@dataclass(frozen=True, eq=False)
class ExcitationSector:
    """Basis states of Hamming weight ``weight`` in canonical order."""

    n_qubits: int
    weight: int
    states: np.ndarray
    index_map: Dict[int, int] = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return int(self.states.size)

    def labels(self) -> List[str]:
        return [basis_label(int(s), self.n_qubits) for s in self.states]


def basis_label(state: int, n_qubits: int) -> str:
    """Bitstring of ``state`` with qubit 0 printed first."""
    return "".join(str((state >> q) & 1) for q in range(n_qubits))


@lru_cache(maxsize=None)
def build_sector(n_qubits: int, weight: int) -> ExcitationSector:
    """Enumerate the states with ``weight`` excited qubits (cached, read-only)."""
    if not 0 <= weight <= n_qubits:
        raise RegisterError(f"sector weight {weight} out of range for {n_qubits} qubits")
    states = sorted(sum(1 << q for q in ones) for ones in combinations(range(n_qubits), weight))
    arr = np.asarray(states, dtype=np.int64)
    arr.setflags(write=False)
    return ExcitationSector(
        n_qubits=n_qubits,
        weight=weight,
        states=arr,
        index_map={s: i for i, s in enumerate(states)},
    )


def enumerate_sectors(register: Register) -> List[ExcitationSector]:
    """Return the ``N + 1`` excitation sectors ordered by weight."""
    return [build_sector(register.n_qubits, k) for k in range(register.n_qubits + 1)]


def apply_flipflop(
    sector: ExcitationSector, i: int, j: int, phase: complex = 1.0
) -> sparse.csr_matrix:
    """Matrix of ``phase·σ+(i)σ-(j) + conj(phase)·σ-(i)σ+(j)`` inside ``sector``.

    Only pairs of states that differ by moving one excitation between
    qubits ``i`` and ``j`` are connected, so every row holds at most one
    non-zero entry.

    Raises:
        RegisterError: If ``i == j`` or either index is out of range.
    """
    n = sector.n_qubits
    for q in (i, j):
        if not 0 <= q < n:
            raise RegisterError(f"qubit index {q} out of range for {n} qubits")
    if i == j:
        raise RegisterError("flip-flop needs two distinct qubits")
    s = sector.states
    occ_i = (s >> i) & 1
    occ_j = (s >> j) & 1
    cols = np.flatnonzero(occ_i != occ_j)
    targets = s[cols] ^ ((1 << i) | (1 << j))
    rows = np.searchsorted(s, targets)
    # σ+(i)σ-(j) moves the excitation from j to i
    vals = np.where(occ_j[cols] == 1, phase, np.conj(phase)).astype(complex)
    size = sector.size
    return sparse.csr_matrix((vals, (rows, cols)), shape=(size, size))


def sigma_z_diagonal(sector: ExcitationSector, i: int, j: int) -> np.ndarray:
    """Diagonal of ``σz(i)σz(j)`` in ``sector`` (``σz = +1`` on an excited qubit)."""
    s = sector.states
    zi = np.where((s >> i) & 1, 1.0, -1.0)
    zj = np.where((s >> j) & 1, 1.0, -1.0)
    return zi * zj


__all__ = [
    "MAX_QUBITS",
    "Register",
    "RegisterError",
    "ExcitationSector",
    "basis_label",
    "build_sector",
    "enumerate_sectors",
    "apply_flipflop",
    "sigma_z_diagonal",
]
