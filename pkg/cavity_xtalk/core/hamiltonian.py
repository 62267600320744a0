"""Effective qubit-only Hamiltonians of the cavity bus.

After the cavity is eliminated the register evolves under

.. math::

    H = γ (H_S + m H' + \\tilde m \\tilde H + \\tilde ω_c H_{zz})

where ``H_S`` is the flip-flop between the two active qubits, ``H'``
couples each active qubit to every idle one, ``H̃`` couples idle qubits to
each other and ``H_zz`` is their longitudinal coupling.  All energies are
expressed in units of ``γ``; only :mod:`cavity_xtalk.core.dispersive`
knows about physical frequencies.

Operators are stored as :class:`BlockOperator` objects, one dense block
per excitation sector.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.special import comb

from .hilbert import (
    ExcitationSector,
    Register,
    RegisterError,
    apply_flipflop,
    build_sector,
    sigma_z_diagonal,
)

logger = logging.getLogger(__name__)

ISWAP_TIME = math.pi / 2
DENSE_MAX_QUBITS = 10

Scalar = Union[int, float, complex]


@dataclass(frozen=True)
class CouplingConfig:
    """Dimensionless parameters of the effective Hamiltonian.

    Attributes:
        n_qubits: Total number of qubits ``N`` on the bus.
        m: ``γ'/γ``, active-idle coupling ratio.
        m_tilde: ``γ̃/γ``, idle-idle flip-flop ratio.
        omega_tilde_coeff: ``ω̃/γ``, idle-idle ``σzσz`` ratio.
        delta: ``Δ = ω_on - ω_off`` in the same angular units as ``gamma``.
        gate_time: Dimensionless gate time ``γ t_g``.
        gamma: Active-active coupling ``γ``; only converts ``Δ`` into the
            frozen rotating-frame phase ``Δ t_g``.
    """

    n_qubits: int
    m: float = 0.0
    m_tilde: float = 0.0
    omega_tilde_coeff: float = 0.0
    delta: float = 0.0
    gate_time: float = ISWAP_TIME
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 2:
            raise ValueError(f"n_qubits must be an integer >= 2, got {self.n_qubits}")
        if self.m < 0 or self.m_tilde < 0:
            raise ValueError("coupling ratios m and m_tilde must be non-negative")
        if not self.gate_time > 0:
            raise ValueError(f"gate_time must be positive, got {self.gate_time}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.m >= 1 or (self.m_tilde > 0 and self.m_tilde >= self.m):
            logger.warning(
                f"Coupling hierarchy γ ≫ γ' ≫ γ̃ violated "
                f"(m={self.m}, m_tilde={self.m_tilde}); approximate models may be unreliable"
            )

    @property
    def n_idle(self) -> int:
        return int(self.n_qubits) - 2

    @property
    def dimension(self) -> int:
        return 1 << int(self.n_qubits)

    @property
    def frame_phase(self) -> float:
        """Rotating-frame phase ``Δ t_g`` frozen into ``H'``."""
        return self.delta * self.gate_time / self.gamma

    def register(self) -> Register:
        return Register(int(self.n_qubits))

    def replace(self, **changes) -> "CouplingConfig":
        return replace(self, **changes)


class BlockOperator:
    """Operator stored as one dense block per excitation sector.

    Block ``k`` acts on the states of Hamming weight ``k`` in the order of
    :func:`cavity_xtalk.core.hilbert.build_sector`.  Instances are treated
    as immutable; the arrays are flagged read-only.
    """

    def __init__(self, n_qubits: int, blocks: Sequence[np.ndarray]) -> None:
        if len(blocks) != n_qubits + 1:
            raise ValueError(f"expected {n_qubits + 1} blocks, got {len(blocks)}")
        stored: List[np.ndarray] = []
        for k, block in enumerate(blocks):
            arr = np.array(block, dtype=complex)
            size = int(comb(n_qubits, k, exact=True))
            if arr.shape != (size, size):
                raise ValueError(f"block {k} has shape {arr.shape}, expected {(size, size)}")
            arr.setflags(write=False)
            stored.append(arr)
        self.n_qubits = n_qubits
        self.blocks: Tuple[np.ndarray, ...] = tuple(stored)
        self._eig_cache: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def zeros(cls, register: Register) -> "BlockOperator":
        n = register.n_qubits
        return cls(n, [np.zeros((s, s)) for s in _sector_sizes(n)])

    @classmethod
    def identity(cls, register: Register) -> "BlockOperator":
        n = register.n_qubits
        return cls(n, [np.eye(s) for s in _sector_sizes(n)])

    # ------------------------------------------------------------------
    # Algebra
    # ------------------------------------------------------------------
    @property
    def dimension(self) -> int:
        return 1 << self.n_qubits

    @property
    def sectors(self) -> List[Tuple[int, np.ndarray]]:
        return list(enumerate(self.blocks))

    def _check_compatible(self, other: "BlockOperator") -> None:
        if not isinstance(other, BlockOperator):
            raise TypeError(f"expected BlockOperator, got {type(other).__name__}")
        if other.n_qubits != self.n_qubits:
            raise ValueError(
                f"operators act on {self.n_qubits} and {other.n_qubits} qubits respectively"
            )

    def _map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "BlockOperator":
        return BlockOperator(self.n_qubits, [fn(b) for b in self.blocks])

    def _zip(self, other: "BlockOperator", fn) -> "BlockOperator":
        self._check_compatible(other)
        return BlockOperator(self.n_qubits, [fn(a, b) for a, b in zip(self.blocks, other.blocks)])

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        return self._zip(other, np.add)

    def __sub__(self, other: "BlockOperator") -> "BlockOperator":
        return self._zip(other, np.subtract)

    def __neg__(self) -> "BlockOperator":
        return self._map(np.negative)

    def __mul__(self, scalar: Scalar) -> "BlockOperator":
        if isinstance(scalar, BlockOperator):
            raise TypeError("use @ for operator products")
        return self._map(lambda b: scalar * b)

    __rmul__ = __mul__

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        return self._zip(other, np.matmul)

    def dagger(self) -> "BlockOperator":
        return self._map(lambda b: b.conj().T)

    def commutator(self, other: "BlockOperator") -> "BlockOperator":
        return self @ other - other @ self

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks))

    def norm(self) -> float:
        """Largest entry magnitude over all blocks."""
        return max((float(np.abs(b).max()) for b in self.blocks if b.size), default=0.0)

    def allclose(self, other: "BlockOperator", atol: float = 1e-12) -> bool:
        self._check_compatible(other)
        return all(
            np.allclose(a, b, rtol=0.0, atol=atol) for a, b in zip(self.blocks, other.blocks)
        )

    def hermiticity_error(self) -> float:
        return max(float(np.abs(b - b.conj().T).max()) if b.size else 0.0 for b in self.blocks)

    def unitarity_error(self) -> float:
        return max(
            float(np.abs(b.conj().T @ b - np.eye(b.shape[0])).max()) for b in self.blocks
        )

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return self.hermiticity_error() <= atol

    def is_unitary(self, atol: float = 1e-12) -> bool:
        return self.unitarity_error() <= atol

    def eigensystem(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """Cached ``eigh`` of block ``k``; the caller guarantees Hermiticity."""
        if k not in self._eig_cache:
            w, v = linalg.eigh(self.blocks[k])
            w.setflags(write=False)
            v.setflags(write=False)
            self._eig_cache[k] = (w, v)
        return self._eig_cache[k]

    def to_dense(self) -> np.ndarray:
        """Full ``2^N × 2^N`` matrix in integer basis order."""
        if self.n_qubits > DENSE_MAX_QUBITS:
            raise RegisterError(
                f"dense form is limited to {DENSE_MAX_QUBITS} qubits, got {self.n_qubits}"
            )
        out = np.zeros((self.dimension, self.dimension), dtype=complex)
        for k, block in enumerate(self.blocks):
            idx = build_sector(self.n_qubits, k).states
            out[np.ix_(idx, idx)] = block
        return out

    def __repr__(self) -> str:
        return f"BlockOperator(n_qubits={self.n_qubits}, sizes={[b.shape[0] for b in self.blocks]})"


def _sector_sizes(n_qubits: int) -> List[int]:
    return [int(comb(n_qubits, k, exact=True)) for k in range(n_qubits + 1)]


def _assemble(
    register: Register, fill: Callable[[ExcitationSector], Iterable[np.ndarray]]
) -> BlockOperator:
    blocks = []
    for k in range(register.n_qubits + 1):
        sector = build_sector(register.n_qubits, k)
        block = np.zeros((sector.size, sector.size), dtype=complex)
        for term in fill(sector):
            block += term.toarray() if hasattr(term, "toarray") else term
        blocks.append(block)
    return BlockOperator(register.n_qubits, blocks)


def build_hs(register: Register) -> BlockOperator:
    """Flip-flop between the two active qubits."""
    i, j = register.active_indices
    return _assemble(register, lambda sector: [apply_flipflop(sector, i, j)])


def build_hprime(
    register: Register, delta: float = 0.0, gate_time: float = ISWAP_TIME, gamma: float = 1.0
) -> BlockOperator:
    """Active-idle flip-flops dressed with the frozen frame phase ``e^{±iΔt_g}``.

    The ``σ-(i)σ+(j)`` term of active qubit ``i`` and idle qubit ``j``
    carries ``e^{iΔt_g}``.  Zero operator when the register has no idle
    qubit.
    """
    phase = np.exp(-1j * delta * gate_time / gamma)

    def fill(sector: ExcitationSector):
        return [
            apply_flipflop(sector, i, j, phase)
            for i in register.active_indices
            for j in register.idle_indices
        ]

    return _assemble(register, fill)


def _idle_pairs(register: Register) -> List[Tuple[int, int]]:
    idle = register.idle_indices
    return [(a, b) for n, a in enumerate(idle) for b in idle[n + 1:]]


def build_htilde(register: Register) -> BlockOperator:
    """Idle-idle flip-flops; zero with fewer than two idle qubits."""
    pairs = _idle_pairs(register)
    return _assemble(register, lambda sector: [apply_flipflop(sector, i, j) for i, j in pairs])


def build_hzz(register: Register) -> BlockOperator:
    """``Σ σz(i)σz(j)`` over idle pairs, diagonal in the computational basis."""
    pairs = _idle_pairs(register)
    return _assemble(
        register, lambda sector: [np.diag(sigma_z_diagonal(sector, i, j)) for i, j in pairs]
    )


def build_total(config: CouplingConfig) -> BlockOperator:
    """``H_S + m H' + m̃ H̃ + ω̃ H_zz`` in units of ``γ``."""
    register = config.register()
    total = build_hs(register)
    if config.m:
        total = total + config.m * build_hprime(
            register, config.delta, config.gate_time, config.gamma
        )
    if config.m_tilde:
        total = total + config.m_tilde * build_htilde(register)
    if config.omega_tilde_coeff:
        total = total + config.omega_tilde_coeff * build_hzz(register)
    logger.debug(f"Assembled H for N={config.n_qubits}, m={config.m}: {total!r}")
    return total


__all__ = [
    "ISWAP_TIME",
    "CouplingConfig",
    "BlockOperator",
    "build_hs",
    "build_hprime",
    "build_htilde",
    "build_hzz",
    "build_total",
]
