"""Shared fixtures: full-space Kronecker-product versions of the operators.

The dense matrices follow the package conventions: bit ``q`` of a basis
index is qubit ``q`` and ``σz = +1`` on an excited qubit.
"""

from functools import reduce

import numpy as np
import pytest

SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


class DenseOracle:
    """Reference operators on the full ``2^N`` space."""

    @staticmethod
    def embed(op: np.ndarray, q: int, n: int) -> np.ndarray:
        # qubit 0 is the least significant bit, i.e. the last Kronecker factor
        factors = [op if k == q else np.eye(2) for k in reversed(range(n))]
        return reduce(np.kron, factors)

    @classmethod
    def flipflop(cls, i: int, j: int, n: int, phase: complex = 1.0) -> np.ndarray:
        up_i, down_i = cls.embed(SIGMA_PLUS, i, n), cls.embed(SIGMA_MINUS, i, n)
        up_j, down_j = cls.embed(SIGMA_PLUS, j, n), cls.embed(SIGMA_MINUS, j, n)
        return phase * up_i @ down_j + np.conj(phase) * down_i @ up_j

    @classmethod
    def hs(cls, n: int) -> np.ndarray:
        return cls.flipflop(0, 1, n)

    @classmethod
    def hprime(cls, n: int, phase: complex = 1.0) -> np.ndarray:
        out = np.zeros((2 ** n, 2 ** n), dtype=complex)
        for i in (0, 1):
            for j in range(2, n):
                out += cls.flipflop(i, j, n, phase)
        return out

    @classmethod
    def htilde(cls, n: int) -> np.ndarray:
        out = np.zeros((2 ** n, 2 ** n), dtype=complex)
        for a in range(2, n):
            for b in range(a + 1, n):
                out += cls.flipflop(a, b, n)
        return out

    @classmethod
    def hzz(cls, n: int) -> np.ndarray:
        out = np.zeros((2 ** n, 2 ** n), dtype=complex)
        for a in range(2, n):
            for b in range(a + 1, n):
                out += cls.embed(SIGMA_Z, a, n) @ cls.embed(SIGMA_Z, b, n)
        return out


@pytest.fixture
def oracle() -> type:
    return DenseOracle


@pytest.fixture
def hardware_yaml(tmp_path):
    """Two active qubits and two weakly coupled idle ones, ``m = 1e-2``."""
    path = tmp_path / "hardware.yaml"
    path.write_text(
        "cavity_freq: 7.0\n"
        "qubits:\n"
        "  - {name: q0, omega: 5.0, g: 0.1, lambda: 0.0, mode: on}\n"
        "  - {name: q1, omega: 5.0, g: 0.1, lambda: 0.0, mode: on}\n"
        "  - {name: q2, omega: 5.0, g: 0.001, lambda: 0.0, mode: off}\n"
        "  - {name: q3, omega: 5.0, g: 0.001, lambda: 0.0, mode: off}\n",
        encoding="utf-8",
    )
    return path
