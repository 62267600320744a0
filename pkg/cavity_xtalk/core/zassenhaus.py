"""Second-order Zassenhaus approximation of the cross-talk propagator.

.. math::

    U_Z = e^{-iθ H_S}\\, e^{-imθ H'}\\, e^{-m θ^2/2\\,[H_S, H']}

Each factor is exponentiated exactly per excitation sector, so ``U_Z`` is
unitary to round-off.  The commutator is anti-Hermitian; its exponential
is computed from the Hermitian generator ``i[H_S, H']``.

The per-pair closed forms (:func:`pair_exponential`,
:func:`commutator_closed_form`, :func:`commutator_exponential`) are
exact identities for a single pair or triple of qubits.  They are not
used to build ``U_Z`` because the pair terms of ``H'`` do not commute.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .hamiltonian import BlockOperator, CouplingConfig, build_hprime, build_hs
from .hilbert import Register, apply_flipflop, build_sector
from .propagator import PropagatorError, expm_block, ideal_iswap

logger = logging.getLogger(__name__)

ANTI_HERMITIAN_ATOL = 1e-12


def commutator(A: BlockOperator, B: BlockOperator) -> BlockOperator:
    return A.commutator(B)


def zassenhaus_unitary(config: CouplingConfig) -> BlockOperator:
    """``U_S · exp(-imθH') · exp(-mθ²/2 [H_S, H'])`` for ``θ = config.gate_time``."""
    register = config.register()
    theta = config.gate_time
    U_S = ideal_iswap(register, theta)
    if not config.m:
        return U_S

    hs = build_hs(register)
    hp = build_hprime(register, config.delta, theta, config.gamma)
    comm = commutator(hs, hp)
    residue = (comm + comm.dagger()).norm()
    if residue > ANTI_HERMITIAN_ATOL:
        raise PropagatorError(f"[H_S, H'] is not anti-Hermitian (residue {residue:.2e})")

    first = expm_block(hp, config.m * theta)
    # exp(-a C) = exp(-i (-a) (iC)) with iC Hermitian
    second = expm_block(1j * comm, -config.m * theta ** 2 / 2.0)
    U_Z = U_S @ first @ second
    logger.debug(f"Zassenhaus propagator N={config.n_qubits}: {U_Z.unitarity_error():.2e}")
    return U_Z


def _assemble(register: Register, block_fn) -> BlockOperator:
    blocks = []
    for k in range(register.n_qubits + 1):
        sector = build_sector(register.n_qubits, k)
        blocks.append(block_fn(sector))
    return BlockOperator(register.n_qubits, blocks)


def pair_flipflop(register: Register, i: int, j: int, phase: complex = 1.0) -> BlockOperator:
    """``H_ij = phase·σ+(i)σ-(j) + conj(phase)·σ-(i)σ+(j)`` on the whole register."""
    return _assemble(register, lambda s: apply_flipflop(s, i, j, phase).toarray())


def pair_exponential(
    register: Register, i: int, j: int, angle: float, phase: complex = 1.0
) -> BlockOperator:
    """``exp(-i·angle·H_ij) = 1 + (cos a - 1) H_ij² - i sin(a) H_ij``."""
    h = pair_flipflop(register, i, j, phase)
    return (
        BlockOperator.identity(register)
        + (math.cos(angle) - 1.0) * (h @ h)
        - 1j * math.sin(angle) * h
    )


def _sigma_z(sector, q: int) -> np.ndarray:
    return np.where((sector.states >> q) & 1, 1.0, -1.0)


def commutator_closed_form(register: Register, i: int, j: int, k: int) -> BlockOperator:
    """``[H_ij, H_jk] = (σ-(i)σ+(k) - σ+(i)σ-(k)) σz(j)`` at zero detuning."""
    if len({i, j, k}) != 3:
        raise ValueError("commutator closed form needs three distinct qubits")

    def block(sector):
        # i * (i σ+σ- - i σ-σ+) = σ-σ+ - σ+σ-
        g = 1j * apply_flipflop(sector, i, k, 1j).toarray()
        return g * _sigma_z(sector, j)[np.newaxis, :]

    return _assemble(register, block)


def commutator_exponential(
    register: Register, i: int, j: int, k: int, angle: float
) -> BlockOperator:
    """``exp(-a [H_ij, H_jk]) = 1 + (cos a - 1) H_ik² - sin(a) [H_ij, H_jk]``."""
    h_ik = pair_flipflop(register, i, k)
    comm = commutator_closed_form(register, i, j, k)
    return (
        BlockOperator.identity(register)
        + (math.cos(angle) - 1.0) * (h_ik @ h_ik)
        - math.sin(angle) * comm
    )


__all__ = [
    "commutator",
    "zassenhaus_unitary",
    "pair_flipflop",
    "pair_exponential",
    "commutator_closed_form",
    "commutator_exponential",
]
