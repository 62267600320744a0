"""Tests for the sector-wise matrix exponential."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from cavity_xtalk.core.hamiltonian import CouplingConfig, build_hs, build_total
from cavity_xtalk.core.hilbert import Register
from cavity_xtalk.core.propagator import (
    PropagatorError,
    exact_unitary,
    expm_block,
    ideal_iswap,
)


def test_expm_block_matches_dense_expm() -> None:
    """The block exponential matches scipy's expm."""
    config = CouplingConfig(
        n_qubits=4, m=0.08, m_tilde=0.01, omega_tilde_coeff=0.005, delta=0.3, gate_time=1.3
    )
    H = build_total(config)
    U = expm_block(H, config.gate_time)
    expected = expm(-1j * config.gate_time * H.to_dense())
    np.testing.assert_allclose(U.to_dense(), expected, atol=1e-12)


def test_exact_unitary_is_unitary() -> None:
    """The exact propagator is unitary."""
    U = exact_unitary(CouplingConfig(n_qubits=8, m=0.02, delta=0.1))
    assert U.is_unitary(atol=1e-12)


def test_threaded_sectors_give_same_result() -> None:
    """Threaded sectors reproduce the serial result."""
    config = CouplingConfig(n_qubits=7, m=0.03)
    serial = exact_unitary(config)
    threaded = exact_unitary(config, workers=4)
    assert serial.allclose(threaded, atol=1e-14)


def test_ideal_iswap_action() -> None:
    """The iSWAP swaps the active pair with a -i phase."""
    U = ideal_iswap(Register(3)).to_dense()
    # state 1: qubit 0 excited, state 2: qubit 1 excited
    assert U[2, 1] == pytest.approx(-1j)
    assert U[1, 2] == pytest.approx(-1j)
    assert U[0, 0] == pytest.approx(1.0)
    assert U[3, 3] == pytest.approx(1.0)
    # idle qubit 2 is a spectator
    assert U[2 | 4, 1 | 4] == pytest.approx(-1j)
    assert U[4, 4] == pytest.approx(1.0)


def test_ideal_iswap_two_qubit_matrix() -> None:
    """On two qubits the gate is the textbook iSWAP matrix."""
    expected = np.array(
        [[1, 0, 0, 0], [0, 0, -1j, 0], [0, -1j, 0, 0], [0, 0, 0, 1]], dtype=complex
    )
    np.testing.assert_allclose(ideal_iswap(Register(2)).to_dense(), expected, atol=1e-15)


def test_eigensystem_is_cached() -> None:
    """Repeated exponentials reuse the cached eigensystem."""
    H = build_hs(Register(4))
    first = H.eigensystem(2)
    expm_block(H, 0.7)
    assert H.eigensystem(2) is first


def test_non_hermitian_generator_is_rejected() -> None:
    """Non-Hermitian generators raise PropagatorError."""
    with pytest.raises(PropagatorError, match="sector"):
        expm_block(1j * build_hs(Register(3)), 1.0)


def test_non_finite_angle_is_rejected() -> None:
    """A NaN angle raises PropagatorError."""
    with pytest.raises(PropagatorError):
        expm_block(build_hs(Register(3)), math.nan)


@pytest.mark.parametrize("n_qubits", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("m", [0.0, 1e-2, 1e-1])
def test_block_propagator_matches_full_space_oracle(n_qubits, m) -> None:
    """Block propagators match full-space exponentials."""
    config = CouplingConfig(n_qubits=n_qubits, m=m)
    H = build_total(config).to_dense()
    expected = expm(-1j * config.gate_time * H)
    np.testing.assert_allclose(exact_unitary(config).to_dense(), expected, atol=1e-10)


@pytest.mark.parametrize("gate_time", [0.0, 0.4, math.pi / 2, 2.9, -1.3])
def test_closed_form_gate_matches_eigendecomposition(gate_time) -> None:
    """The trigonometric form of exp(-iθH_S) equals the diagonalised one."""
    register = Register(6)
    expected = expm_block(build_hs(register), gate_time)
    assert ideal_iswap(register, gate_time).allclose(expected, atol=1e-13)
    assert ideal_iswap(register, gate_time).is_unitary(atol=1e-13)


def test_reference_gate_rejects_non_finite_time() -> None:
    """A NaN gate time cannot build the reference gate."""
    with pytest.raises(PropagatorError):
        ideal_iswap(Register(3), math.nan)


@pytest.mark.parametrize("n_qubits", [2, 4, 7])
def test_two_iswaps_compose_to_a_half_period(n_qubits) -> None:
    """exp(-iπ/2 H_S)² equals exp(-iπ H_S)."""
    hs = build_hs(Register(n_qubits))
    quarter = expm_block(hs, math.pi / 2)
    assert (quarter @ quarter).allclose(expm_block(hs, math.pi), atol=1e-13)
