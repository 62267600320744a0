"""Tests for the cavity-mediated coupling formulas and hardware specs."""

import logging
import math

import pytest

from cavity_xtalk.core.dispersive import (
    DispersiveRegimeError,
    HardwareSpec,
    HardwareSpecError,
    Mode,
    PhysicalQubit,
    ResonanceError,
    check_dispersive,
    symmetric_gamma,
    eta,
    load_hardware_spec,
    pair_coupling,
    physical_gate_time,
    renormalized_frequency,
    to_coupling_config,
    zz_coefficient,
)


def _qubit(omega=5.0, g=0.1, lam=0.0, mode="off", name=None) -> PhysicalQubit:
    return PhysicalQubit(name=name, omega=omega, g=g, lam=lam, mode=mode)


def test_eta() -> None:
    """eta matches its closed form for a detuned qubit."""
    assert eta(_qubit(), 7.0) == pytest.approx(0.1 * 7.0 / 24.0)
    assert eta(_qubit(), 7.0) == pytest.approx(0.0291666, abs=1e-7)


def test_pair_coupling_is_minus_compact_expression() -> None:
    """pair_coupling equals minus the compact symmetric expression."""
    a, b = _qubit(omega=5.0, g=0.1), _qubit(omega=5.3, g=0.07)
    assert pair_coupling(a, b, 7.0) == pytest.approx(-symmetric_gamma(a, b, 7.0))


def test_symmetric_pair_coupling() -> None:
    """Identical qubits couple with 2g²ω_c/(ω_c² - ω²)."""
    g, w, wc = 0.1, 5.0, 7.0
    q = _qubit(omega=w, g=g)
    assert pair_coupling(q, q, wc) == pytest.approx(2 * g ** 2 * wc / (wc ** 2 - w ** 2))


def test_zz_coefficient() -> None:
    """The ZZ coefficient is 2λ²/ω and needs a non-zero frequency."""
    q = _qubit(omega=5.0, lam=0.02)
    assert zz_coefficient(q, q) == pytest.approx(2 * 0.02 ** 2 / 5.0)
    with pytest.raises(HardwareSpecError):
        zz_coefficient(q, _qubit(omega=0.0))


def test_renormalized_frequency() -> None:
    """Dispersive shifts renormalise the qubit frequency."""
    q = _qubit()
    assert renormalized_frequency(q, 7.0) == pytest.approx(5.0 - 2 * 0.1 * eta(q, 7.0))


def test_resonant_qubit_is_rejected() -> None:
    """A zero qubit-cavity detuning raises ResonanceError."""
    with pytest.raises(ResonanceError):
        eta(_qubit(omega=7.0), 7.0)


def test_dispersive_ratio_limits(caplog) -> None:
    """Large g/Δ ratios warn first and then fail."""
    assert check_dispersive(_qubit(g=0.1), 7.0) == pytest.approx(0.05)
    with caplog.at_level(logging.WARNING):
        check_dispersive(_qubit(g=0.4, name="q7"), 7.0)
    assert "q7" in caplog.text
    with pytest.raises(DispersiveRegimeError):
        check_dispersive(_qubit(g=1.2), 7.0)


def test_yaml_booleans_become_modes() -> None:
    """Bare on/off values in YAML map onto qubit modes."""
    assert PhysicalQubit(omega=5.0, g=0.1, mode=True).mode is Mode.ON
    assert PhysicalQubit(omega=5.0, g=0.1, mode=False).mode is Mode.OFF
    assert PhysicalQubit.model_validate({"omega": 5.0, "g": 0.1, "lambda": 0.3}).lam == 0.3


def test_coupling_config_from_hardware(hardware_yaml) -> None:
    """Hardware parameters reduce to m and m̃ relative to the active pair."""
    spec = load_hardware_spec(hardware_yaml)
    assert [q.mode for q in spec.qubits] == [Mode.ON, Mode.ON, Mode.OFF, Mode.OFF]
    config = to_coupling_config(spec)
    assert config.n_qubits == 4
    assert config.m == pytest.approx(1e-2)
    assert config.m_tilde == pytest.approx(1e-4)
    assert config.omega_tilde_coeff == 0.0
    gamma = abs(pair_coupling(spec.qubits[0], spec.qubits[1], 7.0))
    assert config.gamma == pytest.approx(gamma)
    # weaker idle coupling means a smaller dispersive shift
    assert config.delta < 0
    assert physical_gate_time(config) == pytest.approx(math.pi / 2 / gamma)


def test_gate_pair_must_be_two_qubits() -> None:
    """Exactly two qubits must be switched on."""
    spec = HardwareSpec(
        cavity_freq=7.0,
        qubits=[_qubit(mode="on"), _qubit(mode="off"), _qubit(mode="off")],
    )
    with pytest.raises(HardwareSpecError):
        to_coupling_config(spec)


def test_heterogeneous_idle_couplings_warn(caplog) -> None:
    """Unequal idle couplings are averaged with a warning."""
    spec = HardwareSpec(
        cavity_freq=7.0,
        qubits=[
            _qubit(mode="on"),
            _qubit(mode="on"),
            _qubit(g=0.001),
            _qubit(g=0.002),
        ],
    )
    with caplog.at_level(logging.WARNING):
        config = to_coupling_config(spec)
    assert "heterogeneous" in caplog.text
    assert config.m == pytest.approx(1.5e-2)


def test_invalid_yaml_reports_the_line(tmp_path) -> None:
    """Malformed YAML errors carry the offending line number."""
    path = tmp_path / "broken.yaml"
    path.write_text("cavity_freq: 7.0\nqubits: [\n  {omega: 5.0\n", encoding="utf-8")
    with pytest.raises(HardwareSpecError, match="line"):
        load_hardware_spec(path)


def test_schema_errors_are_wrapped(tmp_path) -> None:
    """Validation failures surface as HardwareSpecError."""
    path = tmp_path / "bad.yaml"
    path.write_text("cavity_freq: 7.0\nqubits:\n  - {g: 0.1}\n  - {g: 0.1}\n", encoding="utf-8")
    with pytest.raises(HardwareSpecError):
        load_hardware_spec(path)


def test_missing_spec_file(tmp_path) -> None:
    """A missing hardware file raises HardwareSpecError."""
    with pytest.raises(HardwareSpecError):
        load_hardware_spec(tmp_path / "absent.yaml")
