"""Tests for the fidelity measures and the back-end dispatcher."""

import logging

import pytest
from prometheus_client import REGISTRY

from cavity_xtalk.core.fidelity import (
    FidelityReport,
    Method,
    ancilla_entanglement_fidelity,
    average_fidelity,
    entanglement_fidelity_trace,
    report,
)
from cavity_xtalk.core.hamiltonian import CouplingConfig
from cavity_xtalk.core.hilbert import Register, RegisterError
from cavity_xtalk.core.perturbation import ModelOutOfRangeError
from cavity_xtalk.core.propagator import exact_unitary, ideal_iswap
from cavity_xtalk.core.scaling import fit_linear, fit_power_law
from cavity_xtalk.core.sweep import CSV_COLUMNS


def _sample(name: str, labels=None) -> float:
    return REGISTRY.get_sample_value(name, labels or {}) or 0.0


def test_no_cross_talk_is_perfect() -> None:
    """Without cross-talk the exact gate is perfect."""
    rep = report(Method.EXACT, CouplingConfig(n_qubits=5, m=0.0))
    assert rep.entanglement_fidelity == pytest.approx(1.0, abs=1e-14)
    assert rep.error_rate == pytest.approx(0.0, abs=1e-14)


def test_seven_qubits_stay_within_budget() -> None:
    """At m=1e-2 the error crosses 1e-3 between seven and eight qubits."""
    seven = report("exact", CouplingConfig(n_qubits=7, m=1e-2))
    eight = report("exact", CouplingConfig(n_qubits=8, m=1e-2))
    assert seven.error_rate <= 1e-3
    assert eight.error_rate > 1e-3
    assert seven.error_rate == pytest.approx(9.92e-4, rel=1e-2)
    assert eight.error_rate == pytest.approx(1.195e-3, rel=1e-2)


def test_error_grows_linearly_with_idle_qubits() -> None:
    """Each idle qubit adds the same amount of infidelity."""
    infidelities = [
        1.0 - report("exact", CouplingConfig(n_qubits=n, m=5e-3)).entanglement_fidelity
        for n in (4, 6, 8)
    ]
    slope_1 = (infidelities[1] - infidelities[0]) / 2
    slope_2 = (infidelities[2] - infidelities[1]) / 2
    assert slope_1 == pytest.approx(slope_2, rel=1e-2)
    # two units of m² per idle qubit at the iSWAP time
    assert slope_1 == pytest.approx(2 * 5e-3 ** 2, rel=1e-2)


def test_perturbative_overestimates_exact_error() -> None:
    """The second-order series overshoots the exact error at N=4."""
    config = CouplingConfig(n_qubits=4, m=1e-2)
    exact = report(Method.EXACT, config)
    pert = report(Method.PERTURBATIVE, config)
    assert exact.error_rate == pytest.approx(3.765e-4, rel=1e-2)
    assert pert.error_rate == pytest.approx(4.666e-4, rel=1e-3)
    assert pert.error_rate > exact.error_rate


@pytest.mark.parametrize("n_qubits", [2, 3, 4])
def test_trace_formula_agrees_with_explicit_ancilla(n_qubits) -> None:
    """The trace formula equals the maximally entangled ancilla overlap."""
    config = CouplingConfig(n_qubits=n_qubits, m=0.1, delta=0.4, gate_time=1.2)
    U_p = exact_unitary(config)
    U_ref = ideal_iswap(config.register(), config.gate_time)
    assert entanglement_fidelity_trace(U_ref, U_p) == pytest.approx(
        ancilla_entanglement_fidelity(U_ref, U_p), abs=1e-12
    )


def test_ancilla_check_is_limited_to_small_registers() -> None:
    """The explicit ancilla construction refuses large registers."""
    U = ideal_iswap(Register(5))
    with pytest.raises(ValueError):
        ancilla_entanglement_fidelity(U, U)


def test_trace_fidelity_rejects_mismatched_registers() -> None:
    """Operators on different registers cannot be compared."""
    with pytest.raises(ValueError):
        entanglement_fidelity_trace(ideal_iswap(Register(3)), ideal_iswap(Register(4)))


def test_average_fidelity() -> None:
    """Average fidelity follows (dF_e + 1)/(d + 1)."""
    assert average_fidelity(1.0, 3) == 1.0
    assert average_fidelity(0.0, 2) == pytest.approx(1.0 / 5.0)
    assert average_fidelity(0.5, 1) == pytest.approx((2 * 0.5 + 1) / 3)
    # d = 2^4000 leaves F_e unchanged
    assert average_fidelity(0.9, 4000) == 0.9


def test_method_parsing() -> None:
    """Method names are parsed case-insensitively with aliases."""
    assert Method.parse("pert") is Method.PERTURBATIVE
    assert Method.parse(" Exact ") is Method.EXACT
    assert Method.parse(Method.MEANFIELD) is Method.MEANFIELD
    with pytest.raises(ValueError):
        Method.parse("magic")


def test_report_row_order_matches_csv_columns() -> None:
    """Report rows keep the CSV column order."""
    rep = report("pert", CouplingConfig(n_qubits=10, m=1e-2))
    assert isinstance(rep, FidelityReport)
    row = rep.to_dict()
    assert list(row) == CSV_COLUMNS
    assert row["method"] == "perturbative"
    assert row["n_idle"] == 8
    assert rep.dimension == 1024


def test_approximate_methods_warn_about_neglected_terms(caplog) -> None:
    """Approximate back-ends warn when idle-idle terms are set."""
    config = CouplingConfig(n_qubits=4, m=1e-2, m_tilde=1e-4)
    with caplog.at_level(logging.WARNING):
        report(Method.PERTURBATIVE, config)
    assert "neglected" in caplog.text


def test_exact_back_end_refuses_huge_registers() -> None:
    """Refused registers are counted as errors."""
    before = _sample("xtalk_errors_total")
    with pytest.raises(RegisterError):
        report(Method.EXACT, CouplingConfig(n_qubits=4000, m=1e-2))
    assert _sample("xtalk_errors_total") == before + 1


def test_out_of_range_is_counted() -> None:
    """Out-of-range series requests are counted."""
    before = _sample("xtalk_model_out_of_range_total")
    with pytest.raises(ModelOutOfRangeError):
        report(Method.PERTURBATIVE, CouplingConfig(n_qubits=4000, m=1e-2))
    assert _sample("xtalk_model_out_of_range_total") == before + 1


def test_evaluations_are_counted_per_method() -> None:
    """Each evaluation increments its method counter."""
    labels = {"method": "zassenhaus"}
    before = _sample("xtalk_fidelity_evaluations_total", labels)
    report(Method.ZASSENHAUS, CouplingConfig(n_qubits=3, m=1e-2))
    assert _sample("xtalk_fidelity_evaluations_total", labels) == before + 1


def test_perturbative_tracks_exact_better_than_zassenhaus() -> None:
    """The series stays closer to the exact error than the Zassenhaus product."""
    for n_qubits in range(4, 13):
        config = CouplingConfig(n_qubits=n_qubits, m=1e-2)
        exact = report(Method.EXACT, config).error_rate
        pert = report(Method.PERTURBATIVE, config).error_rate
        zass = report(Method.ZASSENHAUS, config).error_rate
        assert abs(pert - exact) < abs(zass - exact), n_qubits


def test_exact_error_scales_as_n_m_squared() -> None:
    """The exact error grows as m² and linearly in n."""
    m_values = [1e-3, 2e-3, 5e-3, 1e-2]
    errors = [report(Method.EXACT, CouplingConfig(n_qubits=6, m=m)).error_rate for m in m_values]
    assert fit_power_law(m_values, errors).slope == pytest.approx(2.0, abs=0.05)

    n_values = list(range(1, 11))
    errors = [
        report(Method.EXACT, CouplingConfig(n_qubits=n + 2, m=1e-3)).error_rate for n in n_values
    ]
    assert fit_linear(n_values, errors).r_squared > 0.999
