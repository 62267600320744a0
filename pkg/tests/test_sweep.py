"""Tests for parameter sweeps."""

import pandas as pd
import pytest

from cavity_xtalk.core.hamiltonian import CouplingConfig
from cavity_xtalk.core.sweep import (
    CSV_COLUMNS,
    WORKERS_ENV,
    normalize_variable,
    resolve_workers,
    run_sweep,
    sweep_configs,
)


def test_sweep_configs_replace_one_field() -> None:
    """Each sweep config differs from the base in one field."""
    base = CouplingConfig(n_qubits=3, m=1e-2, delta=0.2)
    configs = sweep_configs("n_qubits", [3.0, 4.0, 5.0], base)
    assert [c.n_qubits for c in configs] == [3, 4, 5]
    assert all(isinstance(c.n_qubits, int) for c in configs)
    assert all(c.delta == 0.2 for c in configs)
    gate_times = sweep_configs("gate-time", [0.5, 1.0], base)
    assert [c.gate_time for c in gate_times] == [0.5, 1.0]


def test_normalize_variable() -> None:
    """Sweep variable names are normalised and unknown ones refused."""
    assert normalize_variable("gate-time") == "gate_time"
    assert normalize_variable("m") == "m"
    with pytest.raises(ValueError):
        normalize_variable("delta")


def test_run_sweep_table_layout() -> None:
    """Sweep tables follow the CSV columns and canonical order."""
    configs = sweep_configs("n_qubits", [5, 3, 4], CouplingConfig(n_qubits=3, m=1e-2))
    df = run_sweep(configs, ["pert", "exact"], workers=1)
    assert list(df.columns) == CSV_COLUMNS
    assert df["method"].tolist() == ["exact"] * 3 + ["perturbative"] * 3
    assert df["n_qubits"].tolist() == [3, 4, 5, 3, 4, 5]
    assert (df["error_rate"] > 0).all()


def test_thread_pool_does_not_change_results() -> None:
    """Thread count does not change the sweep table."""
    configs = sweep_configs("m", [1e-3, 1e-2, 3e-2], CouplingConfig(n_qubits=5))
    serial = run_sweep(configs, ["exact", "zassenhaus"], workers=1)
    threaded = run_sweep(configs, ["exact", "zassenhaus"], workers=3)
    pd.testing.assert_frame_equal(serial, threaded)


def test_out_of_range_points_are_skipped(caplog) -> None:
    """Series points beyond the bound are skipped with a warning."""
    configs = sweep_configs("n_qubits", [3, 3990], CouplingConfig(n_qubits=3, m=1e-2))
    df = run_sweep(configs, ["perturbative"], workers=1)
    assert df["n_qubits"].tolist() == [3]
    assert "skipping" in caplog.text


def test_resolve_workers(monkeypatch) -> None:
    """Explicit workers win over XTALK_WORKERS; junk values fall back to one."""
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert resolve_workers() == 1
    assert resolve_workers(0) == 1
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert resolve_workers() == 3
    assert resolve_workers(2) == 2
    monkeypatch.setenv(WORKERS_ENV, "many")
    assert resolve_workers() == 1
