"""Parameter sweeps over the fidelity back-ends.

A sweep varies one field of a :class:`CouplingConfig` (``n_qubits``,
``m`` or ``gate_time``) and evaluates every requested method at every
point.  Points can run on a thread pool whose size comes from the
``XTALK_WORKERS`` environment variable; the rows are re-sorted into a
canonical order afterwards, so the table does not depend on scheduling.

Example:

.. code-block:: python

    from cavity_xtalk.core.hamiltonian import CouplingConfig
    from cavity_xtalk.core.sweep import run_sweep, sweep_configs

    configs = sweep_configs("n_qubits", range(3, 13), CouplingConfig(n_qubits=3, m=1e-2))
    df = run_sweep(configs, ["exact", "perturbative"])
    df.to_csv("idle_sweep.csv", index=False)

"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from .fidelity import FidelityReport, Method, report
from .hamiltonian import CouplingConfig
from .perturbation import ModelOutOfRangeError

logger = logging.getLogger(__name__)

WORKERS_ENV = "XTALK_WORKERS"
SWEEP_VARIABLES = ("n_qubits", "m", "gate_time")
CSV_COLUMNS = [
    "method",
    "n_qubits",
    "n_idle",
    "m",
    "gate_time",
    "entanglement_fidelity",
    "average_fidelity",
    "error_rate",
]


def normalize_variable(variable: str) -> str:
    """Map CLI spellings such as ``gate-time`` onto config field names."""
    name = variable.strip().replace("-", "_")
    if name not in SWEEP_VARIABLES:
        raise ValueError(f"cannot sweep {variable!r}; choose one of {SWEEP_VARIABLES}")
    return name


def resolve_workers(workers: Optional[int] = None) -> int:
    """Explicit value, else ``XTALK_WORKERS``, else 1."""
    if workers is None:
        try:
            workers = int(os.getenv(WORKERS_ENV, "1"))
        except ValueError:
            logger.warning(f"ignoring non-integer {WORKERS_ENV}={os.getenv(WORKERS_ENV)!r}")
            workers = 1
    return max(1, int(workers))


def sweep_configs(
    variable: str, values: Iterable[Union[int, float]], base: CouplingConfig
) -> List[CouplingConfig]:
    """One config per value, with ``variable`` replaced in ``base``."""
    name = normalize_variable(variable)
    cast = int if name == "n_qubits" else float
    return [base.replace(**{name: cast(v)}) for v in values]


def _evaluate_point(
    method: Method, config: CouplingConfig, meanfield_settings
) -> Optional[FidelityReport]:
    try:
        return report(method, config, meanfield_settings=meanfield_settings)
    except ModelOutOfRangeError as exc:
        logger.warning(f"skipping {method.value} at N={config.n_qubits}, m={config.m:g}: {exc}")
        return None


def run_sweep(
    configs: Sequence[CouplingConfig],
    methods: Iterable[Union[str, Method]],
    workers: Optional[int] = None,
    meanfield_settings=None,
) -> pd.DataFrame:
    """Evaluate every method at every config.

    Perturbative points beyond the validity bound are skipped with a
    warning; any other failure propagates.

    Args:
        configs: Parameter points, typically from :func:`sweep_configs`.
        methods: Back-ends to run.
        workers: Thread count.  ``None`` reads ``XTALK_WORKERS``.
        meanfield_settings: Forwarded to the mean-field back-end.

    Returns:
        A DataFrame with :data:`CSV_COLUMNS`, sorted by method and then by
        ``n_qubits``, ``m`` and ``gate_time``.
    """
    parsed = [Method.parse(m) for m in methods]
    tasks: List[Tuple[Method, CouplingConfig]] = [(m, c) for m in parsed for c in configs]
    n_workers = min(resolve_workers(workers), max(1, len(tasks)))
    logger.info(f"Sweeping {len(tasks)} points on {n_workers} worker(s)")

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as executor:
            futures = [
                executor.submit(_evaluate_point, m, c, meanfield_settings) for m, c in tasks
            ]
            results = [fut.result() for fut in futures]
    else:
        results = [_evaluate_point(m, c, meanfield_settings) for m, c in tasks]

    rows = [r.to_dict() for r in results if r is not None]
    df = pd.DataFrame(rows, columns=CSV_COLUMNS)
    return df.sort_values(
        ["method", "n_qubits", "m", "gate_time"], kind="mergesort"
    ).reset_index(drop=True)


__all__ = [
    "WORKERS_ENV",
    "SWEEP_VARIABLES",
    "CSV_COLUMNS",
    "normalize_variable",
    "resolve_workers",
    "sweep_configs",
    "run_sweep",
]
