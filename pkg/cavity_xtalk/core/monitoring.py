"""Prometheus monitoring utilities.

Global counters track how many fidelity evaluations each back-end ran,
how often the perturbative model was asked for a point outside its
validity region and how many evaluations failed.  A histogram records
the evaluation wall time per method.  The HTTP endpoint is only started
when the CLI finds ``XTALK_PROM_PORT`` in the environment.
"""

from __future__ import annotations

import os
from prometheus_client import start_http_server, Counter, Histogram, CollectorRegistry
try:
    from prometheus_client import multiprocess
except Exception:
    multiprocess = None

PORT_ENV = 'XTALK_PROM_PORT'

fidelity_evaluations_total = Counter(
    'xtalk_fidelity_evaluations_total', 'Fidelity evaluations per back-end', ['method']
)
model_out_of_range_total = Counter(
    'xtalk_model_out_of_range_total', 'Perturbative evaluations rejected by the validity bound'
)
error_counter = Counter('xtalk_errors_total', 'Total number of failed evaluations')
evaluation_seconds = Histogram(
    'xtalk_evaluation_seconds', 'Wall time of one fidelity evaluation', ['method']
)


def init_prometheus_server(port: int = 8001) -> None:
    """Start an HTTP server exposing the metrics.

    Multiprocess mode is enabled when ``PROMETHEUS_MULTIPROC_DIR`` is set.

    Args:
        port: Port on which to expose the metrics endpoint.
    """
    if multiprocess and os.environ.get('PROMETHEUS_MULTIPROC_DIR'):
        registry = CollectorRegistry()
        multiprocess.MultiProcessCollector(registry)
        start_http_server(port, registry=registry)
    else:
        start_http_server(port)


def maybe_start_from_env() -> bool:
    """Start the server if :data:`PORT_ENV` is set; return whether it was."""
    port = os.environ.get(PORT_ENV)
    if not port:
        return False
    init_prometheus_server(int(port))
    return True


def record_evaluation(method: str, seconds: float) -> None:
    fidelity_evaluations_total.labels(method=method).inc()
    evaluation_seconds.labels(method=method).observe(seconds)


def record_out_of_range() -> None:
    model_out_of_range_total.inc()


def record_error() -> None:
    """Increment the error counter."""
    error_counter.inc()


__all__ = [
    'init_prometheus_server', 'maybe_start_from_env', 'record_evaluation',
    'record_out_of_range', 'record_error',
]
