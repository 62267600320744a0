"""Gate fidelities of a perturbed propagator against the ideal gate.

For a unitary ``U_p`` the entanglement fidelity on a maximally entangled
register+ancilla state reduces to a trace::

    F_e = |Tr(U_ref† U_p)|² / d²,        d = 2^N

which is evaluated sector by sector, so the ``4^N`` dimensional ancilla
space is never built.  The average gate fidelity follows as
``(d F_e + 1) / (d + 1)`` and the error rate is ``1 - F``.

:func:`report` dispatches one parameter point to any of the four
back-ends and packages the result as a :class:`FidelityReport`:

.. code-block:: python

    from cavity_xtalk.core.fidelity import Method, report
    from cavity_xtalk.core.hamiltonian import CouplingConfig

    rep = report(Method.EXACT, CouplingConfig(n_qubits=7, m=1e-2))
    rep.error_rate   # ~9.9e-4

"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional, Union

import numpy as np

from . import monitoring
from .hamiltonian import BlockOperator, CouplingConfig
from .perturbation import ModelOutOfRangeError, perturbative_fe
from .propagator import exact_unitary, ideal_iswap
from .zassenhaus import zassenhaus_unitary

logger = logging.getLogger(__name__)

ANCILLA_MAX_QUBITS = 4
# beyond this 1/(2^N + 1) is below double precision
_LARGE_REGISTER = 1000


class Method(str, Enum):
    EXACT = "exact"
    PERTURBATIVE = "perturbative"
    ZASSENHAUS = "zassenhaus"
    MEANFIELD = "meanfield"

    @classmethod
    def parse(cls, value: Union[str, "Method"]) -> "Method":
        """Accept enum members, their values and the short alias ``pert``."""
        if isinstance(value, Method):
            return value
        key = str(value).strip().lower()
        if key == "pert":
            return cls.PERTURBATIVE
        try:
            return cls(key)
        except ValueError:
            raise ValueError(
                f"unknown method {value!r}; expected one of {[m.value for m in cls]}"
            ) from None


@dataclass(frozen=True)
class FidelityReport:
    """Fidelity figures of one parameter point.

    The field order is the column order of the sweep CSV.
    """

    method: Method
    n_qubits: int
    n_idle: int
    m: float
    gate_time: float
    entanglement_fidelity: float
    average_fidelity: float
    error_rate: float

    @property
    def dimension(self) -> int:
        return 1 << self.n_qubits

    def to_dict(self) -> Dict[str, Any]:
        row = asdict(self)
        row["method"] = self.method.value
        return row


def _inverse_dim_plus_one(n_qubits: int) -> float:
    if n_qubits >= _LARGE_REGISTER:
        return 0.0
    return 1.0 / ((1 << n_qubits) + 1)


def average_fidelity(fe: float, n_qubits: int) -> float:
    """``(d F_e + 1)/(d + 1)`` with ``d = 2^n_qubits``, safe for huge ``N``."""
    return fe + (1.0 - fe) * _inverse_dim_plus_one(n_qubits)


def make_report(method: Union[str, Method], config: CouplingConfig, fe: float) -> FidelityReport:
    """Package an entanglement fidelity as a :class:`FidelityReport`."""
    f_avg = average_fidelity(fe, int(config.n_qubits))
    return FidelityReport(
        method=Method.parse(method),
        n_qubits=int(config.n_qubits),
        n_idle=config.n_idle,
        m=float(config.m),
        gate_time=float(config.gate_time),
        entanglement_fidelity=float(fe),
        average_fidelity=float(f_avg),
        error_rate=float(1.0 - f_avg),
    )


def trace_overlap(U_ref: BlockOperator, U_p: BlockOperator) -> complex:
    """``Tr(U_ref† U_p)`` summed over sectors."""
    if U_ref.n_qubits != U_p.n_qubits:
        raise ValueError(
            f"operators act on {U_ref.n_qubits} and {U_p.n_qubits} qubits respectively"
        )
    return complex(sum(np.vdot(a, b) for a, b in zip(U_ref.blocks, U_p.blocks)))


def entanglement_fidelity_trace(U_ref: BlockOperator, U_p: BlockOperator) -> float:
    """``|Tr(U_ref† U_p)|² / 4^N`` evaluated blockwise.

    Args:
        U_ref: Reference gate, normally :func:`~cavity_xtalk.core.propagator.ideal_iswap`.
        U_p: Perturbed propagator on the same register.

    Raises:
        ValueError: If the operators act on different registers.
    """
    overlap = trace_overlap(U_ref, U_p)
    d = float(U_ref.dimension)
    return float(abs(overlap) ** 2 / (d * d))


def ancilla_entanglement_fidelity(U_ref: BlockOperator, U_p: BlockOperator) -> float:
    """Entanglement fidelity from the explicit register+ancilla state.

    Builds ``|ψ⟩ = Σ_a |a⟩|a⟩ / √d`` and evaluates
    ``|⟨ψ| (U_ref† U_p ⊗ 1) |ψ⟩|²``.  Only meant as a cross-check of
    :func:`entanglement_fidelity_trace` on small registers.
    """
    if U_ref.n_qubits > ANCILLA_MAX_QUBITS:
        raise ValueError(
            f"explicit ancilla construction is limited to {ANCILLA_MAX_QUBITS} qubits"
        )
    d = U_ref.dimension
    psi = np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)
    V = U_ref.to_dense().conj().T @ U_p.to_dense()
    amplitude = np.vdot(psi, np.kron(V, np.eye(d)) @ psi)
    return float(abs(amplitude) ** 2)


def _warn_neglected(method: Method, config: CouplingConfig) -> None:
    if config.m_tilde or config.omega_tilde_coeff:
        logger.warning(
            f"{method.value} back-end models H_S + m H' only; "
            f"m_tilde={config.m_tilde} and omega_tilde={config.omega_tilde_coeff} are neglected"
        )


def _evaluate(
    method: Method, config: CouplingConfig, workers: Optional[int], meanfield_settings
) -> FidelityReport:
    if method is Method.EXACT:
        U_p = exact_unitary(config, workers=workers)
        U_ref = ideal_iswap(config.register(), config.gate_time)
        return make_report(method, config, entanglement_fidelity_trace(U_ref, U_p))

    _warn_neglected(method, config)
    if method is Method.PERTURBATIVE:
        return make_report(method, config, perturbative_fe(config))
    if method is Method.ZASSENHAUS:
        U_z = zassenhaus_unitary(config)
        U_ref = ideal_iswap(config.register(), config.gate_time)
        return make_report(method, config, entanglement_fidelity_trace(U_ref, U_z))
    # meanfield builds its report through this module
    from .meanfield import meanfield_average

    return meanfield_average(config, meanfield_settings)


def report(
    method: Union[str, Method],
    config: CouplingConfig,
    workers: Optional[int] = None,
    meanfield_settings=None,
) -> FidelityReport:
    """Evaluate one parameter point with the chosen back-end.

    Args:
        method: ``exact``, ``perturbative`` (alias ``pert``), ``zassenhaus``
            or ``meanfield``.
        config: Parameter point.
        workers: Threads used over the excitation sectors by the exact
            back-end.
        meanfield_settings: Optional
            :class:`~cavity_xtalk.core.meanfield.MeanFieldSettings`.

    Raises:
        ModelOutOfRangeError: For the perturbative method beyond its
            validity bound.
    """
    method = Method.parse(method)
    start = time.perf_counter()
    try:
        result = _evaluate(method, config, workers, meanfield_settings)
    except ModelOutOfRangeError:
        monitoring.record_out_of_range()
        raise
    except Exception:
        monitoring.record_error()
        raise
    elapsed = time.perf_counter() - start
    monitoring.record_evaluation(method.value, elapsed)
    logger.info(
        f"{method.value}: N={config.n_qubits} m={config.m:g} "
        f"error_rate={result.error_rate:.6e} ({elapsed:.3f}s)"
    )
    return result


__all__ = [
    "Method",
    "FidelityReport",
    "average_fidelity",
    "make_report",
    "trace_overlap",
    "entanglement_fidelity_trace",
    "ancilla_entanglement_fidelity",
    "report",
]
