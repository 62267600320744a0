"""Second-order perturbative fidelity of the iSWAP under cross-talk.

Expanding ``exp(-iθ(H_S + mH'))`` to second order in ``m`` gives::

    U_p ≈ U_S + m (e^{-iθ} - 1) H' + m² (α H_S + β) H'²

and an entanglement fidelity depending on the gate time only through two
real numbers ``x`` and ``y``::

    F_e ≈ 1 - x n m² + (x² + y²) n² m⁴ / 4

The series is trusted up to its minimum at ``n m² = 2x / (x² + y²)``
(about 0.39 for the iSWAP); beyond it :func:`perturbative_fe` raises
:class:`ModelOutOfRangeError`.

The coefficients are evaluated literally, finite polynomial tails
included, which is what reproduces ``x ≈ 2.47`` at ``θ = π/2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .hamiltonian import ISWAP_TIME, BlockOperator, CouplingConfig, build_hprime, build_hs
from .propagator import ideal_iswap

logger = logging.getLogger(__name__)


class ModelOutOfRangeError(ValueError):
    """Raised when ``n m²`` lies beyond the validity bound of the series."""


@dataclass(frozen=True)
class PerturbationCoefficients:
    gate_time: float
    c1: complex
    c2: complex
    c3: complex
    c4: complex
    c5: complex
    alpha: complex
    beta: complex
    x: float
    y: float

    @property
    def validity_bound(self) -> float:
        """``2x / (x² + y²)``, the ``n m²`` at which the series turns over."""
        norm = self.x ** 2 + self.y ** 2
        if norm == 0.0:
            return math.inf
        return 2.0 * self.x / norm


def coefficients(gate_time: float = ISWAP_TIME) -> PerturbationCoefficients:
    """Evaluate ``c1 … c5``, ``α``, ``β``, ``x`` and ``y`` at ``γ t_g``."""
    if gate_time < 0:
        raise ValueError(f"gate_time must be non-negative, got {gate_time}")
    t = float(gate_time)
    cos, sin = math.cos(t), math.sin(t)
    f = math.factorial

    c1 = cos - 1 + t ** 2 / 2 - t ** 4 / f(4)
    c2 = 1j * (-sin + t - t ** 3 / f(3) + t ** 5 / f(5))
    c3 = 2 - 2 * cos - t / 2 * sin - t ** 2 / 2 + t ** 6 / f(6)
    c4 = 1 - cos - t / 2 * sin - t ** 4 / f(4) + 2 * t ** 6 / f(6)
    c5 = 1j * (-t - t / 2 * cos + 1.5 * sin + t ** 5 / f(5) - 2 * t ** 7 / f(7))

    x = (
        1 - cos - sin + t * cos + t ** 2 / 2 + 2 * t ** 3 / f(3) + t ** 4 / f(4)
        - 4 * t ** 5 / f(5) + 4 * t ** 7 / f(7)
    )
    y = (
        1 - cos + sin - t - t * sin - t ** 2 / 2 + t ** 3 / f(3) - 3 * t ** 4 / f(4)
        - t ** 5 / f(5) + 3 * t ** 6 / f(6)
    )
    return PerturbationCoefficients(
        gate_time=t,
        c1=complex(c1),
        c2=c2,
        c3=complex(c3),
        c4=complex(c4),
        c5=c5,
        alpha=c1 + c2 + c3 + c4 + 2 * c5,
        beta=c1 + c2 - t ** 2,
        x=float(x),
        y=float(y),
    )


def validity_bound(gate_time: float = ISWAP_TIME) -> float:
    return coefficients(gate_time).validity_bound


def max_valid_idle(m: float, gate_time: float = ISWAP_TIME) -> int:
    """Largest idle-qubit count the series accepts at coupling ratio ``m``."""
    if m <= 0:
        raise ValueError(f"m must be positive, got {m}")
    return int(math.floor(validity_bound(gate_time) / m ** 2))


def fidelity_series(coeffs: PerturbationCoefficients, n_idle: float, m: float) -> float:
    """``1 - x n m² + (x² + y²) n² m⁴ / 4`` without any range check."""
    u = n_idle * m ** 2
    return 1.0 - coeffs.x * u + (coeffs.x ** 2 + coeffs.y ** 2) * u ** 2 / 4.0


def perturbative_fe(config: CouplingConfig) -> float:
    """Entanglement fidelity of the second-order series.

    The series does not depend on ``Δ``; only ``n``, ``m`` and the gate
    time enter.

    Raises:
        ModelOutOfRangeError: If ``n m²`` exceeds :func:`validity_bound`.
    """
    coeffs = coefficients(config.gate_time)
    load = config.n_idle * config.m ** 2
    bound = coeffs.validity_bound
    if load > bound:
        raise ModelOutOfRangeError(
            f"n*m^2 = {load:.4g} exceeds the perturbative validity bound {bound:.4g} "
            f"(n <= {int(bound / config.m ** 2)} at m={config.m:g})"
        )
    return fidelity_series(coeffs, config.n_idle, config.m)


def perturbative_unitary(config: CouplingConfig) -> BlockOperator:
    """Second-order operator ``U_S + m L1 + m² L2``; not unitary."""
    register = config.register()
    theta = config.gate_time
    coeffs = coefficients(theta)
    U_S = ideal_iswap(register, theta)
    if not config.m:
        return U_S
    hs = build_hs(register)
    hp = build_hprime(register, config.delta, theta, config.gamma)
    first = (np.exp(-1j * theta) - 1.0) * hp
    second = (coeffs.alpha * hs + coeffs.beta * BlockOperator.identity(register)) @ (hp @ hp)
    return U_S + config.m * first + config.m ** 2 * second


def operator_fe(coeffs: PerturbationCoefficients, n_idle: float, m: float) -> float:
    """Trace fidelity of :func:`perturbative_unitary` in closed form.

    ``|1 + m² (n/2) z|²`` with ``z = α e^{iθ} + β (1 + e^{iθ})``; the first
    order term drops out of the trace.
    """
    phase = np.exp(1j * coeffs.gate_time)
    z = coeffs.alpha * phase + coeffs.beta * (1.0 + phase)
    return float(abs(1.0 + m ** 2 * n_idle / 2.0 * z) ** 2)


__all__ = [
    "ModelOutOfRangeError",
    "PerturbationCoefficients",
    "coefficients",
    "validity_bound",
    "max_valid_idle",
    "fidelity_series",
    "perturbative_fe",
    "perturbative_unitary",
    "operator_fe",
]
