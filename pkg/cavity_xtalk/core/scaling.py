"""Maximum number of idle qubits for an error budget.

To leading order the error rate of an ``N = n + 2`` qubit register is
``x m² · 2^N n / (2^N + 1)``.  Setting it equal to ``E_thr`` and writing
``K = E_thr / (x m²)`` gives::

    n / (1 + 2^{-(n+2)}) = K

whose solution is expressed through the principal Lambert branch::

    n = ⌊K + W0(K ln2 / 4 · 2^{-K}) / ln2⌋

:func:`max_idle_qubits` reports that closed form together with the
largest integer satisfying the inequality directly and the real root of
the equation.

Example:

.. code-block:: python

    from cavity_xtalk.core.scaling import max_idle_qubits

    max_idle_qubits(1e-2, 1e-3).n_closed_form   # 4, i.e. N = 6

"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import optimize, special, stats

from .hamiltonian import ISWAP_TIME
from .perturbation import coefficients

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
DEFAULT_E_THR = 1e-3
# rounded iSWAP value of the leading coefficient used for connectivity limits
ISWAP_X = 2.47
_BRANCH_POINT = -math.exp(-1.0)


class LambertDomainError(ValueError):
    """Raised for arguments below ``-1/e``, where ``W0`` is not real."""


def lambert_w0(z: float, tol: float = 1e-15, max_steps: int = 20) -> float:
    """Principal branch of the Lambert W function for real ``z >= -1/e``.

    The scipy value seeds a Halley iteration on ``w e^w - z``.

    Raises:
        LambertDomainError: If ``z < -1/e``.
    """
    z = float(z)
    if z < _BRANCH_POINT:
        raise LambertDomainError(f"W0 is not real for z = {z} < -1/e")
    if z == 0.0:
        return 0.0
    w = float(special.lambertw(z, 0).real)
    for _ in range(max_steps):
        ew = math.exp(w)
        f = w * ew - z
        if abs(f) <= tol * max(1.0, abs(z)) or w == -1.0:
            break
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        if denom == 0.0:
            break
        w -= f / denom
    return w


@dataclass(frozen=True)
class ScalingSolution:
    m: float
    e_thr: float
    n_closed_form: int
    n_numeric: int
    x_used: float
    real_valued_n: float

    @property
    def n_qubits(self) -> int:
        return self.n_closed_form + 2

    def to_dict(self) -> dict:
        return asdict(self)


def _budget(m: float, e_thr: float, x: float) -> float:
    if m <= 0:
        raise ValueError(f"m must be positive, got {m}")
    if not 0 < e_thr < 1:
        raise ValueError(f"e_thr must lie in (0, 1), got {e_thr}")
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    return e_thr / (x * m ** 2)


def _load(n: float) -> float:
    """``2^N n / (2^N + 1)`` with ``N = n + 2``, overflow-free."""
    return n / (1.0 + np.exp2(-(n + 2.0)))


def _resolve_x(x: Optional[float], gate_time: float) -> float:
    if x is not None:
        return float(x)
    if math.isclose(gate_time, ISWAP_TIME, rel_tol=1e-12):
        return ISWAP_X
    return coefficients(gate_time).x


def closed_form_idle(k: float) -> float:
    """Un-floored Lambert-W expression for budget ``K``."""
    arg = k * LN2 / 4.0 * np.exp2(-k)
    return k + lambert_w0(arg) / LN2


def real_valued_idle(k: float) -> float:
    """Real root of ``n / (1 + 2^{-(n+2)}) = K``."""
    return float(optimize.brentq(lambda n: _load(n) - k, 0.0, k + 1.0, xtol=1e-14, rtol=1e-14))


def numeric_idle(k: float) -> int:
    """Largest integer ``n >= 0`` with ``n / (1 + 2^{-(n+2)}) <= K``."""
    n = int(math.floor(real_valued_idle(k)))
    while _load(n + 1) <= k:
        n += 1
    while n > 0 and _load(n) > k:
        n -= 1
    return n


def max_idle_qubits(
    m: float,
    e_thr: float = DEFAULT_E_THR,
    x: Optional[float] = None,
    gate_time: float = ISWAP_TIME,
) -> ScalingSolution:
    """Largest idle-qubit count keeping the error rate below ``e_thr``.

    Args:
        m: Coupling ratio ``γ'/γ``.
        e_thr: Error threshold in ``(0, 1)``.
        x: Leading infidelity coefficient.  Defaults to :data:`ISWAP_X`
            at the iSWAP time and to the perturbative ``x`` otherwise.
        gate_time: Used only when ``x`` is not given.
    """
    x_used = _resolve_x(x, gate_time)
    k = _budget(m, e_thr, x_used)
    closed = max(0, int(math.floor(closed_form_idle(k))))
    solution = ScalingSolution(
        m=float(m),
        e_thr=float(e_thr),
        n_closed_form=closed,
        n_numeric=numeric_idle(k),
        x_used=x_used,
        real_valued_n=real_valued_idle(k),
    )
    if solution.n_closed_form != solution.n_numeric:
        logger.warning(
            f"closed form ({solution.n_closed_form}) and numeric ({solution.n_numeric}) "
            f"idle counts differ at m={m:g}"
        )
    return solution


def asymptotic_idle_qubits(
    m: float, e_thr: float = DEFAULT_E_THR, x: Optional[float] = None,
    gate_time: float = ISWAP_TIME,
) -> float:
    """Small-``m`` expansion ``K + K/4 · 2^{-K}``, not floored."""
    k = _budget(m, e_thr, _resolve_x(x, gate_time))
    return float(k + k / 4.0 * np.exp2(-k))


SCALING_COLUMNS = ["m", "e_thr", "n_closed_form", "n_numeric", "real_valued_n"]


def scaling_table(
    m_values: Iterable[float],
    e_thr: float = DEFAULT_E_THR,
    x: Optional[float] = None,
    gate_time: float = ISWAP_TIME,
) -> pd.DataFrame:
    """One row of :func:`max_idle_qubits` per ``m``, sorted by ``m``."""
    rows = [max_idle_qubits(m, e_thr, x, gate_time).to_dict() for m in m_values]
    df = pd.DataFrame(rows, columns=SCALING_COLUMNS + ["x_used"])
    return df[SCALING_COLUMNS].sort_values("m", kind="mergesort").reset_index(drop=True)


def log_grid(m_min: float, m_max: float, points: int) -> np.ndarray:
    if not 0 < m_min <= m_max:
        raise ValueError(f"invalid m range [{m_min}, {m_max}]")
    if points < 1:
        raise ValueError(f"points must be >= 1, got {points}")
    return np.logspace(math.log10(m_min), math.log10(m_max), points)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def fit_linear(xs: Sequence[float], ys: Sequence[float]) -> LinearFit:
    """Least-squares line through ``(xs, ys)``."""
    res = stats.linregress(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
    return LinearFit(float(res.slope), float(res.intercept), float(res.rvalue ** 2))


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> LinearFit:
    """Straight-line fit in log-log space; ``slope`` is the exponent."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("power-law fit needs strictly positive data")
    return fit_linear(np.log(xs), np.log(ys))


__all__ = [
    "DEFAULT_E_THR",
    "ISWAP_X",
    "LambertDomainError",
    "lambert_w0",
    "ScalingSolution",
    "closed_form_idle",
    "real_valued_idle",
    "numeric_idle",
    "max_idle_qubits",
    "asymptotic_idle_qubits",
    "scaling_table",
    "log_grid",
    "LinearFit",
    "fit_linear",
    "fit_power_law",
]
