"""Mean-field model of the idle qubits.

Neglecting their fluctuations, the ``n`` idle qubits act on the active
pair as a classical transverse field ``Ω = γ' Σ_j ⟨σx(j)⟩``.  For idle
states uniformly distributed on the Bloch sphere each ``⟨σx(j)⟩`` is
uniform on ``[-1, 1]``, so ``Ω`` follows an Irwin–Hall law on
``[-nγ', nγ']``.  The gate fidelity is the two-qubit fidelity of
``H_S + Ω(σx(0) + σx(1))`` averaged over that law.

The alternating-sign Irwin–Hall sum cancels badly for large ``n``.  Three
evaluators are therefore used:

* ``n <= exact_max_n``: the alternating sum, folded onto the lower half
  of the support where the terms stay small;
* ``exact_max_n < n <= gaussian_min_n``: chunks of at most
  ``exact_max_n`` uniforms evaluated exactly on a grid and convolved;
* larger ``n``: the Gaussian limit of variance ``nγ'²/3``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate, linalg, signal, stats
from scipy.special import comb, factorial

from .fidelity import FidelityReport, Method, make_report
from .hamiltonian import ISWAP_TIME, CouplingConfig

logger = logging.getLogger(__name__)

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_ID2 = np.eye(2)
# two-qubit operators in the {00, 01, 10, 11} basis
_HS_2Q = np.array(
    [[0, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 0]], dtype=complex
)
_SX_SUM = np.kron(_SIGMA_X, _ID2) + np.kron(_ID2, _SIGMA_X)
# Gaussian tails beyond this many standard deviations are dropped
_GAUSSIAN_SPAN = 12.0
# floor for panels where the infidelity is at round-off level
_EPSABS = 1e-15


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature misses the requested tolerance."""


@dataclass(frozen=True)
class MeanFieldSettings:
    epsrel: float = 1e-8
    exact_max_n: int = 20
    gaussian_min_n: int = 50
    grid_per_unit: int = 400

    def __post_init__(self) -> None:
        if not 0 < self.epsrel < 1:
            raise ValueError(f"epsrel must lie in (0, 1), got {self.epsrel}")
        if self.exact_max_n < 2:
            raise ValueError(f"exact_max_n must be >= 2, got {self.exact_max_n}")
        if self.gaussian_min_n < self.exact_max_n:
            raise ValueError(
                f"gaussian_min_n ({self.gaussian_min_n}) must not be below "
                f"exact_max_n ({self.exact_max_n})"
            )
        if self.grid_per_unit < 1:
            raise ValueError(f"grid_per_unit must be >= 1, got {self.grid_per_unit}")

    @classmethod
    def from_config(cls, cfg: Optional[Dict[str, Any]]) -> "MeanFieldSettings":
        """Build from the ``meanfield`` section of the YAML configuration."""
        cfg = cfg or {}
        defaults = cls()
        return cls(
            epsrel=float(cfg.get("epsrel", defaults.epsrel)),
            exact_max_n=int(cfg.get("exact_max_n", defaults.exact_max_n)),
            gaussian_min_n=int(cfg.get("gaussian_min_n", defaults.gaussian_min_n)),
            grid_per_unit=int(cfg.get("grid_per_unit", defaults.grid_per_unit)),
        )


def _irwin_hall_alternating(n: int, u: np.ndarray) -> np.ndarray:
    """Standard Irwin–Hall density on ``[0, n]`` by the alternating sum."""
    u = np.minimum(u, n - u)  # symmetric about n/2
    total = np.zeros_like(u, dtype=float)
    for k in range(int(math.floor(n / 2.0)) + 1):
        total += (-1) ** k * comb(n, k) * np.clip(u - k, 0.0, None) ** (n - 1)
    return total / factorial(n - 1)


def _chunks(n: int, size: int) -> List[int]:
    q, r = divmod(n, size)
    parts = [size] * q + ([r] if r else [])
    if parts[-1] == 1:
        parts[-2] -= 1
        parts[-1] = 2
    return parts


@lru_cache(maxsize=64)
def _irwin_hall_grid(n: int, chunk: int, per_unit: int) -> Tuple[np.ndarray, np.ndarray]:
    h = 1.0 / per_unit
    density = None
    for part in _chunks(n, chunk):
        grid = np.arange(part * per_unit + 1) * h
        piece = _irwin_hall_alternating(part, grid)
        density = piece if density is None else signal.fftconvolve(density, piece) * h
    density = np.clip(density, 0.0, None)
    u = np.arange(density.size) * h
    u.setflags(write=False)
    density.setflags(write=False)
    return u, density


def irwin_hall_pdf(
    n: int,
    coupling: float,
    omega,
    settings: Optional[MeanFieldSettings] = None,
):
    """Density of a sum of ``n`` uniforms on ``[-coupling, coupling]`` at ``omega``.

    Returns zero outside ``[-n·coupling, n·coupling]``.  Scalars in give a
    float out; arrays give an array.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if coupling <= 0:
        raise ValueError(f"coupling must be positive, got {coupling}")
    settings = settings or MeanFieldSettings()
    omega_arr = np.asarray(omega, dtype=float)
    u = (omega_arr + n * coupling) / (2.0 * coupling)
    inside = (u >= 0.0) & (u <= n)

    if n == 1:
        values = np.ones_like(u)
    elif n <= settings.exact_max_n:
        values = _irwin_hall_alternating(n, np.clip(u, 0.0, n))
    elif n <= settings.gaussian_min_n:
        grid, density = _irwin_hall_grid(n, settings.exact_max_n, settings.grid_per_unit)
        values = np.interp(u, grid, density)
    else:
        values = stats.norm.pdf(u, loc=n / 2.0, scale=math.sqrt(n / 12.0))

    out = np.where(inside, values / (2.0 * coupling), 0.0)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class MagnetizationDistribution:
    """Law of the total transverse field ``Ω`` of ``n`` idle qubits."""

    n: int
    coupling: float
    settings: MeanFieldSettings = MeanFieldSettings()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.coupling <= 0:
            raise ValueError(f"coupling must be positive, got {self.coupling}")

    @property
    def support(self) -> Tuple[float, float]:
        half = self.n * self.coupling
        return -half, half

    @property
    def variance(self) -> float:
        return self.n * self.coupling ** 2 / 3.0

    def pdf(self, omega):
        return irwin_hall_pdf(self.n, self.coupling, omega, self.settings)

    def breakpoints(self) -> np.ndarray:
        """The ``n + 1`` knots between which the density is a polynomial."""
        lo, hi = self.support
        return np.linspace(lo, hi, self.n + 1)

    def panels(self) -> np.ndarray:
        """Integration panel edges; the Gaussian regime is cut to ±12σ."""
        if self.n <= self.settings.gaussian_min_n:
            return self.breakpoints()
        span = min(self.n * self.coupling, _GAUSSIAN_SPAN * math.sqrt(self.variance))
        return np.linspace(-span, span, 2 * int(_GAUSSIAN_SPAN) + 1)


@lru_cache(maxsize=32)
def _reference_gate(gate_time: float) -> np.ndarray:
    w, v = linalg.eigh(_HS_2Q)
    return (v * np.exp(-1j * gate_time * w)) @ v.conj().T


def magnetized_fidelity(omega: float, gate_time: float = ISWAP_TIME) -> float:
    """Two-qubit entanglement fidelity of the iSWAP in a transverse field ``Ω``.

    ``Ω`` is in units of ``γ``.  The single-qubit ``ω σz / 2`` terms are
    removed by the rotating frame.
    """
    if not math.isfinite(omega):
        raise ValueError(f"omega must be finite, got {omega}")
    H = _HS_2Q + omega * _SX_SUM
    w, v = linalg.eigh(H)
    U = (v * np.exp(-1j * gate_time * w)) @ v.conj().T
    overlap = np.vdot(_reference_gate(float(gate_time)), U)
    return float(abs(overlap) ** 2 / 16.0)


def _panel_integral(fn, lo: float, hi: float, epsrel: float) -> float:
    result = integrate.quad(fn, lo, hi, epsabs=_EPSABS, epsrel=epsrel, limit=200, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3:
        raise QuadratureError(
            f"quadrature on [{lo:.3g}, {hi:.3g}] did not converge: {result[3]} "
            f"(estimate {value:.6e}, abs error {abserr:.2e})"
        )
    return value


def meanfield_average(
    config: CouplingConfig, settings: Optional[MeanFieldSettings] = None
) -> FidelityReport:
    """Average the magnetized fidelity over the Irwin–Hall law of ``Ω``.

    The infidelity ``1 - F(Ω)`` is integrated panel by panel between the
    density's breakpoints, which keeps the relative tolerance meaningful
    for small errors.

    Raises:
        QuadratureError: If a panel misses ``settings.epsrel``.
    """
    settings = settings or MeanFieldSettings()
    n = config.n_idle
    if n == 0 or config.m == 0:
        return make_report(Method.MEANFIELD, config, 1.0)

    dist = MagnetizationDistribution(n, float(config.m), settings)
    theta = config.gate_time

    def integrand(omega: float) -> float:
        return (1.0 - magnetized_fidelity(omega, theta)) * dist.pdf(omega)

    edges = dist.panels()
    infidelity = math.fsum(
        _panel_integral(integrand, lo, hi, settings.epsrel) for lo, hi in zip(edges[:-1], edges[1:])
    )
    logger.debug(f"Mean-field infidelity n={n} m={config.m:g}: {infidelity:.6e}")
    return make_report(Method.MEANFIELD, config, 1.0 - infidelity)


__all__ = [
    "QuadratureError",
    "MeanFieldSettings",
    "MagnetizationDistribution",
    "irwin_hall_pdf",
    "magnetized_fidelity",
    "meanfield_average",
]
