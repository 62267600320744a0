"""Effective qubit-qubit couplings mediated by a dispersive cavity.

Eliminating the cavity to second order in ``g/(ω_c - ω)`` leaves the
qubits coupled pairwise through virtual photons.  For qubits ``i`` and
``j`` with transverse couplings ``g``, longitudinal couplings ``λ`` and
frequencies ``ω``::

    η_i   = g_i ω_c / (ω_c² - ω_i²)
    γ_ij  = g_i η_j + g_j η_i
    ω̃_ij  = λ_i λ_j (ω_i + ω_j) / (ω_i ω_j)

and each qubit frequency is shifted to ``ω_i - 2 g_i η_i``.  ``γ_ij`` is
called ``γ`` for the two active qubits, ``γ'`` for an active-idle pair
and ``γ̃`` for two idle qubits.

``γ_ij`` as defined here is the negative of the compact two-qubit
expression returned by :func:`symmetric_gamma`.  :func:`to_coupling_config`
keeps magnitudes only: the fidelities depend on ``|γ t_g|`` and on
``m = |γ'/γ|``.

Hardware descriptions are YAML files::

    cavity_freq: 7.0
    qubits:
      - {name: q0, omega: 5.0, g: 0.1, lambda: 0.0, mode: on}
      - {name: q1, omega: 5.0, g: 0.1, lambda: 0.0, mode: on}
      - {name: q2, omega: 5.0, g: 0.001, lambda: 0.0, mode: off}

Frequencies and couplings share one angular unit (e.g. 2π·GHz).
"""

from __future__ import annotations

import logging
from enum import Enum
from itertools import combinations
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .hamiltonian import ISWAP_TIME, CouplingConfig

logger = logging.getLogger(__name__)

WARN_RATIO = 0.1
ERROR_RATIO = 0.5
_HETEROGENEITY_RTOL = 1e-9


class ResonanceError(ValueError):
    """Raised when a qubit sits on the cavity frequency."""


class DispersiveRegimeError(ValueError):
    """Raised when a coupling is not small against the qubit-cavity detuning."""


class HardwareSpecError(ValueError):
    """Raised for unreadable or inconsistent hardware descriptions."""


class Mode(str, Enum):
    ON = "on"
    OFF = "off"


class PhysicalQubit(BaseModel):
    """One qubit as seen by the cavity."""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    name: Optional[str] = None
    omega: float = Field(..., description="Qubit frequency")
    g: float = Field(..., description="Transverse cavity coupling")
    lam: float = Field(0.0, alias="lambda", description="Longitudinal cavity coupling")
    mode: Mode = Field(Mode.OFF, description="on for the gate pair, off when idle")

    @field_validator("mode", mode="before")
    @classmethod
    def _yaml_booleans(cls, value):
        # YAML 1.1 reads bare on/off as booleans
        if isinstance(value, bool):
            return Mode.ON if value else Mode.OFF
        return value


class HardwareSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    cavity_freq: float = Field(..., gt=0, description="Cavity frequency ω_c")
    qubits: List[PhysicalQubit] = Field(..., min_length=2)

    @property
    def active(self) -> List[PhysicalQubit]:
        return [q for q in self.qubits if q.mode is Mode.ON]

    @property
    def idle(self) -> List[PhysicalQubit]:
        return [q for q in self.qubits if q.mode is Mode.OFF]


def _detuning(qubit: PhysicalQubit, cavity_freq: float) -> float:
    detuning = cavity_freq - qubit.omega
    if detuning == 0.0:
        label = qubit.name or f"omega={qubit.omega}"
        raise ResonanceError(
            f"qubit {label} is resonant with the cavity (ω = ω_c = {cavity_freq})"
        )
    return detuning


def eta(qubit: PhysicalQubit, cavity_freq: float) -> float:
    """``g ω_c / (ω_c² - ω²)``.

    Raises:
        ResonanceError: If ``ω == ω_c``.
    """
    _detuning(qubit, cavity_freq)
    return qubit.g * cavity_freq / (cavity_freq ** 2 - qubit.omega ** 2)


def check_dispersive(
    qubit: PhysicalQubit,
    cavity_freq: float,
    warn_ratio: float = WARN_RATIO,
    error_ratio: float = ERROR_RATIO,
) -> float:
    """Return ``max(|g|, |λ|) / |ω_c - ω|`` after checking it against the limits.

    Raises:
        ResonanceError: If ``ω == ω_c``.
        DispersiveRegimeError: If the ratio exceeds ``error_ratio``.
    """
    detuning = abs(_detuning(qubit, cavity_freq))
    ratio = max(abs(qubit.g), abs(qubit.lam)) / detuning
    label = qubit.name or f"omega={qubit.omega}"
    if ratio > error_ratio:
        raise DispersiveRegimeError(
            f"qubit {label}: coupling/detuning ratio {ratio:.3g} exceeds {error_ratio}"
        )
    if ratio > warn_ratio:
        logger.warning(f"qubit {label}: coupling/detuning ratio {ratio:.3g} above {warn_ratio}")
    return ratio


def pair_coupling(q_i: PhysicalQubit, q_j: PhysicalQubit, cavity_freq: float) -> float:
    """Signed flip-flop coupling ``g_i η_j + g_j η_i``."""
    return q_i.g * eta(q_j, cavity_freq) + q_j.g * eta(q_i, cavity_freq)


def symmetric_gamma(q_1: PhysicalQubit, q_2: PhysicalQubit, cavity_freq: float) -> float:
    """``g1 g2 ω_c (1/(ω1² - ω_c²) + 1/(ω2² - ω_c²))``, equal to ``-pair_coupling``."""
    for q in (q_1, q_2):
        _detuning(q, cavity_freq)
    return q_1.g * q_2.g * cavity_freq * (
        1.0 / (q_1.omega ** 2 - cavity_freq ** 2) + 1.0 / (q_2.omega ** 2 - cavity_freq ** 2)
    )


def zz_coefficient(q_i: PhysicalQubit, q_j: PhysicalQubit) -> float:
    """``λ_i λ_j (ω_i + ω_j) / (ω_i ω_j)``."""
    if q_i.omega == 0.0 or q_j.omega == 0.0:
        raise HardwareSpecError("σzσz coefficient needs non-zero qubit frequencies")
    return q_i.lam * q_j.lam * (q_i.omega + q_j.omega) / (q_i.omega * q_j.omega)


def renormalized_frequency(qubit: PhysicalQubit, cavity_freq: float) -> float:
    """Dispersively shifted frequency ``ω - 2 g η``."""
    return qubit.omega - 2.0 * qubit.g * eta(qubit, cavity_freq)


def _mean_checked(values: Sequence[float], what: str) -> float:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return 0.0
    scale = float(np.abs(arr).max())
    if scale and float(np.ptp(arr)) > _HETEROGENEITY_RTOL * scale:
        logger.warning(
            f"heterogeneous {what} (min {arr.min():.4g}, max {arr.max():.4g}); "
            "using the mean"
        )
    return float(arr.mean())


def to_coupling_config(
    spec: HardwareSpec,
    gate_time: float = ISWAP_TIME,
    warn_ratio: float = WARN_RATIO,
    error_ratio: float = ERROR_RATIO,
) -> CouplingConfig:
    """Reduce a hardware description to dimensionless simulator parameters.

    Args:
        spec: Parsed hardware description with exactly two ``on`` qubits.
        gate_time: Dimensionless gate time ``|γ| t_g``.
        warn_ratio: Dispersive ratio above which a warning is logged.
        error_ratio: Dispersive ratio above which the spec is rejected.

    Raises:
        HardwareSpecError: If the spec does not have exactly two active
            qubits or their coupling vanishes.
        ResonanceError, DispersiveRegimeError: From the per-qubit checks.
    """
    active, idle = spec.active, spec.idle
    if len(active) != 2:
        raise HardwareSpecError(f"exactly two qubits must be 'on', found {len(active)}")
    wc = spec.cavity_freq
    for q in spec.qubits:
        check_dispersive(q, wc, warn_ratio, error_ratio)

    gamma = pair_coupling(active[0], active[1], wc)
    if gamma == 0.0:
        raise HardwareSpecError("the active pair is not coupled (γ = 0)")
    gamma_abs = abs(gamma)

    primes = [abs(pair_coupling(a, b, wc)) for a in active for b in idle]
    pairs = list(combinations(idle, 2))
    tildes = [abs(pair_coupling(a, b, wc)) for a, b in pairs]
    zz = [zz_coefficient(a, b) for a, b in pairs]

    delta = 0.0
    if idle:
        on_freq = np.mean([renormalized_frequency(q, wc) for q in active])
        off_freq = _mean_checked([renormalized_frequency(q, wc) for q in idle], "idle frequencies")
        delta = float(on_freq - off_freq)

    config = CouplingConfig(
        n_qubits=len(spec.qubits),
        m=_mean_checked(primes, "active-idle couplings") / gamma_abs,
        m_tilde=_mean_checked(tildes, "idle-idle couplings") / gamma_abs,
        omega_tilde_coeff=_mean_checked(zz, "σzσz couplings") / gamma_abs,
        delta=delta,
        gate_time=gate_time,
        gamma=gamma_abs,
    )
    logger.info(
        f"γ={gamma:.6g} m={config.m:.6g} m_tilde={config.m_tilde:.6g} "
        f"omega_tilde={config.omega_tilde_coeff:.6g} Δ={config.delta:.6g}"
    )
    return config


def physical_gate_time(config: CouplingConfig) -> float:
    """``t_g = γt_g / |γ|`` in the inverse of the spec's frequency unit."""
    return config.gate_time / config.gamma


def load_hardware_spec(path: str | Path) -> HardwareSpec:
    """Read and validate a YAML hardware description.

    Raises:
        HardwareSpecError: If the file is missing, is not valid YAML (the
            message carries the line number) or fails schema validation.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise HardwareSpecError(f"cannot read hardware spec {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise HardwareSpecError(f"{path}: invalid YAML{where}: {exc}") from exc
    if not isinstance(raw, dict):
        raise HardwareSpecError(f"{path}: expected a mapping at the top level")
    try:
        return HardwareSpec.model_validate(raw)
    except ValidationError as exc:
        raise HardwareSpecError(f"{path}: {exc}") from exc


__all__ = [
    "ResonanceError",
    "DispersiveRegimeError",
    "HardwareSpecError",
    "Mode",
    "PhysicalQubit",
    "HardwareSpec",
    "eta",
    "check_dispersive",
    "pair_coupling",
    "symmetric_gamma",
    "zz_coefficient",
    "renormalized_frequency",
    "to_coupling_config",
    "physical_gate_time",
    "load_hardware_spec",
]
