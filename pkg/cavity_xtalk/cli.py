"""Command-line front end.

Sub-commands::

    cavity-xtalk fidelity   --method all --n-qubits 7 --m 1e-2
    cavity-xtalk sweep      --sweep n_qubits --start 3 --stop 12 --m 1e-2 \\
                            --methods exact pert zassenhaus --out idle_sweep.csv
    cavity-xtalk maxqubits  --m 1e-2 4e-2 1e-3
    cavity-xtalk couplings  --spec hardware.yaml

Tables are written as CSV to ``--out`` or standard output.  Exit codes:
0 on success, 2 when the perturbative model is asked for a point beyond
its validity bound, 64 for usage errors and 65 for data or physics
errors.  ``XTALK_WORKERS`` sets the sweep thread count and
``XTALK_PROM_PORT`` exposes Prometheus metrics while the command runs.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from dotenv import load_dotenv

from cavity_xtalk.core import monitoring
from cavity_xtalk.core.config import load_config, section
from cavity_xtalk.core.dispersive import (
    DispersiveRegimeError,
    HardwareSpecError,
    ResonanceError,
    load_hardware_spec,
    physical_gate_time,
    to_coupling_config,
)
from cavity_xtalk.core.fidelity import FidelityReport, Method, report
from cavity_xtalk.core.hamiltonian import ISWAP_TIME, CouplingConfig
from cavity_xtalk.core.hilbert import RegisterError
from cavity_xtalk.core.logging_config import configure_logging
from cavity_xtalk.core.meanfield import MeanFieldSettings, QuadratureError
from cavity_xtalk.core.perturbation import ModelOutOfRangeError
from cavity_xtalk.core.propagator import PropagatorError
from cavity_xtalk.core.scaling import fit_linear, fit_power_law, log_grid, scaling_table
from cavity_xtalk.core.sweep import WORKERS_ENV, normalize_variable, run_sweep, sweep_configs

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MODEL_RANGE = 2
EXIT_USAGE = 64
EXIT_DATA = 65

DATA_ERRORS = (
    RegisterError,
    PropagatorError,
    QuadratureError,
    ResonanceError,
    DispersiveRegimeError,
    HardwareSpecError,
    OSError,
)
METHOD_CHOICES = ["exact", "pert", "perturbative", "zassenhaus", "meanfield"]


class UsageError(Exception):
    """Invalid flag values or combinations."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="YAML configuration file")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    common.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    return common


def _physics_options(parser: argparse.ArgumentParser, n_qubits_default: Optional[int]) -> None:
    parser.add_argument(
        "--n-qubits", type=int, default=n_qubits_default, required=n_qubits_default is None
    )
    parser.add_argument("--m", type=float, default=0.0, help="coupling ratio γ'/γ")
    parser.add_argument("--gate-time", type=float, default=None, help="dimensionless γ t_g")
    parser.add_argument("--delta", type=float, default=None, help="Δ in units of γ")
    parser.add_argument("--m-tilde", type=float, default=None)
    parser.add_argument("--omega-tilde", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(
        prog="cavity-xtalk", description="Cross-talk errors of cavity-mediated iSWAP gates"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fid = sub.add_parser("fidelity", parents=[common], help="single parameter point")
    p_fid.add_argument("--method", default="all", choices=METHOD_CHOICES + ["all"])
    _physics_options(p_fid, None)

    p_sweep = sub.add_parser("sweep", parents=[common], help="sweep N, m or gate time")
    p_sweep.add_argument(
        "--sweep", required=True, choices=["n_qubits", "n-qubits", "m", "gate_time", "gate-time"]
    )
    p_sweep.add_argument("--start", type=float, default=None)
    p_sweep.add_argument("--stop", type=float, default=None)
    p_sweep.add_argument("--num", type=int, default=None, help="points for m / gate-time sweeps")
    p_sweep.add_argument("--log", action="store_true", help="logarithmic spacing")
    p_sweep.add_argument("--values", type=float, nargs="+", default=None)
    p_sweep.add_argument("--methods", nargs="+", default=["exact", "pert"], choices=METHOD_CHOICES)
    p_sweep.add_argument("--fit", action="store_true", help="print scaling fits per method")
    _physics_options(p_sweep, 6)
    p_sweep.set_defaults(m=1e-2)

    p_max = sub.add_parser("maxqubits", parents=[common], help="connectivity limit table")
    p_max.add_argument("--m", type=float, nargs="+", default=None, help="ratios (default: grid)")
    p_max.add_argument("--m-min", type=float, default=None)
    p_max.add_argument("--m-max", type=float, default=None)
    p_max.add_argument("--points", type=int, default=None)
    p_max.add_argument("--e-thr", type=float, default=None)
    p_max.add_argument("--x", type=float, default=None, help="override the coefficient x")
    p_max.add_argument("--gate-time", type=float, default=None)

    p_cpl = sub.add_parser("couplings", parents=[common], help="couplings from a hardware spec")
    p_cpl.add_argument("--spec", required=True, help="YAML hardware description")
    p_cpl.add_argument("--gate-time", type=float, default=None)
    return parser


def _pick(value: Any, cfg: Dict[str, Any], key: str, default: Any) -> Any:
    return value if value is not None else cfg.get(key, default)


def _coupling_config(args: argparse.Namespace, cfg: Dict[str, Any]) -> CouplingConfig:
    sim = section(cfg, "simulation")
    try:
        return CouplingConfig(
            n_qubits=args.n_qubits,
            m=args.m,
            m_tilde=float(_pick(args.m_tilde, sim, "m_tilde", 0.0)),
            omega_tilde_coeff=float(_pick(args.omega_tilde, sim, "omega_tilde", 0.0)),
            delta=float(_pick(args.delta, sim, "delta", 0.0)),
            gate_time=float(_pick(args.gate_time, sim, "gate_time", ISWAP_TIME)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _meanfield_settings(cfg: Dict[str, Any]) -> MeanFieldSettings:
    try:
        return MeanFieldSettings.from_config(section(cfg, "meanfield"))
    except ValueError as exc:
        raise UsageError(f"meanfield: {exc}") from exc


def _write_table(df: pd.DataFrame, out: Optional[str], cfg: Dict[str, Any]) -> None:
    float_format = section(cfg, "output").get("float_format", "%.12e")
    if out:
        df.to_csv(out, index=False, float_format=float_format)
        logger.info(f"Wrote {len(df)} rows to {out}")
    else:
        df.to_csv(sys.stdout, index=False, float_format=float_format)


def _format_report(rep: FidelityReport) -> str:
    return (
        f"{rep.method.value:>12}  N={rep.n_qubits} n={rep.n_idle} m={rep.m:g} "
        f"gate_time={rep.gate_time:.6g}  F_e={rep.entanglement_fidelity:.12f}  "
        f"F={rep.average_fidelity:.12f}  error_rate={rep.error_rate:.6e}"
    )


def cmd_fidelity(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    config = _coupling_config(args, cfg)
    methods = list(Method) if args.method == "all" else [Method.parse(args.method)]
    settings = _meanfield_settings(cfg)
    reports: List[FidelityReport] = []
    status = EXIT_OK
    for method in methods:
        try:
            rep = report(method, config, meanfield_settings=settings)
        except ModelOutOfRangeError as exc:
            logger.error(f"{method.value}: model out of range: {exc}")
            status = EXIT_MODEL_RANGE
            continue
        reports.append(rep)
        print(_format_report(rep))
    if args.out and reports:
        _write_table(pd.DataFrame([r.to_dict() for r in reports]), args.out, cfg)
    return status


def _sweep_values(args: argparse.Namespace, variable: str) -> Sequence[float]:
    if args.values:
        return args.values
    if args.start is None or args.stop is None:
        raise UsageError("sweep needs --values or both --start and --stop")
    if args.start > args.stop:
        raise UsageError("--start must not exceed --stop")
    if variable == "n_qubits" and args.num is None:
        return list(range(int(args.start), int(args.stop) + 1))
    num = args.num or 10
    if args.log:
        if args.start <= 0:
            raise UsageError("--log needs a positive --start")
        return np.logspace(math.log10(args.start), math.log10(args.stop), num)
    return np.linspace(args.start, args.stop, num)


def _print_fits(df: pd.DataFrame, variable: str) -> None:
    for method, group in df.groupby("method", sort=True):
        if len(group) < 3:
            continue
        if variable == "n_qubits":
            fit = fit_linear(group["n_idle"], group["error_rate"])
            print(
                f"{method}: error_rate = {fit.slope:.6e}*n + {fit.intercept:.3e}  "
                f"(R^2={fit.r_squared:.6f})"
            )
        elif variable == "m":
            positive = group[group["error_rate"] > 0]
            if len(positive) < 3:
                continue
            fit = fit_power_law(positive["m"], positive["error_rate"])
            print(f"{method}: error_rate ~ m^{fit.slope:.4f}  (R^2={fit.r_squared:.6f})")
        else:
            logger.info("no scaling fit defined for gate-time sweeps")
            return


def cmd_sweep(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    variable = normalize_variable(args.sweep)
    base = _coupling_config(args, cfg)
    values = _sweep_values(args, variable)
    try:
        configs = sweep_configs(variable, values, base)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    workers = None if os.getenv(WORKERS_ENV) else int(cfg.get("workers", 1) or 1)
    settings = _meanfield_settings(cfg)
    df = run_sweep(configs, args.methods, workers=workers, meanfield_settings=settings)
    _write_table(df, args.out, cfg)
    if args.fit:
        _print_fits(df, variable)
    return EXIT_OK


def cmd_maxqubits(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    sc = section(cfg, "scaling")
    sim = section(cfg, "simulation")
    if args.m:
        m_values = args.m
    else:
        m_values = log_grid(
            float(_pick(args.m_min, sc, "m_min", 1e-3)),
            float(_pick(args.m_max, sc, "m_max", 1e-1)),
            int(_pick(args.points, sc, "points", 50)),
        )
    e_thr = float(_pick(args.e_thr, sc, "e_thr", 1e-3))
    gate_time = float(_pick(args.gate_time, sim, "gate_time", ISWAP_TIME))
    try:
        df = scaling_table(m_values, e_thr, x=args.x, gate_time=gate_time)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write_table(df, args.out, cfg)
    mismatched = df[df["n_closed_form"] != df["n_numeric"]]
    if not mismatched.empty:
        logger.warning(f"closed form and numeric counts disagree for m={list(mismatched['m'])}")
    return EXIT_OK


def cmd_couplings(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    disp = section(cfg, "dispersive")
    sim = section(cfg, "simulation")
    spec = load_hardware_spec(args.spec)
    config = to_coupling_config(
        spec,
        gate_time=float(_pick(args.gate_time, sim, "gate_time", ISWAP_TIME)),
        warn_ratio=float(disp.get("warn_ratio", 0.1)),
        error_ratio=float(disp.get("error_ratio", 0.5)),
    )
    row = {
        "n_qubits": config.n_qubits,
        "gamma": config.gamma,
        "m": config.m,
        "m_tilde": config.m_tilde,
        "omega_tilde_coeff": config.omega_tilde_coeff,
        "delta": config.delta,
        "gate_time": config.gate_time,
        "t_g": physical_gate_time(config),
    }
    for key, value in row.items():
        print(f"{key:>18} = {value:.12g}")
    if args.out:
        _write_table(pd.DataFrame([row]), args.out, cfg)
    return EXIT_OK


COMMANDS = {
    "fidelity": cmd_fidelity,
    "sweep": cmd_sweep,
    "maxqubits": cmd_maxqubits,
    "couplings": cmd_couplings,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except (FileNotFoundError, ValueError) as exc:
        parser.exit(EXIT_USAGE, f"cavity-xtalk: {exc}\n")
    level = args.log_level or section(cfg, "logging").get("level", "INFO")
    try:
        configure_logging(level)
    except ValueError as exc:
        parser.exit(EXIT_USAGE, f"cavity-xtalk: {exc}\n")
    if monitoring.maybe_start_from_env():
        logger.info(f"Prometheus metrics on port {os.environ[monitoring.PORT_ENV]}")

    try:
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"cavity-xtalk {args.command}: error: {exc}\n")
    except ModelOutOfRangeError as exc:
        logger.error(f"model out of range: {exc}")
        return EXIT_MODEL_RANGE
    except DATA_ERRORS as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
