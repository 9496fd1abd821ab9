"""Command-line front end.

Usage: ``geolz <subcommand> [options]``. Quantities take unit suffixes
(``25ns``, ``20MHz``, ``0.5pi``); frequencies are cyclic. Results go to
``--output``, else to ``$GEOLZ_OUTPUT_DIR/<subcommand>.csv`` when that
variable is set, else to standard output. Failures print one line
``error: <ErrorType>: <message>`` on standard error and exit non-zero
(2 for usage errors, 1 otherwise).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analytic, experiments, qubit
from .dynamics import DecoherenceParams, evolve_master, evolve_schrodinger
from .errors import GeolzError, UsageError
from .io import format_number, write_csv, write_table
from .schedule import parse_schedule
from .units import parse_quantity

OUTPUT_DIR_ENV = "GEOLZ_OUTPUT_DIR"
SUBCOMMANDS = ("glzi", "glzi-map", "dlzi", "trace", "t1", "t2", "spectroscopy", "evolve",
               "analytic")


@dataclass
class RunConfig:
    """Parsed invocation: subcommand plus typed parameters in internal units."""

    subcommand: str
    params: dict = field(default_factory=dict)
    schedule_path: str | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _quantity(kind):
    def conv(text):
        try:
            return parse_quantity(text, kind).value
        except GeolzError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    conv.__name__ = kind
    return conv


def _quantity_list(kind):
    one = _quantity(kind)

    def conv(text):
        return [one(t) for t in text.split(",") if t]
    conv.__name__ = f"{kind} list"
    return conv


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


_TIME, _FREQ, _ANGLE = _quantity("time"), _quantity("frequency"), _quantity("angle")


def _add_protocol(p, *, tau_c=True, tau_p=True):
    p.add_argument("--delta0", type=_FREQ, default=experiments.DEFAULT_DELTA0,
                   help="detuning amplitude (default 100MHz)")
    p.add_argument("--omega", type=_FREQ, default=experiments.DEFAULT_OMEGA,
                   help="drive amplitude (default 20MHz)")
    if tau_p:
        p.add_argument("--tau-p", type=_TIME, default=experiments.DEFAULT_TAU_P,
                       help="sweep time (default 25ns)")
    if tau_c:
        p.add_argument("--tau-c", type=_TIME, default=experiments.DEFAULT_TAU_C,
                       help="cycle period (default 100ns)")


def _add_integration(p, methods=experiments.METHODS):
    p.add_argument("--method", choices=methods, default="schrodinger")
    p.add_argument("--t1", type=_TIME, default=experiments.DEFAULT_T1,
                   help="relaxation time for --method master (default 118ns)")
    p.add_argument("--t2", type=_TIME, default=experiments.DEFAULT_T2,
                   help="coherence time for --method master (default 157ns)")
    p.add_argument("--dt", type=_TIME, default=1e-12, help="integrator step (default 0.001ns)")
    p.add_argument("--readout", choices=experiments.READOUTS, default="dressed")


def _add_sweep_extras(p):
    p.add_argument("--p-lz", type=float, default=None,
                   help="crossing probability for --method impulse")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--shots", type=_positive_int, default=None,
                   help="add a shot-sampled column with this many shots per point")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for all subcommands."""
    parser = _Parser(prog="geolz", description="Landau-Zener interferometry simulator")
    parser.add_argument("--output", "-o", default=None, help="CSV path ('-' for stdout)")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    add_parser = sub.add_parser

    def add_with_output(*args, **kwargs):
        # -o is also accepted after the subcommand name
        p = add_parser(*args, **kwargs)
        p.add_argument("--output", "-o", default=argparse.SUPPRESS, help="CSV path ('-' for stdout)")
        return p

    sub.add_parser = add_with_output

    p = sub.add_parser("glzi", help="P1 against geometric phase theta")
    _add_protocol(p)
    _add_integration(p)
    _add_sweep_extras(p)
    p.add_argument("--theta-points", type=_positive_int, default=64)
    p.add_argument("--theta-max", type=_ANGLE, default=2 * math.pi,
                   help="theta grid is [0, theta-max) (default 2pi)")

    p = sub.add_parser("glzi-map", help="P1 over a (tau_p, theta) grid")
    _add_protocol(p, tau_p=False)
    _add_integration(p)
    _add_sweep_extras(p)
    p.add_argument("--theta-points", type=_positive_int, default=32)
    p.add_argument("--theta-max", type=_ANGLE, default=2 * math.pi)
    p.add_argument("--tau-p-list", type=_quantity_list("time"),
                   default=[10e-9, 15e-9, 20e-9, 25e-9, 30e-9, 40e-9])

    p = sub.add_parser("dlzi", help="P1 against cycle period at constant phase")
    _add_protocol(p, tau_c=False)
    _add_integration(p)
    _add_sweep_extras(p)
    p.add_argument("--theta", type=_ANGLE, default=0.0)
    p.add_argument("--tau-c-start", type=_TIME, default=60e-9)
    p.add_argument("--tau-c-stop", type=_TIME, default=160e-9)
    p.add_argument("--tau-c-points", type=_positive_int, default=51)

    p = sub.add_parser("trace", help="P1 against time through one cycle")
    _add_protocol(p)
    _add_integration(p, ("schrodinger", "master"))
    p.add_argument("--theta", type=_ANGLE, default=0.5 * math.pi)
    p.add_argument("--stride", type=_positive_int, default=10)
    p.add_argument("--flatness", type=float, default=0.02,
                   help="maximum plateau standard deviation")

    for name, what, stop in (("t1", "delay", 400e-9), ("t2", "tau", 200e-9)):
        p = sub.add_parser(name, help=f"{name.upper()} protocol with exponential fit")
        p.add_argument("--t1", type=_TIME, default=experiments.DEFAULT_T1)
        p.add_argument("--t2", type=_TIME, default=experiments.DEFAULT_T2)
        p.add_argument("--dt", type=_TIME, default=1e-12)
        p.add_argument(f"--{what}-stop", type=_TIME, default=stop)
        p.add_argument(f"--{what}-points", type=_positive_int, default=21)
        p.add_argument("--workers", type=_positive_int, default=1)

    p = sub.add_parser("spectroscopy", help="level spacing against flux bias")
    p.add_argument("--bias-start", type=_ANGLE, default=qubit.DEFAULT_BIAS_INTERVAL[0])
    p.add_argument("--bias-stop", type=_ANGLE, default=qubit.DEFAULT_BIAS_INTERVAL[1])
    p.add_argument("--points", type=_positive_int, default=31)

    p = sub.add_parser("evolve", help="integrate a schedule file")
    p.add_argument("--schedule", required=True, help="schedule DSL file")
    _add_integration(p, ("schrodinger", "master"))
    p.add_argument("--stride", type=_positive_int, default=100)

    p = sub.add_parser("analytic", help="closed-form population")
    p.add_argument("--plz", type=float, required=True, help="crossing probability")
    p.add_argument("--theta", type=_ANGLE, required=True)
    p.add_argument("--zeta1", type=_ANGLE, default=None,
                   help="use the transfer-matrix model with this pre-echo phase")
    p.add_argument("--zeta2", type=_ANGLE, default=0.0)
    p.add_argument("--stokes", type=_ANGLE, default=0.0)
    p.add_argument("--no-echo", action="store_true")
    return parser


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Parse ``argv`` (without the program name) into a `RunConfig`.

    Raises
    ------
    UsageError
    """
    ns = build_parser().parse_args(list(argv))
    if ns.subcommand is None:
        raise UsageError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
    params = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "schedule")}
    return RunConfig(ns.subcommand, params, getattr(ns, "schedule", None))


def _output_path(cfg: RunConfig):
    out = cfg.params.get("output")
    if out is not None:
        return out
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        Path(env).mkdir(parents=True, exist_ok=True)
        return str(Path(env) / f"{cfg.subcommand}.csv")
    return "-"


def _dec(p):
    return DecoherenceParams(p["t1"], p["t2"]) if p.get("method") == "master" else None


def _sweep_kwargs(p):
    return dict(method=p["method"], dec=_dec(p), dt=p["dt"], readout=p["readout"],
                p_lz=p["p_lz"], workers=p["workers"])


def _emit_sweep(res, p, out, argv, notes=()):
    meta = {k: v for k, v in p.items() if k != "output"}
    if p.get("shots"):
        shots = experiments.simulate_shots(res.p1.ravel(), p["shots"], p["seed"])
        header = [res.axis_name, "p1", "p1_shots"]
        write_table(out, header, zip(res.axis_values, res.p1, shots),
                    {"method": res.method, **res.params, **meta},
                    [f"argv = {' '.join(argv)}", f"contrast = {format_number(res.contrast)}",
                     *notes])
    else:
        write_csv(res, out, meta, [f"argv = {' '.join(argv)}", *notes])


def _grid(stop, n):
    return np.linspace(0.0, stop, n, endpoint=False)


def execute(cfg: RunConfig, argv: Sequence[str] = ()) -> None:
    """Run a parsed configuration, writing its output."""
    p = cfg.params
    out = _output_path(cfg)
    sc = cfg.subcommand
    argv = list(argv)
    if sc == "analytic":
        if p["zeta1"] is None and not p["no_echo"]:
            value = analytic.glzi_population(p["plz"], p["theta"])
        else:
            value = analytic.adiabatic_impulse_p1(analytic.ImpulseModelInputs(
                p["plz"], p["theta"], p["zeta1"] or 0.0, p["zeta2"], p["stokes"],
                not p["no_echo"]))
        print(format_number(value))
        return
    if sc == "glzi-map" and p["shots"]:
        raise UsageError("--shots is only supported for one-dimensional sweeps")
    if sc == "glzi":
        res = experiments.run_glzi_theta_sweep(
            _grid(p["theta_max"], p["theta_points"]), p["delta0"], p["omega"], p["tau_p"],
            p["tau_c"], **_sweep_kwargs(p))
        _emit_sweep(res, p, out, argv)
    elif sc == "glzi-map":
        res = experiments.run_glzi_map(
            _grid(p["theta_max"], p["theta_points"]), p["tau_p_list"], p["delta0"], p["omega"],
            p["tau_c"], **_sweep_kwargs(p))
        _emit_sweep(res, p, out, argv)
    elif sc == "dlzi":
        grid = np.linspace(p["tau_c_start"], p["tau_c_stop"], p["tau_c_points"])
        res = experiments.run_dlzi_sweep(grid, p["theta"], p["delta0"], p["omega"], p["tau_p"],
                                         **_sweep_kwargs(p))
        _emit_sweep(res, p, out, argv)
    elif sc == "trace":
        tt = experiments.run_time_trace(p["theta"], p["delta0"], p["omega"], p["tau_p"],
                                        p["tau_c"], p["method"], _dec(p), dt=p["dt"],
                                        sample_stride=p["stride"], readout=p["readout"],
                                        flatness=p["flatness"])
        write_csv(tt, out, {k: v for k, v in p.items() if k != "output"},
                  [f"argv = {' '.join(argv)}"])
    elif sc in ("t1", "t2"):
        dec = DecoherenceParams(p["t1"], p["t2"])
        if sc == "t1":
            grid = np.linspace(0.0, p["delay_stop"], p["delay_points"])
            res, fit = experiments.run_t1(grid, dec, p["dt"], workers=p["workers"])
        else:
            grid = np.linspace(0.0, p["tau_stop"], p["tau_points"])
            res, fit = experiments.run_t2_echo(grid, dec, p["dt"], workers=p["workers"])
        notes = [f"fit_amplitude = {format_number(fit.amplitude)}",
                 f"fit_time_constant_s = {format_number(fit.time_constant)}",
                 f"fit_offset = {format_number(fit.offset)}",
                 f"fit_time_constant_stderr_s = {format_number(fit.time_constant_stderr)}"]
        write_csv(res, out, {k: v for k, v in p.items() if k != "output"},
                  [f"argv = {' '.join(argv)}", *notes])
    elif sc == "spectroscopy":
        grid = np.linspace(p["bias_start"], p["bias_stop"], p["points"])
        curve = qubit.spectroscopy_curve(qubit.DEFAULT_PARAMS, grid)
        prm = qubit.DEFAULT_PARAMS
        meta = {"charging_energy": prm.charging_energy, "josephson_energy": prm.josephson_energy,
                "inductance_energy": prm.inductance_energy, "capacitance": prm.capacitance,
                "inductance": prm.inductance, "critical_current": prm.critical_current,
                **{k: v for k, v in p.items() if k != "output"}}
        write_table(out, ["phi_ex_rad", "omega_rad_per_s", "frequency_hz"],
                    ((b, w, w / (2 * math.pi)) for b, w in curve), meta,
                    [f"argv = {' '.join(argv)}"])
    elif sc == "evolve":
        try:
            text = Path(cfg.schedule_path).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read schedule: {exc}") from exc
        sched = parse_schedule(text)
        if p["method"] == "master":
            tr = evolve_master(sched, None, _dec(p), p["dt"], p["stride"])
        else:
            tr = evolve_schrodinger(sched, None, p["dt"], p["stride"])
        write_csv(tr, out, {"schedule": cfg.schedule_path,
                            **{k: v for k, v in p.items() if k != "output"}},
                  [f"argv = {' '.join(argv)}"])


def run_command(argv: Sequence[str]) -> int:
    """Parse and run ``argv``; return the process exit status."""
    try:
        cfg = parse_args(argv)
        execute(cfg, argv)
    except UsageError as exc:
        print(f"error: UsageError: {exc}", file=sys.stderr)
        return 2
    except (GeolzError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    """Console-script entry point."""
    sys.exit(run_command(sys.argv[1:]))
