"""Command-line interface: ``ptmachine {run,sweep,compare,selfcheck}``."""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed

from .analytic_cycle import Regime, ThermoReport
from .config import SweepSpec, parse_config
from .cycle_runner import compare_modes, first_law_check, run_cycle
from .errors import NumericError, PTMachineError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

CSV_HEADER = "axis,mu,sigma,omega1,omega2,beta,w_net,q2,q4,regime,merit,first_law_residual"

_REPORT_ROWS = (
    ("U0", "u0"), ("U1", "u1"), ("U2", "u2"), ("U3", "u3"), ("U4", "u4"),
    ("W_net", "w_net"), ("Q2 (measurement)", "q2"), ("Q4 (bath)", "q4"),
    ("first-law residual", "first_law_residual"),
)


def fmt(x: float) -> str:
    """Shortest round-trip float text; identical across runs."""
    return repr(float(x))


def _load(args):
    overrides = {}
    for item in args.set or ():
        if "=" not in item:
            raise ValidationError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    if args.backend:
        overrides["backend"] = args.backend
    if args.mode:
        overrides["mode"] = args.mode
    return parse_config(args.config, overrides)


def format_report(r: ThermoReport) -> str:
    lines = [f"backend: {r.backend.value}   mode: {r.mode.value}"]
    if r.fock_dim:
        lines[0] += f"   fock_dim: {r.fock_dim}"
    for label, attr in _REPORT_ROWS:
        lines.append(f"  {label:<20} {getattr(r, attr): .10g}")
    lines.append(f"  {'regime':<20} {r.regime.value}")
    name = {Regime.ENGINE: "efficiency", Regime.REFRIGERATOR: "COP"}.get(r.regime, "merit")
    lines.append(f"  {name:<20} {r.merit: .10g}")
    if r.bath_steps:
        lines.append(f"  {'bath steps':<20} {r.bath_steps}")
    return "\n".join(lines)


def cmd_run(args, out) -> int:
    params = _load(args)
    if isinstance(params, SweepSpec):
        raise ValidationError("config describes a sweep; use the sweep subcommand")
    report = run_cycle(params)
    first_law_check(report)
    if args.json:
        json.dump(_finite(report.as_dict()), out, indent=2, allow_nan=False)
        out.write("\n")
    else:
        out.write(format_report(report) + "\n")
    return EXIT_OK


def _finite(obj):
    """NaN/inf are not valid JSON; emit them as null."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _sweep_row(spec: SweepSpec, value: float) -> str:
    p = spec.point(value)
    base = [spec.axis, fmt(p.mu), fmt(p.sigma), fmt(p.omega1), fmt(p.omega2), fmt(p.beta)]
    try:
        r = run_cycle(p)
        first_law_check(r)
    except PTMachineError:
        nan = fmt(float("nan"))
        return ",".join(base + [nan, nan, nan, "ERROR", nan, nan])
    return ",".join(
        base
        + [fmt(r.w_net), fmt(r.q2), fmt(r.q4), r.regime.value, fmt(r.merit), fmt(r.first_law_residual)]
    )


def sweep_csv(spec: SweepSpec, threads: int = 1) -> str:
    values = spec.values()
    rows = [None] * len(values)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = {pool.submit(_sweep_row, spec, v): i for i, v in enumerate(values)}
        for fut in as_completed(futures):
            rows[futures[fut]] = fut.result()
    return "\n".join([CSV_HEADER, *rows]) + "\n"


def cmd_sweep(args, out) -> int:
    spec = _load(args)
    if not isinstance(spec, SweepSpec):
        raise ValidationError("sweep config needs axis, start, stop and points")
    text = sweep_csv(spec, args.threads)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_compare(args, out) -> int:
    params = _load(args)
    if isinstance(params, SweepSpec):
        raise ValidationError("config describes a sweep; use the sweep subcommand")
    cmp = compare_modes(params)
    if args.json:
        json.dump(_finite(cmp.as_dict()), out, indent=2, allow_nan=False)
        out.write("\n")
        return EXIT_OK
    out.write(f"{'':<14}{'paper':>16}{'channel':>16}\n")
    for label, a, b in (
        ("W_net", cmp.paper.w_net, cmp.channel.w_net),
        ("Q2", cmp.q2_paper, cmp.q2_channel),
        ("Q4", cmp.paper.q4, cmp.channel.q4),
    ):
        out.write(f"{label:<14}{a:>16.8g}{b:>16.8g}\n")
    out.write(f"{'regime':<14}{cmp.paper.regime.value:>16}{cmp.channel.regime.value:>16}\n")
    out.write(f"delta Q2 = {cmp.delta_q2:.8g}   delta W_net = {cmp.delta_w_net:.8g}\n")
    if cmp.delta_regime:
        out.write("regime divergence: paper and channel bookkeeping disagree\n")
    return EXIT_OK


def cmd_selfcheck(args, out) -> int:
    from .selfcheck import run_all

    ok = run_all(echo=lambda line: out.write(line + "\n"))
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptmachine",
        description="Measurement-based quantum Otto machine with a PT-symmetric bath.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sweep=False):
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config entry")
        p.add_argument("--backend", choices=("analytic", "fock", "gaussian"))
        p.add_argument("--mode", choices=("paper", "channel"))
        p.add_argument("--json", action="store_true", help="emit JSON instead of a table")
        if sweep:
            p.add_argument("--out", help="CSV output path (default stdout)")
            p.add_argument("--threads", type=int, default=1, help="worker threads")

    common(sub.add_parser("run", help="evaluate one cycle"))
    common(sub.add_parser("sweep", help="sweep one parameter and write CSV"), sweep=True)
    common(sub.add_parser("compare", help="paper vs channel measurement bookkeeping"))
    sub.add_parser("selfcheck", help="run the fast invariant suite")
    return parser


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "compare": cmd_compare, "selfcheck": cmd_selfcheck}


def main(argv=None, out: io.TextIOBase | None = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericError as exc:
        print(f"numeric failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
