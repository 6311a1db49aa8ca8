"""Command-line front end: ``steppot <command> <potential> [options]``.

Every table is written as CSV (or JSON) whose first line is ``#`` followed
by the fully resolved configuration as JSON. Exit codes: 0 success, 2 bad
configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence, TextIO

import numpy as np

from . import __version__, specfun, stepexp, steplinear, symwells, validate, wavepacket
from .common import RootFindingError, ThresholdError
from .stepexp import StepExpParams
from .steplinear import StepLinearParams

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

POTENTIALS = ("lin", "exp", "linwell", "expwell")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    potential: str
    params: dict[str, float] = field(default_factory=dict)
    defaulted: list[str] = field(default_factory=list)
    sweep: tuple[float, float, int] | None = None
    output_path: str | None = None
    format: str = "csv"
    extra: dict[str, Any] = field(default_factory=dict)

    def meta(self) -> dict[str, Any]:
        out = {"command": self.command, "potential": self.potential, **self.params}
        if self.sweep is not None:
            out["sweep"] = list(self.sweep)
        out.update(self.extra)
        if self.defaulted:
            out["defaulted"] = self.defaulted
        return out


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else format(float(v), ".17g")
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return None if math.isnan(v) else float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def write_table(
    stream: TextIO, meta: dict, columns: Sequence[str], rows: Iterable[Sequence], fmt: str = "csv"
) -> None:
    rows = list(rows)
    if fmt == "json":
        doc = {"meta": meta, "columns": list(columns), "rows": [dict(zip(columns, map(_jsonable, r))) for r in rows]}
        stream.write(json.dumps(doc) + "\n")
        return
    stream.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    stream.write(",".join(columns) + "\n")
    for r in rows:
        stream.write(",".join(_fmt(v) for v in r) + "\n")


class _Output:
    """Context manager yielding the requested output stream."""

    def __init__(self, path: str | None, suffix: str = ""):
        self.path = path
        self.suffix = suffix
        self._fh = None

    def __enter__(self) -> TextIO:
        if self.path is None or self.path == "-":
            return sys.stdout
        p = Path(self.path)
        if self.suffix:
            p = p.with_name(p.stem + self.suffix + p.suffix)
        self._fh = open(p, "w", encoding="utf-8", newline="\n")
        return self._fh

    def __exit__(self, *exc):
        if self._fh is not None:
            self._fh.close()
        return False


def parse_sweep(text: str) -> tuple[float, float, int]:
    try:
        a, b, n = text.split(":")
        lo, hi, count = float(a), float(b), int(n)
    except ValueError as exc:
        raise ConfigError(f"sweep must look like MIN:MAX:SAMPLES, got {text!r}") from exc
    if not lo < hi:
        raise ConfigError("sweep needs MIN < MAX")
    if count < 2:
        raise ConfigError("sweep needs at least 2 samples")
    return lo, hi, count


def _dimensionless_given(args) -> bool:
    return args.beta0 is not None or args.alpha is not None


def _physical_given(args) -> bool:
    # sigma is also the length unit of the dimensionless exponential case
    return any(getattr(args, k) is not None for k in ("M", "kappa", "U0"))


def resolve(args) -> tuple[RunConfig, Any]:
    """Turn parsed arguments into a :class:`RunConfig` and a parameter object."""
    pot = args.potential
    cfg = RunConfig(command=args.command, potential=pot, output_path=args.out, format=args.format)
    dimless, phys = _dimensionless_given(args), _physical_given(args)
    if dimless and phys:
        raise ConfigError("give either dimensionless (--beta0/--alpha) or physical parameters, not both")
    m = 1.0 if args.m is None else args.m
    hbar = 1.0 if args.hbar is None else args.hbar
    if args.m is None:
        cfg.defaulted.append("m")
    if args.hbar is None:
        cfg.defaulted.append("hbar")
    try:
        if pot == "lin":
            if phys:
                if args.M is None or args.U0 is None:
                    raise ConfigError("lin with physical parameters needs --M and --U0")
                params = StepLinearParams(M=args.M, U0=args.U0, m=m, hbar=hbar)
            else:
                if args.beta0 is None:
                    raise ConfigError("lin needs --beta0 (or --M and --U0)")
                alpha = 1.0 if args.alpha is None else args.alpha
                if args.alpha is None:
                    cfg.defaulted.append("alpha")
                params = StepLinearParams.from_dimensionless(args.beta0, alpha, m, hbar)
            cfg.params = {"alpha": params.alpha, "beta0": params.beta0, "M": params.M, "U0": params.U0, "m": m, "hbar": hbar}
        elif pot == "exp":
            if phys:
                if args.kappa is None or args.sigma is None or args.U0 is None:
                    raise ConfigError("exp with physical parameters needs --kappa, --sigma and --U0")
                params = StepExpParams(kappa=args.kappa, sigma=args.sigma, U0=args.U0, m=m, hbar=hbar)
            else:
                if args.beta0 is None:
                    raise ConfigError("exp needs --beta0 (or --kappa, --sigma and --U0)")
                alpha = 1.0 if args.alpha is None else args.alpha
                if args.alpha is None:
                    cfg.defaulted.append("alpha")
                sigma = 1.0 if args.sigma is None else args.sigma
                params = StepExpParams.from_dimensionless(args.beta0, alpha, sigma, m, hbar)
            cfg.params = {
                "alpha": params.alpha,
                "beta0": params.beta0,
                "kappa": params.kappa,
                "sigma": params.sigma,
                "U0": params.U0,
                "m": m,
                "hbar": hbar,
            }
        elif pot == "linwell":
            if args.beta0 is not None:
                raise ConfigError("linwell takes no --beta0")
            if args.M is None:
                alpha = 1.0 if args.alpha is None else args.alpha
                if args.alpha is None:
                    cfg.defaulted.append("alpha")
                M = alpha ** 3 * hbar ** 2 / (2.0 * m)
            else:
                M = args.M
            params = {"M": M, "m": m, "hbar": hbar}
            cfg.params = {"alpha": (2.0 * m * M / hbar ** 2) ** (1.0 / 3.0), **params}
        else:  # expwell
            if args.beta0 is not None:
                raise ConfigError("expwell takes no --beta0")
            if args.kappa is None:
                alpha = 1.0 if args.alpha is None else args.alpha
                if args.alpha is None:
                    cfg.defaulted.append("alpha")
                sigma = 1.0 if args.sigma is None else args.sigma
                kappa = alpha ** 2 * hbar ** 2 / (8.0 * m * sigma ** 2)
            else:
                if args.sigma is None:
                    raise ConfigError("expwell with --kappa also needs --sigma")
                kappa, sigma = args.kappa, args.sigma
            params = {"kappa": kappa, "sigma": sigma, "m": m, "hbar": hbar}
            cfg.params = {"alpha": math.sqrt(8.0 * m * kappa * sigma ** 2) / hbar, **params}
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if getattr(args, "sweep", None):
        cfg.sweep = parse_sweep(args.sweep)
    return cfg, params


def _module(params):
    return steplinear if isinstance(params, StepLinearParams) else stepexp


def _require(params, kinds: tuple, what: str):
    if not isinstance(params, kinds):
        raise ConfigError(f"{what} is not available for this potential")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _well_rows(cfg: RunConfig, params: dict, n: int):
    if cfg.potential in ("lin", "linwell"):
        levels = symwells.linear_well_levels(params["M"], params["m"], params["hbar"], n)
    else:
        levels = symwells.exp_well_levels(params["kappa"], params["sigma"], params["m"], params["hbar"], n)
    return levels


def _well_params(cfg: RunConfig, params) -> dict:
    """Well parameters from a step configuration (same left-hand potential)."""
    if isinstance(params, dict):
        return params
    if isinstance(params, StepLinearParams):
        return {"M": params.M, "m": params.m, "hbar": params.hbar}
    return {"kappa": params.kappa, "sigma": params.sigma, "m": params.m, "hbar": params.hbar}


def cmd_spectrum(cfg: RunConfig, params, args) -> int:
    if cfg.potential in ("linwell", "expwell"):
        n = args.n
        cfg.extra["n"] = n
        levels = _well_rows(cfg, params, n)
        with _Output(cfg.output_path) as out:
            write_table(
                out, cfg.meta(), ("n", "parity", "beta", "energy"),
                ((lv.n, lv.parity, lv.beta, lv.energy) for lv in levels), cfg.format,
            )
        return EXIT_OK
    mod = _module(params)
    states = mod.bound_states(params)
    cfg.extra["curves"] = bool(args.curves)
    with _Output(cfg.output_path) as out:
        write_table(out, cfg.meta(), ("n", "beta", "energy"), ((s.n, s.beta, s.energy) for s in states), cfg.format)
        if args.curves:
            lo = 0.0 if mod is steplinear else params.alpha ** 2
            hi = params.beta0
            betas = np.linspace(lo, hi, args.curve_samples + 1)[1:]
            lhs, rhs = mod.level_curves(params, betas)
            curve_meta = dict(cfg.meta(), table="curves")
            if cfg.output_path in (None, "-"):
                out.write("\n")
                write_table(out, curve_meta, ("beta", "lhs", "rhs"), zip(betas, lhs, rhs), cfg.format)
            else:
                with _Output(cfg.output_path, ".curves") as cout:
                    write_table(cout, curve_meta, ("beta", "lhs", "rhs"), zip(betas, lhs, rhs), cfg.format)
    return EXIT_OK


def cmd_delay(cfg: RunConfig, params, args) -> int:
    _require(params, (StepLinearParams, StepExpParams), "delay")
    if cfg.sweep is None:
        raise ConfigError("delay needs --sweep MIN:MAX:SAMPLES")
    mod = _module(params)
    betas = np.linspace(*cfg.sweep)
    rows = []
    for b in betas:
        if b - params.beta0 <= mod.THRESHOLD_GAP:
            rows.append((b, math.nan, math.nan, "threshold"))
            continue
        s = mod.delay(params, float(b))
        rows.append((b, s.tau, s.tau_classical, "ok"))
    cfg.extra["time_unit"] = "alpha*hbar/M" if mod is steplinear else "8*m*sigma^2/hbar"
    with _Output(cfg.output_path) as out:
        write_table(out, cfg.meta(), ("beta", "tau", "tau_classical", "status"), rows, cfg.format)
    return EXIT_OK


def cmd_resonances(cfg: RunConfig, params, args) -> int:
    _require(params, (StepLinearParams, StepExpParams), "resonances")
    if args.beta_max is None:
        raise ConfigError("resonances needs --beta-max")
    cfg.extra["beta_max"] = args.beta_max
    res = _module(params).resonances(params, args.beta_max)
    with _Output(cfg.output_path) as out:
        write_table(
            out, cfg.meta(), ("n", "eta_n", "beta_center", "height", "excess", "width"),
            ((r.n, r.eta_n, r.beta_center, r.height, r.excess, r.width) for r in res), cfg.format,
        )
    return EXIT_OK


def cmd_wells(cfg: RunConfig, params, args) -> int:
    cfg.extra["n"] = args.n
    levels = _well_rows(cfg, _well_params(cfg, params), args.n)
    with _Output(cfg.output_path) as out:
        write_table(
            out, cfg.meta(), ("n", "parity", "beta", "energy"),
            ((lv.n, lv.parity, lv.beta, lv.energy) for lv in levels), cfg.format,
        )
    return EXIT_OK


def cmd_packet(cfg: RunConfig, params, args) -> int:
    _require(params, (StepLinearParams, StepExpParams), "packet")
    if args.beta_peak is None:
        raise ConfigError("packet needs --beta-peak")
    if args.beta_peak <= params.beta0:
        raise ConfigError("--beta-peak must exceed beta0")
    cfg.extra.update(beta_peak=args.beta_peak, width_ratio=args.width_ratio)
    spec = wavepacket.packet_for_beta(params, args.beta_peak, args.width_ratio)
    tr = wavepacket.trace(params, spec)
    tau = wavepacket.measure_delay(tr)
    summary = {
        "tau_measured": tau,
        "tau_predicted": tr.tau_predicted,
        "tau_averaged": tr.tau_averaged,
        "beta_peak": args.beta_peak,
        "k_peak": spec.k_peak,
        "sigma_k": spec.sigma_k,
        "slope": tr.slope,
    }
    with _Output(cfg.output_path) as out:
        write_table(out, cfg.meta(), ("t", "x_centroid"), zip(tr.times, tr.centroid), cfg.format)
    side = sys.stderr if cfg.output_path in (None, "-") else sys.stdout
    side.write(json.dumps(summary) + "\n")
    return EXIT_OK


_SPECFUN = ("ai", "aip", "bi", "bip", "kimag", "kimag_dx")


def cmd_specfun(args) -> int:
    fn = args.function
    if args.x is None:
        raise ConfigError("specfun needs --x VALUE or --x MIN:MAX:SAMPLES")
    if ":" in args.x:
        xs = np.linspace(*parse_sweep(args.x))
    else:
        try:
            xs = np.array([float(args.x)])
        except ValueError as exc:
            raise ConfigError(f"bad --x {args.x!r}") from exc
    meta = {"command": "specfun", "function": fn, "x": args.x}
    rows = []
    if fn.startswith("kimag"):
        if args.s is None:
            raise ConfigError("kimag functions need --s (order is i s)")
        meta["s"] = args.s
        for x in xs:
            if x <= 0:
                raise ConfigError("K needs x > 0")
            if fn == "kimag":
                v, err = specfun.bessel_k_imag_with_error(args.s, float(x))
            else:
                v = specfun.bessel_k_imag_dx(args.s, float(x))
                err = abs(v) * 1e-14
            rows.append((x, v, "contour", err))
    else:
        key = {"ai": "ai", "aip": "ai_prime", "bi": "bi", "bip": "bi_prime"}[fn]
        for x in xs:
            p = specfun.airy(float(x))
            # deviation of the Wronskian from 1/pi gauges the working accuracy
            err = abs(p.wronskian * math.pi - 1.0) * abs(getattr(p, key))
            rows.append((x, getattr(p, key), p.method, err))
    with _Output(args.out) as out:
        write_table(out, meta, ("x", "value", "method", "err_estimate"), rows, args.format)
    return EXIT_OK


def cmd_validate(cfg: RunConfig, params, args) -> int:
    if cfg.potential in ("linwell", "expwell", "lin", "exp") and args.sweep is None:
        wp = _well_params(cfg, params)
        n = args.n
        cfg.extra["n"] = n
        levels = _well_rows(cfg, wp, n)
        top = levels[-1].beta + 2.0
        rows = []
        for parity in ("even", "odd"):
            fam = [lv for lv in levels if lv.parity == parity]
            if not fam:
                continue
            if cfg.potential in ("lin", "linwell"):
                prob = validate.linear_well_problem(parity, top)
            else:
                prob = validate.exp_well_problem(parity, levels[0].alpha, top)
            for lv, b in zip(fam, validate.numerov_eigenvalues(prob, len(fam))):
                rows.append((lv.n, parity, lv.beta, b, abs(b / lv.beta - 1.0)))
        rows.sort()
        with _Output(cfg.output_path) as out:
            write_table(out, cfg.meta(), ("n", "parity", "beta_analytic", "beta_numerov", "rel_diff"), rows, cfg.format)
        return EXIT_OK
    _require(params, (StepLinearParams, StepExpParams), "delay validation")
    mod = _module(params)
    rows = []
    for b in np.linspace(*cfg.sweep):
        if b - params.beta0 < 1e-2:
            continue
        tau = float(mod.delay_curve(params, float(b)))
        fd = validate.fd_derivative(lambda x: float(mod.phase_shift(params, x)), float(b), 1e-3)
        rows.append((b, tau, fd.value, fd.error, abs(fd.value / tau - 1.0)))
    with _Output(cfg.output_path) as out:
        write_table(out, cfg.meta(), ("beta", "tau", "tau_fd", "fd_error", "rel_diff"), rows, cfg.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, potentials: Sequence[str] = POTENTIALS) -> None:
    p.add_argument("potential", choices=potentials)
    g = p.add_argument_group("dimensionless parameters")
    g.add_argument("--beta0", type=float, help="dimensionless step height")
    g.add_argument("--alpha", type=float, help="alpha (inverse length for lin, dimensionless for exp); default 1")
    g = p.add_argument_group("physical parameters")
    g.add_argument("--M", type=float, help="slope of the linear branch")
    g.add_argument("--kappa", type=float)
    g.add_argument("--sigma", type=float)
    g.add_argument("--U0", type=float)
    g.add_argument("--m", type=float, help="mass (default 1)")
    g.add_argument("--hbar", type=float, help="reduced Planck constant (default 1)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steppot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="bound states (or well levels) as n,beta,energy")
    _add_common(p)
    p.add_argument("--curves", action="store_true", help="also emit the two sides of the level condition")
    p.add_argument("--curve-samples", type=int, default=400)
    p.add_argument("--n", type=int, default=10, help="number of well levels")

    p = sub.add_parser("delay", help="delay curve beta,tau,tau_classical")
    _add_common(p, ("lin", "exp"))
    p.add_argument("--sweep", help="MIN:MAX:SAMPLES in beta")

    p = sub.add_parser("resonances", help="delay peaks above the classical curve")
    _add_common(p, ("lin", "exp"))
    p.add_argument("--beta-max", type=float)

    p = sub.add_parser("wells", help="levels of the symmetric wells with parity")
    _add_common(p)
    p.add_argument("--n", type=int, default=10)

    p = sub.add_parser("packet", help="wave-packet centroid trace and measured delay")
    _add_common(p, ("lin", "exp"))
    p.add_argument("--beta-peak", type=float)
    p.add_argument("--width-ratio", type=float, default=0.01, help="sigma_k / k_peak")

    p = sub.add_parser("specfun", help="evaluate a special function")
    p.add_argument("function", choices=_SPECFUN)
    p.add_argument("--x", help="VALUE or MIN:MAX:SAMPLES")
    p.add_argument("--s", type=float, help="order parameter for kimag (order i s)")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("validate", help="oracle-vs-analytic tables")
    _add_common(p)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--sweep", help="MIN:MAX:SAMPLES: compare delay with finite differences of the phase")
    return parser


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "delay": cmd_delay,
    "resonances": cmd_resonances,
    "wells": cmd_wells,
    "packet": cmd_packet,
    "validate": cmd_validate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "specfun":
            return cmd_specfun(args)
        if getattr(args, "n", 1) is not None and getattr(args, "n", 1) < 1:
            raise ConfigError("--n must be >= 1")
        if args.command == "wells" or (args.command == "validate" and args.sweep is None):
            # the wells share the left branch of the steps but have no step height
            args.potential = {"lin": "linwell", "exp": "expwell"}.get(args.potential, args.potential)
        cfg, params = resolve(args)
        return _COMMANDS[args.command](cfg, params, args)
    except (ConfigError, ThresholdError) as exc:
        print(f"steppot: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RootFindingError, ArithmeticError, wavepacket.GridResolutionError) as exc:
        print(f"steppot: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
