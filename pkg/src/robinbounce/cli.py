"""Command-line front end.

Every subcommand prints a table to stdout, as CSV (default) or JSON with a
``meta`` block. Diagnostics go to stderr. Exit codes: 0 success, 1 usage
error, 2 numerical failure.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .elements import Operator, matrix_element
from .qbounce import (
    G_ILL,
    Constants,
    FitFailure,
    Measurement,
    PhysicalScales,
    extract_g,
    fit_lambda,
    energies_table,
    penetration,
    transition_frequency,
)
from .rules import SumRuleKind, anticommutator_check, sum_rule, uncertainty_bound, variances
from .special import RootFindingError
from .spectrum import (
    PoleError,
    as_param,
    eigenfunction_value,
    eigenstate,
    is_neumann,
    lambda_from_phase,
    phase_residual,
)

CONFIG_KEYS = {"mass", "g", "hbar", "h", "eV", "format", "precision"}
DEFAULT_PRECISION = 10


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- settings

def load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError(f"cannot read config {path}: {err}")
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    for key in cfg:
        if key not in CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r}")
    return cfg


def settings(args):
    """Merge defaults, config file and flags (flags win)."""
    cfg = load_config(args.config)
    base = Constants()
    out = {
        "mass": float(cfg.get("mass", base.mass)),
        "g": float(cfg.get("g", G_ILL)),
        "hbar": float(cfg.get("hbar", base.hbar)),
        "h": float(cfg.get("h", base.h)),
        "eV": float(cfg.get("eV", base.eV)),
        "format": cfg.get("format", "csv"),
        "precision": int(cfg.get("precision", DEFAULT_PRECISION)),
    }
    if getattr(args, "g", None) is not None:
        out["g"] = args.g
    if args.format is not None:
        out["format"] = args.format
    if args.precision is not None:
        out["precision"] = args.precision
    if out["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {out['format']!r}")
    if out["precision"] < 1:
        raise UsageError("precision must be >= 1")
    return out


def scales_of(conf):
    consts = Constants(conf["mass"], conf["hbar"], conf["h"], conf["eV"])
    return PhysicalScales(conf["mass"], conf["g"], consts)


# ------------------------------------------------------------------ output

def _fmt(value, precision):
    if isinstance(value, (bool, np.bool_)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return float(f"{value:.{precision}g}")
    return value


def emit(rows, conf, command, meta=None, out=None):
    out = out or sys.stdout
    p = conf["precision"]
    rows = [{k: _fmt(v, p) for k, v in r.items()} for r in rows]
    if conf["format"] == "json":
        digest = hashlib.sha256(json.dumps(conf, sort_keys=True).encode()).hexdigest()
        head = {"command": command, "version": __version__, "config_hash": digest}
        head.update(meta or {})
        out.write(json.dumps({"meta": head, "rows": rows}, indent=2) + "\n")
        return
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: f"{v:.{p}g}" if isinstance(v, float) else v for k, v in r.items()})
    out.write(buf.getvalue())


def _lam(text):
    try:
        return as_param(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid lambda {text!r}")


def _pair(text):
    try:
        n, k = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N:K, got {text!r}")
    return n, k


def _lam_out(lam):
    return "inf" if is_neumann(lam) else lam


# ---------------------------------------------------------------- commands

def cmd_spectrum(args, conf):
    scales = scales_of(conf)
    rows = []
    for r in energies_table(scales, args.lam, args.n_max, args.e0_pev):
        st = eigenstate(args.lam, r.n)
        rows.append({"n": r.n, "zeta": r.zeta, "energy_peV": r.energy_peV,
                     "psi0": st.psi0, "dpsi0": st.dpsi0})
    e0 = scales.E0_peV if args.e0_pev is None else args.e0_pev
    return rows, {"lambda": _lam_out(args.lam), "E0_peV": e0}


def cmd_eigenfunction(args, conf):
    scales = scales_of(conf)
    xi = np.linspace(0.0, args.xi_max, args.points)
    states = [eigenstate(args.lam, n) for n in args.states]
    dens = [eigenfunction_value(s, xi) ** 2 for s in states]
    rows = []
    for i, x in enumerate(xi):
        row = {"xi": x, "x_um": x * scales.x0 * 1e6}
        for s, d in zip(states, dens):
            row[f"rho_{s.n}"] = d[i]
        rows.append(row)
    return rows, {"lambda": _lam_out(args.lam), "density_unit": "1/x0"}


def cmd_elements(args, conf):
    op = Operator(args.op)
    first = 0 if (isinstance(args.lam, float) and args.lam < 0) else 1
    rows = []
    for n in range(first, args.n_max + 1):
        for k in range(first, args.n_max + 1):
            el = matrix_element(args.lam, n, k, op, q=args.q, side=args.side)
            v = complex(el.value)
            rows.append({"n": n, "k": k, "re": v.real, "im": v.imag})
    return rows, {"lambda": _lam_out(args.lam), "operator": op.value,
                  "unit": el.unit, "side": args.side}


def cmd_sumrule(args, conf):
    kind = SumRuleKind(args.kind)
    rep = sum_rule(kind, args.n, args.lam, args.m_max, q=args.q)
    row = {"kind": kind.value, "n": rep.n, "m_max": rep.m_max,
           "lhs_partial": rep.lhs_partial, "tail_estimate": rep.tail_estimate,
           "lhs_total": rep.lhs_total, "rhs_closed": rep.rhs_closed,
           "relative_error": rep.relative_error, "tolerance": rep.tolerance,
           "converged": rep.converged, "note": rep.note}
    meta = {"lambda": _lam_out(args.lam), "unit": rep.unit}
    if args.anticommutator:
        row["anticommutator"] = anticommutator_check(args.lam, args.n, args.m_max)
    return [row], meta


def cmd_uncertainty(args, conf):
    rows = []
    for n in range(1, args.n_max + 1):
        v = variances(args.lam, n)
        rows.append({"n": n, "delta_x": v.delta_x, "delta_p": v.delta_p,
                     "product": v.product,
                     "bound": uncertainty_bound(args.lam, n, "amplitude"),
                     "bound_ket": uncertainty_bound(args.lam, n, "ket")})
    return rows, {"lambda": _lam_out(args.lam), "unit": "hbar"}


def _measurements(args, parser):
    nus, sigmas = args.nu, args.sigma
    pairs = args.transition or [(1, 6)] * len(nus)
    if not (len(nus) == len(sigmas) == len(pairs)):
        parser.error("--nu, --sigma and --transition must be given the same number of times")
    try:
        return [Measurement(a, b, t) for a, b, t in zip(nus, sigmas, pairs)]
    except ValueError as err:
        raise UsageError(str(err))


def cmd_fit(args, conf):
    data = _measurements(args, args.parser)
    res = fit_lambda(data, scales_of(conf), window=tuple(args.window))
    row = {"lambda_min": res.lambda_min, "delta_lambda": res.delta_lambda,
           "delta_minus": res.delta_minus, "delta_plus": res.delta_plus,
           "chi2_min": res.chi2_min}
    for m, nu in zip(data, res.nu_model):
        row[f"nu_model_{m.transition[0]}_{m.transition[1]}"] = nu
    return [row], {}


def cmd_extract_g(args, conf):
    data = _measurements(args, args.parser)
    scales = scales_of(conf)
    rows = []
    for m in data:
        g = extract_g(m, args.lam, scales)
        rows.append({"n": m.transition[0], "k": m.transition[1], "g": g,
                     "sigma_g": 1.5 * g * m.sigma / m.nu})
    return rows, {"lambda": _lam_out(args.lam), "g_reference": scales.g}


def cmd_penetration(args, conf):
    scales = scales_of(conf)
    rows = []
    for n in range(1, args.n_max + 1):
        r = penetration(args.lam, n, scales)
        rows.append({"n": n, "kappa0": r.kappa0, "p_in": r.p_in})
    return rows, {"lambda": _lam_out(args.lam), "kappa0_unit": "1/m"}


def cmd_phase_map(args, conf):
    thetas = np.linspace(0.0, 2.0 * math.pi, args.theta_steps)
    epss = np.linspace(args.eps_max / args.eps_steps, args.eps_max, args.eps_steps)
    rows = []
    for th in thetas:
        for e in epss:
            try:
                ratio = lambda_from_phase(th, e)
                resid = phase_residual(th, e)
            except PoleError:
                ratio, resid = math.inf, math.nan
            wall = 1.0 / ratio if ratio not in (0.0, math.inf) else math.inf
            rows.append({"theta": th, "eps_eta": e, "lambda": ratio,
                         "wall_lambda": wall, "imag_residual": resid})
    return rows, {"lambda_meaning": "psi'(0)/psi(0); wall_lambda = psi(0)/psi'(0)"}


def _observable(args, scales):
    obs = args.observable
    if obs == "energy":
        return lambda lam: -scales.E0_peV * eigenstate(lam, args.n).zeta, "peV"
    if obs == "transition":
        if args.k is None:
            raise UsageError("transition sweep needs --k")
        return lambda lam: transition_frequency(scales, lam, args.n, args.k), "Hz"
    return lambda lam: uncertainty_bound(lam, args.n), "hbar"


def cmd_sweep(args, conf):
    if args.steps < 2:
        args.parser.error("--steps must be >= 2")
    if args.log:
        if args.lambda_min <= 0:
            raise UsageError("--log needs a positive --lambda-min")
        grid = np.geomspace(args.lambda_min, args.lambda_max, args.steps)
    else:
        grid = np.linspace(args.lambda_min, args.lambda_max, args.steps)
    fn, unit = _observable(args, scales_of(conf))
    rows = [{"lambda": float(x), "value": fn(float(x))} for x in grid]
    label = args.observable + (f"({args.n},{args.k})" if args.observable == "transition" else f"({args.n})")
    return rows, {"observable": label, "unit": unit}


def cmd_verify(args, conf):
    from .verify import run_checks

    rows = run_checks(perturb=args.debug_perturb_root)
    return rows, {"all_passed": all(r["passed"] for r in rows)}


# ------------------------------------------------------------------ parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with constants/output overrides")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--precision", type=int, default=None,
                        help="significant digits (default 10)")

    parser = Parser(prog="robinbounce", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    def add(name, fn, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=fn, parser=p)
        return p

    def lam_arg(p, default=None):
        p.add_argument("--lambda", dest="lam", type=_lam, default=default,
                       required=default is None,
                       help="wall parameter; 'inf' or 'neumann' for the Neumann limit")

    p = add("spectrum", cmd_spectrum, "energy levels")
    lam_arg(p)
    p.add_argument("--n-max", type=int, default=7)
    p.add_argument("--g", type=float, help="gravitational acceleration, m/s^2")
    p.add_argument("--e0-pev", type=float, help="use this E0 (peV) instead of the computed one")

    p = add("eigenfunction", cmd_eigenfunction, "probability densities on a grid")
    lam_arg(p)
    p.add_argument("--states", type=int, nargs="+", default=[1, 2, 3, 4])
    p.add_argument("--xi-max", type=float, default=12.0)
    p.add_argument("--points", type=int, default=241)

    p = add("elements", cmd_elements, "matrix elements")
    lam_arg(p)
    p.add_argument("--op", choices=[o.value for o in Operator], default="x")
    p.add_argument("--q", type=int, default=1, help="power of xi for --op x")
    p.add_argument("--side", choices=["bra", "ket"], default="bra")
    p.add_argument("--n-max", type=int, default=4)

    p = add("sumrule", cmd_sumrule, "sum-rule partial sums")
    lam_arg(p)
    p.add_argument("--kind", choices=[k.value for k in SumRuleKind], required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m-max", type=int, default=2000)
    p.add_argument("--q", type=float, help="wavenumber in 1/x0 for the Bethe rule")
    p.add_argument("--anticommutator", action="store_true",
                   help="also report the truncated {x, p} expectation")

    p = add("uncertainty", cmd_uncertainty, "spreads and uncertainty bounds")
    lam_arg(p)
    p.add_argument("--n-max", type=int, default=4)

    for name, fn in (("fit", cmd_fit), ("extract-g", cmd_extract_g)):
        p = add(name, fn, "fit lambda to measured frequencies" if name == "fit"
                else "local g from a measured frequency")
        p.add_argument("--nu", type=float, action="append", required=True, help="Hz")
        p.add_argument("--sigma", type=float, action="append", required=True, help="Hz")
        p.add_argument("--transition", type=_pair, action="append", help="N:K (default 1:6)")
        p.add_argument("--g", type=float, help="reference g, m/s^2")
        if name == "fit":
            p.add_argument("--window", type=float, nargs=2, default=[-1.0, 5.0])
        else:
            lam_arg(p, default=0.0)

    p = add("penetration", cmd_penetration, "penetration under the mirror")
    lam_arg(p)
    p.add_argument("--n-max", type=int, default=1)

    p = add("phase-map", cmd_phase_map, "lambda from the U(1) extension phase")
    p.add_argument("--theta-steps", type=int, default=32)
    p.add_argument("--eps-steps", type=int, default=16)
    p.add_argument("--eps-max", type=float, default=3.0)

    p = add("sweep", cmd_sweep, "observable against lambda")
    p.add_argument("--observable", choices=["energy", "transition", "uncertainty"], required=True)
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--log", action="store_true", help="geometric grid")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--k", type=int)
    p.add_argument("--g", type=float)

    p = add("verify", cmd_verify, "oracle cross-check suite")
    p.add_argument("--debug-perturb-root", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        conf = settings(args)
        rows, meta = args.func(args, conf)
        if args.command == "verify":
            conf = dict(conf, format="json")
        emit(rows, conf, args.command, meta)
    except UsageError as err:
        print(f"robinbounce: error: {err}", file=sys.stderr)
        return 1
    except (RootFindingError, FitFailure, PoleError, ArithmeticError, RuntimeError) as err:
        print(f"robinbounce: numerical failure: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"robinbounce: error: {err}", file=sys.stderr)
        return 1
    if args.command == "verify" and not meta["all_passed"]:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
