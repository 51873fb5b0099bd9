"""Command-line front end.

Exit codes: 0 success, 2 usage or domain error, 3 no positive secrecy
capacity, 4 I/O error.  Parameter values come from built-in defaults, then an
optional ``--config`` file of ``key=value`` lines, then command-line flags.
"""

import argparse
import json
import logging
import os
import sys

from . import __version__, sectoring, sweep
from ._validation import CapabilityError, DomainError, InfeasibleError
from .montecarlo import McConfig, SimWindow
from .sweep import DEFAULTS, PARAM_NAMES, SCHEMES, SweepSpec

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4
OUTDIR_ENV = "ADHOC_SECRECY_OUTDIR"
MC_KEYS = ("trials", "seed", "window", "workers", "delta_trunc")
REPRODUCE_TRIALS = 10_000

log = logging.getLogger("adhoc_secrecy")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# parameter handling


def read_config(path):
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or (key not in DEFAULTS and key not in MC_KEYS):
                raise UsageError(f"{path}:{lineno}: expected key=value with a known key, got {raw.strip()!r}")
            out[key] = value.strip()
    return out


def _add_params(p):
    g = p.add_argument_group("model parameters")
    for name in PARAM_NAMES:
        flag = "--" + name.replace("_", "-")
        g.add_argument(flag, dest=name, default=None, metavar="X", help=f"default {DEFAULTS[name]}")
    p.add_argument("--config", help="file of key=value lines (overridden by flags)")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def _add_mc(p, trials):
    g = p.add_argument_group("simulation")
    g.add_argument("--trials", default=None, help=f"Monte Carlo trials (default {trials})")
    g.add_argument("--seed", default=None, help="base seed (default 0)")
    g.add_argument("--window", default=None, help="window radius (default: sized from delta-trunc)")
    g.add_argument("--delta-trunc", dest="delta_trunc", default=None, help="truncation bias budget (default 1e-3)")
    g.add_argument("--workers", default=None, help="threads evaluating trial blocks (default 1)")


def resolve(args):
    """``(model parameter map, simulation settings)`` after applying precedence."""
    from_file = read_config(args.config) if args.config else {}
    cfg = dict(DEFAULTS)
    mc = {}
    for src in (from_file, {k: v for k, v in vars(args).items() if v is not None}):
        for key, value in src.items():
            if key in DEFAULTS:
                cfg[key] = sweep.coerce(key, value)
            elif key in MC_KEYS:
                mc[key] = value
    return cfg, mc


def mc_config(mc, default_trials):
    def num(key, cast, default):
        if key not in mc:
            return default
        try:
            return cast(mc[key])
        except ValueError:
            raise DomainError(f"{key} must be a number, got {mc[key]!r}") from None

    window = num("window", float, None)
    return McConfig(
        trials=num("trials", int, default_trials),
        seed=num("seed", int, 0),
        window=SimWindow(window) if window is not None else None,
        delta_trunc=num("delta_trunc", float, 1e-3),
        workers=num("workers", int, 1),
    )


def _emit(record, as_json, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(record, allow_nan=True) + "\n")
        return
    width = max(map(len, record))
    for k, v in record.items():
        # repr is the shortest string that round-trips a float
        text = repr(v) if isinstance(v, float) else str(v)
        out.write(f"{k:<{width}}  {text}\n")


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args):
    cfg, _ = resolve(args)
    v = sweep.evaluate(args.scheme, args.quantity, cfg)
    if not v.feasible and args.quantity in ("phi_opt", "capacity_opt"):
        raise InfeasibleError("no positive secrecy capacity")
    record = {"scheme": args.scheme, "quantity": args.quantity, "value": v.value, "approx": v.approx, "feasible": v.feasible}
    record.update(cfg)
    _emit(record, args.json)


def cmd_sweep(args):
    cfg, _ = resolve(args)
    schemes = SCHEMES if "both" in args.scheme else tuple(dict.fromkeys(args.scheme))
    spec = SweepSpec(
        schemes=schemes,
        quantities=tuple(dict.fromkeys(args.quantity)),
        param=args.param.replace("-", "_"),
        start=float(args.start),
        stop=float(args.stop),
        count=int(args.count),
        spacing=args.spacing,
        fixed=cfg,
    )
    rows = sweep.run_sweep(spec)
    cols = [spec.param] + sweep.columns(spec.schemes, spec.quantities)
    meta = sweep.metadata("sweep", spec.schemes, spec.quantities, spec.param, cfg)
    fmt_name = "json" if args.json else "csv"
    if args.output:
        sweep.write_output(args.output, meta, cols, rows, fmt_name)
        sys.stdout.write(f"wrote {len(rows)} rows to {args.output}\n")
    else:
        text = sweep.dumps_json(meta, cols, rows) if args.json else sweep.dumps_csv(meta, cols, rows)
        sys.stdout.write(text)


def cmd_optimize(args):
    cfg, _ = resolve(args)
    params = sweep.network(cfg)
    sigma, eps = cfg["sigma"], cfg["epsilon"]
    phi = sweep.evaluate(args.scheme, "phi_opt", cfg)
    if not phi.feasible:
        raise InfeasibleError("no positive secrecy capacity")
    cap = sweep.evaluate(args.scheme, "capacity_opt", cfg)
    record = {"scheme": args.scheme, "phi_opt": phi.value, "capacity": cap.value, "approx": phi.approx}
    if args.scheme == "sectoring" and params.alpha == 4.0:
        closed = sectoring.optimal_phi_alpha4(params, sigma, eps).phi
        record["phi_closed_form"] = closed
        record["phi_discrepancy"] = abs(closed - phi.value)
    record.update(cfg)
    _emit(record, args.json)


def simulate_record(scheme, quantity, cfg, mc_cfg):
    """Estimate plus analytic comparators and the PASS/FAIL verdict."""
    est = sweep.simulate(scheme, quantity, cfg, mc_cfg)
    record = {"scheme": scheme, "quantity": quantity}
    record.update(est.to_dict())
    n = est.trials
    if quantity == "pco":
        ref = sweep.evaluate(scheme, "pco", cfg)
        record["analytic"] = ref.value
        record["analytic_approx"] = ref.approx
        # standard error under the analytic value keeps the check meaningful when p_hat is 0
        se = max(est.std_err, (ref.value * (1 - ref.value) / n) ** 0.5)
        ok = abs(est.p_hat - ref.value) <= 3 * se
    else:
        lb = sweep.evaluate(scheme, "pso_lb", cfg).value
        ub = sweep.evaluate(scheme, "pso_ub", cfg).value
        record["analytic_lb"], record["analytic_ub"] = lb, ub
        se = max(est.std_err, (ub * (1 - ub) / n) ** 0.5)
        ok = lb - 3 * se <= est.p_hat <= ub + 3 * se
    record["check"] = "PASS" if ok else "FAIL"
    return record


def cmd_simulate(args):
    cfg, mc = resolve(args)
    mc_cfg = mc_config(mc, 100_000)
    record = simulate_record(args.scheme, args.quantity, cfg, mc_cfg)
    record.update(cfg)
    _emit(record, args.json)
    if args.output:
        meta = sweep.metadata("simulate", (args.scheme,), (args.quantity,), None, cfg, seed=mc_cfg.seed)
        cols = [k for k in record if k not in DEFAULTS]
        sweep.write_output(args.output, meta, cols, [record], "json" if args.json else "csv")


# ---------------------------------------------------------------------------
# figure reproduction

FIG_PHI = dict(start=0.05, stop=0.95, count=19)
FIG4_PHI = dict(start=0.02, stop=0.98, count=49)
FIG_N = dict(start=2, stop=64, count=63)
SMALL_N = (2, 4, 8)
ALPHAS = (3.0, 4.0, 5.0)

FIGURES = {
    1: dict(scheme="sectoring", quantities=("pso_ub", "pso_lb"), mc="pso", fixed=dict(alpha=4.0, lambda_l=0.01, lambda_e=0.001, beta_e=1.0)),
    2: dict(scheme="beamforming", quantities=("pco_exact", "pco_approx"), mc="pco", fixed=dict(lambda_l=0.01, r=1.0, alpha=4.0, beta_b=3.0)),
    3: dict(scheme="beamforming", quantities=("pso_ub", "pso_lb"), mc="pso", fixed=dict(alpha=4.0, lambda_l=0.01, lambda_e=0.001, beta_e=3.0)),
    4: dict(quantities=("pco", "pso_ub"), fixed=dict(lambda_l=0.01, lambda_e=0.001, r=1.0, alpha=4.0, n=4, beta_b=10.0, beta_e=1.0)),
    5: dict(quantities=("phi_opt",), fixed=dict(lambda_l=0.01, lambda_e=0.001, r=1.0, sigma=0.1, epsilon=0.01)),
    6: dict(quantities=("capacity_opt",), fixed=dict(lambda_l=0.01, lambda_e=0.001, r=1.0, sigma=0.1, epsilon=0.01)),
}


def reproduce_jobs(fig):
    """``[(file name, SweepSpec, simulated quantity or None)]`` for one figure."""
    info = FIGURES[fig]
    jobs = []
    if fig in (1, 2, 3):
        for n in SMALL_N:
            fixed = dict(DEFAULTS, **info["fixed"], n=n)
            spec = SweepSpec((info["scheme"],), info["quantities"], "phi", fixed=fixed, **FIG_PHI)
            jobs.append((f"fig{fig}_{info['scheme']}_n{n}.csv", spec, info["mc"]))
    elif fig == 4:
        for s in SCHEMES:
            spec = SweepSpec((s,), info["quantities"], "phi", fixed=dict(DEFAULTS, **info["fixed"]), **FIG4_PHI)
            jobs.append((f"fig4_{s}.csv", spec, None))
    else:
        for s in SCHEMES:
            for a in ALPHAS:
                fixed = dict(DEFAULTS, **info["fixed"], alpha=a)
                spec = SweepSpec((s,), info["quantities"], "n", fixed=fixed, **FIG_N)
                jobs.append((f"fig{fig}_{s}_alpha{a:g}.csv", spec, None))
    return jobs


def cmd_reproduce(args):
    _, mc = resolve(args)
    fig = int(args.figure)
    if fig not in FIGURES:
        raise UsageError(f"figure must be one of 1..6, got {args.figure}")
    outdir = args.outdir or os.environ.get(OUTDIR_ENV) or "."
    os.makedirs(outdir, exist_ok=True)
    mc_cfg = None if args.no_mc else mc_config(mc, REPRODUCE_TRIALS)
    for name, spec, sim in reproduce_jobs(fig):
        use_mc = sim is not None and mc_cfg is not None
        rows = sweep.run_sweep(spec, mc=(sim, mc_cfg) if use_mc else None)
        cols = [spec.param] + sweep.columns(spec.schemes, spec.quantities)
        extra = {"figure": str(fig)}
        if use_mc:
            cols += [c for c in rows[0] if c not in cols]
            extra.update(mc_quantity=sim, trials=str(mc_cfg.trials))
        meta = sweep.metadata(
            "reproduce", spec.schemes, spec.quantities, spec.param, spec.fixed,
            seed=mc_cfg.seed if use_mc else None, extra=extra,
        )
        path = os.path.join(outdir, name)
        sweep.write_output(path, meta, cols, rows)
        sys.stdout.write(f"wrote {path}\n")


# ---------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="adhoc-secrecy", description="Secrecy outage and capacity of sectoring and beamforming with artificial noise.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="evaluate one quantity")
    e.add_argument("scheme", choices=SCHEMES)
    e.add_argument("quantity", choices=sweep.QUANTITIES)
    _add_params(e)
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="evaluate quantities over a parameter grid")
    s.add_argument("--scheme", nargs="+", choices=SCHEMES + ("both",), required=True)
    s.add_argument("--quantity", nargs="+", choices=sweep.QUANTITIES, required=True)
    s.add_argument("--param", required=True, help="parameter to sweep")
    s.add_argument("--start", required=True)
    s.add_argument("--stop", required=True)
    s.add_argument("--count", required=True)
    s.add_argument("--spacing", choices=("lin", "log"), default="lin")
    s.add_argument("-o", "--output", help="output file (default stdout)")
    _add_params(s)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("optimize", help="optimal power split and maximized capacity")
    o.add_argument("scheme", choices=SCHEMES)
    _add_params(o)
    o.set_defaults(func=cmd_optimize)

    m = sub.add_parser("simulate", help="Monte Carlo estimate with analytic comparison")
    m.add_argument("scheme", choices=SCHEMES)
    m.add_argument("quantity", choices=sweep.SIM_QUANTITIES)
    m.add_argument("-o", "--output", help="also write the record to this file")
    _add_params(m)
    _add_mc(m, 100_000)
    m.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reproduce", help="write the data series of one figure")
    r.add_argument("figure", type=int, choices=sorted(FIGURES))
    r.add_argument("--outdir", help=f"output directory (default ${OUTDIR_ENV} or .)")
    r.add_argument("--no-mc", action="store_true", help="skip the Monte Carlo columns")
    _add_params(r)
    _add_mc(r, REPRODUCE_TRIALS)
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"adhoc-secrecy: usage error: {exc}\n")
        return EXIT_USAGE
    except InfeasibleError as exc:
        sys.stderr.write(f"adhoc-secrecy: {exc}\n")
        return EXIT_INFEASIBLE
    except (DomainError, CapabilityError) as exc:
        sys.stderr.write(f"adhoc-secrecy: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"adhoc-secrecy: I/O error: {exc}\n")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
