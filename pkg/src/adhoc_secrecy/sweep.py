"""Point evaluation, parameter sweeps and the lossless CSV/JSON record format.

A sweep file carries every fixed parameter in ``#`` header lines, so each
analytic column can be re-evaluated from the file alone and compared bit for
bit (:func:`verify_file`).
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__, beamforming, montecarlo, sectoring
from ._validation import DomainError, InfeasibleError, check_probability
from .model import NetworkParams, PowerSplit
from .specfun import ZETA_MAX_ANTENNAS

SCHEMES = ("sectoring", "beamforming")
QUANTITIES = (
    "pco",
    "pso_ub",
    "pso_lb",
    "pso_lead",
    "pco_exact",
    "pco_approx",
    "capacity",
    "capacity_opt",
    "phi_opt",
)
SIM_QUANTITIES = ("pco", "pso")

DEFAULTS = dict(
    lambda_l=0.01,
    lambda_e=0.001,
    r=1.0,
    alpha=4.0,
    n=4,
    p_total=1.0,
    phi=0.5,
    beta_b=1.0,
    beta_e=1.0,
    sigma=0.1,
    epsilon=0.01,
)
PARAM_NAMES = tuple(DEFAULTS)
INT_PARAMS = frozenset({"n"})


def fmt(x):
    """17 significant digits; enough for every double to round-trip."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % x


def coerce(name, value):
    """Parse one parameter value, honouring integer-valued names."""
    if name not in DEFAULTS:
        raise DomainError(f"unknown parameter {name!r}; expected one of {', '.join(PARAM_NAMES)}")
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a number, got {value!r}") from None
    if name in INT_PARAMS:
        if x != int(x):
            raise DomainError(f"{name} must be an integer, got {value!r}")
        return int(x)
    return x


@dataclass(frozen=True)
class Value:
    value: float
    approx: bool = False
    feasible: bool = True


def network(cfg):
    return NetworkParams(
        lambda_l=cfg["lambda_l"],
        lambda_e=cfg["lambda_e"],
        r=cfg["r"],
        alpha=cfg["alpha"],
        n=cfg["n"],
        p_total=cfg["p_total"],
    )


def evaluate(scheme, quantity, cfg):
    """Evaluate one quantity for a flat parameter map; returns :class:`Value`."""
    if scheme not in SCHEMES:
        raise DomainError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if quantity not in QUANTITIES:
        raise DomainError(f"quantity must be one of {QUANTITIES}, got {quantity!r}")
    params = network(cfg)
    if quantity in ("phi_opt", "capacity_opt"):
        return _optimum(scheme, quantity, params, cfg)
    split = PowerSplit(cfg["phi"], cfg["p_total"])
    mod = sectoring if scheme == "sectoring" else beamforming
    bb, be = cfg["beta_b"], cfg["beta_e"]

    if quantity == "pso_ub":
        return Value(mod.secrecy_outage_ub(params, split, be))
    if quantity == "pso_lb":
        return Value(mod.secrecy_outage_lb(params, split, be))
    if quantity == "pso_lead":
        return Value(mod.secrecy_outage_lead(params, split, be), approx=True)
    if quantity == "capacity":
        return _capacity(scheme, params, split, cfg)

    if scheme == "sectoring":
        if quantity == "pco_approx":
            # first-order term of 1 - exp(-x)
            return Value(sectoring.connection_outage_exponent(params, split, bb), approx=True)
        return Value(sectoring.connection_outage(params, split, bb))
    if quantity == "pco_approx":
        return Value(beamforming.connection_outage_approx(params, split, bb), approx=True)
    if quantity == "pco" and params.n > ZETA_MAX_ANTENNAS:
        return Value(beamforming.connection_outage_approx(params, split, bb), approx=True)
    return Value(beamforming.connection_outage_exact(params, split, bb))


def _capacity(scheme, params, split, cfg):
    sigma, eps = cfg["sigma"], cfg["epsilon"]
    check_probability("sigma", sigma)
    check_probability("epsilon", eps)
    try:
        if scheme == "sectoring":
            cap = sectoring.capacity_lb(params, split, sigma, eps)
        else:
            cap = beamforming.capacity_approx(params, split, sigma, eps)
    except InfeasibleError:
        cap = 0.0
    return Value(cap, approx=scheme == "beamforming", feasible=cap > 0)


def _optimum(scheme, quantity, params, cfg):
    sigma, eps = cfg["sigma"], cfg["epsilon"]
    mod = sectoring if scheme == "sectoring" else beamforming
    split, cap = mod.optimal_capacity(params, sigma, eps)
    approx = scheme == "beamforming"
    if split is None:
        return Value(math.nan if quantity == "phi_opt" else 0.0, approx, False)
    return Value(split.phi if quantity == "phi_opt" else cap, approx, True)


# ---------------------------------------------------------------------------
# grids and sweeps


@dataclass(frozen=True)
class SweepSpec:
    schemes: tuple
    quantities: tuple
    param: str
    start: float
    stop: float
    count: int
    spacing: str = "lin"
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.param not in DEFAULTS:
            raise DomainError(f"cannot sweep {self.param!r}; expected one of {', '.join(PARAM_NAMES)}")
        if self.count < 2:
            raise DomainError(f"count must be >= 2, got {self.count}")
        if self.spacing not in ("lin", "log"):
            raise DomainError(f"spacing must be 'lin' or 'log', got {self.spacing!r}")
        for s in self.schemes:
            if s not in SCHEMES:
                raise DomainError(f"scheme must be one of {SCHEMES}, got {s!r}")
        for q in self.quantities:
            if q not in QUANTITIES:
                raise DomainError(f"quantity must be one of {QUANTITIES}, got {q!r}")

    def grid(self):
        if self.spacing == "log":
            if self.start <= 0 or self.stop <= 0:
                raise DomainError("log spacing needs a positive range")
            values = np.geomspace(self.start, self.stop, self.count)
        else:
            values = np.linspace(self.start, self.stop, self.count)
        if self.param in INT_PARAMS:
            return sorted({int(round(v)) for v in values})
        return sorted(float(v) for v in values)


def columns(schemes, quantities):
    cols = []
    for s in schemes:
        for q in quantities:
            base = f"{s}_{q}"
            cols += [base, base + "_approx", base + "_feasible"]
    return cols


def evaluate_row(schemes, quantities, cfg):
    row = {}
    for s in schemes:
        for q in quantities:
            v = evaluate(s, q, cfg)
            base = f"{s}_{q}"
            row[base], row[base + "_approx"], row[base + "_feasible"] = v.value, v.approx, v.feasible
    return row


def run_sweep(spec, mc=None):
    """Rows ascending in the swept value.

    With ``mc`` (a ``(quantity, McConfig)`` pair) every row also carries a
    Monte Carlo estimate for each scheme; every grid point reuses the same
    seed.
    """
    cfg = dict(DEFAULTS, **spec.fixed)
    rows = []
    for x in spec.grid():
        point = dict(cfg, **{spec.param: x})
        row = {spec.param: x}
        row.update(evaluate_row(spec.schemes, spec.quantities, point))
        if mc is not None:
            for s in spec.schemes:
                est = simulate(s, mc[0], point, mc[1])
                for k, v in est.to_dict().items():
                    row[f"{s}_mc_{k}"] = v
        rows.append(row)
    return rows


def simulate(scheme, quantity, cfg, mc_cfg):
    params = network(cfg)
    split = PowerSplit(cfg["phi"], cfg["p_total"])
    if quantity not in SIM_QUANTITIES:
        raise DomainError(f"simulated quantity must be one of {SIM_QUANTITIES}, got {quantity!r}")
    fn = {
        ("sectoring", "pco"): montecarlo.sim_sectoring_pco,
        ("sectoring", "pso"): montecarlo.sim_sectoring_pso,
        ("beamforming", "pco"): montecarlo.sim_beamforming_pco,
        ("beamforming", "pso"): montecarlo.sim_beamforming_pso,
    }[scheme, quantity]
    beta = cfg["beta_b"] if quantity == "pco" else cfg["beta_e"]
    return fn(params, split, beta, mc_cfg)


# ---------------------------------------------------------------------------
# file format


def metadata(command, schemes, quantities, swept, fixed, seed=None, extra=None):
    meta = {
        "tool": f"adhoc_secrecy {__version__}",
        "command": command,
        "schemes": ",".join(schemes),
        "quantities": ",".join(quantities),
        "swept": swept or "",
    }
    for name in PARAM_NAMES:
        if name != swept:
            meta[name] = fmt(fixed[name])
    if seed is not None:
        meta["seed"] = str(seed)
    meta.update(extra or {})
    return meta


def dumps_csv(meta, cols, rows):
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={v}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in cols])
    return buf.getvalue()


def dumps_json(meta, cols, rows):
    body = {"metadata": meta, "columns": cols, "rows": [{c: _jsonable(row[c]) for c in cols} for row in rows]}
    return json.dumps(body, indent=2, allow_nan=True) + "\n"


def _jsonable(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def write_output(path, meta, cols, rows, fmt_name="csv"):
    text = dumps_json(meta, cols, rows) if fmt_name == "json" else dumps_csv(meta, cols, rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def read_csv(path):
    """``(metadata, columns, rows)`` with every cell parsed as float."""
    meta, lines = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            else:
                lines.append(line)
    reader = csv.reader(lines)
    cols = next(reader)
    rows = [dict(zip(cols, map(_cell, rec))) for rec in reader if rec]
    return meta, cols, rows


def _cell(text):
    try:
        return float(text)
    except ValueError:
        return text


def verify_file(path):
    """Re-evaluate every analytic column from the file's metadata.

    Returns a list of ``(row index, column, stored, recomputed)`` mismatches;
    empty when the file round-trips exactly.
    """
    meta, cols, rows = read_csv(path)
    schemes = tuple(filter(None, meta["schemes"].split(",")))
    quantities = tuple(filter(None, meta["quantities"].split(",")))
    swept = meta["swept"]
    fixed = {k: coerce(k, meta[k]) for k in PARAM_NAMES if k != swept}
    bad = []
    for i, row in enumerate(rows):
        cfg = dict(fixed)
        if swept:
            cfg[swept] = coerce(swept, row[swept])
        fresh = evaluate_row(schemes, quantities, cfg)
        for col, value in fresh.items():
            stored = row[col]
            value = float(value)
            same = stored == value or (math.isnan(stored) and math.isnan(value))
            if not same:
                bad.append((i, col, stored, value))
    return bad
