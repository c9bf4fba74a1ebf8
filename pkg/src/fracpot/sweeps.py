"""Parameter sweeps over the verifiable identities, serialization and parallel execution."""

import csv
import io
import itertools
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from . import composition as comp
from . import operators as ops
from .composition import VerificationReport, make_report
from .errors import DomainError
from .kernels import PotentialParams, kernel_l1_norm, printed_l1_constant

log = logging.getLogger("fracpot.sweeps")

IDENTITIES = ("bessel-composition", "riesz-composition", "riesz-limit", "subordination",
              "semigroup", "norm-witness", "resolvent-gap", "fourier-radial", "l1-norm")

LIMIT_LAMBDAS = tuple(10.0 ** -k for k in range(7))

# (n, alpha, beta, d): exponent n/2 - alpha - beta and separation d are chosen
# so that the lambda -> 0 error (~ (sqrt(lam) d / 2)^(2 nu)) ends below 1e-3
RIESZ_LIMIT_TUPLES = ((3, 0.25, 0.25, 1.0), (3, 0.5, 0.3, 1.0), (2, 0.2, 0.2, 1.0),
                      (2, 0.3, 0.1, 0.5), (1, 0.1, 0.1, 1e-3), (1, 0.05, 0.15, 1e-3))

# fractions (a, b) of n with a <= b and a + b <= 0.45
RIESZ_FRACTIONS = tuple((a, b) for a, b in itertools.combinations_with_replacement(
    (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4), 2) if a + b <= 0.45 + 1e-12)


def riesz_lattice(d=1.0):
    return tuple((n, round(a * n, 12), round(b * n, 12), d)
                 for n in (1, 2, 3) for a, b in RIESZ_FRACTIONS)


RECORD_FIELDS = ("identity", "n", "alpha", "beta", "lambda", "d", "lhs", "rhs", "rel_error",
                 "tolerance", "passed", "notes", "lhs_error", "extra")


class ConfigError(ValueError):
    """The sweep configuration is malformed."""


DEFAULTS = {
    "bessel-composition": {"n": [1, 2, 3], "alpha": [0.3, 0.7, 1.0, 1.5],
                           "beta": [0.3, 0.7, 1.0, 1.5], "lambda": [0.25, 1.0, 4.0],
                           "d": [0.5, 1.0, 2.0], "tolerance": 1e-6},
    "riesz-composition": {"tuples": "acceptance", "n": None, "alpha": None, "beta": None,
                          "d": None, "tolerance": 1e-6},
    "riesz-limit": {"tuples": "acceptance", "n": None, "alpha": None, "beta": None, "d": None,
                    "lambdas": list(LIMIT_LAMBDAS), "tolerance": 1e-3},
    "subordination": {"n": [1, 2, 3], "alpha": [0.25, 0.5, 1.0], "beta": [0.25, 0.5],
                      "d": [0.5, 1.0, 2.0], "t": 1.0, "s": 2.0, "tolerance": 1e-8},
    "semigroup": {"n": [1], "random": 20, "path": "multiplier", "lizorkin": True,
                  "tolerance": None},
    "norm-witness": {"n": [1], "alpha": [1.0], "lambda": [1.0], "p": "2",
                     "j": [1, 2, 4, 8, 16], "tolerance": None},
    "resolvent-gap": {"alpha": [0.5, 1.0, 2.0], "lambda": [1.0, 0.1, 0.01, 0.001, 0.0001],
                      "tolerance": 1e-10},
    "fourier-radial": {"n": [1, 2, 3], "alpha": [0.5, 1.0, 1.5], "lambda": [0.5, 2.0],
                       "xi": [0.1, 1.0, 5.0], "tolerance": None},
    "l1-norm": {"n": [1, 2, 3], "alpha": [0.4, 1.0], "lambda": [0.5, 2.0], "tolerance": 1e-8},
}


@dataclass
class SweepConfig:
    """Identity name, parameter ranges and output options for one sweep."""

    identity: str
    values: dict = field(default_factory=dict)
    output: str = None
    format: str = "json"
    seed: int = 0
    perturb: float = 1.0

    def get(self, key):
        return self.values.get(key, DEFAULTS[self.identity].get(key))

    def as_dict(self):
        v = {k: self.get(k) for k in sorted(set(DEFAULTS[self.identity]) | set(self.values))}
        return {"identity": self.identity, "values": v, "seed": self.seed,
                "perturb": self.perturb, "format": self.format}


def _parse_value(text):
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    parts = [p.strip() for p in text.split(",") if p.strip()]
    out = []
    for p in parts:
        try:
            v = float(p)
        except ValueError:
            out.append(p)
            continue
        out.append(int(v) if v.is_integer() and "." not in p and "e" not in p.lower() else v)
    if len(out) == 1 and "," not in text:
        return out[0]
    return out


def parse_config_text(text):
    """key = value lines; '#' starts a comment; comma-separated values form lists."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        k, v = line.split("=", 1)
        k = k.strip().lower().replace("_", "-")
        if k == "lam":
            k = "lambda"
        if not k:
            raise ConfigError(f"line {lineno}: empty key")
        values[k] = _parse_value(v)
    return values


def build_config(identity, values=None, **kw):
    if identity not in IDENTITIES:
        raise ConfigError(f"unknown identity {identity!r}; choose from {', '.join(IDENTITIES)}")
    values = dict(values or {})
    if "identity" in values:
        if values.pop("identity") != identity:
            raise ConfigError("config file names a different identity")
    for k in ("output", "format", "seed", "perturb"):
        if k in values and k not in kw:
            kw[k] = values.pop(k)
    unknown = set(values) - set(DEFAULTS[identity])
    if unknown:
        raise ConfigError(f"unknown keys for {identity}: {', '.join(sorted(unknown))}")
    cfg = SweepConfig(identity, values, **kw)
    if cfg.format not in ("json", "csv"):
        raise ConfigError("format must be json or csv")
    try:
        cfg.seed = int(cfg.seed)
        cfg.perturb = float(cfg.perturb)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad seed/perturb: {exc}") from exc
    return cfg


def _list(cfg, key, kind=float):
    v = cfg.get(key)
    if v is None:
        raise ConfigError(f"missing {key}")
    v = v if isinstance(v, list) else [v]
    try:
        return [kind(x) if not (isinstance(x, str) and x.lower() == "inf") else math.inf
                for x in v]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from exc


def _scalar(cfg, key, kind=float):
    v = cfg.get(key)
    if isinstance(v, list):
        if len(v) != 1:
            raise ConfigError(f"{key} takes a single value")
        v = v[0]
    try:
        return kind(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from exc


def _perturbed(rep, factor):
    """Scale the closed-form side by ``factor`` and re-judge."""
    if factor == 1.0:
        return rep
    rhs = rep.rhs * factor
    rel = abs(rep.lhs - rhs) / abs(rhs) if rhs else abs(rep.lhs - rhs)
    note = comp._join(rep.notes, f"rhs perturbed by {factor:g}")
    return replace(rep, rhs=rhs, rel_error=rel, passed=bool(rel <= rep.tolerance), notes=note)


# ---------------------------------------------------------------------------
# tasks: each returns a VerificationReport

def _task_bessel(args, tol, perturb):
    n, a, b, lam, d = args
    return comp.verify_bessel_composition(n, a, b, lam, d, tol, perturb=perturb)


def _task_riesz(args, tol, perturb):
    n, a, b, d = args
    return comp.verify_riesz_composition(n, a, b, d, tol, perturb=perturb)


def _task_limit(args, tol, perturb, lambdas, seed):
    n, a, b, d = args
    reps = comp.riesz_from_bessel_limit(n, a, b, d, lambdas, tol, seed=seed)
    last = _perturbed(reps[-1], perturb)
    ok = last.passed and last.extra["monotone"] and last.extra["dominated"] == last.extra["samples"]
    seq = [r.rel_error for r in reps]
    extra = dict(last.extra, errors=seq, lambdas=list(lambdas))
    return replace(last, passed=bool(ok), extra=extra)


def _task_subordination(args, tol, perturb, t, s):
    n, a, b, d = args
    return _perturbed(comp.verify_subordination_proof(n, a, b, t, s, d, tol), perturb)


def _grid_input(n, lam):
    L, N = ops.REFERENCE_GRIDS[n]
    grid = ops.Grid(n, L, N)
    return ops.GridFunction.lizorkin(grid) if lam == 0 else ops.GridFunction.gaussian(grid, 1.0)


def _task_semigroup(args, tol, perturb, path):
    n, a, b, lam = args
    rep = ops.semigroup_check(_grid_input(n, lam), a, b, lam, tol, path=path)
    return _perturbed(rep, perturb)


def _task_witness(args, tol, perturb, p, js):
    n, a, lam = args
    js = sorted(js)
    rs = ops.convolution_norm_witness(n, p, a, lam, js)
    bound = lam ** -a
    increasing = all(y > x for x, y in zip(rs, rs[1:]))
    young = all(r <= bound * (1 + 1e-12) for r in rs)
    last = rs[-1]
    if tol is None:
        tol = 1e-10 if math.isinf(js[-1]) else 0.01
    rep = make_report("norm-witness", (n, a, None, lam, None), last, bound * perturb, tol,
                      comp._join("" if increasing else "ratios not increasing",
                                 "" if young else "Young bound violated", f"p={p}"),
                      extra={"j": list(js), "ratios": rs})
    return replace(rep, passed=bool(rep.passed and increasing and young))


def _gap_oracle(alpha, lam):
    """Bounded Brent search over log mu, or the closed form for alpha = 1."""
    if alpha == 1:
        return lam / (1 + lam)

    def neg(logmu):
        mu = math.exp(logmu)
        return -abs(float(ops._f_alpha(mu + lam, alpha)) - float(ops._f_alpha(mu, alpha)))

    c = math.log(lam)
    best = max(-neg(x) for x in np.linspace(c - 30, c + 30, 601))
    best = max(best, float(ops._f_alpha(lam, alpha)))
    res = optimize.minimize_scalar(neg, bounds=(c - 30, c + 30), method="bounded",
                                   options={"xatol": 1e-12})
    return max(best, -float(res.fun))


def _task_gap(args, tol, perturb):
    a, lam = args
    gap = ops.resolvent_gap(a, lam)
    rhs = _gap_oracle(a, lam) * perturb
    tag = "closed form lam/(1+lam)" if a == 1 else "bounded Brent oracle"
    return make_report("resolvent-gap", (None, a, None, lam, None), gap, rhs, tol, tag)


def _task_fourier(args, tol, perturb):
    n, a, lam, xi = args
    return _perturbed(ops.radial_fourier_check(PotentialParams(n, a, lam), xi, tol), perturb)


def _task_l1(args, tol, perturb):
    n, a, lam = args
    p = PotentialParams(n, a, lam)
    res = kernel_l1_norm(p)
    printed = printed_l1_constant(p)
    expected = lam ** -a
    note = (f"printed constant (2 pi)^(-n/2) lambda^(-alpha) = {printed:.6g} differs from "
            f"the computed norm by factor {expected / printed:.6g}")
    return make_report("l1-norm", (n, a, None, lam, None), res.value, expected * perturb, tol,
                       note, res.abs_error_estimate)


def plan(cfg):
    """Expand a config into (key, callable) tasks plus skip reasons."""
    ident = cfg.identity
    tol = cfg.get("tolerance")
    tol = None if tol is None else float(tol)
    pert = cfg.perturb
    tasks, skipped = [], []

    def add(key, fn):
        tasks.append((key, fn))

    if ident == "bessel-composition":
        for t in itertools.product(_list(cfg, "n", int), _list(cfg, "alpha"), _list(cfg, "beta"),
                                   _list(cfg, "lambda"), _list(cfg, "d")):
            add(t, lambda t=t: _task_bessel(t, tol, pert))
    elif ident in ("riesz-composition", "riesz-limit"):
        if cfg.get("tuples") == "acceptance" and not any(k in cfg.values for k in
                                                          ("n", "alpha", "beta", "d")):
            tuples = RIESZ_LIMIT_TUPLES if ident == "riesz-limit" else riesz_lattice()
        else:
            tuples = itertools.product(_list(cfg, "n", int), _list(cfg, "alpha"),
                                       _list(cfg, "beta"), _list(cfg, "d"))
        lambdas = _list(cfg, "lambdas") if ident == "riesz-limit" else None
        for t in tuples:
            n, a, b, d = t
            h = 0.5 * n
            if not (0 < a < h and 0 < b < h and a + b < h):
                skipped.append((t, "alpha, beta, alpha+beta must lie in (0, n/2)"))
                continue
            if ident == "riesz-composition":
                add(t, lambda t=t: _task_riesz(t, tol, pert))
            else:
                add(t, lambda t=t: _task_limit(t, tol, pert, lambdas, cfg.seed))
    elif ident == "subordination":
        ts, ss = _scalar(cfg, "t"), _scalar(cfg, "s")
        for t in itertools.product(_list(cfg, "n", int), _list(cfg, "alpha"), _list(cfg, "beta"),
                                   _list(cfg, "d")):
            add(t, lambda t=t: _task_subordination(t, tol, pert, ts, ss))
    elif ident == "semigroup":
        path = str(cfg.get("path"))
        rng = np.random.default_rng(cfg.seed)
        explicit = any(k in cfg.values for k in ("alpha", "beta", "lambda"))
        for n in _list(cfg, "n", int):
            if explicit:
                tuples = [(n,) + t for t in itertools.product(
                    _list(cfg, "alpha"), _list(cfg, "beta"), _list(cfg, "lambda"))]
            else:
                k = _scalar(cfg, "random", int)
                tuples = [(n, float(a), float(b), float(lam)) for a, b, lam in
                          zip(rng.uniform(0.05, 2.0, k), rng.uniform(0.05, 2.0, k),
                              rng.uniform(0.1, 10.0, k))]
            for t in tuples:
                add(t, lambda t=t: _task_semigroup(t, tol, pert, path))
            if cfg.get("lizorkin") and not explicit:
                t = (n, 0.1, 0.1, 0.0)
                add(t, lambda t=t: _task_semigroup(t, 1e-3 if tol is None else tol, pert,
                                                   "kernel"))
    elif ident == "norm-witness":
        p = str(cfg.get("p")).lower()
        p = math.inf if p in ("inf", "infinity") else int(float(p))
        js = _list(cfg, "j")
        for t in itertools.product(_list(cfg, "n", int), _list(cfg, "alpha"),
                                   _list(cfg, "lambda")):
            add(t, lambda t=t: _task_witness(t, tol, pert, p, js))
    elif ident == "resolvent-gap":
        for t in itertools.product(_list(cfg, "alpha"), _list(cfg, "lambda")):
            add(t, lambda t=t: _task_gap(t, tol, pert))
    elif ident == "fourier-radial":
        for t in itertools.product(_list(cfg, "n", int), _list(cfg, "alpha"),
                                   _list(cfg, "lambda"), _list(cfg, "xi")):
            if not t[2] > 0:
                skipped.append((t, "lambda must be > 0"))
                continue
            add(t, lambda t=t: _task_fourier(t, tol, pert))
    elif ident == "l1-norm":
        for t in itertools.product(_list(cfg, "n", int), _list(cfg, "alpha"),
                                   _list(cfg, "lambda")):
            add(t, lambda t=t: _task_l1(t, tol, pert))
    return tasks, skipped


def worker_count(ntasks):
    cap = os.environ.get("FRACPOT_THREADS")
    try:
        cap = int(cap) if cap else (os.cpu_count() or 1)
    except ValueError:
        cap = 1
    return max(1, min(cap, ntasks))


def _sort_key(key):
    return tuple((0, float(v)) if v is not None else (1, 0.0) for v in key)


def run(cfg):
    """Execute a sweep; returns the report document (dict)."""
    tasks, skipped = plan(cfg)
    for t, why in skipped:
        log.warning("skipping %s: %s", t, why)
    tasks.sort(key=lambda kv: _sort_key(kv[0]))
    nw = worker_count(len(tasks))
    if nw == 1:
        results = [fn() for _, fn in tasks]
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(lambda kv: kv[1](), tasks))
    records = [r.to_dict() for r in results]
    worst = max((r.rel_error for r in results), default=0.0)
    return {
        "identity": cfg.identity,
        "config": cfg.as_dict(),
        "records": records,
        "summary": {"passed": sum(r.passed for r in results), "total": len(results),
                    "worst_rel_error": worst, "skipped": len(skipped)},
    }


# ---------------------------------------------------------------------------
# serialization

def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, np.generic):
        return x.item()
    return x


def to_json(doc):
    return json.dumps(_json_safe(doc), indent=2, sort_keys=False)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(doc):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_FIELDS)
    for r in doc["records"]:
        n, a, b, lam, d = r["params"]
        w.writerow([r["identity"], _fmt(n), _fmt(a), _fmt(b), _fmt(lam), _fmt(d), _fmt(r["lhs"]),
                    _fmt(r["rhs"]), _fmt(r["rel_error"]), _fmt(r["tolerance"]),
                    _fmt(r["passed"]), r["notes"], _fmt(r["lhs_error"]),
                    json.dumps(_json_safe(r.get("extra", {})), sort_keys=True)])
    return buf.getvalue()


def _restore(x):
    if isinstance(x, str) and x in ("inf", "-inf", "nan"):
        return float(x)
    if isinstance(x, list):
        return [_restore(v) for v in x]
    if isinstance(x, dict):
        return {k: _restore(v) for k, v in x.items()}
    return x


def _num(text, kind=float):
    return None if text == "" else kind(text)


def parse_report(text, fmt=None):
    """Inverse of to_json / to_csv: returns (identity, records as VerificationReport)."""
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "csv"
    if fmt == "json":
        doc = json.loads(text)
        recs = []
        for r in doc["records"]:
            r = dict(r)
            r["extra"] = _restore(r.get("extra", {}))
            r["rel_error"] = _restore(r["rel_error"])
            recs.append(VerificationReport.from_dict(r))
        return doc["identity"], recs
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != RECORD_FIELDS:
        raise ConfigError("not a fracpot CSV report")
    recs = []
    for row in rows[1:]:
        d = dict(zip(RECORD_FIELDS, row))
        params = (_num(d["n"], int), _num(d["alpha"]), _num(d["beta"]), _num(d["lambda"]),
                  _num(d["d"]))
        recs.append(VerificationReport(d["identity"], params, float(d["lhs"]), float(d["rhs"]),
                                       float(d["rel_error"]), float(d["tolerance"]),
                                       d["passed"] == "true", d["notes"], float(d["lhs_error"]),
                                       _restore(json.loads(d["extra"]))))
    ident = recs[0].identity if recs else ""
    return ident, recs


def serialize(doc, fmt):
    return to_json(doc) if fmt == "json" else to_csv(doc)


def check_domain(fn, *a, **kw):
    """Call fn, mapping DomainError to ConfigError for the CLI."""
    try:
        return fn(*a, **kw)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
