"""Adaptive one-dimensional quadrature and the composition-integral engine.

The building block is a globally adaptive Gauss-Kronrod (10/21) scheme with
the QUADPACK error estimate, evaluated panel-wise on numpy arrays.  Endpoint
singularities of the form t^e are removed by the substitution t = L u^k with
k chosen from e; infinite tails are mapped logarithmically, t = l (e^w - 1),
and truncated once a local-slope estimate of the remainder falls below a
tenth of the tolerance.

``composition_integral`` computes the n-dimensional integral

    I(d) = \\int_{R^n} F(|x'|, |x' - y|) dx',   |y| = d,

for n in {1, 2, 3} through exact dimension reductions.
"""

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _backend
from ._rules import WG, WGK, XGK
from .errors import InvalidSpecError, NonIntegrableError, QuadratureError

_EPS = float(np.finfo(float).eps)
_UFLOW = float(np.finfo(float).tiny)
_WMAX = 700.0

DEFAULT_LIMIT = 2000
DEFAULT_BUDGET = 50_000_000


def _full_rule():
    x = np.array([-v for v in XGK[:-1]] + [0.0] + list(XGK[:-1][::-1]))
    wk = np.array(list(WGK[:-1]) + [WGK[-1]] + list(WGK[:-1][::-1]))
    wg = np.zeros(21)
    for j, w in enumerate(WG):
        i = 2 * j + 1
        wg[i] = w
        wg[20 - i] = w
    return x, wk, wg


_X, _WK, _WG = _full_rule()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class IntegrandSpec:
    """Description of a half-line integrand.

    ``integrand`` maps an array of t to an array of values (set
    ``vectorized=False`` for scalar callables).  ``singular_points`` lists
    algebraic or logarithmic singularities; ``exponents`` optionally gives
    the local power at each of them (estimated numerically otherwise).
    ``breakpoints`` are extra split points where the integrand is smooth but
    sharply peaked.  At infinity the integrand must either decay like
    exp(-tail_decay_rate * t) or like t**tail_exponent with exponent < -1.
    """

    integrand: Callable
    singular_points: Sequence[float] = ()
    tail_decay_rate: float = 0.0
    tail_exponent: Optional[float] = None
    exponents: Optional[Sequence[Optional[float]]] = None
    breakpoints: Sequence[float] = ()
    vectorized: bool = True

    def __post_init__(self):
        pts = tuple(float(p) for p in self.singular_points)
        if any(not math.isfinite(p) or p < 0 for p in pts):
            raise InvalidSpecError("singular points must be finite and >= 0")
        if list(pts) != sorted(pts):
            raise InvalidSpecError("singular points must be sorted")
        if self.exponents is not None and len(self.exponents) != len(pts):
            raise InvalidSpecError("one exponent per singular point required")
        if self.tail_decay_rate < 0:
            raise InvalidSpecError("tail_decay_rate must be >= 0")


class _Counter:
    def __init__(self, budget):
        self.budget = budget
        self.n = 0

    def add(self, k):
        self.n += k

    @property
    def exhausted(self):
        return self.n >= self.budget


def _as_vector(f, vectorized):
    if vectorized:
        return f
    return np.vectorize(lambda t: float(f(t)), otypes=[float])


def _gk_panels(f, lo, hi, counter):
    """Apply GK21 to each panel [lo_i, hi_i]; return (result, error)."""
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = c[:, None] + h[:, None] * _X[None, :]
    y = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    counter.add(y.size)
    if not np.all(np.isfinite(y)):
        raise QuadratureError("integrand returned a non-finite value")
    resk = y @ _WK
    resg = y @ _WG
    ah = np.abs(h)
    resabs = ah * (np.abs(y) @ _WK)
    resasc = ah * (np.abs(y - 0.5 * resk[:, None]) @ _WK)
    resk = resk * h
    err = np.abs(resk - resg * h)
    with np.errstate(invalid="ignore", divide="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    err = np.where(resabs > _UFLOW / (50 * _EPS), np.maximum(50 * _EPS * resabs, err), err)
    return resk, err


def _adapt(f, a, b, abs_tol, rel_tol, limit, counter):
    """Globally adaptive GK21 on [a, b].  Returns (value, error, converged)."""
    if a == b:
        return 0.0, 0.0, True
    res, err = _gk_panels(f, np.array([a]), np.array([b]), counter)
    heap = [(-err[0], 0, a, b, res[0], err[0])]
    tick = 1
    frozen = []
    total = res[0]
    etot = err[0]
    while True:
        tol = max(abs_tol, rel_tol * abs(total))
        if etot <= tol:
            break
        if not heap or len(heap) + len(frozen) >= limit or counter.exhausted:
            break
        worst = heap[0][5]
        batch = []
        while heap and len(batch) < 16 and heap[0][5] >= 0.5 * worst:
            batch.append(heapq.heappop(heap))
        los, his, olds = [], [], []
        for item in batch:
            _, _, lo, hi, r, e = item
            if hi - lo <= 64 * _EPS * max(abs(lo), abs(hi), _UFLOW):
                frozen.append(item)
                continue
            los.append(lo)
            his.append(hi)
            olds.append((r, e))
        if not los:
            continue
        los = np.array(los)
        his = np.array(his)
        mids = 0.5 * (los + his)
        r2, e2 = _gk_panels(f, np.concatenate([los, mids]), np.concatenate([mids, his]), counter)
        m = len(los)
        for i in range(m):
            r_old, e_old = olds[i]
            total += r2[i] + r2[m + i] - r_old
            etot += e2[i] + e2[m + i] - e_old
            heapq.heappush(heap, (-e2[i], tick, los[i], mids[i], r2[i], e2[i]))
            heapq.heappush(heap, (-e2[m + i], tick + 1, mids[i], his[i], r2[m + i], e2[m + i]))
            tick += 2
    items = heap + frozen
    total = math.fsum(it[4] for it in items)
    etot = math.fsum(it[5] for it in items)
    return total, etot, etot <= max(abs_tol, rel_tol * abs(total))


def power_for_exponent(e):
    """Substitution power k for an endpoint behaving like t**e."""
    if e is None:
        return 3
    if e <= -1.0:
        raise NonIntegrableError(f"local exponent {e} <= -1 is not integrable")
    if e >= 2.0:
        return 1
    return int(max(2, math.ceil(3.0 / (1.0 + e) - 1e-12)))


def _estimate_exponent(phi, L):
    """Local power of phi(t) as t -> 0+, estimated from two samples."""
    t = np.array([L * 1e-9, L * 1e-6])
    with np.errstate(all="ignore"):
        v = np.abs(np.asarray(phi(t), dtype=float))
    if not np.all(np.isfinite(v)):
        raise NonIntegrableError("integrand is not finite near a singular point")
    if v[0] == 0.0 or v[1] == 0.0:
        return 0.0 if v[0] == v[1] else 2.0
    e = math.log(v[1] / v[0]) / math.log(1e3)
    if e <= -1.0 + 1e-3:
        raise NonIntegrableError(f"estimated local exponent {e:.3f} implies divergence")
    return e


def _power_mapped(phi, L, k):
    """Integrand on u in [0, 1] equal to phi pulled back by t = L u^k."""
    if k == 1:
        return lambda u: phi(L * u) * L

    def g(u):
        t = L * u ** k
        out = np.zeros_like(u)
        m = t > 0
        if np.any(m):
            um = u[m]
            out[m] = phi(t[m]) * (k * L * um ** (k - 1))
        return out

    return g


def _log_mapped(phi, ell):
    """Integrand on w >= 0 equal to phi pulled back by t = ell (e^w - 1)."""

    def g(w):
        e = np.exp(w)
        return phi(ell * np.expm1(w)) * (ell * e)

    return g


def _tail(phi, ell, rate, abs_tol, rel_tol, scale, limit, counter):
    """Integrate phi over [0, inf) using the log map and adaptive truncation."""
    g = _log_mapped(phi, ell)
    if rate > 0:
        w_hi = math.log1p(max(1.0, 4.0 / (rate * ell)))
    else:
        w_hi = 2.0
    w_lo = 0.0
    total = 0.0
    err = 0.0
    conv = True
    delta = 0.5
    while True:
        floor = max(abs_tol, rel_tol * abs(scale)) * 0.1
        v, e, c = _adapt(g, w_lo, w_hi, floor, rel_tol, limit, counter)
        total += v
        err += e
        conv = conv and c
        target = 0.1 * max(abs_tol, rel_tol * abs(scale + total))
        gv = np.abs(g(np.array([w_hi, w_hi + delta])))
        counter.add(2)
        if gv[0] == 0.0:
            rem = 0.0
        elif gv[1] > 0.0 and gv[1] < gv[0]:
            kappa = math.log(gv[0] / gv[1]) / delta
            rem = gv[0] / kappa
        else:
            rem = math.inf
        if rem <= target:
            err += rem
            break
        if w_hi >= _WMAX - math.log(max(ell, 1.0)) or counter.exhausted:
            err += rem if math.isfinite(rem) else abs(total)
            conv = False
            break
        w_lo = w_hi
        w_hi = min(w_hi + max(1.0, 0.5 * w_hi), _WMAX - math.log(max(ell, 1.0)))
    return total, err, conv


class _Pieces:
    """Accumulates finite pieces first and tails second (tails need a scale)."""

    def __init__(self, abs_tol, rel_tol, limit, counter):
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self.limit = limit
        self.counter = counter
        self.finite = []
        self.tails = []
        self.extra = []

    def add(self, g, a, b):
        self.finite.append((g, a, b))

    def add_singular(self, phi, L, e, tmin=0.0):
        """\\int_0^L phi(t) dt with phi ~ t^e at 0 (e=None: estimate).

        With tmin > 0 the range [0, tmin] is replaced by its local power-law
        estimate phi(tmin) tmin / (1 + e), which also enters the error.
        """
        if e is None:
            e = _estimate_exponent(phi, L if tmin == 0 else max(L * 1e-3, tmin * 1e10))
        k = power_for_exponent(e)
        u0 = 0.0
        if tmin > 0:
            u0 = (tmin / L) ** (1.0 / k)
            v0 = float(np.asarray(phi(np.array([tmin])), dtype=float)[0])
            lead = v0 * tmin / (1.0 + max(e, -1.0 + 1e-6))
            self.extra.append((lead, abs(lead)))
        self.finite.append((_power_mapped(phi, L, k), u0, 1.0))

    def add_tail(self, phi, ell, rate):
        self.tails.append((phi, ell, rate))

    def run(self):
        npieces = max(1, len(self.finite) + len(self.tails))
        vals, errs, conv = [], [], True
        for g, a, b in self.finite:
            v, e, c = _adapt(g, a, b, self.abs_tol / npieces, self.rel_tol, self.limit, self.counter)
            vals.append(v)
            errs.append(e)
            conv = conv and c
        for v, e in self.extra:
            vals.append(v)
            errs.append(e)
        scale = math.fsum(vals)
        for phi, ell, rate in self.tails:
            v, e, c = _tail(phi, ell, rate, self.abs_tol / npieces, self.rel_tol, scale,
                            self.limit, self.counter)
            vals.append(v)
            errs.append(e)
            conv = conv and c
        value = math.fsum(vals)
        err = math.fsum(errs)
        conv = conv and err <= max(self.abs_tol, self.rel_tol * abs(value)) * (1 + 1e-9)
        return value, err, conv


def _result(value, err, counter, conv):
    return QuadratureResult(float(value), float(err), int(counter.n), bool(conv))


def integrate_interval(f, a, b, tol=1e-10, rel_tol=0.0, *, singular_points=(), exponents=None,
                       limit=DEFAULT_LIMIT, max_evaluations=DEFAULT_BUDGET, vectorized=True):
    """Integrate f over a finite interval [a, b].

    Singular points (including the endpoints if listed) split the interval;
    each piece adjacent to a singular point is power-mapped.
    """
    f = _as_vector(f, vectorized)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidSpecError("use integrate_halfline for infinite ranges")
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    sing = sorted(float(p) for p in singular_points)
    if exponents is None:
        exps = {p: None for p in sing}
    else:
        exps = dict(zip(sing, exponents))
    pts = sorted(set([a, b] + [p for p in sing if a <= p <= b]))
    counter = _Counter(max_evaluations)
    pcs = _Pieces(tol, rel_tol, limit, counter)
    for lo, hi in zip(pts[:-1], pts[1:]):
        _add_segment(pcs, f, lo, hi, lo in exps, hi in exps, exps.get(lo), exps.get(hi))
    value, err, conv = pcs.run()
    return _result(sign * value, err, counter, conv)


def _add_segment(pcs, f, lo, hi, sing_lo, sing_hi, e_lo, e_hi):
    # f sees absolute coordinates, so offsets below the endpoint's float
    # resolution cannot be represented and are dropped
    tlo = 4 * _EPS * abs(lo)
    thi = 4 * _EPS * abs(hi)
    if sing_lo and sing_hi:
        mid = 0.5 * (lo + hi)
        pcs.add_singular(lambda t: f(lo + t), mid - lo, e_lo, tlo)
        pcs.add_singular(lambda t: f(hi - t), hi - mid, e_hi, thi)
    elif sing_lo:
        pcs.add_singular(lambda t: f(lo + t), hi - lo, e_lo, tlo)
    elif sing_hi:
        pcs.add_singular(lambda t: f(hi - t), hi - lo, e_hi, thi)
    else:
        pcs.add(f, lo, hi)


def integrate_halfline(spec, tol=1e-10, rel_tol=0.0, *, limit=DEFAULT_LIMIT,
                       max_evaluations=DEFAULT_BUDGET):
    """Integrate ``spec.integrand`` over (0, inf).

    Converges when the error estimate is below max(tol, rel_tol*|value|).
    """
    if spec.tail_decay_rate <= 0:
        if spec.tail_exponent is None:
            raise InvalidSpecError("zero decay rate requires a declared tail_exponent")
        if spec.tail_exponent >= -1.0:
            raise NonIntegrableError("tail exponent >= -1 is not integrable at infinity")
    f = _as_vector(spec.integrand, spec.vectorized)
    sing = [float(p) for p in spec.singular_points]
    exps = dict(zip(sing, spec.exponents if spec.exponents is not None else [None] * len(sing)))
    if 0.0 not in exps:
        exps[0.0] = None
    pts = sorted(set([0.0] + sing + [float(b) for b in spec.breakpoints if b > 0]))
    counter = _Counter(max_evaluations)
    pcs = _Pieces(tol, rel_tol, limit, counter)
    for lo, hi in zip(pts[:-1], pts[1:]):
        _add_segment(pcs, f, lo, hi, lo in exps, hi in exps, exps.get(lo), exps.get(hi))
    c = pts[-1]
    rate = spec.tail_decay_rate
    if c > 0:
        ell = c
    else:
        ell = 1.0 / rate if rate > 0 else 1.0
    if c in exps:
        pcs.add_singular(lambda t, c=c: f(c + t), ell, exps[c], 4 * _EPS * c)
        c = c + ell
    pcs.add_tail(lambda t, c=c: f(c + t), ell, rate)
    value, err, conv = pcs.run()
    return _result(value, err, counter, conv)


# ----------------------------------------------------------------------------
# composition integrals

def _unit_rule(m):
    edges = np.linspace(0.0, 1.0, m + 1)
    c = 0.5 * (edges[:-1] + edges[1:])
    h = 0.5 / m
    return (c[:, None] + h * _X[None, :]).ravel(), h


def _batched_unit(fun, nrows, rtol, counter, m0=4, mmax=2048):
    """Integrate fun(u, rows) over u in [0, 1] for many rows at once.

    Refines by uniform panel doubling; each row stops when its GK error
    estimate is below rtol relative.
    """
    res = np.zeros(nrows)
    err = np.zeros(nrows)
    active = np.arange(nrows)
    m = m0
    while active.size:
        u, h = _unit_rule(m)
        y = fun(np.broadcast_to(u, (active.size, u.size)), active)
        counter.add(y.size)
        y = y.reshape(active.size, m, 21)
        rk = y @ _WK
        rg = y @ _WG
        resabs = h * (np.abs(y) @ _WK)
        resasc = h * (np.abs(y - 0.5 * rk[..., None]) @ _WK)
        rk = rk * h
        e = np.abs(rk - rg * h)
        with np.errstate(invalid="ignore", divide="ignore"):
            scaled = resasc * np.minimum(1.0, (200.0 * e / resasc) ** 1.5)
        e = np.where((resasc != 0) & (e != 0), scaled, e)
        e = np.maximum(e, 50 * _EPS * resabs)
        r_row = rk.sum(axis=1)
        e_row = e.sum(axis=1)
        res[active] = r_row
        err[active] = e_row
        done = e_row <= rtol * np.abs(r_row)
        active = active[~done]
        m *= 2
        if m > mmax:
            break
    return res, err, active.size == 0


def _inner_n3(F, r, A, d, rtol, counter):
    """(2 pi / d) r \\int_{|r-d|}^{r+d} s F(r, s) ds for arrays r, A=|r-d|."""
    B = r + d
    width = 2.0 * np.minimum(r, d)
    uselog = A < 0.25 * B
    lr = np.where(uselog, np.log(np.where(uselog, B / np.maximum(A, _UFLOW), 1.0)), 0.0)

    def fun(u, rows):
        rr = r[rows][:, None]
        a = A[rows][:, None]
        lg = uselog[rows][:, None]
        lrr = lr[rows][:, None]
        wd = width[rows][:, None]
        s = np.where(lg, a * np.exp(u * lrr), a + wd * u)
        jac = np.where(lg, s * lrr, wd)
        rb = np.broadcast_to(rr, s.shape)
        return (s * jac * F(rb.ravel(), s.ravel()).reshape(s.shape)).ravel()

    val, err, conv = _batched_unit(fun, r.size, rtol, counter)
    fac = 2.0 * math.pi / d * r
    return fac * val, fac * err, conv


def _inner_n2(F, r, A, d, rtol, counter):
    """2 r \\int_0^pi F(r, s(theta)) dtheta for arrays r, A=|r-d|."""
    rd = np.sqrt(r * d)
    w1 = np.arcsinh(np.sqrt(2.0) * rd / np.maximum(A, _UFLOW))

    def near(u, rows):
        a = A[rows][:, None]
        q = rd[rows][:, None]
        w = u * w1[rows][:, None]
        sig = a * np.sinh(w)
        s = a * np.cosh(w)
        half = np.sqrt(np.maximum(1.0 - sig * sig / (4.0 * q * q), 0.0))
        jac = s / (q * half) * w1[rows][:, None]
        rb = np.broadcast_to(r[rows][:, None], s.shape)
        return (jac * F(rb.ravel(), s.ravel()).reshape(s.shape)).ravel()

    def far(u, rows):
        rr = r[rows][:, None]
        th = 0.5 * math.pi * (1.0 + u)
        s = np.sqrt(rr * rr + d * d - 2.0 * rr * d * np.cos(th))
        rb = np.broadcast_to(rr, s.shape)
        return (0.5 * math.pi * F(rb.ravel(), s.ravel()).reshape(s.shape)).ravel()

    v1, e1, c1 = _batched_unit(near, r.size, rtol, counter)
    v2, e2, c2 = _batched_unit(far, r.size, rtol, counter)
    return 2.0 * r * (v1 + v2), 2.0 * r * (e1 + e2), c1 and c2


class _InnerTracker:
    def __init__(self):
        self.max_rel = 0.0
        self.converged = True

    def update(self, val, err, conv):
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.where(val != 0, err / np.abs(val), np.where(err > 0, np.inf, 0.0))
        if rel.size:
            self.max_rel = max(self.max_rel, float(np.max(rel)))
        self.converged = self.converged and conv


def _estimate_tail(F, d):
    R = np.array([1e2 * d, 1e3 * d])
    with np.errstate(all="ignore"):
        v = np.abs(np.asarray(F(R, R), dtype=float))
    if v[1] == 0.0 or v[1] < 1e-30 * v[0]:
        return "exp", None
    if v[0] == 0.0:
        raise InvalidSpecError("cannot infer tail behaviour of F")
    return "alg", math.log10(v[1] / v[0])


def composition_integral(n, F, d, tol=1e-9, *, r_exponent=None, s_exponent=None,
                         decay_rate=None, tail_exponent=None, abs_tol=0.0,
                         limit=DEFAULT_LIMIT, max_evaluations=DEFAULT_BUDGET):
    """\\int_{R^n} F(|x'|, |x'-y|) dx' with |y| = d, for n in {1, 2, 3}.

    F must accept numpy arrays (r, s).  ``r_exponent``/``s_exponent`` give the
    local powers of F as r -> 0 or s -> 0 (estimated when omitted).  At
    infinity F must decay like exp(-decay_rate (r + s)) or like r**tail_exponent
    along r ~ s; if neither is declared the behaviour is probed numerically.
    ``tol`` is relative, ``abs_tol`` an absolute floor.
    """
    if n not in (1, 2, 3):
        raise InvalidSpecError("composition_integral supports n in {1, 2, 3}")
    d = float(d)
    if not d > 0:
        raise InvalidSpecError("separation d must be > 0")
    if r_exponent is None:
        r_exponent = _estimate_exponent(lambda t: F(t, np.full_like(t, d)), d)
    if s_exponent is None:
        s_exponent = _estimate_exponent(lambda t: F(np.full_like(t, d), t), d)
    for e in (r_exponent, s_exponent):
        if e + n <= 0:
            raise NonIntegrableError(f"local exponent {e} is not integrable in dimension {n}")
    if decay_rate is None and tail_exponent is None:
        kind, q = _estimate_tail(F, d)
        decay_rate = 1.0 / d if kind == "exp" else 0.0
        tail_exponent = q
    rate = decay_rate or 0.0
    if rate <= 0:
        if tail_exponent is None or tail_exponent + n >= 0:
            raise NonIntegrableError("integrand does not decay fast enough at infinity")
    counter = _Counter(max_evaluations)
    pcs = _Pieces(abs_tol, tol, limit, counter)
    half = 0.5 * d
    if n == 1:
        pcs.add_singular(lambda t: F(t, t + d), half, r_exponent)
        pcs.add_tail(lambda t: F(half + t, half + t + d), half, 2 * rate)
        pcs.add_singular(lambda t: F(t, d - t), half, r_exponent)
        pcs.add_singular(lambda t: F(d - t, t), half, s_exponent)
        pcs.add_singular(lambda t: F(d + t, t), half, s_exponent)
        pcs.add_tail(lambda t: F(d + half + t, half + t), half, 2 * rate)
        value, err, conv = pcs.run()
        return _result(value, err, counter, conv)

    inner = _inner_n2 if n == 2 else _inner_n3
    irtol = tol / 20.0
    track = _InnerTracker()

    def h(r, A):
        v, e, c = inner(F, r, A, d, irtol, counter)
        track.update(v, e, c)
        return v

    e0 = r_exponent + n - 1
    ed = s_exponent + n - 1
    pcs.add_singular(lambda t: h(t, d - t), half, e0)
    pcs.add_singular(lambda t: h(d - t, t), half, ed)
    pcs.add_singular(lambda t: h(d + t, t), half, ed)
    pcs.add_tail(lambda t: h(d + half + t, half + t), d, 2 * rate)
    value, err, conv = pcs.run()
    err += track.max_rel * abs(value)
    conv = conv and track.converged and err <= max(abs_tol, tol * abs(value)) * (1 + 1e-9)
    return _result(value, err, counter, conv)


# ----------------------------------------------------------------------------
# kernel-product fast path

@dataclass(frozen=True)
class KernelFactor:
    """The radial factor r**power * K_order(scale * r), or r**power alone.

    ``has_k`` selects the Bessel form.  Used to describe composition
    integrands of product type F(r, s) = a(r) b(s).
    """

    power: float
    order: float = 0.0
    scale: float = 0.0
    has_k: bool = False

    @property
    def local_exponent(self):
        if self.has_k and abs(self.order) > 0:
            return self.power - abs(self.order)
        return self.power

    def __call__(self, r):
        return _backend.python.kernel_factor(r, self.power, self.order, self.scale, self.has_k)


def kernel_composition(n, d, fa, fb, tol=1e-9, *, abs_tol=0.0, backend=None,
                       limit=DEFAULT_LIMIT, max_evaluations=DEFAULT_BUDGET):
    """composition_integral for F(r, s) = fa(r) fb(s) with KernelFactor inputs.

    Runs in the compiled core when available (``backend='compiled'``), else
    through the generic engine (``backend='python'``).
    """
    if backend is None:
        backend = "compiled" if _backend.compiled is not None else "python"
    if fa.has_k != fb.has_k:
        raise InvalidSpecError("mixed Bessel/Riesz factors are not supported")
    if fa.has_k:
        rate = 0.5 * (fa.scale + fb.scale)
        tail = None
    else:
        rate = 0.0
        tail = fa.power + fb.power
    for e in (fa.local_exponent, fb.local_exponent):
        if e + n <= 0:
            raise NonIntegrableError(f"local exponent {e} is not integrable in dimension {n}")
    if rate <= 0 and (tail is None or tail + n >= 0):
        raise NonIntegrableError("integrand does not decay fast enough at infinity")
    if backend == "compiled":
        if _backend.compiled is None:
            raise RuntimeError("compiled backend is not available")
        v, e, k, c = _backend.compiled.kernel_composition(
            n, float(d), fa.power, fa.order, fa.scale, int(fa.has_k),
            fb.power, fb.order, fb.scale, int(fb.has_k), fa.local_exponent, fb.local_exponent,
            float(tol), float(abs_tol), int(limit), int(max_evaluations))
        return QuadratureResult(v, e, k, bool(c))
    if backend != "python":
        raise ValueError(f"unknown backend {backend!r}")

    def F(r, s):
        return fa(r) * fb(s)

    return composition_integral(n, F, d, tol, r_exponent=fa.local_exponent,
                                s_exponent=fb.local_exponent, decay_rate=rate,
                                tail_exponent=tail, abs_tol=abs_tol, limit=limit,
                                max_evaluations=max_evaluations)
