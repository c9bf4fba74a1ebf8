"""Numerical verification of the Bessel and Riesz composition formulas.

All identities are checked in translation-reduced form: x = 0, y = d e_1, so
each composition becomes a radial integral over x' in R^n with r = |x'| and
s = |x' - y| (see ``quadrature.composition_integral``).
"""

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .kernels import (PotentialParams, bessel_comp_const, bessel_kernel, bessel_kernel_values,
                      bessel_prefactor, riesz_comp_const, riesz_domination_bound, riesz_gamma)
from .quadrature import KernelFactor, integrate_halfline, integrate_interval, kernel_composition
from .quadrature import IntegrandSpec
from .special_functions import bessel_k, gamma_value

DEFAULT_TOL = 1e-6
QUAD_TOL = 1e-9


class NearSingularWarning(UserWarning):
    """An order exceeds n/2, so the kernel tends to a constant at the origin."""


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one identity check.

    ``params`` is (n, alpha, beta, lambda, d) with None for unused slots.
    ``lhs_error`` is the quadrature error estimate carried by ``lhs``.
    """

    identity: str
    params: tuple
    lhs: float
    rhs: float
    rel_error: float
    tolerance: float
    passed: bool
    notes: str = ""
    lhs_error: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = asdict(self)
        out["params"] = list(self.params)
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["params"] = tuple(data["params"])
        data.setdefault("extra", {})
        return cls(**data)


def make_report(identity, params, lhs, rhs, tol, notes="", lhs_error=0.0, extra=None,
                rel_error=None):
    """Build a report; rel_error defaults to |lhs - rhs| / |rhs|."""
    lhs = float(lhs)
    rhs = float(rhs)
    if rel_error is not None:
        rel = float(rel_error)
    else:
        rel = abs(lhs - rhs) / abs(rhs) if rhs != 0 else abs(lhs - rhs)
    return VerificationReport(identity, tuple(params), lhs, rhs, rel, float(tol),
                              bool(rel <= tol), notes, float(lhs_error), dict(extra or {}))


def _bessel_factor(n, order, lam):
    nu = 0.5 * n - order
    return KernelFactor(-nu, nu, math.sqrt(lam), True)


def _raw_bessel_integral(n, alpha, beta, lam, d, quad_tol, backend):
    """\\int K_{n/2-a}(c r) r^{a-n/2} K_{n/2-b}(c s) s^{b-n/2} dx' with c = sqrt(lam)."""
    return kernel_composition(n, d, _bessel_factor(n, alpha, lam), _bessel_factor(n, beta, lam),
                              quad_tol, backend=backend)


def _check_positive(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{k} must be > 0")


def _check_n(n):
    if n not in (1, 2, 3):
        raise DomainError("n must be 1, 2 or 3")


def _quad_note(res):
    return "" if res.converged else "quadrature did not reach its target"


def _join(*parts):
    return "; ".join(p for p in parts if p)


def verify_bessel_composition(n, alpha, beta, lam, d, tol=DEFAULT_TOL, *, perturb=1.0,
                              quad_tol=QUAD_TOL, backend=None):
    """Compare the raw-K composition integral with kappa lambda^(-n/4) K_nu(sqrt(lam) d) / d^nu.

    ``perturb`` multiplies the constant kappa (sensitivity hook).
    """
    _check_n(n)
    _check_positive(alpha=alpha, beta=beta, lam=lam, d=d)
    notes = []
    if alpha > 0.5 * n or beta > 0.5 * n:
        msg = "order above n/2: kernel is constant plus a vanishing power at the origin"
        warnings.warn(msg, NearSingularWarning, stacklevel=2)
        notes.append(msg)
    res = _raw_bessel_integral(n, alpha, beta, lam, d, quad_tol, backend)
    nu = 0.5 * n - alpha - beta
    c = math.sqrt(lam)
    rhs = (perturb * bessel_comp_const(alpha, beta, n) * lam ** (-0.25 * n)
           * bessel_k(nu, c * d).value * d ** (-nu))
    notes.append(_quad_note(res))
    return make_report("bessel-composition", (n, alpha, beta, lam, d), res.value, rhs, tol,
                       _join(*notes), res.abs_error_estimate)


def _riesz_unit_integral(n, alpha, beta, quad_tol, backend):
    fa = KernelFactor(2 * alpha - n)
    fb = KernelFactor(2 * beta - n)
    return kernel_composition(n, 1.0, fa, fb, quad_tol, backend=backend)


def _check_riesz_region(n, alpha, beta):
    h = 0.5 * n
    if not (0 < alpha < h and 0 < beta < h and alpha + beta < h):
        raise DomainError("Riesz composition requires alpha, beta and alpha+beta in (0, n/2)")


def verify_riesz_composition(n, alpha, beta, d, tol=DEFAULT_TOL, *, perturb=1.0,
                             quad_tol=QUAD_TOL, backend=None):
    """Compare \\int r^(2a-n) s^(2b-n) dx' with k_{a,b,n} d^(2a+2b-n).

    The integral is computed at d = 1 and rescaled by homogeneity.
    """
    _check_n(n)
    _check_riesz_region(n, alpha, beta)
    _check_positive(d=d)
    res = _riesz_unit_integral(n, alpha, beta, quad_tol, backend)
    scale = d ** (2 * alpha + 2 * beta - n)
    rhs = perturb * riesz_comp_const(alpha, beta, n) * scale
    return make_report("riesz-composition", (n, alpha, beta, None, d), res.value * scale, rhs,
                       tol, _quad_note(res), res.abs_error_estimate * scale)


def _normalized_composition(n, alpha, beta, lam, d, quad_tol, backend):
    pa = bessel_prefactor(PotentialParams(n, alpha, lam))
    pb = bessel_prefactor(PotentialParams(n, beta, lam))
    res = _raw_bessel_integral(n, alpha, beta, lam, d, quad_tol, backend)
    return pa * pb * res.value, abs(pa * pb) * res.abs_error_estimate, res


def riesz_from_bessel_limit(n, alpha, beta, d, lambda_sequence, tol=1e-3, *, seed=0,
                            samples=100, quad_tol=QUAD_TOL, backend=None):
    """Normalized Bessel compositions along lambda -> 0 against the Riesz composition.

    Each report compares the normalized Bessel LHS at one lambda with the
    Riesz LHS (gamma-normalized kernels).  ``extra`` carries the monotonicity
    flag of the whole error sequence and the count of domination samples
    (Bessel integrand strictly below the product of Riesz bounds) out of
    ``samples`` random points x'.
    """
    _check_n(n)
    _check_riesz_region(n, alpha, beta)
    _check_positive(d=d)
    lams = [float(v) for v in lambda_sequence]
    if not lams or any(v <= 0 for v in lams) or any(b >= a for a, b in zip(lams, lams[1:])):
        raise DomainError("lambda_sequence must be positive and strictly decreasing")
    ga = riesz_gamma(alpha, n)
    gb = riesz_gamma(beta, n)
    riesz = _riesz_unit_integral(n, alpha, beta, quad_tol, backend)
    scale = d ** (2 * alpha + 2 * beta - n)
    target = riesz.value * scale / (ga * gb)

    rng = np.random.default_rng(seed)
    pts = rng.uniform(-3 * d, 3 * d, size=(samples, n))
    r = np.linalg.norm(pts, axis=1)
    y = np.zeros(n)
    y[0] = d
    s = np.linalg.norm(pts - y, axis=1)
    bound = np.array([riesz_domination_bound(PotentialParams(n, alpha), ri) *
                      riesz_domination_bound(PotentialParams(n, beta), si)
                      for ri, si in zip(r, s)])

    values, errs, doms, convs = [], [], [], []
    for lam in lams:
        v, e, res = _normalized_composition(n, alpha, beta, lam, d, quad_tol, backend)
        values.append(v)
        errs.append(e)
        convs.append(res.converged)
        integrand = (bessel_kernel_values(PotentialParams(n, alpha, lam), r)
                     * bessel_kernel_values(PotentialParams(n, beta, lam), s))
        doms.append(int(np.sum(integrand < bound)))
    gaps = [abs(v - target) / abs(target) for v in values]
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    reports = []
    for lam, v, e, dom, conv in zip(lams, values, errs, doms, convs):
        notes = _join("" if monotone else "error sequence not strictly decreasing",
                      "" if dom == samples else f"domination violated at {samples - dom} samples",
                      "" if conv else "quadrature did not reach its target")
        reports.append(make_report("riesz-limit", (n, alpha, beta, lam, d), v, target, tol, notes,
                                   e, {"monotone": monotone, "dominated": dom,
                                       "samples": samples}))
    return reports


def heat_kernel(n, x_norm, t):
    """Gauss-Weierstrass kernel (4 pi t)^(-n/2) exp(-|x|^2 / (4t))."""
    if not t > 0:
        raise DomainError("heat_kernel requires t > 0")
    x = np.asarray(x_norm, dtype=float)
    v = (4 * math.pi * t) ** (-0.5 * n) * np.exp(-x * x / (4 * t))
    return float(v) if v.ndim == 0 else v


def _heat_convolution_1d(x, t, s):
    """(W(.,t) * W(.,s))(x) on the line, split at the integrand's peak."""
    c = x * t / (t + s)
    rate = 1.0 / math.sqrt(t * s)

    def f(u):
        return heat_kernel(1, u, t) * heat_kernel(1, x - u, s)

    right = integrate_halfline(IntegrandSpec(lambda u: f(c + u), tail_decay_rate=rate),
                               tol=0.0, rel_tol=1e-13)
    left = integrate_halfline(IntegrandSpec(lambda u: f(c - u), tail_decay_rate=rate),
                              tol=0.0, rel_tol=1e-13)
    return right.value + left.value


def _beta_integral(a, b):
    def piece(p, q):
        return integrate_interval(lambda v: v ** (p - 1) * (1 - v) ** (q - 1), 0.0, 0.5,
                                  tol=0.0, rel_tol=1e-13, singular_points=(0.0,),
                                  exponents=(p - 1,)).value
    return piece(a, b) + piece(b, a)


def _riesz_by_subordination(n, alpha, d):
    q = 0.25 * d * d

    def f(t):
        tt = np.maximum(t, 1e-300)
        return np.where(t > 0, np.exp(-q / tt) * tt ** (alpha - 1)
                        * (4 * math.pi * tt) ** (-0.5 * n), 0.0)

    spec = IntegrandSpec(f, tail_exponent=alpha - 1 - 0.5 * n, breakpoints=(q, 16 * q))
    return integrate_halfline(spec, tol=0.0, rel_tol=1e-12).value / gamma_value(alpha)


def verify_subordination_proof(n, alpha, beta, t, s, d, tol=1e-8):
    """Heat semigroup, Beta integral and Riesz-kernel subordination sub-identities.

    (a) (W(.,t) * W(.,s))(d e_1) = W(d, t+s), reduced to 1-D by factorization;
    (b) int_0^1 v^(a-1) (1-v)^(b-1) dv = Gamma(a) Gamma(b) / Gamma(a+b);
    (c) Gamma(a)^(-1) int_0^inf t^(a-1) W(d, t) dt = d^(2a-n) / gamma_{a,n},
        checked when d > 0 and a < n/2.
    The report carries the worst of the three.
    """
    _check_n(n)
    _check_positive(alpha=alpha, beta=beta, t=t, s=s)
    if not d >= 0:
        raise DomainError("d must be >= 0")
    semi_lhs = _heat_convolution_1d(d, t, s) * _heat_convolution_1d(0.0, t, s) ** (n - 1)
    semi_rhs = heat_kernel(n, d, t + s)
    beta_lhs = _beta_integral(alpha, beta)
    beta_rhs = gamma_value(alpha) * gamma_value(beta) / gamma_value(alpha + beta)
    parts = {"heat_semigroup": (semi_lhs, semi_rhs), "beta_integral": (beta_lhs, beta_rhs)}
    skipped = ""
    if not (d > 0 and alpha < 0.5 * n):
        skipped = "riesz subordination skipped (needs d > 0 and alpha < n/2)"
    else:
        parts["riesz_subordination"] = (_riesz_by_subordination(n, alpha, d),
                                        d ** (2 * alpha - n) / riesz_gamma(alpha, n))
    rels = {k: abs(a / b - 1) for k, (a, b) in parts.items()}
    worst = max(rels, key=rels.get)
    lhs, rhs = parts[worst]
    notes = _join(", ".join(f"{k}={v:.3e}" for k, v in rels.items()), skipped)
    return make_report("subordination", (n, alpha, beta, None, d), lhs, rhs, tol, notes,
                       extra={k: list(v) for k, v in parts.items()})


def verify_bessel_selfreproduction(n, alpha, lam, d, tol=1e-7, *, beta=None,
                                   quad_tol=QUAD_TOL, backend=None):
    """g_alpha * g_beta = g_{alpha+beta} for the normalized Bessel kernels (beta defaults to alpha).

    The notes record how far the one-order form g_alpha * g_alpha = g_alpha
    is from holding.
    """
    if beta is None:
        beta = alpha
    _check_n(n)
    _check_positive(alpha=alpha, beta=beta, lam=lam, d=d)
    v, e, res = _normalized_composition(n, alpha, beta, lam, d, quad_tol, backend)
    rhs = bessel_kernel(PotentialParams(n, alpha + beta, lam), d).value
    one_order = bessel_kernel(PotentialParams(n, alpha, lam), d).value
    note = f"one-order form g_a*g_a=g_a is off by {abs(v / one_order - 1):.3e}"
    return make_report("bessel-selfreproduction", (n, alpha, beta, lam, d), v, rhs, tol,
                       _join(note, _quad_note(res)), e)
