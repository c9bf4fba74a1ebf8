"""Gamma, modified Bessel K_nu and Bessel J_nu for real orders."""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DomainError, PoleError, QuadratureError
from .quadrature import IntegrandSpec, QuadratureResult, integrate_halfline

_EPS = float(np.finfo(float).eps)
NU_MAX = 50.0
EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class SpecialValue:
    value: float
    abs_error_estimate: float

    def __float__(self):
        return self.value


def gamma(x):
    """Gamma(x) for real x that is not a pole.

    Backed by the C library's gamma (math.gamma); poles at 0, -1, -2, ...
    raise PoleError.
    """
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x:g}")
    try:
        v = math.gamma(x)
    except OverflowError as exc:
        raise DomainError(f"Gamma({x:g}) overflows") from exc
    return SpecialValue(v, 8 * _EPS * abs(v))


def gamma_value(x):
    return gamma(x).value


def _check_k(nu, x):
    if not x > 0:
        raise DomainError("bessel_k requires x > 0")
    if abs(nu) > NU_MAX:
        raise DomainError(f"|nu| <= {NU_MAX:g} required")


def bessel_k(nu, x):
    """K_nu(x), evaluated at |nu| so that K_{-nu} = K_nu exactly."""
    nu = float(nu)
    x = float(x)
    _check_k(nu, x)
    v = _backend.active.bessel_k(abs(nu), x)
    return SpecialValue(v, 1e-14 * abs(v) * (1 + abs(nu)))


def bessel_k_values(nu, x):
    """Vectorized K_nu on an array of x > 0 (plain floats)."""
    x = np.asarray(x, dtype=float)
    if abs(nu) > NU_MAX:
        raise DomainError(f"|nu| <= {NU_MAX:g} required")
    if x.size and not np.all(x > 0):
        raise DomainError("bessel_k requires x > 0")
    return _backend.active.bessel_k_array(abs(float(nu)), x)


def bessel_k_oracle(nu, x):
    """K_nu(x) = (1/2) int_0^inf exp(-(x/2)(1/t + t)) t^(nu-1) dt by quadrature."""
    nu = float(nu)
    x = float(x)
    if not x > 0:
        raise DomainError("bessel_k_oracle requires x > 0")
    h = 0.5 * x
    a = nu - 1.0

    def f(t):
        with np.errstate(divide="ignore"):
            return 0.5 * np.exp(-h * (1.0 / t + t) + a * np.log(t))

    peak = (a + math.sqrt(a * a + x * x)) / x
    bps = [peak * c for c in (1 / 64, 1 / 8, 1.0, 8.0, 64.0)]
    spec = IntegrandSpec(f, tail_decay_rate=h, breakpoints=bps)
    res = integrate_halfline(spec, tol=1e-12, rel_tol=1e-13)
    if not res.converged and res.abs_error_estimate > 1e-10 * max(abs(res.value), 1e-300):
        raise QuadratureError(f"K oracle did not converge: {res}")
    return res


def _j0_series(x):
    q = -0.25 * x * x
    term = np.ones_like(x)
    s = np.ones_like(x)
    for k in range(1, 80):
        term = term * q / (k * k)
        s = s + term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(s), 1e-300)):
            break
    return s


def _j0_asymptotic(x):
    # Hankel expansion J_0 = sqrt(2/(pi x)) (P cos chi - Q sin chi),
    # chi = x - pi/4, with t_k = a_k(0) / x^k; summed while terms shrink
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    t = np.ones_like(x)
    alive = np.ones(x.shape, dtype=bool)
    prev = np.ones_like(x)
    for k in range(1, 80):
        t = t * (-((2 * k - 1) ** 2)) / (k * 8.0 * x)
        mag = np.abs(t)
        alive &= mag < prev
        prev = mag
        add = np.where(alive, t, 0.0)
        if k % 2:
            Q = Q + (-1) ** ((k - 1) // 2) * add
        else:
            P = P + (-1) ** (k // 2) * add
        if not np.any(alive & (mag > 1e-17)):
            break
    chi = x - 0.25 * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (P * np.cos(chi) - Q * np.sin(chi))


def bessel_j_values(nu, x):
    """Vectorized J_nu for nu in {-1/2, 0, 1/2} on an array of x > 0."""
    x = np.asarray(x, dtype=float)
    if nu == -0.5:
        return np.sqrt(2.0 / (math.pi * x)) * np.cos(x)
    if nu == 0.5:
        return np.sqrt(2.0 / (math.pi * x)) * np.sin(x)
    if nu != 0:
        raise DomainError("bessel_j supports nu in {-1/2, 0, 1/2} only")
    out = np.empty_like(x)
    small = x <= 12.0
    if np.any(small):
        out[small] = _j0_series(x[small])
    if np.any(~small):
        out[~small] = _j0_asymptotic(x[~small])
    return out


def bessel_j(nu, x):
    """J_nu(x) for nu in {-1/2, 0, 1/2} and x > 0."""
    nu = float(nu)
    x = float(x)
    if nu not in (-0.5, 0.0, 0.5):
        raise DomainError("bessel_j supports nu in {-1/2, 0, 1/2} only")
    if not x > 0:
        raise DomainError("bessel_j requires x > 0")
    v = float(bessel_j_values(nu, np.array([x]))[0])
    if nu == 0 and x <= 12.0:
        # cancellation in the alternating series grows like I_0(x)
        err = 4 * _EPS * math.cosh(x)
    else:
        err = 1e-12 * math.sqrt(2.0 / (math.pi * x))
    return SpecialValue(v, err)
