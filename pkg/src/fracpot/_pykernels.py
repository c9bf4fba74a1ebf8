"""Pure-Python (numpy) backend for the hot kernels.

Implements K_nu(x) for real order by Temme's series (x <= 2) and Steed's
continued fraction CF2 (x > 2), followed by forward recurrence in the order.
The compiled extension exposes the same functions; this module is the
fallback used when the extension is unavailable.
"""

import math

import numpy as np

from ._rules import RGAMMA1

_EPS = 1.0e-16
_MAXIT = 10000
_XSWITCH = 2.0

_B_ODD = np.array(RGAMMA1[1::2])
_B_EVEN = np.array(RGAMMA1[0::2])


def _gam12(mu):
    """Return gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu) for |mu| <= 1/2."""
    m2 = mu * mu
    gam1 = 0.0
    gam2 = 0.0
    p = 1.0
    for bo, be in zip(RGAMMA1[1::2], RGAMMA1[0::2]):
        gam1 -= bo * p
        gam2 += be * p
        p *= m2
    return gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1


def _split_order(nu):
    nu = abs(float(nu))
    nl = int(nu + 0.5)
    return nl, nu - nl


def _temme_scalar(mu, x):
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _gam12(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    s = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    dd = x2 * x2
    s1 = p
    mu2 = mu * mu
    for i in range(1, _MAXIT):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= dd / i
        p /= i - mu
        q /= i + mu
        de = c * ff
        s += de
        s1 += c * (p - i * ff)
        if abs(de) < abs(s) * _EPS:
            break
    return s, s1 * 2.0 / x


def _steed_scalar(mu, x):
    mu2 = mu * mu
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu2
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    return kmu, kmu * (mu + x + 0.5 - h) / x


def bessel_k(nu, x):
    """K_nu(x) for real nu and x > 0 (scalar)."""
    x = float(x)
    if not x > 0.0:
        raise ValueError("bessel_k requires x > 0")
    nl, mu = _split_order(nu)
    if x <= _XSWITCH:
        kmu, k1 = _temme_scalar(mu, x)
    else:
        kmu, k1 = _steed_scalar(mu, x)
    xi2 = 2.0 / x
    for i in range(1, nl + 1):
        kmu, k1 = k1, (mu + i) * xi2 * k1 + kmu
    return kmu


def _temme_array(mu, x):
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    d = -np.log(x2)
    e = mu * d
    if abs(mu) < _EPS:
        fact2 = np.ones_like(x)
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            fact2 = np.where(np.abs(e) < _EPS, 1.0, np.sinh(e) / e)
    gam1, gam2, gampl, gammi = _gam12(mu)
    ff = fact * (gam1 * np.cosh(e) + gam2 * fact2 * d)
    s = ff.copy()
    e = np.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = np.ones_like(x)
    dd = x2 * x2
    s1 = p.copy()
    mu2 = mu * mu
    for i in range(1, _MAXIT):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= dd / i
        p /= i - mu
        q /= i + mu
        de = c * ff
        s += de
        s1 += c * (p - i * ff)
        if np.all(np.abs(de) < np.abs(s) * _EPS):
            break
    return s, s1 * 2.0 / x


def _steed_array(mu, x):
    mu2 = mu * mu
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25 - mu2
    q = a1
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels / s) < _EPS):
            break
    h = a1 * h
    kmu = np.sqrt(math.pi / (2.0 * x)) * np.exp(-x) / s
    return kmu, kmu * (mu + x + 0.5 - h) / x


def bessel_k_array(nu, x):
    """Vectorized K_nu(x) for a scalar order and an array of x > 0."""
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.ravel()
    if x.size and not np.all(x > 0.0):
        raise ValueError("bessel_k requires x > 0")
    nl, mu = _split_order(nu)
    kmu = np.empty_like(x)
    k1 = np.empty_like(x)
    lo = x <= _XSWITCH
    if np.any(lo):
        kmu[lo], k1[lo] = _temme_array(mu, x[lo])
    hi = ~lo
    if np.any(hi):
        # large arguments need only a few CF2 terms; batch them separately
        # so the slowest element does not set the iteration count for all
        mid = hi & (x <= 20.0)
        far = hi & (x > 20.0)
        for m in (mid, far):
            if np.any(m):
                kmu[m], k1[m] = _steed_array(mu, x[m])
    xi2 = 2.0 / x
    with np.errstate(over="ignore"):
        for i in range(1, nl + 1):
            kmu, k1 = k1, (mu + i) * xi2 * k1 + kmu
    return kmu.reshape(shape)


def kernel_factor(r, p, nu, c, has_k):
    """r^p * K_nu(c r) (or r^p alone) on an array of radii."""
    r = np.asarray(r, dtype=float)
    out = r ** p
    if has_k:
        out = out * bessel_k_array(nu, c * r)
    return out
