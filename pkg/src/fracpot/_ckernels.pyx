# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled backend: K_nu and the kernel-product composition integrals.

Mirrors the algorithms of ``_pykernels`` and ``quadrature`` in C.  All heavy
routines run without the GIL.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport (sqrt, exp, log, sin, cos, sinh, cosh, fabs, pow, expm1, asinh, ceil,
                        isfinite, M_PI, INFINITY)
from libc.stdlib cimport malloc, free

from ._rules import XGK, WGK, WG, RGAMMA1

cnp.import_array()

cdef double _XK[21]
cdef double _WK[21]
cdef double _WG[21]
cdef double _RG[29]
cdef int _NRG = 29
cdef double _EPS = 2.220446049250313e-16
cdef double _UFLOW = 2.2250738585072014e-308
cdef double _WMAX = 700.0


def _init_rules():
    cdef int i, j
    for i in range(10):
        _XK[i] = -XGK[i]
        _WK[i] = WGK[i]
        _XK[20 - i] = XGK[i]
        _WK[20 - i] = WGK[i]
    _XK[10] = 0.0
    _WK[10] = WGK[10]
    for i in range(21):
        _WG[i] = 0.0
    for j in range(5):
        i = 2 * j + 1
        _WG[i] = WG[j]
        _WG[20 - i] = WG[j]
    for i in range(_NRG):
        _RG[i] = RGAMMA1[i]


_init_rules()


# ---------------------------------------------------------------------------
# K_nu

cdef void _gam12(double mu, double* gam1, double* gam2, double* gampl, double* gammi) noexcept nogil:
    cdef double m2 = mu * mu, p = 1.0, g1 = 0.0, g2 = 0.0
    cdef int j
    for j in range(0, _NRG - 1, 2):
        g2 += _RG[j] * p
        g1 -= _RG[j + 1] * p
        p *= m2
    gam1[0] = g1
    gam2[0] = g2
    gampl[0] = g2 - mu * g1
    gammi[0] = g2 + mu * g1


cdef double bessk(double nu, double x) noexcept nogil:
    cdef int nl, i
    cdef double mu, mu2, x2, pimu, fact, d, e, fact2, gam1, gam2, gampl, gammi
    cdef double ff, s, p, q, c, dd, s1, de, kmu, k1, b, h, delh, q1, q2, a1, a, qnew, dels, tmp
    if nu < 0:
        nu = -nu
    nl = <int>(nu + 0.5)
    mu = nu - nl
    mu2 = mu * mu
    if x <= 2.0:
        x2 = 0.5 * x
        pimu = M_PI * mu
        fact = 1.0 if fabs(pimu) < 1e-16 else pimu / sin(pimu)
        d = -log(x2)
        e = mu * d
        fact2 = 1.0 if fabs(e) < 1e-16 else sinh(e) / e
        _gam12(mu, &gam1, &gam2, &gampl, &gammi)
        ff = fact * (gam1 * cosh(e) + gam2 * fact2 * d)
        s = ff
        e = exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        dd = x2 * x2
        s1 = p
        for i in range(1, 10000):
            ff = (i * ff + p + q) / (i * i - mu2)
            c *= dd / i
            p /= i - mu
            q /= i + mu
            de = c * ff
            s += de
            s1 += c * (p - i * ff)
            if fabs(de) < fabs(s) * 1e-16:
                break
        kmu = s
        k1 = s1 * 2.0 / x
    else:
        b = 2.0 * (1.0 + x)
        d = 1.0 / b
        h = d
        delh = d
        q1 = 0.0
        q2 = 1.0
        a1 = 0.25 - mu2
        q = a1
        c = a1
        a = -a1
        s = 1.0 + q * delh
        for i in range(2, 10000):
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
            if fabs(dels / s) < 1e-16:
                break
        h = a1 * h
        kmu = sqrt(M_PI / (2.0 * x)) * exp(-x) / s
        k1 = kmu * (mu + x + 0.5 - h) / x
    for i in range(1, nl + 1):
        tmp = (mu + i) * (2.0 / x) * k1 + kmu
        kmu = k1
        k1 = tmp
    return kmu


def bessel_k(double nu, double x):
    """K_nu(x) for real nu and x > 0."""
    if not x > 0.0:
        raise ValueError("bessel_k requires x > 0")
    return bessk(nu, x)


def bessel_k_array(double nu, x):
    """Vectorized K_nu(x) for a scalar order and an array of x > 0."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(np.asarray(x, dtype=np.float64).ravel())
    cdef Py_ssize_t i, m = xa.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    for i in range(m):
        if not xa[i] > 0.0:
            raise ValueError("bessel_k requires x > 0")
    with nogil:
        for i in range(m):
            out[i] = bessk(nu, xa[i])
    return out.reshape(np.shape(x))


def kernel_factor(r, double p, double nu, double c, int has_k):
    """r^p * K_nu(c r) (or r^p alone) on an array of radii."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ra = np.ascontiguousarray(np.asarray(r, dtype=np.float64).ravel())
    cdef Py_ssize_t i, m = ra.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    with nogil:
        for i in range(m):
            out[i] = pow(ra[i], p) * (bessk(nu, c * ra[i]) if has_k else 1.0)
    return out.reshape(np.shape(r))


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod

ctypedef double (*fn_t)(double, void*) noexcept nogil

cdef struct Panel:
    double a
    double b
    double r
    double e
    int frozen


cdef void gk21(fn_t f, void* ctx, double a, double b, double* res, double* err,
               long* neval) noexcept nogil:
    cdef double c = 0.5 * (a + b), h = 0.5 * (b - a)
    cdef double y[21]
    cdef double resk = 0.0, resg = 0.0, resabs = 0.0, resasc = 0.0, reskh, e
    cdef int i
    for i in range(21):
        y[i] = f(c + h * _XK[i], ctx)
        resk += _WK[i] * y[i]
        resg += _WG[i] * y[i]
        resabs += _WK[i] * fabs(y[i])
    reskh = 0.5 * resk
    for i in range(21):
        resasc += _WK[i] * fabs(y[i] - reskh)
    neval[0] += 21
    h = fabs(h)
    resk *= h
    resg *= h
    resabs *= h
    resasc *= h
    e = fabs(resk - resg)
    if resasc != 0.0 and e != 0.0:
        e = resasc * min(1.0, pow(200.0 * e / resasc, 1.5))
    if resabs > _UFLOW / (50.0 * _EPS):
        e = max(50.0 * _EPS * resabs, e)
    if (b - a) < 0:
        resk = -resk
    for i in range(21):
        if not isfinite(y[i]):
            e = INFINITY
    res[0] = resk
    err[0] = e


cdef int adapt(fn_t f, void* ctx, double a, double b, double abstol, double reltol,
               int limit, long budget, double* res, double* err, long* neval) noexcept nogil:
    """Globally adaptive GK21; returns 1 when converged."""
    cdef Panel* P
    cdef int n = 1, i, w, nactive
    cdef double total, etot, tol, m, ra, ea, rb, eb, wmax
    if a == b:
        res[0] = 0.0
        err[0] = 0.0
        return 1
    if limit < 1:
        limit = 1
    P = <Panel*>malloc(limit * sizeof(Panel))
    if P == NULL:
        res[0] = 0.0
        err[0] = INFINITY
        return 0
    gk21(f, ctx, a, b, &P[0].r, &P[0].e, neval)
    P[0].a = a
    P[0].b = b
    P[0].frozen = 0
    total = P[0].r
    etot = P[0].e
    while True:
        tol = max(abstol, reltol * fabs(total))
        if etot <= tol or not isfinite(etot) or n >= limit or neval[0] >= budget:
            break
        w = -1
        wmax = -1.0
        for i in range(n):
            if not P[i].frozen and P[i].e > wmax:
                wmax = P[i].e
                w = i
        if w < 0:
            break
        if P[w].b - P[w].a <= 64.0 * _EPS * max(max(fabs(P[w].a), fabs(P[w].b)), _UFLOW):
            P[w].frozen = 1
            continue
        m = 0.5 * (P[w].a + P[w].b)
        gk21(f, ctx, P[w].a, m, &ra, &ea, neval)
        gk21(f, ctx, m, P[w].b, &rb, &eb, neval)
        total += ra + rb - P[w].r
        etot += ea + eb - P[w].e
        P[n].a = m
        P[n].b = P[w].b
        P[n].r = rb
        P[n].e = eb
        P[n].frozen = 0
        P[w].b = m
        P[w].r = ra
        P[w].e = ea
        n += 1
    total = 0.0
    etot = 0.0
    for i in range(n):
        total += P[i].r
        etot += P[i].e
    free(P)
    res[0] = total
    err[0] = etot
    return 1 if etot <= max(abstol, reltol * fabs(total)) else 0


cdef int power_for_exponent(double e) noexcept nogil:
    if e >= 2.0:
        return 1
    return <int>max(2.0, ceil(3.0 / (1.0 + e) - 1e-12))


# ---------------------------------------------------------------------------
# composition integrals of product kernels F(r, s) = fa(r) fb(s)

cdef struct Factor:
    double p
    double nu
    double c
    int has_k


cdef inline double factor(Factor* f, double r) noexcept nogil:
    cdef double v = pow(r, f.p)
    if f.has_k:
        v *= bessk(f.nu, f.c * r)
    return v


cdef struct Ctx:
    Factor fa
    Factor fb
    int n
    double d
    double irtol
    int limit
    long budget
    long neval
    double inner_maxrel
    int inner_ok
    # piece: r = r0 + sr t, q = q0 + sq t (q is s for n=1 and |r-d| otherwise)
    double r0
    double sr
    double q0
    double sq
    int maptype
    double L
    int k
    double ell
    # inner integrand state
    double ir
    double iA
    double ird
    double ilr
    double iwidth


cdef double inner3(double u, void* vctx) noexcept nogil:
    cdef Ctx* c = <Ctx*>vctx
    cdef double s, jac
    if c.ilr > 0:
        s = c.iA * exp(u * c.ilr)
        jac = s * c.ilr
    else:
        s = c.iA + c.iwidth * u
        jac = c.iwidth
    return s * jac * factor(&c.fb, s)


cdef double inner2_near(double w, void* vctx) noexcept nogil:
    cdef Ctx* c = <Ctx*>vctx
    cdef double sig = c.iA * sinh(w), s = c.iA * cosh(w), q = c.ird
    cdef double half = 1.0 - sig * sig / (4.0 * q * q)
    if half < 0:
        half = 0.0
    return s / (q * sqrt(half)) * factor(&c.fb, s)


cdef double inner2_far(double th, void* vctx) noexcept nogil:
    cdef Ctx* c = <Ctx*>vctx
    cdef double r = c.ir, d = c.d
    return factor(&c.fb, sqrt(r * r + d * d - 2.0 * r * d * cos(th)))


cdef double hval(Ctx* c, double r, double A) noexcept nogil:
    """Reduced outer integrand for n = 2, 3 at radius r with A = |r - d|."""
    cdef double v1 = 0.0, e1 = 0.0, v2 = 0.0, e2 = 0.0, B, fa, w1, inner, ierr
    cdef int ok1 = 1, ok2 = 1
    fa = factor(&c.fa, r)
    if fa == 0.0:
        return 0.0
    c.ir = r
    c.iA = A
    if c.n == 3:
        B = r + c.d
        c.iwidth = 2.0 * min(r, c.d)
        if A < 0.25 * B:
            c.ilr = log(B / max(A, _UFLOW))
        else:
            c.ilr = 0.0
        ok1 = adapt(inner3, c, 0.0, 1.0, 0.0, c.irtol, c.limit, c.budget, &v1, &e1, &c.neval)
        inner = v1
        ierr = e1
        fa *= 2.0 * M_PI / c.d * r
    else:
        c.ird = sqrt(r * c.d)
        w1 = asinh(sqrt(2.0) * c.ird / max(A, _UFLOW))
        ok1 = adapt(inner2_near, c, 0.0, w1, 0.0, c.irtol, c.limit, c.budget, &v1, &e1, &c.neval)
        ok2 = adapt(inner2_far, c, 0.5 * M_PI, M_PI, 0.0, c.irtol, c.limit, c.budget, &v2, &e2, &c.neval)
        inner = v1 + v2
        ierr = e1 + e2
        fa *= 2.0 * r
    if inner != 0.0:
        c.inner_maxrel = max(c.inner_maxrel, ierr / fabs(inner))
    elif ierr > 0:
        c.inner_maxrel = INFINITY
    if not (ok1 and ok2):
        c.inner_ok = 0
    return fa * inner


cdef double outer(double u, void* vctx) noexcept nogil:
    cdef Ctx* c = <Ctx*>vctx
    cdef double t, jac, r, q, e
    if c.maptype == 0:
        if c.k == 1:
            t = c.L * u
            jac = c.L
        else:
            t = c.L * pow(u, c.k)
            if t <= 0.0:
                return 0.0
            jac = c.k * c.L * pow(u, c.k - 1)
    else:
        e = exp(u)
        t = c.ell * expm1(u)
        jac = c.ell * e
    r = c.r0 + c.sr * t
    q = c.q0 + c.sq * t
    if c.n == 1:
        return jac * factor(&c.fa, r) * factor(&c.fb, q)
    return jac * hval(c, r, q)


cdef void set_piece(Ctx* c, double r0, double sr, double q0, double sq) noexcept nogil:
    c.r0 = r0
    c.sr = sr
    c.q0 = q0
    c.sq = sq


cdef int run_power(Ctx* c, double L, double e, double abstol, double reltol,
                   double* v, double* err) noexcept nogil:
    c.maptype = 0
    c.L = L
    c.k = power_for_exponent(e)
    return adapt(outer, c, 0.0, 1.0, abstol, reltol, c.limit, c.budget, v, err, &c.neval)


cdef int run_tail(Ctx* c, double ell, double rate, double abstol, double reltol,
                  double scale, double* v, double* err) noexcept nogil:
    cdef double w_lo = 0.0, w_hi, total = 0.0, etot = 0.0, pv, pe, floor_, target
    cdef double g0, g1, kappa, rem, delta = 0.5, wcap
    cdef int conv = 1, ok
    c.maptype = 1
    c.ell = ell
    wcap = _WMAX - log(max(ell, 1.0))
    if rate > 0:
        w_hi = log(1.0 + max(1.0, 4.0 / (rate * ell)))
    else:
        w_hi = 2.0
    while True:
        floor_ = 0.1 * max(abstol, reltol * fabs(scale))
        ok = adapt(outer, c, w_lo, w_hi, floor_, reltol, c.limit, c.budget, &pv, &pe, &c.neval)
        total += pv
        etot += pe
        if not ok:
            conv = 0
        target = 0.1 * max(abstol, reltol * fabs(scale + total))
        g0 = fabs(outer(w_hi, c))
        g1 = fabs(outer(w_hi + delta, c))
        c.neval += 2
        if g0 == 0.0:
            rem = 0.0
        elif g1 > 0.0 and g1 < g0:
            kappa = log(g0 / g1) / delta
            rem = g0 / kappa
        else:
            rem = INFINITY
        if rem <= target:
            etot += rem
            break
        if w_hi >= wcap or c.neval >= c.budget:
            etot += rem if isfinite(rem) else fabs(total)
            conv = 0
            break
        w_lo = w_hi
        w_hi = min(w_hi + max(1.0, 0.5 * w_hi), wcap)
    v[0] = total
    err[0] = etot
    return conv


def kernel_composition(int n, double d, double pa, double nua, double ca, int ka,
                       double pb, double nub, double cb, int kb, double ea, double eb,
                       double tol, double abstol, int limit, long budget):
    """Composition integral of r^pa K_nua(ca r) * s^pb K_nub(cb s) over R^n.

    Returns (value, abs_error_estimate, evaluations, converged).
    """
    cdef Ctx c
    cdef double vals[8]
    cdef double errs[8]
    cdef int conv = 1, np_ = 0, i, ntail
    cdef double half = 0.5 * d, scale, rate, value, err, afloor, e0, ed
    if n not in (1, 2, 3):
        raise ValueError("n must be 1, 2 or 3")
    c.fa.p = pa
    c.fa.nu = nua
    c.fa.c = ca
    c.fa.has_k = ka
    c.fb.p = pb
    c.fb.nu = nub
    c.fb.c = cb
    c.fb.has_k = kb
    c.n = n
    c.d = d
    c.irtol = tol / 20.0
    c.limit = limit
    c.budget = budget
    c.neval = 0
    c.inner_maxrel = 0.0
    c.inner_ok = 1
    rate = ca + cb if ka else 0.0
    with nogil:
        if n == 1:
            afloor = abstol / 6.0
            set_piece(&c, 0.0, 1.0, d, 1.0)
            conv &= run_power(&c, half, ea, afloor, tol, &vals[0], &errs[0])
            set_piece(&c, 0.0, 1.0, d, -1.0)
            conv &= run_power(&c, half, ea, afloor, tol, &vals[1], &errs[1])
            set_piece(&c, d, -1.0, 0.0, 1.0)
            conv &= run_power(&c, half, eb, afloor, tol, &vals[2], &errs[2])
            set_piece(&c, d, 1.0, 0.0, 1.0)
            conv &= run_power(&c, half, eb, afloor, tol, &vals[3], &errs[3])
            scale = vals[0] + vals[1] + vals[2] + vals[3]
            set_piece(&c, half, 1.0, half + d, 1.0)
            conv &= run_tail(&c, half, rate, afloor, tol, scale, &vals[4], &errs[4])
            set_piece(&c, d + half, 1.0, half, 1.0)
            conv &= run_tail(&c, half, rate, afloor, tol, scale, &vals[5], &errs[5])
            np_ = 6
        else:
            afloor = abstol / 4.0
            e0 = ea + n - 1
            ed = eb + n - 1
            set_piece(&c, 0.0, 1.0, d, -1.0)
            conv &= run_power(&c, half, e0, afloor, tol, &vals[0], &errs[0])
            set_piece(&c, d, -1.0, 0.0, 1.0)
            conv &= run_power(&c, half, ed, afloor, tol, &vals[1], &errs[1])
            set_piece(&c, d, 1.0, 0.0, 1.0)
            conv &= run_power(&c, half, ed, afloor, tol, &vals[2], &errs[2])
            scale = vals[0] + vals[1] + vals[2]
            set_piece(&c, d + half, 1.0, half, 1.0)
            conv &= run_tail(&c, d, rate, afloor, tol, scale, &vals[3], &errs[3])
            np_ = 4
    value = 0.0
    err = 0.0
    for i in range(np_):
        value += vals[i]
        err += errs[i]
    if n > 1:
        err += c.inner_maxrel * fabs(value)
        conv = conv and c.inner_ok
    conv = conv and err <= max(abstol, tol * fabs(value)) * (1 + 1e-9)
    return value, err, c.neval, bool(conv)
