"""Grid realizations of Bessel and Riesz potential operators and operator-level checks.

Transform convention on the periodic box [-L, L)^n with N points per axis:

    f^(xi) = (2 pi)^(-n/2) h^n sum_x f(x) e^(-i xi.x),    xi in (pi/L) Z^n,

which is unitary between l2(h^n) and l2((pi/L)^n).  The operator
(-Delta + lambda)^(-alpha) acts by the symbol (|xi|^2 + lambda)^(-alpha) and,
equivalently, by convolution with the kernel g of ``kernels.bessel_kernel``
(no extra (2 pi)^(-n/2) on the convolution).
"""

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import optimize, special

from .composition import make_report
from .errors import DomainError, RieszAtZeroError, WraparoundError
from .kernels import (PotentialParams, bessel_kernel, bessel_kernel_values, bessel_prefactor,
                      riesz_gamma, riesz_kernel_values, small_r_constant, sphere_area)
from .quadrature import IntegrandSpec, integrate_halfline, integrate_interval, power_for_exponent
from .special_functions import bessel_j_values, bessel_k_values, gamma_value

ZERO_MODE_TOL = 1e-12
WRAP_SILENT = 1e-12
WRAP_TOL = 1e-8

REFERENCE_GRIDS = {1: (20.0, 4096), 2: (10.0, 256), 3: (8.0, 128)}


class WraparoundWarning(UserWarning):
    """Kernel tail at the box edge is small but not negligible."""


@dataclass(frozen=True)
class Grid:
    """Periodic box [-L, L)^n with N (even) points per axis."""

    n: int
    L: float
    N: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError("n must be 1, 2 or 3")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise DomainError("L must be > 0")
        if self.N < 2 or self.N % 2:
            raise DomainError("N must be an even count >= 2")

    @property
    def h(self):
        return 2 * self.L / self.N

    @property
    def dxi(self):
        return math.pi / self.L

    @property
    def shape(self):
        return (self.N,) * self.n

    @property
    def axis(self):
        """Sample positions -L + k h, k = 0..N-1 (x = 0 at k = N/2)."""
        return -self.L + self.h * np.arange(self.N)

    @property
    def frequencies(self):
        """xi_k = pi k / L in FFT order, k in {-N/2, ..., N/2-1}."""
        return 2 * math.pi * np.fft.fftfreq(self.N, self.h)

    def coords(self):
        return np.meshgrid(*([self.axis] * self.n), indexing="ij")

    def radius(self):
        return np.sqrt(sum(c * c for c in self.coords()))

    def xi_squared(self):
        k = self.frequencies
        grids = np.meshgrid(*([k] * self.n), indexing="ij")
        return sum(g * g for g in grids)

    def displacement_radius(self):
        """|x| of the minimum-image displacement in FFT order (origin at index 0)."""
        m = np.fft.fftfreq(self.N, 1.0 / self.N)
        d = np.abs(m) * self.h
        grids = np.meshgrid(*([d] * self.n), indexing="ij")
        return np.sqrt(sum(g * g for g in grids))

    def _phase(self):
        k = np.fft.fftfreq(self.N, 1.0 / self.N).astype(int)
        s = np.where(k % 2 == 0, 1.0, -1.0)
        out = s
        for _ in range(self.n - 1):
            out = np.multiply.outer(out, s)
        return out


class GridFunction:
    """Immutable samples on a Grid, with the normalized discrete transform."""

    def __init__(self, grid, samples):
        a = np.array(samples, dtype=complex)
        if a.shape != grid.shape:
            raise DomainError(f"samples must have shape {grid.shape}")
        a.setflags(write=False)
        self.grid = grid
        self._samples = a

    @property
    def samples(self):
        return self._samples

    @property
    def real(self):
        return self._samples.real

    @cached_property
    def transform(self):
        """f^ at ``grid.frequencies`` (FFT order), (2 pi)^(-n/2)-normalized."""
        g = self.grid
        out = (2 * math.pi) ** (-0.5 * g.n) * g.h ** g.n * g._phase() * np.fft.fftn(self._samples)
        out.setflags(write=False)
        return out

    @classmethod
    def from_transform(cls, grid, fhat):
        fhat = np.asarray(fhat, dtype=complex)
        raw = np.fft.ifftn(fhat * grid._phase())
        return cls(grid, raw * (2 * math.pi) ** (0.5 * grid.n) / grid.h ** grid.n)

    @classmethod
    def from_function(cls, grid, f):
        """Samples f(x_1, ..., x_n) on the grid."""
        return cls(grid, f(*grid.coords()))

    @classmethod
    def gaussian(cls, grid, sigma=1.0):
        return cls(grid, np.exp(-grid.radius() ** 2 / (2 * sigma * sigma)))

    @classmethod
    def bump(cls, grid, radius=1.0):
        """exp(-1/(1-|x/radius|^2)) inside the ball, 0 outside."""
        q = (grid.radius() / radius) ** 2
        out = np.zeros(grid.shape)
        inside = q < 1
        out[inside] = np.exp(-1.0 / (1.0 - q[inside]))
        return cls(grid, out)

    @classmethod
    def lizorkin(cls, grid):
        """f0 with f0^(xi) = exp(-|xi|^2 - |xi|^-2) (zero at xi = 0)."""
        x2 = grid.xi_squared()
        fhat = np.zeros(grid.shape)
        nz = x2 > 0
        fhat[nz] = np.exp(-x2[nz] - 1.0 / x2[nz])
        return cls.from_transform(grid, fhat)

    @classmethod
    def delta(cls, grid):
        """Unit value at the cell containing the origin."""
        a = np.zeros(grid.shape)
        a[(grid.N // 2,) * grid.n] = 1.0
        return cls(grid, a)

    @classmethod
    def mode(cls, grid, k):
        """exp(i xi_k . x) for integer frequency indices k (one per axis)."""
        k = np.atleast_1d(np.asarray(k, dtype=float))
        phase = sum(c * (math.pi * kk / grid.L) for c, kk in zip(grid.coords(), k))
        return cls(grid, np.exp(1j * phase))

    def norm2(self):
        return math.sqrt(float(np.sum(np.abs(self._samples) ** 2)) * self.grid.h ** self.grid.n)

    def transform_norm2(self):
        return math.sqrt(float(np.sum(np.abs(self.transform) ** 2)) * self.grid.dxi ** self.grid.n)

    def zero_mode(self):
        """|f^(0)| (dxi)^(n/2): the l2 weight of the constant mode."""
        return abs(self.transform.flat[0]) * self.grid.dxi ** (0.5 * self.grid.n)


def _rel_l2(a, b):
    nb = np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / nb) if nb > 0 else float(np.linalg.norm(a - b))


def _guard_zero_mode(f):
    nf = f.norm2()
    if f.zero_mode() > ZERO_MODE_TOL * max(nf, 1e-300):
        raise RieszAtZeroError("Riesz operator applied to input with a significant zero mode; "
                               "use a Lizorkin-type input such as GridFunction.lizorkin")


def multiplier_apply(f, alpha, lam):
    """(-Delta + lam)^(-alpha) f via the symbol (|xi|^2 + lam)^(-alpha)."""
    if not (alpha >= 0 and math.isfinite(alpha)):
        raise DomainError("alpha must be >= 0")
    if not lam >= 0:
        raise DomainError("lambda must be >= 0")
    x2 = f.grid.xi_squared()
    if lam == 0 and alpha > 0:
        _guard_zero_mode(f)
        sym = np.zeros(f.grid.shape)
        nz = x2 > 0
        sym[nz] = x2[nz] ** -alpha
    else:
        sym = (x2 + lam) ** -alpha
    return GridFunction.from_transform(f.grid, sym * f.transform)


def _kernel_integral_against_gaussian(p, sigma):
    """\\int g(|x|) exp(-|x|^2 / (2 sigma^2)) dx over R^n."""
    n, a, lam = p.n, p.alpha, p.lam
    if lam == 0:
        return sphere_area(n) / riesz_gamma(a, n) * 0.5 * (2 * sigma * sigma) ** a * gamma_value(a)
    # Fourier side: (2 pi)^-n int (rho^2+lam)^-a (2 pi sigma^2)^(n/2) e^(-sigma^2 rho^2/2) d^n rho
    c = (2 * math.pi) ** -n * (2 * math.pi * sigma * sigma) ** (0.5 * n) * sphere_area(n)

    def f(rho):
        return rho ** (n - 1) * (rho * rho + lam) ** -a * np.exp(-0.5 * sigma * sigma * rho * rho)

    spec = IntegrandSpec(f, singular_points=(0.0,), exponents=(n - 1.0,),
                         tail_decay_rate=1.0 / sigma, breakpoints=(1.0 / sigma, 6.0 / sigma))
    return c * integrate_halfline(spec, tol=0.0, rel_tol=1e-13).value


def _cube_power_moment(n, e):
    """\\int_{[-1/2,1/2]^n} |x|^e dx for e > -n (pyramid decomposition)."""
    if n == 1:
        return 2 * 0.5 ** (e + 1) / (e + 1)
    xg, wg = np.polynomial.legendre.leggauss(48)
    a = 0.5 * xg
    w = 0.5 * wg
    if n == 2:
        rho = np.sqrt(0.25 + a * a)
        face = np.sum(w * rho ** e)
    else:
        A, B = np.meshgrid(a, a, indexing="ij")
        rho = np.sqrt(0.25 + A * A + B * B)
        face = np.sum(np.outer(w, w) * rho ** e)
    return 2 * n * 0.5 / (e + n) * face


def _analytic_center_weight(p, h):
    n, a = p.n, p.alpha
    if p.lam == 0:
        return h ** (2 * a) * _cube_power_moment(n, 2 * a - n) / riesz_gamma(a, n)
    C = small_r_constant(a, n)
    if a < 0.5 * n:
        return C * h ** (2 * a) * _cube_power_moment(n, 2 * a - n)
    if a == 0.5 * n:
        # d/de of the cube moment at e = 0 gives the mean of log|x|
        eps = 1e-5
        dm = (_cube_power_moment(n, eps) - _cube_power_moment(n, -eps)) / (2 * eps)
        return C * h ** n * (math.log(math.sqrt(p.lam) * h) + dm)
    return C * p.lam ** (0.5 * n - a) * h ** n


def _kernel_samples(p, grid):
    r = grid.displacement_radius()
    out = np.zeros(grid.shape)
    nz = r > 0
    if p.lam == 0:
        out[nz] = riesz_kernel_values(p, r[nz])
    else:
        out[nz] = bessel_kernel_values(p, r[nz])
    return out, r


RIESZ_IMAGES = {1: 64, 2: 4, 3: 1}


def riesz_image_correction(p, grid, images=None):
    """Periodic images of the Riesz kernel, sum over m != 0 of g(x + 2Lm), on the grid.

    Each image is taken relative to its value at x = 0 (a constant shift,
    invisible to zero-mean inputs), which makes the sum converge for
    2 alpha < 2.  Shells beyond ``images`` enter through their quadratic
    term: exactly (Hurwitz zeta) for n = 1, by a ball integral for n > 1.
    For n > 1 and alpha >= 1 the sum diverges and no images are added.
    Returned in FFT order.
    """
    n, a = p.n, p.alpha
    out = np.zeros(grid.shape)
    if n > 1 and a >= 1:
        return out
    M = RIESZ_IMAGES[n] if images is None else int(images)
    gam = riesz_gamma(a, n)
    e = 2 * a - n
    m1 = np.fft.fftfreq(grid.N, 1.0 / grid.N) * grid.h
    X = np.meshgrid(*([m1] * n), indexing="ij")
    x2 = sum(c * c for c in X)
    for idx in np.ndindex(*((2 * M + 1,) * n)):
        m = np.array(idx) - M
        if not np.any(m):
            continue
        c = 2 * grid.L * m
        rc = float(np.linalg.norm(c))
        r = np.sqrt(sum((X[i] + c[i]) ** 2 for i in range(n)))
        out += (r ** e - rc ** e) / gam
    # tail: sum over far shells of (1/2) x^T Hess g x = |x|^2 Lap g / (2n) by symmetry
    lap = e * (2 * a - 2) / gam * (2 * grid.L) ** (e - 2)
    if n == 1:
        tail = lap * 2 * float(special.zeta(2 - e, M + 1))
    else:
        rho = (2 * M + 1) / 2 * (2 ** n / (math.pi ** (0.5 * n) / gamma_value(0.5 * n + 1))) ** (1 / n)
        tail = lap * sphere_area(n) * rho ** (2 * a - 2) / (2 - 2 * a)
    return out + x2 * tail / (2 * n)


def kernel_grid(p, grid, center="calibrated", sigma=None, images=None):
    """Convolution weights w with (g * f)(x_i) ~ sum_j w_{i-j} f_j (FFT order).

    Off-center cells carry h^n g(|x|).  The origin cell carries either the
    "analytic" integral of the local power law over the cell, or the
    "calibrated" value that makes the lattice sum exact for a Gaussian of
    width ``sigma`` (default L/8), which also absorbs the midpoint error of
    the neighbouring singular cells.  Riesz kernels (lam = 0) also get their
    periodic images (``images`` shells, 0 disables).
    """
    g, r = _kernel_samples(p, grid)
    hn = grid.h ** grid.n
    w = hn * g
    if center == "analytic":
        w0 = _analytic_center_weight(p, grid.h)
    elif center == "calibrated":
        sigma = grid.L / 8 if sigma is None else sigma
        phi = np.exp(-r * r / (2 * sigma * sigma))
        w0 = _kernel_integral_against_gaussian(p, sigma) - math.fsum((w * phi).ravel())
    else:
        raise DomainError(f"unknown center rule {center!r}")
    w.flat[0] = w0
    if p.lam == 0 and images != 0:
        w = w + hn * riesz_image_correction(p, grid, images)
    return w


def wraparound_level(p, L):
    """Kernel value at the box edge, the size of the neglected periodic images."""
    if p.lam == 0:
        return math.inf
    return bessel_kernel(p, L).value


def kernel_convolution_apply(f, p, *, center="calibrated", wrap_tol=WRAP_TOL):
    """Discrete periodic convolution of f with the sampled kernel of p.

    For lam > 0 the kernel at distance L must be below ``wrap_tol`` (a
    warning is issued above 1e-12).  For lam = 0 the input must be of
    Lizorkin type (negligible zero mode), which makes the far kernel field
    cancel.
    """
    grid = f.grid
    if p.n != grid.n:
        raise DomainError("kernel and grid dimensions differ")
    if p.lam == 0:
        if not 0 < p.alpha < 0.5 * p.n:
            raise DomainError("Riesz convolution requires 0 < alpha < n/2")
        _guard_zero_mode(f)
    else:
        tail = wraparound_level(p, grid.L)
        if tail > wrap_tol:
            raise WraparoundError(f"kernel at distance L is {tail:.2e} > {wrap_tol:.0e}; "
                                  "enlarge the box")
        if tail > WRAP_SILENT:
            warnings.warn(f"kernel at distance L is {tail:.2e}", WraparoundWarning, stacklevel=2)
    w = kernel_grid(p, grid, center)
    out = np.fft.ifftn(np.fft.fftn(f.samples) * np.fft.fftn(w))
    return GridFunction(grid, out)


def _apply(f, alpha, lam, path, center="calibrated"):
    if path == "multiplier":
        return multiplier_apply(f, alpha, lam)
    if path == "kernel":
        return kernel_convolution_apply(f, PotentialParams(f.grid.n, alpha, lam), center=center)
    raise DomainError(f"unknown path {path!r}")


def semigroup_check(f, alpha, beta, lam, tol=None, *, path="multiplier"):
    """Compare A_beta(A_alpha f) with A_(alpha+beta) f along one path.

    Default tolerances: 1e-14 for the multiplier path, 1e-3 for the kernel path.
    """
    if tol is None:
        tol = 1e-14 if path == "multiplier" else 1e-3
    two = _apply(_apply(f, alpha, lam, path), beta, lam, path)
    one = _apply(f, alpha + beta, lam, path)
    g = f.grid
    return make_report("semigroup", (g.n, alpha, beta, lam, None), two.norm2(), one.norm2(), tol,
                       f"path={path}, L={g.L:g}, N={g.N}",
                       rel_error=_rel_l2(two.samples, one.samples))


def dual_path_check(f, alpha, lam, tol=1e-3, *, center="calibrated"):
    """Relative l2 distance between the multiplier and kernel-convolution paths."""
    a = multiplier_apply(f, alpha, lam).samples
    b = _apply(f, alpha, lam, "kernel", center).samples
    g = f.grid
    return make_report("dual-path", (g.n, alpha, None, lam, None), np.linalg.norm(b),
                       np.linalg.norm(a), tol, f"center={center}, L={g.L:g}, N={g.N}",
                       rel_error=_rel_l2(b, a))


# ---------------------------------------------------------------------------
# radial moments int_0^R g(rho) rho^m drho

class RadialMoment:
    """M(R) = int_0^R g(rho) rho^m drho for the Bessel kernel of p, vectorized in R.

    Tabulated by 40-point Gauss-Legendre panels on log-spaced knots (the
    first panel power-mapped at the origin); values between knots add one
    partial panel.
    """

    _X, _W = np.polynomial.legendre.leggauss(40)

    def __init__(self, p, m, knots=160):
        if not p.lam > 0:
            raise DomainError("RadialMoment needs lambda > 0")
        self.p = p
        self.m = m
        c = math.sqrt(p.lam)
        self._pref = bessel_prefactor(p)
        self._c = c
        e0 = m + min(2 * p.alpha - p.n, 0.0)
        if e0 <= -1:
            raise DomainError("moment diverges at the origin")
        self._k = power_for_exponent(e0 if 2 * p.alpha != p.n else max(e0 - 0.5, -0.5))
        rmax = (60.0 + 2 * m + abs(p.nu)) / c
        self.knots = np.concatenate([[0.0], np.geomspace(1e-3 / c, rmax, knots)])
        u = 0.5 * (self._X + 1.0)
        wu = 0.5 * self._W
        lo, hi = self.knots[1:-1], self.knots[2:]
        t = lo[:, None] + np.outer(hi - lo, u)
        panels = np.sum(self._f(t) * wu, axis=1) * (hi - lo)
        first = float(self._first_panel(np.array([self.knots[1]]))[0])
        self.cum = np.concatenate([[0.0], np.cumsum(np.concatenate([[first], panels]))])
        self.total = self.cum[-1]

    def _f(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        pos = r > 0
        rp = r[pos]
        out[pos] = (self._pref * rp ** (self.m - self.p.nu)
                    * bessel_k_values(self.p.nu, self._c * rp))
        return out

    def _first_panel(self, R):
        # t = R u^k absorbs the power-law behaviour at the origin
        u = 0.5 * (self._X + 1.0)
        wu = 0.5 * self._W
        k = self._k
        t = np.outer(R, u ** k)
        jac = np.outer(R, k * u ** (k - 1))
        return np.sum(self._f(t) * jac * wu, axis=1)

    def __call__(self, R):
        R = np.asarray(R, dtype=float)
        flat = np.minimum(R.ravel(), self.knots[-1])
        idx = np.clip(np.searchsorted(self.knots, flat, side="right") - 1, 0,
                      len(self.knots) - 2)
        lo = self.knots[idx]
        out = self.cum[idx].copy()
        u = 0.5 * (self._X + 1.0)
        wu = 0.5 * self._W
        first = idx == 0
        if np.any(first):
            out[first] = self._first_panel(flat[first])
        rest = ~first
        if np.any(rest):
            a = lo[rest]
            b = flat[rest]
            t = a[:, None] + np.outer(b - a, u)
            out[rest] += np.sum(self._f(t) * wu, axis=1) * (b - a)
        return out.reshape(R.shape)


# ---------------------------------------------------------------------------
# operator-norm witness

def _young_bound(p):
    return p.lam ** -p.alpha


def _witness_inf(p, j):
    """||f_j * g||_inf / ||f_j||_inf for f_j = indicator of [-j, j]^n (sup at 0)."""
    n = p.n
    if math.isinf(j):
        return sphere_area(n) * RadialMoment(p, n - 1).total
    M = RadialMoment(p, n - 1)
    if n == 1:
        return 2 * float(M(j))
    xg, wg = np.polynomial.legendre.leggauss(64)
    u = 0.5 * (xg + 1)
    wu = 0.5 * wg
    if n == 2:
        q = np.sqrt(1 + u * u)
        return 8 * float(np.sum(wu * M(j * q) / q ** 2))
    # 0 <= v <= u <= 1, v = u s
    U, S = np.meshgrid(u, u, indexing="ij")
    V = U * S
    q = np.sqrt(1 + U * U + V * V)
    W = np.outer(wu, wu) * U
    return 48 * float(np.sum(W * M(j * q) / q ** 3))


def _tent_p2(p, j):
    """r_j^2 = int g_{2 alpha}(|z|) prod_i (1 - |z_i|/(2j))_+ dz."""
    n = p.n
    p2 = PotentialParams(n, 2 * p.alpha, p.lam)
    J = 2.0 * j
    if n == 1:
        M0 = RadialMoment(p2, 0)
        M1 = RadialMoment(p2, 1)
        return 2 * float(M0(J) - M1(J) / J)
    xg, wg = np.polynomial.legendre.leggauss(64)
    u = 0.5 * (xg + 1)
    wu = 0.5 * wg
    if n == 2:
        # z = t (1, u): (1 - t/J)(1 - t u/J) = 1 - (1+u) t/J + u t^2/J^2
        q = np.sqrt(1 + u * u)
        Ms = [RadialMoment(p2, m) for m in (1, 2, 3)]
        inner = (Ms[0](J * q) / q ** 2 - (1 + u) * Ms[1](J * q) / (J * q ** 3)
                 + u * Ms[2](J * q) / (J * J * q ** 4))
        return 8 * float(np.sum(wu * inner))
    U, S = np.meshgrid(u, u, indexing="ij")
    V = U * S
    q = np.sqrt(1 + U * U + V * V)
    e1 = 1 + U + V
    e2 = U + V + U * V
    e3 = U * V
    Ms = [RadialMoment(p2, m) for m in (2, 3, 4, 5)]
    inner = (Ms[0](J * q) / q ** 3 - e1 * Ms[1](J * q) / (J * q ** 4)
             + e2 * Ms[2](J * q) / (J * J * q ** 5) - e3 * Ms[3](J * q) / (J ** 3 * q ** 6))
    W = np.outer(wu, wu) * U
    return 48 * float(np.sum(W * inner))


def _direct_p2_1d(p, j):
    """n = 1: ||f_j * g||_2 with (f_j * g)(x) = (2j)^(-1/2) (G(x+j) - G(x-j)), G odd antiderivative."""
    M = RadialMoment(p, 0)

    def G(x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * M(np.abs(x))

    def conv2(x):
        v = G(x + j) - G(x - j)
        return v * v / (2 * j)

    c = math.sqrt(p.lam)
    spec = IntegrandSpec(conv2, singular_points=(j,), exponents=(0.0,), tail_decay_rate=2 * c,
                         breakpoints=(0.5 * j,))
    res = integrate_halfline(spec, tol=0.0, rel_tol=1e-12)
    return math.sqrt(2 * res.value)


def convolution_norm_witness(n, p_exponent, alpha, lam, j_sequence, *, route=None):
    """Ratios r_j = ||f_j * g||_p / ||f_j||_p for f_j = (2j)^(-n/p) indicator([-j, j]^n).

    p = 2 uses the direct 1-D convolution for n = 1 (``route='direct'``) and
    the autocorrelation form r_j^2 = <f_j * f_j~, g * g> with g * g =
    g_{2 alpha} otherwise (``route='tent'``).  p = inf evaluates the box
    integral of g at the origin; j = inf gives the whole-space integral.
    """
    p = PotentialParams(n, alpha, lam)
    if not lam > 0:
        raise DomainError("convolution_norm_witness requires lambda > 0")
    if p_exponent in (math.inf, "inf"):
        return [_witness_inf(p, float(j)) for j in j_sequence]
    if p_exponent != 2:
        raise DomainError("p must be 2 or inf")
    if route is None:
        route = "direct" if n == 1 else "tent"
    if route == "direct":
        if n != 1:
            raise DomainError("the direct route is one-dimensional")
        return [_direct_p2_1d(p, float(j)) for j in j_sequence]
    if route == "tent":
        return [math.sqrt(_tent_p2(p, float(j))) for j in j_sequence]
    raise DomainError(f"unknown route {route!r}")


def witness_deficit_factor(n, p_exponent, j, j_eps):
    """Lower-bound factor ((j - j_eps)/j)^(n/p) - 1 for the witness deficit."""
    if p_exponent in (math.inf, "inf"):
        return 0.0
    return ((max(j - j_eps, 0.0)) / j) ** (n / p_exponent) - 1.0


# ---------------------------------------------------------------------------
# norm-resolvent gap

def _f_alpha(mu, alpha):
    mu = np.asarray(mu, dtype=float)
    with np.errstate(divide="ignore"):
        ma = mu ** alpha
    return ma / (1.0 + ma)


def resolvent_gap(alpha, lam, samples=4001):
    """sup_{mu >= 0} |f(mu + lam) - f(mu)| with f(mu) = mu^a / (1 + mu^a).

    Dense log-spaced sampling locates the maximum; golden-section search
    refines it inside the bracketing samples.
    """
    if not (alpha > 0 and lam > 0):
        raise DomainError("resolvent_gap requires alpha > 0 and lambda > 0")

    def gap(mu):
        return float(np.abs(_f_alpha(mu + lam, alpha) - _f_alpha(mu, alpha)))

    lo = math.log10(lam) - 14
    hi = math.log10(lam) + 14
    mus = np.concatenate([[0.0], np.logspace(lo, hi, samples)])
    vals = np.abs(_f_alpha(mus + lam, alpha) - _f_alpha(mus, alpha))
    i = int(np.argmax(vals))
    best = float(vals[i])
    if 0 < i < len(mus) - 1 and vals[i] > max(vals[i - 1], vals[i + 1]):
        res = optimize.minimize_scalar(lambda m: -gap(m), bracket=(mus[i - 1], mus[i], mus[i + 1]),
                                       method="golden", tol=1e-12)
        best = max(best, -float(res.fun))
    return best


# ---------------------------------------------------------------------------

def multiplication_norm_check(h, tol=1e-14):
    """The multiplication operator by h has norm max|h|, attained by a one-cell indicator."""
    a = np.abs(h.samples)
    nmax = float(a.max())
    idx = np.unravel_index(int(np.argmax(a)), a.shape)
    ind = np.zeros(h.grid.shape)
    ind[idx] = 1.0
    f = GridFunction(h.grid, ind)
    hf = GridFunction(h.grid, h.samples * ind)
    ratio = hf.norm2() / f.norm2()
    g = h.grid
    return make_report("multiplication-norm", (g.n, None, None, None, None), ratio, nmax, tol,
                       f"argmax cell {tuple(int(i) for i in idx)}")


def riesz_domain_indicator(n, alpha, L_values, h=0.125, profile=None):
    """sum_{xi != 0} |xi|^(-4 alpha) |f^(xi)|^2 (dxi)^n for a fixed bump on growing boxes.

    ``profile`` maps a Grid to a GridFunction (default: the standard bump of
    radius 1).  Grows without bound for alpha >= n/4 when f^(0) != 0.
    """
    if not alpha > 0:
        raise DomainError("alpha must be > 0")
    profile = profile or GridFunction.bump
    out = []
    for L in L_values:
        N = int(round(2 * L / h))
        N += N % 2
        grid = Grid(n, float(L), N)
        f = profile(grid)
        x2 = grid.xi_squared()
        nz = x2 > 0
        fh = np.abs(f.transform[nz]) ** 2
        out.append(float(np.sum(x2[nz] ** (-2 * alpha) * fh) * grid.dxi ** n))
    return out


# ---------------------------------------------------------------------------
# radial Fourier transform

def _radial_weight(n, xi, r):
    if n == 1:
        return 2 * np.cos(xi * r)
    if n == 2:
        return 2 * math.pi * bessel_j_values(0, xi * r)
    return 4 * math.pi * np.sinc(xi * r / math.pi)


def _wynn(s):
    """Wynn epsilon extrapolation of a sequence of partial sums."""
    s = list(s)
    if len(s) < 3:
        return s[-1]
    e_prev = [0.0] * (len(s) + 1)
    e_cur = list(s)
    best = s[-1]
    k = 0
    while len(e_cur) > 1:
        nxt = []
        for i in range(len(e_cur) - 1):
            diff = e_cur[i + 1] - e_cur[i]
            if diff == 0:
                return e_cur[i + 1]
            nxt.append(e_prev[i + 1] + 1.0 / diff)
        e_prev, e_cur = e_cur, nxt
        k += 1
        if k % 2 == 0 and e_cur:
            best = e_cur[-1]
    return best


def radial_fourier_check(p, xi_norm, tol=None, *, max_intervals=4000):
    """Hankel form of the transform of g at |xi| against (|xi|^2 + lam)^(-alpha).

    int_0^inf r^(n-1) g(r) W_n(|xi| r) dr with W_1 = 2 cos, W_2 = 2 pi J_0,
    W_3 = 4 pi sin(t)/t (the non-unitary transform).  The oscillatory range
    is summed between consecutive zeros of W_n and the partial sums are
    Wynn-accelerated.
    """
    if not p.lam > 0:
        raise DomainError("radial_fourier_check requires lambda > 0")
    if not xi_norm > 0:
        raise DomainError("xi must be > 0")
    n = p.n
    if tol is None:
        tol = 1e-5 if n == 2 else 1e-6
    xi = float(xi_norm)
    c = math.sqrt(p.lam)
    pref = bessel_prefactor(p)
    e0 = n - 1 + min(2 * p.alpha - n, 0.0)

    def f(r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        pos = r > 0
        rp = r[pos]
        out[pos] = (pref * rp ** (n - 1 - p.nu) * bessel_k_values(p.nu, c * rp)
                    * _radial_weight(n, xi, rp))
        return out

    shift = {1: 0.5, 2: 0.75, 3: 1.0}[n]
    zeros = (np.arange(max_intervals) + shift) * math.pi / xi
    first = integrate_interval(f, 0.0, zeros[0], tol=0.0, rel_tol=1e-13,
                               singular_points=(0.0,), exponents=(e0,))
    total = first.value
    partial = [total]
    err = first.abs_error_estimate
    slow = True
    for a, b in zip(zeros[:-1], zeros[1:]):
        piece = integrate_interval(f, float(a), float(b), tol=1e-17, rel_tol=1e-13)
        total += piece.value
        err += piece.abs_error_estimate
        partial.append(total)
        if abs(piece.value) < 1e-16 * max(abs(total), 1e-300) and c * b > 40:
            slow = False
            break
    value = _wynn(partial[-12:]) if slow else total
    rhs = (xi * xi + p.lam) ** -p.alpha
    notes = "slow convergence: oscillatory tail truncated" if slow else ""
    return make_report("fourier-radial", (n, p.alpha, None, p.lam, xi), value, rhs, tol, notes,
                       err)
