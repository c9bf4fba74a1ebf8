"""Regenerate frozen reference values with mpmath (not imported by the tests).

    python3 tests/oracles/generate.py > tests/oracles/values.py
"""

import mpmath as mp

mp.mp.dps = 25


def subordinated(n, alpha, lam, r):
    # heat-kernel integral, independent of the K_nu closed form
    f = lambda t: t ** (alpha - mp.mpf(n) / 2 - 1) * mp.exp(-lam * t - r * r / (4 * t))
    return (4 * mp.pi) ** (-mp.mpf(n) / 2) / mp.gamma(alpha) * mp.quad(f, [0, r * r / 4, 1, mp.inf])


def riesz(n, alpha, r):
    g = mp.pi ** (mp.mpf(n) / 2) * 2 ** (2 * alpha) * mp.gamma(alpha) / mp.gamma(mp.mpf(n) / 2 - alpha)
    return r ** (2 * alpha - n) / g


def closed(n, alpha, lam, r):
    # mpmath's own K_nu; used where nesting the heat integral would be too slow
    nu = mp.mpf(n) / 2 - alpha
    c = (2 * mp.pi) ** (-mp.mpf(n) / 2) * 2 ** (1 - alpha) / mp.gamma(alpha)
    return c * lam ** (nu / 2) * r ** (-nu) * mp.besselk(nu, mp.sqrt(lam) * r)


def conv_1d(alpha, beta, lam, d):
    g = lambda a, x: closed(1, a, lam, abs(x))
    f = lambda x: g(alpha, x) * g(beta, d - x)
    return mp.quad(f, [-mp.inf, -1, 0, d, d + 1, mp.inf])


K = [(0.0, 0.1), (0.0, 1.0), (0.5, 2.0), (1.0, 1e-3), (1.0, 5.0), (2.5, 0.7), (0.3, 30.0),
     (7.25, 3.0), (0.999, 1.5), (1e-6, 0.5)]
G = [0.1, 0.5, 1.0, 2.5, 7.3, 30.0, -0.5, -1.5]
KERN = [(1, 0.3, 1.0, 0.5), (1, 1.0, 2.0, 1.0), (2, 0.7, 0.25, 2.0), (2, 1.0, 1.0, 0.1),
        (3, 0.5, 4.0, 1.0), (3, 1.0, 1.0, 3.0), (3, 1.5, 0.5, 1e-3), (2, 1.5, 1.0, 10.0)]
CONV = [(0.3, 0.7, 1.0, 1.0), (1.0, 1.0, 0.25, 2.0), (0.5, 1.5, 4.0, 0.5)]

print('"""Frozen mpmath reference values; see generate.py."""\n')
print("BESSEL_K = {")
for nu, x in K:
    print(f"    ({nu!r}, {x!r}): {mp.nstr(mp.besselk(nu, x), 17)!s},")
print("}\n")
print("GAMMA = {")
for x in G:
    print(f"    {x!r}: {mp.nstr(mp.gamma(x), 17)!s},")
print("}\n")
print("# (n, alpha, lambda, r) -> kernel by heat-kernel subordination")
print("BESSEL_KERNEL = {")
for n, a, lam, r in KERN:
    print(f"    ({n}, {a!r}, {lam!r}, {r!r}): {mp.nstr(subordinated(n, a, lam, r), 17)!s},")
print("}\n")
print("# (alpha, beta, lambda, d) -> one-dimensional convolution integral of two kernels")
print("CONVOLUTION_1D = {")
for a, b, lam, d in CONV:
    print(f"    ({a!r}, {b!r}, {lam!r}, {d!r}): {mp.nstr(conv_1d(a, b, lam, d), 17)!s},")
print("}\n")
print("# radial L1 integral of the kernel, n=3, alpha=0.4, lambda=2")
l1 = mp.quad(lambda r: 4 * mp.pi * r * r * closed(3, mp.mpf("0.4"), 2, r), [0, 1, 10, mp.inf])
print(f"L1_N3 = {mp.nstr(l1, 17)}")
print(f"RIESZ_N3_HALF = {mp.nstr(riesz(3, mp.mpf('0.5'), 1), 17)}")
