"""Compiled core vs pure-Python fallback.

    python3 benchmarks/bench_backends.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from fracpot import _backend
from fracpot.quadrature import KernelFactor, kernel_composition


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def cases():
    x = np.geomspace(1e-3, 50, 200_000)
    for nu in (0.3, 1.7):
        yield f"K_{nu} on 2e5 points", lambda b, nu=nu: b.bessel_k_array(nu, x), None
    for n in (1, 2, 3):
        # r^(alpha - n/2) K_(n/2 - alpha)(r) for alpha = 0.7 and 1.0
        na, nb = 0.5 * n - 0.7, 0.5 * n - 1.0
        fa = KernelFactor(-na, na, 1.0, True)
        fb = KernelFactor(-nb, nb, 1.0, True)
        yield (f"composition n={n}", None,
               lambda be, n=n, fa=fa, fb=fb: kernel_composition(n, 1.0, fa, fb, 1e-9,
                                                                backend=be).value)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _backend.compiled is None:
        raise SystemExit("compiled core not built; reinstall with Cython available")
    print(f"{'case':28s} {'compiled [s]':>13s} {'python [s]':>11s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, kfun, cfun in cases():
        if kfun is not None:
            tc, a = best_of(lambda: kfun(_backend.compiled), args.repeat)
            tp, b = best_of(lambda: kfun(_backend.python), args.repeat)
            diff = float(np.max(np.abs(a - b) / np.abs(b)))
        else:
            tc, a = best_of(lambda: cfun("compiled"), args.repeat)
            tp, b = best_of(lambda: cfun("python"), args.repeat)
            diff = abs(a - b) / abs(b)
        print(f"{name:28s} {tc:13.4f} {tp:11.4f} {tp / tc:8.1f} {diff:13.1e}")


if __name__ == "__main__":
    main()
