import os
import subprocess
import sys

import numpy as np
import pytest

from fracpot import _backend
from fracpot.quadrature import KernelFactor, kernel_composition

compiled = pytest.mark.skipif(_backend.compiled is None, reason="compiled core not built")


def test_pure_python_switch():
    env = dict(os.environ, FRACPOT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import fracpot; print(fracpot.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@compiled
@pytest.mark.parametrize("nu", [0.0, 0.2, 0.5, 1.0, 2.75, 9.5])
def test_bessel_k_arrays_agree(nu):
    x = np.geomspace(1e-4, 60, 301)
    a = _backend.compiled.bessel_k_array(nu, x)
    b = _backend.python.bessel_k_array(nu, x)
    np.testing.assert_allclose(a, b, rtol=1e-13)
    assert _backend.compiled.bessel_k(nu, 1.7) == pytest.approx(_backend.python.bessel_k(nu, 1.7),
                                                                rel=1e-14)


@compiled
def test_kernel_factor_agrees():
    r = np.linspace(0.01, 12, 97)
    for args in [(-0.3, 0.7, 1.5, 1), (-1.4, 0.0, 0.0, 0)]:
        np.testing.assert_allclose(_backend.compiled.kernel_factor(r, *args),
                                   _backend.python.kernel_factor(r, *args), rtol=1e-13)


@compiled
@pytest.mark.parametrize("n,d", [(1, 0.5), (2, 1.0), (3, 2.0)])
def test_kernel_composition_backends_agree(n, d):
    fa = KernelFactor(-0.2, 0.5 * n - 0.7, 1.0, True)
    fb = KernelFactor(-0.4, 0.5 * n - 0.9, 1.0, True)
    c = kernel_composition(n, d, fa, fb, 1e-10, backend="compiled")
    p = kernel_composition(n, d, fa, fb, 1e-10, backend="python")
    assert c.converged and p.converged
    assert c.value == pytest.approx(p.value, rel=1e-9)


@compiled
def test_riesz_composition_backends_agree():
    fa, fb = KernelFactor(-2.0), KernelFactor(-1.6)
    c = kernel_composition(3, 1.0, fa, fb, 1e-10, backend="compiled")
    p = kernel_composition(3, 1.0, fa, fb, 1e-10, backend="python")
    assert c.value == pytest.approx(p.value, rel=1e-9)
