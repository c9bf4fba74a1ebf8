import math

import numpy as np
import pytest

from fracpot import quadrature as q
from fracpot.errors import InvalidSpecError, NonIntegrableError


def test_interval_smooth():
    res = q.integrate_interval(np.sin, 0.0, math.pi)
    assert res.converged
    assert res.value == pytest.approx(2.0, rel=1e-14)


def test_interval_reversed_sign():
    assert q.integrate_interval(np.exp, 1.0, 0.0).value == pytest.approx(1 - math.e, rel=1e-14)


@pytest.mark.parametrize("e", [-0.9, -0.5, 0.3])
def test_interval_algebraic_endpoint(e):
    res = q.integrate_interval(lambda t: t ** e, 0.0, 1.0, tol=1e-13, singular_points=(0.0,),
                               exponents=(e,))
    assert res.value == pytest.approx(1.0 / (1.0 + e), rel=1e-11)


def test_interval_interior_log_singularity():
    res = q.integrate_interval(lambda t: np.log(np.abs(t - 0.3)), 0.0, 1.0, tol=1e-13,
                               singular_points=(0.3,))
    exact = 0.3 * math.log(0.3) + 0.7 * math.log(0.7) - 1.0
    assert res.value == pytest.approx(exact, rel=1e-11)


def test_halfline_exponential_tail():
    spec = q.IntegrandSpec(lambda t: t ** -0.5 * np.exp(-t), singular_points=(0.0,),
                           exponents=(-0.5,), tail_decay_rate=1.0)
    assert q.integrate_halfline(spec, tol=1e-13).value == pytest.approx(math.sqrt(math.pi),
                                                                        rel=1e-11)


def test_halfline_power_tail():
    spec = q.IntegrandSpec(lambda t: 1.0 / (1.0 + t) ** 2.5, tail_exponent=-2.5)
    assert q.integrate_halfline(spec, tol=1e-13).value == pytest.approx(1 / 1.5, rel=1e-11)


def test_halfline_rejects_non_integrable_tail():
    with pytest.raises(NonIntegrableError):
        q.integrate_halfline(q.IntegrandSpec(lambda t: 1 / (1 + t), tail_exponent=-1.0))
    with pytest.raises(InvalidSpecError):
        q.integrate_halfline(q.IntegrandSpec(lambda t: np.exp(-t)))


def test_spec_validation():
    with pytest.raises(InvalidSpecError):
        q.IntegrandSpec(np.exp, singular_points=(2.0, 1.0))
    with pytest.raises(InvalidSpecError):
        q.IntegrandSpec(np.exp, singular_points=(1.0,), exponents=(0, 0))


def test_power_for_exponent_monotone():
    ks = [q.power_for_exponent(e) for e in (-0.95, -0.5, 0.0, 1.0)]
    assert all(k >= 1 for k in ks)
    assert ks == sorted(ks, reverse=True)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_composition_of_gaussians(n):
    # exp(-r^2) * exp(-s^2) integrates to (pi/2)^(n/2) exp(-d^2/2)
    d = 0.8
    F = lambda r, s: np.exp(-r * r - s * s)
    res = q.composition_integral(n, F, d, tol=1e-11, decay_rate=1.0, r_exponent=0.0,
                                 s_exponent=0.0)
    exact = (math.pi / 2) ** (0.5 * n) * math.exp(-0.5 * d * d)
    assert res.value == pytest.approx(exact, rel=1e-9)


def test_composition_rejects_bad_input():
    with pytest.raises(InvalidSpecError):
        q.composition_integral(4, lambda r, s: r, 1.0)
    with pytest.raises(InvalidSpecError):
        q.composition_integral(1, lambda r, s: r, 0.0)


def test_kernel_factor_local_exponent():
    f = q.KernelFactor(-0.2, 0.7, 1.0, True)
    assert f.local_exponent == pytest.approx(-0.9)
    assert q.KernelFactor(-1.5).local_exponent == -1.5


def test_kernel_composition_rejects_mixed_and_nonintegrable():
    with pytest.raises(InvalidSpecError):
        q.kernel_composition(1, 1.0, q.KernelFactor(-0.5), q.KernelFactor(0, 0.5, 1.0, True))
    with pytest.raises(NonIntegrableError):
        q.kernel_composition(1, 1.0, q.KernelFactor(-1.0), q.KernelFactor(-0.5))
    with pytest.raises(NonIntegrableError):
        q.kernel_composition(3, 1.0, q.KernelFactor(-1.0), q.KernelFactor(-1.0))
