import math

import numpy as np
import pytest

from fracpot import kernels as k
from fracpot.errors import DomainError, SingularityError
from fracpot.kernels import PotentialParams as P

from .oracles.values import BESSEL_KERNEL, L1_N3, RIESZ_N3_HALF


@pytest.mark.parametrize("key", sorted(BESSEL_KERNEL))
def test_bessel_kernel_against_heat_integral(key):
    n, a, lam, r = key
    assert k.bessel_kernel(P(n, a, lam), r).value == pytest.approx(BESSEL_KERNEL[key], rel=1e-12)


def test_yukawa_and_resolvent_forms():
    r = np.linspace(0.1, 10, 25)
    np.testing.assert_allclose(k.bessel_kernel_values(P(3, 1.0, 1.0), r),
                               np.exp(-r) / (4 * np.pi * r), rtol=1e-13)
    np.testing.assert_allclose(k.bessel_kernel_values(P(1, 1.0, 4.0), r),
                               np.exp(-2 * r) / 4, rtol=1e-13)


def test_newtonian_riesz_kernel():
    assert k.riesz_kernel(P(3, 1.0), 2.0).value == pytest.approx(1 / (8 * math.pi), rel=1e-15)
    assert k.riesz_kernel(P(3, 0.5), 1.0).value == pytest.approx(RIESZ_N3_HALF, rel=1e-14)


def test_riesz_requires_alpha_below_half_n():
    with pytest.raises(DomainError):
        k.riesz_kernel(P(3, 1.5), 1.0)
    with pytest.raises(DomainError):
        k.riesz_gamma(1.0, 2)


def test_params_validation():
    for bad in [(4, 1.0, 1.0), (1, 0.0, 1.0), (1, 1.0, -1.0), (2, math.nan, 1.0)]:
        with pytest.raises(DomainError):
            P(*bad)


def test_kernel_rejects_r_zero():
    with pytest.raises((DomainError, SingularityError)):
        k.bessel_kernel(P(1, 1.0, 1.0), 0.0)


def test_self_test_passes():
    assert k.SELF_TEST["passed"]
    assert k.SELF_TEST["derived_rel_error"] < 1e-9
    # the alternative 2^(-n/2) prefactor is off by sqrt(2 pi)
    assert k.SELF_TEST["printed_value"] / k.SELF_TEST["exact"] == pytest.approx(
        math.sqrt(2 * math.pi), rel=1e-9)


def test_oracle_matches_closed_form_lattice():
    worst = 0.0
    for n in (1, 2, 3):
        for a in (0.3, 1.0, 1.7):
            for r in (0.05, 1.0, 6.0):
                p = P(n, a, 0.7)
                c = k.bessel_kernel(p, r).value
                o = k.bessel_kernel_oracle(p, r).value
                worst = max(worst, abs(c - o) / c)
    assert worst < 1e-10


def test_composition_constants():
    # anchor: n=3, alpha=beta=1/2 composes to pi^3 in the raw normalization
    assert k.riesz_comp_const(0.5, 0.5, 3) == pytest.approx(math.pi ** 3, rel=1e-14)
    assert k.bessel_comp_const(0.5, 0.5, 1) > 0


def test_asymptotics_leading_order():
    p = P(3, 1.0, 1.0)
    assert k.kernel_asymptotic(p, 1e-4, "small_r").value == pytest.approx(
        k.bessel_kernel(p, 1e-4).value, rel=2e-4)
    assert k.kernel_asymptotic(p, 40.0, "large_r").value == pytest.approx(
        k.bessel_kernel(p, 40.0).value, rel=1e-12)
    with pytest.raises(DomainError):
        k.kernel_asymptotic(p, 1.0, "middle")


def test_log_branch_constant():
    # alpha = n/2: g ~ C log(sqrt(lam) r) with C = -pi^(-n/2) 2^(1-n) / Gamma(n/2)
    assert k.small_r_constant(1.0, 2) == pytest.approx(-1 / (2 * math.pi), rel=1e-15)
    assert k.small_r_constant(0.5, 1) == pytest.approx(-1 / math.pi, rel=1e-15)


def test_domination_bound():
    p = P(2, 0.6, 0.3)
    for r in (0.01, 1.0, 5.0):
        assert k.bessel_kernel(p, r).value < k.riesz_domination_bound(P(2, 0.6), r)


def test_l1_norm():
    res = k.kernel_l1_norm(P(3, 0.4, 2.0))
    assert res.value == pytest.approx(L1_N3, rel=1e-11)
    assert res.value == pytest.approx(2.0 ** -0.4, rel=1e-11)
    assert k.printed_l1_constant(P(3, 0.4, 2.0)) == pytest.approx((2 * math.pi) ** -1.5 * 2 ** -0.4)


def test_sphere_area():
    assert [k.sphere_area(n) for n in (1, 2, 3)] == pytest.approx([2, 2 * math.pi, 4 * math.pi])
