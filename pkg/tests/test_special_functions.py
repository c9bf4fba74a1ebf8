import math

import numpy as np
import pytest

from fracpot import special_functions as sf
from fracpot.errors import DomainError, PoleError

from .oracles.values import BESSEL_K, GAMMA


@pytest.mark.parametrize("x,expected", sorted(GAMMA.items()))
def test_gamma_matches_mpmath(x, expected):
    assert sf.gamma(x).value == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
def test_gamma_poles(x):
    with pytest.raises(PoleError):
        sf.gamma(x)


def test_gamma_overflow():
    with pytest.raises(DomainError):
        sf.gamma(200.0)


@pytest.mark.parametrize("nu,x", sorted(BESSEL_K))
def test_bessel_k_matches_mpmath(nu, x):
    expected = BESSEL_K[(nu, x)]
    assert sf.bessel_k(nu, x).value == pytest.approx(expected, rel=1e-13)
    assert sf.bessel_k(-nu, x).value == sf.bessel_k(nu, x).value


def test_bessel_k_half_order_closed_form():
    x = np.linspace(0.05, 40, 200)
    exact = np.sqrt(np.pi / (2 * x)) * np.exp(-x)
    np.testing.assert_allclose(sf.bessel_k_values(0.5, x), exact, rtol=1e-14)


def test_bessel_k_values_agree_with_scalar():
    x = np.array([1e-3, 0.3, 2.0, 2.0001, 17.0])
    vec = sf.bessel_k_values(1.3, x)
    for xi, v in zip(x, vec):
        assert v == pytest.approx(sf.bessel_k(1.3, xi).value, rel=1e-14)


def test_bessel_k_oracle_is_independent_and_agrees():
    for nu, x in [(0.2, 0.4), (1.5, 3.0), (0.0, 8.0)]:
        o = sf.bessel_k_oracle(nu, x)
        assert o.value == pytest.approx(BESSEL_K.get((nu, x), sf.bessel_k(nu, x).value),
                                        rel=1e-11)


def test_bessel_k_domain():
    with pytest.raises(DomainError):
        sf.bessel_k(0.5, 0.0)
    with pytest.raises(DomainError):
        sf.bessel_k(sf.NU_MAX + 1, 1.0)


def test_bessel_j0_against_known_zero():
    # first zero of J_0
    assert abs(sf.bessel_j(0, 2.404825557695773).value) < 1e-14
    with pytest.raises(DomainError):
        sf.bessel_j(1.0, 1.0)
    x = np.array([0.5, 5.0, 25.0, 80.0])
    ref = [0.93846980724081290, -0.17759677131433830, 0.09626678327595811, -0.069742165512210023]
    np.testing.assert_allclose(sf.bessel_j_values(0, x), ref, rtol=1e-12, atol=1e-15)
