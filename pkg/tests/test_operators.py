import math
import warnings

import numpy as np
import pytest

from fracpot import operators as ops
from fracpot.errors import DomainError, RieszAtZeroError, WraparoundError
from fracpot.kernels import PotentialParams as P


@pytest.fixture(scope="module")
def grid1():
    return ops.Grid(1, 20.0, 4096)


def test_grid_geometry(grid1):
    assert grid1.h == pytest.approx(40 / 4096)
    assert grid1.dxi == pytest.approx(math.pi / 20)
    assert grid1.shape == (4096,)


def test_gaussian_transform_is_gaussian(grid1):
    f = ops.GridFunction.gaussian(grid1, 1.0)
    xi = grid1.frequencies
    np.testing.assert_allclose(f.transform.real, np.exp(-xi ** 2 / 2), atol=1e-13)
    assert np.max(np.abs(f.transform.imag)) < 1e-13


def test_plancherel_and_inverse():
    g = ops.Grid(2, 6.0, 64)
    rng = np.random.default_rng(1)
    f = ops.GridFunction(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    assert f.norm2() == pytest.approx(f.transform_norm2(), rel=1e-13)
    back = ops.GridFunction.from_transform(g, f.transform)
    np.testing.assert_allclose(back.samples, f.samples, atol=1e-12)


def test_samples_are_immutable(grid1):
    f = ops.GridFunction.gaussian(grid1)
    with pytest.raises(ValueError):
        f.samples[0] = 1.0


def test_multiplier_matches_resolvent_on_mode():
    g = ops.Grid(1, 10.0, 128)
    f = ops.GridFunction.mode(g, [3])
    out = ops.multiplier_apply(f, 1.0, 2.0)
    xi = 3 * math.pi / 10
    np.testing.assert_allclose(out.samples, f.samples / (xi * xi + 2.0), rtol=1e-12)


def test_riesz_multiplier_needs_zero_free_input(grid1):
    with pytest.raises(RieszAtZeroError):
        ops.multiplier_apply(ops.GridFunction.gaussian(grid1), 0.5, 0.0)
    ops.multiplier_apply(ops.GridFunction.lizorkin(grid1), 0.5, 0.0)


def test_semigroup_multiplier_exact(grid1):
    rep = ops.semigroup_check(ops.GridFunction.gaussian(grid1), 0.7, 1.1, 3.0)
    assert rep.passed and rep.rel_error < 1e-14


def test_dual_path_resolvent(grid1):
    with pytest.warns(ops.WraparoundWarning):
        rep = ops.dual_path_check(ops.GridFunction.gaussian(grid1), 1.0, 1.0)
    assert rep.passed and rep.rel_error < 1e-6


def test_wraparound_guard():
    g = ops.Grid(1, 5.0, 512)
    with pytest.raises(WraparoundError):
        ops.kernel_convolution_apply(ops.GridFunction.gaussian(g), P(1, 1.0, 0.01))


def test_witness_inf_exact_and_p2_bounds():
    full = ops.convolution_norm_witness(1, math.inf, 1.0, 1.0, [math.inf])[0]
    assert full == pytest.approx(1.0, rel=1e-10)
    rs = ops.convolution_norm_witness(1, 2, 1.0, 1.0, [1, 4, 16])
    assert all(b > a for a, b in zip(rs, rs[1:]))
    assert all(r < 1.0 for r in rs)


def test_witness_routes_agree():
    a = ops.convolution_norm_witness(1, 2, 1.0, 1.0, [2.0, 8.0], route="direct")
    b = ops.convolution_norm_witness(1, 2, 1.0, 1.0, [2.0, 8.0], route="tent")
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_witness_domain():
    with pytest.raises(DomainError):
        ops.convolution_norm_witness(1, 3, 1.0, 1.0, [1])
    with pytest.raises(DomainError):
        ops.convolution_norm_witness(2, 2, 1.0, 1.0, [1], route="direct")


def test_resolvent_gap_closed_form():
    for lam in (1.0, 0.3, 1e-3):
        assert ops.resolvent_gap(1.0, lam) == pytest.approx(lam / (1 + lam), rel=1e-12)


def test_multiplication_norm():
    g = ops.Grid(1, 4.0, 64)
    h = ops.GridFunction.from_function(g, lambda x: np.cos(x) * np.exp(-x * x))
    assert ops.multiplication_norm_check(h).passed


def test_domain_indicator_grows_above_quarter():
    vals = ops.riesz_domain_indicator(1, 0.35, [8, 16, 32])
    assert vals[2] - vals[1] > 0.5 * (vals[1] - vals[0]) > 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_radial_fourier(n):
    rep = ops.radial_fourier_check(P(n, 1.0, 2.0), 1.0)
    assert rep.passed, rep


def test_kernel_semigroup_on_wide_grid():
    g = ops.Grid(1, 30.0, 6144)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ops.WraparoundWarning)
        rep = ops.semigroup_check(ops.GridFunction.gaussian(g), 1.0, 1.0, 1.0, path="kernel")
    assert rep.rel_error < 1e-8


def test_reference_grid_rejects_second_order_kernel():
    g = ops.Grid(1, *ops.REFERENCE_GRIDS[1])
    with pytest.raises(WraparoundError):
        ops.kernel_convolution_apply(ops.GridFunction.gaussian(g), P(1, 2.0, 1.0))


def test_lizorkin_semigroup_riesz():
    g = ops.Grid(1, *ops.REFERENCE_GRIDS[1])
    rep = ops.semigroup_check(ops.GridFunction.lizorkin(g), 0.1, 0.1, 0.0, path="kernel")
    assert rep.passed and rep.rel_error < 1e-5
