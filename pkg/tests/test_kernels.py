import numpy as np
import pytest
from scipy.integrate import quad

from rectm.kernels import (
    biquadratic_kernel,
    kernel_by_name,
    kernel_eval,
    kernel_l2norm_sq,
    uniform_kernel,
)


class TestBiquadratic:
    def test_center_value(self, biquad):
        assert kernel_eval(biquad, 0.0) == pytest.approx(0.9375, abs=1e-15)

    def test_boundary_is_zero(self, biquad):
        assert kernel_eval(biquad, 1.0) == 0.0
        assert kernel_eval(biquad, -1.0) == 0.0
        assert kernel_eval(biquad, 1.7) == 0.0

    def test_half_point(self, biquad):
        # direct evaluation of the profile formula
        expected = 15.0 / 16.0 * (1.0 - 0.25) ** 2
        assert expected == 0.52734375
        assert kernel_eval(biquad, 0.5) == pytest.approx(expected, abs=1e-15)

    def test_non_finite_rejected(self, biquad):
        with pytest.raises(ValueError):
            kernel_eval(biquad, np.nan)
        with pytest.raises(ValueError):
            kernel_eval(biquad, np.inf)

    def test_dimension_mismatch(self, biquad):
        with pytest.raises(ValueError):
            kernel_eval(biquad, [0.1, 0.2])

    def test_integrates_to_one(self, biquad):
        total, _ = quad(lambda u: kernel_eval(biquad, u), -1, 1)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_l2_norm_sq_closed_form_and_quadrature(self, biquad):
        val = kernel_l2norm_sq(biquad)
        assert val == pytest.approx(5.0 / 7.0, rel=1e-12)
        by_quad, _ = quad(lambda u: kernel_eval(biquad, u) ** 2, -1, 1)
        assert val == pytest.approx(by_quad, abs=1e-8)


class TestUniform:
    def test_l2_norm_sq(self, unif):
        assert kernel_l2norm_sq(unif) == pytest.approx(0.5, rel=1e-12)

    def test_density(self, unif):
        assert kernel_eval(unif, 0.3) == pytest.approx(0.5)
        assert kernel_eval(unif, 1.2) == 0.0
        total, _ = quad(lambda u: kernel_eval(unif, u), -1, 1)
        assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("name", ["biquadratic", "uniform"])
def test_cauchy_schwarz_lower_bound(name):
    # ||K||_2^2 >= (integral K)^2 / support length for any density profile
    spec = kernel_by_name(name)
    assert kernel_l2norm_sq(spec) >= 1.0 / (2.0 * spec.support_radius) - 1e-12
    assert kernel_l2norm_sq(spec) > 0


def test_higher_dimension_normalization():
    # radial extension stays a density in p = 2
    spec = biquadratic_kernel(p=2)
    from scipy.integrate import dblquad

    total, _ = dblquad(
        lambda v, u: kernel_eval(spec, [u, v]), -1, 1, lambda u: -1, lambda u: 1
    )
    assert total == pytest.approx(1.0, abs=1e-6)


def test_unknown_kernel_name():
    with pytest.raises(ValueError, match="unknown kernel"):
        kernel_by_name("triweight")


def test_dimension_validation():
    with pytest.raises(ValueError):
        biquadratic_kernel(p=0)
    with pytest.raises(ValueError):
        uniform_kernel(p=-1)
