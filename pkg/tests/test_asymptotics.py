import math

import numpy as np
import pytest

from rectm.asymptotics import (
    AsymptoticSpec,
    bias_term,
    confidence_interval,
    gaussian_quantile,
    lambda22_plugin,
    lambda_matrix,
    v_matrix,
)
from rectm.expectiles import harmonic_taus
from rectm.kernels import biquadratic_kernel
from rectm.tail_moments import RectmEstimate

H2 = harmonic_taus(2)
H3 = harmonic_taus(3)


def lambda_bar(gamma, taus):
    """Covariance of normalized expectile estimates across nested levels.

    Entry (j, l), j <= l:  (1/tau_j) ((tau_l/tau_j)^-gamma / (1-2 gamma) - 1).
    The 2x2 matrices under test must reproduce the quadratic form
    theta' LamBar theta with theta = (b1 c + b2 (1-J), b2, ..., b2).
    """
    J = len(taus)
    M = np.empty((J, J))
    for j in range(J):
        for l in range(J):
            a, b = min(j, l), max(j, l)
            M[j, l] = (1.0 / taus[a]) * (
                (taus[b] / taus[a]) ** -gamma / (1.0 - 2.0 * gamma) - 1.0
            )
    return M


def lambda_from_quadratic_form(gamma, taus):
    J = len(taus)
    c = sum(math.log(1.0 / t) for t in taus)
    M = lambda_bar(gamma, taus)

    def q(b1, b2):
        theta = np.array([b1 * c + b2 * (1 - J)] + [b2] * (J - 1))
        return float(theta @ M @ theta) / c**2

    l11 = q(1.0, 0.0)
    l22 = q(0.0, 1.0)
    l12 = 0.5 * (q(1.0, 1.0) - l11 - l22)
    return l11, l12, l22


def v_from_quadratic_form(gamma, taus, k):
    l11, l12, l22 = lambda_from_quadratic_form(gamma, taus)
    L = np.array([[l11, l12], [l12, l22]])

    def q(b1, b2):
        theta = np.array([b1 * k + b2, b1 * k / (1.0 - k * gamma)])
        return float(theta @ L @ theta)

    v11 = q(1.0, 0.0)
    v22 = q(0.0, 1.0)
    v12 = 0.5 * (q(1.0, 1.0) - v11 - v22)
    return v11, v12, v22


class TestLambda:
    def test_hand_values(self):
        l11, l12, l22 = lambda_matrix(AsymptoticSpec(0.25, H2, 1))
        assert l11 == pytest.approx(1.0, rel=1e-12)
        assert l12 == pytest.approx(0.54594, rel=1e-4)
        assert l22 == pytest.approx(0.50613, rel=1e-4)
        # closed form for J=2: 4 (0.75 + 0.5 - 2^0.25) / log(2)^2
        assert l22 == pytest.approx(
            4 * (0.75 + 0.5 - 2**0.25) / math.log(2) ** 2, rel=1e-12
        )
        assert l12 == pytest.approx((2**0.25 - 1) / (0.5 * math.log(2)), rel=1e-12)

    @pytest.mark.parametrize("gamma", [0.05, 0.2, 0.25, 0.4, 0.45])
    @pytest.mark.parametrize("taus", [H2, H3, harmonic_taus(5), (1.0, 0.4, 0.37, 0.1)])
    def test_against_quadratic_form_derivation(self, gamma, taus):
        got = lambda_matrix(AsymptoticSpec(gamma, taus, 0))
        ref = lambda_from_quadratic_form(gamma, taus)
        for a, b in zip(got, ref):
            assert a == pytest.approx(b, rel=1e-10)

    def test_j3_has_exactly_one_cross_term(self):
        # dropping the (j=2, l=3) term must change the value by that term
        gamma = 0.3
        spec = AsymptoticSpec(gamma, H3, 0)
        l22 = lambda_matrix(spec).lambda22
        c = sum(math.log(1.0 / t) for t in H3)
        tail = H3[1:]
        main = (2 / (1 - 2 * gamma)) * (
            4 * (1 - gamma)
            + gamma * sum(1 / t for t in tail)
            + (1 - 3) * sum(t**-gamma for t in tail)
        )
        cross = (1 / H3[1]) * ((H3[2] / H3[1]) ** -gamma / (1 - 2 * gamma) - 1)
        assert l22 == pytest.approx((main + 2 * cross) / c**2, rel=1e-12)
        assert lambda_from_quadratic_form(gamma, H3)[2] == pytest.approx(l22, rel=1e-10)

    def test_gamma_gate(self):
        with pytest.raises(ValueError):
            AsymptoticSpec(0.5, H2, 1)
        with pytest.raises(ValueError):
            AsymptoticSpec(-0.1, H2, 1)

    def test_monotone_in_gamma(self):
        for taus in (H2, H3):
            grid = np.arange(0.01, 0.4501, 0.01)
            l11s = [lambda_matrix(AsymptoticSpec(g, taus, 0)).lambda11 for g in grid]
            l22s = [lambda_matrix(AsymptoticSpec(g, taus, 0)).lambda22 for g in grid]
            assert all(b > a for a, b in zip(l11s, l11s[1:]))
            assert all(b > a for a, b in zip(l22s, l22s[1:]))

    def test_positive_semidefinite(self):
        for taus in (H2, H3):
            for g in np.arange(0.01, 0.4501, 0.01):
                l11, l12, l22 = lambda_matrix(AsymptoticSpec(g, taus, 0))
                eig = np.linalg.eigvalsh(np.array([[l11, l12], [l12, l22]]))
                assert eig.min() >= -1e-12


class TestV:
    def test_hand_value(self):
        v11, v12, v22 = v_matrix(AsymptoticSpec(0.25, H2, 1))
        assert v11 == pytest.approx(3.3556, rel=1e-4)
        assert v22 == pytest.approx(1.0, rel=1e-12)

    def test_k0_collapses(self):
        v11, v12, v22 = v_matrix(AsymptoticSpec(0.25, H2, 0))
        l11 = lambda_matrix(AsymptoticSpec(0.25, H2, 0)).lambda11
        assert v11 == 0.0 and v12 == 0.0
        assert v22 == l11

    @pytest.mark.parametrize("gamma,k", [(0.2, 1.0), (0.3, 2.0), (0.45, 1.5), (0.1, 0.5)])
    def test_against_quadratic_form_derivation(self, gamma, k):
        got = v_matrix(AsymptoticSpec(gamma, H3, k))
        ref = v_from_quadratic_form(gamma, H3, k)
        for a, b in zip(got, ref):
            assert a == pytest.approx(b, rel=1e-10)

    def test_v11_monotone_in_gamma(self):
        for taus in (H2, H3):
            grid = np.arange(0.01, 0.4501, 0.01)
            v11s = [v_matrix(AsymptoticSpec(g, taus, 1)).v11 for g in grid]
            assert all(b > a for a, b in zip(v11s, v11s[1:]))

    def test_moment_gate(self):
        with pytest.raises(ValueError):
            AsymptoticSpec(0.4, H2, 3.0)


class TestBias:
    def test_hand_value(self):
        assert bias_term(AsymptoticSpec(0.25, H2, 1)) == pytest.approx(-0.057385, abs=1e-6)
        assert bias_term(AsymptoticSpec(0.25, H2, 1)) == pytest.approx(
            0.25 * (0.5**0.25 - 1) / math.log(2), rel=1e-12
        )

    def test_vanishes_as_gamma_to_zero(self):
        assert abs(bias_term(AsymptoticSpec(1e-9, H2, 1))) < 1e-9

    def test_negative_for_positive_gamma(self):
        for J in (2, 3, 4):
            assert bias_term(AsymptoticSpec(0.3, harmonic_taus(J), 1)) < 0

    def test_increasing_with_J_along_with_lambda22(self):
        # b is negative; adding harmonic weights moves it up toward zero
        # while the variance entry grows
        bs = [bias_term(AsymptoticSpec(0.25, harmonic_taus(J), 1)) for J in range(2, 7)]
        l22s = [
            lambda_matrix(AsymptoticSpec(0.25, harmonic_taus(J), 1)).lambda22
            for J in range(2, 7)
        ]
        assert all(b > a for a, b in zip(bs, bs[1:]))
        assert all(b > a for a, b in zip(l22s, l22s[1:]))


class TestGaussianQuantile:
    def test_median(self):
        assert gaussian_quantile(0.5) == 0.0

    def test_hand_value(self):
        assert gaussian_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)

    def test_against_erf_bisection(self):
        def phi(x):
            return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))

        def invert(p):
            lo, hi = -10.0, 10.0
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if phi(mid) < p:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

        for p in np.arange(0.01, 0.995, 0.01):
            assert gaussian_quantile(p) == pytest.approx(invert(p), abs=1e-8)

    def test_round_trip(self):
        for p in np.arange(0.01, 0.995, 0.01):
            z = gaussian_quantile(p)
            assert 0.5 * math.erfc(-z / math.sqrt(2)) == pytest.approx(p, abs=1e-8)

    def test_tails(self):
        assert gaussian_quantile(1e-10) == pytest.approx(-6.3613409, abs=1e-5)
        assert gaussian_quantile(1.0 - 1e-12) > 6.0

    def test_domain(self):
        for bad in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(ValueError):
                gaussian_quantile(bad)


def _estimate(value, k=1.0):
    return RectmEstimate(value=value, k=k, level=0.99, gamma_used=0.1, expectile_used=1.0)


class TestConfidenceInterval:
    KERNEL = biquadratic_kernel()

    def _unit_scale_args(self):
        # chosen so s = k ||K||2 g log((1-a)/(1-b)) sqrt(l22) / sqrt(n h (1-a) ghat)
        # collapses to 0.1: log term 1, l22 = 1, n h (1-a) ghat = 1
        alpha = 0.5
        beta = 1.0 - (1.0 - alpha) / math.e
        k_norm = self.KERNEL.l2_norm
        return dict(
            gamma=0.1 / k_norm,
            g_hat=0.5,
            n=4,
            h=1.0,
            p=1,
            alpha=alpha,
            beta=beta,
            theta=0.05,
            kernel=self.KERNEL,
            lambda22_hat=1.0,
        )

    def test_hand_case(self):
        ci = confidence_interval(_estimate(100.0), **self._unit_scale_args())
        assert ci.status == "ok"
        assert ci.scale == pytest.approx(0.1, rel=1e-12)
        z = gaussian_quantile(0.975)
        assert ci.lo == pytest.approx(100.0 / (1.0 + z * 0.1), abs=1e-4)
        assert ci.hi == pytest.approx(100.0 / (1.0 - z * 0.1), abs=1e-4)
        assert ci.lo < 100.0 < ci.hi

    def test_theta_to_one_collapses(self):
        args = self._unit_scale_args()
        args["theta"] = 1.0 - 1e-12
        ci = confidence_interval(_estimate(100.0), **args)
        assert ci.lo == pytest.approx(100.0, rel=1e-5)
        assert ci.hi == pytest.approx(100.0, rel=1e-5)

    def test_negative_lambda22_gives_no_interval(self):
        args = self._unit_scale_args()
        args["lambda22_hat"] = -0.3
        ci = confidence_interval(_estimate(100.0), **args)
        assert ci.status == "no-interval"
        assert ci.lo is None and ci.hi is None
        assert not ci.ok

    def test_unbounded_when_denominator_crosses_zero(self):
        args = self._unit_scale_args()
        args["lambda22_hat"] = 100.0  # s = 1.0 so 1 - z s < 0
        ci = confidence_interval(_estimate(100.0), **args)
        assert ci.status == "unbounded"
        assert ci.lo is not None and ci.hi is None

    def test_validation(self):
        args = self._unit_scale_args()
        args["theta"] = 0.0
        with pytest.raises(ValueError):
            confidence_interval(_estimate(1.0), **args)
        args = self._unit_scale_args()
        args["g_hat"] = 0.0
        with pytest.raises(ValueError):
            confidence_interval(_estimate(1.0), **args)


class TestLambda22Plugin:
    def test_matches_gated_version_below_half(self):
        spec = AsymptoticSpec(0.3, H2, 1)
        assert lambda22_plugin(0.3, H2) == pytest.approx(lambda_matrix(spec).lambda22, rel=1e-14)

    def test_negative_above_half(self):
        # estimated indexes above 1/2 produce a negative variance estimate,
        # the situation the interval reports as no-interval
        assert lambda22_plugin(0.6, H2) < 0

    def test_infinite_at_half(self):
        assert lambda22_plugin(0.5, H2) == math.inf
