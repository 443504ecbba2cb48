"""Tests for the dual potentials, gauges, and the Fenchel-Young gap.

Expected values marked "50-digit oracle" were computed with mpmath at
dps=50 and frozen here; the float64 implementation must match them to the
stated tolerance.  Structural identities (shift invariance, round trips,
finite-difference gradients) are checked over seeded random samples.
"""

import math

import numpy as np
import pytest

from softseam.dual_core import (
    GapReport,
    LogitClass,
    Logits,
    Probabilities,
    fenchel_young_gap,
    grad_potential,
    kl_gap_array,
    log_sum_exp,
    log_sum_exp_array,
    neg_entropy,
    softmax,
    temperature_softmax,
    two_class_delta,
    two_class_sigmoid,
    zero_mean_array,
)
from softseam.errors import DimensionError, DomainError

LOG2 = 0.6931471805599453  # 50-digit oracle: log 2
LOG3 = 1.0986122886681098  # 50-digit oracle: log 3
SIGMA1 = 0.7310585786300049  # 50-digit oracle: 1/(1+e^-1)
SIGMA2 = 0.8807970779778824  # 50-digit oracle: 1/(1+e^-2)


class TestProbabilitiesType:
    def test_rejects_nonpositive_entries(self):
        with pytest.raises(DomainError):
            Probabilities([0.5, 0.5, 0.0])
        with pytest.raises(DomainError):
            Probabilities([1.2, -0.2])

    def test_rejects_bad_sum(self):
        with pytest.raises(DomainError):
            Probabilities([0.6, 0.6])

    def test_rejects_scalar_and_short(self):
        with pytest.raises(DimensionError):
            Probabilities([1.0])
        with pytest.raises(DomainError):
            Probabilities([[0.5, 0.5]])

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            Probabilities([0.5, np.nan])

    def test_renormalizes_exactly(self):
        # raw sum within 1e-12 of 1 is accepted then divided out
        raw = np.array([0.25, 0.25, 0.5]) * (1.0 + 4e-13)
        y = Probabilities(raw)
        assert y.values.sum() == pytest.approx(1.0, abs=1e-15)

    def test_values_are_readonly(self):
        y = Probabilities([0.5, 0.5])
        with pytest.raises(ValueError):
            y.values[0] = 0.3


class TestLogitClassType:
    def test_rejects_nonzero_mean(self):
        with pytest.raises(DomainError):
            LogitClass([1.0, 2.0])

    def test_from_logits_centers(self):
        cls = LogitClass.from_logits(Logits([1.0, 2.0, 6.0]))
        assert abs(cls.z0.mean()) <= 1e-12

    def test_shifted_logits_map_to_same_class(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            z = rng.uniform(-10, 10, size=4)
            c = rng.uniform(-50, 50)
            a = LogitClass.from_logits(z)
            b = LogitClass.from_logits(z + c)
            assert a.isclose(b, tol=1e-9)


class TestLogSumExp:
    def test_uniform_is_log_d(self):
        assert log_sum_exp([0.0, 0.0]) == pytest.approx(LOG2, abs=1e-15)
        assert log_sum_exp([0.0, 0.0, 0.0]) == pytest.approx(LOG3, abs=1e-15)

    def test_shift_identity_large_entries(self):
        # LSE(z + c*1) = LSE(z) + c applied to (0,0): no overflow at 1000
        assert log_sum_exp([1000.0, 1000.0]) == pytest.approx(1000.0 + LOG2, abs=1e-12)

    def test_extreme_entries_no_overflow(self):
        v = log_sum_exp([1e6, -1e6])
        assert math.isfinite(v)
        assert v == pytest.approx(1e6, abs=1e-9)

    def test_fifty_digit_oracle(self):
        # 50-digit oracle: log(e + 1 + 1/e)
        assert abs(log_sum_exp([1.0, 0.0, -1.0]) - 1.4076059644443804) <= 1e-14

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            log_sum_exp([np.inf, 0.0])


class TestNegEntropy:
    def test_uniform_cases(self):
        assert neg_entropy([0.5, 0.5]) == pytest.approx(-LOG2, abs=1e-15)
        assert neg_entropy([1 / 3, 1 / 3, 1 / 3]) == pytest.approx(-LOG3, abs=1e-15)

    def test_fifty_digit_oracle(self):
        # 50-digit oracle: 0.7 log 0.7 + 0.2 log 0.2 + 0.1 log 0.1
        assert abs(neg_entropy([0.7, 0.2, 0.1]) - (-0.8018185525433373)) <= 1e-14

    def test_range(self):
        rng = np.random.default_rng(11)
        for d in (2, 3, 5, 10):
            for _ in range(100):
                y = rng.dirichlet(np.ones(d)) * (1 - d * 1e-6) + 1e-6
                h = neg_entropy(y)
                assert -math.log(d) - 1e-12 <= h < 0.0


class TestSoftmax:
    def test_zero_logits_give_uniform(self):
        for d in (2, 3, 7):
            y = softmax(np.zeros(d))
            np.testing.assert_allclose(y.values, np.full(d, 1.0 / d), atol=1e-15)

    def test_two_class_sigmoid_value(self):
        y = softmax([1.0, 0.0])
        assert y.values[0] == pytest.approx(SIGMA1, abs=1e-15)
        assert y.values[1] == pytest.approx(1.0 - SIGMA1, abs=1e-15)

    def test_bias_shift_invariance_exact_inputs(self):
        a = softmax([5.0, 5.0, 5.0])
        b = softmax([0.0, 0.0, 0.0])
        np.testing.assert_array_equal(a.values, b.values)

    def test_bias_shift_invariance_random(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            d = rng.integers(2, 11)
            z = rng.uniform(-10, 10, size=d)
            c = rng.uniform(-100, 100)
            np.testing.assert_allclose(
                softmax(z + c).values, softmax(z).values, atol=1e-12
            )

    def test_output_on_simplex(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            z = rng.uniform(-30, 30, size=rng.integers(2, 12))
            y = softmax(z)
            assert np.all(y.values > 0)
            assert abs(y.values.sum() - 1.0) <= 1e-12


class TestGradPotential:
    def test_uniform_maps_to_zero(self):
        np.testing.assert_allclose(
            grad_potential([0.25] * 4).z0, np.zeros(4), atol=1e-15
        )

    def test_two_class_closed_form(self):
        # Pi(p, 1-p) = (log(p/(1-p))/2, -log(p/(1-p))/2)
        for p in (0.1, 0.3, 0.5, 0.7, 0.9):
            half = 0.5 * math.log(p / (1.0 - p))
            np.testing.assert_allclose(
                grad_potential([p, 1.0 - p]).z0, [half, -half], atol=1e-15
            )

    def test_round_trip_d3(self):
        y = Probabilities([0.5, 0.3, 0.2])
        cls = grad_potential(y)
        # 50-digit oracle: log y - mean(log y)
        np.testing.assert_allclose(
            cls.z0,
            [0.4757054518800486, -0.0351201718859421, -0.44058527999410646],
            atol=1e-15,
        )
        np.testing.assert_allclose(softmax(cls.z0).values, y.values, atol=1e-12)

    def test_underflow_rejected(self):
        tiny = 1e-301
        y = np.array([tiny, 0.5, 0.5 - tiny])
        with pytest.raises(DomainError):
            grad_potential(y)


class TestFenchelYoungGap:
    def test_on_seam_gap_zero(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            z = rng.uniform(-10, 10, size=rng.integers(2, 8))
            rep = fenchel_young_gap(z, softmax(z))
            assert 0.0 <= rep.gap <= 1e-12
            assert rep.on_seam

    def test_two_class_binary_kl(self):
        # 50-digit oracle: p log(p/sigma(D)) + (1-p) log((1-p)/(1-sigma(D)))
        # at D=1.5, p=0.3
        rep = fenchel_young_gap([0.75, -0.75], [0.3, 0.7])
        assert rep.gap == pytest.approx(0.640548975927859, abs=1e-14)
        assert not rep.on_seam

    def test_agrees_with_three_term_form(self):
        # independent oracle: phi(y) + phi*(z) - <z, y>
        rng = np.random.default_rng(17)
        for _ in range(300):
            z = rng.uniform(-10, 10, size=4)
            y = rng.dirichlet(np.ones(4)) * (1 - 4e-4) + 1e-4
            three_term = (
                neg_entropy(y) + log_sum_exp(z) - float(np.dot(z, y))
            )
            assert fenchel_young_gap(z, y).gap == pytest.approx(
                three_term, abs=1e-10
            )

    def test_shift_invariance(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            z = rng.uniform(-5, 5, size=5)
            y = rng.dirichlet(np.ones(5)) * (1 - 5e-4) + 1e-4
            g0 = fenchel_young_gap(z, y).gap
            g1 = fenchel_young_gap(z + 8.25, y).gap
            assert g1 == pytest.approx(g0, abs=1e-12)

    def test_seam_tolerance_is_configurable(self):
        rep = fenchel_young_gap([0.75, -0.75], [0.3, 0.7], seam_tol=1.0)
        assert rep.on_seam

    def test_gap_report_type(self):
        rep = fenchel_young_gap([0.0, 0.0], [0.5, 0.5])
        assert isinstance(rep, GapReport)
        assert rep.gap == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            fenchel_young_gap([0.0, 0.0, 0.0], [0.5, 0.5])


class TestTemperatureSoftmax:
    def test_identity_temperature(self):
        rng = np.random.default_rng(23)
        z = rng.uniform(-5, 5, size=6)
        np.testing.assert_array_equal(
            temperature_softmax(z, 1.0).values, softmax(z).values
        )

    def test_high_temperature_flattens(self):
        y = temperature_softmax([1.0, 0.0], 1e6)
        np.testing.assert_allclose(y.values, [0.5, 0.5], atol=1e-6)

    def test_half_temperature_two_class(self):
        # oracle: two-class reduction with Delta/r = 2
        y = temperature_softmax([1.0, 0.0], 0.5)
        assert y.values[0] == pytest.approx(SIGMA2, abs=1e-15)

    def test_fold_rejected(self):
        for r in (0.0, -1.0, float("nan")):
            with pytest.raises(DomainError):
                temperature_softmax([1.0, 0.0], r)


class TestTwoClassReduction:
    def test_symmetric_point(self):
        assert two_class_delta([0.0, 0.0]) == 0.0
        assert two_class_sigmoid(0.0) == 0.5

    def test_shift_leaves_delta_unchanged(self):
        a, b, c = 1.3, -0.4, 17.0
        assert two_class_delta([a + c, b + c]) == pytest.approx(
            two_class_delta([a, b]), abs=1e-12
        )

    def test_log_odds_inverts_sigmoid(self):
        # 50-digit oracle: sigma(log(0.3/0.7)) = 0.3 with
        # log(0.3/0.7) = -0.8472978603872036
        delta = math.log(0.3 / 0.7)
        assert delta == pytest.approx(-0.8472978603872036, abs=1e-15)
        assert two_class_sigmoid(delta) == pytest.approx(0.3, abs=1e-15)

    def test_matches_softmax_first_entry(self):
        rng = np.random.default_rng(29)
        for _ in range(300):
            z = rng.uniform(-20, 20, size=2)
            assert softmax(z).values[0] == pytest.approx(
                two_class_sigmoid(two_class_delta(z)), abs=1e-15
            )

    def test_sigmoid_extreme_arguments(self):
        assert two_class_sigmoid(1000.0) == 1.0
        assert two_class_sigmoid(-1000.0) == 0.0

    def test_wrong_dimension(self):
        with pytest.raises(DimensionError):
            two_class_delta([1.0, 2.0, 3.0])


class TestGradientChecks:
    """Finite-difference validation of both potential gradients."""

    def test_lse_gradient_is_softmax(self):
        rng = np.random.default_rng(31)
        h = 1e-5
        for _ in range(50):
            d = rng.integers(2, 8)
            z = rng.uniform(-5, 5, size=d)
            fd = np.array(
                [
                    (log_sum_exp(z + h * e) - log_sum_exp(z - h * e)) / (2 * h)
                    for e in np.eye(d)
                ]
            )
            np.testing.assert_allclose(fd, softmax(z).values, atol=1e-6)

    def test_neg_entropy_directional_gradient_is_gauge(self):
        rng = np.random.default_rng(37)
        h = 1e-5
        for _ in range(50):
            d = rng.integers(2, 8)
            y = rng.dirichlet(np.ones(d)) * (1 - d * 0.01) + 0.01
            v = rng.standard_normal(d)
            v -= v.mean()
            v /= np.linalg.norm(v)
            fd = (neg_entropy(y + h * v) - neg_entropy(y - h * v)) / (2 * h)
            assert fd == pytest.approx(
                float(np.dot(grad_potential(y).z0, v)), abs=1e-6
            )


class TestGaugeRoundTrips:
    def test_softmax_after_gauge_is_identity(self):
        rng = np.random.default_rng(41)
        for _ in range(200):
            d = rng.integers(2, 10)
            y = rng.dirichlet(np.ones(d)) * (1 - d * 1e-4) + 1e-4
            y = Probabilities(y)
            np.testing.assert_allclose(
                softmax(grad_potential(y).z0).values, y.values, atol=1e-12
            )

    def test_gauge_after_softmax_is_zero_mean_representative(self):
        rng = np.random.default_rng(43)
        for _ in range(200):
            d = rng.integers(2, 10)
            z = rng.uniform(-10, 10, size=d)
            np.testing.assert_allclose(
                grad_potential(softmax(z)).z0, z - z.mean(), atol=1e-9
            )


class TestArrayKernels:
    def test_batched_matches_pointwise(self):
        rng = np.random.default_rng(47)
        Z = rng.uniform(-10, 10, size=(64, 5))
        Y = rng.dirichlet(np.ones(5), size=64) * (1 - 5e-4) + 1e-4
        lse_batch = log_sum_exp_array(Z)
        gap_batch = kl_gap_array(Z, Y)
        for i in range(64):
            # 2-D and 1-D numpy reductions may differ in the last ulp
            assert lse_batch[i] == pytest.approx(log_sum_exp(Z[i]), rel=1e-15)
            assert gap_batch[i] == pytest.approx(
                fenchel_young_gap(Z[i], Y[i]).gap, abs=1e-14
            )

    def test_zero_mean_array(self):
        Z = np.array([[1.0, 2.0, 6.0], [0.0, 0.0, 0.0]])
        out = zero_mean_array(Z)
        np.testing.assert_allclose(out.mean(axis=-1), 0.0, atol=1e-15)
