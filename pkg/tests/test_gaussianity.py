import numpy as np
import pytest
import scipy.stats

from cvchar import (
    CovarianceMatrix,
    MeasurementConfig,
    PhaseBinning,
    gaussianity_report,
    kurtosis_excess,
    sample_trace,
    shapiro_wilk,
)
from cvchar.errors import DegenerateSample, EmptyBin, SampleSizeOutOfRange
from cvchar.synthesis import HomodyneTrace

from conftest import twin_beam_cm


class TestKurtosisExcess:
    def test_gaussian_null(self):
        rng = np.random.default_rng(41)
        x = rng.normal(size=10**5)
        assert abs(kurtosis_excess(x)) < 3 * np.sqrt(24 / 10**5)

    def test_two_point_sample(self):
        x = np.tile([-1.0, 1.0], 500)
        assert kurtosis_excess(x) == pytest.approx(-2.0, rel=1e-12)

    def test_exponential(self):
        rng = np.random.default_rng(42)
        x = rng.exponential(size=10**5)
        # exponential excess kurtosis is 6; finite-sample spread is wide
        assert kurtosis_excess(x) == pytest.approx(6.0, abs=0.8)

    def test_affine_invariance(self):
        rng = np.random.default_rng(43)
        x = rng.normal(size=2000)
        assert kurtosis_excess(5.0 * x - 3.0) == pytest.approx(
            kurtosis_excess(x), rel=1e-9
        )

    def test_degenerate(self):
        with pytest.raises(DegenerateSample):
            kurtosis_excess([1.0, 2.0, 3.0])
        with pytest.raises(DegenerateSample):
            kurtosis_excess([2.0] * 50)

    def test_matches_scipy(self):
        rng = np.random.default_rng(44)
        x = rng.normal(size=5000)
        assert kurtosis_excess(x) == pytest.approx(
            scipy.stats.kurtosis(x, fisher=True, bias=True), rel=1e-10
        )


class TestShapiroWilk:
    def test_three_point_line_is_exact(self):
        w, p = shapiro_wilk([-1.0, 0.0, 1.0])
        assert w == pytest.approx(1.0, abs=1e-12)
        assert p == pytest.approx(1.0, abs=1e-9)

    def test_w_in_unit_interval(self):
        rng = np.random.default_rng(45)
        for n in (3, 5, 12, 100, 900):
            for _ in range(10):
                w, p = shapiro_wilk(rng.normal(size=n))
                assert 0.0 <= w <= 1.0
                assert 0.0 <= p <= 1.0

    def test_affine_invariance(self):
        rng = np.random.default_rng(46)
        x = rng.normal(size=300)
        w1, p1 = shapiro_wilk(x)
        w2, p2 = shapiro_wilk(-2.5 * x + 7.0)
        assert w1 == pytest.approx(w2, rel=1e-10)
        assert p1 == pytest.approx(p2, rel=1e-8)

    def test_against_scipy_oracle(self):
        # independent implementation of the same Royston approximation
        rng = np.random.default_rng(47)
        for n in (4, 5, 7, 11, 12, 30, 200, 1500, 5000):
            for kind in ("normal", "exponential", "uniform"):
                x = getattr(rng, kind)(size=n)
                w_ours, p_ours = shapiro_wilk(x)
                w_ref, p_ref = scipy.stats.shapiro(x)
                assert w_ours == pytest.approx(w_ref, abs=1e-8)
                assert p_ours == pytest.approx(p_ref, abs=1e-5)

    def test_null_rejection_rate(self):
        rng = np.random.default_rng(48)
        rejected = sum(
            shapiro_wilk(rng.normal(size=500))[1] < 0.05 for _ in range(1000)
        )
        assert abs(rejected / 1000 - 0.05) < 0.02

    def test_power_against_uniform(self):
        rng = np.random.default_rng(49)
        rejected = sum(
            shapiro_wilk(rng.uniform(size=500))[1] < 0.05 for _ in range(200)
        )
        assert rejected > 198  # > 99%

    def test_p_uniform_under_null(self):
        rng = np.random.default_rng(50)
        ps = [shapiro_wilk(rng.normal(size=500))[1] for _ in range(1000)]
        ks = scipy.stats.kstest(ps, "uniform").statistic
        assert ks < 0.05

    def test_sample_size_errors(self):
        with pytest.raises(SampleSizeOutOfRange):
            shapiro_wilk([1.0, 2.0])
        with pytest.raises(SampleSizeOutOfRange):
            shapiro_wilk(np.random.default_rng(0).normal(size=5001))

    def test_degenerate(self):
        with pytest.raises(DegenerateSample):
            shapiro_wilk([3.0] * 10)
        with pytest.raises(DegenerateSample):
            shapiro_wilk([1.0] * 8 + [2.0, 3.0])  # > 50% identical


class TestGaussianityReport:
    def _trace(self, n=52_000, seed=4, cm=None):
        cm = cm or twin_beam_cm(0.4, nbar=0.3)
        cfg = MeasurementConfig(mode="c", n_samples=n, seed=seed)
        return sample_trace(cm, cfg)

    def test_synthetic_trace_passes_bonferroni(self):
        rep = gaussianity_report(self._trace(), PhaseBinning(), alpha=0.05)
        assert len(rep.bins) == 104
        assert rep.passed_bonferroni

    def test_folded_trace_fails(self):
        trace = self._trace()
        folded = HomodyneTrace(
            thetas=trace.thetas, xs=np.abs(trace.xs), config=trace.config
        )
        rep = gaussianity_report(folded, PhaseBinning(), alpha=0.05)
        assert not rep.passed_bonferroni
        assert not rep.passed

    def test_empty_trace_raises(self):
        cfg = MeasurementConfig(mode="a", n_samples=0, seed=1)
        trace = sample_trace(twin_beam_cm(0.4), cfg)
        with pytest.raises(EmptyBin):
            gaussianity_report(trace, PhaseBinning())

    def test_oversized_bins_subsampled(self):
        trace = self._trace(n=600_000, seed=5)
        rep = gaussianity_report(trace, PhaseBinning(n_bins=104))
        assert all(b.n <= 5000 for b in rep.bins)

    def test_strict_rule_matches_type_invariant(self):
        rep = gaussianity_report(self._trace(), PhaseBinning(), alpha=0.05)
        assert rep.passed == all(b.p_value >= rep.alpha for b in rep.bins)

    def test_bin_width_default(self):
        # 104 bins over 2 pi: about 60 mrad per bin
        b = PhaseBinning()
        width = (b.range[1] - b.range[0]) / b.n_bins
        assert width == pytest.approx(0.0604, abs=1e-3)
