"""Normality validation of binned homodyne samples: kurtosis excess and Shapiro-Wilk.

The Shapiro-Wilk statistic uses the Royston polynomial approximation for the
order-statistic weights and the normalizing transformation for the p-value
(AS R94), valid for 3 <= n <= 5000.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .errors import DegenerateSample, EmptyBin, SampleSizeOutOfRange
from .synthesis import HomodyneTrace

_ND = NormalDist()

# Royston weight corrections (ascending powers of 1/sqrt(n))
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
# p-value transform: small n (4..11) polynomials in n, large n in ln(n)
_C3 = (0.544, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)

SW_MIN_N = 3
SW_MAX_N = 5000

_weight_cache: dict[int, np.ndarray] = {}


def _poly(coeffs, x: float) -> float:
    return sum(c * x**k for k, c in enumerate(coeffs))


def _sw_weights(n: int) -> np.ndarray:
    if n in _weight_cache:
        return _weight_cache[n]
    if n == 3:
        a = np.array([-math.sqrt(0.5), 0.0, math.sqrt(0.5)])
        _weight_cache[n] = a
        return a
    m = np.array([_ND.inv_cdf((i - 0.375) / (n + 0.25)) for i in range(1, n + 1)])
    mm = float(m @ m)
    u = 1.0 / math.sqrt(n)
    c = m / math.sqrt(mm)
    a = np.empty(n)
    a_n = c[-1] + _poly(_C1, u)
    if n > 5:
        a_n1 = c[-2] + _poly(_C2, u)
        phi = (mm - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
            1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2
        )
        a[2:-2] = m[2:-2] / math.sqrt(phi)
        a[-2], a[1] = a_n1, -a_n1
    else:
        phi = (mm - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n**2)
        a[1:-1] = m[1:-1] / math.sqrt(phi)
    a[-1], a[0] = a_n, -a_n
    _weight_cache[n] = a
    return a


def kurtosis_excess(samples) -> float:
    """Excess kurtosis m4/m2^2 - 3 with equal empirical weights.

    Raises
    ------
    DegenerateSample
        For n < 4 or a zero-variance sample.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 4:
        raise DegenerateSample(f"kurtosis needs n >= 4, got {x.size}")
    d = x - x.mean()
    m2 = float(np.mean(d * d))
    if m2 <= 0.0:
        raise DegenerateSample("zero sample variance")
    return float(np.mean(d**4) / m2**2 - 3.0)


def shapiro_wilk(samples) -> tuple[float, float]:
    """(W, p) of the Shapiro-Wilk normality test.

    Raises
    ------
    SampleSizeOutOfRange
        Outside the approximation's validity range 3 <= n <= 5000.
    DegenerateSample
        Zero spread, or more than half the values identical.
    """
    x = np.sort(np.asarray(samples, dtype=float), kind="stable")
    n = x.size
    if not SW_MIN_N <= n <= SW_MAX_N:
        raise SampleSizeOutOfRange(f"Shapiro-Wilk needs 3 <= n <= 5000, got {n}")
    if x[-1] == x[0]:
        raise DegenerateSample("all sample values identical")
    _, counts = np.unique(x, return_counts=True)
    if counts.max() > n // 2:
        raise DegenerateSample("more than 50% of sample values identical")
    a = _sw_weights(n)
    xm = x.mean()
    w = float((a @ x) ** 2 / ((x - xm) ** 2).sum())
    w = min(w, 1.0)
    if n == 3:
        p = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return w, min(max(p, 0.0), 1.0)
    if n <= 11:
        gamma = -2.273 + 0.459 * n
        y = -math.log(gamma - math.log1p(-w))
        mu = _poly(_C3, n)
        sigma = math.exp(_poly(_C4, n))
    else:
        y = math.log1p(-w)
        ln_n = math.log(n)
        mu = _poly(_C5, ln_n)
        sigma = math.exp(_poly(_C6, ln_n))
    p = 0.5 * math.erfc((y - mu) / (sigma * math.sqrt(2.0)))
    return w, p


# ---------------------------------------------------------------------------
# phase-binned report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseBinning:
    """Uniform partition of the phase sweep (104 bins over 2 pi by default)."""

    n_bins: int = 104
    range: tuple[float, float] = (0.0, 2.0 * np.pi)

    def __post_init__(self):
        if self.n_bins < 1:
            raise ValueError("n_bins must be >= 1")


@dataclass(frozen=True)
class BinTest:
    index: int
    n: int
    gamma: float
    w_sw: float
    p_value: float


@dataclass(frozen=True)
class GaussianityReport:
    """Per-bin normality tests plus overall verdicts.

    passed applies the strict rule (every bin p >= alpha); passed_bonferroni
    divides alpha by the number of bins, which is the rule the analysis
    pipeline gates on.
    """

    bins: list = field(default_factory=list)
    alpha: float = 0.05

    @property
    def passed(self) -> bool:
        return all(b.p_value >= self.alpha for b in self.bins)

    @property
    def passed_bonferroni(self) -> bool:
        adj = self.alpha / max(len(self.bins), 1)
        return all(b.p_value >= adj for b in self.bins)

    @property
    def min_p(self) -> float:
        return min((b.p_value for b in self.bins), default=float("nan"))


def gaussianity_report(
    trace: HomodyneTrace,
    binning: PhaseBinning | None = None,
    alpha: float = 0.05,
    subsample_seed: int = 0,
) -> GaussianityReport:
    """Run both normality tests in every phase bin of a trace.

    Bins holding more than 5000 samples are subsampled uniformly at random
    (seeded) to stay inside the Shapiro-Wilk validity range.

    Raises
    ------
    EmptyBin
        If any bin of the partition receives no samples.
    """
    binning = binning or PhaseBinning()
    lo, hi = binning.range
    if len(trace) == 0:
        raise EmptyBin("trace has no samples")
    idx = np.floor(
        (trace.thetas - lo) / (hi - lo) * binning.n_bins
    ).astype(int)
    idx = np.clip(idx, 0, binning.n_bins - 1)
    rng = np.random.default_rng(subsample_seed)
    bins = []
    for k in range(binning.n_bins):
        xs = trace.xs[idx == k]
        if xs.size == 0:
            raise EmptyBin(f"phase bin {k} is empty")
        if xs.size > SW_MAX_N:
            xs = rng.choice(xs, size=SW_MAX_N, replace=False)
        w, p = shapiro_wilk(xs)
        bins.append(
            BinTest(index=k, n=int(xs.size), gamma=kurtosis_excess(xs), w_sw=w, p_value=p)
        )
    return GaussianityReport(bins=bins, alpha=alpha)
