"""Pattern-function tomography: kernel estimates from phase-swept homodyne data.

The kernels are written for quarter-unit vacuum (variance 1/4) and
loss-rescaled samples; estimate() bridges from the toolkit's shot-noise
convention (half-unit vacuum, raw detected samples) by substituting
x -> x / sqrt(2 eta) and rescaling quadrature results back, so every public
number is in half-unit (shot-noise) variance units and corrected to the
pre-detection state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EfficiencyOutOfRange, EmptyTrace
from .synthesis import HomodyneTrace

NUMBER = "number"
NUMBER_SQUARED = "number_squared"
QUAD = "quad"
QUAD_SQUARED = "quad_squared"

_KINDS = (NUMBER, NUMBER_SQUARED, QUAD, QUAD_SQUARED)


@dataclass(frozen=True)
class KernelId:
    """Which observable's kernel to average: photon number, its square, or a
    quadrature (mean or second moment) at phase phi."""

    kind: str
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")


@dataclass(frozen=True)
class TomographicEstimate:
    mean: float
    confidence: float  # one standard error
    n_used: int
    phase_uniform: bool = True


def kernel_eval(kid: KernelId, x, theta, eta: float):
    """Evaluate the printed kernel at (x, theta); x, theta may be arrays.

    Raises
    ------
    EfficiencyOutOfRange
        For eta <= 0.5, where the kernels are unbounded.
    """
    if eta <= 0.5:
        raise EfficiencyOutOfRange(f"kernels require eta > 0.5, got {eta}")
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if kid.kind == NUMBER:
        return 2.0 * x**2 - 1.0 / (2.0 * eta)
    if kid.kind == NUMBER_SQUARED:
        # printed without explicit eta terms; exercised at eta = 1 only
        return (8.0 / 3.0) * x**4 - 2.0 * x**2
    if kid.kind == QUAD:
        return 2.0 * x * np.cos(kid.phi - theta)
    c = np.cos(kid.phi - theta)
    return 0.25 * (1.0 + (4.0 * x**2 - 1.0 / eta) * (4.0 * c**2 - 1.0))


def _phase_uniform(thetas: np.ndarray, n_bins: int = 104) -> bool:
    """Every bin occupancy within +-20% of N / n_bins."""
    lo, hi = thetas.min(), thetas.max()
    if hi <= lo:
        return False
    counts, _ = np.histogram(thetas, bins=n_bins, range=(lo, hi + 1e-12))
    target = thetas.size / n_bins
    return bool(counts.min() >= 0.8 * target and counts.max() <= 1.2 * target)


def estimate(trace: HomodyneTrace, kid: KernelId, eta: float) -> TomographicEstimate:
    """Mean of the kernel over the trace, with its central-limit confidence.

    Number estimates are returned as photon numbers; quadrature estimates are
    converted to half-unit (shot-noise) variance units.
    """
    if eta <= 0.5:
        raise EfficiencyOutOfRange(f"estimation requires eta > 0.5, got {eta}")
    n = len(trace)
    if n == 0:
        raise EmptyTrace("cannot estimate from an empty trace")
    xk = trace.xs / math.sqrt(2.0 * eta)
    vals = kernel_eval(kid, xk, trace.thetas, eta)
    scale = {NUMBER: 1.0, NUMBER_SQUARED: 1.0, QUAD: math.sqrt(2.0), QUAD_SQUARED: 2.0}[
        kid.kind
    ]
    mean = scale * float(vals.mean())
    conf = scale * float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else float("inf")
    return TomographicEstimate(
        mean=mean,
        confidence=conf,
        n_used=n,
        phase_uniform=_phase_uniform(trace.thetas),
    )


def quadrature_variance(trace: HomodyneTrace, phi: float, eta: float) -> TomographicEstimate:
    """Efficiency-corrected pre-detection variance of x_phi, half-unit convention."""
    e2 = estimate(trace, KernelId(QUAD_SQUARED, phi), eta)
    e1 = estimate(trace, KernelId(QUAD, phi), eta)
    var = e2.mean - e1.mean**2
    conf = math.sqrt(e2.confidence**2 + (2.0 * e1.mean * e1.confidence) ** 2)
    return TomographicEstimate(
        mean=var,
        confidence=conf,
        n_used=e2.n_used,
        phase_uniform=e2.phase_uniform and e1.phase_uniform,
    )


def quadrature_mean(trace: HomodyneTrace, phi: float, eta: float) -> TomographicEstimate:
    """Efficiency-corrected mean of x_phi, half-unit convention."""
    return estimate(trace, KernelId(QUAD, phi), eta)
