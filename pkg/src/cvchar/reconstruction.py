"""Assembly of the full 4x4 covariance matrix from per-mode tomographic estimates.

Diagonal blocks come from single-mode quadrature variances plus the rotated
z, t quadratures; the cross block comes from the auxiliary modes c, d, e, f.
All relations keep the mean-product terms so displaced inputs reconstruct
correctly; second moments are formed internally as variance + mean^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .covariance import CovarianceMatrix, is_physical, symplectic_spectrum
from .errors import MissingEstimate, NegativeRadicand
from .synthesis import HomodyneTrace, true_variance
from .tomography import quadrature_mean, quadrature_variance


class Measured(NamedTuple):
    """A point estimate with its one-sigma uncertainty."""

    value: float
    sigma: float


@dataclass(frozen=True)
class ModeQuadratures:
    """Tomographic summary of one measured mode.

    var_z and var_t (the +-pi/4 quadratures) are only needed for modes a, b.
    """

    mode: str
    mean_x: Measured
    mean_y: Measured
    var_x: Measured
    var_y: Measured
    var_z: Measured | None = None
    var_t: Measured | None = None

    def moment_x(self) -> Measured:
        return _moment(self.var_x, self.mean_x)

    def moment_y(self) -> Measured:
        return _moment(self.var_y, self.mean_y)


def _moment(var: Measured, mean: Measured) -> Measured:
    """Second moment <q^2> = var + mean^2 with propagated sigma."""
    return Measured(
        var.value + mean.value**2,
        math.hypot(var.sigma, 2.0 * mean.value * mean.sigma),
    )


def estimate_mode_quadratures(trace: HomodyneTrace, eta: float) -> ModeQuadratures:
    """All tomographic quantities the reconstruction needs from one trace."""
    mode = trace.config.mode
    qv = lambda phi: _as_measured(quadrature_variance(trace, phi, eta))
    qm = lambda phi: _as_measured(quadrature_mean(trace, phi, eta))
    var_z = var_t = None
    if mode in ("a", "b"):
        var_z = qv(math.pi / 4.0)
        var_t = qv(-math.pi / 4.0)
    return ModeQuadratures(
        mode=mode,
        mean_x=qm(0.0),
        mean_y=qm(math.pi / 2.0),
        var_x=qv(0.0),
        var_y=qv(math.pi / 2.0),
        var_z=var_z,
        var_t=var_t,
    )


def _as_measured(est) -> Measured:
    return Measured(est.mean, est.confidence)


def reconstruct_diag_block(est: ModeQuadratures) -> tuple[np.ndarray, np.ndarray]:
    """2x2 autocorrelation block and its elementwise one-sigma errors.

    Off-diagonal from sigma_xy = (1/2)(<z^2> - <t^2>) - <x><y>.
    """
    if est.var_z is None or est.var_t is None:
        raise MissingEstimate(f"mode {est.mode}: z/t quadrature variances required")
    mz = _moment(est.var_z, _half_sum_mean(est))
    mt = _moment(est.var_t, _half_diff_mean(est))
    off = 0.5 * (mz.value - mt.value) - est.mean_x.value * est.mean_y.value
    off_err = math.hypot(
        0.5 * math.hypot(mz.sigma, mt.sigma),
        math.hypot(
            est.mean_y.value * est.mean_x.sigma, est.mean_x.value * est.mean_y.sigma
        ),
    )
    block = np.array([[est.var_x.value, off], [off, est.var_y.value]])
    errs = np.array([[est.var_x.sigma, off_err], [off_err, est.var_y.sigma]])
    return block, errs


def _half_sum_mean(est: ModeQuadratures) -> Measured:
    # <z> = (<x> + <y>)/sqrt2
    v = (est.mean_x.value + est.mean_y.value) / math.sqrt(2.0)
    s = math.hypot(est.mean_x.sigma, est.mean_y.sigma) / math.sqrt(2.0)
    return Measured(v, s)


def _half_diff_mean(est: ModeQuadratures) -> Measured:
    v = (est.mean_x.value - est.mean_y.value) / math.sqrt(2.0)
    s = math.hypot(est.mean_x.sigma, est.mean_y.sigma) / math.sqrt(2.0)
    return Measured(v, s)


def reconstruct_cross_block(
    estimates: dict[str, ModeQuadratures],
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Cross block C, its errors, and whether the f-mode substitution was used.

    With the f trace absent the identities
    <x_f^2> = <y_a^2> + <x_b^2> - <x_e^2> and
    <y_f^2> = <x_a^2> + <y_b^2> - <y_e^2>
    replace the missing second moments.
    """
    for mode in ("a", "b", "c", "d", "e"):
        if mode not in estimates:
            raise MissingEstimate(f"mode {mode} estimates required for the cross block")
    ea, eb = estimates["a"], estimates["b"]
    ec, ed, ee = estimates["c"], estimates["d"], estimates["e"]
    used_f_substitution = "f" not in estimates

    mxc, myc = ec.moment_x(), ec.moment_y()
    mxd, myd = ed.moment_x(), ed.moment_y()
    mxe, mye = ee.moment_x(), ee.moment_y()
    if used_f_substitution:
        mxf = _sub_moment(ea.moment_y(), eb.moment_x(), mxe)
        myf = _sub_moment(ea.moment_x(), eb.moment_y(), mye)
    else:
        ef = estimates["f"]
        mxf, myf = ef.moment_x(), ef.moment_y()

    s13 = _difference_relation(mxc, mxd, ea.mean_x, eb.mean_x)
    s14 = _difference_relation(mye, myf, ea.mean_x, eb.mean_y)
    s23 = _difference_relation(mxf, mxe, ea.mean_y, eb.mean_x)
    s24 = _difference_relation(myc, myd, ea.mean_y, eb.mean_y)

    block = np.array([[s13.value, s14.value], [s23.value, s24.value]])
    errs = np.array([[s13.sigma, s14.sigma], [s23.sigma, s24.sigma]])
    return block, errs, used_f_substitution


def _sub_moment(m1: Measured, m2: Measured, m3: Measured) -> Measured:
    return Measured(
        m1.value + m2.value - m3.value,
        math.sqrt(m1.sigma**2 + m2.sigma**2 + m3.sigma**2),
    )


def _difference_relation(
    mp: Measured, mm: Measured, mean1: Measured, mean2: Measured
) -> Measured:
    """sigma_hk = (1/2)(<q_+^2> - <q_-^2>) - <q1><q2> with propagated error."""
    v = 0.5 * (mp.value - mm.value) - mean1.value * mean2.value
    s = math.hypot(
        0.5 * math.hypot(mp.sigma, mm.sigma),
        math.hypot(mean2.value * mean1.sigma, mean1.value * mean2.sigma),
    )
    return Measured(v, s)


@dataclass(frozen=True)
class ReconstructedCM:
    """Assembled covariance matrix with elementwise errors and gate status."""

    matrix: np.ndarray
    errors: np.ndarray
    used_f_substitution: bool
    physical: bool

    @property
    def cm(self) -> CovarianceMatrix:
        return CovarianceMatrix(self.matrix)


def assemble_cm(
    estimates: dict[str, ModeQuadratures],
    delta_theta: float = 0.0,
    tol: float = 1e-6,
) -> ReconstructedCM:
    """Build the full CM, inflate phase-sensitive errors, flag physicality."""
    if "a" not in estimates or "b" not in estimates:
        raise MissingEstimate("modes a and b are required for the diagonal blocks")
    block_a, err_a = reconstruct_diag_block(estimates["a"])
    block_b, err_b = reconstruct_diag_block(estimates["b"])
    block_c, err_c, used_f = reconstruct_cross_block(estimates)

    m = np.zeros((4, 4))
    m[:2, :2], m[2:, 2:], m[:2, 2:], m[2:, :2] = block_a, block_b, block_c, block_c.T
    m = (m + m.T) / 2.0
    e = np.zeros((4, 4))
    e[:2, :2], e[2:, 2:], e[:2, 2:], e[2:, :2] = err_a, err_b, err_c, err_c.T

    if delta_theta > 0:
        e = phase_error_inflation(m, e, delta_theta)
    try:
        physical = (
            all(np.linalg.det(m[:k, :k]) > 0 for k in range(1, 5))
            and symplectic_spectrum(m).d_minus >= 0.5 - tol
        )
    except NegativeRadicand:
        physical = False
    return ReconstructedCM(
        matrix=m, errors=e, used_f_substitution=used_f, physical=physical
    )


def phase_error_inflation(
    matrix: np.ndarray, errors: np.ndarray, delta_theta: float
) -> np.ndarray:
    """Inflate sigma_14 / sigma_23 errors by the phase-stability deviation.

    Those elements are built from e/f-mode variances measured where dV/dtheta
    is maximal; the inflation is the largest variance change under a phase
    offset +-delta_theta, evaluated on the reconstructed matrix itself.
    sigma_13 / sigma_24 come from stationary (squeezed/anti-squeezed) points
    and keep their tomographic errors.
    """
    if delta_theta < 0:
        raise ValueError("delta_theta must be >= 0")
    if delta_theta == 0:
        return errors

    def deviation(mode: str, phi: float) -> float:
        v0 = true_variance(matrix, mode, phi)
        return max(
            abs(true_variance(matrix, mode, phi + delta_theta) - v0),
            abs(true_variance(matrix, mode, phi - delta_theta) - v0),
        )

    out = errors.copy()
    infl_14 = max(deviation("e", math.pi / 2.0), deviation("f", math.pi / 2.0))
    infl_23 = max(deviation("f", 0.0), deviation("e", 0.0))
    out[0, 3] = out[3, 0] = max(errors[0, 3], infl_14)
    out[1, 2] = out[2, 1] = max(errors[1, 2], infl_23)
    return out


@dataclass(frozen=True)
class GateResult:
    accepted: bool
    d_minus: float


def physicality_gate(rcm: ReconstructedCM, tol: float = 1e-6) -> GateResult:
    """Reject the reconstruction iff d- < 1/2 - tol (the measurement is discharged)."""
    try:
        if any(np.linalg.det(rcm.matrix[:k, :k]) <= 0 for k in range(1, 5)):
            return GateResult(accepted=False, d_minus=float("nan"))
        d_minus = symplectic_spectrum(rcm.matrix).d_minus
    except NegativeRadicand:
        return GateResult(accepted=False, d_minus=float("nan"))
    return GateResult(accepted=d_minus >= 0.5 - tol, d_minus=d_minus)
