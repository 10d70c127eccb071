"""Photon-number distributions from the Gaussian characteristic function.

p(n,m) = Int d^2l1 d^2l2 / pi^2  chi(l1,l2) chi_n(-l1) chi_m(-l2) with
chi_n(l) = exp(-|l|^2/2) L_n(|l|^2). The characteristic function of a
zero-mean state is chi = exp(-1/2 K^T sigma K) with the real vector
K = sqrt(2) (Im l1, -Re l1, Im l2, -Re l2); the convention is fixed by the
thermal-state closure (geometric p(n)).

Integration: tensor Gauss-Hermite in whitened coordinates of sigma + I/2.
The integrand there is a Gaussian times a polynomial, so the quadrature is
exact once the per-axis node count passes the polynomial degree; node counts
are doubled until two successive grids agree in total variation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceMatrix, _as_matrix
from .errors import OrderTooLarge, QuadratureNotConverged

log = logging.getLogger(__name__)

MAX_LAGUERRE_ORDER = 512
MAX_NODES = 128
CONVERGENCE_TV = 1e-6
CLIP_FLOOR = -1e-10


def laguerre(n: int, x: float) -> float:
    """Laguerre polynomial L_n(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError("order must be >= 0")
    if n > MAX_LAGUERRE_ORDER:
        raise OrderTooLarge(f"Laguerre order {n} above stability cap {MAX_LAGUERRE_ORDER}")
    return float(_laguerre_table(np.asarray([x], dtype=float), n)[n, 0])


def _laguerre_table(x: np.ndarray, nmax: int) -> np.ndarray:
    """L_n(x) for n = 0..nmax over a flat array x; shape (nmax+1, x.size)."""
    out = np.empty((nmax + 1, x.size))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 1.0 - x
    for k in range(1, nmax):
        out[k + 1] = ((2.0 * k + 1.0 - x) * out[k] - k * out[k - 1]) / (k + 1.0)
    return out


def gaussian_characteristic(cm, lambda1: complex, lambda2: complex) -> complex:
    """chi(l1, l2) of the zero-mean Gaussian state with covariance cm."""
    s = _as_matrix(cm)
    k = np.sqrt(2.0) * np.array(
        [lambda1.imag, -lambda1.real, lambda2.imag, -lambda2.real]
    )
    return complex(np.exp(-0.5 * k @ s @ k))


@dataclass(frozen=True)
class JointPMF:
    """Truncated joint photon-number distribution with its normalization deficit."""

    probs: np.ndarray
    deficit: float
    clipped: int = 0

    @property
    def n_max(self) -> int:
        return self.probs.shape[0] - 1

    @property
    def m_max(self) -> int:
        return self.probs.shape[1] - 1


@dataclass(frozen=True)
class SingleModePMF:
    probs: np.ndarray
    deficit: float
    clipped: int = 0


def _whiten(m: np.ndarray) -> tuple[np.ndarray, float]:
    vals, q = np.linalg.eigh(m)
    if np.any(vals <= 0):
        raise QuadratureNotConverged("sigma + I/2 is not positive definite")
    return q @ np.diag(vals**-0.5), float(np.prod(vals))


def _joint_grid(s: np.ndarray, n_max: int, m_max: int, nodes: int) -> np.ndarray:
    t, det_m = _whiten(s + 0.5 * np.eye(4))
    x, w = np.polynomial.hermite.hermgauss(nodes)
    xs = np.sqrt(2.0) * x
    # inner 3 axes vectorized, outer axis looped to bound memory
    g1, g2, g3 = np.meshgrid(xs, xs, xs, indexing="ij")
    g1, g2, g3 = g1.ravel(), g2.ravel(), g3.ravel()
    w3 = (w[:, None, None] * w[None, :, None] * w[None, None, :]).ravel()
    p = np.zeros((n_max + 1, m_max + 1))
    for i in range(nodes):
        k = t[:, 0:1] * xs[i] + t[:, 1:2] * g1 + t[:, 2:3] * g2 + t[:, 3:4] * g3
        s1 = 0.5 * (k[0] ** 2 + k[1] ** 2)
        s2 = 0.5 * (k[2] ** 2 + k[3] ** 2)
        l1 = _laguerre_table(s1, n_max)
        l2 = _laguerre_table(s2, m_max)
        p += w[i] * ((l1 * w3) @ l2.T)
    return p / (det_m**0.5 * np.pi**2)


def _single_grid(s2: np.ndarray, n_max: int, nodes: int) -> np.ndarray:
    t, det_m = _whiten(s2 + 0.5 * np.eye(2))
    x, w = np.polynomial.hermite.hermgauss(nodes)
    xs = np.sqrt(2.0) * x
    x1, x2 = np.meshgrid(xs, xs, indexing="ij")
    k1 = t[0, 0] * x1 + t[0, 1] * x2
    k2 = t[1, 0] * x1 + t[1, 1] * x2
    arg = 0.5 * (k1**2 + k2**2)
    l = _laguerre_table(arg.ravel(), n_max)
    w2 = (w[:, None] * w[None, :]).ravel()
    return (l * w2).sum(axis=1) / (det_m**0.5 * np.pi)


def _converge(eval_at, start_nodes: int, what: str) -> np.ndarray:
    nodes = min(start_nodes, MAX_NODES)
    prev = eval_at(nodes)
    while nodes < MAX_NODES:
        nodes = min(2 * nodes, MAX_NODES)
        cur = eval_at(nodes)
        if np.abs(cur - prev).sum() <= CONVERGENCE_TV:
            return cur
        prev = cur
    raise QuadratureNotConverged(
        f"{what}: node cap {MAX_NODES} reached without {CONVERGENCE_TV} agreement"
    )


def _finalize(p: np.ndarray, cls, what: str):
    worst = float(p.min())
    if worst < CLIP_FLOOR:
        raise QuadratureNotConverged(
            f"{what}: negative probability {worst:.3e} beyond the noise floor"
        )
    clipped = int((p < 0).sum())
    if clipped:
        log.debug("%s: clipped %d small negative cells to zero", what, clipped)
    p = np.clip(p, 0.0, None)
    return cls(probs=p, deficit=float(1.0 - p.sum()), clipped=clipped)


def joint_pnm(cm, n_max: int, m_max: int) -> JointPMF:
    """Joint photon-number distribution on the grid [0..n_max] x [0..m_max].

    Raises
    ------
    QuadratureNotConverged
        If successive node doublings disagree by more than the tolerance up
        to the node cap, or a beyond-noise negative probability appears.
    """
    if n_max > MAX_LAGUERRE_ORDER or m_max > MAX_LAGUERRE_ORDER:
        raise OrderTooLarge("cutoffs above the Laguerre stability cap")
    s = _as_matrix(cm)
    start = max(8, (n_max + m_max) // 2 + 1)
    p = _converge(lambda k: _joint_grid(s, n_max, m_max, k), start, "joint_pnm")
    return _finalize(p, JointPMF, "joint_pnm")


def single_pnm(cm2, n_max: int) -> SingleModePMF:
    """Single-mode photon-number distribution from a 2x2 covariance block."""
    if n_max > MAX_LAGUERRE_ORDER:
        raise OrderTooLarge("cutoff above the Laguerre stability cap")
    s2 = np.asarray(cm2, dtype=float)
    if s2.shape != (2, 2) or not np.allclose(s2, s2.T, rtol=0, atol=0):
        raise ValueError("expected a symmetric 2x2 covariance block")
    if np.sqrt(max(np.linalg.det(s2), 0.0)) < 0.5 - 1e-9:
        raise ValueError("single-mode block is unphysical (sqrt(det) < 1/2)")
    start = max(8, n_max + 1)
    p = _converge(lambda k: _single_grid(s2, n_max, k), start, "single_pnm")
    return _finalize(p, SingleModePMF, "single_pnm")


def reduced_block(cm, mode: str) -> np.ndarray:
    """2x2 covariance block of a measured mode (a, b, c, d, e, or f)."""
    from .synthesis import _MODE_COEFFS

    s = _as_matrix(cm)
    ux, uy = _MODE_COEFFS[mode]
    basis = np.vstack([ux, uy])
    return basis @ s @ basis.T
