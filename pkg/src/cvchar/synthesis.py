"""Synthetic source: OPO-model covariance matrices and homodyne trace generation.

Replaces the laboratory chain (cavity, polarization optics, homodyne detector)
with exact symplectic algebra plus Gaussian sampling. All randomness flows
through explicitly seeded generators.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field, replace

import numpy as np

from .covariance import OMEGA, CovarianceMatrix

MODES = ("a", "b", "c", "d", "e", "f")
TRACE_MODES = MODES + ("vac",)

DEFAULT_ETA = 0.87                      # photodiode 0.91 x visibility 0.98^2, rounded
DEFAULT_ELECTRONIC_NOISE = 0.5 * 10 ** -1.6   # 16 dB below shot noise
DEFAULT_PHASE_JITTER = 0.020            # rad, experimental phase stability


@dataclass(frozen=True)
class OPOModelParams:
    """Parameters of the below-threshold OPO output model.

    The state is U(beta) S(zeta) LS(xi1, xi2) T LS^+ S^+ U^+ with T a two-mode
    thermal state; all squeezing phases are fixed real.
    """

    zeta: float = 0.0
    xi1: float = 0.0
    xi2: float = 0.0
    beta: float = 0.0
    nbar1: float = 0.0
    nbar2: float = 0.0

    def __post_init__(self):
        vals = (self.zeta, self.xi1, self.xi2, self.beta, self.nbar1, self.nbar2)
        if not all(np.isfinite(vals)):
            raise ValueError("model parameters must be finite")
        if self.zeta < 0:
            raise ValueError("two-mode squeezing modulus zeta must be >= 0")
        if self.nbar1 < 0 or self.nbar2 < 0:
            raise ValueError("thermal photon numbers must be >= 0")


def two_mode_squeezer(zeta: float) -> np.ndarray:
    """Symplectic of the two-mode squeezer in (x_a, y_a, x_b, y_b) ordering.

    Sign convention: zeta > 0 anticorrelates the x quadratures, so the sum
    mode c = (a+b)/sqrt2 is squeezed at phase 0 and the difference mode d is
    anti-squeezed.
    """
    c, s = np.cosh(zeta), np.sinh(zeta)
    return np.array(
        [
            [c, 0.0, -s, 0.0],
            [0.0, c, 0.0, s],
            [-s, 0.0, c, 0.0],
            [0.0, s, 0.0, c],
        ]
    )


def local_squeezer(xi1: float, xi2: float) -> np.ndarray:
    """Direct sum of single-mode squeezers x -> e^xi x, y -> e^-xi y."""
    return np.diag([np.exp(xi1), np.exp(-xi1), np.exp(xi2), np.exp(-xi2)])


def mode_mixer(beta: float) -> np.ndarray:
    """Passive mixer exp{beta (a+b - ab+)} with real angle beta."""
    c, s = np.cos(beta), np.sin(beta)
    return np.array(
        [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, s],
            [-s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ]
    )


def local_rotation(phi1: float, phi2: float) -> np.ndarray:
    """Direct sum of single-mode phase rotations."""
    def rot(p):
        return np.array([[np.cos(p), np.sin(p)], [-np.sin(p), np.cos(p)]])

    out = np.zeros((4, 4))
    out[:2, :2] = rot(phi1)
    out[2:, 2:] = rot(phi2)
    return out


def symplectic_defect(s: np.ndarray) -> float:
    """Max-abs deviation of S Omega S^T from Omega."""
    return float(np.abs(s @ OMEGA @ s.T - OMEGA).max())


def cm_from_model(params: OPOModelParams) -> CovarianceMatrix:
    """Covariance matrix of the modeled OPO output state."""
    sigma_th = np.diag(
        [
            params.nbar1 + 0.5,
            params.nbar1 + 0.5,
            params.nbar2 + 0.5,
            params.nbar2 + 0.5,
        ]
    )
    s = mode_mixer(params.beta) @ two_mode_squeezer(params.zeta) @ local_squeezer(
        params.xi1, params.xi2
    )
    sigma = s @ sigma_th @ s.T
    return CovarianceMatrix((sigma + sigma.T) / 2.0)


# ---------------------------------------------------------------------------
# auxiliary-mode quadratures and trace sampling
# ---------------------------------------------------------------------------

_SQ2 = 1.0 / np.sqrt(2.0)
# (u_x, u_y) of each measured mode in terms of (x_a, y_a, x_b, y_b):
# c = (a+b)/sqrt2, d = (a-b)/sqrt2, e = (ia+b)/sqrt2, f = (ia-b)/sqrt2
_MODE_COEFFS = {
    "a": (np.array([1.0, 0, 0, 0]), np.array([0, 1.0, 0, 0])),
    "b": (np.array([0, 0, 1.0, 0]), np.array([0, 0, 0, 1.0])),
    "c": (np.array([_SQ2, 0, _SQ2, 0]), np.array([0, _SQ2, 0, _SQ2])),
    "d": (np.array([_SQ2, 0, -_SQ2, 0]), np.array([0, _SQ2, 0, -_SQ2])),
    "e": (np.array([0, -_SQ2, _SQ2, 0]), np.array([_SQ2, 0, 0, _SQ2])),
    "f": (np.array([0, -_SQ2, -_SQ2, 0]), np.array([_SQ2, 0, 0, -_SQ2])),
}


def mode_quadrature_coefficients(mode: str, theta: float) -> np.ndarray:
    """Vector u with x_theta(mode) = u . (x_a, y_a, x_b, y_b)."""
    ux, uy = _MODE_COEFFS[mode]
    return np.cos(theta) * ux + np.sin(theta) * uy


def true_variance(cm, mode: str, theta, eta: float = 1.0,
                  electronic_noise_var: float = 0.0):
    """Detected quadrature variance: eta u'su + (1-eta)/2 + V_el.

    theta may be a scalar or an array.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    s = cm.matrix if isinstance(cm, CovarianceMatrix) else np.asarray(cm, dtype=float)
    ux, uy = _MODE_COEFFS[mode]
    theta = np.asarray(theta, dtype=float)
    u = np.cos(theta)[..., None] * ux + np.sin(theta)[..., None] * uy
    v = np.einsum("...i,ij,...j->...", u, s, u)
    out = eta * v + (1.0 - eta) / 2.0 + electronic_noise_var
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MeasurementConfig:
    """Settings for one synthetic homodyne acquisition."""

    mode: str
    eta: float = DEFAULT_ETA
    electronic_noise_var: float = DEFAULT_ELECTRONIC_NOISE
    n_samples: int = 100_000
    phase_sweep: tuple[float, float] = (0.0, 2.0 * np.pi)
    seed: int = 0
    phase_jitter: float = 0.0   # optional delta-theta injected per sample, rad

    def __post_init__(self):
        if self.mode not in TRACE_MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0.5 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0.5, 1], got {self.eta}")
        if self.electronic_noise_var < 0:
            raise ValueError("electronic noise variance must be >= 0")
        if self.n_samples < 0:
            raise ValueError("n_samples must be >= 0")
        if self.phase_jitter < 0:
            raise ValueError("phase jitter must be >= 0")


@dataclass(frozen=True)
class HomodyneTrace:
    """Phase-swept homodyne samples plus the configuration that produced them."""

    thetas: np.ndarray
    xs: np.ndarray
    config: MeasurementConfig
    created: str = field(default_factory=lambda: _dt.datetime.now().isoformat())

    def __len__(self) -> int:
        return self.thetas.size

    @property
    def samples(self):
        """Iterate (theta, x) pairs."""
        return zip(self.thetas, self.xs)


def sample_trace(cm, config: MeasurementConfig) -> HomodyneTrace:
    """Draw a homodyne trace from the state cm under the given configuration.

    Phases sweep the configured range linearly (endpoint excluded, so a full
    2 pi sweep has uniform bin occupancy); samples are independent zero-mean
    Gaussians with the detected variance at each phase. Reproducible from the
    seed alone.
    """
    start, end = config.phase_sweep
    thetas = np.linspace(start, end, config.n_samples, endpoint=False)
    rng = np.random.default_rng(config.seed)
    eff_thetas = thetas
    if config.phase_jitter > 0 and config.n_samples > 0:
        eff_thetas = thetas + rng.normal(0.0, config.phase_jitter, size=thetas.shape)
    v = true_variance(cm, config.mode, eff_thetas, config.eta,
                      config.electronic_noise_var)
    xs = rng.normal(size=thetas.shape) * np.sqrt(np.asarray(v))
    return HomodyneTrace(thetas=thetas, xs=xs, config=config)


def shot_noise_trace(config: MeasurementConfig) -> HomodyneTrace:
    """Vacuum calibration trace: the OPO output obscured, eta = 1."""
    cfg = replace(config, mode="vac", eta=1.0)
    start, end = cfg.phase_sweep
    thetas = np.linspace(start, end, cfg.n_samples, endpoint=False)
    rng = np.random.default_rng(cfg.seed)
    # vacuum variance is phase-flat: eta-independent 1/2 plus electronic noise
    xs = rng.normal(size=thetas.shape) * np.sqrt(0.5 + cfg.electronic_noise_var)
    return HomodyneTrace(thetas=thetas, xs=xs, config=cfg)
