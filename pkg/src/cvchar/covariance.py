"""Two-mode covariance matrices: invariants, symplectic spectra, standard form.

Conventions: quadrature ordering (x_a, y_a, x_b, y_b), shot-noise normalized
so the vacuum has variance 1/2 on the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeRadicand, NoRealSolution

# one-mode symplectic form adiag[1, -1]; OMEGA is its two-mode direct sum
_omega1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.block([[_omega1, np.zeros((2, 2))], [np.zeros((2, 2)), _omega1]])

PHYSICALITY_TOL = 1e-6


@dataclass(frozen=True)
class CovarianceMatrix:
    """4x4 symmetric quadrature covariance matrix of a two-mode Gaussian state."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        if not np.array_equal(m, m.T):
            raise ValueError("covariance matrix must be symmetric exactly as stored")
        for k in range(1, 5):
            if np.linalg.det(m[:k, :k]) <= 0:
                raise ValueError("covariance matrix must be positive definite")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_array(cls, m, symmetrize: bool = False) -> "CovarianceMatrix":
        m = np.asarray(m, dtype=float)
        if symmetrize:
            m = (m + m.T) / 2.0
        return cls(m)

    @classmethod
    def vacuum(cls) -> "CovarianceMatrix":
        return cls(0.5 * np.eye(4))

    @property
    def block_a(self) -> np.ndarray:
        """Autocorrelation block of mode a."""
        return self.matrix[:2, :2]

    @property
    def block_b(self) -> np.ndarray:
        """Autocorrelation block of mode b."""
        return self.matrix[2:, 2:]

    @property
    def block_c(self) -> np.ndarray:
        """Cross-correlation block."""
        return self.matrix[:2, 2:]


@dataclass(frozen=True)
class SymplecticInvariants:
    """Local symplectic invariants I1..I4 and the two Delta combinations."""

    i1: float
    i2: float
    i3: float
    i4: float

    @property
    def delta(self) -> float:
        return self.i1 + self.i2 + 2.0 * self.i3

    @property
    def delta_tilde(self) -> float:
        return self.i1 + self.i2 - 2.0 * self.i3


@dataclass(frozen=True)
class SymplecticSpectrum:
    """Symplectic eigenvalues of the CM and of its partial transpose."""

    d_minus: float
    d_plus: float
    dt_minus: float
    dt_plus: float


@dataclass(frozen=True)
class StandardForm:
    """Entries (n, n, m, m, c1, c2) of the locally-equivalent standard form."""

    n: float
    m: float
    c1: float
    c2: float


def _as_matrix(cm) -> np.ndarray:
    """Accept a CovarianceMatrix or a plain symmetric 4x4 array."""
    if isinstance(cm, CovarianceMatrix):
        return cm.matrix
    m = np.asarray(cm, dtype=float)
    if m.shape != (4, 4) or not np.allclose(m, m.T, rtol=0, atol=0):
        raise ValueError("expected a symmetric 4x4 matrix")
    return m


def _det2(m: np.ndarray) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def invariants(cm) -> SymplecticInvariants:
    """Determinants of the A, B, C blocks and of the full matrix."""
    s = _as_matrix(cm)
    return SymplecticInvariants(
        i1=_det2(s[:2, :2]),
        i2=_det2(s[2:, 2:]),
        i3=_det2(s[:2, 2:]),
        i4=float(np.linalg.det(s)),
    )


def _eig_pair(delta: float, i4: float) -> tuple[float, float]:
    rad = delta * delta - 4.0 * i4
    scale = max(delta * delta, 1.0)
    if rad < -1e-9 * scale:
        raise NegativeRadicand(
            f"negative radicand {rad:g}: not a valid two-mode covariance matrix"
        )
    rad = max(rad, 0.0)
    lo = (delta - np.sqrt(rad)) / 2.0
    hi = (delta + np.sqrt(rad)) / 2.0
    if lo < 0:
        if lo < -1e-9 * scale:
            raise NegativeRadicand(f"negative squared symplectic eigenvalue {lo:g}")
        lo = 0.0
    return float(np.sqrt(lo)), float(np.sqrt(hi))


def symplectic_spectrum(cm) -> SymplecticSpectrum:
    """Symplectic eigenvalues d± and their partial-transpose counterparts.

    Raises
    ------
    NegativeRadicand
        If either radicand is negative beyond roundoff, i.e. the matrix is
        not a covariance matrix of any two-mode state.
    """
    inv = invariants(cm)
    d_minus, d_plus = _eig_pair(inv.delta, inv.i4)
    dt_minus, dt_plus = _eig_pair(inv.delta_tilde, inv.i4)
    return SymplecticSpectrum(d_minus, d_plus, dt_minus, dt_plus)


def is_physical(cm, tol: float = PHYSICALITY_TOL) -> bool:
    """Heisenberg check d- >= 1/2 - tol; malformed matrices count as unphysical."""
    try:
        spec = symplectic_spectrum(cm)
    except NegativeRadicand:
        return False
    return spec.d_minus >= 0.5 - tol


def standard_form(cm) -> StandardForm:
    """Solve the invariant system for the standard-form entries.

    Tie-break: c1 >= |c2|, c1 >= 0, sign(c2) = sign(I3) when I3 != 0.

    Raises
    ------
    NoRealSolution
        If the quadratic for (c1^2, c2^2) has a negative discriminant beyond
        roundoff, i.e. the invariants are mutually inconsistent.
    """
    inv = invariants(cm)
    n = float(np.sqrt(inv.i1))
    m = float(np.sqrt(inv.i2))
    nm = n * m
    # c1^2 and c2^2 are the roots of t^2 - s*t + i3^2 with s fixed by I4
    s = (nm * nm + inv.i3 * inv.i3 - inv.i4) / nm
    disc = s * s - 4.0 * inv.i3 * inv.i3
    if disc < -1e-9 * max(s * s, 1.0):
        raise NoRealSolution(f"negative discriminant {disc:g} in standard-form solve")
    disc = max(disc, 0.0)
    hi = (s + np.sqrt(disc)) / 2.0
    lo = (s - np.sqrt(disc)) / 2.0
    if hi < 0:
        raise NoRealSolution("no nonnegative solution for c1^2")
    c1 = float(np.sqrt(hi))
    c2 = float(np.sign(inv.i3) * np.sqrt(max(lo, 0.0)))
    return StandardForm(n=n, m=m, c1=c1, c2=c2)


def partial_transpose(cm) -> CovarianceMatrix:
    """CM of the partially transposed state (time reversal of mode b)."""
    lam = np.diag([1.0, 1.0, 1.0, -1.0])
    return CovarianceMatrix(lam @ _as_matrix(cm) @ lam)
