import numpy as np
import pytest

from cvchar import CovarianceMatrix

# Published matrices (exact printed entries).
EQ_IV = np.array(
    [
        [1.694, 0.000, 1.204, -0.02],
        [0.000, 1.694, 0.02, -1.232],
        [1.204, 0.02, 1.671, 0.000],
        [-0.02, -1.232, 0.000, 1.671],
    ]
)
EQ_TOMO8 = np.array(
    [
        [2.107, 0.000, 1.830, -0.1],
        [0.000, 2.107, 0.08, -1.573],
        [1.830, 0.08, 1.867, 0.000],
        [-0.1, -1.573, 0.000, 1.867],
    ]
)


@pytest.fixture
def cm_iv():
    return CovarianceMatrix(EQ_IV)


@pytest.fixture
def cm_tomo8():
    return CovarianceMatrix(EQ_TOMO8)


@pytest.fixture
def cm_vacuum():
    return CovarianceMatrix.vacuum()


def twin_beam_cm(r: float, nbar: float = 0.0) -> CovarianceMatrix:
    """Two-mode squeezed thermal state, the ideal OPO output.

    Same sign convention as cm_from_model: x quadratures anticorrelated, so
    mode c is squeezed at phase 0.
    """
    c = (1 + 2 * nbar) * np.cosh(2 * r) / 2
    s = (1 + 2 * nbar) * np.sinh(2 * r) / 2
    return CovarianceMatrix(
        np.array(
            [
                [c, 0, -s, 0],
                [0, c, 0, s],
                [-s, 0, c, 0],
                [0, s, 0, c],
            ]
        )
    )


def random_physical_cm(rng, max_squeeze: float = 1.2, max_nbar: float = 3.0):
    """Random physical CM: random thermal spectrum conjugated by a random symplectic."""
    from cvchar import local_rotation, local_squeezer, mode_mixer, two_mode_squeezer

    nu1 = 0.5 + rng.exponential(max_nbar / 2)
    nu2 = 0.5 + rng.exponential(max_nbar / 2)
    d = np.diag([nu1, nu1, nu2, nu2])
    s = (
        local_rotation(rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))
        @ local_squeezer(*rng.uniform(-max_squeeze / 2, max_squeeze / 2, size=2))
        @ mode_mixer(rng.uniform(0, np.pi))
        @ two_mode_squeezer(rng.uniform(0, max_squeeze))
        @ local_rotation(rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))
    )
    m = s @ d @ s.T
    return CovarianceMatrix((m + m.T) / 2)
