import numpy as np
import pytest
from scipy.signal import tf2ss

from nisys import ModalModel, StateSpace, UncertainPlant, modal_to_ss


def tf(num, den) -> StateSpace:
    A, B, C, D = tf2ss(num, den)
    return StateSpace(A, B, C, D)


@pytest.fixture
def first_order():
    # 1/(s+1)
    return StateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]])


@pytest.fixture
def second_order():
    # (2s^2+s+1)/((s^2+2s+5)(s+1)(2s+1)), in the realization whose
    # published certificate is checked below
    A = np.array([[-3.5, -8.5, -8.5, -2.5],
                  [1.0, 0, 0, 0],
                  [0, 1.0, 0, 0],
                  [0, 0, 1.0, 0]])
    B = np.array([[2.5], [-3.0], [1.0], [0.0]])
    C = np.array([[0.0, 0.0, 0.0, 1.0]])
    return StateSpace(A, B, C, [[0.0]])


SECOND_ORDER_Y = np.array([
    [100.375, -36.75, 2.5, 3.0],
    [-36.75, 18.5, -3.0, -1.0],
    [2.5, -3.0, 1.0, 0.0],
    [3.0, -1.0, 0.0, 0.2],
])


@pytest.fixture
def second_order_Y():
    return SECOND_ORDER_Y.copy()


@pytest.fixture
def velocity_mode():
    # s/(s^2+s+1): one mode, velocity output
    return modal_to_ss(ModalModel(modes=((1.0, 1.0, (1.0,)),), output="velocity"))


@pytest.fixture
def unstable():
    # 1/(s-1)
    return StateSpace([[1.0]], [[1.0]], [[1.0]], [[0.0]])


def flexible_modes(n_modes=10):
    return tuple((100.0 * k, 2.0, (1.0,)) for k in range(1, n_modes + 1))


@pytest.fixture
def flexible_plant():
    # ten lightly damped modes, position output:
    # P(s) = sum_k 1/(s^2 + 2 s + 1e4 k^2)
    return modal_to_ss(ModalModel(modes=flexible_modes(), output="position"))


FLEXIBLE_DC_EXACT = 1e-4 * sum(1.0 / k**2 for k in range(1, 11))


@pytest.fixture
def synth_plant():
    return UncertainPlant(
        A=np.array([[-1.0, 0, 0], [1, -1, 1], [0, 1, -1]]),
        B1=np.array([[0.0], [0.0], [1.0]]),
        B2=np.array([[-2.0], [1.0], [0.0]]),
        C1=np.array([[0.0, 1.0, 0.0]]),
    )


SYNTH_Y_PUBLISHED = np.array([
    [3.9594e9, -2.0008, -3.9594e9],
    [-2.0008, 0.72850, 1.7293],
    [-3.9594e9, 1.7293, 3.9594e9],
])
SYNTH_M_PUBLISHED = np.array([[-2.8122, 1.0000, 2.6260]])
SYNTH_K_PUBLISHED = np.array([[0.22927, 1.4581, 0.22927]])


def random_stable(rng, n, m=1, p=None):
    p = m if p is None else p
    A = rng.standard_normal((n, n))
    A = A - (np.abs(np.linalg.eigvals(A).real).max() + 0.5 + rng.uniform(0, 1)) * np.eye(n)
    return StateSpace(A, rng.standard_normal((n, m)), rng.standard_normal((p, n)),
                      rng.standard_normal((p, m)))


def random_modal(rng, max_modes=4, channels=1, output="position"):
    k = rng.integers(1, max_modes + 1)
    modes = []
    for _ in range(k):
        omega = float(rng.uniform(0.5, 50.0))
        kappa = float(rng.uniform(0.05, 2.0))
        psi = tuple(rng.uniform(-2.0, 2.0, size=channels))
        modes.append((omega, kappa, psi))
    return ModalModel(modes=tuple(modes), output=output)


def random_pd(rng, m, shift=0.5):
    G = rng.standard_normal((m, m))
    return G @ G.T + shift * np.eye(m)
