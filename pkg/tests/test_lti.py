import numpy as np
import pytest

from nisys import (LtiError, ModalModel, StateSpace, add, dc_gain,
                   diagonal_replicate, evaluate, inf_gain, is_minimal,
                   modal_to_ss, paraconjugate_transpose, poles,
                   positive_feedback, star_product)
from nisys.lti import static_gain
from conftest import random_modal, random_stable, tf


def test_statespace_validation():
    with pytest.raises(LtiError):
        StateSpace(np.ones((2, 3)), np.ones((2, 1)), np.ones((1, 2)), [[0.0]])
    with pytest.raises(LtiError):
        StateSpace([[np.nan]], [[1.0]], [[1.0]], [[0.0]])
    with pytest.raises(LtiError):
        StateSpace([[-1.0]], [[1.0, 2.0]], [[1.0]], [[0.0]])  # B/D mismatch


def test_statespace_static_gain():
    g = static_gain([[2.0, 0.0], [0.0, 3.0]])
    assert g.n == 0
    assert np.allclose(evaluate(g, 1j * 7.0), [[2.0, 0.0], [0.0, 3.0]])
    assert poles(g).size == 0


def test_row_vector_b_normalized():
    # a single-input B given as a row is accepted and transposed
    s1 = StateSpace([[-1.0, 0.0], [0.0, -2.0]], [1.0, 2.0], [[1.0, 1.0]], [[0.0]])
    assert s1.B.shape == (2, 1)


def test_evaluate_matches_resolvent_and_conjugate_symmetry():
    rng = np.random.default_rng(11)
    for _ in range(20):
        sys = random_stable(rng, 4, 2, 2)
        s = complex(rng.standard_normal(), rng.standard_normal())
        direct = sys.C @ np.linalg.solve(s * np.eye(4) - sys.A, sys.B) + sys.D
        assert np.allclose(evaluate(sys, s), direct, atol=1e-10)
        # real coefficients: P(conj(s)) = conj(P(s))
        assert np.allclose(evaluate(sys, np.conj(s)), np.conj(evaluate(sys, s)),
                           atol=1e-10)


def test_evaluate_rejects_pole():
    sys = tf([1.0], [1.0, 1.0])
    with pytest.raises(LtiError):
        evaluate(sys, -1.0)


def test_add_is_parallel_sum():
    rng = np.random.default_rng(2)
    a = random_stable(rng, 3, 1, 1)
    b = random_stable(rng, 2, 1, 1)
    s = 0.3 + 0.7j
    tot = add(a, b)
    assert tot.n == 5
    assert np.allclose(evaluate(tot, s), evaluate(a, s) + evaluate(b, s))


def test_paraconjugate_transpose_identity():
    rng = np.random.default_rng(4)
    sys = random_stable(rng, 3, 2, 2)
    pc = paraconjugate_transpose(sys)
    s = 0.2 + 1.3j
    assert np.allclose(evaluate(pc, s), evaluate(sys, -s).T, atol=1e-10)


def test_dc_and_inf_gain():
    sys = tf([3.0], [1.0, 2.0])     # 3/(s+2)
    assert np.isclose(dc_gain(sys)[0, 0], 1.5)
    assert np.isclose(inf_gain(sys)[0, 0], 0.0)
    integ = StateSpace([[0.0]], [[1.0]], [[1.0]], [[0.0]])
    with pytest.raises(LtiError):
        dc_gain(integ)


def test_is_minimal():
    assert is_minimal(tf([1.0], [1.0, 1.0]))
    # duplicated state, unobservable copy
    A = np.diag([-1.0, -1.0])
    sys = StateSpace(A, [[1.0], [1.0]], [[1.0, 0.0]], [[0.0]])
    assert not is_minimal(sys)


def test_diagonal_replicate():
    sys = tf([1.0], [1.0, 1.0])
    rep = diagonal_replicate(sys, 3)
    s = 1.0 + 2.0j
    assert rep.inputs == rep.outputs == 3
    assert np.allclose(evaluate(rep, s), evaluate(sys, s)[0, 0] * np.eye(3))


def test_modal_two_path_eval():
    rng = np.random.default_rng(9)
    for output in ("position", "velocity"):
        mm = random_modal(rng, max_modes=3, channels=2, output=output)
        sys = modal_to_ss(mm)
        for _ in range(5):
            s = complex(rng.uniform(0.1, 2.0), rng.uniform(-5.0, 5.0))
            ref = mm.eval_sum(s)
            got = evaluate(sys, s)
            assert np.allclose(got, ref, rtol=1e-12, atol=1e-12)


def test_modal_validation():
    with pytest.raises(LtiError):
        ModalModel(modes=((0.0, 1.0, (1.0,)),), output="position")  # omega > 0
    with pytest.raises(LtiError):
        ModalModel(modes=((1.0, -1.0, (1.0,)),), output="position")  # kappa >= 0
    with pytest.raises(LtiError):
        ModalModel(modes=((1.0, 1.0, (1.0,)),), output="acceleration")


def _two_port(rng, n, p1, m1, p2, m2):
    # stable block two-port for star product tests
    sys = random_stable(rng, n, m1 + m2, p1 + p2)
    return sys


def test_positive_feedback_matches_transfer_algebra():
    rng = np.random.default_rng(17)
    for _ in range(20):
        M = random_stable(rng, rng.integers(1, 5), 2, 2)
        N = random_stable(rng, rng.integers(1, 5), 2, 2)
        # keep the loop well posed
        if np.linalg.norm(N.D @ M.D) > 0.7:
            N = StateSpace(N.A, N.B, 0.1 * N.C, 0.1 * N.D)
        cl = positive_feedback(M, N)
        s = complex(rng.uniform(0.5, 2.0), rng.uniform(-3.0, 3.0))
        Ms, Ns = evaluate(M, s), evaluate(N, s)
        I = np.eye(2)
        T11 = Ms @ np.linalg.inv(I - Ns @ Ms)
        T12 = T11 @ Ns
        T22 = Ns @ np.linalg.inv(I - Ms @ Ns)
        T21 = T22 @ Ms
        ref = np.block([[T11, T12], [T21, T22]])
        assert np.allclose(evaluate(cl, s), ref, rtol=1e-9, atol=1e-9)


def test_positive_feedback_rejects_algebraic_loop():
    M = static_gain([[1.0]])
    N = static_gain([[1.0]])
    with pytest.raises(LtiError):
        positive_feedback(M, N)


def test_star_product_matches_transfer_algebra():
    # partitions are half/half: M maps (w1, u1) -> (y1, u2), N maps
    # (u2, w2) -> (u1, y2), all channels width q
    rng = np.random.default_rng(23)
    done = 0
    while done < 20:
        q = int(rng.integers(1, 3))
        M = random_stable(rng, int(rng.integers(1, 4)), 2 * q, 2 * q)
        N = random_stable(rng, int(rng.integers(1, 4)), 2 * q, 2 * q)
        # well-posedness is a feedthrough condition
        loop_D = np.eye(q) - N.D[:q, :q] @ M.D[q:, q:]
        if np.linalg.svd(loop_D, compute_uv=False)[-1] < 0.2:
            continue
        s = complex(rng.uniform(0.5, 2.0), rng.uniform(-3.0, 3.0))
        Ms, Ns = evaluate(M, s), evaluate(N, s)
        M11, M12 = Ms[:q, :q], Ms[:q, q:]
        M21, M22 = Ms[q:, :q], Ms[q:, q:]
        N11, N12 = Ns[:q, :q], Ns[:q, q:]
        N21, N22 = Ns[q:, :q], Ns[q:, q:]
        if np.linalg.svd(np.eye(q) - N11 @ M22, compute_uv=False)[-1] < 0.1:
            continue
        done += 1
        cl = star_product(M, N)
        E = np.linalg.inv(np.eye(q) - N11 @ M22)
        F = np.linalg.inv(np.eye(q) - M22 @ N11)
        S11 = M11 + M12 @ E @ N11 @ M21
        S12 = M12 @ E @ N12
        S21 = N21 @ F @ M21
        S22 = N22 + N21 @ F @ M22 @ N12
        ref = np.block([[S11, S12], [S21, S22]])
        assert np.allclose(evaluate(cl, s), ref, rtol=1e-9, atol=1e-9)
