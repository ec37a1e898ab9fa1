"""Controller families with the negative-imaginary property, and a tuning
loop for the integral resonant controller.

All constructors return StateSpace realizations. Gains are validated so that
the returned controller is (strictly) negative-imaginary by construction:
positive position feedback and the resonant families need positive gains and
damping, the integral resonant controller needs symmetric positive definite
gain matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .lti import StateSpace, add, dc_gain
from .numerics import eig_symmetric


def _check_pos(name, v):
    if not (np.isscalar(v) and np.isreal(v) and v > 0):
        raise ValueError(f"{name} must be a positive scalar")
    return float(v)


def _sym_pd(name, M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square")
    if np.linalg.norm(M - M.T) > 1e-12 * (1.0 + np.linalg.norm(M)):
        raise ValueError(f"{name} must be symmetric")
    if eig_symmetric(M)[0] <= 0:
        raise ValueError(f"{name} must be positive definite")
    return M


def _term_den(zeta, omega):
    z = _check_pos("zeta", zeta)
    w = _check_pos("omega", omega)
    A = np.array([[0.0, 1.0], [-w * w, -2.0 * z * w]])
    return A, z, w


def ppf(terms) -> StateSpace:
    """Positive position feedback: sum of k / (s^2 + 2 zeta omega s + omega^2)
    over terms (k, zeta, omega), all parameters positive. SNI."""
    parts = []
    for k, zeta, omega in terms:
        k = _check_pos("k", k)
        A, _, w = _term_den(zeta, omega)
        parts.append(StateSpace(A, [[0.0], [1.0]], [[k, 0.0]], [[0.0]]))
    if not parts:
        raise ValueError("need at least one term")
    out = parts[0]
    for p in parts[1:]:
        out = add(out, p)
    return out


def ppf_mimo(K, D, Omega) -> StateSpace:
    """Multivariable positive position feedback K^T (s^2 I + D s + Omega)^{-1} K
    with D, Omega symmetric positive definite. SNI when K has full column rank."""
    K = np.atleast_2d(np.asarray(K, dtype=float))
    D = _sym_pd("D", D)
    Omega = _sym_pd("Omega", Omega)
    r = D.shape[0]
    if Omega.shape[0] != r or K.shape[0] != r:
        raise ValueError("K, D, Omega row dimensions must agree")
    Z, I = np.zeros((r, r)), np.eye(r)
    A = np.block([[Z, I], [-Omega, -D]])
    B = np.vstack([np.zeros_like(K), K])
    C = np.hstack([K.T, np.zeros((K.shape[1], r))])
    return StateSpace(A, B, C, np.zeros((K.shape[1], K.shape[1])))


def _gain_vector(g):
    # scalar gain k > 0, or a nonzero vector alpha for the rank-one MIMO form
    if np.ndim(g) == 0:
        return None, _check_pos("gain", g)
    v = np.asarray(g, dtype=float).ravel()
    if v.size == 0 or not np.any(v):
        raise ValueError("gain vector must be nonzero")
    return v, None


def resonant_acc(terms) -> StateSpace:
    """Resonant acceleration-type feedback, sum over (g, zeta, omega) of
    -g s^2 / (s^2 + 2 zeta omega s + omega^2) for scalar g = k > 0, or the
    rank-one form with g = alpha (vector) giving -s^2/den alpha alpha^T. NI
    with feedthrough -k (resp. -alpha alpha^T)."""
    parts = []
    for g, zeta, omega in terms:
        v, k = _gain_vector(g)
        A, z, w = _term_den(zeta, omega)
        if v is None:
            parts.append(StateSpace(A, [[0.0], [1.0]],
                                    [[k * w * w, 2.0 * k * z * w]], [[-k]]))
        else:
            B = np.vstack([np.zeros((1, v.size)), v[None, :]])
            C = np.outer(v, [w * w, 2.0 * z * w])
            parts.append(StateSpace(A, B, C, -np.outer(v, v)))
    if not parts:
        raise ValueError("need at least one term")
    out = parts[0]
    for p in parts[1:]:
        out = add(out, p)
    return out


def resonant_vel_type(terms) -> StateSpace:
    """Resonant velocity-type feedback, sum over (g, zeta, omega) of
    -g s (s + 2 zeta omega) / (s^2 + 2 zeta omega s + omega^2), scalar or
    rank-one vector gain as in resonant_acc. NI."""
    parts = []
    for g, zeta, omega in terms:
        v, k = _gain_vector(g)
        A, z, w = _term_den(zeta, omega)
        if v is None:
            parts.append(StateSpace(A, [[0.0], [1.0]],
                                    [[k * w * w, 0.0]], [[-k]]))
        else:
            B = np.vstack([np.zeros((1, v.size)), v[None, :]])
            C = np.outer(v, [w * w, 0.0])
            parts.append(StateSpace(A, B, C, -np.outer(v, v)))
    if not parts:
        raise ValueError("need at least one term")
    out = parts[0]
    for p in parts[1:]:
        out = add(out, p)
    return out


def irc(Gamma, Phi) -> StateSpace:
    """Integral resonant controller (-Gamma Phi, Gamma, I, 0) with Gamma and
    Phi symmetric positive definite. SNI, with DC gain Phi^{-1}."""
    G = _sym_pd("Gamma", Gamma)
    P = _sym_pd("Phi", Phi)
    if G.shape != P.shape:
        raise ValueError("Gamma and Phi dimensions must agree")
    m = G.shape[0]
    return StateSpace(-G @ P, G, np.eye(m), np.zeros((m, m)))


def choose_phi(plant: StateSpace, margin: float = 1.2) -> np.ndarray:
    """Pick Phi = margin * P(0) so the DC-gain stability product
    lambda_max(P(0) Phi^{-1}) = 1/margin < 1 for any positive Gamma."""
    if margin <= 1.0:
        raise ValueError("margin must exceed 1")
    P0 = dc_gain(plant)
    return _sym_pd("plant DC gain", P0) * float(margin)


@dataclass
class IrcDesign:
    """Gain sweep result: the locus of closed-loop poles over gamma, the
    damping and decay-rate profiles of the dominant pair, and the selected
    gain (decay-rate argmax, then locally refined)."""

    feasible: bool
    gamma_star: float
    zeta_at_star: float
    decay_at_star: float
    gammas: np.ndarray
    loci: np.ndarray          # (len(gammas), n+1), assignment-matched rows
    zetas: np.ndarray
    decays: np.ndarray
    stable: np.ndarray
    controller: StateSpace | None


def _match(prev, p):
    cost = np.abs(prev[:, None] - p[None, :])
    r, c = linear_sum_assignment(cost)
    perm = np.empty(len(p), dtype=int)
    perm[r] = c
    return p[perm]


def design_irc_gamma(plant: StateSpace, Phi, gamma_min: float = 1e3,
                     gamma_max: float = 1e8,
                     points_per_decade: int = 200) -> IrcDesign:
    """Sweep the integral resonant gain gamma on a log grid, track each
    closed-loop pole across the sweep by nearest-neighbor assignment, and
    select the gamma that maximizes the decay rate of the dominant pair (the
    two slowest open-loop poles), refined on a local fine grid.

    Scalar-gain (single-input single-output plant) form: the closed loop is
    [[A, B], [gamma C, gamma D - gamma Phi]].
    """
    if not plant.is_siso:
        raise ValueError("gain sweep is defined for single-input single-output plants")
    phi = float(np.atleast_2d(np.asarray(Phi, dtype=float))[0, 0])
    if phi <= 0:
        raise ValueError("Phi must be positive")
    if not (0 < gamma_min < gamma_max):
        raise ValueError("need 0 < gamma_min < gamma_max")
    A, B, C, D = plant.A, plant.B, plant.C, plant.D
    n = plant.n

    def closed_A(g):
        Acl = np.zeros((n + 1, n + 1))
        Acl[:n, :n] = A
        Acl[:n, n:] = B
        Acl[n:, :n] = g * C
        Acl[n, n] = g * (D[0, 0] - phi)
        return Acl

    ndec = np.log10(gamma_max / gamma_min)
    npts = max(2, int(np.ceil(ndec * points_per_decade)) + 1)
    gammas = np.geomspace(gamma_min, gamma_max, npts)

    ol = np.linalg.eigvals(A)
    order = np.argsort(np.abs(ol))
    tracked = order[:2] if n >= 2 else order[:1]
    prev = np.append(ol, -gammas[0] * phi)

    loci = np.zeros((npts, n + 1), dtype=complex)
    decays = np.full(npts, np.nan)
    zetas = np.full(npts, np.nan)
    stable = np.zeros(npts, dtype=bool)
    for k, g in enumerate(gammas):
        pm = _match(prev, np.linalg.eigvals(closed_A(g)))
        prev = pm
        loci[k] = pm
        if np.any(pm.real >= 0):
            continue
        stable[k] = True
        pair = pm[tracked]
        decays[k] = (-pair.real).min()
        zetas[k] = (-pair.real / np.abs(pair)).min()

    if not stable.any():
        return IrcDesign(False, np.nan, np.nan, np.nan, gammas, loci,
                         zetas, decays, stable, None)

    bd = int(np.nanargmax(decays))
    lo = gammas[max(bd - 1, 0)]
    hi = gammas[min(bd + 1, npts - 1)]
    fine = np.geomspace(lo, hi, 400)
    fprev = loci[max(bd - 1, 0)]
    g_star, d_star, z_star = gammas[bd], decays[bd], zetas[bd]
    for g in fine:
        pm = _match(fprev, np.linalg.eigvals(closed_A(g)))
        fprev = pm
        if np.any(pm.real >= 0):
            continue
        pair = pm[tracked]
        d = (-pair.real).min()
        if d > d_star:
            g_star, d_star = float(g), float(d)
            z_star = float((-pair.real / np.abs(pair)).min())

    return IrcDesign(True, float(g_star), float(z_star), float(d_star),
                     gammas, loci, zetas, decays, stable,
                     irc(np.array([[g_star]]), np.array([[phi]])))
