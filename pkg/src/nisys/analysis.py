"""Classification of LTI systems by frequency-domain sign properties.

Covers the negative-imaginary family (NI, strictly NI) and the positive-real
family (PR, strictly PR), each by dense frequency sweep, plus certificate
routes: the NI lemma LMI, the transmission-zero test on M(s) - M^T(-s), and
the lag-augmentation sufficient conditions for strictness.

Sweeps are necessary-style evidence on a grid; the LMI and zero tests are the
certificates of record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lmi as lmimod
from . import numerics
from ._kernels import sweep_eigmin
from .lti import StateSpace, evaluate, is_minimal, poles

AXIS_TOL = 1e-7       # imaginary-axis decision band for poles and zeros
ORIGIN_TOL = 1e-8     # zeros with |z| below this count as the origin
NI_SWEEP_TOL = 1e-8   # relative, scaled by 1 + ||P(jw)||
SNI_STRICT_TOL = 1e-10  # absolute strict margin for w > 0
DEFAULT_PPD = 200


def default_grid(sys: StateSpace, points_per_decade: int = DEFAULT_PPD,
                 wmin=None, wmax=None, include_zero: bool = True) -> np.ndarray:
    """Logarithmic grid bracketing all finite nonzero pole magnitudes by three
    decades on each side, with w = 0 prepended."""
    mags = np.abs(poles(sys))
    mags = mags[mags > 0]
    lo = 1e-3 * mags.min() if mags.size else 1e-3
    hi = 1e3 * mags.max() if mags.size else 1e3
    if wmin is not None:
        lo = float(wmin)
    if wmax is not None:
        hi = float(wmax)
    if not (0 < lo < hi):
        raise ValueError("grid bounds must satisfy 0 < wmin < wmax")
    npts = max(2, int(math.ceil(math.log10(hi / lo) * points_per_decade)) + 1)
    g = np.geomspace(lo, hi, npts)
    if include_zero:
        g = np.concatenate(([0.0], g))
    return g


def _as_grid(sys, grid, include_zero=True):
    if grid is None:
        return default_grid(sys, include_zero=include_zero)
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise ValueError("frequency grid is empty")
    if not np.all(np.isfinite(g)) or np.any(g < 0):
        raise ValueError("frequency grid must be finite and nonnegative")
    if np.any(np.diff(g) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    return g


@dataclass
class FreqVerdict:
    """Outcome of a sweep test: verdict, where it was worst, and how bad."""

    holds: bool
    worst_frequency: float
    worst_margin: float
    grid: np.ndarray
    reason: str | None = None
    note: str | None = None

    def __bool__(self):
        return self.holds


def hermitian_imaginary_part(sys: StateSpace, w: float) -> np.ndarray:
    """H(w) = j (P(jw) - P(jw)^*), Hermitian with real eigenvalues."""
    P = evaluate(sys, 1j * float(w))
    return 1j * (P - P.conj().T)


def _pole_axis_status(sys):
    p = poles(sys)
    on_axis = np.abs(p.real) <= AXIS_TOL * (1.0 + np.abs(p))
    in_rhp = (p.real > 0) & ~on_axis
    return p, bool(on_axis.any()), bool(in_rhp.any())


def _square(sys):
    if sys.inputs != sys.outputs:
        raise ValueError("this test requires a square system")


def check_ni_sweep(sys: StateSpace, grid=None, tol: float = NI_SWEEP_TOL) -> FreqVerdict:
    """Poles in the open left half-plane and lambda_min(H(w)) >= -tol
    relative at every grid frequency (w >= 0)."""
    _square(sys)
    p, on_axis, in_rhp = _pole_axis_status(sys)
    if on_axis or in_rhp:
        reason = "imaginary-axis pole" if on_axis else "right-half-plane pole"
        return FreqVerdict(False, np.nan, -np.inf, np.zeros(0), reason)
    g = _as_grid(sys, grid)
    lam, pn = sweep_eigmin(sys.A, sys.B, sys.C, sys.D, g, mode=0)
    rel = lam / (1.0 + pn)
    i = int(np.argmin(rel))
    return FreqVerdict(bool(rel[i] >= -tol), float(g[i]), float(lam[i]), g)


def check_sni_sweep(sys: StateSpace, grid=None, tol: float = SNI_STRICT_TOL) -> FreqVerdict:
    """Strict version: lambda_min(H(w)) > tol for every grid frequency w > 0
    (w = 0 is excluded; H(0) = 0 is allowed for a strict system)."""
    _square(sys)
    p, on_axis, in_rhp = _pole_axis_status(sys)
    if on_axis or in_rhp:
        reason = "imaginary-axis pole" if on_axis else "right-half-plane pole"
        return FreqVerdict(False, np.nan, -np.inf, np.zeros(0), reason)
    g = _as_grid(sys, grid, include_zero=False)
    g = g[g > 0]
    lam, _ = sweep_eigmin(sys.A, sys.B, sys.C, sys.D, g, mode=0)
    i = int(np.argmin(lam))
    return FreqVerdict(bool(lam[i] > tol), float(g[i]), float(lam[i]), g)


@dataclass
class NiLmiResult:
    is_ni: bool
    Y: np.ndarray | None
    reason: str | None
    minimal: bool
    solver: lmimod.SolveResult | None = None
    verification: lmimod.CertificateReport | None = None

    def __bool__(self):
        return self.is_ni


def check_ni_lmi(sys: StateSpace, balance: bool = True) -> NiLmiResult:
    """Certificate route: NI iff D is symmetric, A has no imaginary-axis
    eigenvalues, and Y > 0 exists with A Y + Y A^T <= 0, B + A Y C^T = 0.

    Solved in balanced coordinates for conditioning; the returned Y is
    transformed back, so it certifies the original realization. Non-minimal
    realizations are attempted anyway and flagged.
    """
    _square(sys)
    A, B, C, D = sys.A, sys.B, sys.C, sys.D
    minimal = is_minimal(sys)
    if np.linalg.norm(D - D.T) > 1e-9 * (1.0 + np.linalg.norm(D)):
        return NiLmiResult(False, None, "feedthrough matrix is not symmetric", minimal)
    p = poles(sys)
    if p.size and np.any(np.abs(p.real) <= AXIS_TOL * (1.0 + np.abs(p))):
        return NiLmiResult(False, None, "imaginary-axis eigenvalue of A", minimal)
    if p.size and np.any(p.real > 0):
        return NiLmiResult(False, None, "right-half-plane pole", minimal)
    if sys.n == 0:
        return NiLmiResult(True, np.zeros((0, 0)), None, minimal)
    if balance:
        Ab, T = numerics.balance(A)
        t = np.diag(T)
        Bb = B / t[:, None]
        Cb = C * t[None, :]
    else:
        Ab, Bb, Cb = A, B, C
        T = np.eye(sys.n)
    res = lmimod.solve_feasibility(lmimod.ni_problem(Ab, Bb, Cb))
    if not res.feasible:
        return NiLmiResult(False, None, "no certificate found at tolerance", minimal, res)
    Yb = res.values["Y"]
    Y = T @ Yb @ T.T
    ver = lmimod.verify_certificate(lmimod.ni_problem(A, B, C), {"Y": Y},
                                    psd_tol=1e-7, strict_margin=0.0, eq_tol=1e-6)
    return NiLmiResult(True, Y, None, minimal, res, ver)


def phi_system(sys: StateSpace) -> StateSpace:
    """Realization of Phi(s) = M(s) - M^T(-s)."""
    n = sys.n
    A = np.block([[sys.A, np.zeros((n, n))], [np.zeros((n, n)), -sys.A.T]])
    B = np.vstack([sys.B, sys.C.T])
    C = np.hstack([sys.C, sys.B.T])
    return StateSpace(A, B, C, sys.D - sys.D.T)


def phi_imaginary_axis_zeros(sys: StateSpace, axis_tol: float = AXIS_TOL):
    """Invariant zeros of Phi(s) = M(s) - M^T(-s) lying on the imaginary axis.

    Computed as the finite generalized eigenvalues of the system-matrix
    pencil of the doubled realization. Returns (axis_zeros, all_finite).
    """
    phi = phi_system(sys)
    n2, m = phi.n, phi.inputs
    M1 = np.block([[phi.A, phi.B], [phi.C, phi.D]])
    M2 = np.block([[np.eye(n2), np.zeros((n2, m))], [np.zeros((m, n2 + m))]])
    fin = numerics.generalized_eigenvalues(M1, M2)
    if np.any(np.isnan(fin)):
        raise numerics.NumericsError("degenerate zero pencil")
    on_axis = fin[np.abs(fin.real) <= axis_tol * (1.0 + np.abs(fin))]
    return np.sort_complex(on_axis), fin


@dataclass
class SniZerosResult:
    is_sni: bool
    axis_zeros: np.ndarray
    violating_zeros: np.ndarray
    reason: str | None = None
    ni: NiLmiResult | None = None

    def __bool__(self):
        return self.is_sni


def check_sni_zeros(sys: StateSpace) -> SniZerosResult:
    """Strictness certificate: an NI system is SNI iff M(s) - M^T(-s) has no
    imaginary-axis transmission zeros except possibly at s = 0."""
    ni = check_ni_lmi(sys)
    none = np.zeros(0, dtype=complex)
    if not ni.is_ni:
        return SniZerosResult(False, none, none, reason=f"not NI ({ni.reason})", ni=ni)
    try:
        axis, _ = phi_imaginary_axis_zeros(sys)
    except numerics.NumericsError:
        sweep = check_sni_sweep(sys)
        return SniZerosResult(bool(sweep.holds), none, none,
                              reason="zero pencil degenerate, sweep fallback", ni=ni)
    violating = axis[np.abs(axis) > ORIGIN_TOL]
    return SniZerosResult(violating.size == 0, axis, violating, ni=ni)


def _filtered_grid(g, p):
    # drop grid points that sit numerically on a pole
    if p.size == 0:
        return g, np.ones(g.size, dtype=bool)
    d = np.abs(1j * g[:, None] - p[None, :]).min(axis=1)
    keep = d > 1e-9 * (1.0 + g)
    return g[keep], keep


def check_positive_real(sys: StateSpace, grid=None, tol: float = NI_SWEEP_TOL) -> FreqVerdict:
    """Poles in the closed left half-plane (simple imaginary-axis poles
    tolerated, noted) and lambda_min(P(jw) + P(jw)^*) >= -tol relative on the
    grid."""
    _square(sys)
    p, on_axis, in_rhp = _pole_axis_status(sys)
    if in_rhp:
        return FreqVerdict(False, np.nan, -np.inf, np.zeros(0), "right-half-plane pole")
    note = None
    if on_axis:
        ap = p[np.abs(p.real) <= AXIS_TOL * (1.0 + np.abs(p))]
        ap = np.sort(ap.imag)
        if ap.size > 1 and np.any(np.diff(ap) <= 1e-6 * (1.0 + np.abs(ap[:-1]))):
            return FreqVerdict(False, np.nan, -np.inf, np.zeros(0),
                               "repeated imaginary-axis pole")
        note = "imaginary-axis pole(s) present, grid points near them skipped"
    g = _as_grid(sys, grid)
    ge, _ = _filtered_grid(g, p)
    if ge.size == 0:
        return FreqVerdict(False, np.nan, -np.inf, g, "no evaluable grid points")
    lam, pn = sweep_eigmin(sys.A, sys.B, sys.C, sys.D, ge, mode=1)
    rel = lam / (1.0 + pn)
    i = int(np.argmin(rel))
    return FreqVerdict(bool(rel[i] >= -tol), float(ge[i]), float(lam[i]), ge, note=note)


SPR_SHIFT_LADDER = (1e-6, 1e-4, 1e-2)


def check_strictly_positive_real(sys: StateSpace, grid=None, tol: float = NI_SWEEP_TOL,
                                 eps_shift=None) -> FreqVerdict:
    """P(s - eps) positive real for some eps > 0, probed over a geometric
    ladder of shifts (or the single given eps_shift)."""
    _square(sys)
    ladder = (float(eps_shift),) if eps_shift is not None else SPR_SHIFT_LADDER
    last = None
    for e in ladder:
        shifted = StateSpace(sys.A + e * np.eye(sys.n), sys.B, sys.C, sys.D)
        ps = poles(shifted)
        if ps.size and np.any(ps.real >= -AXIS_TOL * (1.0 + np.abs(ps))):
            last = FreqVerdict(False, np.nan, -np.inf, np.zeros(0),
                               f"shift {e:g} moves poles onto or past the imaginary axis")
            continue
        v = check_positive_real(shifted, grid=grid, tol=tol)
        v.note = f"shift {e:g}"
        if v.holds:
            return v
        last = v
    return last if last is not None else FreqVerdict(False, np.nan, -np.inf, np.zeros(0),
                                                     "empty shift ladder")


def rotated_system(sys: StateSpace) -> StateSpace:
    """Realization of Q(s) = s (P(s) - P(inf)); for symmetric feedthrough,
    Q(jw) + Q(jw)^* = w H(w) exactly, linking the NI and PR sweeps."""
    return StateSpace(sys.A, sys.B, sys.C @ sys.A, sys.C @ sys.B)


def _augmented_lag(sys, shifts, eps):
    A, B, C = sys.A, sys.B, sys.C
    n, m = sys.n, sys.inputs
    k = len(shifts)
    At = np.zeros((n + k * m, n + k * m))
    At[:n, :n] = A
    Bt = np.vstack([B] + [eps * np.eye(m)] * k)
    Ct = np.hstack([C] + [-np.eye(m)] * k)
    for i, a in enumerate(shifts):
        r = n + i * m
        At[r:r + m, r:r + m] = -a * np.eye(m)
    return At, Bt, Ct


def _lag_feasible(sys, shifts, eps, solver_opts):
    _square(sys)
    if eps <= 0 or any(a <= 0 for a in shifts):
        raise ValueError("shift and eps parameters must be positive")
    if np.linalg.norm(sys.D - sys.D.T) > 1e-9 * (1.0 + np.linalg.norm(sys.D)):
        return False
    ev = poles(sys)
    for a in shifts:
        if ev.size and np.min(np.abs(ev + a)) <= 1e-9 * (1.0 + a):
            raise ValueError(f"-{a:g} is an eigenvalue of A; pick a different shift")
    At, Bt, Ct = _augmented_lag(sys, shifts, eps)
    CB = Ct @ Bt
    S = CB + CB.T
    # necessary condition for the augmented certificate; fails fast when
    # sym(CB) of the original system is not positive definite enough
    if numerics.eig_symmetric(S)[0] < -1e-9 * max(1.0, np.linalg.norm(S)):
        return False
    res = lmimod.solve_feasibility(lmimod.ni_problem(At, Bt, Ct), **solver_opts)
    return bool(res.feasible)


def sni_sufficient_lag(sys: StateSpace, alpha: float, eps: float, **solver_opts) -> bool:
    """Sufficient SNI test by single-lag augmentation: feasibility of the NI
    certificate for the system with eps/(s+alpha) I subtracted. True implies
    SNI; False is inconclusive."""
    return _lag_feasible(sys, (float(alpha),), float(eps), solver_opts)


def sni_sufficient_lag2(sys: StateSpace, alpha: float, beta: float, eps: float,
                        **solver_opts) -> bool:
    """Double-lag variant with two distinct shifts alpha != beta."""
    alpha, beta = float(alpha), float(beta)
    if alpha == beta:
        raise ValueError("the two shifts must be distinct")
    return _lag_feasible(sys, (alpha, beta), float(eps), solver_opts)


@dataclass
class Classification:
    ni: bool
    sni: bool
    pr: bool
    spr: bool
    ni_sweep: FreqVerdict
    sni_sweep: FreqVerdict
    ni_lmi: NiLmiResult
    sni_zeros: SniZerosResult
    pr_sweep: FreqVerdict
    spr_sweep: FreqVerdict

    def to_dict(self):
        def fv(v):
            d = {"holds": bool(v.holds),
                 "worst_frequency": None if np.isnan(v.worst_frequency) else float(v.worst_frequency),
                 "worst_margin": None if not np.isfinite(v.worst_margin) else float(v.worst_margin)}
            if v.reason:
                d["reason"] = v.reason
            if v.note:
                d["note"] = v.note
            return d

        out = {
            "ni": self.ni, "sni": self.sni, "pr": self.pr, "spr": self.spr,
            "ni_sweep": fv(self.ni_sweep), "sni_sweep": fv(self.sni_sweep),
            "pr_sweep": fv(self.pr_sweep), "spr_sweep": fv(self.spr_sweep),
            "ni_lmi": {"is_ni": self.ni_lmi.is_ni, "reason": self.ni_lmi.reason,
                       "minimal": self.ni_lmi.minimal,
                       "certificate": None if self.ni_lmi.Y is None else self.ni_lmi.Y.tolist()},
            "sni_zeros": {"is_sni": self.sni_zeros.is_sni,
                          "reason": self.sni_zeros.reason,
                          "axis_zeros": [[z.real, z.imag] for z in np.asarray(self.sni_zeros.axis_zeros)]},
        }
        return out


def classify(sys: StateSpace, grid=None, tol: float = NI_SWEEP_TOL) -> Classification:
    """Run the full battery. The LMI and zero tests are the verdicts of
    record for NI/SNI; the sweeps are the PR/SPR verdicts and NI evidence."""
    ni_sw = check_ni_sweep(sys, grid=grid, tol=tol)
    sni_sw = check_sni_sweep(sys, grid=grid)
    ni_cert = check_ni_lmi(sys)
    sni_z = check_sni_zeros(sys)
    pr = check_positive_real(sys, grid=grid, tol=tol)
    spr = check_strictly_positive_real(sys, grid=grid, tol=tol)
    return Classification(
        ni=bool(ni_cert.is_ni), sni=bool(ni_cert.is_ni and sni_z.is_sni),
        pr=bool(pr.holds), spr=bool(spr.holds),
        ni_sweep=ni_sw, sni_sweep=sni_sw, ni_lmi=ni_cert, sni_zeros=sni_z,
        pr_sweep=pr, spr_sweep=spr)
