"""Confidence intervals on the eigenvalues and eigenvector entries of a covariance.

Array layout follows ``numpy.linalg.eigh``: in every ``(p, p)`` eigenvector
array the entry ``[j, i]`` is component ``j`` of eigenvector ``i``, so column
``i`` is the ``i``-th eigenvector.  Eigenvalues are sorted in descending
order and eigenvector columns follow that order.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtri

from .interval import Interval, IntervalMatrix
from .ustat import CovEstimate

SOURCES = ("eigenvalue", "trace")


def normal_quantile(prob: float) -> float:
    """Inverse standard normal CDF."""
    return float(ndtri(prob))


@dataclass(frozen=True)
class PerturbationBound:
    """``epsilon`` such that ``||Sigma - Sigma_hat||_2 <= epsilon`` w.p. ``1 - delta``.

    ``spread`` is the quantity under the square root: the largest eigenvalue
    of ``Cov(Sigma_hat)`` or its trace, depending on ``source``.
    """

    epsilon: float
    delta: float
    source: str
    spread: float


def epsilon_from_spread(spread: float, delta: float) -> float:
    return float(np.sqrt(2.0 * max(spread, 0.0)) * normal_quantile(1.0 - delta / 2.0))


def epsilon_bound(cov, delta: float, source: str = "eigenvalue") -> PerturbationBound:
    """Spectral-norm perturbation bound of the covariance estimate.

    Parameters
    ----------
    cov : CovEstimate or ndarray
        The estimate, or directly the ``(q, q)`` covariance of its entries.
    delta : float
        Miscoverage level in (0, 1).
    source : {"eigenvalue", "trace"}
        Use the largest eigenvalue of ``Cov(Sigma_hat)`` (tighter) or its trace.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if source not in SOURCES:
        raise ValueError(f"source must be one of {SOURCES}, got {source!r}")
    C = cov.cov_of_cov if isinstance(cov, CovEstimate) else np.asarray(cov, dtype=float)
    if source == "eigenvalue":
        spread = float(np.linalg.eigvalsh(C)[-1])
    else:
        spread = float(np.trace(C))
    spread = max(spread, 0.0)
    return PerturbationBound(epsilon_from_spread(spread, delta), delta, source, spread)


def sorted_eigh(a):
    """Eigenvalues in descending order with matching eigenvector columns."""
    w, v = np.linalg.eigh(a)
    return w[::-1].copy(), v[:, ::-1].copy()


def eigenvalue_intervals(sigma_hat, epsilon: float) -> list[Interval]:
    """Weyl intervals ``[lambda_k - eps, lambda_k + eps]``, descending."""
    lam = np.linalg.eigvalsh(np.asarray(sigma_hat, dtype=float))[::-1]
    return [Interval(x - epsilon, x + epsilon) for x in lam]


def inverse_eigenvalue_interval(lambda_hat: float, epsilon: float) -> Interval:
    """Interval for ``1 / lambda`` given ``|lambda - lambda_hat| <= epsilon``.

    The upper endpoint is ``inf`` unless ``lambda_hat > epsilon``.
    """
    if lambda_hat <= -epsilon or (epsilon == 0 and lambda_hat == 0):
        raise ValueError(
            f"lambda_hat={lambda_hat} <= -epsilon={-epsilon}: not positive definite "
            "at this confidence level")
    lo = 1.0 / (lambda_hat + epsilon)
    hi = 1.0 / (lambda_hat - epsilon) if lambda_hat > epsilon else np.inf
    return Interval(lo, hi)


def minor_spectra(sigma_hat) -> np.ndarray:
    """Row ``j`` holds the descending eigenvalues of ``sigma_hat`` without row/column ``j``."""
    a = np.asarray(sigma_hat, dtype=float)
    p = a.shape[0]
    out = np.empty((p, max(p - 1, 0)))
    for j in range(p):
        keep = np.r_[0:j, j + 1:p]
        out[j] = np.linalg.eigvalsh(a[np.ix_(keep, keep)])[::-1]
    return out


def eigenvector_sq_bounds(sigma_hat, epsilon: float, lam=None, minors=None):
    """Bounds on squared eigenvector entries from the eigenvalue-eigenvector identity.

    For eigenvector ``i`` and component ``j`` the identity

        |V_ji|^2 prod_{k != i} (lam_i - lam_k) = prod_k (lam_i - mu_jk),

    with ``mu_j`` the spectrum of the minor without row/column ``j``, is
    bounded with every eigenvalue known to within ``epsilon``.  Gaps that
    cannot be separated from zero (``<= 2 eps``) give the trivial bound.

    Returns
    -------
    upper, lower : ndarray, shape (p, p)
        Entry ``[j, i]`` bounds ``|V_ji|^2``; both lie in [0, 1].
    """
    a = np.asarray(sigma_hat, dtype=float)
    p = a.shape[0]
    if lam is None:
        lam = np.linalg.eigvalsh(a)[::-1]
    if minors is None:
        minors = minor_spectra(a)
    two_eps = 2.0 * epsilon
    upper = np.ones((p, p))
    lower = np.zeros((p, p))
    for i in range(p):
        gaps = np.abs(lam[i] - np.delete(lam, i))
        separated = not np.any(gaps <= two_eps)
        for j in range(p):
            mgaps = np.abs(lam[i] - minors[j])
            if separated:
                upper[j, i] = min(np.prod(mgaps + two_eps) / np.prod(gaps - two_eps), 1.0)
            if not np.any(mgaps <= two_eps):
                num = np.prod(np.maximum(mgaps - two_eps, 0.0))
                lower[j, i] = min(max(num / np.prod(gaps + two_eps), 0.0), 1.0)
    return upper, lower


def signed_bounds(sq_lower, sq_upper, v_hat):
    """Signed eigenvector intervals from squared ones.

    A positive squared lower bound fixes the sign of the entry to that of the
    empirical eigenvector; otherwise the interval is symmetric about zero.

    Returns
    -------
    lo, hi : ndarray
    sign_known : ndarray of bool
    """
    sq_lower = np.asarray(sq_lower, dtype=float)
    sq_upper = np.asarray(sq_upper, dtype=float)
    sign = np.where(np.asarray(v_hat) < 0, -1.0, 1.0)
    known = sq_lower > 0
    r_lo, r_hi = np.sqrt(sq_lower), np.sqrt(sq_upper)
    lo = np.where(known, np.where(sign > 0, r_lo, -r_hi), -r_hi)
    hi = np.where(known, np.where(sign > 0, r_hi, -r_lo), r_hi)
    return lo, hi, known


@dataclass
class TighteningReport:
    applied: bool = False
    iterations: int = 0
    converged: bool = False
    inconsistent: int = 0
    max_change: float = 0.0


@dataclass
class EigenBounds:
    """Eigenvalue and eigenvector confidence intervals for one covariance estimate.

    Attributes
    ----------
    eigenvalues : ndarray, shape (p,)
        Descending eigenvalues of ``sigma_hat``.
    eigenvectors : ndarray, shape (p, p)
        Matching empirical eigenvectors (columns).
    epsilon : float
    sq_lower, sq_upper : ndarray, shape (p, p)
        Bounds on ``|V|^2``, entry ``[j, i]`` for component ``j`` of eigenvector ``i``.
    lower, upper : ndarray, shape (p, p)
        Signed bounds on ``V`` aligned with the empirical signs.
    sign_known : ndarray of bool
    minors_spectra : ndarray, shape (p, p - 1)
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    epsilon: float
    sq_lower: np.ndarray
    sq_upper: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    sign_known: np.ndarray
    minors_spectra: np.ndarray
    tightening: TighteningReport = field(default_factory=TighteningReport)

    @property
    def p(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def eigenvalue_intervals(self) -> list[Interval]:
        return [Interval(x - self.epsilon, x + self.epsilon) for x in self.eigenvalues]

    @property
    def evec_sq(self) -> IntervalMatrix:
        return IntervalMatrix(self.sq_lower, self.sq_upper)

    @property
    def evec_signed(self) -> IntervalMatrix:
        return IntervalMatrix(self.lower, self.upper)

    def inverse_eigenvalue_intervals(self) -> list[Interval]:
        return [inverse_eigenvalue_interval(x, self.epsilon) for x in self.eigenvalues]


def eigen_bounds(sigma_hat, epsilon: float, tighten: bool = False,
                 max_iters: int = 100, tol: float = 1e-10) -> EigenBounds:
    """Eigenvalue intervals plus squared and signed eigenvector-entry intervals."""
    a = np.asarray(sigma_hat, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"sigma_hat must be square, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=1e-10, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("sigma_hat must be symmetric")
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    a = (a + a.T) / 2
    lam, vec = sorted_eigh(a)
    minors = minor_spectra(a)
    up, lo = eigenvector_sq_bounds(a, epsilon, lam=lam, minors=minors)
    s_lo, s_hi, known = signed_bounds(lo, up, vec)
    bounds = EigenBounds(lam, vec, float(epsilon), lo, up, s_lo, s_hi, known, minors)
    if tighten:
        bounds = tighten_orthonormal(bounds, max_iters=max_iters, tol=tol)
    return bounds


# --- orthonormality tightening -------------------------------------------

_SLACK = 1e-12


def _norm_step(lo, hi):
    """Unit-norm constraint along axis 0: ``1 - sum_{k!=j} hi_k <= x_j <= 1 - sum_{k!=j} lo_k``."""
    new_lo = 1.0 - (hi.sum(axis=0, keepdims=True) - hi)
    new_hi = 1.0 - (lo.sum(axis=0, keepdims=True) - lo)
    return np.maximum(lo, new_lo), np.minimum(hi, new_hi)


def _pair_sums(lo, hi):
    """Bounds on ``sum_{k != l} Q_ki Q_kj`` for every ``(l, i, j)``.

    Returns ``mu, nu`` of shape ``(p, p, p)`` indexed ``[l, i, j]``.
    """
    a_lo, a_hi = lo[:, :, None], hi[:, :, None]
    b_lo, b_hi = lo[:, None, :], hi[:, None, :]
    prods = np.stack([a_lo * b_lo, a_lo * b_hi, a_hi * b_lo, a_hi * b_hi])
    p_lo, p_hi = prods.min(axis=0), prods.max(axis=0)          # [k, i, j]
    mu = p_lo.sum(axis=0, keepdims=True) - p_lo
    nu = p_hi.sum(axis=0, keepdims=True) - p_hi
    return mu, nu


def _orthogonality_step(lo, hi):
    """One simultaneous pass of the orthogonality updates over the columns of Q.

    For columns ``i != j`` and row ``l``, ``Q_li Q_lj`` must lie in
    ``[-nu, -mu]``.  With ``Q_lj`` in ``[b, a]`` this yields bounds on
    ``Q_li`` whose form depends on the signs of ``a`` and ``b``.
    """
    p = lo.shape[0]
    mu, nu = _pair_sums(lo, hi)
    x_lo = np.broadcast_to(lo[:, :, None], (p, p, p))   # Q_li, broadcast over j
    x_hi = np.broadcast_to(hi[:, :, None], (p, p, p))
    b = np.broadcast_to(lo[:, None, :], (p, p, p))      # Q_lj bounds
    a = np.broadcast_to(hi[:, None, :], (p, p, p))
    cand_lo = np.full((p, p, p), -np.inf)
    cand_hi = np.full((p, p, p), np.inf)

    with np.errstate(divide="ignore", invalid="ignore"):
        m_a, m_b, n_a, n_b = -mu / a, -mu / b, -nu / a, -nu / b

        neg = a < 0                                      # Q_lj entirely negative
        cand_lo = np.where(neg, np.minimum(m_a, m_b), cand_lo)
        cand_hi = np.where(neg, np.maximum(n_a, n_b), cand_hi)

        pos = b > 0                                      # Q_lj entirely positive
        cand_lo = np.where(pos, np.minimum(n_a, n_b), cand_lo)
        cand_hi = np.where(pos, np.maximum(m_a, m_b), cand_hi)

        # Q_lj straddles zero: x >= 0 needs x >= max(-mu/b, -nu/a);
        # x < 0 needs x <= min(-mu/a, -nu/b).  Keep the hull of what is left.
        mixed = (a > 0) & (b < 0)
        right_lo = np.maximum(np.maximum(m_b, n_a), np.maximum(x_lo, 0.0))
        right_ok = right_lo <= x_hi
        left_hi = np.minimum(np.minimum(m_a, n_b), np.minimum(x_hi, 0.0))
        left_ok = x_lo <= left_hi
        mix_lo = np.where(left_ok, x_lo, np.where(right_ok, right_lo, np.inf))
        mix_hi = np.where(right_ok, x_hi, np.where(left_ok, left_hi, -np.inf))
        cand_lo = np.where(mixed, mix_lo, cand_lo)
        cand_hi = np.where(mixed, mix_hi, cand_hi)

        # one endpoint exactly zero
        b_zero = (b == 0) & (a > 0)
        cand_lo = np.where(b_zero & (nu < 0), n_a, cand_lo)
        cand_hi = np.where(b_zero & (mu > 0), m_a, cand_hi)
        a_zero = (a == 0) & (b < 0)
        cand_lo = np.where(a_zero & (mu > 0), m_b, cand_lo)
        cand_hi = np.where(a_zero & (nu < 0), n_b, cand_hi)

    # a candidate from column j == i is meaningless
    eye = np.eye(p, dtype=bool)[None, :, :]
    cand_lo = np.where(eye, -np.inf, np.nan_to_num(cand_lo, nan=-np.inf))
    cand_hi = np.where(eye, np.inf, np.nan_to_num(cand_hi, nan=np.inf))
    return np.maximum(lo, cand_lo.max(axis=2)), np.minimum(hi, cand_hi.min(axis=2))


def _sq_from_signed(lo, hi):
    a, b = lo ** 2, hi ** 2
    sq_hi = np.maximum(a, b)
    sq_lo = np.where((lo > 0) | (hi < 0), np.minimum(a, b), 0.0)
    return sq_lo, sq_hi


def _signed_from_sq(lo, hi, sq_lo, sq_hi, v_hat):
    r_lo, r_hi = np.sqrt(np.clip(sq_lo, 0, 1)), np.sqrt(np.clip(sq_hi, 0, 1))
    new_lo = np.maximum(lo, -r_hi)
    new_hi = np.minimum(hi, r_hi)
    # with a positive squared lower bound the entry keeps away from zero, on the
    # side the interval already occupies or, if it straddles zero, that of v_hat
    side = np.where(new_lo >= 0, 1, np.where(new_hi <= 0, -1, np.where(v_hat >= 0, 1, -1)))
    away = sq_lo > 0
    new_lo = np.where(away & (side > 0), np.maximum(new_lo, r_lo), new_lo)
    new_hi = np.where(away & (side < 0), np.minimum(new_hi, -r_lo), new_hi)
    return new_lo, new_hi


class _Guard:
    """Applies an update entrywise, reverting entries that become empty."""

    def __init__(self):
        self.inconsistent = 0

    def __call__(self, old_lo, old_hi, new_lo, new_hi):
        bad = new_lo > new_hi + _SLACK
        self.inconsistent += int(bad.sum())
        tiny = (new_lo > new_hi) & ~bad
        mid = 0.5 * (new_lo + new_hi)
        new_lo = np.where(tiny, mid, new_lo)
        new_hi = np.where(tiny, mid, new_hi)
        return np.where(bad, old_lo, new_lo), np.where(bad, old_hi, new_hi)


def _sweep(state, v_hat, guard):
    sq_lo, sq_hi, lo, hi = state

    # unit norm of every column and every row of an orthogonal matrix
    sq_lo, sq_hi = guard(sq_lo, sq_hi, *_norm_step(sq_lo, sq_hi))
    t_lo, t_hi = _norm_step(sq_lo.T, sq_hi.T)
    sq_lo, sq_hi = guard(sq_lo, sq_hi, t_lo.T, t_hi.T)

    lo, hi = guard(lo, hi, *_signed_from_sq(lo, hi, sq_lo, sq_hi, v_hat))

    # orthogonality of columns, then of rows
    lo, hi = guard(lo, hi, *_orthogonality_step(lo, hi))
    t_lo, t_hi = _orthogonality_step(lo.T, hi.T)
    lo, hi = guard(lo, hi, t_lo.T, t_hi.T)

    n_lo, n_hi = _sq_from_signed(lo, hi)
    sq_lo, sq_hi = guard(sq_lo, sq_hi, np.maximum(sq_lo, n_lo), np.minimum(sq_hi, n_hi))
    return sq_lo, sq_hi, lo, hi


def tighten_orthonormal(bounds: EigenBounds, max_iters: int = 100,
                        tol: float = 1e-10) -> EigenBounds:
    """Tighten eigenvector intervals with the orthonormality of the eigenvectors.

    Each sweep applies the unit-norm constraint to the squared bounds, moves
    the result into the signed bounds, applies the pairwise orthogonality
    constraints to the signed bounds and moves those back.  Sweeps repeat
    until no endpoint moves by more than ``tol`` or ``max_iters`` is reached.
    Updates only ever intersect, so no interval widens.  An update that would
    leave an interval empty means the bounds are already inconsistent; it is
    discarded for that entry and counted in ``tightening.inconsistent``.
    """
    guard = _Guard()
    state = (bounds.sq_lower.copy(), bounds.sq_upper.copy(),
             bounds.lower.copy(), bounds.upper.copy())
    v_hat = bounds.eigenvectors
    iterations, change, converged = 0, 0.0, False
    for iterations in range(1, max_iters + 1):
        new = _sweep(state, v_hat, guard)
        change = max(float(np.max(np.abs(n - o))) for n, o in zip(new, state))
        state = new
        if change < tol:
            converged = True
            break
    sq_lo, sq_hi, lo, hi = state
    known = (lo > 0) | (hi < 0)
    report = TighteningReport(applied=True, iterations=iterations, converged=converged,
                              inconsistent=guard.inconsistent, max_change=change)
    return replace(bounds, sq_lower=sq_lo, sq_upper=sq_hi, lower=lo, upper=hi,
                   sign_known=known, tightening=report)
