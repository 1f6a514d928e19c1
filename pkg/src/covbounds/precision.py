"""Point estimate and confidence intervals for the precision matrix.

Two routes are provided.  The eigen route pushes the eigenvalue and
eigenvector intervals through ``Theta_ij = sum_k V_ik / lambda_k V_jk`` with
interval arithmetic.  The L2 route bounds ``||Theta_hat - Theta||_2`` by a
matrix-inverse perturbation bound; since no entry of a matrix exceeds its
spectral norm, ``Theta_hat_ij +/- t`` is an interval for every entry.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .eigenbounds import EigenBounds, epsilon_bound, inverse_eigenvalue_interval
from .errors import BoundVacuousError, DomainError
from .interval import IntervalMatrix, mul_bounds
from .ustat import CovEstimate

NEAR_SINGULAR = 1e-12
ROUTES = ("eigen", "l2", "both")


def precision_point(sigma_hat) -> np.ndarray:
    """``inv(sigma_hat)`` through a Cholesky factorisation, symmetrised."""
    a = np.asarray(sigma_hat, dtype=float)
    a = (a + a.T) / 2
    w = np.linalg.eigvalsh(a)
    lam_min, lam_max = w[0], w[-1]
    if lam_max <= 0 or lam_min <= NEAR_SINGULAR * lam_max:
        raise DomainError(
            f"covariance estimate is singular or not positive definite "
            f"(lambda_min={lam_min:.3g}, lambda_max={lam_max:.3g}); "
            "consider whitening the data or collecting more samples")
    try:
        factor = scipy.linalg.cho_factor(a, lower=True)
    except np.linalg.LinAlgError as exc:
        raise DomainError(f"Cholesky factorisation failed (lambda_min={lam_min:.3g})") from exc
    theta = scipy.linalg.cho_solve(factor, np.eye(a.shape[0]))
    return (theta + theta.T) / 2


def precision_intervals_eigen(bounds: EigenBounds) -> IntervalMatrix:
    """Entrywise precision intervals from the eigendecomposition bounds.

    Off-diagonal terms multiply the signed eigenvector intervals; diagonal
    terms use the squared-entry intervals directly, which is never wider.
    Eigenvalues whose interval reaches zero make the affected entries
    unbounded (infinite endpoints).
    """
    p = bounds.p
    lo = np.zeros((p, p))
    hi = np.zeros((p, p))
    diag = np.eye(p, dtype=bool)
    for k in range(p):
        inv = inverse_eigenvalue_interval(bounds.eigenvalues[k], bounds.epsilon)
        v_lo, v_hi = bounds.lower[:, k], bounds.upper[:, k]
        vv_lo, vv_hi = mul_bounds(v_lo[:, None], v_hi[:, None], v_lo[None, :], v_hi[None, :])
        vv_lo = np.where(diag, bounds.sq_lower[:, k][:, None], vv_lo)
        vv_hi = np.where(diag, bounds.sq_upper[:, k][:, None], vv_hi)
        t_lo, t_hi = mul_bounds(vv_lo, vv_hi, inv.lo, inv.hi)
        lo += t_lo
        hi += t_hi
    return IntervalMatrix(lo, hi)


def l2_threshold_from(lambda_min: float, epsilon: float) -> float:
    """``eps / (lambda_min (lambda_min - eps))``; requires ``lambda_min > eps``."""
    if not lambda_min > epsilon:
        raise BoundVacuousError(
            f"insufficient samples for bound at this delta: lambda_min(Sigma_hat)="
            f"{lambda_min:.4g} <= epsilon={epsilon:.4g}")
    return epsilon / (lambda_min * (lambda_min - epsilon))


def precision_l2_threshold(sigma_hat, cov: CovEstimate, delta: float,
                           source: str = "eigenvalue") -> float:
    """Bound on ``||Theta_hat - Theta||_2`` at nominal level ``1 - delta``.

    ``source="trace"`` gives a larger, more conservative epsilon; the
    eigenvalue source can under-cover when ``Sigma`` is close to isotropic.
    """
    eps = epsilon_bound(cov, delta, source=source).epsilon
    lam_min = float(np.linalg.eigvalsh(np.asarray(sigma_hat, dtype=float))[0])
    return l2_threshold_from(lam_min, eps)


def l2_intervals(theta_hat, threshold: float) -> IntervalMatrix:
    return IntervalMatrix(theta_hat - threshold, theta_hat + threshold)


@dataclass
class PrecisionReport:
    """Precision point estimate with intervals from one or both routes.

    ``l2_threshold`` is ``None`` (and ``vacuous_reason`` set) when the L2
    bound does not exist at this ``delta``.
    """

    theta_hat: np.ndarray
    delta: float
    epsilon: float
    entry_intervals_eigen: IntervalMatrix | None = None
    l2_threshold: float | None = None
    vacuous_reason: str | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def entry_intervals_l2(self) -> IntervalMatrix | None:
        if self.l2_threshold is None:
            return None
        return l2_intervals(self.theta_hat, self.l2_threshold)


def precision_report(cov: CovEstimate, delta: float, route: str = "both",
                     bounds: EigenBounds | None = None,
                     source: str = "eigenvalue") -> PrecisionReport:
    """Run the requested precision routes on one covariance estimate.

    ``bounds`` are the eigendecomposition bounds for the eigen route; they
    should have been built with the ``source`` epsilon at this ``delta`` for
    the two routes to share a confidence level.
    """
    if route not in ROUTES:
        raise ValueError(f"route must be one of {ROUTES}, got {route!r}")
    sigma = cov.sigma_hat
    theta = precision_point(sigma)
    eps = epsilon_bound(cov, delta, source=source).epsilon
    w = np.linalg.eigvalsh(sigma)
    report = PrecisionReport(theta_hat=theta, delta=delta, epsilon=eps)
    report.diagnostics = {
        "epsilon_source": source,
        "lambda_min": float(w[0]),
        "lambda_min_margin": float(w[0] - eps),
        "clamped": cov.clamped,
        "unbounded_entries": 0,
    }
    if route in ("eigen", "both"):
        if bounds is None:
            from .eigenbounds import eigen_bounds
            bounds = eigen_bounds(sigma, eps, tighten=True)
        iv = precision_intervals_eigen(bounds)
        report.entry_intervals_eigen = iv
        report.diagnostics["unbounded_entries"] = int(iv.unbounded().sum())
    if route in ("l2", "both"):
        try:
            report.l2_threshold = l2_threshold_from(float(w[0]), eps)
        except BoundVacuousError as exc:
            report.vacuous_reason = str(exc)
    return report
