"""Tests for non-zero precision-matrix entries.

The proposed test rejects ``Theta_ij = 0`` when ``|Theta_hat_ij|`` exceeds
the L2 perturbation bound on ``Theta_hat - Theta``.  It makes no
distributional assumption beyond a finite covariance.  Not rejecting does not
imply conditional independence.

The Fisher-z test on partial correlations is included as the Gaussian
baseline.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import ndtr

from .errors import BoundVacuousError
from .moments import SampleMatrix
from .eigenbounds import epsilon_bound
from .precision import l2_threshold_from, precision_point
from .ustat import CovEstimate, cov_of_cov, estimate_covariance

METHODS = ("proposed", "fisher-z")


@dataclass(frozen=True)
class TestResult:
    """Outcome of one test of ``Theta_ij = 0``.

    ``reject_null`` is ``None`` when the proposed test is inconclusive
    (the bound is vacuous at this ``delta``).
    """

    __test__ = False  # not a pytest class

    entry: tuple[int, int]
    theta_hat_ij: float
    threshold: float | None
    reject_null: bool | None
    method: str
    delta: float
    p_value: float | None = None
    statistic: float | None = None
    reason: str | None = None

    @property
    def inconclusive(self) -> bool:
        return self.reject_null is None


def _check_pair(i, j, p):
    if i == j:
        raise ValueError("the test needs two distinct variables (i != j)")
    if not (0 <= i < p and 0 <= j < p):
        raise ValueError(f"indices ({i}, {j}) out of range for p={p}")


def _as_sample(sample):
    return sample if isinstance(sample, SampleMatrix) else SampleMatrix(sample)


@dataclass
class _Shared:
    theta: np.ndarray
    threshold: float | None
    reason: str | None


def _proposed_shared(cov: CovEstimate, delta: float, source: str = "eigenvalue") -> _Shared:
    theta = precision_point(cov.sigma_hat)
    eps = epsilon_bound(cov, delta, source=source).epsilon
    lam_min = float(np.linalg.eigvalsh(cov.sigma_hat)[0])
    try:
        return _Shared(theta, l2_threshold_from(lam_min, eps), None)
    except BoundVacuousError as exc:
        return _Shared(theta, None, f"test inconclusive (bound vacuous): {exc}")


def _decide(shared: _Shared, i: int, j: int, delta: float) -> TestResult:
    value = float(shared.theta[i, j])
    if shared.threshold is None:
        return TestResult((i, j), value, None, None, "proposed", delta, reason=shared.reason)
    return TestResult((i, j), value, shared.threshold,
                      bool(abs(value) > shared.threshold), "proposed", delta)


def test_entry(sample, i: int, j: int, delta: float = 0.05,
               cov: CovEstimate | None = None, source: str = "eigenvalue") -> TestResult:
    """Proposed test of ``Theta_ij = 0`` at level ``delta``.

    Steps: covariance estimate, its inverse, the largest eigenvalue of the
    covariance of the estimate, epsilon, the L2 threshold, and rejection when
    ``|Theta_hat_ij| > threshold``.  ``source="trace"`` makes the test more
    conservative.
    """
    sample = _as_sample(sample)
    _check_pair(i, j, sample.p)
    cov = cov_of_cov(sample) if cov is None else cov
    return _decide(_proposed_shared(cov, delta, source), i, j, delta)


def partial_correlation(theta) -> np.ndarray:
    """``-Theta_ij / sqrt(Theta_ii Theta_jj)`` with unit diagonal."""
    theta = np.asarray(theta, dtype=float)
    d = np.sqrt(np.diag(theta))
    r = -theta / np.outer(d, d)
    np.fill_diagonal(r, 1.0)
    return r


def _fisher(r: float, n: int, p: int, i: int, j: int, delta: float,
            theta_ij: float) -> TestResult:
    dof = n - (p - 2) - 3
    r = float(np.clip(r, -1 + 1e-15, 1 - 1e-15))
    z = float(np.arctanh(r) * np.sqrt(dof))
    p_value = float(2.0 * ndtr(-abs(z)))
    return TestResult((i, j), theta_ij, None, bool(p_value < delta), "fisher-z", delta,
                      p_value=p_value, statistic=z)


def fisher_z_test(sample, i: int, j: int, delta: float = 0.05) -> TestResult:
    """Fisher-z test of zero partial correlation between variables ``i`` and ``j``.

    ``z = atanh(r) * sqrt(n - (p - 2) - 3)`` with the remaining ``p - 2``
    variables as the conditioning set, compared to a standard normal
    (two-sided).
    """
    sample = _as_sample(sample)
    n, p = sample.n, sample.p
    _check_pair(i, j, p)
    if n <= p + 1:
        raise ValueError(f"Fisher-z needs n > p + 1, got n={n}, p={p}")
    theta = precision_point(estimate_covariance(sample))
    r = partial_correlation(theta)[i, j]
    return _fisher(r, n, p, i, j, delta, float(theta[i, j]))


@dataclass
class PairwiseTests:
    """All-pairs test results and the implied dependence graph."""

    results: list[TestResult]
    adjacency: np.ndarray
    method: str
    delta: float
    delta_per_test: float

    def matrix(self) -> np.ndarray:
        """Object array with the result for ``(i, j)`` at both ``[i, j]`` and ``[j, i]``."""
        p = self.adjacency.shape[0]
        out = np.empty((p, p), dtype=object)
        for r in self.results:
            i, j = r.entry
            out[i, j] = out[j, i] = r
        return out

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [r.entry for r in self.results if r.reject_null]

    @property
    def all_inconclusive(self) -> bool:
        return bool(self.results) and all(r.inconclusive for r in self.results)


def test_all_pairs(sample, delta: float = 0.05, method: str = "proposed",
                   bonferroni: bool = False, cov: CovEstimate | None = None,
                   n_jobs: int = 1, source: str = "eigenvalue") -> PairwiseTests:
    """Test every ``i < j`` pair from one shared estimation phase.

    With ``bonferroni=True`` each test runs at ``delta / (p (p - 1) / 2)``.
    ``n_jobs > 1`` fans the per-pair decisions out over threads; the output
    order and values do not depend on it.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    sample = _as_sample(sample)
    p, n = sample.p, sample.n
    pairs = list(combinations(range(p), 2))
    level = delta / len(pairs) if (bonferroni and pairs) else delta

    if method == "proposed":
        cov = cov_of_cov(sample) if cov is None else cov
        shared = _proposed_shared(cov, level, source)

        def one(pair):
            return _decide(shared, pair[0], pair[1], level)
    else:
        if n <= p + 1:
            raise ValueError(f"Fisher-z needs n > p + 1, got n={n}, p={p}")
        sigma = cov.sigma_hat if cov is not None else estimate_covariance(sample)
        theta = precision_point(sigma)
        r = partial_correlation(theta)

        def one(pair):
            i, j = pair
            return _fisher(r[i, j], n, p, i, j, level, float(theta[i, j]))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(pair) for pair in pairs]

    adjacency = np.zeros((p, p), dtype=bool)
    for res in results:
        if res.reject_null:
            i, j = res.entry
            adjacency[i, j] = adjacency[j, i] = True
    return PairwiseTests(results, adjacency, method, delta, level)


# keep pytest from collecting these when imported into test modules
test_entry.__test__ = False
test_all_pairs.__test__ = False
