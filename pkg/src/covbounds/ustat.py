"""Unbiased covariance estimation and the covariance of its entries.

The covariance between two entries of the unbiased covariance estimator is
the U-statistic variance formula truncated at first order,

    Cov(S_ij, S_kl) ~= 2 (n - 2) / C(n, 2) * zeta_1(i, j, k, l),

where ``zeta_1`` is one of seven closed forms selected by the pattern of
equal indices in ``(i, j, k, l)``.  The O(n^-2) remainder is not computed.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._cases import FORMULAS, PATTERNS
from .moments import MomentTable, SampleMatrix, all_multisets, compute_moments

FIRST_ORDER_NOTE = (
    "Cov(Sigma_hat) keeps only the leading 2(n-2)/C(n,2)*zeta_1 term; "
    "the O(n^-2) remainder is dropped."
)

# candidate cases for each sorted multiplicity signature of (i, j, k, l)
_CANDIDATES = {
    (1, 1, 1, 1): (1,),
    (2, 2): (2, 5),
    (2, 1, 1): (3, 4),
    (3, 1): (6,),
    (4,): (7,),
}


def _symmetries(i, j, k, l):
    """The eight index orders with the same covariance as Cov(S_ij, S_kl)."""
    for a, b in ((i, j), (j, i)):
        for c, d in ((k, l), (l, k)):
            yield (a, b, c, d)
            yield (c, d, a, b)


def _first_occurrence_pattern(idx):
    letters = "abcd"
    seen = {}
    out = []
    for pos, v in enumerate(idx):
        if v not in seen:
            seen[v] = letters[pos]
        out.append(seen[v])
    return "".join(out)


@dataclass(frozen=True)
class CaseAssignment:
    """Which closed form applies to ``Cov(S_ij, S_kl)`` and how to instantiate it.

    ``substitution`` maps each canonical letter of the case pattern to a
    concrete variable index.
    """

    case_id: int
    substitution: dict = field(hash=False)

    @property
    def pattern(self) -> str:
        return PATTERNS[self.case_id]

    def indices(self) -> tuple[int, ...]:
        """The representative ``(i, j, k, l)`` this assignment stands for."""
        return tuple(self.substitution[c] for c in self.pattern)


@lru_cache(maxsize=None)
def _classify(i, j, k, l):
    signature = tuple(sorted(Counter((i, j, k, l)).values(), reverse=True))
    for case_id in _CANDIDATES[signature]:
        for image in _symmetries(i, j, k, l):
            if _first_occurrence_pattern(image) == PATTERNS[case_id]:
                sub = {}
                for letter, v in zip(PATTERNS[case_id], image):
                    sub.setdefault(letter, v)
                return case_id, tuple(sorted(sub.items()))
    raise AssertionError(f"no case matches {(i, j, k, l)}")  # pragma: no cover


def classify_case(i: int, j: int, k: int, l: int) -> CaseAssignment:
    """Reduce ``Cov(S_ij, S_kl)`` to one of the seven canonical cases.

    Variables are first grouped by their number of occurrences, which leaves
    at most two candidate cases.  The ambiguity is resolved by searching the
    eight symmetry images of the index tuple for one whose relabelled form
    equals a candidate's canonical pattern.
    """
    case_id, sub = _classify(int(i), int(j), int(k), int(l))
    return CaseAssignment(case_id, dict(sub))


def zeta1(case: CaseAssignment, moments: MomentTable) -> float:
    """Plug-in estimate of zeta_1 for one covariance entry."""
    sub = case.substitution

    def E(*letters):
        try:
            return moments[tuple(sub[c] for c in letters)]
        except KeyError as exc:
            raise RuntimeError(
                f"moment table lacks {exc.args[0]} needed by case {case.case_id}") from None

    return FORMULAS[case.case_id](E)


def estimate_covariance(sample: SampleMatrix) -> np.ndarray:
    """Unbiased sample covariance with the ``1/(n-1)`` normalisation."""
    if not isinstance(sample, SampleMatrix):
        sample = SampleMatrix(sample)
    n = sample.n
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    centred = sample.data - sample.data.mean(axis=1, keepdims=True)
    sigma = centred @ centred.T / (n - 1)
    return (sigma + sigma.T) / 2


def upper_pairs(p: int) -> list[tuple[int, int]]:
    """Row-major list of ``(i, j)`` with ``i <= j``; the order of U(A)."""
    return [(i, j) for i in range(p) for j in range(i, p)]


def upper(a) -> np.ndarray:
    """Upper triangle (diagonal included) of a square matrix as a vector."""
    a = np.asarray(a)
    return a[np.triu_indices(a.shape[0])]


@dataclass
class CovEstimate:
    """Covariance estimate together with the covariance of its entries.

    Attributes
    ----------
    sigma_hat : ndarray, shape (p, p)
    cov_of_cov : ndarray, shape (q, q)
        Indexed by ``pairs``; ``q = p (p + 1) / 2``.
    n : int
    pairs : list of (int, int)
    clamped : int
        Number of diagonal entries of ``cov_of_cov`` that came out negative
        and were set to zero.
    """

    sigma_hat: np.ndarray
    cov_of_cov: np.ndarray
    n: int
    pairs: list
    clamped: int = 0
    notes: tuple = (FIRST_ORDER_NOTE,)

    @property
    def p(self) -> int:
        return self.sigma_hat.shape[0]

    @property
    def pair_index(self) -> dict:
        return {pair: r for r, pair in enumerate(self.pairs)}

    def entry(self, i, j, k, l) -> float:
        """``Cov(S_ij, S_kl)`` for any index order."""
        idx = self.pair_index
        return self.cov_of_cov[idx[(min(i, j), max(i, j))], idx[(min(k, l), max(k, l))]]

    def lambda_max(self) -> float:
        return float(np.linalg.eigvalsh(self.cov_of_cov)[-1])

    def trace(self) -> float:
        return float(np.trace(self.cov_of_cov))


def leading_coefficient(n: int) -> float:
    """``2 (n - 2) / C(n, 2)``, the weight of zeta_1 in the covariance."""
    return 2.0 * (n - 2) / (n * (n - 1) / 2.0)


def zeta1_matrix(moments: MomentTable, p: int) -> np.ndarray:
    """All plug-in zeta_1 values, arranged like ``cov_of_cov``."""
    pairs = upper_pairs(p)
    q = len(pairs)
    Z = np.empty((q, q))
    for r, (i, j) in enumerate(pairs):
        for s in range(r, q):
            k, l = pairs[s]
            Z[r, s] = Z[s, r] = zeta1(classify_case(i, j, k, l), moments)
    return Z


def cov_of_cov_from_moments(moments: MomentTable, p: int, n: int | None = None):
    """Assemble ``Cov(S)`` from a moment table.

    ``n`` sets the sample size the covariance is reported for; it defaults to
    the size the moments were computed from.  Passing a larger calibration
    sample's moments with a smaller ``n`` gives the predicted covariance of
    estimates made from samples of size ``n``.

    Returns
    -------
    cov : ndarray, shape (q, q)
    clamped : int
    """
    n = moments.n if n is None else n
    if n < 3:
        raise ValueError(f"need n >= 3 for a positive leading coefficient, got {n}")
    cov = leading_coefficient(n) * zeta1_matrix(moments, p)
    diag = np.diagonal(cov)
    negative = diag < 0
    clamped = int(negative.sum())
    if clamped:
        cov[np.flatnonzero(negative), np.flatnonzero(negative)] = 0.0
    return cov, clamped


def cov_of_cov(sample: SampleMatrix, center: bool = True) -> CovEstimate:
    """Estimate the covariance and the covariance of its upper-triangular entries.

    Parameters
    ----------
    sample : SampleMatrix
    center : bool
        Translate each variable by its sample mean before collecting raw
        moments.  Every closed form is translation invariant, so this only
        changes floating-point cancellation, not the estimate.
    """
    if not isinstance(sample, SampleMatrix):
        sample = SampleMatrix(sample)
    if sample.n < 3:
        raise ValueError(f"need n >= 3, got n={sample.n}")
    sigma = estimate_covariance(sample)
    work = sample.shifted(sample.data.mean(axis=1)) if center else sample
    moments = compute_moments(work, all_multisets(sample.p))
    cov, clamped = cov_of_cov_from_moments(moments, sample.p, sample.n)
    return CovEstimate(sigma_hat=sigma, cov_of_cov=cov, n=sample.n,
                       pairs=upper_pairs(sample.p), clamped=clamped)
