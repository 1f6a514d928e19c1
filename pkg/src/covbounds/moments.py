"""Sample containers and one-pass mixed moments up to order four."""
from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

MAX_DEGREE = 4
DEFAULT_CHUNK = 8192


@dataclass(frozen=True)
class SampleMatrix:
    """A ``p x n`` matrix of i.i.d. observations, one column per sample.

    Parameters
    ----------
    data : array-like, shape (p, n)
        Rows are variables, columns are observations.
    column_names : sequence of str, optional
        Variable labels, one per row of ``data``.
    """

    data: np.ndarray
    column_names: tuple[str, ...] | None = None

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64, copy=True)
        if data.ndim == 1:
            data = data[np.newaxis, :]
        if data.ndim != 2:
            raise ValueError(f"sample must be a 2-d array, got shape {data.shape}")
        if data.shape[0] == 0:
            raise ValueError("sample has no variables")
        if data.shape[1] < 2:
            raise ValueError(f"sample needs n >= 2 observations, got n={data.shape[1]}")
        if not np.all(np.isfinite(data)):
            bad = np.argwhere(~np.isfinite(data))[0]
            raise ValueError(f"non-finite entry at variable {bad[0]}, observation {bad[1]}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if self.column_names is not None:
            names = tuple(str(c) for c in self.column_names)
            if len(names) != data.shape[0]:
                raise ValueError(
                    f"{len(names)} column names given for {data.shape[0]} variables")
            object.__setattr__(self, "column_names", names)

    @classmethod
    def from_observations(cls, rows, column_names=None) -> "SampleMatrix":
        """Build from an ``(n, p)`` array with one observation per row."""
        return cls(np.asarray(rows, dtype=np.float64).T, column_names)

    @property
    def p(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def names(self) -> tuple[str, ...]:
        if self.column_names is not None:
            return self.column_names
        return tuple(f"X{i}" for i in range(self.p))

    def shifted(self, shift) -> "SampleMatrix":
        """Return the sample translated by ``-shift`` (one value per variable)."""
        shift = np.asarray(shift, dtype=np.float64).reshape(-1, 1)
        return SampleMatrix(self.data - shift, self.column_names)


def _key(indices: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(int(i) for i in indices))


@dataclass
class MomentTable:
    """Raw sample means of products of variables, keyed by index multiset.

    Lookups are symmetric in index order: ``table[0, 1, 1]`` and
    ``table[1, 0, 1]`` address the same entry.  The empty multiset maps to 1.
    """

    n: int
    values: dict[tuple[int, ...], float] = field(default_factory=dict)

    def __getitem__(self, indices) -> float:
        if isinstance(indices, (int, np.integer)):
            indices = (indices,)
        key = _key(indices)
        if not key:
            return 1.0
        return self.values[key]

    def __contains__(self, indices) -> bool:
        key = _key(indices)
        return not key or key in self.values

    def __len__(self) -> int:
        return len(self.values)


def all_multisets(p: int, max_degree: int = MAX_DEGREE) -> list[tuple[int, ...]]:
    """Every non-empty multiset over ``range(p)`` of size at most ``max_degree``."""
    out = []
    for d in range(1, max_degree + 1):
        out.extend(combinations_with_replacement(range(p), d))
    return out


def compute_moments(sample: SampleMatrix, index_sets: Sequence[Sequence[int]] | None = None,
                    chunk_size: int = DEFAULT_CHUNK) -> MomentTable:
    """Compute ``(1/n) * sum_q prod_{t in S} X[t, q]`` for each multiset ``S``.

    All requested moments are accumulated in a single pass over blocks of
    columns. Within a block numpy's pairwise summation is used; block partial
    sums are combined with ``math.fsum``, so the accumulated rounding error
    does not grow with ``n``.

    Parameters
    ----------
    sample : SampleMatrix
    index_sets : sequence of index multisets, optional
        Zero-based variable indices, degree at most 4. Defaults to every
        multiset of degree <= 4 (what the covariance-of-covariance needs).
    chunk_size : int
        Number of columns processed per block.

    Returns
    -------
    MomentTable
    """
    if not isinstance(sample, SampleMatrix):
        sample = SampleMatrix(sample)
    p, n = sample.p, sample.n
    if n == 0:
        raise ValueError("empty sample")
    if index_sets is None:
        index_sets = all_multisets(p)

    keys = set()
    for s in index_sets:
        key = _key(s)
        if len(key) > MAX_DEGREE:
            raise ValueError(f"moment {key} has degree {len(key)} > {MAX_DEGREE}")
        if key and (key[0] < 0 or key[-1] >= p):
            raise ValueError(f"moment {key} references a variable outside 0..{p - 1}")
        if key:
            keys.add(key)

    by_degree: dict[int, list[tuple[int, ...]]] = {}
    for key in sorted(keys):
        by_degree.setdefault(len(key), []).append(key)
    index_arrays = {d: np.array(ks, dtype=np.intp) for d, ks in by_degree.items()}
    partials = {d: [] for d in by_degree}

    X = sample.data
    for start in range(0, n, chunk_size):
        block = X[:, start:start + chunk_size]
        for d, idx in index_arrays.items():
            prod = block[idx[:, 0]]
            for t in range(1, d):
                prod = prod * block[idx[:, t]]
            partials[d].append(prod.sum(axis=1))

    table = MomentTable(n=n)
    for d, ks in by_degree.items():
        sums = np.stack(partials[d], axis=0)
        for col, key in enumerate(ks):
            table.values[key] = math.fsum(sums[:, col]) / n
    return table


def moment_requirements(case_id: int) -> list[tuple[str, ...]]:
    """Moment multisets, in canonical letters, used by a case's zeta_1 form.

    The list is obtained by evaluating the closed form with a recording
    accessor, so it contains exactly the moments the formula touches.

    >>> moment_requirements(7)
    [('a',), ('a', 'a'), ('a', 'a', 'a'), ('a', 'a', 'a', 'a')]
    """
    from ._cases import FORMULAS

    if case_id not in FORMULAS:
        raise ValueError(f"case_id must be in 1..7, got {case_id}")
    seen = set()

    def record(*letters):
        seen.add(tuple(sorted(letters)))
        return 1.0

    FORMULAS[case_id](record)
    return sorted(seen, key=lambda k: (len(k), k))
