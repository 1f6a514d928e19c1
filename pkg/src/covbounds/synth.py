"""Synthetic ground truth: sparse random precision matrices and samplers.

Randomness comes from numpy's ``PCG64`` bit generator.  A seed maps to a
stream through ``numpy.random.SeedSequence``; independent streams for
replicates are derived with :func:`spawn_seeds`, which uses
``SeedSequence.spawn`` and is stable across platforms.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError
from .moments import SampleMatrix

ZERO_TOL = 1e-9
DISTRIBUTIONS = ("gaussian", "laplace")


def make_rng(seed) -> np.random.Generator:
    """A ``PCG64`` generator from an int, ``SeedSequence`` or existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_seeds(seed: int, count: int) -> list[np.random.SeedSequence]:
    """``count`` independent child seeds of ``seed`` (deterministic)."""
    return np.random.SeedSequence(seed).spawn(count)


def _symmetric_adjacency(rng, p, t):
    upper = np.triu(rng.random((p, p)) < t, k=1)
    return (upper | upper.T).astype(float)


def _symmetric_uniform(rng, p):
    r = np.triu(rng.random((p, p)))
    return r + np.triu(r, k=1).T


def random_precision(p: int, c: float = 1.0, seed=None, max_tries: int = 1000) -> np.ndarray:
    """Random sparse precision matrix with smallest eigenvalue at least 1.

    Draw ``t ~ U(0, 1)`` and a symmetric adjacency with ``Bernoulli(t)``
    off-diagonal entries; weight it as ``A * c * (1 + R)`` with ``R ~ U(0, 1)``;
    raise every eigenvalue of the weighted matrix to at least ``1 + |nu|``,
    ``nu ~ U(0, 1)``, and reassemble.  Draws without an off-diagonal zero
    are rejected.  Entries within ``1e-9`` of zero are set to exactly zero.

    Raises
    ------
    GenerationError
        If ``max_tries`` draws all come out without a zero.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    rng = make_rng(seed)
    t = None
    for _ in range(max_tries):
        t = rng.random()
        A = _symmetric_adjacency(rng, p, t)
        affinity = A * c * (1.0 + _symmetric_uniform(rng, p))
        s, V = np.linalg.eigh(affinity)
        floor = 1.0 + abs(rng.random())
        theta = (V * np.maximum(s, floor)) @ V.T
        theta = (theta + theta.T) / 2
        off = ~np.eye(p, dtype=bool)
        small = off & (np.abs(theta) < ZERO_TOL)
        if small.any():
            theta[small] = 0.0
            return theta
    raise GenerationError(f"no precision matrix with a zero entry after {max_tries} draws "
                          f"(last t={t:.4f})")


def _covariance_factor(theta):
    theta = np.asarray(theta, dtype=float)
    try:
        np.linalg.cholesky(theta)
    except np.linalg.LinAlgError:
        raise ValueError("theta must be symmetric positive definite") from None
    sigma = np.linalg.inv(theta)
    return np.linalg.cholesky((sigma + sigma.T) / 2)


def sample_gaussian(theta, n: int, seed=None, column_names=None) -> SampleMatrix:
    """``n`` draws from ``N(0, inv(theta))``."""
    L = _covariance_factor(theta)
    rng = make_rng(seed)
    z = rng.standard_normal((L.shape[0], n))
    return SampleMatrix(L @ z, column_names)


def sample_laplace(theta, n: int, m=None, seed=None, column_names=None) -> SampleMatrix:
    """``n`` draws of ``Y = m W + sqrt(W) Z``, ``W ~ Exp(1)``, ``Z ~ N(0, inv(theta))``.

    One scalar ``W`` is shared by all coordinates of an observation, so with
    ``m = 0`` the covariance is ``E[W] inv(theta) = inv(theta)``.
    """
    L = _covariance_factor(theta)
    p = L.shape[0]
    m = np.zeros(p) if m is None else np.asarray(m, dtype=float)
    if m.shape != (p,):
        raise ValueError(f"location m must have length {p}")
    rng = make_rng(seed)
    w = rng.standard_exponential(n)
    z = L @ rng.standard_normal((p, n))
    return SampleMatrix(m[:, None] * w + np.sqrt(w) * z, column_names)


@dataclass
class SyntheticSpec:
    """Everything needed to regenerate a synthetic data set."""

    p: int
    n: int
    distribution: str = "gaussian"
    seed: int = 0
    c: float = 1.0
    m: tuple | None = None

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}")

    def precision(self) -> np.ndarray:
        theta_seed, _ = spawn_seeds(self.seed, 2)
        return random_precision(self.p, self.c, theta_seed)

    def sample(self, theta=None, seed=None) -> SampleMatrix:
        theta = self.precision() if theta is None else theta
        if seed is None:
            _, seed = spawn_seeds(self.seed, 2)
        if self.distribution == "gaussian":
            return sample_gaussian(theta, self.n, seed)
        return sample_laplace(theta, self.n, self.m, seed)


def write_csv(sample: SampleMatrix, path) -> None:
    """Write one observation per row under a header of variable names."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(sample.names)
        writer.writerows(sample.data.T.tolist())
