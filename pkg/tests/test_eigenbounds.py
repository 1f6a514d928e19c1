import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_spd
from covbounds.eigenbounds import (EigenBounds, eigen_bounds, eigenvalue_intervals,
                                   eigenvector_sq_bounds, epsilon_bound, epsilon_from_spread,
                                   inverse_eigenvalue_interval, minor_spectra, normal_quantile,
                                   signed_bounds, sorted_eigh, tighten_orthonormal)
from covbounds.moments import SampleMatrix
from covbounds.ustat import cov_of_cov


def perturb(rng, sigma, norm):
    """Symmetric perturbation with spectral norm exactly ``norm``."""
    e = rng.standard_normal(sigma.shape)
    e = (e + e.T) / 2
    return sigma + e * (norm / np.abs(np.linalg.eigvalsh(e)).max())


def aligned_truth(sigma, v_hat):
    lam, v = sorted_eigh(sigma)
    signs = np.where(np.sum(v * v_hat, axis=0) < 0, -1.0, 1.0)
    return lam, v * signs


def bounds_from_parts(sq_lo, sq_hi, v_hat, lam=None, eps=0.1):
    p = sq_lo.shape[0]
    lam = np.arange(p, 0, -1.0) if lam is None else lam
    lo, hi, known = signed_bounds(sq_lo, sq_hi, v_hat)
    return EigenBounds(lam, v_hat, eps, sq_lo, sq_hi, lo, hi, known, np.zeros((p, p - 1)))


class TestEpsilon:
    @pytest.mark.parametrize("prob,expected", [
        (0.975, 1.959963984540054), (0.995, 2.5758293035489004), (0.95, 1.6448536269514722),
        (0.5, 0.0)])
    def test_quantile_accuracy(self, prob, expected):
        assert abs(normal_quantile(prob) - expected) < 1e-10

    def test_quantile_round_trip(self):
        from scipy.special import ndtr

        for prob in (1e-8, 0.01, 0.3, 0.999, 1 - 1e-8):
            assert ndtr(normal_quantile(prob)) == pytest.approx(prob, rel=1e-12)

    def test_identity_eigenvalue_source(self):
        b = epsilon_bound(np.eye(3), 0.05, "eigenvalue")
        assert b.epsilon == pytest.approx(2.77180, abs=1e-5)

    def test_identity_trace_source(self):
        b = epsilon_bound(np.eye(3), 0.05, "trace")
        # sqrt(6) * 1.959964 = 4.80091
        assert b.epsilon == pytest.approx(np.sqrt(6) * 1.959963984540054, abs=1e-12)
        assert b.epsilon == pytest.approx(4.80091, abs=1e-5)

    def test_delta_to_one_limit(self):
        assert epsilon_from_spread(1.0, 1.0) == 0.0
        assert epsilon_bound(np.eye(3), 1 - 1e-12).epsilon < 1e-10

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.1, 1.5])
    def test_delta_out_of_range(self, delta):
        with pytest.raises(ValueError):
            epsilon_bound(np.eye(3), delta)

    def test_unknown_source(self):
        with pytest.raises(ValueError):
            epsilon_bound(np.eye(3), 0.05, "max")

    def test_trace_dominates_eigenvalue(self, rng):
        for _ in range(20):
            cov = cov_of_cov(SampleMatrix(rng.standard_normal((3, 50))))
            assert (epsilon_bound(cov, 0.05, "trace").epsilon
                    >= epsilon_bound(cov, 0.05, "eigenvalue").epsilon)

    def test_smaller_delta_larger_epsilon(self):
        assert epsilon_bound(np.eye(2), 0.01).epsilon > epsilon_bound(np.eye(2), 0.1).epsilon


class TestEigenvalueIntervals:
    def test_diagonal(self):
        iv = eigenvalue_intervals(np.diag([1.0, 3.0]), 0.5)
        assert [(i.lo, i.hi) for i in iv] == [(2.5, 3.5), (0.5, 1.5)]

    def test_zero_epsilon(self):
        iv = eigenvalue_intervals(np.diag([3.0, 1.0]), 0.0)
        assert all(i.width == 0 for i in iv)

    def test_weyl_containment(self, rng):
        for _ in range(100):
            sigma = random_spd(rng, 4)
            iv = eigenvalue_intervals(perturb(rng, sigma, 0.1), 0.1)
            lam = np.linalg.eigvalsh(sigma)[::-1]
            assert all(i.contains(x, 1e-12) for i, x in zip(iv, lam))


class TestInverseEigenvalue:
    def test_bounded(self):
        iv = inverse_eigenvalue_interval(2.0, 0.5)
        assert iv.lo == pytest.approx(0.4) and iv.hi == pytest.approx(2 / 3)

    def test_unbounded(self):
        iv = inverse_eigenvalue_interval(0.3, 0.5)
        assert iv.lo == pytest.approx(1 / 0.8) and iv.hi == np.inf

    def test_point(self):
        iv = inverse_eigenvalue_interval(4.0, 0.0)
        assert iv.lo == iv.hi == 0.25

    def test_not_positive_definite(self):
        with pytest.raises(ValueError):
            inverse_eigenvalue_interval(-0.6, 0.5)


class TestSquaredBounds:
    def test_diagonal_exact(self):
        up, lo = eigenvector_sq_bounds(np.diag([2.0, 1.0]), 0.0)
        np.testing.assert_allclose(up, np.eye(2))
        np.testing.assert_allclose(lo, np.eye(2))

    def test_diagonal_with_epsilon(self):
        up, lo = eigenvector_sq_bounds(np.diag([2.0, 1.0]), 0.1)
        assert up[0, 0] == 1.0
        assert lo[0, 0] == pytest.approx(2 / 3)

    def test_repeated_eigenvalues_trivial(self):
        up, lo = eigenvector_sq_bounds(np.eye(3), 0.01)
        np.testing.assert_array_equal(up, np.ones((3, 3)))
        np.testing.assert_array_equal(lo, np.zeros((3, 3)))

    def test_minor_spectra(self):
        a = np.array([[2.0, 1.0, 0.0], [1.0, 3.0, 0.0], [0.0, 0.0, 5.0]])
        m = minor_spectra(a)
        np.testing.assert_allclose(m[2], np.linalg.eigvalsh(a[:2, :2])[::-1])
        np.testing.assert_allclose(m[0], [5.0, 3.0])

    def test_containment_under_perturbation(self, rng):
        for _ in range(200):
            p = rng.integers(2, 6)
            sigma = random_spd(rng, p, spread=6.0)
            eps = 0.05
            sigma_hat = perturb(rng, sigma, eps)
            up, lo = eigenvector_sq_bounds(sigma_hat, eps)
            _, v = sorted_eigh(sigma)
            assert np.all(v**2 <= up + 1e-10) and np.all(v**2 >= lo - 1e-10)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 6), st.floats(0, 2), st.integers(0, 2**32 - 1))
    def test_property_within_unit_interval(self, p, eps, seed):
        sigma = random_spd(np.random.default_rng(seed), p)
        up, lo = eigenvector_sq_bounds(sigma, eps)
        assert np.all((0 <= lo) & (lo <= up) & (up <= 1))


class TestSignedBounds:
    def test_known_negative(self):
        lo, hi, known = signed_bounds(np.array([[0.04]]), np.array([[0.25]]), np.array([[-0.3]]))
        assert (lo[0, 0], hi[0, 0]) == pytest.approx((-0.5, -0.2)) and known[0, 0]

    def test_unknown_sign(self):
        lo, hi, known = signed_bounds(np.array([[0.0]]), np.array([[0.25]]), np.array([[0.3]]))
        assert (lo[0, 0], hi[0, 0]) == (-0.5, 0.5) and not known[0, 0]

    @pytest.mark.parametrize("v,expected", [(0.9, 1.0), (-0.9, -1.0)])
    def test_unit(self, v, expected):
        lo, hi, _ = signed_bounds(np.array([[1.0]]), np.array([[1.0]]), np.array([[v]]))
        assert lo[0, 0] == hi[0, 0] == expected


class TestEigenBounds:
    def test_invariants(self, rng):
        sigma = random_spd(rng, 5)
        b = eigen_bounds(sigma, 0.2, tighten=True)
        assert np.all((b.sq_lower >= 0) & (b.sq_upper <= 1))
        for iv in b.eigenvalue_intervals:
            assert iv.width == pytest.approx(0.4)
        interior = (b.lower < 0) & (b.upper > 0)
        assert not np.any(b.sign_known & interior)
        assert np.all(np.diff(b.eigenvalues) <= 0)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            eigen_bounds(np.array([[1.0, 0.5], [0.0, 1.0]]), 0.1)

    def test_rejects_negative_epsilon(self):
        with pytest.raises(ValueError):
            eigen_bounds(np.eye(2), -0.1)


class TestTightening:
    def test_norm_constraint_column(self):
        sq_lo = np.array([[0.9, 0.0], [0.0, 0.9]])
        sq_hi = np.ones((2, 2))
        v = np.array([[0.99, -0.1], [0.1, 0.99]])
        out = tighten_orthonormal(bounds_from_parts(sq_lo, sq_hi, v), max_iters=1)
        assert out.sq_lower[1, 0] == pytest.approx(0.0)
        assert out.sq_upper[1, 0] == pytest.approx(0.1)
        assert out.tightening.inconsistent == 0

    def test_inconsistent_input_flagged_and_reverted(self):
        sq_lo = np.array([[0.9, 0.0], [0.3, 0.0]])
        sq_hi = np.ones((2, 2))
        v = np.array([[0.9, -0.4], [0.4, 0.9]])
        b = bounds_from_parts(sq_lo, sq_hi, v)
        out = tighten_orthonormal(b, max_iters=1)
        assert out.tightening.inconsistent > 0
        assert np.all(out.sq_lower <= out.sq_upper)
        assert out.sq_lower[1, 0] >= 0.3

    def test_exact_bounds_are_fixed_point(self, rng):
        sigma = random_spd(rng, 4)
        b = eigen_bounds(sigma, 0.0)
        out = tighten_orthonormal(b)
        assert out.tightening.iterations == 1 and out.tightening.converged
        np.testing.assert_allclose(out.sq_lower, b.sq_lower, atol=1e-12)
        np.testing.assert_allclose(out.lower, b.lower, atol=1e-12)

    def test_contains_truth_random_4x4(self, rng):
        for _ in range(500):
            sigma = random_spd(rng, 4, spread=4.0)
            eps = 0.05 * rng.random()
            b = eigen_bounds(perturb(rng, sigma, eps), eps)
            t = tighten_orthonormal(b)
            _, v = aligned_truth(sigma, b.eigenvectors)
            assert np.all(v**2 <= t.sq_upper + 1e-9) and np.all(v**2 >= t.sq_lower - 1e-9)
            # signs are only claimed where the empirical sign is right
            ok = (v >= t.lower - 1e-9) & (v <= t.upper + 1e-9)
            assert np.all(ok | ~b.sign_known)

    def test_never_widens_and_terminates(self, rng):
        for _ in range(100):
            p = rng.integers(2, 6)
            sigma = random_spd(rng, p)
            b = eigen_bounds(perturb(rng, sigma, 0.1), 0.1 + 0.3 * rng.random())
            t = tighten_orthonormal(b)
            assert np.all(t.sq_lower >= b.sq_lower - 1e-15)
            assert np.all(t.sq_upper <= b.sq_upper + 1e-15)
            assert np.all(t.lower >= b.lower - 1e-15)
            assert np.all(t.upper <= b.upper + 1e-15)
            assert t.tightening.converged and t.tightening.iterations <= 100

    def test_does_not_mutate_input(self, rng):
        b = eigen_bounds(random_spd(rng, 3), 0.1)
        before = b.sq_upper.copy()
        tighten_orthonormal(b)
        np.testing.assert_array_equal(b.sq_upper, before)
