"""Unit tests for the numerical kernels.

Oracles are kept independent of the implementation: chi-squared values come
from closed forms and quadrature of the density, J0 from its power series and
a bisection search for the first zero, and the Gaussian sampler is checked
against its defining moments.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cajsim import mathcore


def _chi2_cdf_quadrature(x, dof, steps=200_000):
    # trapezoidal integration of the density after the substitution t = u^2,
    # which removes the endpoint singularity at dof = 1
    u = np.linspace(0.0, math.sqrt(x), steps)
    integrand = 2.0 * u ** (dof - 1) * np.exp(-u * u / 2.0)
    integrand /= 2.0 ** (dof / 2.0) * math.gamma(dof / 2.0)
    return float(np.trapezoid(integrand, u))


def _j0_series(x, terms=40):
    total = 0.0
    term = 1.0
    for k in range(terms):
        if k > 0:
            term *= -(x * x / 4.0) / (k * k)
        total += term
    return total


class TestChi2Cdf:
    def test_closed_form_dof2(self):
        """dof=2 is exponential: F(x) = 1 - exp(-x/2)."""
        for x in (0.1, 1.0, 2.0, 7.5):
            expected = 1.0 - math.exp(-x / 2.0)
            got = mathcore.chi2_cdf(x, 2)
            assert abs(got - expected) < 1e-12, f"x={x}: {got} vs {expected}"

    def test_closed_form_dof6(self):
        """dof=6: F(x) = 1 - exp(-x/2)(1 + x/2 + x^2/8)."""
        x = 4.0
        expected = 1.0 - math.exp(-2.0) * (1.0 + 2.0 + 2.0)
        assert abs(mathcore.chi2_cdf(x, 6) - expected) < 1e-12

    def test_against_quadrature(self):
        for dof in (1, 2, 3, 4, 8, 30):
            for x in (0.5, 2.0, 10.0):
                expected = _chi2_cdf_quadrature(x, dof)
                got = mathcore.chi2_cdf(x, dof)
                assert abs(got - expected) < 1e-7, f"dof={dof}, x={x}"

    def test_edges_and_monotonicity(self):
        assert mathcore.chi2_cdf(0.0, 4) == 0.0
        grid = np.linspace(0.0, 70.0, 400)
        vals = mathcore.chi2_cdf(grid, 6)
        assert np.all(np.diff(vals) >= 0.0), "CDF must be nondecreasing"
        assert vals[-1] > 1.0 - 1e-9

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            mathcore.chi2_cdf(-0.1, 2)
        with pytest.raises(ValueError):
            mathcore.chi2_cdf(1.0, 0)
        with pytest.raises(ValueError):
            mathcore.chi2_cdf(1.0, 2.5)

    def test_array_input(self):
        x = np.array([0.0, 1.0, 3.0])
        vals = mathcore.chi2_cdf(x, 2)
        assert vals.shape == (3,)
        assert abs(vals[2] - (1.0 - math.exp(-1.5))) < 1e-12


class TestBesselJ0:
    def test_against_power_series(self):
        for x in (0.0, 0.3, 1.0, 2.0, 4.5, 8.0):
            assert abs(mathcore.bessel_j0(x) - _j0_series(x)) < 1e-10, f"x={x}"

    def test_first_zero_location(self):
        """Bisection on the series pins the first zero near 2.4048."""
        lo, hi = 2.0, 3.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _j0_series(lo) * _j0_series(mid) <= 0.0:
                hi = mid
            else:
                lo = mid
        zero = 0.5 * (lo + hi)
        assert abs(mathcore.bessel_j0(zero)) < 1e-9
        assert abs(zero - 2.404825557695773) < 1e-9

    def test_array_and_symmetry(self):
        x = np.linspace(-10.0, 10.0, 101)
        vals = mathcore.bessel_j0(x)
        assert np.allclose(vals, vals[::-1], atol=1e-14), "J0 is even"
        assert abs(mathcore.bessel_j0(0.0) - 1.0) < 1e-15


class TestSvd:
    def test_reconstruction_and_gram(self):
        rng = np.random.default_rng(11)
        a = mathcore.sample_cscg(rng, (6, 9))
        res = mathcore.svd(a)
        gram = res.u.conj().T @ res.u
        assert np.max(np.abs(gram - np.eye(gram.shape[0]))) < 1e-10
        gram_v = res.v.conj().T @ res.v
        assert np.max(np.abs(gram_v - np.eye(gram_v.shape[0]))) < 1e-10
        err = np.linalg.norm(res.reconstruct() - a) / np.linalg.norm(a)
        assert err < 1e-9, f"relative reconstruction error {err}"

    def test_singular_values_descending_and_match_eigvals(self):
        rng = np.random.default_rng(12)
        a = mathcore.sample_cscg(rng, (5, 7))
        res = mathcore.svd(a)
        assert np.all(np.diff(res.s) <= 1e-12)
        eig = np.sort(np.linalg.eigvalsh(a @ a.conj().T))[::-1]
        assert np.allclose(res.s**2, eig, rtol=1e-9, atol=1e-12)

    def test_phase_convention(self):
        """Largest-modulus entry of every left vector sits on the positive real axis."""
        rng = np.random.default_rng(13)
        for _ in range(20):
            a = mathcore.sample_cscg(rng, (4, 6))
            res = mathcore.svd(a, full=True)
            for i in range(res.u.shape[1]):
                col = res.u[:, i]
                pivot = col[np.argmax(np.abs(col))]
                assert abs(pivot.imag) < 1e-12, f"column {i} pivot not real"
                assert pivot.real > 0.0, f"column {i} pivot not positive"

    def test_phase_convention_preserves_product(self):
        rng = np.random.default_rng(14)
        a = mathcore.sample_cscg(rng, (4, 8))
        res = mathcore.svd(a, full=True)
        err = np.linalg.norm(res.reconstruct() - a) / np.linalg.norm(a)
        assert err < 1e-9

    def test_full_gives_square_u(self):
        rng = np.random.default_rng(15)
        a = mathcore.sample_cscg(rng, (4, 19))
        res = mathcore.svd(a, full=True)
        assert res.u.shape == (4, 4)
        assert res.s.shape == (4,)

    def test_deterministic_under_input_phase(self):
        """Multiplying the input by a global phase must not change u up to the
        fixed convention's output for the rotated problem: re-running on the
        same bytes gives the same bytes."""
        rng = np.random.default_rng(16)
        a = mathcore.sample_cscg(rng, (5, 5))
        r1 = mathcore.svd(a)
        r2 = mathcore.svd(a.copy())
        assert np.array_equal(r1.u, r2.u)
        assert np.array_equal(r1.s, r2.s)

    def test_error_messages_name_shape(self):
        with pytest.raises(ValueError, match=r"\(3,\)"):
            mathcore.svd(np.ones(3))
        bad = np.full((2, 2), np.nan + 0j)
        with pytest.raises(ValueError, match=r"\(2, 2\)"):
            mathcore.svd(bad)


class TestOrthonormalComplement:
    def test_full_basis_gram(self):
        rng = np.random.default_rng(21)
        q = mathcore.svd(mathcore.sample_cscg(rng, (8, 3))).u
        comp = mathcore.orthonormal_complement(q)
        assert comp.shape == (8, 5)
        full = np.hstack([q, comp])
        gram = full.conj().T @ full
        assert np.max(np.abs(gram - np.eye(8))) < 1e-10

    def test_uniform_vector_complement_closed_form(self):
        """Complementing the normalized all-ones vector starts with
        (e0 - 1/n) / sqrt(1 - 1/n), derived by hand from one projection."""
        n = 20
        u = np.ones(n) / math.sqrt(n)
        comp = mathcore.orthonormal_complement(u)
        expected = -np.ones(n) / n
        expected[0] += 1.0
        expected /= math.sqrt(1.0 - 1.0 / n)
        assert np.allclose(comp[:, 0], expected, atol=1e-12)

    def test_deterministic(self):
        rng = np.random.default_rng(22)
        q = mathcore.svd(mathcore.sample_cscg(rng, (6, 2))).u
        c1 = mathcore.orthonormal_complement(q)
        c2 = mathcore.orthonormal_complement(q.copy())
        assert np.array_equal(c1, c2)

    def test_skips_near_parallel_candidates(self):
        """When the input span contains e0, the first accepted candidate must
        be a later standard basis vector."""
        e0 = np.zeros(5, dtype=complex)
        e0[0] = 1.0
        comp = mathcore.orthonormal_complement(e0)
        assert comp.shape == (5, 4)
        assert abs(comp[0, 0]) < 1e-12, "e0 direction must not reappear"

    def test_rejects_non_orthonormal(self):
        b = np.array([[1.0, 1.0], [0.0, 1e-9], [0.0, 0.0]], dtype=complex)
        with pytest.raises(mathcore.DegenerateInput):
            mathcore.orthonormal_complement(b)

    def test_rejects_square(self):
        with pytest.raises(ValueError):
            mathcore.orthonormal_complement(np.eye(3, dtype=complex))


class TestSampler:
    def test_moments(self):
        rng = np.random.default_rng(31)
        z = mathcore.sample_cscg(rng, 200_000, variance=2.5)
        assert abs(z.mean()) < 0.02
        assert abs(np.mean(np.abs(z) ** 2) - 2.5) < 0.03
        # circularity: the pseudo-variance E[z^2] vanishes
        assert abs(np.mean(z**2)) < 0.02

    def test_determinism_and_shape(self):
        a = mathcore.sample_cscg(np.random.default_rng(5), (3, 4), 1.0)
        b = mathcore.sample_cscg(np.random.default_rng(5), (3, 4), 1.0)
        assert a.shape == (3, 4)
        assert np.array_equal(a, b)

    def test_zero_variance(self):
        z = mathcore.sample_cscg(np.random.default_rng(1), 10, 0.0)
        assert np.all(z == 0.0)

    def test_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            mathcore.sample_cscg(np.random.default_rng(1), 3, -1.0)


@settings(max_examples=60, deadline=None)
@given(
    m=st.integers(min_value=1, max_value=8),
    n=st.integers(min_value=1, max_value=8),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_svd_invariants_random(m, n, seed):
    """Property: reconstruction and orthonormality hold for arbitrary shapes."""
    rng = np.random.default_rng(seed)
    a = mathcore.sample_cscg(rng, (m, n))
    res = mathcore.svd(a, full=True)
    scale = max(np.linalg.norm(a), 1e-30)
    assert np.linalg.norm(res.reconstruct() - a) / scale < 1e-9
    gram = res.u.conj().T @ res.u
    assert np.max(np.abs(gram - np.eye(m))) < 1e-10
