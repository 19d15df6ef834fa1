import numpy as np
import pytest
from hypothesis import given, seed, settings

from nc_hardy.algebra import TracialAlgebra
from nc_hardy.errors import NotSelfAdjointError, SingularOperatorError, SpectrumTooCloseToZeroError
from nc_hardy.sampling import ginibre, sample_operator
from nc_hardy.spectral import (
    StepFunction,
    abs_op,
    apply_function,
    block_upper_inverse,
    inverse,
    lambda_dist,
    lp_norm,
    mu,
    power,
    qr_factor,
    rq_factor,
    spectral_decomposition,
    spectral_projection,
    submajorizes,
    weak_l1_quasinorm,
)

from conftest import algebras

UNIFORM2 = TracialAlgebra.uniform(2)
THREE_ONE = np.diag([3.0, 1.0]).astype(complex)


def random_unitary(n, rng):
    q, _ = np.linalg.qr(ginibre(n, rng))
    return q


class TestStepFunction:
    def test_rejects_increasing_values(self):
        with pytest.raises(ValueError):
            StepFunction([0.0, 0.5], [1.0, 2.0])

    def test_rejects_bad_breakpoints(self):
        with pytest.raises(ValueError):
            StepFunction([0.1, 0.5], [2.0, 1.0])

    def test_from_cells_merges_ties(self):
        f = StepFunction.from_cells([1.0, 2.0, 1.0 + 1e-14], [0.25, 0.5, 0.25])
        np.testing.assert_allclose(f.breakpoints, [0.0, 0.5])
        np.testing.assert_allclose(f.values, [2.0, 1.0 + 1e-14])

    def test_evaluation_is_right_continuous(self):
        f = StepFunction([0.0, 0.5], [3.0, 1.0])
        assert f(0.0) == 3.0 and f(0.4999) == 3.0 and f(0.5) == 1.0

    def test_product(self):
        f = StepFunction([0.0, 0.5], [3.0, 1.0])
        g = StepFunction([0.0, 0.25], [2.0, 1.0])
        h = f * g
        np.testing.assert_allclose(h.breakpoints, [0.0, 0.25, 0.5])
        np.testing.assert_allclose(h.values, [6.0, 3.0, 1.0])


class TestAbs:
    def test_positive_diagonal(self):
        x = np.diag([1.0, 4.0]).astype(complex)
        np.testing.assert_allclose(abs_op(x), x, atol=1e-15)

    def test_nilpotent(self):
        np.testing.assert_allclose(abs_op(np.array([[0, 1], [0, 0]], dtype=complex)), np.diag([0, 1]), atol=1e-15)

    def test_unitary(self, rng):
        np.testing.assert_allclose(abs_op(random_unitary(4, rng)), np.eye(4), atol=1e-12)

    def test_square_is_gram(self, rng):
        x = ginibre(5, rng)
        m = abs_op(x)
        np.testing.assert_allclose(m @ m, x.conj().T @ x, rtol=1e-9, atol=1e-12)


class TestMu:
    def test_uniform_three_one(self):
        f = mu(UNIFORM2, THREE_ONE)
        np.testing.assert_allclose(f.breakpoints, [0.0, 0.5])
        np.testing.assert_allclose(f.values, [3.0, 1.0])

    def test_scalar(self):
        f = mu(UNIFORM2, 2.5 * np.eye(2))
        np.testing.assert_allclose(f.values, [2.5])

    def test_weighted_larger_value_first(self):
        alg = TracialAlgebra((0.25, 0.75))
        f = mu(alg, np.diag([2.0, 5.0]))
        np.testing.assert_allclose(f.breakpoints, [0.0, 0.75])
        np.testing.assert_allclose(f.values, [5.0, 2.0])

    @seed(21)
    @settings(max_examples=50, deadline=None)
    @given(algebras())
    def test_inverse_of_distribution(self, drawn):
        alg, s = drawn
        x = sample_operator(alg, "ginibre", np.random.default_rng(s))
        f = mu(alg, x)
        sv = np.linalg.svd(x, compute_uv=False)
        for level in np.concatenate([sv * 0.999, sv * 1.001, [0.0]]):
            assert f.length_above(level) == pytest.approx(lambda_dist(alg, x, level), abs=1e-12)

    @seed(22)
    @settings(max_examples=50, deadline=None)
    @given(algebras())
    def test_lp_norm_from_mu_matches_trace(self, drawn):
        alg, s = drawn
        x = sample_operator(alg, "ginibre", np.random.default_rng(s))
        m = abs_op(x)
        for p in (0.5, 1.0, 2.0, 3.5):
            direct = alg.trace(apply_function(m, power(p))).real ** (1 / p)
            assert mu(alg, x).lp_norm(p) == pytest.approx(direct, rel=1e-10)


class TestLambda:
    def test_above_norm(self):
        assert lambda_dist(UNIFORM2, THREE_ONE, 3.0) == 0.0

    def test_invertible_at_zero(self):
        assert lambda_dist(UNIFORM2, THREE_ONE, 0.0) == 1.0

    def test_middle(self):
        assert lambda_dist(UNIFORM2, THREE_ONE, 2.0) == pytest.approx(0.5)

    def test_negative_level(self):
        with pytest.raises(ValueError):
            lambda_dist(UNIFORM2, THREE_ONE, -1.0)


class TestNorms:
    @pytest.mark.parametrize("p", [0.5, 1, 2, 7, np.inf])
    def test_identity(self, p):
        assert lp_norm(UNIFORM2, np.eye(2), p) == pytest.approx(1.0)

    def test_l2_hand_value(self):
        assert lp_norm(UNIFORM2, THREE_ONE, 2) == pytest.approx(np.sqrt(5), rel=1e-15)

    def test_infinity_is_operator_norm(self, rng):
        x = ginibre(4, rng)
        assert lp_norm(TracialAlgebra.uniform(4), x, np.inf) == pytest.approx(np.linalg.norm(x, 2))

    @pytest.mark.parametrize("p", [0, -1])
    def test_rejects_nonpositive(self, p):
        with pytest.raises(ValueError):
            lp_norm(UNIFORM2, THREE_ONE, p)

    def test_adjoint_invariance(self, rng):
        alg = TracialAlgebra((0.1, 0.1, 0.1, 0.7), (2, 2))
        x = alg.project(ginibre(4, rng))
        for p in (1, 3):
            assert lp_norm(alg, x, p) == pytest.approx(lp_norm(alg, x.conj().T, p), rel=1e-12)

    def test_weak_l1_hand_value(self):
        assert weak_l1_quasinorm(UNIFORM2, THREE_ONE) == pytest.approx(1.5)

    def test_weak_l1_constant_and_zero(self):
        assert weak_l1_quasinorm(UNIFORM2, 2 * np.eye(2)) == pytest.approx(2.0)
        assert weak_l1_quasinorm(UNIFORM2, np.zeros((2, 2))) == 0.0


class TestSpectralProjection:
    def test_full_and_empty(self):
        x = np.diag([1.0, 3.0])
        np.testing.assert_allclose(spectral_projection(x, 0.0, 5.0), np.eye(2), atol=1e-15)
        np.testing.assert_allclose(spectral_projection(x, 3.0), np.zeros((2, 2)), atol=1e-15)

    def test_selects_upper_eigenvalue(self):
        np.testing.assert_allclose(spectral_projection(np.diag([1.0, 3.0]), 2.0), np.diag([0, 1]), atol=1e-15)

    def test_interval_conventions(self):
        x = np.diag([1.0, 2.0])
        np.testing.assert_allclose(spectral_projection(x, 1.0, 2.0), np.diag([0, 1]), atol=1e-15)
        np.testing.assert_allclose(spectral_projection(x, 1.0, 2.0, closed="left"), np.diag([1, 0]), atol=1e-15)

    def test_rejects_non_self_adjoint(self):
        with pytest.raises(NotSelfAdjointError):
            spectral_projection(np.array([[0, 1], [0, 0]]), 0.0)

    def test_projection_commutes_and_matches_distribution(self, rng):
        alg = TracialAlgebra((0.2, 0.2, 0.2, 0.4))
        x = alg.project(ginibre(4, rng))
        m = abs_op(x)
        level = float(np.median(np.linalg.svd(x, compute_uv=False)))
        p = spectral_projection(m, level)
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
        np.testing.assert_allclose(p @ m, m @ p, atol=1e-12)
        assert alg.trace(p).real == pytest.approx(lambda_dist(alg, x, level), abs=1e-12)


class TestFunctionalCalculus:
    def test_exp_zero(self):
        np.testing.assert_allclose(apply_function(np.zeros((3, 3)), "exp"), np.eye(3), atol=1e-15)

    def test_log_inverts_exp(self, rng):
        g = ginibre(5, rng)
        v = (g + g.conj().T) / 2
        np.testing.assert_allclose(apply_function(apply_function(v, "exp"), "log"), v, atol=1e-8)

    def test_log_plus(self):
        out = apply_function(np.diag([0.5, np.e]), "log+")
        np.testing.assert_allclose(out, np.diag([0.0, 1.0]), atol=1e-15)

    def test_log_guard(self):
        with pytest.raises(SpectrumTooCloseToZeroError) as info:
            apply_function(np.diag([1e-14, 1.0]), "log")
        assert info.value.smallest == pytest.approx(1e-14)

    def test_decomposition_reconstructs(self, rng):
        alg = TracialAlgebra.uniform(6)
        g = ginibre(6, rng)
        x = g + g.conj().T
        dec = spectral_decomposition(alg, x)
        assert np.max(np.abs(dec.reconstruct() - x)) <= 1e-10 * np.linalg.norm(x, 2)
        np.testing.assert_allclose(dec.eigenvectors.conj().T @ dec.eigenvectors, np.eye(6), atol=1e-10)
        assert dec.masses.sum() == pytest.approx(1.0)


class TestInverse:
    def test_identity_and_diagonal(self):
        np.testing.assert_allclose(inverse(np.eye(3)), np.eye(3))
        np.testing.assert_allclose(inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))

    def test_upper_stays_upper(self, rng):
        x = np.triu(ginibre(5, rng)) + 3 * np.eye(5)
        xi = inverse(x)
        assert not np.any(np.tril(xi, -1))
        assert np.linalg.norm(x @ xi - np.eye(5), 2) <= 1e-9 * np.linalg.cond(x)

    def test_singular(self):
        with pytest.raises(SingularOperatorError) as info:
            inverse(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert info.value.smallest_singular_value < 1e-15

    def test_block_upper_inverse_pattern(self, rng):
        alg = TracialAlgebra((0.1, 0.1, 0.1, 0.35, 0.35), (2, 1, 2))
        a = sample_operator(alg, "block-upper-invertible", rng)
        ai = block_upper_inverse(alg, a)
        assert alg.is_analytic(ai)
        np.testing.assert_allclose(a @ ai, np.eye(5), atol=1e-12)


class TestFactorizations:
    def test_upper_with_positive_diagonal_is_fixed(self, rng):
        x = np.triu(ginibre(4, rng), 1) + np.diag([1.0, 2.0, 3.0, 4.0])
        a, u = rq_factor(x)
        np.testing.assert_allclose(a, x, atol=1e-12)
        np.testing.assert_allclose(u, np.eye(4), atol=1e-12)

    def test_unitary_gives_identity_factor(self, rng):
        q = random_unitary(4, rng)
        a, u = rq_factor(q)
        np.testing.assert_allclose(a, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(u, q, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_random_reconstruction(self, n, rng):
        x = ginibre(n, rng)
        a, u = rq_factor(x)
        assert not np.any(np.tril(a, -1))
        assert np.all(np.diagonal(a).real > 0) and np.allclose(np.diagonal(a).imag, 0)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(n), atol=1e-10)
        assert np.max(np.abs(a @ u - x)) <= 1e-9 * np.max(np.abs(x))
        np.testing.assert_allclose(a @ a.conj().T, x @ x.conj().T, atol=1e-9 * np.linalg.norm(x) ** 2)
        assert not np.any(np.tril(inverse(a), -1))

    def test_qr_companion(self, rng):
        x = ginibre(5, rng)
        u, b = qr_factor(x)
        assert not np.any(np.tril(b, -1))
        np.testing.assert_allclose(u @ b, x, atol=1e-12)
        np.testing.assert_allclose(b.conj().T @ b, x.conj().T @ x, atol=1e-10)

    def test_parts_keep_factors_block_diagonal(self, rng):
        x = np.zeros((4, 4), dtype=complex)
        x[:2, :2] = ginibre(2, rng)
        x[2:, 2:] = ginibre(2, rng)
        a, u = rq_factor(x, parts=((0, 2), (2, 4)))
        assert not a[:2, 2:].any() and not u[:2, 2:].any()
        np.testing.assert_allclose(a @ u, x, atol=1e-12)

    def test_singular_input(self):
        with pytest.raises(SingularOperatorError):
            rq_factor(np.zeros((2, 2)))


class TestSubmajorization:
    def test_reflexive(self, rng):
        f = mu(TracialAlgebra.uniform(4), ginibre(4, rng))
        assert submajorizes(f, f)

    def test_pointwise_domination(self):
        assert submajorizes(StepFunction([0.0, 0.5], [3.0, 2.0]), StepFunction([0.0, 0.5], [2.0, 1.0]))

    def test_hand_counterexample(self):
        a = mu(UNIFORM2, np.diag([2.0, 0.0]))
        b = mu(UNIFORM2, np.eye(2))
        assert not submajorizes(b, a)
        assert submajorizes(a, b)

    @seed(23)
    @settings(max_examples=50, deadline=None)
    @given(algebras())
    def test_product_submajorization(self, drawn):
        alg, s = drawn
        rng = np.random.default_rng(s)
        b = sample_operator(alg, "ginibre", rng)
        c = sample_operator(alg, "ginibre", rng)
        dominant = mu(alg, b) * mu(alg, c)
        assert submajorizes(dominant, mu(alg, b @ c), tol=1e-9 * max(1.0, dominant.integral()))
