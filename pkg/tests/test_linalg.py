import numpy as np
import pytest

from blockgossip import linalg
from blockgossip.graph import generate_complete, generate_path, laplacian


def rank_deficient(rng, rows, cols, rank):
    return rng.normal(size=(rows, rank)) @ rng.normal(size=(rank, cols))


class TestSymmetricEigenvalues:
    def test_identity(self):
        assert linalg.symmetric_eigenvalues(np.eye(3)).tolist() == [1.0, 1.0, 1.0]

    def test_path_p3_spectrum(self):
        # Closed form 2 - 2 cos(pi k / 3) for k = 0, 1, 2 -> {0, 1, 3}.
        eigs = linalg.symmetric_eigenvalues(laplacian(generate_path(3)).astype(float))
        assert np.allclose(eigs, [0.0, 1.0, 3.0], atol=1e-9)

    def test_k4_spectrum(self):
        # Oracle: complete-graph spectrum {0, n (n-1 times)}.
        eigs = linalg.symmetric_eigenvalues(laplacian(generate_complete(4)).astype(float))
        assert np.allclose(eigs, [0.0, 4.0, 4.0, 4.0], atol=1e-9)

    def test_eigenpair_residual(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(6, 6))
        s = (a + a.T) / 2
        eigs = linalg.symmetric_eigenvalues(s)
        vals, vecs = np.linalg.eigh(s)
        norm = np.linalg.norm(s, 2)
        for lam, v in zip(vals, vecs.T):
            assert np.linalg.norm(s @ v - lam * v) <= 1e-9 * norm
        assert np.allclose(eigs, vals)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            linalg.symmetric_eigenvalues(np.ones((2, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            linalg.symmetric_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestMinNonzero:
    def test_simple(self):
        assert linalg.min_nonzero(np.array([0.0, 2.0, 2.0]), 2.0) == 2.0

    def test_numerical_zero_skipped(self):
        # L(P4) spectrum with a numerically-zero smallest eigenvalue.
        values = np.array([1e-18, 0.5857864376269049, 2.0, 3.414213562373095])
        assert linalg.min_nonzero(values, 3.414213562373095) == pytest.approx(0.5857864376269049)

    def test_rank_zero_rejected(self):
        with pytest.raises(ValueError):
            linalg.min_nonzero(np.array([0.0, 0.0]), 0.0)

    def test_dim_widens_tolerance(self):
        values = np.array([1e-12, 1.0])
        assert linalg.min_nonzero(values, 1.0) == pytest.approx(1e-12)
        assert linalg.min_nonzero(values, 1.0, dim=10**5) == 1.0


class TestMinNormLstsq:
    def test_single_incidence_row(self):
        # Oracle: pinv of a single row a is a^T / ||a||^2.
        out = linalg.min_norm_lstsq(np.array([[1.0, -1.0]]), np.array([2.0]))
        assert np.allclose(out, [1.0, -1.0], atol=1e-12)

    def test_identity(self):
        v = np.array([3.0, -1.0, 2.0])
        assert np.allclose(linalg.min_norm_lstsq(np.eye(3), v), v)

    def test_rank_one_symmetric(self):
        # Oracle: rank-1 SVD by hand gives (0.5, -0.5).
        a = np.array([[1.0, -1.0], [-1.0, 1.0]])
        out = linalg.min_norm_lstsq(a, np.array([1.0, -1.0]))
        assert np.allclose(out, [0.5, -0.5], atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            linalg.min_norm_lstsq(np.eye(3), np.ones(2))

    def test_normal_equations_residual(self):
        rng = np.random.default_rng(5)
        a = rank_deficient(rng, 6, 4, 3)
        v = rng.normal(size=6)
        x = linalg.min_norm_lstsq(a, v)
        lhs = a.T @ a @ x
        rhs = a.T @ v
        assert np.linalg.norm(lhs - rhs) <= 1e-9 * max(np.linalg.norm(rhs), 1.0)

    @pytest.mark.parametrize("seed", range(4))
    def test_pseudoinverse_identities(self, seed):
        # A pinv(A) A = A and pinv(A) A pinv(A) = pinv(A), pinv built columnwise.
        rng = np.random.default_rng(seed)
        a = rank_deficient(rng, 6, 4, rank=seed % 3 + 1)
        pinv = np.column_stack([linalg.min_norm_lstsq(a, e) for e in np.eye(6)])
        scale = np.linalg.norm(a)
        assert np.allclose(a @ pinv @ a, a, atol=1e-9 * scale)
        assert np.allclose(pinv @ a @ pinv, pinv, atol=1e-9 * max(np.linalg.norm(pinv), 1.0))

    @pytest.mark.parametrize("seed", range(4))
    def test_output_orthogonal_to_kernel(self, seed):
        rng = np.random.default_rng(100 + seed)
        a = rank_deficient(rng, 6, 4, 2)
        _, _, vt = np.linalg.svd(a)
        kernel = vt[2:]  # rank 2 -> kernel dimension 2
        w = rng.normal(size=6)
        x = linalg.min_norm_lstsq(a, w)
        for v in kernel:
            assert abs(x @ v) <= 1e-9 * max(np.linalg.norm(x), 1.0)


class TestPseudoInverse:
    @pytest.mark.parametrize("seed", range(3))
    def test_matches_columnwise_lstsq(self, seed):
        rng = np.random.default_rng(seed)
        a = rank_deficient(rng, 5, 4, 2)
        pinv = linalg.pseudo_inverse(a)
        by_columns = np.column_stack([linalg.min_norm_lstsq(a, e) for e in np.eye(5)])
        assert np.allclose(pinv, by_columns, atol=1e-10)

    def test_zero_matrix(self):
        assert np.array_equal(linalg.pseudo_inverse(np.zeros((3, 2))), np.zeros((2, 3)))

    def test_empty_matrix(self):
        assert linalg.pseudo_inverse(np.zeros((0, 3))).shape == (3, 0)
