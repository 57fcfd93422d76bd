import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import sym3_eigenvalues
from tradecluster.affinity import gaussian_similarity
from tradecluster.errors import KOutOfRange, NoConvergence, NotSymmetric, ZeroDegree
from tradecluster.spectral import (
    SYMMETRIC,
    UNNORMALIZED,
    degree_matrix,
    eigendecompose_symmetric,
    embed,
    jacobi_eigh,
    laplacian,
)


def block_affinity(sizes, seed=0, sigma=1.0):
    """Gaussian affinity inside each block, zero between blocks."""
    rng = np.random.default_rng(seed)
    n = sum(sizes)
    S = np.zeros((n, n))
    start = 0
    for m in sizes:
        pts = rng.normal(scale=0.3, size=(m, 2))
        S[start:start + m, start:start + m] = gaussian_similarity(pts, sigma).S if m > 1 else 1.0
        start += m
    return S


def projector(V):
    return V @ V.T


class TestDegrees:
    def test_identity(self):
        np.testing.assert_array_equal(degree_matrix(np.eye(4)), np.ones(4))

    def test_all_ones(self):
        np.testing.assert_array_equal(degree_matrix(np.ones((2, 2))), [2, 2])

    def test_total(self, blobs):
        S = gaussian_similarity(blobs[0], 4.0).S
        assert degree_matrix(S).sum() == pytest.approx(S.sum(), rel=1e-14)
        assert np.all(degree_matrix(S) >= 1)


class TestLaplacian:
    def test_pair(self):
        lap = laplacian(np.ones((2, 2)), "unnorm")
        np.testing.assert_array_equal(lap.L, [[1, -1], [-1, 1]])
        np.testing.assert_allclose(jacobi_eigh(lap.L).eigenvalues, [0, 2], atol=1e-15)

    def test_identity_affinity(self):
        lap = laplacian(np.eye(5), "unnorm")
        np.testing.assert_array_equal(lap.L, 0)
        np.testing.assert_array_equal(jacobi_eigh(lap.L).eigenvalues, 0)

    @pytest.mark.parametrize("variant", ["sym", "unnorm"])
    @pytest.mark.parametrize("blocks", [1, 2, 3, 5])
    def test_zero_multiplicity_counts_components(self, variant, blocks):
        S = block_affinity([4 + b for b in range(blocks)], seed=blocks)
        lam = eigendecompose_symmetric(laplacian(S, variant)).eigenvalues
        assert np.sum(np.abs(lam) <= 1e-9) == blocks
        # independent route
        ref = np.linalg.eigvalsh(laplacian(S, variant).L)
        np.testing.assert_allclose(lam, ref, atol=1e-10)

    def test_unnormalized_properties(self, blobs):
        lap = laplacian(gaussian_similarity(blobs[0], 5.0), UNNORMALIZED)
        assert np.abs(lap.L - lap.L.T).max() <= 1e-12
        np.testing.assert_allclose(lap.L.sum(axis=1), 0, atol=1e-9)
        lam = jacobi_eigh(lap.L).eigenvalues
        assert lam.min() >= -1e-9 and lam[0] <= 1e-9

    def test_symmetric_spectrum_range(self, blobs):
        lap = laplacian(gaussian_similarity(blobs[0], 5.0), SYMMETRIC)
        lam = jacobi_eigh(lap.L).eigenvalues
        assert lam.min() >= -1e-9 and lam.max() <= 2 + 1e-9

    def test_zero_degree(self):
        with pytest.raises(ZeroDegree):
            laplacian(np.zeros((2, 2)))

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            laplacian(np.eye(2), "random-walk")


class TestJacobi:
    def test_diagonal(self):
        E = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_array_equal(E.eigenvalues, [1, 2, 3])
        np.testing.assert_array_equal(E.eigenvectors, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])

    def test_two_by_two(self):
        E = jacobi_eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(E.eigenvalues, [1, 3], atol=1e-15)
        r = 1 / np.sqrt(2)
        np.testing.assert_allclose(E.eigenvectors[:, 0], [r, -r], atol=1e-15)
        np.testing.assert_allclose(E.eigenvectors[:, 1], [r, r], atol=1e-15)

    @pytest.mark.parametrize("seed", range(10))
    def test_three_by_three_characteristic_roots(self, seed):
        A = np.random.default_rng(seed).normal(size=(3, 3))
        A = A + A.T
        np.testing.assert_allclose(jacobi_eigh(A).eigenvalues, sym3_eigenvalues(A.tolist()), atol=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 5, 50])
    def test_random_reconstruction(self, n):
        A = np.random.default_rng(n).normal(size=(n, n))
        A = A + A.T
        E = jacobi_eigh(A)
        V, lam = E.eigenvectors, E.eigenvalues
        assert np.all(np.diff(lam) >= 0)
        assert np.abs(V.T @ V - np.eye(n)).max() <= 1e-8
        assert np.abs(A - V @ np.diag(lam) @ V.T).max() <= 1e-8 * max(1, np.abs(A).max())

    def test_sign_convention(self):
        A = np.random.default_rng(3).normal(size=(8, 8))
        V = jacobi_eigh(A + A.T).eigenvectors
        lead = V[np.argmax(np.abs(V), axis=0), np.arange(8)]
        assert np.all(lead > 0)

    def test_deterministic_bits(self, blobs):
        L = laplacian(gaussian_similarity(blobs[0], 3.0)).L
        a, b = jacobi_eigh(L), jacobi_eigh(L.copy())
        assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()
        assert a.eigenvectors.tobytes() == b.eigenvectors.tobytes()

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetric):
            jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_sweep_cap(self):
        A = np.random.default_rng(0).normal(size=(6, 6))
        with pytest.raises(NoConvergence) as exc:
            jacobi_eigh(A + A.T, max_sweeps=1)
        assert exc.value.residual > 0

    def test_degenerate_subspace(self):
        # repeated eigenvalue: compare projectors, not vectors
        Q, _ = np.linalg.qr(np.random.default_rng(1).normal(size=(5, 5)))
        lam = np.array([1.0, 1.0, 1.0, 4.0, 9.0])
        A = Q @ np.diag(lam) @ Q.T
        A = 0.5 * (A + A.T)
        E = jacobi_eigh(A)
        np.testing.assert_allclose(projector(E.eigenvectors[:, :3]), projector(Q[:, :3]), atol=1e-9)

    @given(st.integers(0, 2**31), st.integers(2, 12))
    @settings(max_examples=40, deadline=None)
    def test_permutation_equivariance(self, seed, n):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(n, 2))
        perm = rng.permutation(n)
        S = gaussian_similarity(X, 1.0).S
        Sp = S[np.ix_(perm, perm)]
        Ea, Eb = jacobi_eigh(laplacian(S).L), jacobi_eigh(laplacian(Sp).L)
        np.testing.assert_allclose(Ea.eigenvalues, Eb.eigenvalues, atol=1e-10)
        # rows permute with the entities; check via spectral projectors on separated eigenvalues
        lam = Ea.eigenvalues
        for j in range(n):
            gap = min([abs(lam[j] - lam[i]) for i in range(n) if i != j] or [1])
            if gap > 1e-6:
                Pa = np.outer(Ea.eigenvectors[:, j], Ea.eigenvectors[:, j])[np.ix_(perm, perm)]
                Pb = np.outer(Eb.eigenvectors[:, j], Eb.eigenvectors[:, j])
                np.testing.assert_allclose(Pa, Pb, atol=1e-7)


class TestEmbed:
    def test_full_basis(self, blobs):
        E = jacobi_eigh(laplacian(gaussian_similarity(blobs[0], 3.0)).L)
        U = embed(E, E.eigenvalues.size, False).U
        np.testing.assert_allclose(U.T @ U, np.eye(U.shape[0]), atol=1e-8)

    def test_three_blocks_rows_collapse(self):
        S = block_affinity([3, 3, 3], seed=4)
        E = eigendecompose_symmetric(laplacian(S, "sym"))
        emb = embed(E, 3, True)
        U = emb.U
        for b in range(3):
            rows = U[3 * b:3 * b + 3]
            np.testing.assert_allclose(rows, np.broadcast_to(rows[0], rows.shape), atol=1e-8)
        np.testing.assert_allclose(np.linalg.norm(U, axis=1), 1, atol=1e-9)
        assert emb.row_normalized and emb.k == 3

    def test_zero_rows_stay_zero(self):
        from tradecluster.spectral import EigenSystem
        V = np.array([[1.0, 0.0], [0.0, 0.0]])
        U = embed(EigenSystem(np.array([0.0, 1.0]), V), 1, True).U
        np.testing.assert_array_equal(U, [[1.0], [0.0]])

    @pytest.mark.parametrize("k", [0, 4])
    def test_k_out_of_range(self, k):
        with pytest.raises(KOutOfRange):
            embed(jacobi_eigh(np.eye(3)), k, False)
