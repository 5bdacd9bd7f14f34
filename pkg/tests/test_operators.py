import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import basis_vector, pt_by_loops, random_hermitian, random_matrix
from pptdistill.errors import NotHermitianError
from pptdistill.operators import (
    BipartiteOperator,
    as_operator,
    flip,
    hermitian_part,
    identity,
    kron,
    max_ent_projector,
    op_norm,
    partial_transpose,
    positive_negative_parts,
    psd_check,
    spectral,
    sym_antisym_projectors,
    trace_norm,
)


def unit(n, r, c):
    e = np.zeros((n, n))
    e[r, c] = 1.0
    return e


class TestKron:
    def test_identity(self):
        k = kron(np.eye(2), np.eye(2))
        assert k.dims == (2, 2)
        assert np.array_equal(k.matrix, np.eye(4))

    def test_single_entry_bookkeeping(self):
        k = kron(unit(2, 0, 1), unit(2, 1, 0)).matrix
        assert k[1, 2] == 1.0
        assert np.count_nonzero(k) == 1

    def test_sum_of_swaps_is_flip(self):
        total = sum(kron(unit(2, i, j), unit(2, j, i)).matrix for i in range(2) for j in range(2))
        f = flip(2).matrix
        # defining action on every product basis vector
        for a in range(2):
            for b in range(2):
                v = np.kron(basis_vector(2, a), basis_vector(2, b))
                assert np.array_equal(f @ v, np.kron(basis_vector(2, b), basis_vector(2, a)))
        assert np.array_equal(total, f)

    def test_unequal_factors(self):
        k = kron(np.eye(2), np.eye(3))
        assert k.dims == (2, 3)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            kron(np.ones((2, 3)), np.eye(2))


class TestPartialTranspose:
    @pytest.mark.parametrize("da,db", [(2, 2), (2, 3), (3, 2), (3, 3), (1, 4)])
    def test_matches_index_formula(self, rng, da, db):
        x = random_matrix(rng, da, db)
        assert np.array_equal(partial_transpose(x).matrix, pt_by_loops(x.matrix, da, db))

    def test_involution_is_exact(self, rng):
        x = random_matrix(rng, 3, 4)
        assert np.array_equal(partial_transpose(partial_transpose(x)).matrix, x.matrix)

    def test_product_case(self, rng):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert np.array_equal(partial_transpose(kron(a, b)).matrix, kron(a, b.T).matrix)

    def test_trace_and_frobenius_preserved(self, rng):
        x = random_matrix(rng, 3, 3)
        y = partial_transpose(x)
        assert y.trace() == pytest.approx(x.trace(), abs=1e-13)
        # same multiset of entries, so the Frobenius norm is identical
        assert np.array_equal(np.sort_complex(y.matrix.ravel()), np.sort_complex(x.matrix.ravel()))
        assert np.linalg.norm(y.matrix) == pytest.approx(np.linalg.norm(x.matrix), rel=1e-15)

    def test_qutip_style_reference(self):
        rho = BipartiteOperator(2, 2, np.arange(16).reshape(4, 4))
        expected = np.array([[0, 4, 2, 6], [1, 5, 3, 7], [8, 12, 10, 14], [9, 13, 11, 15]])
        assert np.array_equal(partial_transpose(rho).matrix, expected)

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_flip_identity_exact(self, d):
        assert np.array_equal(partial_transpose(flip(d)).matrix, (d * max_ent_projector(d)).matrix)

    @given(seed=st.integers(0, 2**32 - 1), da=st.integers(1, 4), db=st.integers(1, 4))
    @settings(max_examples=40, deadline=None)
    def test_trace_pairing(self, seed, da, db):
        r = np.random.default_rng(seed)
        x, y = random_hermitian(r, da, db), random_hermitian(r, da, db)
        lhs = np.trace(partial_transpose(x).matrix @ partial_transpose(y).matrix)
        rhs = np.trace(x.matrix @ y.matrix)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


class TestCanonicalOperators:
    def test_flip_two(self):
        expected = np.eye(4)[[0, 2, 1, 3]]
        assert np.array_equal(flip(2).matrix, expected)

    @pytest.mark.parametrize("d", [1, 2, 3, 5])
    def test_flip_involution_and_trace(self, d):
        f = flip(d).matrix
        assert np.array_equal(f @ f, np.eye(d * d))
        assert np.trace(f) == d

    def test_flip_zero_rejected(self):
        with pytest.raises(ValueError):
            flip(0)

    def test_max_ent_two(self):
        p = max_ent_projector(2).matrix
        expected = np.zeros((4, 4))
        for r in (0, 3):
            for c in (0, 3):
                expected[r, c] = 0.5
        assert np.allclose(p, expected, atol=1e-15, rtol=0)

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_max_ent_projector(self, m):
        p = max_ent_projector(m).matrix
        assert np.trace(p).real == pytest.approx(1.0, abs=1e-14)
        assert np.allclose(p @ p, p, atol=1e-14)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_max_ent_partial_transpose_is_flip_over_m(self, m):
        assert partial_transpose(max_ent_projector(m)).allclose(flip(m).matrix / m, atol=1e-15)

    def test_max_ent_zero_rejected(self):
        with pytest.raises(ValueError):
            max_ent_projector(0)

    @pytest.mark.parametrize("d,r_sym,r_anti", [(2, 3, 1), (3, 6, 3), (4, 10, 6), (5, 15, 10), (6, 21, 15)])
    def test_sym_antisym(self, d, r_sym, r_anti):
        ps, pa = sym_antisym_projectors(d)
        assert np.trace(ps.matrix).real == r_sym
        assert np.trace(pa.matrix).real == r_anti
        assert np.array_equal((ps + pa).matrix, np.eye(d * d))
        assert np.allclose(ps.matrix @ pa.matrix, 0)
        assert np.array_equal(ps.matrix @ ps.matrix, ps.matrix)
        assert np.array_equal(pa.matrix @ pa.matrix, pa.matrix)


class TestSpectral:
    def test_identity(self):
        assert np.allclose(spectral(identity(2, 3)).eigenvalues, 1.0)

    def test_flip_two(self):
        assert np.allclose(spectral(flip(2)).eigenvalues, [-1, 1, 1, 1], atol=1e-14)

    def test_diagonal_plain_array(self):
        dec = spectral(np.diag([3.0, -1.0]))
        assert np.allclose(dec.eigenvalues, [-1, 3])

    @pytest.mark.parametrize("da,db", [(2, 2), (3, 3), (4, 4), (6, 6), (5, 7)])
    def test_reconstruction_and_orthonormality(self, rng, da, db):
        h = random_hermitian(rng, da, db)
        dec = spectral(h)
        err = np.max(np.abs(dec.reconstruct().matrix - h.matrix))
        assert err < 1e-10 * op_norm(h)
        v = dec.eigenvectors
        assert np.allclose(v.conj().T @ v, np.eye(v.shape[1]), atol=1e-12)
        assert np.all(np.diff(dec.eigenvalues) >= 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            spectral(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_symmetrizes_within_tolerance(self):
        x = np.array([[1.0, 0.5 + 1e-13], [0.5, 2.0]])
        assert np.allclose(hermitian_part(x).matrix, hermitian_part(x).matrix.conj().T, atol=0)


class TestNorms:
    def test_trace_norm_of_state(self):
        rho = np.diag([0.5, 0.25, 0.25, 0.0])
        assert trace_norm(kron(np.eye(1), rho)) == pytest.approx(1.0)

    def test_op_norm(self):
        assert op_norm(identity(2, 2)) == pytest.approx(1.0)
        assert op_norm(BipartiteOperator(2, 2, np.zeros((4, 4)))) == 0.0

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_op_norm_max_ent_pt(self, d):
        assert op_norm(partial_transpose(max_ent_projector(d))) == pytest.approx(1 / d, abs=1e-14)

    def test_non_hermitian_rejected(self):
        with pytest.raises(NotHermitianError):
            trace_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(NotHermitianError):
            op_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestPositiveNegativeParts:
    def test_psd_input(self, rng):
        g = random_matrix(rng, 2, 2).matrix
        h = BipartiteOperator(2, 2, g @ g.conj().T)
        pos, neg = positive_negative_parts(h)
        assert pos.allclose(h, atol=1e-12)
        assert np.allclose(neg.matrix, 0, atol=1e-14)

    def test_diagonal(self):
        pos, neg = positive_negative_parts(as_operator(np.diag([2.0, -3.0])))
        assert np.allclose(pos.matrix, np.diag([2, 0]))
        assert np.allclose(neg.matrix, np.diag([0, 3]))

    def test_singlet_negative_part(self):
        _, pa = sym_antisym_projectors(2)
        pos, neg = positive_negative_parts(partial_transpose(pa))
        # singlet^T2 = 1/2 - P_2, negative part is half the maximally entangled projector
        assert neg.allclose(max_ent_projector(2).matrix / 2, atol=1e-14)
        assert np.trace(neg.matrix).real == pytest.approx(0.5, abs=1e-14)
        assert np.allclose(pos.matrix @ neg.matrix, 0, atol=1e-14)

    def test_random_split(self, rng):
        h = random_hermitian(rng, 3, 3)
        pos, neg = positive_negative_parts(h)
        assert (pos - neg).allclose(h, atol=1e-12)
        assert psd_check(pos) and psd_check(neg)
        assert np.allclose(pos.matrix @ neg.matrix, 0, atol=1e-12)

    def test_numerical_zeros_dropped(self):
        pos, neg = positive_negative_parts(as_operator(np.diag([1.0, -1e-13])))
        assert np.count_nonzero(neg.matrix) == 0


class TestPsdCheck:
    def test_cases(self):
        assert psd_check(identity(2, 2), 1e-9)
        assert not psd_check(flip(2), 1e-9)
        assert psd_check(BipartiteOperator(2, 2, np.zeros((4, 4))), 0.0)

    def test_tolerance_scales_with_norm(self):
        assert psd_check(as_operator(np.diag([100.0, -5e-8])), 1e-9)
        assert not psd_check(as_operator(np.diag([1.0, -5e-8])), 1e-9)


def test_operator_is_immutable():
    x = identity(2, 2)
    with pytest.raises(ValueError):
        x.matrix[0, 0] = 2.0


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError, match="expected side 4"):
        BipartiteOperator(2, 2, np.eye(3))
