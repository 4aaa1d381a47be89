"""Matrix layer: RREF, null spaces, solvers, and the incremental tracker."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsecast import gf, gfmatrix
from sparsecast.gf import field_spec
from sparsecast.gfmatrix import (
    DimensionMismatch,
    MatrixGF,
    NotInnovative,
    NullTracker,
    OpCounter,
    format_matrix,
    in_row_space,
    null_space_basis,
    parse_matrix,
    rref,
    solve_dense,
    solve_sparse,
)


def random_matrix(rng, n_rows, n_cols, f):
    return MatrixGF(rng.integers(0, f.q, size=(n_rows, n_cols)), f)


def spans_equal(a: MatrixGF, b: MatrixGF) -> bool:
    ra, rb = rref(a).rank, rref(b).rank
    return ra == rb == rref(a.stack(b)).rank


matrix_strategy = st.builds(
    lambda q, seed, r, c: random_matrix(np.random.default_rng(seed), r, c, field_spec(q)),
    q=st.sampled_from([2, 3, 5, 8, 256]),
    seed=st.integers(0, 2**31),
    r=st.integers(1, 6),
    c=st.integers(1, 8),
)


class TestRref:
    def test_identity(self):
        f = field_spec(5)
        m = MatrixGF.identity(4, f)
        res = rref(m)
        assert res.rref == m
        assert res.rank == 4
        assert res.pivot_cols == (0, 1, 2, 3)

    def test_gf2_hand_example(self):
        f = field_spec(2)
        m = MatrixGF([[1, 1, 1, 0, 1], [0, 1, 0, 0, 1]], f)
        res = rref(m)
        assert res.rank == 2
        # hand reduction: row0 += row1 clears column 1
        assert np.array_equal(res.rref.a, [[1, 0, 1, 0, 0], [0, 1, 0, 0, 1]])
        assert res.pivot_cols == (0, 1)

    @given(m=matrix_strategy)
    @settings(max_examples=60, deadline=None)
    def test_idempotent(self, m):
        once = rref(m)
        twice = rref(once.rref)
        assert once.rref == twice.rref
        assert once.rank == twice.rank

    def test_col_perm_realizes_block_form(self):
        f = field_spec(3)
        rng = np.random.default_rng(3)
        m = random_matrix(rng, 3, 6, f)
        res = rref(m)
        permuted = res.rref.a[:, list(res.col_perm)]
        assert np.array_equal(
            permuted[: res.rank, : res.rank], np.eye(res.rank, dtype=np.int64)
        )


class TestNullSpace:
    def test_single_unit_row(self):
        f = field_spec(7)
        n = 5
        c = MatrixGF([[1, 0, 0, 0, 0]], f)
        b = null_space_basis(c)
        assert b.n_rows == n - 1
        assert rref(b).rank == n - 1
        assert np.all(b.a[:, 0] == 0)

    def test_reduction_pair_from_clause_matrices(self):
        # B and C pairs used by the 3-SAT construction: the computed null
        # space of C must span the original B.
        f = field_spec(2)
        b_given = MatrixGF([[1, 0, 0, 0, 1], [0, 1, 0, 0, 1], [0, 0, 1, 0, 0]], f)
        c = MatrixGF([[0, 0, 0, 1, 0], [1, 1, 0, 0, 1]], f)
        b = null_space_basis(c)
        assert spans_equal(b, b_given)
        assert not np.any(c.matmul(b.transpose()).a)

    @given(m=matrix_strategy)
    @settings(max_examples=80, deadline=None)
    def test_rank_sum_and_orthogonality(self, m):
        b = null_space_basis(m)
        assert rref(m).rank + b.n_rows == m.n_cols
        assert rref(b).rank == b.n_rows
        if b.n_rows:
            assert not np.any(m.matmul(b.transpose()).a)

    def test_full_rank_gives_empty_basis(self):
        f = field_spec(2)
        b = null_space_basis(MatrixGF.identity(3, f))
        assert b.n_rows == 0 and b.n_cols == 3


class TestRowSpace:
    def test_own_rows_and_zero(self):
        f = field_spec(5)
        rng = np.random.default_rng(11)
        c = random_matrix(rng, 3, 6, f)
        for i in range(3):
            assert in_row_space(c.row(i), c)
        assert in_row_space(np.zeros(6, dtype=np.int64), c)

    def test_outside_vector(self):
        f = field_spec(2)
        c = MatrixGF([[1, 0]], f)
        assert not in_row_space([1, 1], c)

    def test_dimension_mismatch(self):
        f = field_spec(2)
        with pytest.raises(DimensionMismatch):
            in_row_space([1, 0, 0], MatrixGF([[1, 0]], f))

    def test_dual_paths_agree(self):
        rng = np.random.default_rng(23)
        for q in (2, 3, 256):
            f = field_spec(q)
            for _ in range(60):
                n = int(rng.integers(2, 7))
                c = random_matrix(rng, int(rng.integers(1, 5)), n, f)
                x = rng.integers(0, q, size=n)
                if rng.random() < 0.5:  # bias toward members
                    lam = rng.integers(0, q, size=c.n_rows)
                    x = gf.vsum(gf.vmul(lam[:, None], c.a, f), f, axis=0)
                    x = np.atleast_1d(x)
                assert in_row_space(x, c, via="rank") == in_row_space(
                    x, c, via="nullspace"
                )


class TestSolvers:
    def test_identity_system(self):
        f = field_spec(7)
        a = MatrixGF.identity(4, f)
        rhs = np.array([3, 1, 0, 6])
        assert np.array_equal(solve_dense(a, rhs), rhs)

    def test_gf2_parity_inconsistent(self):
        f = field_spec(2)
        a = MatrixGF([[1, 0], [0, 1], [1, 1]], f)
        assert solve_dense(a, [1, 1, 1]) is None
        assert solve_sparse(a, [1, 1, 1]) is None

    @given(
        q=st.sampled_from([2, 5, 256]),
        seed=st.integers(0, 2**31),
        n=st.integers(1, 8),
    )
    @settings(max_examples=60, deadline=None)
    def test_round_trip(self, q, seed, n):
        f = field_spec(q)
        rng = np.random.default_rng(seed)
        while True:
            a = random_matrix(rng, n, n, f)
            if rref(a).rank == n:
                break
        x = rng.integers(0, q, size=n)
        rhs = a.matvec(x)
        assert np.array_equal(solve_dense(a, rhs), x)
        assert np.array_equal(solve_sparse(a, rhs), x)

    def test_permutation_read_off(self):
        f = field_spec(256)
        perm = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        a = MatrixGF(perm, f)
        rhs = np.array([5, 9, 2])
        x = solve_sparse(a, rhs, weight_bound=1)
        assert np.array_equal(a.matvec(x), rhs)

    def test_weight_bound_violation(self):
        f = field_spec(2)
        a = MatrixGF([[1, 1, 1]], f)
        with pytest.raises(ValueError):
            solve_sparse(a, [1], weight_bound=2)

    def test_sparse_matches_dense_on_random_systems(self):
        rng = np.random.default_rng(99)
        for trial in range(200):
            q = 2 if trial % 2 == 0 else 256
            f = field_spec(q)
            n = int(rng.integers(3, 12))
            w = int(rng.integers(1, 4))
            rows = []
            for _ in range(int(rng.integers(2, n + 4))):
                row = np.zeros(n, dtype=np.int64)
                support = rng.choice(n, size=w, replace=False)
                row[support] = rng.integers(1, q, size=w)
                rows.append(row)
            a = MatrixGF(np.array(rows), f)
            rhs = rng.integers(0, q, size=a.n_rows)
            d = solve_dense(a, rhs)
            s = solve_sparse(a, rhs)
            if d is None:
                assert s is None
            else:
                assert np.array_equal(d, s)

    def test_sparse_op_counter_beats_dense(self):
        f = field_spec(256)
        rng = np.random.default_rng(5)
        n, w = 64, 4
        rows = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            support = rng.choice(n, size=w, replace=False)
            rows[i, support] = rng.integers(1, 256, size=w)
        a = MatrixGF(rows, f)
        rhs = rng.integers(0, 256, size=n)
        dense_ops = OpCounter()
        sparse_ops = OpCounter()
        d = solve_dense(a, rhs, ops=dense_ops)
        s = solve_sparse(a, rhs, weight_bound=w, ops=sparse_ops)
        if d is not None:
            assert np.array_equal(d, s)
        assert sparse_ops.total < 0.25 * dense_ops.total


class TestNullTracker:
    def test_initial_state(self):
        f = field_spec(3)
        t = NullTracker.new(3, f)
        assert t.r == 0
        assert np.array_equal(t.c_tilde, np.eye(3, dtype=np.int64))
        assert np.array_equal(t.b_tilde_inv, np.eye(3, dtype=np.int64))
        assert t.is_innovative([0, 2, 1])
        assert not t.is_innovative([0, 0, 0])

    def test_gf2_hand_update(self):
        f = field_spec(2)
        t = NullTracker.new(2, f)
        t.update([1, 1])
        assert np.array_equal(t.c_tilde[0], [1, 1])
        prod = gfmatrix.matmul_arrays(t.c_tilde, t.b_tilde_inv, f)
        assert np.array_equal(prod, np.eye(2, dtype=np.int64))

    def test_not_innovative_raises(self):
        f = field_spec(2)
        t = NullTracker.new(2, f)
        t.update([1, 0])
        with pytest.raises(NotInnovative):
            t.update([1, 0])

    def test_full_rank_rejects_everything(self):
        f = field_spec(5)
        t = NullTracker.new(2, f)
        t.update([1, 2])
        t.update([0, 1])
        assert t.r == 2
        for v in ([1, 0], [4, 4], [0, 3]):
            assert not t.is_innovative(v)

    @pytest.mark.parametrize("q", [2, 5, 256])
    def test_random_fill_to_full_rank(self, q):
        f = field_spec(q)
        rng = np.random.default_rng(q)
        n = 6
        t = NullTracker.new(n, f)
        while t.r < n:
            w = rng.integers(0, q, size=n)
            received = MatrixGF(t.received_rows().copy(), f, _validate=False)
            batch = not in_row_space(w, received) if t.r else bool(np.any(w))
            assert t.is_innovative(w) == batch
            if batch:
                r_before = t.r
                t.update(w)
                assert t.r == r_before + 1
                prod = gfmatrix.matmul_arrays(t.c_tilde, t.b_tilde_inv, f)
                assert np.array_equal(prod, np.eye(n, dtype=np.int64))
                # incremental basis spans the batch-computed null space
                basis = MatrixGF(t.null_basis().copy(), f, _validate=False)
                batch_basis = null_space_basis(
                    MatrixGF(t.received_rows().copy(), f, _validate=False)
                )
                if basis.n_rows:
                    assert spans_equal(basis, batch_basis)
        assert rref(MatrixGF(t.c_tilde, f, _validate=False)).rank == n

    def test_agrees_with_batch_membership_on_random_traces(self):
        rng = np.random.default_rng(1234)
        checked = 0
        while checked < 500:
            q = int(rng.choice([2, 3, 256]))
            f = field_spec(q)
            n = int(rng.integers(2, 8))
            t = NullTracker.new(n, f)
            for _ in range(int(rng.integers(1, 12))):
                w = rng.integers(0, q, size=n)
                rows = MatrixGF(t.received_rows().copy(), f, _validate=False)
                if t.r == 0:
                    expected = bool(np.any(w))
                else:
                    expected = not in_row_space(w, rows)
                assert t.is_innovative(w) == expected
                checked += 1
                if expected and t.r < n:
                    t.update(w)

    def test_received_rows_keep_original_coordinates(self):
        f = field_spec(5)
        rng = np.random.default_rng(8)
        n = 5
        t = NullTracker.new(n, f)
        sent = []
        while t.r < n:
            w = rng.integers(0, 5, size=n)
            if t.is_innovative(w):
                t.update(w)
                sent.append(w.copy())
        assert np.array_equal(t.received_rows(), np.array(sent))


class TestMatrixFormat:
    def test_round_trip(self):
        f = field_spec(256)
        rng = np.random.default_rng(2)
        m = random_matrix(rng, 3, 5, f)
        again = parse_matrix(format_matrix(m))
        assert again == m

    def test_poly_header(self):
        f = field_spec(256, poly=0x11B)
        m = MatrixGF([[1, 2], [3, 4]], f)
        text = format_matrix(m)
        assert "poly=0x11b" in text
        assert parse_matrix(text) == m

    def test_bad_header(self):
        with pytest.raises(ValueError):
            parse_matrix("2 2\n1 0\n0 1\n")
