import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sparseops as sp
from sparseops.errors import IndexBoundsError

from helpers import random_sparse

REF = sp.create_device("reference")
OMP = sp.create_device("omp", threads=2)


class TestCooFromTriplets:
    def test_sorted_canonical(self):
        m = sp.coo_from_triplets(REF, 2, 2, [(1, 1, 3.0), (0, 0, 1.0), (0, 1, 2.0)])
        np.testing.assert_array_equal(m.row_idxs, [0, 0, 1])
        np.testing.assert_array_equal(m.col_idxs, [0, 1, 1])
        np.testing.assert_array_equal(m.values, [1.0, 2.0, 3.0])

    def test_duplicates_summed(self):
        m = sp.coo_from_triplets(REF, 2, 2, [(0, 0, 1.0), (0, 0, 2.0)])
        assert m.nnz == 1
        np.testing.assert_array_equal(m.values, [3.0])

    def test_empty(self):
        m = sp.coo_from_triplets(REF, 2, 2, [])
        assert m.nnz == 0
        assert sp.validate(m) == []

    def test_out_of_range(self):
        with pytest.raises(IndexBoundsError):
            sp.coo_from_triplets(REF, 2, 2, [(2, 0, 1.0)])
        with pytest.raises(IndexBoundsError):
            sp.coo_from_triplets(REF, 2, 2, [(0, -1, 1.0)])

    def test_explicit_zeros_kept(self):
        m = sp.coo_from_triplets(REF, 3, 3, [(0, 0, 0.0), (1, 1, 2.0)])
        assert m.nnz == 2

    @given(st.lists(
        st.tuples(st.integers(0, 19), st.integers(0, 19),
                  st.floats(-100, 100, allow_nan=False)),
        max_size=80,
    ))
    @settings(max_examples=60, deadline=None)
    def test_matches_dense_accumulation(self, triplets):
        m = sp.coo_from_triplets(REF, 20, 20, triplets)
        expect = np.zeros((20, 20))
        for i, j, v in triplets:
            expect[i, j] += v
        np.testing.assert_array_equal(m.to_dense(), expect)
        assert sp.validate(m) == []

    def test_dense_accumulation_at_full_scale(self):
        # duplicates sampled with replacement, n up to 100, nnz up to 500
        rng = np.random.default_rng(14)
        for _ in range(30):
            rows = int(rng.integers(1, 101))
            cols = int(rng.integers(1, 101))
            nnz = int(rng.integers(0, 501))
            ri = rng.integers(0, rows, size=nnz)
            ci = rng.integers(0, cols, size=nnz)
            vals = rng.uniform(-10, 10, size=nnz)
            triplets = list(zip(ri.tolist(), ci.tolist(), vals.tolist()))
            m = sp.coo_from_triplets(REF, rows, cols, triplets)
            expect = np.zeros((rows, cols))
            # accumulate in canonical (sorted, stable) order, as construction does
            order = np.lexsort((ci, ri))
            for k in order:
                expect[ri[k], ci[k]] += vals[k]
            np.testing.assert_array_equal(m.to_dense(), expect)
            assert sp.validate(m) == []


class TestConversions:
    def test_coo_to_csr_example(self):
        coo = sp.coo_from_triplets(REF, 2, 2, [(0, 0, 1.0), (0, 1, 2.0), (1, 1, 3.0)])
        csr = sp.csr_from_coo(coo)
        np.testing.assert_array_equal(csr.row_ptrs, [0, 2, 3])
        np.testing.assert_array_equal(csr.col_idxs, [0, 1, 1])
        np.testing.assert_array_equal(csr.values, [1.0, 2.0, 3.0])

    def test_empty_coo_to_csr(self):
        csr = sp.csr_from_coo(sp.coo_from_triplets(REF, 3, 3, []))
        np.testing.assert_array_equal(csr.row_ptrs, [0, 0, 0, 0])

    def test_identity_pattern(self):
        coo = sp.coo_from_triplets(REF, 3, 3, [(i, i, 1.0) for i in range(3)])
        csr = sp.csr_from_coo(coo)
        np.testing.assert_array_equal(csr.row_ptrs, [0, 1, 2, 3])
        np.testing.assert_array_equal(csr.col_idxs, [0, 1, 2])

    def test_round_trip_is_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            coo = random_sparse(REF, rng, 17, 23, 0.1, fmt="coo")
            back = sp.coo_from_csr(sp.csr_from_coo(coo))
            np.testing.assert_array_equal(back.row_idxs, coo.row_idxs)
            np.testing.assert_array_equal(back.col_idxs, coo.col_idxs)
            np.testing.assert_array_equal(back.values, coo.values)
            csr = sp.csr_from_coo(coo)
            csr_back = sp.csr_from_coo(sp.coo_from_csr(csr))
            np.testing.assert_array_equal(csr_back.row_ptrs, csr.row_ptrs)
            np.testing.assert_array_equal(csr_back.col_idxs, csr.col_idxs)
            np.testing.assert_array_equal(csr_back.values, csr.values)

    def test_conversion_preserves_structure(self):
        rng = np.random.default_rng(1)
        coo = random_sparse(REF, rng, 40, 40, 0.08, fmt="coo")
        csr = sp.csr_from_coo(coo)
        assert csr.nnz == coo.nnz
        counts = np.bincount(coo.row_idxs, minlength=40)
        np.testing.assert_array_equal(np.diff(csr.row_ptrs), counts)
        np.testing.assert_array_equal(csr.to_dense(), coo.to_dense())

    def test_device_and_precision_preserved(self):
        coo = sp.coo_from_triplets(OMP, 4, 4, [(0, 0, 1.0)],
                                   precision=sp.Precision.single,
                                   index_width=sp.IndexWidth.i64)
        csr = sp.csr_from_coo(coo)
        assert csr.device == OMP
        assert csr.precision is sp.Precision.single
        assert csr.index_width is sp.IndexWidth.i64
        back = sp.coo_from_csr(csr)
        assert back.device == OMP
        assert back.precision is sp.Precision.single


class TestValidate:
    def test_valid(self):
        rng = np.random.default_rng(2)
        csr = random_sparse(REF, rng, 10, 10, 0.2)
        assert sp.validate(csr) == []

    def test_decreasing_row_ptrs(self):
        m = sp.CsrMatrix(REF, 2, 2, np.array([0, 2, 1], np.int32),
                         np.array([0], np.int32), np.array([1.0]))
        violations = sp.validate(m)
        assert any("non-decreasing row_ptrs at 2" in v for v in violations)

    def test_coo_column_out_of_bounds(self):
        m = sp.CooMatrix(REF, 3, 3, np.array([0], np.int32),
                         np.array([5], np.int32), np.array([1.0]))
        violations = sp.validate(m)
        assert any("out of bounds" in v for v in violations)

    def test_coo_unsorted(self):
        m = sp.CooMatrix(REF, 3, 3, np.array([1, 0], np.int32),
                         np.array([0, 0], np.int32), np.array([1.0, 2.0]))
        assert any("sorted" in v for v in sp.validate(m))

    def test_csr_duplicate_columns(self):
        m = sp.CsrMatrix(REF, 2, 2, np.array([0, 2, 2], np.int32),
                         np.array([1, 1], np.int32), np.array([1.0, 2.0]))
        assert any("strictly increasing" in v for v in sp.validate(m))
