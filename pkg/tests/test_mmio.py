import numpy as np
import pytest

import sparseops as sp
from sparseops.errors import (
    EntryCountError,
    IndexBoundsError,
    MalformedBannerError,
    MalformedSizeError,
    MatrixMarketError,
    UnsupportedFieldError,
)
from sparseops.mmio import DuplicateEntryWarning

from helpers import random_sparse

REF = sp.create_device("reference")


def write(tmp_path, body, name="m.mtx"):
    path = tmp_path / name
    path.write_text(body)
    return path


class TestRead:
    def test_basic_coordinate(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real general\n"
                     "2 2 2\n1 1 1.0\n2 2 3.0\n")
        m = sp.read_matrix_market(REF, path, format="Csr")
        assert isinstance(m, sp.CsrMatrix)
        np.testing.assert_array_equal(m.to_dense(), [[1.0, 0.0], [0.0, 3.0]])

    def test_coo_target(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real general\n"
                     "2 2 1\n2 1 -4.5\n")
        m = sp.read_matrix_market(REF, path, format="Coo")
        assert isinstance(m, sp.CooMatrix)
        np.testing.assert_array_equal(m.to_dense(), [[0.0, 0.0], [-4.5, 0.0]])

    def test_symmetric_expansion(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real symmetric\n"
                     "2 2 3\n1 1 2.0\n2 1 -1.0\n2 2 2.0\n")
        m = sp.read_matrix_market(REF, path)
        dense = m.to_dense()
        np.testing.assert_array_equal(dense, [[2.0, -1.0], [-1.0, 2.0]])
        np.testing.assert_array_equal(dense, dense.T)

    def test_symmetric_mirrors_off_diagonals_only(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real symmetric\n"
                     "2 2 2\n1 1 2.0\n2 1 -1.0\n")
        m = sp.read_matrix_market(REF, path)
        np.testing.assert_array_equal(m.to_dense(), [[2.0, -1.0], [-1.0, 0.0]])

    def test_skew_symmetric_negates(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real skew-symmetric\n"
                     "2 2 1\n2 1 5.0\n")
        m = sp.read_matrix_market(REF, path)
        np.testing.assert_array_equal(m.to_dense(), [[0.0, -5.0], [5.0, 0.0]])

    def test_banner_case_insensitive(self, tmp_path):
        path = write(tmp_path,
                     "%%matrixmarket MATRIX Coordinate Real General\n1 1 1\n1 1 2.0\n")
        m = sp.read_matrix_market(REF, path)
        np.testing.assert_array_equal(m.to_dense(), [[2.0]])

    def test_bad_banner(self, tmp_path):
        path = write(tmp_path, "%%Matrix matrix coordinate real general\n1 1 0\n")
        with pytest.raises(MalformedBannerError):
            sp.read_matrix_market(REF, path)

    def test_comments_and_blank_lines(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real general\n"
                     "% a comment\n\n2 2 2\n% another\n1 1 1.5\n\n2 2 2.5\n")
        m = sp.read_matrix_market(REF, path)
        np.testing.assert_array_equal(m.to_dense(), [[1.5, 0.0], [0.0, 2.5]])

    def test_pattern_reads_ones(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate pattern general\n"
                     "2 2 2\n1 2\n2 1\n")
        m = sp.read_matrix_market(REF, path)
        np.testing.assert_array_equal(m.to_dense(), [[0.0, 1.0], [1.0, 0.0]])

    def test_integer_field(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate integer general\n"
                     "1 2 2\n1 1 3\n1 2 -7\n")
        m = sp.read_matrix_market(REF, path, precision=sp.Precision.single)
        assert m.values.dtype == np.float32
        np.testing.assert_array_equal(m.to_dense(), [[3.0, -7.0]])

    def test_complex_rejected(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0 0.0\n")
        with pytest.raises(UnsupportedFieldError):
            sp.read_matrix_market(REF, path)

    def test_count_mismatch(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n")
        with pytest.raises(EntryCountError):
            sp.read_matrix_market(REF, path)

    def test_index_out_of_bounds(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n")
        with pytest.raises(IndexBoundsError):
            sp.read_matrix_market(REF, path)

    def test_bad_size_line(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real general\n2 2\n")
        with pytest.raises(MalformedSizeError):
            sp.read_matrix_market(REF, path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            sp.read_matrix_market(REF, tmp_path / "nope.mtx")

    def test_duplicates_warn_and_sum(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real general\n"
                     "2 2 2\n1 1 1.0\n1 1 2.0\n")
        with pytest.warns(DuplicateEntryWarning):
            m = sp.read_matrix_market(REF, path)
        np.testing.assert_array_equal(m.to_dense(), [[3.0, 0.0], [0.0, 0.0]])

    def test_array_format(self, tmp_path):
        # array bodies are column-major
        path = write(tmp_path,
                     "%%MatrixMarket matrix array real general\n"
                     "2 2\n1.0\n2.0\n3.0\n4.0\n")
        m = sp.read_matrix_market(REF, path)
        np.testing.assert_array_equal(m.to_dense(), [[1.0, 3.0], [2.0, 4.0]])

    def test_array_symmetric(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix array real symmetric\n"
                     "2 2\n1.0\n2.0\n3.0\n")
        m = sp.read_matrix_market(REF, path)
        np.testing.assert_array_equal(m.to_dense(), [[1.0, 2.0], [2.0, 3.0]])

    def test_garbage_entry(self, tmp_path):
        path = write(tmp_path,
                     "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 abc\n")
        with pytest.raises(MatrixMarketError):
            sp.read_matrix_market(REF, path)


class TestWrite:
    def test_exact_output(self, tmp_path):
        m = sp.csr_from_dense(REF, np.array([[1.0, 0.0], [0.0, 3.0]]))
        path = tmp_path / "out.mtx"
        sp.write_matrix_market(m, path)
        assert path.read_text() == (
            "%%MatrixMarket matrix coordinate real general\n"
            "2 2 2\n1 1 1\n2 2 3\n"
        )

    def test_empty_matrix(self, tmp_path):
        m = sp.coo_from_triplets(REF, 3, 3, [])
        path = tmp_path / "empty.mtx"
        sp.write_matrix_market(m, path)
        assert path.read_text() == (
            "%%MatrixMarket matrix coordinate real general\n3 3 0\n"
        )

    def test_round_trip_50x50(self, tmp_path):
        rng = np.random.default_rng(3)
        m = random_sparse(REF, rng, 50, 50, 0.05)
        path = tmp_path / "rt.mtx"
        sp.write_matrix_market(m, path)
        back = sp.read_matrix_market(REF, path)
        np.testing.assert_array_equal(back.row_ptrs, m.row_ptrs)
        np.testing.assert_array_equal(back.col_idxs, m.col_idxs)
        np.testing.assert_array_equal(back.values, m.values)

    def test_round_trip_bit_exact_doubles(self, tmp_path):
        awkward = [0.1, 1.0 / 3.0, np.pi, 1e-300, 1e300, -2.2250738585072014e-308]
        m = sp.coo_from_triplets(REF, 6, 1, [(i, 0, v) for i, v in enumerate(awkward)])
        path = tmp_path / "bits.mtx"
        sp.write_matrix_market(m, path)
        back = sp.read_matrix_market(REF, path, format="Coo")
        np.testing.assert_array_equal(back.values, m.values)
