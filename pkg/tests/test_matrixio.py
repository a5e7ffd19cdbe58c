import numpy as np
import pytest

from mkflats.exceptions import ParseError
from mkflats.matrixio import (
    parse_row,
    read_bases,
    read_labels,
    read_matrix,
    write_bases,
    write_labels,
    write_matrix,
)
from mkflats.synth import OUTLIER


def test_separators():
    assert parse_row("1, 2 ,3\t4", 1) == [1.0, 2.0, 3.0, 4.0]
    assert parse_row("  -1e-3  5 ", 1) == [-0.001, 5.0]


def test_bad_token_names_line():
    with pytest.raises(ParseError, match="line 7"):
        parse_row("1 two 3", 7)


def test_read_skips_comments_and_blanks(tmp_path):
    f = tmp_path / "m.txt"
    f.write_text("# header\n1 2\n\n3,4\n")
    np.testing.assert_array_equal(read_matrix(f), [[1, 2], [3, 4]])


def test_ragged_rows(tmp_path):
    f = tmp_path / "m.txt"
    f.write_text("1 2\n3 4 5\n")
    with pytest.raises(ParseError, match="line 2"):
        read_matrix(f)


def test_empty_file(tmp_path):
    f = tmp_path / "m.txt"
    f.write_text("# nothing\n")
    with pytest.raises(ParseError):
        read_matrix(f)


def test_matrix_round_trip_exact(tmp_path, rng):
    M = rng.standard_normal((7, 4))
    write_matrix(tmp_path / "m.txt", M, header="random")
    np.testing.assert_array_equal(read_matrix(tmp_path / "m.txt"), M)


def test_bases_round_trip(tmp_path, rng):
    B = rng.standard_normal((3, 2, 5))
    write_bases(tmp_path / "b.txt", B)
    np.testing.assert_array_equal(read_bases(tmp_path / "b.txt", 3), B)


def test_labels_are_one_based_on_disk(tmp_path):
    labels = np.array([0, 2, OUTLIER, 1])
    write_labels(tmp_path / "l.txt", labels)
    assert (tmp_path / "l.txt").read_text().split() == ["1", "3", "0", "2"]
    np.testing.assert_array_equal(read_labels(tmp_path / "l.txt"), labels)
