"""Portable-map parsing and writing."""

import numpy as np
import pytest

from semrel.errors import IoError, MalformedHeader, UnsupportedFormat
from semrel.pnm import read_pnm, write_csv, write_p5


def test_p2_ascii(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P2\n3 2\n255\n0 128 255\n10 20 30\n")
    grid = read_pnm(p)
    assert grid.shape == (2, 3)
    assert grid[0, 1] == pytest.approx(128 / 255)
    assert grid[0, 2] == 1.0
    assert grid[1, 0] == pytest.approx(10 / 255)


def test_p5_binary(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 51, 102, 255]))
    grid = read_pnm(p)
    assert grid[0, 1] == pytest.approx(0.2)
    assert grid[1, 1] == 1.0


def test_p3_and_p6_use_luma(tmp_path):
    # pure red, green, blue pixels
    ascii_p = tmp_path / "a.ppm"
    ascii_p.write_bytes(b"P3\n3 1\n255\n255 0 0  0 255 0  0 0 255\n")
    raw_p = tmp_path / "b.ppm"
    raw_p.write_bytes(b"P6\n3 1\n255\n" + bytes([255, 0, 0, 0, 255, 0, 0, 0, 255]))
    for p in (ascii_p, raw_p):
        grid = read_pnm(p)
        assert grid.shape == (1, 3)
        assert grid[0, 0] == pytest.approx(0.299)
        assert grid[0, 1] == pytest.approx(0.587)
        assert grid[0, 2] == pytest.approx(0.114)


def test_comments_and_padding_in_header(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P2 # magic\n# a comment line\n  2 # width\n1\n255\n7 9\n")
    grid = read_pnm(p)
    assert grid.shape == (1, 2)
    assert grid[0, 1] == pytest.approx(9 / 255)


def test_small_maxval_scales(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P2\n2 1\n15\n0 15\n")
    grid = read_pnm(p)
    assert grid[0, 0] == 0.0 and grid[0, 1] == 1.0


def test_maxval_over_255_unsupported(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
    with pytest.raises(UnsupportedFormat):
        read_pnm(p)


def test_unknown_magic_unsupported(tmp_path):
    p = tmp_path / "a.pam"
    p.write_bytes(b"P7\nWIDTH 1\n")
    with pytest.raises(UnsupportedFormat):
        read_pnm(p)


def test_header_error_names_byte_offset(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P2\n3 x\n255\n")
    with pytest.raises(MalformedHeader, match=r"byte 5"):
        read_pnm(p)


def test_truncated_binary_raster(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5\n4 4\n255\n" + bytes(10))
    with pytest.raises(MalformedHeader, match="truncated"):
        read_pnm(p)


def test_truncated_ascii_raster(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P2\n2 2\n255\n1 2 3\n")
    with pytest.raises(MalformedHeader):
        read_pnm(p)


def test_ascii_sample_out_of_range(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P2\n2 1\n100\n5 101\n")
    with pytest.raises(MalformedHeader, match="range"):
        read_pnm(p)


def test_bad_dimensions(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P2\n0 3\n255\n")
    with pytest.raises(MalformedHeader):
        read_pnm(p)


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(IoError):
        read_pnm(tmp_path / "nope.pgm")


def test_write_p5_rounds_half_up(tmp_path):
    p = tmp_path / "out.pgm"
    # 0.5/255 boundary cases: 127.5 rounds to 128, just below stays 127
    write_p5(np.array([[127.5 / 255.0, 127.49 / 255.0, -0.2, 1.7]]), p)
    data = p.read_bytes()
    assert data.startswith(b"P5\n4 1\n255\n")
    assert list(data[-4:]) == [128, 127, 0, 255]


def test_p5_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    grid = rng.integers(0, 256, size=(5, 7)).astype(np.float64) / 255.0
    p = tmp_path / "rt.pgm"
    write_p5(grid, p)
    back = read_pnm(p)
    assert np.abs(back - grid).max() < 1e-12


def test_write_csv_full_precision(tmp_path):
    p = tmp_path / "out.csv"
    write_csv(np.array([[1.0 / 3.0, 0.0], [1.0, 2.0]]), p)
    lines = p.read_text().splitlines()
    assert lines[0] == "0.33333333333333331,0"
    assert lines[1] == "1,2"
