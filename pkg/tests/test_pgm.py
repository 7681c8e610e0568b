"""Netpbm image reading and writing."""

import numpy as np
import pytest

from rbfmat import read_image, write_pgm


@pytest.fixture
def pixels():
    rng = np.random.default_rng(120)
    return rng.integers(0, 256, (9, 13)).astype(np.uint8)


class TestWriteReadRoundTrip:
    def test_binary_round_trip(self, tmp_path, pixels):
        path = tmp_path / "img.pgm"
        write_pgm(path, pixels, binary=True)
        assert path.read_bytes().startswith(b"P5\n13 9\n255\n")
        assert np.array_equal(read_image(path), pixels)

    def test_ascii_round_trip(self, tmp_path, pixels):
        path = tmp_path / "img.pgm"
        write_pgm(path, pixels, binary=False)
        assert path.read_bytes().startswith(b"P2\n13 9\n255\n")
        assert np.array_equal(read_image(path), pixels)

    def test_write_validates_pixels(self, tmp_path):
        with pytest.raises(ValueError):
            write_pgm(tmp_path / "bad.pgm", np.array([1, 2, 3]))
        with pytest.raises(ValueError):
            write_pgm(tmp_path / "bad.pgm", np.array([[300]]))


class TestHeaderParsing:
    def test_comments_and_whitespace(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P2 # magic\n# a comment line\n 2\t2 # size\n255\n"
                         b"0 10\n20 30\n")
        assert np.array_equal(read_image(path), [[0, 10], [20, 30]])

    def test_rejects_unknown_magic(self, tmp_path):
        path = tmp_path / "img.pbm"
        path.write_bytes(b"P1\n2 2\n1\n0 1 1 0\n")
        with pytest.raises(ValueError):
            read_image(path)

    def test_rejects_truncated_header(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P5\n4 4\n")
        with pytest.raises(ValueError):
            read_image(path)

    def test_rejects_bad_dimensions(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P5\n0 4\n255\n")
        with pytest.raises(ValueError):
            read_image(path)
        path.write_bytes(b"P5\nw h\n255\n")
        with pytest.raises(ValueError):
            read_image(path)


class TestSampleHandling:
    def test_rejects_short_binary_body(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P5\n3 3\n255\n" + bytes(8))
        with pytest.raises(ValueError):
            read_image(path)

    def test_rejects_ascii_sample_above_maxval(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P2\n2 1\n100\n5 101\n")
        with pytest.raises(ValueError):
            read_image(path)

    def test_rescales_other_maxval(self, tmp_path):
        # maxval 100: sample 40 maps to round(40 * 255 / 100) = 102
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P2\n3 1\n100\n0 40 100\n")
        assert np.array_equal(read_image(path), [[0, 102, 255]])

    def test_sixteen_bit_binary_samples(self, tmp_path):
        path = tmp_path / "img.pgm"
        samples = np.array([0, 65535, 32768], dtype=">u2")
        path.write_bytes(b"P5\n3 1\n65535\n" + samples.tobytes())
        out = read_image(path)
        assert np.array_equal(out, [[0, 255, 128]])


class TestColorConversion:
    def test_ascii_color_luminance(self, tmp_path):
        # pure red, green, blue pixels map through 0.299/0.587/0.114
        path = tmp_path / "img.ppm"
        path.write_bytes(b"P3\n3 1\n255\n255 0 0  0 255 0  0 0 255\n")
        expected = np.rint(np.array([[0.299, 0.587, 0.114]]) * 255)
        assert np.array_equal(read_image(path), expected.astype(np.uint8))

    def test_binary_color_round_trip_of_gray_pixels(self, tmp_path):
        # equal channels reduce to the shared gray value
        path = tmp_path / "img.ppm"
        body = bytes([7, 7, 7, 200, 200, 200])
        path.write_bytes(b"P6\n2 1\n255\n" + body)
        assert np.array_equal(read_image(path), [[7, 200]])
