"""Reading and writing netpbm grayscale images.

Supports PGM in ASCII (P2) and binary (P5) forms, plus reading color PPM
(P3/P6) with conversion to grayscale by the usual luminance weights
0.299 R + 0.587 G + 0.114 B.  Images are 2-D uint8 arrays indexed
[row, column]; files with another maxval are rescaled onto 0..255.
"""

from __future__ import annotations

import numpy as np

_GRAY_MAGICS = (b"P2", b"P5")
_COLOR_MAGICS = (b"P3", b"P6")
_ASCII_MAGICS = (b"P2", b"P3")


def _parse_header(data: bytes):
    """Return (magic, width, height, maxval, offset past the header)."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ValueError("truncated netpbm header")
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    magic = tokens[0]
    if magic not in _GRAY_MAGICS + _COLOR_MAGICS:
        raise ValueError(f"unsupported netpbm magic {magic!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ValueError("non-numeric netpbm dimensions") from None
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be positive")
    if not 1 <= maxval <= 65535:
        raise ValueError(f"maxval must be in [1, 65535], got {maxval}")
    # exactly one whitespace byte separates the header from binary samples
    return magic, width, height, maxval, pos + 1


def _read_samples(data, magic, offset, count, maxval) -> np.ndarray:
    if magic in _ASCII_MAGICS:
        text = data[offset:].decode("ascii")
        lines = [line.split("#", 1)[0] for line in text.splitlines()]
        fields = " ".join(lines).split()
        if len(fields) != count:
            raise ValueError(f"expected {count} samples, found {len(fields)}")
        samples = np.array([int(f) for f in fields], dtype=np.int64)
    else:
        wide = maxval > 255
        need = count * (2 if wide else 1)
        raw = data[offset : offset + need]
        if len(raw) != need:
            raise ValueError(f"expected {need} sample bytes, found {len(raw)}")
        dtype = np.dtype(">u2") if wide else np.dtype("u1")
        samples = np.frombuffer(raw, dtype=dtype).astype(np.int64)
    if samples.size and int(samples.max()) > maxval:
        raise ValueError("sample exceeds declared maxval")
    return samples


def _rescale(samples: np.ndarray, maxval: int) -> np.ndarray:
    if maxval == 255:
        return samples.astype(np.uint8)
    return np.rint(samples * (255.0 / maxval)).astype(np.uint8)


def read_image(path) -> np.ndarray:
    """Read a PGM or PPM file as (height, width) uint8 grayscale."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic, width, height, maxval, offset = _parse_header(data)
    channels = 3 if magic in _COLOR_MAGICS else 1
    samples = _read_samples(data, magic, offset, width * height * channels, maxval)
    if channels == 1:
        return _rescale(samples, maxval).reshape(height, width)
    rgb = samples.reshape(height, width, 3) * (255.0 / maxval)
    gray = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    return np.rint(gray).astype(np.uint8)


def write_pgm(path, pixels, binary: bool = True) -> None:
    """Write uint8 grayscale pixels as P5 (binary) or P2 (ASCII), maxval 255."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 2 or pixels.size == 0:
        raise ValueError("pixels must be a nonempty 2-D array")
    if pixels.dtype != np.uint8:
        if np.any((pixels < 0) | (pixels > 255)):
            raise ValueError("pixel values must be in [0, 255]")
        pixels = pixels.astype(np.uint8)
    height, width = pixels.shape
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            fh.write(pixels.tobytes())
        else:
            fh.write(f"P2\n{width} {height}\n255\n".encode("ascii"))
            body = "\n".join(" ".join(str(v) for v in row) for row in pixels)
            fh.write(body.encode("ascii") + b"\n")
