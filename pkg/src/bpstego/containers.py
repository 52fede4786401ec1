"""File containers: JCOV coefficient files and binary PGM images."""

import struct

import numpy as np

from .jpegmodel import CoeffImage, ParameterError, QuantTable, SpatialImage

__all__ = [
    "ContainerError",
    "write_jcov",
    "read_jcov",
    "write_pgm",
    "read_pgm",
]

_JCOV_MAGIC = b"JCOV"
_JCOV_VERSION = 1


class ContainerError(ValueError):
    """Raised on malformed container files."""


def write_jcov(path, c):
    """Write a CoeffImage to the big-endian JCOV container."""
    with open(path, "wb") as fh:
        fh.write(_JCOV_MAGIC)
        fh.write(struct.pack(">BHHB", _JCOV_VERSION, c.width, c.height, c.qtable.qf))
        fh.write(c.qtable.entries.astype(">u2").tobytes())
        blocks = c.coeffs.reshape(c.height // 8, 8, c.width // 8, 8).swapaxes(1, 2)
        fh.write(blocks.astype(">i2").tobytes())


def read_jcov(path):
    """Read a JCOV container back into a CoeffImage (bit-exact round trip)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _JCOV_MAGIC:
        raise ContainerError(f"{path}: not a JCOV file")
    version, width, height, qf = struct.unpack(">BHHB", data[4:10])
    if version != _JCOV_VERSION:
        raise ContainerError(f"{path}: unsupported JCOV version {version}")
    if width % 8 or height % 8 or width == 0 or height == 0:
        raise ContainerError(f"{path}: bad dimensions {width}x{height}")
    qt_end = 10 + 64 * 2
    entries = np.frombuffer(data[10:qt_end], dtype=">u2").reshape(8, 8)
    n_coeff = width * height
    expected = qt_end + n_coeff * 2
    if len(data) != expected:
        raise ContainerError(f"{path}: expected {expected} bytes, got {len(data)}")
    blocks = np.frombuffer(data[qt_end:], dtype=">i2").astype(np.int32)
    blocks = blocks.reshape(height // 8, width // 8, 8, 8)
    coeffs = blocks.swapaxes(1, 2).reshape(height, width)
    try:
        qtable = QuantTable(entries=entries.astype(np.int64), qf=qf)
    except ParameterError as exc:
        raise ContainerError(f"{path}: {exc}") from exc
    return CoeffImage(coeffs=coeffs, qtable=qtable)


def write_pgm(path, img):
    """Write a spatial image as binary PGM (levels shifted to [0, 255])."""
    pixels = np.clip(np.rint(img.pixels + 128.0), 0, 255).astype(np.uint8)
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path):
    """Read a binary PGM into the level-shifted spatial domain."""
    with open(path, "rb") as fh:
        data = fh.read()
    fields = []
    pos = 0
    while len(fields) < 4:
        if pos >= len(data):
            raise ContainerError(f"{path}: truncated PGM header")
        if data[pos : pos + 1] == b"#":  # comment line
            pos = data.index(b"\n", pos) + 1
            continue
        if data[pos : pos + 1].isspace():
            pos += 1
            continue
        end = pos
        while end < len(data) and not data[end : end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P5":
        raise ContainerError(f"{path}: not a binary PGM")
    width, height, maxval = (int(f) for f in fields[1:])
    if maxval != 255:
        raise ContainerError(f"{path}: only maxval 255 supported")
    pos += 1  # single whitespace after maxval
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ContainerError(f"{path}: truncated raster")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return SpatialImage(pixels.astype(np.float64) - 128.0)
