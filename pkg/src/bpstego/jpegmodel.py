"""Coefficient-level JPEG model.

Grayscale only, dimensions multiples of 8. The spatial domain is kept
level-shifted to [-128, 127]; file I/O shifts to [0, 255] on the way in/out.
No entropy coding: the recompression channel operates on coefficients.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

__all__ = [
    "ParameterError",
    "QuantTable",
    "CoeffImage",
    "SpatialImage",
    "ChannelModel",
    "BASE_LUMA_TABLE",
    "quant_table_for_qf",
    "forward_dct",
    "inverse_dct",
    "truncate_spatial",
    "round_spatial",
    "round_half_away",
    "quantize",
    "dequantize",
    "to_spatial",
    "compress_spatial",
    "recompress",
    "blocks_view",
]


class ParameterError(ValueError):
    """Raised for out-of-range or inconsistent parameters."""


# Standard IJG luminance quantization table.
BASE_LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)


@dataclass(frozen=True)
class QuantTable:
    """8x8 table of positive integer quantization steps for one quality factor."""

    entries: np.ndarray
    qf: int

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.int64)
        if entries.shape != (8, 8):
            raise ParameterError("quantization table must be 8x8")
        if entries.min() < 1 or entries.max() > 255:
            raise ParameterError("quantization entries must lie in [1, 255]")
        if not 1 <= self.qf <= 100:
            raise ParameterError("quality factor must lie in [1, 100]")
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class CoeffImage:
    """Quantized DCT coefficients stored as an HxW plane of 8x8 tiles."""

    coeffs: np.ndarray
    qtable: QuantTable

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs)
        if coeffs.ndim != 2:
            raise ParameterError("coefficient plane must be 2-D")
        h, w = coeffs.shape
        if h % 8 or w % 8 or h == 0 or w == 0:
            raise ParameterError("dimensions must be positive multiples of 8")
        if not np.issubdtype(coeffs.dtype, np.integer):
            raise ParameterError("coefficients must be integers")
        if coeffs.min(initial=0) < -32768 or coeffs.max(initial=0) > 32767:
            raise ParameterError("coefficients exceed 16-bit signed range")
        object.__setattr__(self, "coeffs", coeffs.astype(np.int32))

    @property
    def height(self):
        return self.coeffs.shape[0]

    @property
    def width(self):
        return self.coeffs.shape[1]


@dataclass(frozen=True)
class SpatialImage:
    """Real-valued pixel grid in the level-shifted domain (nominal [-128, 127])."""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.float64)
        if pixels.ndim != 2:
            raise ParameterError("pixel grid must be 2-D")
        object.__setattr__(self, "pixels", pixels)

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]


@dataclass(frozen=True)
class ChannelModel:
    """Simulated OSN recompression: re-quantization plus optional lossy steps."""

    q_channel: int
    enable_truncation: bool = True
    enable_rounding: bool = True

    def __post_init__(self):
        if not 1 <= self.q_channel <= 100:
            raise ParameterError("channel quality factor must lie in [1, 100]")


def quant_table_for_qf(qf):
    """Scale the base luminance table to a quality factor (IJG scaling law)."""
    if not isinstance(qf, (int, np.integer)) or not 1 <= qf <= 100:
        raise ParameterError("quality factor must be an integer in [1, 100]")
    scale = 5000 // qf if qf < 50 else 200 - 2 * qf
    entries = (BASE_LUMA_TABLE * scale + 50) // 100
    entries = np.clip(entries, 1, 255)
    return QuantTable(entries=entries, qf=int(qf))


def blocks_view(plane):
    """Reshape an HxW plane into a (H/8, W/8, 8, 8) block tensor (no copy)."""
    h, w = plane.shape
    return plane.reshape(h // 8, 8, w // 8, 8).swapaxes(1, 2)


def _unblock(blocks):
    by, bx = blocks.shape[:2]
    return blocks.swapaxes(1, 2).reshape(by * 8, bx * 8)


def forward_dct(block):
    """Orthonormal type-II 2-D DCT of an 8x8 block."""
    return scipy.fft.dctn(np.asarray(block, dtype=np.float64), norm="ortho")


def inverse_dct(block):
    """Exact inverse of :func:`forward_dct`."""
    return scipy.fft.idctn(np.asarray(block, dtype=np.float64), norm="ortho")


def _dct_plane(plane):
    return _unblock(scipy.fft.dctn(blocks_view(plane), axes=(2, 3), norm="ortho"))


def _idct_plane(plane):
    return _unblock(scipy.fft.idctn(blocks_view(plane), axes=(2, 3), norm="ortho"))


def round_half_away(x):
    """Round with ties going away from zero (the rounding used by [.] here)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def truncate_spatial(img):
    """Clamp pixels to the representable [-128, 127] range."""
    return SpatialImage(np.clip(img.pixels, -128.0, 127.0))


def round_spatial(img):
    """Round pixels to integers, ties away from zero in the unshifted domain."""
    return SpatialImage(round_half_away(img.pixels + 128.0) - 128.0)


def quantize(dequant_plane, qtable):
    """Divide dequantized coefficients by the table and round to integers."""
    q = np.tile(qtable.entries, np.array(dequant_plane.shape) // 8)
    coeffs = round_half_away(dequant_plane / q).astype(np.int32)
    return CoeffImage(coeffs=coeffs, qtable=qtable)


def dequantize(c):
    """Multiply quantized coefficients by their quantization steps."""
    q = np.tile(c.qtable.entries, np.array(c.coeffs.shape) // 8)
    return c.coeffs.astype(np.float64) * q


def to_spatial(c):
    """Blockwise IDCT of the dequantized coefficients; no truncation/rounding."""
    return SpatialImage(_idct_plane(dequantize(c)))


def compress_spatial(img, qtable):
    """Blockwise DCT of a spatial image quantized with the given table."""
    h, w = img.pixels.shape
    if h % 8 or w % 8:
        raise ParameterError("dimensions must be multiples of 8")
    return quantize(_dct_plane(img.pixels), qtable)


def recompress(c, channel):
    """Run the lossy recompression chain and re-quantize at the channel QF."""
    img = to_spatial(c)
    if channel.enable_truncation:
        img = truncate_spatial(img)
    if channel.enable_rounding:
        img = round_spatial(img)
    return compress_spatial(img, quant_table_for_qf(channel.q_channel))
