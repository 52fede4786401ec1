"""Image quality metrics and payload accounting."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from .jpegmodel import ParameterError
from .preprocess import partition_block

__all__ = ["QualityReport", "image_quality", "psnr", "ssim", "relative_payload"]

_SSIM_WIN = 8  # uniform window matching the block geometry
_C1 = (0.01 * 255.0) ** 2
_C2 = (0.03 * 255.0) ** 2


@dataclass(frozen=True)
class QualityReport:
    psnr: float  # dB; inf for identical images
    ssim: float
    boundary_pixels_modified: int
    interior_pixels_modified: int


def psnr(a, b):
    """Peak signal-to-noise ratio over the 8-bit range."""
    diff = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)


def ssim(a, b):
    """Mean structural similarity with an 8x8 uniform sliding window."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mu_a = uniform_filter(a, _SSIM_WIN)
    mu_b = uniform_filter(b, _SSIM_WIN)
    var_a = uniform_filter(a * a, _SSIM_WIN) - mu_a * mu_a
    var_b = uniform_filter(b * b, _SSIM_WIN) - mu_b * mu_b
    cov = uniform_filter(a * b, _SSIM_WIN) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + _C1) * (2.0 * cov + _C2)
    den = (mu_a * mu_a + mu_b * mu_b + _C1) * (var_a + var_b + _C2)
    ssim_map = num / den
    pad = _SSIM_WIN // 2
    core = ssim_map[pad:-pad, pad:-pad] if min(ssim_map.shape) > 2 * pad else ssim_map
    return float(core.mean())


def image_quality(a, b):
    """Quality report between two spatial images in the level-shifted domain."""
    if a.pixels.shape != b.pixels.shape:
        raise ParameterError("images must have equal dimensions")
    # Metrics are computed in the [0, 255] display domain; the +128 shift
    # cancels in every difference term, so raw pixels can be used directly.
    pa = a.pixels + 128.0
    pb = b.pixels + 128.0
    part = partition_block()
    changed = np.abs(a.pixels - b.pixels) > 1e-9
    h, w = changed.shape
    bmask = np.tile(part.boundary_mask(), (h // 8, w // 8)) if h % 8 == 0 and w % 8 == 0 else None
    if bmask is not None:
        boundary = int(changed[bmask].sum())
        interior = int(changed[~bmask].sum())
    else:
        boundary = interior = int(changed.sum())
    return QualityReport(
        psnr=psnr(pa, pb),
        ssim=ssim(pa, pb),
        boundary_pixels_modified=boundary,
        interior_pixels_modified=interior,
    )


def relative_payload(n_m, cover):
    """Message bits per nonzero AC coefficient of the original cover."""
    coeffs = cover.coeffs
    ac = coeffs.copy()
    ac[::8, ::8] = 0
    n_nzac = int(np.count_nonzero(ac))
    if n_nzac == 0:
        raise ParameterError("cover has no nonzero AC coefficients")
    return n_m / n_nzac
