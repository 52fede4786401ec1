"""Boundary-preserving overflow alleviation.

Overflow is judged on the real-valued reconstruction before rounding. A block
whose 6x6 interior overflows in more than ``o1`` pixels gets its interior
clamped; only then is its boundary considered, and clamped only when fewer
than ``o2`` boundary pixels overflow. Modified blocks are re-transformed with
the cover's own quantization table; untouched blocks keep their coefficients
bit-exactly.
"""

from dataclasses import dataclass

import numpy as np

from .jpegmodel import (
    CoeffImage,
    ParameterError,
    SpatialImage,
    blocks_view,
    forward_dct,
    round_half_away,
    to_spatial,
)

__all__ = [
    "BlockPartition",
    "OverflowCensus",
    "PreprocessParams",
    "ReferenceCoverResult",
    "partition_block",
    "overflow_census",
    "clamp_region",
    "preprocess_cover",
    "full_clamp_baseline",
    "build_reference_cover",
]


@dataclass(frozen=True)
class BlockPartition:
    """Interior (36 px), boundary (28 px) and corner (4 px) index sets of an 8x8 block."""

    interior: frozenset
    boundary: frozenset
    corners: frozenset

    def interior_mask(self):
        return _mask_from(self.interior)

    def boundary_mask(self):
        return _mask_from(self.boundary)

    def corner_mask(self):
        return _mask_from(self.corners)


def _mask_from(indices):
    mask = np.zeros((8, 8), dtype=bool)
    for r, c in indices:
        mask[r, c] = True
    return mask


def partition_block():
    """Fixed geometry of the 8x8 spatial block."""
    interior = frozenset((r, c) for r in range(1, 7) for c in range(1, 7))
    all_pos = frozenset((r, c) for r in range(8) for c in range(8))
    boundary = all_pos - interior
    corners = frozenset({(0, 0), (0, 7), (7, 0), (7, 7)})
    return BlockPartition(interior=interior, boundary=boundary, corners=corners)


@dataclass(frozen=True)
class OverflowCensus:
    """Overflow-pixel counts per block region and per in-block position."""

    per_block: list  # [(interior_count, boundary_count), ...] raster order
    by_position: np.ndarray  # 8x8 counts aggregated over all blocks

    def totals(self):
        part = partition_block()
        return {
            "interior": int(self.by_position[part.interior_mask()].sum()),
            "boundary": int(self.by_position[part.boundary_mask()].sum()),
            "corner": int(self.by_position[part.corner_mask()].sum()),
        }

    def total_overflow(self):
        return int(self.by_position.sum())

    def to_json_dict(self):
        totals = self.totals()
        return {
            "per_block": [list(pair) for pair in self.per_block],
            "by_position": self.by_position.astype(int).tolist(),
            "totals": totals,
        }


@dataclass(frozen=True)
class PreprocessParams:
    """Clamp intensity and the two overflow-count triggers."""

    t1: int = 8
    o1: int = 0
    o2: int = 18

    def __post_init__(self):
        if self.t1 < 0:
            raise ParameterError("t1 must be nonnegative")
        if self.o1 < 0:
            raise ParameterError("o1 must be nonnegative")
        if not 0 <= self.o2 <= 28:
            raise ParameterError("o2 must lie in [0, 28]")


@dataclass(frozen=True)
class ReferenceCoverResult:
    """Reference cover plus convergence metadata."""

    coeffs: "CoeffImage"
    converged: bool
    rounds: int


def _overflow_mask(pixels):
    return (pixels > 127.0) | (pixels < -128.0)


def overflow_census(img):
    """Count overflowing pixels per block region on a pre-truncation image."""
    blocks = blocks_view(_overflow_mask(img.pixels))
    part = partition_block()
    imask = part.interior_mask()
    bmask = part.boundary_mask()
    interior_counts = blocks[:, :, imask].sum(axis=2)
    boundary_counts = blocks[:, :, bmask].sum(axis=2)
    per_block = list(
        zip(interior_counts.ravel().tolist(), boundary_counts.ravel().tolist())
    )
    by_position = blocks.sum(axis=(0, 1))
    return OverflowCensus(per_block=per_block, by_position=by_position)


def clamp_region(block, region_mask, t1):
    """Pull overflowing pixels of the selected region back inside by t1 levels."""
    if t1 < 0:
        raise ParameterError("t1 must be nonnegative")
    out = np.array(block, dtype=np.float64)
    high = region_mask & (out > 127.0)
    low = region_mask & (out < -128.0)
    out[high] = 127.0 - t1
    out[low] = -128.0 + t1
    return out


def _retransform(c, spatial_blocks, modified):
    """Re-quantize modified spatial blocks; keep others' coefficients bit-exact."""
    q = c.qtable.entries.astype(np.float64)
    coeffs = c.coeffs.copy()
    out_blocks = blocks_view(coeffs)
    for by, bx in zip(*np.nonzero(modified)):
        d = forward_dct(spatial_blocks[by, bx])
        out_blocks[by, bx] = round_half_away(d / q).astype(np.int32)
    return CoeffImage(coeffs=coeffs, qtable=c.qtable)


def preprocess_cover(c, params):
    """Produce the robust cover by selective interior/boundary overflow removal."""
    part = partition_block()
    imask = part.interior_mask()
    bmask = part.boundary_mask()
    spatial = to_spatial(c)
    blocks = np.array(blocks_view(spatial.pixels))
    over = _overflow_mask(blocks)
    interior_counts = over[:, :, imask].sum(axis=2)
    boundary_counts = over[:, :, bmask].sum(axis=2)

    trigger = interior_counts > params.o1
    clamp_b = trigger & (boundary_counts < params.o2)
    for by, bx in zip(*np.nonzero(trigger)):
        blocks[by, bx] = clamp_region(blocks[by, bx], imask, params.t1)
        if clamp_b[by, bx]:
            blocks[by, bx] = clamp_region(blocks[by, bx], bmask, params.t1)
    return _retransform(c, blocks, trigger)


def full_clamp_baseline(c, t1):
    """Clamp every overflowing pixel of every overflowing block (ROAST-ST style)."""
    spatial = to_spatial(c)
    blocks = np.array(blocks_view(spatial.pixels))
    over = _overflow_mask(blocks)
    modified = over.any(axis=(2, 3))
    full = np.ones((8, 8), dtype=bool)
    for by, bx in zip(*np.nonzero(modified)):
        blocks[by, bx] = clamp_region(blocks[by, bx], full, t1)
    return _retransform(c, blocks, modified)


def build_reference_cover(robust, t1, max_rounds=3):
    """Iterate full clamping until the reconstruction is overflow-free."""
    current = robust
    rounds = 0
    while rounds < max_rounds:
        if overflow_census(to_spatial(current)).total_overflow() == 0:
            return ReferenceCoverResult(coeffs=current, converged=True, rounds=rounds)
        current = full_clamp_baseline(current, t1)
        rounds += 1
    clean = overflow_census(to_spatial(current)).total_overflow() == 0
    return ReferenceCoverResult(coeffs=current, converged=clean, rounds=rounds)
