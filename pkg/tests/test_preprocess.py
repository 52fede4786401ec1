import numpy as np
import pytest

from bpstego.corpus import synthesize_image
from bpstego.jpegmodel import (
    ParameterError,
    SpatialImage,
    compress_spatial,
    quant_table_for_qf,
    to_spatial,
)
from bpstego.metrics import image_quality
from bpstego.preprocess import (
    PreprocessParams,
    build_reference_cover,
    clamp_region,
    full_clamp_baseline,
    overflow_census,
    partition_block,
    preprocess_cover,
)

PART = partition_block()
INTERIOR = sorted(PART.interior)
BOUNDARY = sorted(PART.boundary)


def block_with_overflow(n_interior, n_boundary, base=0.0, high=140.0):
    """One 8x8 block with a prescribed number of overflowing pixels per region."""
    block = np.full((8, 8), base)
    for r, c in INTERIOR[:n_interior]:
        block[r, c] = high
    for r, c in BOUNDARY[:n_boundary]:
        block[r, c] = high
    return block


def cover_from_blocks(blocks):
    """Compress constructed spatial blocks with a unit-step table (QF 100).

    Unit quantization keeps reconstruction within a few levels of the
    construction, so overflow counts survive the round trip; every test
    verifies its census before asserting on preprocessing behavior.
    """
    rows = [np.hstack(row) for row in blocks]
    return compress_spatial(SpatialImage(np.vstack(rows)), quant_table_for_qf(100))


class TestPartition:
    def test_region_sizes(self):
        assert len(PART.interior) == 36
        assert len(PART.boundary) == 28
        assert len(PART.corners) == 4

    def test_partition_covers_block(self):
        assert PART.interior | PART.boundary == {
            (r, c) for r in range(8) for c in range(8)
        }
        assert not PART.interior & PART.boundary

    def test_corners_within_boundary(self):
        assert PART.corners <= PART.boundary

    def test_masks_consistent(self):
        assert PART.interior_mask().sum() == 36
        assert PART.boundary_mask().sum() == 28
        assert not np.any(PART.interior_mask() & PART.boundary_mask())


class TestCensus:
    def test_clean_image(self):
        census = overflow_census(SpatialImage(np.zeros((16, 16))))
        assert census.total_overflow() == 0
        assert census.per_block == [(0, 0)] * 4

    def test_single_corner_overflow(self):
        pixels = np.zeros((8, 8))
        pixels[0, 0] = 130.0
        census = overflow_census(SpatialImage(pixels))
        assert census.per_block == [(0, 1)]
        assert census.totals() == {"interior": 0, "boundary": 1, "corner": 1}

    def test_counts_both_directions(self):
        pixels = np.zeros((8, 8))
        pixels[2, 2] = 127.2
        pixels[3, 3] = -128.4
        census = overflow_census(SpatialImage(pixels))
        assert census.per_block == [(2, 0)]

    def test_boundary_of_range_not_counted(self):
        pixels = np.zeros((8, 8))
        pixels[0, 0] = 127.0
        pixels[1, 1] = -128.0
        assert overflow_census(SpatialImage(pixels)).total_overflow() == 0

    def test_by_position_aggregates_blocks(self):
        pixels = np.zeros((16, 8))
        pixels[0, 3] = 200.0
        pixels[8, 3] = 200.0  # same in-block position of the second block
        census = overflow_census(SpatialImage(pixels))
        assert census.by_position[0, 3] == 2
        assert census.by_position.sum() == 2


class TestClampRegion:
    def test_examples(self):
        block = np.zeros((8, 8))
        block[0, 0] = 200.0
        block[0, 1] = -140.0
        block[0, 2] = 50.0
        out = clamp_region(block, np.ones((8, 8), dtype=bool), 8)
        assert out[0, 0] == 119.0
        assert out[0, 1] == -120.0
        assert out[0, 2] == 50.0

    def test_only_selected_region(self):
        block = np.full((8, 8), 150.0)
        out = clamp_region(block, PART.interior_mask(), 8)
        assert np.all(out[PART.interior_mask()] == 119.0)
        assert np.all(out[PART.boundary_mask()] == 150.0)

    def test_never_overflows_after_clamp(self):
        rng = np.random.default_rng(0)
        block = rng.uniform(-300, 300, (8, 8))
        for t1 in (0, 4, 8, 20):
            out = clamp_region(block, np.ones((8, 8), dtype=bool), t1)
            assert out.max() <= 127.0 and out.min() >= -128.0

    def test_negative_t1_rejected(self):
        with pytest.raises(ParameterError):
            clamp_region(np.zeros((8, 8)), np.ones((8, 8), dtype=bool), -1)


class TestParams:
    def test_defaults(self):
        p = PreprocessParams()
        assert (p.t1, p.o1, p.o2) == (8, 0, 18)

    @pytest.mark.parametrize("kwargs", [{"t1": -1}, {"o1": -2}, {"o2": 40}])
    def test_invalid(self, kwargs):
        with pytest.raises(ParameterError):
            PreprocessParams(**kwargs)


class TestPreprocess:
    def test_boundary_only_block_untouched(self):
        cover = cover_from_blocks([[block_with_overflow(0, 10)]])
        census = overflow_census(to_spatial(cover))
        assert census.per_block == [(0, 10)]
        out = preprocess_cover(cover, PreprocessParams())
        assert np.array_equal(out.coeffs, cover.coeffs)

    def test_interior_trigger_clamps_both_regions(self):
        cover = cover_from_blocks([[block_with_overflow(1, 10)]])
        assert overflow_census(to_spatial(cover)).per_block == [(1, 10)]
        out = preprocess_cover(cover, PreprocessParams())
        assert overflow_census(to_spatial(out)).total_overflow() == 0
        assert not np.array_equal(out.coeffs, cover.coeffs)

    def test_heavy_boundary_keeps_boundary(self):
        cover = cover_from_blocks([[block_with_overflow(1, 20)]])
        assert overflow_census(to_spatial(cover)).per_block == [(1, 20)]
        out = preprocess_cover(cover, PreprocessParams())
        interior, boundary = overflow_census(to_spatial(out)).per_block[0]
        assert interior == 0
        assert boundary == 20  # above o2: boundary pixels stay untouched

    def test_boundary_cap_is_strict(self):
        # exactly o2 boundary overflows must NOT be clamped (strict less-than)
        cover = cover_from_blocks([[block_with_overflow(1, 18)]])
        assert overflow_census(to_spatial(cover)).per_block == [(1, 18)]
        out = preprocess_cover(cover, PreprocessParams(o2=18))
        _, boundary = overflow_census(to_spatial(out)).per_block[0]
        assert boundary == 18
        out17 = preprocess_cover(cover, PreprocessParams(o2=19))
        _, boundary17 = overflow_census(to_spatial(out17)).per_block[0]
        assert boundary17 == 0

    def test_interior_trigger_is_strict(self):
        cover = cover_from_blocks([[block_with_overflow(2, 0)]])
        assert overflow_census(to_spatial(cover)).per_block == [(2, 0)]
        untouched = preprocess_cover(cover, PreprocessParams(o1=2))
        assert np.array_equal(untouched.coeffs, cover.coeffs)
        touched = preprocess_cover(cover, PreprocessParams(o1=1))
        assert not np.array_equal(touched.coeffs, cover.coeffs)

    def test_clean_blocks_bit_exact(self):
        blocks = [
            [block_with_overflow(2, 4), np.full((8, 8), 30.0)],
            [np.full((8, 8), -60.0), block_with_overflow(0, 6)],
        ]
        cover = cover_from_blocks(blocks)
        out = preprocess_cover(cover, PreprocessParams())
        # blocks without an interior trigger keep their coefficients bit-exactly
        assert np.array_equal(out.coeffs[:8, 8:], cover.coeffs[:8, 8:])
        assert np.array_equal(out.coeffs[8:, :8], cover.coeffs[8:, :8])
        assert np.array_equal(out.coeffs[8:, 8:], cover.coeffs[8:, 8:])
        assert not np.array_equal(out.coeffs[:8, :8], cover.coeffs[:8, :8])

    def test_deterministic(self):
        img = synthesize_image(3, 0, size=64, saturation=0.8)
        cover = compress_spatial(img, quant_table_for_qf(65))
        a = preprocess_cover(cover, PreprocessParams())
        b = preprocess_cover(cover, PreprocessParams())
        assert np.array_equal(a.coeffs, b.coeffs)


class TestFullClamp:
    def test_clean_image_identity(self):
        cover = cover_from_blocks([[np.full((8, 8), 40.0)]])
        out = full_clamp_baseline(cover, 8)
        assert np.array_equal(out.coeffs, cover.coeffs)

    def test_removes_all_overflow(self):
        cover = cover_from_blocks([[block_with_overflow(4, 12)]])
        out = full_clamp_baseline(cover, 8)
        assert overflow_census(to_spatial(out)).total_overflow() <= 1

    def test_boundary_only_block_is_modified(self):
        # unlike selective preprocessing, the baseline touches these blocks
        cover = cover_from_blocks([[block_with_overflow(0, 10)]])
        out = full_clamp_baseline(cover, 8)
        assert not np.array_equal(out.coeffs, cover.coeffs)

    def test_boundary_pixel_budget_dominates_selective(self):
        for index in range(4):
            img = synthesize_image(11, index, size=64, saturation=0.9)
            cover = compress_spatial(img, quant_table_for_qf(65))
            selective = preprocess_cover(cover, PreprocessParams())
            baseline = full_clamp_baseline(cover, 8)
            spatial = to_spatial(cover)
            b_sel = image_quality(spatial, to_spatial(selective)).boundary_pixels_modified
            b_base = image_quality(spatial, to_spatial(baseline)).boundary_pixels_modified
            assert b_sel <= b_base


class TestReferenceCover:
    def test_clean_cover_converges_immediately(self):
        cover = cover_from_blocks([[np.full((8, 8), 20.0)]])
        result = build_reference_cover(cover, 8)
        assert result.converged
        assert result.rounds == 0
        assert np.array_equal(result.coeffs.coeffs, cover.coeffs)

    def test_converged_means_overflow_free(self):
        img = synthesize_image(5, 1, size=64, saturation=1.0)
        cover = compress_spatial(img, quant_table_for_qf(65))
        robust = preprocess_cover(cover, PreprocessParams())
        result = build_reference_cover(robust, 8)
        census = overflow_census(to_spatial(result.coeffs))
        assert result.converged == (census.total_overflow() == 0)
        assert result.rounds <= 3

    def test_single_round_matches_baseline(self):
        cover = cover_from_blocks([[block_with_overflow(3, 8)]])
        result = build_reference_cover(cover, 8, max_rounds=1)
        expected = full_clamp_baseline(cover, 8)
        assert result.rounds == 1
        assert np.array_equal(result.coeffs.coeffs, expected.coeffs)
