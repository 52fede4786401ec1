"""Acceptance gate: one test per release criterion, each printing a pass line."""

import time

import numpy as np
import pytest

from bpstego.adaptive import EmbedParams, adaptive_embed, build_cost_maps, error_rate
from bpstego.bench import run_corpus, write_csv, write_json
from bpstego.corpus import make_test_corpus, synthesize_image
from bpstego.embed import (
    apply_stego_changes,
    extract_cover_sequence,
    stc_embed,
    stc_extract,
    StegoRecord,
)
from bpstego.jpegmodel import (
    ChannelModel,
    CoeffImage,
    compress_spatial,
    forward_dct,
    inverse_dct,
    dequantize,
    quant_table_for_qf,
    quantize,
    recompress,
    round_spatial,
    to_spatial,
    truncate_spatial,
)
from bpstego.metrics import ssim
from bpstego.preprocess import (
    PreprocessParams,
    full_clamp_baseline,
    overflow_census,
    preprocess_cover,
)
from bpstego.rs import VALID_K, RsConfig, rs_decode, rs_encode, bits_to_symbols, symbols_to_bits
from bpstego.stc import StcParams, build_columns, stc_syndrome, stc_viterbi

Q_COVER = 65
Q_CHANNEL = 85
SEED_COVERS = 100
SEED_MODERATE = 200
SEED_SATURATED = 300

_CACHE = {}


def _passed(name, detail):
    print(f"PASS {name}: {detail}")


def _prepared_covers():
    """50 moderately saturated covers with their embedding state, built once."""
    if "covers" not in _CACHE:
        started = time.perf_counter()
        params = EmbedParams()
        prepared = []
        for index in range(50):
            img = synthesize_image(SEED_COVERS, index, size=64, saturation=0.3)
            cover = compress_spatial(img, quant_table_for_qf(Q_COVER))
            robust = preprocess_cover(cover, PreprocessParams())
            seq = extract_cover_sequence(robust, params.seed)
            costmaps = build_cost_maps(robust, params)
            ac = cover.coeffs.copy()
            ac[::8, ::8] = 0
            prepared.append(
                {
                    "robust": robust,
                    "seq": seq,
                    "costmaps": costmaps,
                    "n_nzac": int(np.count_nonzero(ac)),
                }
            )
        _CACHE["covers"] = prepared
        _CACHE["covers_build_seconds"] = time.perf_counter() - started
    return _CACHE["covers"], _CACHE["covers_build_seconds"]


def test_criterion_1_no_channel_round_trip():
    covers, build_seconds = _prepared_covers()
    params = EmbedParams()
    stc = StcParams(h=params.h, payload_alpha=0.5)
    cfg = RsConfig(k_star=29)
    started = time.perf_counter()
    runs = 0
    for index, item in enumerate(covers):
        for p_index, payload in enumerate((0.1, 0.3, 0.5)):
            n_m = max(1, round(payload * item["n_nzac"]))
            rng = np.random.default_rng([1, index, p_index])
            msg = rng.integers(0, 2, n_m).astype(np.uint8)
            coded = rs_encode(msg, cfg)
            decisions = stc_embed(item["seq"], coded, item["costmaps"], stc)
            stego = apply_stego_changes(item["robust"], item["seq"], decisions)
            rec = StegoRecord(
                seed=params.seed, n_m=n_m, rs_k=29, alpha=payload, qf_cover=Q_COVER
            )
            received = stc_extract(stego, rec)
            decoded, uncorrectable = rs_decode(received, cfg)
            assert uncorrectable == 0
            assert np.array_equal(decoded[:n_m], msg), (
                f"cover {index} payload {payload}: message not recovered"
            )
            runs += 1
    elapsed = build_seconds + (time.perf_counter() - started)
    assert elapsed < 120.0, f"round-trip budget exceeded: {elapsed:.1f}s"
    _passed(
        "criterion 1",
        f"{runs}/150 no-channel round trips bit-exact in {elapsed:.1f}s (< 120s)",
    )


def test_criterion_2_quantization_only_robustness():
    covers, _ = _prepared_covers()
    params = EmbedParams()
    stc = StcParams(h=params.h, payload_alpha=0.5)
    cfg = RsConfig(k_star=29)
    channel = ChannelModel(
        Q_CHANNEL, enable_truncation=False, enable_rounding=False
    )
    mismatched = 0
    for index, item in enumerate(covers):
        n_m = max(1, round(0.1 * item["n_nzac"]))
        rng = np.random.default_rng([2, index])
        msg = rng.integers(0, 2, n_m).astype(np.uint8)
        coded = rs_encode(msg, cfg)
        decisions = stc_embed(item["seq"], coded, item["costmaps"], stc)
        stego = apply_stego_changes(item["robust"], item["seq"], decisions)
        rec = StegoRecord(
            seed=params.seed, n_m=n_m, rs_k=29, alpha=0.1, qf_cover=Q_COVER
        )
        received = stc_extract(recompress(stego, channel), rec)
        if not np.array_equal(received, coded):
            mismatched += 1
    assert mismatched == 0, f"{mismatched}/50 covers had pre-RS bit errors"
    _passed(
        "criterion 2",
        "quantization-only QF65->85 channel: coded stream bit-exact on 50/50 covers",
    )


def _moderate_corpus_results():
    if "moderate" not in _CACHE:
        params = EmbedParams()
        results = []
        for index in range(20):
            img = synthesize_image(SEED_MODERATE, index, size=64, saturation=0.5)
            cover = compress_spatial(img, quant_table_for_qf(Q_COVER))
            robust = preprocess_cover(cover, PreprocessParams())
            ac = cover.coeffs.copy()
            ac[::8, ::8] = 0
            n_m = max(1, round(0.1 * np.count_nonzero(ac)))
            rng = np.random.default_rng([3, index])
            msg = rng.integers(0, 2, n_m).astype(np.uint8)
            _, result, _ = adaptive_embed(
                robust, msg, params.threshold, Q_CHANNEL, params
            )
            results.append(result)
        _CACHE["moderate"] = results
    return _CACHE["moderate"]


def test_criterion_3_full_channel_robustness():
    results = _moderate_corpus_results()
    successes = sum(1 for r in results if r.best_error <= 0.0001)
    assert successes >= 18, f"only {successes}/20 images reached the error target"
    _passed(
        "criterion 3",
        f"full QF65->85 channel at payload 0.1: {successes}/20 images with "
        "post-RS error <= 1e-4 (>= 18 required)",
    )


def _saturated_covers():
    if "saturated" not in _CACHE:
        covers = []
        for index in range(20):
            img = synthesize_image(SEED_SATURATED, index, size=64, saturation=1.0)
            covers.append(compress_spatial(img, quant_table_for_qf(Q_COVER)))
        _CACHE["saturated"] = covers
    return _CACHE["saturated"]


def _display(c):
    return round_spatial(truncate_spatial(to_spatial(c))).pixels


def test_criterion_4_boundary_preservation():
    from bpstego.metrics import image_quality

    worse_budget = 0
    ssim_selective = []
    ssim_baseline = []
    for cover in _saturated_covers():
        selective = preprocess_cover(cover, PreprocessParams())
        baseline = full_clamp_baseline(cover, 8)
        spatial = to_spatial(cover)
        b_sel = image_quality(spatial, to_spatial(selective)).boundary_pixels_modified
        b_base = image_quality(spatial, to_spatial(baseline)).boundary_pixels_modified
        assert b_sel <= b_base, "selective preprocessing modified more boundary pixels"
        if b_sel > b_base:
            worse_budget += 1
        original = _display(cover)
        ssim_selective.append(ssim(original, _display(selective)))
        ssim_baseline.append(ssim(original, _display(baseline)))
    mean_sel = float(np.mean(ssim_selective))
    mean_base = float(np.mean(ssim_baseline))
    assert mean_sel >= mean_base, (
        f"mean SSIM {mean_sel:.4f} below full-clamp baseline {mean_base:.4f}"
    )
    _passed(
        "criterion 4",
        f"boundary budget respected on 20/20 images; mean SSIM {mean_sel:.4f} "
        f">= full-clamp {mean_base:.4f}",
    )


def test_criterion_5_overflow_locality():
    interior = 0
    boundary = 0
    for cover in _saturated_covers():
        totals = overflow_census(to_spatial(cover)).totals()
        interior += totals["interior"]
        boundary += totals["boundary"]
    total = interior + boundary
    assert total > 0, "high-saturation corpus produced no overflow"
    share = boundary / total
    assert share > 28 / 64, f"boundary overflow share {share:.3f} <= 0.4375"
    _passed(
        "criterion 5",
        f"boundary share of overflow {share:.3f} exceeds the 28/64 area baseline "
        f"({total} overflow pixels)",
    )


def test_criterion_6_rs_correctness():
    rng = np.random.default_rng(6)
    # exhaustive single-symbol errors at the highest rate
    cfg = RsConfig(k_star=29)
    for _ in range(100):
        bits = rng.integers(0, 2, 145).astype(np.uint8)
        symbols = bits_to_symbols(rs_encode(bits, cfg))
        for pos in range(31):
            original = symbols[pos]
            for wrong in range(32):
                if wrong == original:
                    continue
                symbols[pos] = wrong
                decoded, uncorrectable = rs_decode(symbols_to_bits(symbols), cfg)
                assert uncorrectable == 0
                assert np.array_equal(decoded[:145], bits)
            symbols[pos] = original
    # random full-capability error patterns at every other rate
    for k in VALID_K[1:]:
        cfg = RsConfig(k_star=k)
        for _ in range(1000):
            bits = rng.integers(0, 2, 5 * k).astype(np.uint8)
            symbols = bits_to_symbols(rs_encode(bits, cfg))
            positions = rng.choice(31, size=cfg.t, replace=False)
            for pos in positions:
                symbols[pos] ^= int(rng.integers(1, 32))
            decoded, uncorrectable = rs_decode(symbols_to_bits(symbols), cfg)
            assert uncorrectable == 0, f"k={k}: t-error pattern flagged uncorrectable"
            assert np.array_equal(decoded[: bits.size], bits), f"k={k}: wrong decode"
    _passed(
        "criterion 6",
        "single-error correction exhaustive for k=29 (100 codewords x 31 x 31) "
        "and 1000 t-error patterns per k in {27..7}, zero failures",
    )


def _brute_force_minimum(x, flip_costs, msg, h):
    n, k = x.size, msg.size
    columns, block_of = build_columns(n, k, h)
    col_int = np.zeros(n, dtype=np.int64)
    for j in range(n):
        col_int[j] = int(columns[j]) << int(block_of[j])
    target = 0
    for i, bit in enumerate(msg):
        target |= int(bit) << i
    idx = np.arange(1 << n, dtype=np.int64)
    synd = np.zeros(1 << n, dtype=np.int64)
    cost = np.zeros(1 << n)
    for j in range(n):
        has = (idx >> j) & 1 == 1
        synd[has] ^= col_int[j]
        cost[has] += flip_costs[j] if x[j] == 0 else 0.0
        cost[~has] += 0.0 if x[j] == 0 else flip_costs[j]
    feasible = synd == target
    return float(cost[feasible].min())


def test_criterion_7_stc_optimality():
    rng = np.random.default_rng(7)
    for _ in range(500):
        n = int(rng.integers(6, 17))
        k = int(rng.integers(2, max(3, n // 2 + 1)))
        x = rng.integers(0, 2, n).astype(np.uint8)
        costs = rng.uniform(0.05, 5.0, n)
        msg = rng.integers(0, 2, k).astype(np.uint8)
        _, total = stc_viterbi(x, costs, msg, 3)
        expected = _brute_force_minimum(x, costs, msg, 3)
        assert total == pytest.approx(expected, rel=1e-12), (
            f"n={n} k={k}: trellis cost {total} != optimum {expected}"
        )
    _passed(
        "criterion 7",
        "trellis cost equals exhaustive optimum on 500 random instances "
        "(n <= 16, h = 3), zero deviations",
    )


def test_criterion_8_adaptive_controller():
    img = synthesize_image(8, 0, size=64, saturation=0.3)
    cover = compress_spatial(img, quant_table_for_qf(Q_COVER))
    robust = preprocess_cover(cover, PreprocessParams())
    rng = np.random.default_rng(8)
    msg = rng.integers(0, 2, 100).astype(np.uint8)

    calls = {"n": 0}

    def rising_error_channel(image):
        """Error grows as k drops: corrupt more parities on every retry."""
        severity = 20 + 60 * calls["n"]
        calls["n"] += 1
        coeffs = image.coeffs.copy()
        flat = coeffs.ravel()
        targets = [i for i in range(flat.size) if i % 64][:severity]
        flat[targets] += 1
        return CoeffImage(coeffs=coeffs, qtable=image.qtable)

    _, result, _ = adaptive_embed(
        robust, msg, 0.0, Q_CHANNEL, EmbedParams(), channel_fn=rising_error_channel
    )
    assert result.iterations <= 12, f"controller ran {result.iterations} iterations"
    tried = [(e["k"], e["r_error"]) for e in result.trace if "r_error" in e]
    errors = [err for _, err in tried]
    argmin_k = tried[int(np.argmin(errors))][0]
    assert result.best_k == argmin_k, "returned k is not the trace argmin"
    assert result.best_error == min(errors)
    assert result.best_k != tried[-1][0], "controller returned the last iterate"
    _passed(
        "criterion 8",
        f"{result.iterations} iterations (<= 12); non-monotone channel returned "
        f"argmin k={result.best_k}, not last iterate k={tried[-1][0]}",
    )


def test_criterion_9_numerical_core():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(10_000):
        block = rng.normal(0.0, 100.0, (8, 8))
        worst = max(worst, float(np.abs(inverse_dct(forward_dct(block)) - block).max()))
    assert worst < 1e-9, f"DCT round-trip error {worst:.2e}"
    # quantize(dequantize(.)) identity across representative tables and values
    values = np.arange(-1024, 1024, dtype=np.int32).reshape(16, 128)
    for qf in (1, 10, 35, 50, 65, 85, 100):
        qt = quant_table_for_qf(qf)
        c = CoeffImage(coeffs=values, qtable=qt)
        back = quantize(dequantize(c), qt)
        assert np.array_equal(back.coeffs, c.coeffs), f"lattice identity broke at QF {qf}"
    _passed(
        "criterion 9",
        f"DCT round-trip max error {worst:.2e} over 10^4 blocks; "
        "quantize-dequantize identity for coefficients in [-1024, 1024) at 7 QFs",
    )


def test_criterion_10_determinism(tmp_path):
    corpus = tmp_path / "corpus"
    make_test_corpus(corpus, 3, 0.5, 10, size=64)
    outputs = []
    for tag in ("first", "second"):
        report = run_corpus(corpus, [0.1, 0.3], Q_COVER, Q_CHANNEL, EmbedParams())
        csv_path = tmp_path / f"{tag}.csv"
        json_path = tmp_path / f"{tag}.json"
        write_csv(csv_path, report)
        write_json(json_path, report)
        outputs.append((csv_path.read_bytes(), json_path.read_bytes()))
    assert outputs[0][0] == outputs[1][0], "CSV reports differ between runs"
    assert outputs[0][1] == outputs[1][1], "JSON reports differ between runs"
    _passed(
        "criterion 10",
        "two identical-seed bench runs produced byte-identical CSV and JSON",
    )
