"""Corpus benchmark: the full pipeline per image/payload with CSV and JSON reports."""

import csv
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .adaptive import EmbedParams, adaptive_embed, error_rate
from .containers import ContainerError, read_jcov, read_pgm
from .embed import stc_extract
from .jpegmodel import (
    ChannelModel,
    ParameterError,
    compress_spatial,
    quant_table_for_qf,
    recompress,
    round_spatial,
    to_spatial,
    truncate_spatial,
)
from .metrics import image_quality, relative_payload
from .preprocess import PreprocessParams, full_clamp_baseline, preprocess_cover
from .rs import RsConfig, rs_decode
from .stc import CapacityError

__all__ = ["BenchReport", "run_corpus", "write_csv", "write_json", "corpus_files"]


@dataclass(frozen=True)
class BenchReport:
    """Per-image rows and per-payload aggregates of a corpus run."""

    rows: list
    aggregates: dict
    settings: dict = field(default_factory=dict)


def corpus_files(corpus_dir):
    """Image files of a corpus directory, manifest order when available."""
    root = Path(corpus_dir)
    manifest = root / "manifest.json"
    if manifest.exists():
        with open(manifest, "r", encoding="ascii") as fh:
            entries = json.load(fh)["images"]
        return [root / e["file"] for e in entries]
    return sorted(p for p in root.iterdir() if p.suffix in (".pgm", ".jcov"))


def _load_cover(path, q_cover):
    if path.suffix == ".jcov":
        return read_jcov(path)
    return compress_spatial(read_pgm(path), quant_table_for_qf(q_cover))


def _display(c):
    """Integer spatial rendering of coefficients for quality metrics."""
    return round_spatial(truncate_spatial(to_spatial(c)))


def _count_boundary_changes(before, after):
    return image_quality(before, after).boundary_pixels_modified


def aggregate_rows(rows):
    """Per-payload means recomputed from rows (the only aggregation path)."""
    by_payload = {}
    for row in rows:
        by_payload.setdefault(row["payload"], []).append(row)
    out = {}
    for payload, group in sorted(by_payload.items()):
        psnrs = [r["psnr"] for r in group if np.isfinite(r["psnr"])]
        out[payload] = {
            "images": len(group),
            "mean_r_error": float(np.mean([r["r_error"] for r in group])),
            "mean_psnr": float(np.mean(psnrs)) if psnrs else float("inf"),
            "mean_ssim": float(np.mean([r["ssim"] for r in group])),
        }
    return out


def run_corpus(corpus_dir, payloads, q_cover, q_channel, params, timing=False, log=None):
    """Embed/attack/extract every corpus image at every payload.

    Fully determined by (corpus, params.seed, settings); the runtime column
    is only filled when ``timing`` is set so reports stay byte-stable.
    """
    files = corpus_files(corpus_dir)
    if not files:
        raise ParameterError(f"no corpus images found in {corpus_dir}")
    pre = PreprocessParams(t1=params.t1, o1=params.o1, o2=params.o2)
    channel = ChannelModel(q_channel=q_channel)
    rows = []
    for image_index, path in enumerate(files):
        try:
            cover = _load_cover(path, q_cover)
        except (ContainerError, OSError) as exc:
            if log is not None:
                log(f"skipping {path.name}: {exc}")
            continue
        robust = preprocess_cover(cover, pre)
        baseline = full_clamp_baseline(cover, pre.t1)
        cover_spatial = to_spatial(cover)
        b_proposed = _count_boundary_changes(cover_spatial, to_spatial(robust))
        b_baseline = _count_boundary_changes(cover_spatial, to_spatial(baseline))
        if b_proposed > b_baseline:
            raise RuntimeError(
                f"{path.name}: preprocessing modified more boundary pixels "
                f"({b_proposed}) than the full-clamp baseline ({b_baseline})"
            )
        ac = cover.coeffs.copy()
        ac[::8, ::8] = 0
        n_nzac = int(np.count_nonzero(ac))
        display_cover = _display(cover)
        for payload_index, payload in enumerate(payloads):
            n_m = max(1, round(payload * n_nzac))
            msg_rng = np.random.default_rng(
                [int(params.seed), image_index, payload_index]
            )
            msg = msg_rng.integers(0, 2, n_m).astype(np.uint8)
            run_params = replace(params, payload=payload)
            started = time.perf_counter()
            try:
                stego, result, rec = adaptive_embed(
                    robust, msg, params.threshold, q_channel, run_params
                )
            except CapacityError as exc:
                if log is not None:
                    log(f"{path.name} @ {payload}: {exc}")
                continue
            attacked = recompress(stego, channel)
            received = stc_extract(attacked, rec)
            decoded, _ = rs_decode(received, RsConfig(k_star=rec.rs_k))
            r_err = error_rate(msg, decoded[: n_m])
            elapsed = time.perf_counter() - started
            quality = image_quality(display_cover, _display(stego))
            rows.append(
                {
                    "image": path.name,
                    "payload": payload,
                    "n_nzac": n_nzac,
                    "n_m": n_m,
                    "bpnzac": relative_payload(n_m, cover),
                    "k": rec.rs_k,
                    "r_error": r_err,
                    "psnr": quality.psnr,
                    "ssim": quality.ssim,
                    "boundary_modified": b_proposed,
                    "boundary_modified_fullclamp": b_baseline,
                    "trace": result.trace,
                    "runtime": round(elapsed, 3) if timing else None,
                }
            )
    if not rows:
        raise ParameterError("corpus produced no benchmark rows")
    settings = {
        "q_cover": q_cover,
        "q_channel": q_channel,
        "payloads": list(payloads),
        "seed": params.seed,
        "t1": params.t1,
        "mu": params.mu,
        "o1": params.o1,
        "o2": params.o2,
        "h": params.h,
        "threshold": params.threshold,
    }
    return BenchReport(rows=rows, aggregates=aggregate_rows(rows), settings=settings)


_CSV_COLUMNS = (
    "image",
    "payload",
    "n_nzac",
    "n_m",
    "bpnzac",
    "k",
    "r_error",
    "psnr",
    "ssim",
    "boundary_modified",
    "boundary_modified_fullclamp",
    "runtime",
)


def _csv_cell(value):
    if value is None:
        return "-"
    if isinstance(value, float):
        if np.isinf(value):
            return "inf"
        return format(value, ".6g")
    return str(value)


def write_csv(path, report):
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for row in report.rows:
            writer.writerow([_csv_cell(row[name]) for name in _CSV_COLUMNS])


def _jsonable(value):
    if isinstance(value, float) and np.isinf(value):
        return "inf"
    return value


def write_json(path, report):
    payload = {
        "settings": report.settings,
        "rows": [
            {name: _jsonable(value) for name, value in row.items()}
            for row in report.rows
        ],
        "aggregates": {
            str(p): {k: _jsonable(v) for k, v in agg.items()}
            for p, agg in report.aggregates.items()
        },
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
