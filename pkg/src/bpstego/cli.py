"""Command-line interface."""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .adaptive import EmbedParams, adaptive_embed
from .bench import run_corpus, write_csv, write_json
from .containers import read_jcov, read_pgm, write_jcov
from .corpus import make_test_corpus
from .embed import read_record, stc_extract, write_record
from .jpegmodel import ChannelModel, compress_spatial, quant_table_for_qf, recompress, to_spatial
from .preprocess import OverflowCensus, PreprocessParams, overflow_census, preprocess_cover
from .rs import RsConfig, rs_decode

__all__ = ["main"]


def _add_param_flags(parser):
    parser.add_argument("--t1", type=int, default=8, help="overflow clamp intensity")
    parser.add_argument("--mu", type=float, default=0.5, help="asymmetric cost bias")
    parser.add_argument("--o1", type=int, default=0, help="interior overflow trigger")
    parser.add_argument("--o2", type=int, default=18, help="boundary overflow cap")
    parser.add_argument("--h", type=int, default=10, help="STC constraint height")
    parser.add_argument(
        "--threshold", type=float, default=0.0001, help="target error rate"
    )
    parser.add_argument("--seed", type=int, default=0, help="embedding key seed")


def _params_from(args, payload):
    return EmbedParams(
        t1=args.t1,
        mu=args.mu,
        o1=args.o1,
        o2=args.o2,
        h=args.h,
        threshold=args.threshold,
        seed=args.seed,
        payload=payload,
    )


def _load_cover(path, qf):
    path = Path(path)
    if path.suffix == ".jcov":
        cover = read_jcov(path)
        if qf is not None and cover.qtable.qf != qf:
            print(
                f"note: using QF {cover.qtable.qf} from {path.name}, not --qcover {qf}",
                file=sys.stderr,
            )
        return cover
    return compress_spatial(read_pgm(path), quant_table_for_qf(qf))


def _cmd_embed(args):
    cover = _load_cover(args.cover, args.qcover)
    msg = np.unpackbits(np.frombuffer(Path(args.msg).read_bytes(), dtype=np.uint8))
    if msg.size == 0:
        print("error: empty message file", file=sys.stderr)
        return 2
    params = _params_from(args, args.payload)
    robust = preprocess_cover(
        cover, PreprocessParams(t1=args.t1, o1=args.o1, o2=args.o2)
    )
    stego, result, rec = adaptive_embed(
        robust, msg, args.threshold, args.qchannel, params
    )
    write_jcov(args.out, stego)
    write_record(args.key_out, rec)
    print(json.dumps(result.trace))
    print(
        f"embedded {msg.size} bits with RS(31,{result.best_k}), "
        f"simulated error rate {result.best_error:.6f}",
        file=sys.stderr,
    )
    return 0


def _cmd_extract(args):
    stego = read_jcov(args.stego)
    rec = read_record(args.key)
    coded = stc_extract(stego, rec)
    bits, uncorrectable = rs_decode(coded, RsConfig(k_star=rec.rs_k))
    bits = bits[: rec.n_m]
    Path(args.out).write_bytes(np.packbits(bits).tobytes())
    if uncorrectable:
        print(f"warning: {uncorrectable} uncorrectable RS block(s)", file=sys.stderr)
    print(f"extracted {bits.size} bits", file=sys.stderr)
    return 0


def _cmd_attack(args):
    image = read_jcov(getattr(args, "in"))
    channel = ChannelModel(
        q_channel=args.qf,
        enable_truncation=not args.no_truncate,
        enable_rounding=not args.no_round,
    )
    write_jcov(args.out, recompress(image, channel))
    return 0


def _census_for(path, qf):
    path = Path(path)
    if path.suffix == ".jcov":
        return overflow_census(to_spatial(read_jcov(path)))
    return overflow_census(
        to_spatial(compress_spatial(read_pgm(path), quant_table_for_qf(qf)))
    )


def _cmd_stats_overflow(args):
    target = Path(getattr(args, "in"))
    if target.is_dir():
        files = sorted(
            p for p in target.iterdir() if p.suffix in (".pgm", ".jcov")
        )
    else:
        files = [target]
    if not files:
        print(f"error: no images found in {target}", file=sys.stderr)
        return 2
    per_block = []
    by_position = np.zeros((8, 8), dtype=np.int64)
    for path in files:
        census = _census_for(path, args.qf)
        per_block.extend(census.per_block)
        by_position += census.by_position
    combined = OverflowCensus(per_block=per_block, by_position=by_position)
    payload = combined.to_json_dict()
    with open(args.json, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    totals = payload["totals"]
    print(
        f"{len(files)} image(s): interior {totals['interior']}, "
        f"boundary {totals['boundary']}, corner {totals['corner']}"
    )
    return 0


def _cmd_gen_corpus(args):
    manifest = make_test_corpus(
        args.out, args.count, args.saturation, args.seed, size=args.size
    )
    print(f"wrote {manifest['count']} images to {args.out}")
    return 0


def _cmd_bench(args):
    payloads = [float(p) for p in args.payloads.split(",") if p]
    params = _params_from(args, payloads[0])
    report = run_corpus(
        args.corpus,
        payloads,
        args.qcover,
        args.qchannel,
        params,
        timing=args.timing,
        log=lambda message: print(message, file=sys.stderr),
    )
    if args.csv:
        write_csv(args.csv, report)
    if args.json:
        write_json(args.json, report)
    if args.figures:
        from .figures import render_figures

        for path in render_figures(report, args.figures):
            print(f"wrote {path}", file=sys.stderr)
    for payload, agg in report.aggregates.items():
        print(
            f"payload {payload}: mean error {agg['mean_r_error']:.6f}, "
            f"mean SSIM {agg['mean_ssim']:.4f} over {agg['images']} image(s)"
        )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bpstego",
        description="Recompression-robust JPEG steganography at coefficient level.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a message into a cover image")
    p.add_argument("--cover", required=True, help="cover image (.pgm or .jcov)")
    p.add_argument("--msg", required=True, help="message file (raw bytes)")
    p.add_argument("--out", required=True, help="stego output (.jcov)")
    p.add_argument("--key-out", required=True, help="key sidecar output")
    p.add_argument("--payload", type=float, required=True, help="target bpnzac")
    p.add_argument("--qcover", type=int, default=65)
    p.add_argument("--qchannel", type=int, default=85)
    _add_param_flags(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("extract", help="extract a message from a stego image")
    p.add_argument("--stego", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("attack", help="apply the simulated recompression channel")
    p.add_argument("--in", required=True)
    p.add_argument("--qf", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-truncate", action="store_true")
    p.add_argument("--no-round", action="store_true")
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("stats", help="corpus statistics")
    stats_sub = p.add_subparsers(dest="stats_command", required=True)
    q = stats_sub.add_parser("overflow", help="overflow census as JSON")
    q.add_argument("--in", required=True, help="image file or directory")
    q.add_argument("--qf", type=int, default=65)
    q.add_argument("--json", required=True)
    q.set_defaults(func=_cmd_stats_overflow)

    p = sub.add_parser("gen-corpus", help="generate a synthetic test corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--saturation", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--size", type=int, default=64)
    p.set_defaults(func=_cmd_gen_corpus)

    p = sub.add_parser("bench", help="run the pipeline over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--payloads", default="0.1,0.2,0.3,0.4,0.5")
    p.add_argument("--qcover", type=int, default=65)
    p.add_argument("--qchannel", type=int, default=85)
    p.add_argument("--csv")
    p.add_argument("--json")
    p.add_argument("--figures", help="directory for rendered figures")
    p.add_argument("--timing", action="store_true", help="fill the runtime column")
    _add_param_flags(p)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
