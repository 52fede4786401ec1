"""Adaptive RS code selection.

Sweeps k over 29, 27, ..., 7, simulating the recompression channel locally
for each candidate, and keeps the stego image of the lowest observed
post-decode error rate (earliest on ties). The loop stops as soon as the
error rate reaches the threshold or the candidate list is exhausted.
"""

from dataclasses import dataclass, field

import numpy as np

from .costs import asymmetric_costs, juniward_costs, modification_costs
from .embed import (
    StegoRecord,
    apply_stego_changes,
    coded_length,
    extract_cover_sequence,
    lattice_geometry,
    stc_embed,
    stc_extract,
)
from .jpegmodel import ChannelModel, ParameterError, recompress
from .preprocess import build_reference_cover
from .rs import VALID_K, RsConfig, rs_decode, rs_encode
from .stc import CapacityError, StcParams

__all__ = ["EmbedParams", "AdaptiveResult", "error_rate", "adaptive_embed"]


@dataclass(frozen=True)
class EmbedParams:
    """All pipeline tunables with their default operating point."""

    t1: int = 8
    mu: float = 0.5
    o1: int = 0
    o2: int = 18
    h: int = 10
    threshold: float = 0.0001
    seed: int = 0
    payload: float = 0.1
    max_reference_rounds: int = 3


@dataclass(frozen=True)
class AdaptiveResult:
    """Outcome of the k sweep, including the full per-iteration trace."""

    best_k: int
    best_error: float
    iterations: int
    trace: list = field(default_factory=list)


def error_rate(sent, received):
    """Fraction of differing bits between two equal-length bit vectors."""
    sent = np.asarray(sent, dtype=np.uint8)
    received = np.asarray(received, dtype=np.uint8)
    if sent.size != received.size:
        raise ParameterError("bit vectors must have equal length")
    if sent.size == 0:
        raise ParameterError("bit vectors must be non-empty")
    return float(np.mean(sent != received))


def build_cost_maps(robust, params):
    """Asymmetric modification costs for a robust cover (reference built here)."""
    rho = juniward_costs(robust)
    reference = build_reference_cover(
        robust, params.t1, max_rounds=params.max_reference_rounds
    ).coeffs
    rho_pm = asymmetric_costs(rho, robust, reference, params.mu)
    _, _, d_plus, d_minus = lattice_geometry(robust)
    return modification_costs(
        rho_pm, robust.qtable, (d_plus, d_minus), coeffs=robust.coeffs
    )


def adaptive_embed(robust, msg_bits, threshold, q_channel, params, channel_fn=None):
    """Embed with the best RS(31, k) found by simulating the channel.

    ``robust`` must already be preprocessed. ``channel_fn`` overrides the
    default full-lossy recompression (used by tests to inject channels).
    Returns (stego CoeffImage, AdaptiveResult, StegoRecord).
    """
    msg_bits = np.asarray(msg_bits, dtype=np.uint8)
    if msg_bits.size == 0:
        raise ParameterError("message must be non-empty")
    if channel_fn is None:
        model = ChannelModel(q_channel=q_channel)
        channel_fn = lambda img: recompress(img, model)

    seq = extract_cover_sequence(robust, params.seed)
    costmaps = build_cost_maps(robust, params)
    stc_params = StcParams(h=params.h, payload_alpha=min(params.payload, 0.999))

    best = None
    trace = []
    iterations = 0
    for k in VALID_K:
        n_coded = coded_length(msg_bits.size, k)
        if n_coded >= len(seq):
            trace.append({"k": k, "skipped": "capacity"})
            continue
        iterations += 1
        cfg = RsConfig(k_star=k)
        coded = rs_encode(msg_bits, cfg)
        decisions = stc_embed(seq, coded, costmaps, stc_params)
        stego = apply_stego_changes(robust, seq, decisions)
        rec = StegoRecord(
            seed=params.seed,
            n_m=int(msg_bits.size),
            rs_k=k,
            alpha=params.payload,
            qf_cover=robust.qtable.qf,
            t1=params.t1,
            mu=params.mu,
            o1=params.o1,
            o2=params.o2,
            h=params.h,
        )
        received = stc_extract(channel_fn(stego), rec)
        decoded, _ = rs_decode(received, cfg)
        r_err = error_rate(msg_bits, decoded[: msg_bits.size])
        trace.append({"k": k, "r_error": r_err})
        if best is None or r_err < best[1]:
            best = (k, r_err, stego, rec)
        if r_err <= threshold:
            break

    if best is None:
        raise CapacityError("message does not fit at any supported RS rate")
    best_k, best_error, stego, rec = best
    result = AdaptiveResult(
        best_k=best_k, best_error=best_error, iterations=iterations, trace=trace
    )
    return stego, result, rec
