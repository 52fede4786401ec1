"""Dither-modulation embedding over the syndrome trellis.

A cover symbol is the parity of the nearest quantization-lattice index of a
dequantized AC coefficient; embedding moves a flipped coefficient to the
adjacent opposite-parity lattice point in the cheaper direction. All 63 AC
modes of every block take part, visited in a key-derived pseudorandom order.
"""

import math
from dataclasses import dataclass, asdict

import numpy as np

from .costs import WET_COST
from .jpegmodel import CoeffImage, ParameterError, dequantize, quant_table_for_qf
from .stc import CapacityError, EmbeddingError, StcParams, build_columns, stc_syndrome, stc_viterbi

__all__ = [
    "CoverSequence",
    "StegoRecord",
    "RS_SYMBOL_BITS",
    "RS_CODE_LENGTH",
    "coded_length",
    "ac_positions",
    "lattice_geometry",
    "extract_cover_sequence",
    "stc_embed",
    "apply_stego_changes",
    "stc_extract",
    "write_record",
    "read_record",
]

RS_SYMBOL_BITS = 5
RS_CODE_LENGTH = 31


def coded_length(n_m, rs_k):
    """Bit length of the RS-coded message for a raw bit count and RS(31, k)."""
    blocks = math.ceil(n_m / (RS_SYMBOL_BITS * rs_k))
    return blocks * RS_SYMBOL_BITS * RS_CODE_LENGTH


@dataclass(frozen=True)
class CoverSequence:
    """Permuted parity symbols with their lattice modification distances."""

    symbols: np.ndarray  # 0/1 per selected coefficient
    d_plus: np.ndarray  # dequantized distance to the next-higher opposite-parity point
    d_minus: np.ndarray  # same downward
    positions: np.ndarray  # flat plane indices, permuted
    perm_seed: int

    def __len__(self):
        return self.symbols.size


@dataclass(frozen=True)
class StegoRecord:
    """Shared-key sidecar: everything the receiver needs besides the stego file."""

    seed: int
    n_m: int
    rs_k: int
    alpha: float
    qf_cover: int
    t1: int = 8
    mu: float = 0.5
    o1: int = 0
    o2: int = 18
    h: int = 10


def ac_positions(shape):
    """Flat indices of every AC coefficient (DC of each block excluded)."""
    h, w = shape
    rows, cols = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    ac = ~((rows % 8 == 0) & (cols % 8 == 0))
    return np.flatnonzero(ac)


def lattice_geometry(c, qtable=None):
    """Nearest lattice index, its parity and the +-direction distances.

    ``qtable`` defaults to the image's own table; the receiver passes the
    cover table while dequantizing with the received (channel) table.
    """
    ref = qtable if qtable is not None else c.qtable
    q = np.tile(ref.entries.astype(np.float64), np.array(c.coeffs.shape) // 8)
    cbar = dequantize(c)
    m = np.rint(cbar / q)  # ties toward the even index
    parity = (m.astype(np.int64) & 1).astype(np.uint8)
    d_plus = (m + 1.0) * q - cbar
    d_minus = cbar - (m - 1.0) * q
    return m.astype(np.int64), parity, d_plus, d_minus


def _permuted_ac(shape, seed):
    flat = ac_positions(shape)
    rng = np.random.default_rng(seed)
    return flat[rng.permutation(flat.size)]


def extract_cover_sequence(c, seed):
    """Parity symbols and modification distances in keyed pseudorandom order."""
    _, parity, d_plus, d_minus = lattice_geometry(c)
    positions = _permuted_ac(c.coeffs.shape, seed)
    return CoverSequence(
        symbols=parity.ravel()[positions],
        d_plus=d_plus.ravel()[positions],
        d_minus=d_minus.ravel()[positions],
        positions=positions,
        perm_seed=int(seed),
    )


def stc_embed(cover, msg_bits, costmaps, params):
    """Flip decisions (0 keep, +1 up, -1 down) embedding msg_bits into the cover.

    The ternary choice degenerates for parity embedding: both directions
    realize the same symbol, so the trellis runs on min(xi+, xi-) and the
    direction is resolved afterwards.
    """
    msg_bits = np.asarray(msg_bits, dtype=np.uint8)
    if msg_bits.size > len(cover):
        raise CapacityError(
            f"{msg_bits.size} message bits exceed {len(cover)} cover symbols"
        )
    xi_plus = costmaps.xi_plus.ravel()[cover.positions]
    xi_minus = costmaps.xi_minus.ravel()[cover.positions]
    flip_costs = np.minimum(xi_plus, xi_minus)
    y, _ = stc_viterbi(cover.symbols, flip_costs, msg_bits, params.h)
    flipped = y != cover.symbols
    if np.any(flipped & (flip_costs >= costmaps.wet_threshold)):
        raise EmbeddingError("syndrome requires flipping a wet position")
    decisions = np.zeros(len(cover), dtype=np.int8)
    decisions[flipped] = np.where(xi_plus[flipped] <= xi_minus[flipped], 1, -1)
    return decisions


def apply_stego_changes(c, seq, decisions):
    """Move flipped coefficients to the adjacent opposite-parity lattice index."""
    if decisions.size != len(seq):
        raise ParameterError("flip decisions do not align with the cover sequence")
    coeffs = c.coeffs.copy()
    flat = coeffs.ravel()
    moved = decisions != 0
    flat[seq.positions[moved]] += decisions[moved]
    return CoeffImage(coeffs=coeffs, qtable=c.qtable)


def stc_extract(stego, rec):
    """Recover the RS-coded bit vector from (possibly recompressed) coefficients."""
    cover_table = quant_table_for_qf(rec.qf_cover)
    _, parity, _, _ = lattice_geometry(stego, qtable=cover_table)
    positions = _permuted_ac(stego.coeffs.shape, rec.seed)
    symbols = parity.ravel()[positions]
    n_coded = coded_length(rec.n_m, rec.rs_k)
    columns, block_of = build_columns(symbols.size, n_coded, rec.h)
    return stc_syndrome(symbols, columns, block_of, n_coded)


_RECORD_FIELDS = ("seed", "n_m", "rs_k", "alpha", "qf_cover", "t1", "mu", "o1", "o2", "h")
_FLOAT_FIELDS = {"alpha", "mu"}


def write_record(path, rec):
    """Serialize the key sidecar as one ASCII name=value pair per line."""
    values = asdict(rec)
    with open(path, "w", encoding="ascii") as fh:
        for name in _RECORD_FIELDS:
            value = values[name]
            fh.write(f"{name}={value}\n")


def read_record(path):
    """Parse a key sidecar written by :func:`write_record`."""
    values = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            name, _, raw = line.partition("=")
            if name not in _RECORD_FIELDS:
                raise ParameterError(f"unknown key-file field {name!r}")
            values[name] = float(raw) if name in _FLOAT_FIELDS else int(raw)
    missing = set(_RECORD_FIELDS) - set(values)
    if missing:
        raise ParameterError(f"key file missing fields: {sorted(missing)}")
    return StegoRecord(**values)
