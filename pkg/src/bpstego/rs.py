"""RS(31, k) error correction over GF(2^5).

Systematic encoding, bounded-distance decoding via syndromes,
Berlekamp-Massey, Chien search and Forney's formula. The primitive
polynomial is x^5 + x^2 + 1; symbols are 5-bit, MSB first in the bit stream.
"""

from dataclasses import dataclass

import numpy as np

from .jpegmodel import ParameterError

__all__ = [
    "RsConfig",
    "VALID_K",
    "gf_mul",
    "gf_inv",
    "rs_encode",
    "rs_decode",
    "bits_to_symbols",
    "symbols_to_bits",
]

N = 31
SYMBOL_BITS = 5
_PRIM_POLY = 0b100101  # x^5 + x^2 + 1
_GENERATOR = 2

VALID_K = tuple(range(29, 5, -2))  # 29, 27, ..., 7


def _build_tables():
    exp = np.zeros(2 * N, dtype=np.int64)
    log = np.zeros(N + 1, dtype=np.int64)
    value = 1
    for i in range(N):
        exp[i] = value
        log[value] = i
        value <<= 1
        if value & 0b100000:
            value ^= _PRIM_POLY
    exp[N : 2 * N] = exp[:N]
    return exp, log


_EXP, _LOG = _build_tables()


def gf_mul(a, b):
    if a == 0 or b == 0:
        return 0
    return int(_EXP[_LOG[a] + _LOG[b]])


def gf_inv(a):
    if a == 0:
        raise ZeroDivisionError("zero has no inverse in GF(32)")
    return int(_EXP[(N - _LOG[a]) % N])


def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] ^= gf_mul(a, b)
    return out


def _generator_poly(n_parity):
    g = [1]
    for i in range(1, n_parity + 1):
        g = _poly_mul(g, [1, _EXP[i]])
    return g


_GEN_CACHE = {}


def _gen_poly(n_parity):
    if n_parity not in _GEN_CACHE:
        _GEN_CACHE[n_parity] = _generator_poly(n_parity)
    return _GEN_CACHE[n_parity]


@dataclass(frozen=True)
class RsConfig:
    """RS(31, k) with k stepping over the odd values 29 down to 7."""

    k_star: int
    n_star: int = N

    def __post_init__(self):
        if self.n_star != N:
            raise ParameterError("only code length 31 is supported")
        if self.k_star not in VALID_K:
            raise ParameterError(f"k must be one of {VALID_K}")

    @property
    def t(self):
        return (self.n_star - self.k_star) // 2


def bits_to_symbols(bits):
    """Pack a 0/1 vector into 5-bit symbols, zero-padding the tail."""
    bits = np.asarray(bits, dtype=np.uint8)
    pad = (-bits.size) % SYMBOL_BITS
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    weights = 1 << np.arange(SYMBOL_BITS - 1, -1, -1)
    return (bits.reshape(-1, SYMBOL_BITS) * weights).sum(axis=1).astype(np.int64)


def symbols_to_bits(symbols):
    """Unpack 5-bit symbols into a 0/1 vector, MSB first."""
    symbols = np.asarray(symbols, dtype=np.int64)
    shifts = np.arange(SYMBOL_BITS - 1, -1, -1)
    return ((symbols[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def _encode_block(msg_symbols, n_parity):
    gen = _gen_poly(n_parity)
    rem = [0] * n_parity
    for sym in msg_symbols:
        factor = sym ^ rem[0]
        rem = rem[1:] + [0]
        if factor:
            for i in range(n_parity):
                rem[i] ^= gf_mul(factor, gen[i + 1])
    return list(msg_symbols) + rem


def rs_encode(msg_bits, cfg):
    """Systematic RS encoding; the message is zero-padded to whole codewords."""
    msg_bits = np.asarray(msg_bits, dtype=np.uint8)
    symbols = bits_to_symbols(msg_bits)
    pad = (-symbols.size) % cfg.k_star
    if pad:
        symbols = np.concatenate([symbols, np.zeros(pad, dtype=np.int64)])
    n_parity = cfg.n_star - cfg.k_star
    coded = []
    for start in range(0, symbols.size, cfg.k_star):
        coded.extend(_encode_block(symbols[start : start + cfg.k_star].tolist(), n_parity))
    return symbols_to_bits(np.array(coded, dtype=np.int64))


def _syndromes(received, n_parity):
    syn = []
    for i in range(1, n_parity + 1):
        alpha = int(_EXP[i])
        acc = 0
        for sym in received:
            acc = gf_mul(acc, alpha) ^ sym
        syn.append(acc)
    return syn


def _berlekamp_massey(syn):
    sigma = [1]
    prev = [1]
    l, m, b = 0, 1, 1
    for n, s_n in enumerate(syn):
        delta = s_n
        for i in range(1, l + 1):
            delta ^= gf_mul(sigma[i], syn[n - i])
        if delta == 0:
            m += 1
        elif 2 * l <= n:
            tmp = sigma[:]
            scale = gf_mul(delta, gf_inv(b))
            shifted = [0] * m + [gf_mul(scale, c) for c in prev]
            sigma = [a ^ b2 for a, b2 in _zip_pad(sigma, shifted)]
            prev, l, b, m = tmp, n + 1 - l, delta, 1
        else:
            scale = gf_mul(delta, gf_inv(b))
            shifted = [0] * m + [gf_mul(scale, c) for c in prev]
            sigma = [a ^ b2 for a, b2 in _zip_pad(sigma, shifted)]
            m += 1
    return sigma, l


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return zip(a, b)


def _poly_eval(poly, x):
    acc = 0
    for coeff in reversed(poly):
        acc = gf_mul(acc, x) ^ coeff
    return acc


def _decode_block(received, cfg):
    """Decode one codeword; returns (msg_symbols, corrected_ok)."""
    n_parity = cfg.n_star - cfg.k_star
    syn = _syndromes(received, n_parity)
    if not any(syn):
        return received[: cfg.k_star], True
    sigma, l = _berlekamp_massey(syn)
    if l > cfg.t or len(sigma) - 1 != l:
        return received[: cfg.k_star], False
    # Chien search: roots of sigma give error positions.
    positions = []
    for pos in range(N):
        # received[0] is the coefficient of x^(n-1); its locator is alpha^(n-1-0)
        x_inv = int(_EXP[(N - (N - 1 - pos)) % N])
        if _poly_eval(sigma, x_inv) == 0:
            positions.append(pos)
    if len(positions) != l:
        return received[: cfg.k_star], False
    # Forney: omega(x) = [S(x) sigma(x)] mod x^(2t)
    s_poly = syn  # S(x) with syn[i] the coefficient of x^i
    omega = [0] * n_parity
    for i, s in enumerate(s_poly):
        if s == 0:
            continue
        for j, c in enumerate(sigma):
            if i + j < n_parity and c:
                omega[i + j] ^= gf_mul(s, c)
    sigma_deriv = [sigma[i] if i % 2 == 1 else 0 for i in range(1, len(sigma))]
    corrected = list(received)
    for pos in positions:
        x_inv = int(_EXP[(N - (N - 1 - pos)) % N])
        denom = _poly_eval(sigma_deriv, x_inv)
        if denom == 0:
            return received[: cfg.k_star], False
        magnitude = gf_mul(_poly_eval(omega, x_inv), gf_inv(denom))
        corrected[pos] ^= magnitude
    if any(_syndromes(corrected, n_parity)):
        return received[: cfg.k_star], False
    return corrected[: cfg.k_star], True


def rs_decode(coded_bits, cfg):
    """Decode codeword stream; uncorrectable blocks pass through as received."""
    coded_bits = np.asarray(coded_bits, dtype=np.uint8)
    if coded_bits.size % (cfg.n_star * SYMBOL_BITS):
        raise ParameterError("coded length must be a multiple of 155 bits")
    symbols = bits_to_symbols(coded_bits)
    msg_symbols = []
    uncorrectable = 0
    for start in range(0, symbols.size, cfg.n_star):
        block = symbols[start : start + cfg.n_star].tolist()
        msg, ok = _decode_block(block, cfg)
        msg_symbols.extend(msg)
        if not ok:
            uncorrectable += 1
    return symbols_to_bits(np.array(msg_symbols, dtype=np.int64)), uncorrectable
