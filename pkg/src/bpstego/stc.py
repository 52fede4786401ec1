"""Binary syndrome-trellis embedding.

The parity-check matrix is built from height-h column sub-vectors placed on a
staircase: cover position j in message block i contributes its column to rows
i..i+h-1. Column patterns always have their first and last row set and are
drawn deterministically from a fixed generator, so sender and receiver
reconstruct the identical matrix from (n, k, h) alone. A Viterbi search over
the 2^h-state trellis finds the minimum-cost stego vector with the requested
syndrome.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CapacityError",
    "EmbeddingError",
    "StcParams",
    "build_columns",
    "stc_viterbi",
    "stc_syndrome",
]

_PATTERN_SEED = 0x5C37


class CapacityError(RuntimeError):
    """Message does not fit into the cover sequence."""


class EmbeddingError(RuntimeError):
    """No feasible stego vector exists (wet-position conflict)."""


@dataclass(frozen=True)
class StcParams:
    """Trellis constraint height and message-to-cover ratio."""

    h: int = 10
    payload_alpha: float = 0.5

    def __post_init__(self):
        if not 2 <= self.h <= 16:
            raise ValueError("constraint height out of supported range")
        if not 0.0 < self.payload_alpha < 1.0:
            raise ValueError("payload_alpha must lie in (0, 1)")


def build_columns(n, k, h):
    """Column masks and block indices of the staircase parity-check matrix.

    Returns (columns, block_of): per-position h-bit integer masks (bit b is
    matrix row block_of[j]+b) and the owning message-block index.
    """
    if k <= 0 or n <= 0:
        raise CapacityError("empty message or cover")
    if k > n:
        raise CapacityError(f"message of {k} bits exceeds {n} cover symbols")
    base, rem = divmod(n, k)
    widths = np.full(k, base, dtype=np.int64)
    widths[:rem] += 1
    rng = np.random.default_rng(_PATTERN_SEED + 1000003 * h)
    raw = rng.integers(0, 1 << h, size=n, dtype=np.int64)
    anchor = 1 | (1 << (h - 1))
    columns = np.empty(n, dtype=np.int64)
    block_of = np.repeat(np.arange(k, dtype=np.int64), widths)
    pos = 0
    for i in range(k):
        rows_left = min(h, k - i)  # rows below the last message row do not exist
        mask = (1 << rows_left) - 1
        for _ in range(widths[i]):
            columns[pos] = ((raw[pos] | anchor) & mask) | 1
            pos += 1
    return columns, block_of


def stc_syndrome(y, columns, block_of, k):
    """H . y over GF(2) for a stego bit vector."""
    acc = np.zeros(k, dtype=np.int64)
    for j in np.nonzero(y)[0]:
        col = int(columns[j])
        i = int(block_of[j])
        b = 0
        while col >> b:
            if (col >> b) & 1:
                acc[i + b] ^= 1
            b += 1
    return acc.astype(np.uint8)


def stc_viterbi(x, flip_costs, msg, h):
    """Minimum-cost stego vector y with the staircase syndrome equal to msg.

    ``flip_costs[j]`` is the price of y[j] != x[j]. Returns (y, total_cost).
    """
    x = np.asarray(x, dtype=np.uint8)
    msg = np.asarray(msg, dtype=np.uint8)
    n, k = x.size, msg.size
    columns, block_of = build_columns(n, k, h)
    n_states = 1 << h
    states = np.arange(n_states)

    cost = np.full(n_states, np.inf)
    cost[0] = 0.0
    choices = np.empty((n, n_states), dtype=np.uint8)
    pos = 0
    for i in range(k):
        while pos < n and block_of[pos] == i:
            col = int(columns[pos])
            rho = float(flip_costs[pos])
            c_zero, c_one = (0.0, rho) if x[pos] == 0 else (rho, 0.0)
            via_one = cost[states ^ col] + c_one
            via_zero = cost + c_zero
            take_one = via_one < via_zero
            cost = np.where(take_one, via_one, via_zero)
            choices[pos] = take_one
            pos += 1
        # consume message row i: bit 0 must equal msg[i], then shift the window
        new_cost = np.full(n_states, np.inf)
        half = n_states >> 1
        new_cost[:half] = cost[(states[:half] << 1) | int(msg[i])]
        cost = new_cost

    final_state = int(np.argmin(cost))
    total = float(cost[final_state])
    if not np.isfinite(total):
        raise EmbeddingError("no feasible stego vector for this syndrome")

    # Backtrack: undo each block's shift, then its columns in reverse.
    y = np.zeros(n, dtype=np.uint8)
    state = final_state
    pos = n
    for i in range(k - 1, -1, -1):
        state = (state << 1) | int(msg[i])
        while pos > 0 and block_of[pos - 1] == i:
            pos -= 1
            bit = int(choices[pos, state])
            y[pos] = bit
            if bit:
                state ^= int(columns[pos])
    return y, total
