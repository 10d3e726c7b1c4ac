"""Circular-buffer rate matching (TS 36.212 section 5.1.4.1), rv = 0.

Each of the three turbo output streams passes through a 32-column
sub-block interleaver with the bit-reversal column permutation; the
buffer is the interleaved systematic stream followed by the two parity
streams interlaced.  Selection starts at k0 = 2 * R_subblock, skips the
dummy padding introduced by the row round-up, and wraps when more bits
are requested than the buffer holds.

Everything is precomputed into an index map from output position to
mother-codeword position, so matching is a gather and de-matching is a
bincount-accumulate (repeats add, punctured positions stay at LLR 0).
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError

# Column permutation of the sub-block interleaver.
COLUMN_PERM = np.array([
    0, 16, 8, 24, 4, 20, 12, 28, 2, 18, 10, 26, 6, 22, 14, 30,
    1, 17, 9, 25, 5, 21, 13, 29, 3, 19, 11, 27, 7, 23, 15, 31,
], dtype=np.int64)

_order_cache: dict[int, np.ndarray] = {}
_map_cache: dict[tuple[int, int], np.ndarray] = {}


def _buffer_read_order(k: int) -> np.ndarray:
    """Non-dummy mother indices in circular-buffer read order from k0."""
    cached = _order_cache.get(k)
    if cached is not None:
        return cached
    d = k + 4
    r = -(-d // 32)
    kp = 32 * r
    nd = kp - d

    # sub-block interleave for streams 0 and 1: column-permuted column read
    rows = np.arange(r, dtype=np.int64)
    v01 = (rows[None, :] * 32 + COLUMN_PERM[:, None]).ravel()  # padded index
    v01 = v01 - nd  # mother stream offset; negatives are dummies

    # stream 2 uses the shifted permutation
    ks = np.arange(kp, dtype=np.int64)
    v2 = (COLUMN_PERM[ks // r] + 32 * (ks % r) + 1) % kp - nd

    buf = np.empty(3 * kp, dtype=np.int64)
    buf[0:kp] = np.where(v01 >= 0, v01, -1)
    buf[kp::2] = np.where(v01 >= 0, v01 + d, -1)
    buf[kp + 1::2] = np.where(v2 >= 0, v2 + 2 * d, -1)

    k0 = 2 * r
    order = np.concatenate([buf[k0:], buf[:k0]])
    order = order[order >= 0]
    assert order.shape[0] == 3 * d
    _order_cache[k] = order
    return order


def selection_map(k: int, e: int, rv: int = 0) -> np.ndarray:
    """Mother-bit index transmitted at each of the ``e`` output positions."""
    if rv != 0:
        raise ConfigError("only redundancy version 0 is supported")
    if e < 1:
        raise ConfigError("rate matching needs a positive output length")
    cached = _map_cache.get((k, e))
    if cached is not None:
        return cached
    order = _buffer_read_order(k)
    sel = order[np.arange(e, dtype=np.int64) % order.shape[0]]
    _map_cache[(k, e)] = sel
    return sel


def rate_match(mother_bits: np.ndarray, e: int, rv: int = 0) -> np.ndarray:
    """Select ``e`` transmit bits from one encoded block."""
    mother_bits = np.asarray(mother_bits)
    k = mother_bits.shape[0] // 3 - 4
    if mother_bits.shape[0] != 3 * (k + 4):
        raise ConfigError("mother codeword length must be 3*(k+4)")
    return mother_bits[selection_map(k, e, rv)]


def rate_dematch(llrs: np.ndarray, k: int, rv: int = 0) -> np.ndarray:
    """Adjoint of :func:`rate_match` on soft values.

    Repeated positions accumulate; positions never transmitted come back
    as LLR 0.
    """
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    sel = selection_map(k, llrs.shape[0], rv)
    return np.bincount(sel, weights=llrs, minlength=3 * (k + 4))


def ek_split(total_bits: int, n_blocks: int, modulation_order: int) -> list[int]:
    """Per-block rate-matched lengths, symbol aligned, summing to the total."""
    if total_bits % modulation_order:
        raise ConfigError("bit budget is not symbol aligned")
    g_prime = total_bits // modulation_order
    gamma = g_prime % n_blocks
    sizes = []
    for r in range(n_blocks):
        if r <= n_blocks - gamma - 1:
            sizes.append(modulation_order * (g_prime // n_blocks))
        else:
            sizes.append(modulation_order * (-(-g_prime // n_blocks)))
    assert sum(sizes) == total_bits
    return sizes
