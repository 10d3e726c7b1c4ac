"""Rate-1/3 parallel concatenated turbo code (TS 36.212 section 5.1.3).

Both constituent encoders are the 8-state recursive systematic code
with feedback 1 + D^2 + D^3 and parity 1 + D + D^3.  The internal
interleaver is the QPP permutation pi(i) = (f1*i + f2*i^2) mod k with
parameters from the bundled table.  Encoding appends 12 termination
bits; output streams are multiplexed `[d0 | d1 | d2]`, each of length
k + 4, with the tail bits woven in as the standard prescribes.

Decoding is max-log BCJR with a fixed extrinsic scale factor.  LLRs are
positive-for-zero throughout.  The decoder exits early as soon as the
supplied CRC passes; without a CRC it always runs the full iteration
budget and reports converged=False.
"""

from __future__ import annotations

import csv
from importlib import resources

import numpy as np
from numba import njit

from ..errors import ConfigError, DataFileError
from .crc import _remainder_kernel

DEFAULT_MAX_ITERS = 8
DEFAULT_EXT_SCALE = 0.75
N_TAIL_BITS = 12

# Trellis tables for state = (m3 << 2) | (m2 << 1) | m1, m1 newest.
_NEXT = np.zeros((8, 2), dtype=np.int64)
_PAR = np.zeros((8, 2), dtype=np.int64)
for _s in range(8):
    _s1, _s2, _s3 = _s & 1, (_s >> 1) & 1, (_s >> 2) & 1
    for _u in (0, 1):
        _w = _u ^ _s2 ^ _s3
        _PAR[_s, _u] = _w ^ _s1 ^ _s3
        _NEXT[_s, _u] = (_s2 << 2) | (_s1 << 1) | _w

_NEG = np.float32(-1e30)

_qpp_params: dict[int, tuple[int, int]] | None = None
_valid_k: np.ndarray | None = None
_perm_cache: dict[int, np.ndarray] = {}


def _load_qpp():
    global _qpp_params, _valid_k
    if _qpp_params is not None:
        return
    path = resources.files("embms_link.data").joinpath("qpp_interleaver.csv")
    params = {}
    try:
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                params[int(row["k"])] = (int(row["f1"]), int(row["f2"]))
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise DataFileError(f"cannot load QPP table {path}: {exc}") from exc
    if len(params) != 188:
        raise DataFileError(f"QPP table has {len(params)} sizes, expected 188")
    _qpp_params = params
    _valid_k = np.array(sorted(params), dtype=np.int64)


def valid_block_sizes() -> np.ndarray:
    """Sorted array of the turbo interleaver sizes."""
    _load_qpp()
    return _valid_k


def qpp_permutation(k: int) -> np.ndarray:
    """Interleaver read order: output position i takes input pi(i)."""
    _load_qpp()
    cached = _perm_cache.get(k)
    if cached is not None:
        return cached
    if k not in _qpp_params:
        raise ConfigError(f"{k} is not a valid turbo block size")
    f1, f2 = _qpp_params[k]
    i = np.arange(k, dtype=np.int64)
    perm = ((f1 * i + f2 * i * i) % k).astype(np.int64)
    _perm_cache[k] = perm
    return perm


@njit(cache=True)
def _rsc_encode(bits, par):
    s = 0
    for i in range(bits.shape[0]):
        u = np.int64(bits[i])
        s1 = s & 1
        s2 = (s >> 1) & 1
        s3 = (s >> 2) & 1
        w = u ^ s2 ^ s3
        par[i] = w ^ s1 ^ s3
        s = (s2 << 2) | (s1 << 1) | w
    return s


@njit(cache=True)
def _rsc_tail(s, xs, zs):
    for t in range(3):
        s1 = s & 1
        s2 = (s >> 1) & 1
        s3 = (s >> 2) & 1
        xs[t] = s2 ^ s3
        zs[t] = s1 ^ s3
        s = (s2 << 2) | (s1 << 1)


def turbo_encode(bits: np.ndarray) -> np.ndarray:
    """Encode one code block; returns 3k + 12 bits as ``[d0 | d1 | d2]``."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    k = bits.shape[0]
    perm = qpp_permutation(k)

    par1 = np.empty(k, dtype=np.uint8)
    s1 = _rsc_encode(bits, par1)
    x1 = np.empty(3, dtype=np.uint8)
    z1 = np.empty(3, dtype=np.uint8)
    _rsc_tail(s1, x1, z1)

    inter = bits[perm]
    par2 = np.empty(k, dtype=np.uint8)
    s2 = _rsc_encode(inter, par2)
    x2 = np.empty(3, dtype=np.uint8)
    z2 = np.empty(3, dtype=np.uint8)
    _rsc_tail(s2, x2, z2)

    d = k + 4
    out = np.empty(3 * d, dtype=np.uint8)
    out[0:k] = bits
    out[k:k + 4] = (x1[0], z1[1], x2[0], z2[1])
    out[d:d + k] = par1
    out[d + k:d + k + 4] = (z1[0], x1[2], z2[0], x2[2])
    out[2 * d:2 * d + k] = par2
    out[2 * d + k:2 * d + k + 4] = (x1[1], z1[2], x2[1], z2[2])
    return out


@njit(cache=True, fastmath=True)
def _maxlog_bcjr(ls, lp, la, tx, tz, next_s, par_s, app):
    """One SISO pass; writes a-posteriori LLRs for the k info bits."""
    k = ls.shape[0]
    alpha = np.empty((k + 1, 8), dtype=np.float32)
    for s in range(8):
        alpha[0, s] = _NEG
    alpha[0, 0] = np.float32(0.0)

    for i in range(k):
        h = np.float32(0.5) * (ls[i] + la[i])
        g = np.float32(0.5) * lp[i]
        for s in range(8):
            alpha[i + 1, s] = _NEG
        for s in range(8):
            a = alpha[i, s]
            for u in range(2):
                gam = (h if u == 0 else -h) + (g if par_s[s, u] == 0 else -g)
                ns = next_s[s, u]
                m = a + gam
                if m > alpha[i + 1, ns]:
                    alpha[i + 1, ns] = m
        mx = alpha[i + 1, 0]
        for s in range(1, 8):
            if alpha[i + 1, s] > mx:
                mx = alpha[i + 1, s]
        for s in range(8):
            alpha[i + 1, s] -= mx

    # beta at the trellis end comes from the three deterministic tail steps
    beta = np.empty(8, dtype=np.float32)
    for s in range(8):
        b = np.float32(0.0)
        st = s
        for t in range(3):
            st1 = st & 1
            st2 = (st >> 1) & 1
            st3 = (st >> 2) & 1
            u = st2 ^ st3
            p = st1 ^ st3
            b += np.float32(0.5) * tx[t] * np.float32(1 - 2 * u)
            b += np.float32(0.5) * tz[t] * np.float32(1 - 2 * p)
            st = (st2 << 2) | (st1 << 1)
        beta[s] = b

    beta_prev = np.empty(8, dtype=np.float32)
    for i in range(k - 1, -1, -1):
        h = np.float32(0.5) * (ls[i] + la[i])
        g = np.float32(0.5) * lp[i]
        num = _NEG
        den = _NEG
        for s in range(8):
            g0 = h + (g if par_s[s, 0] == 0 else -g)
            g1 = -h + (g if par_s[s, 1] == 0 else -g)
            b0 = g0 + beta[next_s[s, 0]]
            b1 = g1 + beta[next_s[s, 1]]
            m0 = alpha[i, s] + b0
            m1 = alpha[i, s] + b1
            if m0 > num:
                num = m0
            if m1 > den:
                den = m1
            beta_prev[s] = b0 if b0 > b1 else b1
        mx = beta_prev[0]
        for s in range(1, 8):
            if beta_prev[s] > mx:
                mx = beta_prev[s]
        for s in range(8):
            beta[s] = beta_prev[s] - mx
        app[i] = num - den


def _check_crc(bits: np.ndarray, crc_poly: int, crc_offset: int) -> bool:
    return _remainder_kernel(bits[crc_offset:], crc_poly, 24) == 0


def turbo_decode(
    llr: np.ndarray,
    k: int,
    max_iters: int = DEFAULT_MAX_ITERS,
    ext_scale: float = DEFAULT_EXT_SCALE,
    crc_poly: int | None = None,
    crc_offset: int = 0,
) -> tuple[np.ndarray, int, bool]:
    """Decode one code block from mother-codeword LLRs.

    Args:
        llr: soft values for ``[d0 | d1 | d2]``, length 3k + 12,
            positive favours bit 0.
        k: info block size (a valid interleaver size).
        max_iters: full decoder iterations before giving up.
        ext_scale: extrinsic scaling applied after each SISO pass.
        crc_poly: when given, decoding stops at the first iteration whose
            hard decisions pass this CRC (checked from ``crc_offset``).

    Returns:
        (hard bits, iterations run, converged) where converged means the
        CRC passed.
    """
    llr = np.ascontiguousarray(llr, dtype=np.float32)
    d = k + 4
    if llr.shape[0] != 3 * d:
        raise ConfigError(f"LLR length {llr.shape[0]} does not match 3*(k+4) = {3 * d}")
    perm = qpp_permutation(k)

    ls = llr[0:k]
    lp1 = llr[d:d + k]
    lp2 = llr[2 * d:2 * d + k]
    # tail systematic/parity for each constituent, undoing the multiplex
    tx1 = np.array([llr[k], llr[2 * d + k], llr[d + k + 1]], dtype=np.float32)
    tz1 = np.array([llr[d + k], llr[k + 1], llr[2 * d + k + 1]], dtype=np.float32)
    tx2 = np.array([llr[k + 2], llr[2 * d + k + 2], llr[d + k + 3]], dtype=np.float32)
    tz2 = np.array([llr[d + k + 2], llr[k + 3], llr[2 * d + k + 3]], dtype=np.float32)

    ls2 = np.ascontiguousarray(ls[perm])
    la1 = np.zeros(k, dtype=np.float32)
    app1 = np.empty(k, dtype=np.float32)
    app2 = np.empty(k, dtype=np.float32)
    scale = np.float32(ext_scale)

    bits = np.zeros(k, dtype=np.uint8)
    for it in range(max_iters):
        _maxlog_bcjr(ls, lp1, la1, tx1, tz1, _NEXT, _PAR, app1)
        bits = (app1 < 0).astype(np.uint8)
        if crc_poly is not None and _check_crc(bits, crc_poly, crc_offset):
            return bits, it + 1, True

        le1 = scale * (app1 - ls - la1)
        la2 = np.ascontiguousarray(le1[perm])
        _maxlog_bcjr(ls2, lp2, la2, tx2, tz2, _NEXT, _PAR, app2)

        le2 = scale * (app2 - ls2 - la2)
        la1 = np.zeros(k, dtype=np.float32)
        la1[perm] = le2

        bits = np.zeros(k, dtype=np.uint8)
        bits[perm] = (app2 < 0).astype(np.uint8)
        if crc_poly is not None and _check_crc(bits, crc_poly, crc_offset):
            return bits, it + 1, True
    return bits, max_iters, False
