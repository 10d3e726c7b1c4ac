"""Code block segmentation and its inverse (TS 36.212 section 5.1.2).

Transport blocks longer than the maximum turbo interleaver size are cut
into C blocks, each gaining its own 24-bit CRC.  Sizes are drawn from
the valid interleaver size list; filler bits pad the front of the first
block.  Filler bits are carried as zeros end to end (the receive side
pins them to a high-confidence zero), which keeps every stage a fixed
length function of the transport block size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .crc import CRC24B, crc_attach
from .turbo import valid_block_sizes

Z_MAX = 6144
CB_CRC_LEN = 24
MIN_INPUT_BITS = 40


@dataclass(frozen=True)
class SegmentPlan:
    """Block count and sizes for one transport block length."""

    b: int
    c: int
    k_sizes: tuple
    filler_bits: int

    @property
    def has_cb_crc(self) -> bool:
        return self.c > 1


@dataclass(frozen=True)
class CodeBlock:
    """One turbo-encoder input block.

    ``bits`` has length ``k`` and already contains filler zeros (first
    block only) and the per-block CRC when the plan has one.
    """

    bits: np.ndarray
    k: int
    filler_count: int


def plan_segmentation(b: int) -> SegmentPlan:
    """Compute block sizes for an input of ``b`` bits (TB plus its CRC)."""
    if b < MIN_INPUT_BITS:
        raise ConfigError(f"segmentation input of {b} bits is below the minimum of 40")
    sizes = valid_block_sizes()
    if b <= Z_MAX:
        c = 1
        b_prime = b
        k_plus = int(sizes[np.searchsorted(sizes, b_prime)])
        k_list = (k_plus,)
        filler = k_plus - b_prime
    else:
        c = -(-b // (Z_MAX - CB_CRC_LEN))
        b_prime = b + c * CB_CRC_LEN
        k_plus = int(sizes[np.searchsorted(sizes, -(-b_prime // c))])
        idx = int(np.searchsorted(sizes, k_plus))
        k_minus = int(sizes[idx - 1])
        delta = k_plus - k_minus
        c_minus = (c * k_plus - b_prime) // delta
        c_plus = c - c_minus
        k_list = (k_minus,) * c_minus + (k_plus,) * c_plus
        filler = c_plus * k_plus + c_minus * k_minus - b_prime
    return SegmentPlan(b=b, c=c, k_sizes=k_list, filler_bits=filler)


def segment(bits: np.ndarray) -> tuple[SegmentPlan, list[CodeBlock]]:
    """Split a CRC-protected transport block into encoder-ready blocks."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    plan = plan_segmentation(bits.shape[0])
    blocks = []
    pos = 0
    for r, k in enumerate(plan.k_sizes):
        filler = plan.filler_bits if r == 0 else 0
        n_data = k - filler - (CB_CRC_LEN if plan.has_cb_crc else 0)
        payload = np.concatenate([
            np.zeros(filler, dtype=np.uint8),
            bits[pos:pos + n_data],
        ])
        pos += n_data
        if plan.has_cb_crc:
            payload = crc_attach(payload, CRC24B)
        blocks.append(CodeBlock(bits=payload, k=k, filler_count=filler))
    assert pos == bits.shape[0]
    return plan, blocks


def desegment(block_bits: list[np.ndarray], plan: SegmentPlan) -> np.ndarray:
    """Rebuild the transport block bit stream from decoded blocks.

    Strips filler bits from the first block and per-block CRCs when
    present; the caller still has to verify the transport block CRC.
    """
    if len(block_bits) != plan.c:
        raise ConfigError("decoded block count does not match the plan")
    parts = []
    for r, bits in enumerate(block_bits):
        k = plan.k_sizes[r]
        if bits.shape[0] != k:
            raise ConfigError(f"block {r} has {bits.shape[0]} bits, expected {k}")
        start = plan.filler_bits if r == 0 else 0
        end = k - (CB_CRC_LEN if plan.has_cb_crc else 0)
        parts.append(bits[start:end])
    return np.concatenate(parts)
