"""Transport-block encode/decode chains.

``chain_encode`` runs CRC attachment, segmentation, turbo coding and
rate matching, emitting exactly the per-subframe bit budget for one
spatial stream.  ``chain_decode`` is the inverse on soft values and
reports whether the transport block CRC verified.  Input LLRs are
clamped to +/-``LLR_CLAMP`` so infinities from noiseless channels stay
finite; systematic filler positions are pinned to that clamp since
filler bits are zeros by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from .crc import CRC24A, CRC24B, crc_attach, crc_check
from .ratematch import ek_split, rate_match, rate_dematch
from .segmentation import plan_segmentation, segment, desegment
from .turbo import turbo_encode, turbo_decode

LLR_CLAMP = 30.0


@dataclass
class ChainResult:
    """Decoded payload plus bookkeeping from one transport block."""

    bits: np.ndarray
    crc_ok: bool
    iterations: list[int] = field(default_factory=list)
    converged: bool = False


def chain_encode(tb_bits: np.ndarray, n_avail_bits: int, modulation_order: int) -> np.ndarray:
    """Encode one transport block into its rate-matched codeword."""
    tb_bits = np.ascontiguousarray(tb_bits, dtype=np.uint8)
    _, blocks = segment(crc_attach(tb_bits, CRC24A))
    sizes = ek_split(n_avail_bits, len(blocks), modulation_order)
    parts = [rate_match(turbo_encode(cb.bits), e) for cb, e in zip(blocks, sizes)]
    out = np.concatenate(parts)
    assert out.shape[0] == n_avail_bits
    return out


def chain_decode(
    llrs: np.ndarray,
    tbs_bits: int,
    n_avail_bits: int,
    modulation_order: int,
    max_iters: int = 8,
    ext_scale: float = 0.75,
    llr_clamp: float = LLR_CLAMP,
) -> ChainResult:
    """Decode one transport block from codeword LLRs (positive = bit 0)."""
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape[0] != n_avail_bits:
        raise ConfigError(f"expected {n_avail_bits} LLRs, got {llrs.shape[0]}")
    llrs = np.clip(llrs, -llr_clamp, llr_clamp)

    plan = plan_segmentation(tbs_bits + 24)
    sizes = ek_split(n_avail_bits, plan.c, modulation_order)

    decoded = []
    iterations = []
    all_converged = True
    pos = 0
    for r, (k, e) in enumerate(zip(plan.k_sizes, sizes)):
        soft = rate_dematch(llrs[pos:pos + e], k)
        pos += e
        filler = plan.filler_bits if r == 0 else 0
        if filler:
            soft[:filler] = llr_clamp
        if plan.has_cb_crc:
            crc_poly, crc_offset = CRC24B, 0
        else:
            crc_poly, crc_offset = CRC24A, filler
        bits, iters, ok = turbo_decode(
            soft, k, max_iters=max_iters, ext_scale=ext_scale,
            crc_poly=crc_poly, crc_offset=crc_offset,
        )
        decoded.append(bits)
        iterations.append(iters)
        all_converged = all_converged and ok

    stream = desegment(decoded, plan)
    crc_ok = crc_check(stream, CRC24A)
    return ChainResult(
        bits=stream[:tbs_bits],
        crc_ok=crc_ok,
        iterations=iterations,
        converged=all_converged,
    )
