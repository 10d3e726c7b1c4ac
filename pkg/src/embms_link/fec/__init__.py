"""Transport-channel coding: CRC, segmentation, turbo code, rate matching.

The encode path mirrors TS 36.212 section 5.3.2: TB CRC attachment,
code block segmentation with per-block CRCs, rate-1/3 turbo coding, and
circular-buffer rate matching at redundancy version 0.  ``chain.py``
glues the stages together in both directions.
"""

from .crc import CRC24A, CRC24B, crc_attach, crc_check, crc_remainder
from .segmentation import CodeBlock, SegmentPlan, plan_segmentation, segment, desegment
from .turbo import qpp_permutation, turbo_encode, turbo_decode, valid_block_sizes
from .ratematch import ek_split, rate_match, rate_dematch, selection_map
from .chain import LLR_CLAMP, ChainResult, chain_encode, chain_decode

__all__ = [
    "CRC24A", "CRC24B", "crc_attach", "crc_check", "crc_remainder",
    "CodeBlock", "SegmentPlan", "plan_segmentation", "segment", "desegment",
    "qpp_permutation", "turbo_encode", "turbo_decode", "valid_block_sizes",
    "ek_split", "rate_match", "rate_dematch", "selection_map",
    "LLR_CLAMP", "ChainResult", "chain_encode", "chain_decode",
]
