"""CRC attachment and checking for transport and code blocks.

Two generators from TS 36.212 section 5.1.1 are used: gCRC24A protects
the transport block, gCRC24B protects individual code blocks after
segmentation.  Bits are processed MSB-first with an all-zero initial
register, matching plain polynomial long division.
"""

import numpy as np
from numba import njit

# Low 24 bits of the generator polynomials (the x^24 term is implicit).
CRC24A = 0x864CFB
CRC24B = 0x800063
CRC_WIDTH = 24


@njit(cache=True)
def _remainder_kernel(bits, poly, width):
    reg = 0
    mask = (1 << width) - 1
    top = width - 1
    for i in range(bits.shape[0]):
        fb = (np.int64(bits[i]) ^ (reg >> top)) & 1
        reg = (reg << 1) & mask
        if fb:
            reg ^= poly
    return reg


def crc_remainder(bits: np.ndarray, poly: int = CRC24A, width: int = CRC_WIDTH) -> int:
    """Remainder of ``bits * x^width`` divided by the generator."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    return int(_remainder_kernel(bits, poly, width))


def crc_attach(bits: np.ndarray, poly: int = CRC24A, width: int = CRC_WIDTH) -> np.ndarray:
    """Append the CRC parity bits (MSB first) to a bit array."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    rem = _remainder_kernel(bits, poly, width)
    parity = np.empty(width, dtype=np.uint8)
    for i in range(width):
        parity[i] = (rem >> (width - 1 - i)) & 1
    return np.concatenate([bits, parity])


def crc_check(bits_with_crc: np.ndarray, poly: int = CRC24A, width: int = CRC_WIDTH) -> bool:
    """True when the trailing parity matches the payload.

    A protected block has zero remainder, so checking is one division
    over the whole array.
    """
    bits_with_crc = np.ascontiguousarray(bits_with_crc, dtype=np.uint8)
    if bits_with_crc.shape[0] <= width:
        return False
    return _remainder_kernel(bits_with_crc, poly, width) == 0
