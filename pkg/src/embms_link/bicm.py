"""Bit-interleaved coded modulation: scrambling, mapping, soft demapping.

Symbol mappings follow the Gray-labelled square constellations of
TS 36.211 section 7.1 (QPSK through 256QAM), loaded from a bundled
table of integer lattice coordinates and normalized to unit average
energy.  Even-numbered label bits select the in-phase amplitude and
odd-numbered bits the quadrature amplitude, which lets the max-log
demapper work one real axis at a time instead of searching the full
constellation.

LLR sign convention: positive means bit 0, matching the decoder.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from numba import njit

from .errors import ConfigError, DataFileError
from .numerology import MODULATION_ORDERS

GOLD_SHIFT = 1600  # warm-up length of the length-31 Gold sequence pair


# ---------------------------------------------------------------------------
# Scrambling (TS 36.211 section 7.2 Gold sequence)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _gold_sequence(c_init: np.int64, n: np.int64) -> np.ndarray:
    total = GOLD_SHIFT + n + 31
    x1 = np.zeros(total, dtype=np.uint8)
    x2 = np.zeros(total, dtype=np.uint8)
    x1[0] = 1
    for i in range(31):
        x2[i] = (c_init >> i) & 1
    for i in range(total - 31):
        x1[i + 31] = x1[i + 3] ^ x1[i]
        x2[i + 31] = x2[i + 3] ^ x2[i + 2] ^ x2[i + 1] ^ x2[i]
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        out[i] = x1[i + GOLD_SHIFT] ^ x2[i + GOLD_SHIFT]
    return out


_sequence_cache: dict[int, np.ndarray] = {}


def scrambling_sequence(c_init: int, length: int) -> np.ndarray:
    """First ``length`` bits of the Gold sequence for ``c_init``."""
    if not 0 <= c_init < 2**31:
        raise ConfigError(f"scrambling seed {c_init} outside [0, 2^31)")
    if length < 0:
        raise ConfigError("sequence length must be non-negative")
    cached = _sequence_cache.get(c_init)
    if cached is None or cached.shape[0] < length:
        grown = max(length, 2 * cached.shape[0] if cached is not None else length)
        cached = _gold_sequence(np.int64(c_init), np.int64(grown))
        cached.setflags(write=False)
        _sequence_cache[c_init] = cached
    return cached[:length]


def scramble_bits(bits: np.ndarray, c_init: int) -> np.ndarray:
    """XOR the codeword with the cell/layer scrambling sequence."""
    bits = np.asarray(bits, dtype=np.uint8)
    return bits ^ scrambling_sequence(c_init, bits.shape[0])


def descramble_llrs(llrs: np.ndarray, c_init: int) -> np.ndarray:
    """Undo scrambling in the LLR domain: flip signs where the sequence is 1."""
    llrs = np.asarray(llrs, dtype=np.float64)
    seq = scrambling_sequence(c_init, llrs.shape[0])
    return llrs * (1.0 - 2.0 * seq.astype(np.float64))


# ---------------------------------------------------------------------------
# Constellations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constellation:
    """Unit-energy Gray-labelled square constellation.

    ``points[i]`` is the symbol whose label bits, read MSB first, encode
    the integer ``i``.  ``axis_levels[j]`` is the PAM amplitude selected
    by the per-axis bit group encoding ``j``; the in-phase axis takes
    label bits 0, 2, 4, ... and the quadrature axis bits 1, 3, 5, ...
    """

    modulation_order: int
    points: np.ndarray
    axis_levels: np.ndarray

    @property
    def bits_per_axis(self) -> int:
        return self.modulation_order // 2


def _data_path(name: str) -> Path:
    return Path(str(resources.files("embms_link").joinpath("data", name)))


def _load_constellations(path: Path | None = None) -> dict[int, Constellation]:
    path = path or _data_path("constellations.csv")
    try:
        raw = path.read_text()
    except OSError as exc:
        raise DataFileError(f"cannot read constellation table: {exc}") from exc
    by_m: dict[int, dict[int, complex]] = {}
    for row in csv.DictReader(raw.splitlines()):
        try:
            size = int(row["M"])
            label = row["label_bits"]
            point = complex(int(row["re"]), int(row["im"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise DataFileError(f"malformed constellation row {row}: {exc}") from exc
        if len(label) != size.bit_length() - 1 or set(label) - {"0", "1"}:
            raise DataFileError(f"label {label!r} does not index a size-{size} set")
        by_m.setdefault(size, {})[int(label, 2)] = point
    out: dict[int, Constellation] = {}
    for size, table in by_m.items():
        m = size.bit_length() - 1
        if m not in MODULATION_ORDERS or len(table) != size:
            raise DataFileError(f"constellation of size {size} is incomplete")
        points = np.array([table[i] for i in range(size)], dtype=np.complex128)
        points /= np.sqrt(np.mean(np.abs(points) ** 2))
        axis = _extract_axis_levels(points, m)
        points.setflags(write=False)
        axis.setflags(write=False)
        out[m] = Constellation(modulation_order=m, points=points, axis_levels=axis)
    if set(out) != set(MODULATION_ORDERS):
        raise DataFileError(f"constellation table covers {sorted(out)}, expected {MODULATION_ORDERS}")
    return out


def _extract_axis_levels(points: np.ndarray, m: int) -> np.ndarray:
    """Recover per-axis PAM amplitudes, checking the axis factorization."""
    half = m // 2
    levels = np.full(1 << half, np.nan)
    for idx, point in enumerate(points):
        bits = [(idx >> (m - 1 - b)) & 1 for b in range(m)]
        i_idx = 0
        q_idx = 0
        for b in range(half):
            i_idx = (i_idx << 1) | bits[2 * b]
            q_idx = (q_idx << 1) | bits[2 * b + 1]
        for axis_idx, value in ((i_idx, point.real), (q_idx, point.imag)):
            if np.isnan(levels[axis_idx]):
                levels[axis_idx] = value
            elif abs(levels[axis_idx] - value) > 1e-12:
                raise DataFileError(
                    f"{1 << m}-point constellation does not factor per axis"
                )
    return levels


_constellations: dict[int, Constellation] | None = None


def constellation(modulation_order: int) -> Constellation:
    """The bundled unit-energy constellation for one modulation order."""
    global _constellations
    if _constellations is None:
        _constellations = _load_constellations()
    try:
        return _constellations[modulation_order]
    except KeyError:
        raise ConfigError(
            f"modulation order {modulation_order} not in {MODULATION_ORDERS}"
        ) from None


# ---------------------------------------------------------------------------
# Mapping and max-log demapping
# ---------------------------------------------------------------------------

def map_symbols(bits: np.ndarray, modulation_order: int) -> np.ndarray:
    """Map a bit stream onto constellation symbols, label bits MSB first."""
    const = constellation(modulation_order)
    bits = np.asarray(bits, dtype=np.uint8)
    m = modulation_order
    if bits.shape[0] % m:
        raise ConfigError(f"bit count {bits.shape[0]} is not a multiple of {m}")
    weights = 1 << np.arange(m - 1, -1, -1)
    indices = bits.reshape(-1, m) @ weights
    return const.points[indices]


def demap_llrs(
    symbols: np.ndarray, modulation_order: int, noise_var
) -> np.ndarray:
    """Max-log bit LLRs for received symbols.

    ``noise_var`` is the complex noise variance per symbol, scalar or
    one entry per symbol.  Positive LLR means bit 0.
    """
    const = constellation(modulation_order)
    symbols = np.asarray(symbols, dtype=np.complex128)
    n = symbols.shape[0]
    m = modulation_order
    nv = np.broadcast_to(np.asarray(noise_var, dtype=np.float64), (n,))
    if np.any(nv <= 0):
        raise ConfigError("noise variance must be positive")
    if m == 2:
        # QPSK collapses to a linear function of each axis
        scale = 2.0 * np.sqrt(2.0) / nv
        out = np.empty(2 * n)
        out[0::2] = scale * symbols.real
        out[1::2] = scale * symbols.imag
        return out
    half = m // 2
    out = np.empty(m * n)
    for axis, values in ((0, symbols.real), (1, symbols.imag)):
        axis_llrs = _pam_llrs(values, const.axis_levels, half) / nv[:, None]
        for b in range(half):
            out[2 * b + axis :: m] = axis_llrs[:, b]
    return out


def _pam_llrs(values: np.ndarray, levels: np.ndarray, bits: int) -> np.ndarray:
    """Per-axis max-log LLRs: (n, bits) array, MSB of the axis group first."""
    d = (values[:, None] - levels[None, :]) ** 2
    out = np.empty((values.shape[0], bits))
    for b in range(bits):
        mask = (np.arange(levels.shape[0]) >> (bits - 1 - b)) & 1
        out[:, b] = d[:, mask == 1].min(axis=1) - d[:, mask == 0].min(axis=1)
    return out
