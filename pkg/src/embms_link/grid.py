"""Subframe resource grid: control/reference/data layout and OFDM.

The grid covers one subframe: ``n_ctrl_sym + n_sym`` OFDM symbols by
``n_rb * n_sc_rb`` subcarriers.  The leading control symbols and the
reference symbols are overhead; payload symbols fill the remaining
resource elements frequency first, then time.  Reference symbols are
placed per resource block at a fixed stride through the block's
frequency-first data region, which spreads them evenly and reproduces
the per-block overhead budget exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .numerology import Numerology

KIND_DATA = 0
KIND_RS = 1
KIND_CTRL = 2

RS_FILL_SEED = 0x5242  # fixed seed for deterministic reference symbol values


@dataclass(frozen=True)
class GridLayout:
    """Resource element roles for one subframe."""

    numerology: Numerology
    n_rb: int
    kind: np.ndarray  # (n_sym_total, n_sc_total) uint8 of KIND_* values
    data_order: np.ndarray  # flat indices of data REs in fill order

    @property
    def n_sym_total(self) -> int:
        return self.kind.shape[0]

    @property
    def n_sc_total(self) -> int:
        return self.kind.shape[1]

    @property
    def n_data(self) -> int:
        return self.data_order.shape[0]

    def counts(self) -> dict[str, int]:
        flat = self.kind.ravel()
        return {
            "data": int((flat == KIND_DATA).sum()),
            "rs": int((flat == KIND_RS).sum()),
            "ctrl": int((flat == KIND_CTRL).sum()),
        }


def build_layout(num: Numerology, n_rb: int) -> GridLayout:
    """Lay out one subframe for the given numerology and bandwidth."""
    if n_rb < 1:
        raise ConfigError(f"resource block count {n_rb} must be positive")
    n_sym_total = num.n_sym + num.n_ctrl_sym
    n_sc_total = num.n_sc_rb * n_rb
    kind = np.full((n_sym_total, n_sc_total), KIND_DATA, dtype=np.uint8)
    kind[: num.n_ctrl_sym, :] = KIND_CTRL
    # payload region of one block, flattened frequency first
    region = num.n_sym * num.n_sc_rb
    stride = region // num.n_rs_rb
    local = np.arange(num.n_rs_rb) * stride
    sym_of = num.n_ctrl_sym + local // num.n_sc_rb
    sc_of = local % num.n_sc_rb
    for rb in range(n_rb):
        kind[sym_of, rb * num.n_sc_rb + sc_of] = KIND_RS
    data_mask = (kind == KIND_DATA).ravel()
    data_order = np.flatnonzero(data_mask)
    data_order.setflags(write=False)
    kind.setflags(write=False)
    layout = GridLayout(numerology=num, n_rb=n_rb, kind=kind, data_order=data_order)
    assert layout.n_data == n_rb * num.data_res_per_rb, "layout disagrees with budget"
    return layout


def map_to_grid(symbols: np.ndarray, layout: GridLayout) -> np.ndarray:
    """Place payload symbols on the grid; fill reference symbols.

    Reference symbols carry unit-magnitude QPSK values drawn from a
    fixed seed so the grid is deterministic; control elements stay
    zero (their cost is already counted as overhead).
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.shape[0] != layout.n_data:
        raise ConfigError(
            f"{symbols.shape[0]} symbols for a grid with {layout.n_data} data elements"
        )
    grid = np.zeros(layout.kind.shape, dtype=np.complex128)
    flat = grid.ravel()
    flat[layout.data_order] = symbols
    rs_positions = np.flatnonzero((layout.kind == KIND_RS).ravel())
    rng = np.random.default_rng(RS_FILL_SEED)
    corners = rng.integers(0, 4, rs_positions.shape[0])
    flat[rs_positions] = np.exp(1j * (np.pi / 4 + np.pi / 2 * corners))
    return grid


def extract_from_grid(grid: np.ndarray, layout: GridLayout) -> np.ndarray:
    """Read payload symbols back out of a received grid."""
    grid = np.asarray(grid, dtype=np.complex128)
    if grid.shape != layout.kind.shape:
        raise ConfigError(f"grid shape {grid.shape} does not match layout")
    return grid.ravel()[layout.data_order]


# ---------------------------------------------------------------------------
# OFDM (TS 36.211 section 6.12): orthonormal FFT with cyclic prefixes
# ---------------------------------------------------------------------------


def _fft_size(n_sc: int) -> int:
    nfft = 128
    while nfft < n_sc + 1:  # +1 for the unused DC bin
        nfft *= 2
    return nfft


def _cp_lengths(num: Numerology, n_sym_total: int, nfft: int) -> np.ndarray:
    if num.cp == "extended":
        return np.full(n_sym_total, nfft // 4, dtype=np.int64)
    # normal CP: the first symbol of each 7-symbol slot gets the longer prefix
    base = np.full(n_sym_total, (144 * nfft) // 2048, dtype=np.int64)
    base[0::7] = (160 * nfft) // 2048
    return base


def _subcarrier_bins(n_sc: int, nfft: int) -> np.ndarray:
    """Centred mapping with a null DC bin, negative frequencies first."""
    offsets = np.arange(n_sc) - n_sc // 2
    return np.where(offsets < 0, offsets + nfft, offsets + 1)


def ofdm_modulate(grid: np.ndarray, num: Numerology) -> np.ndarray:
    """Time-domain subframe samples, one row per OFDM symbol with its CP."""
    n_sym_total, n_sc = grid.shape
    nfft = _fft_size(n_sc)
    bins = _subcarrier_bins(n_sc, nfft)
    freq = np.zeros((n_sym_total, nfft), dtype=np.complex128)
    freq[:, bins] = grid
    body = np.fft.ifft(freq, axis=1, norm="ortho")
    cps = _cp_lengths(num, n_sym_total, nfft)
    pieces = [np.concatenate([row[-cp:], row]) for row, cp in zip(body, cps)]
    return np.concatenate(pieces)


def ofdm_demodulate(samples: np.ndarray, num: Numerology, n_sym_total: int, n_sc: int) -> np.ndarray:
    """Invert ``ofdm_modulate`` back to a resource grid."""
    nfft = _fft_size(n_sc)
    cps = _cp_lengths(num, n_sym_total, nfft)
    expected = int(cps.sum()) + n_sym_total * nfft
    if samples.shape[0] != expected:
        raise ConfigError(f"{samples.shape[0]} samples, expected {expected}")
    bins = _subcarrier_bins(n_sc, nfft)
    grid = np.empty((n_sym_total, n_sc), dtype=np.complex128)
    pos = 0
    for t in range(n_sym_total):
        pos += int(cps[t])
        body = samples[pos : pos + nfft]
        grid[t] = np.fft.fft(body, norm="ortho")[bins]
        pos += nfft
    return grid
