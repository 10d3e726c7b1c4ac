"""Numerology, MCS tables and the analytic BICM spectral-efficiency math.

The two point-to-multipoint modes differ in their per-subframe resource
budget.  SC-PTM rides on PDSCH: normal CP, 14 OFDM symbols of which the
first ``n_ctrl_sym`` carry control, 12 subcarriers per RB, 6 cell RS per
RB inside the data region.  MBSFN rides on PMCH in dedicated subframes:
extended CP, no control region inside the MBSFN part modelled here, and
a subcarrier spacing of 15, 7.5 or 1.25 kHz.  At 1.25 kHz a subframe is
one long symbol over 144 subcarriers per RB with 24 MBSFN RS per RB.

Spectral efficiency per RE is ``m * code_rate * n_streams`` where the
code rate is the transport block size over the available bit budget

    n_avail = m * n_rb * (n_sym * n_sc_rb - n_rs_rb)
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .errors import ConfigError, DataFileError

MODES = ("mbsfn", "scptm")
MODULATION_ORDERS = (2, 4, 6, 8)
CODE_RATE_CAP = Fraction(925, 1000)

# LTE bandwidth (MHz) to RB count mapping; used to pick the canonical
# SC-PTM control region width when only the RB count is known.
RB_FOR_BANDWIDTH = {1.4: 6, 3.0: 15, 5.0: 25, 10.0: 50, 15.0: 75, 20.0: 100}
BANDWIDTH_FOR_RB = {rb: bw for bw, rb in RB_FOR_BANDWIDTH.items()}


@dataclass(frozen=True)
class Numerology:
    """Per-subframe resource structure of one transmission mode.

    ``n_sym`` counts only symbols available for data (the SC-PTM control
    region is already excluded), ``n_rs_rb`` is the number of reference
    signal REs per RB per subframe inside the data region.
    """

    mode: str
    subcarrier_spacing_khz: float
    cp: str
    n_sym: int
    n_sc_rb: int
    n_rs_rb: int
    n_ctrl_sym: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.n_sym < 1 or self.n_sc_rb < 1:
            raise ConfigError("numerology needs at least one symbol and subcarrier")
        if not 0 <= self.n_rs_rb < self.n_sym * self.n_sc_rb:
            raise ConfigError("RS count must leave room for data REs")
        if self.mode == "scptm" and self.n_ctrl_sym not in (2, 3):
            raise ConfigError("SC-PTM control region is 2 or 3 symbols")

    @property
    def data_res_per_rb(self) -> int:
        return self.n_sym * self.n_sc_rb - self.n_rs_rb

    @classmethod
    def scptm(cls, bandwidth_mhz: float = 10.0) -> "Numerology":
        """Unicast-style numerology: 15 kHz, normal CP, PDCCH region."""
        if bandwidth_mhz not in RB_FOR_BANDWIDTH:
            raise ConfigError(f"unsupported bandwidth {bandwidth_mhz} MHz")
        n_ctrl = 3 if bandwidth_mhz <= 5.0 else 2
        return cls(
            mode="scptm",
            subcarrier_spacing_khz=15.0,
            cp="normal",
            n_sym=14 - n_ctrl,
            n_sc_rb=12,
            n_rs_rb=6,
            n_ctrl_sym=n_ctrl,
        )

    @classmethod
    def mbsfn(cls, subcarrier_spacing_khz: float = 1.25) -> "Numerology":
        """MBSFN numerology (extended CP).

        The 1.25 kHz structure carries the full RS accounting used by the
        SE budget.  The 15 and 7.5 kHz variants are representable for
        completeness; their RS densities are nominal and they are not part
        of the validated acceptance surface.
        """
        if subcarrier_spacing_khz == 1.25:
            n_sym, n_sc, n_rs = 1, 144, 24
        elif subcarrier_spacing_khz == 7.5:
            n_sym, n_sc, n_rs = 6, 24, 24
        elif subcarrier_spacing_khz == 15.0:
            n_sym, n_sc, n_rs = 12, 12, 18
        else:
            raise ConfigError(
                f"unsupported MBSFN subcarrier spacing {subcarrier_spacing_khz} kHz"
            )
        return cls(
            mode="mbsfn",
            subcarrier_spacing_khz=subcarrier_spacing_khz,
            cp="extended",
            n_sym=n_sym,
            n_sc_rb=n_sc,
            n_rs_rb=n_rs,
        )


def canonical_numerology(mode: str, n_rb: int) -> Numerology:
    """The numerology implied by a mode and RB count alone.

    SC-PTM control width follows the LTE bandwidth that carries ``n_rb``
    RBs; MBSFN defaults to the 1.25 kHz structure.
    """
    if mode == "scptm":
        bw = BANDWIDTH_FOR_RB.get(n_rb)
        if bw is None:
            bw = 10.0 if n_rb >= 50 else 5.0
        return Numerology.scptm(bw)
    if mode == "mbsfn":
        return Numerology.mbsfn(1.25)
    raise ConfigError(f"unknown mode {mode!r}")


def n_avail(numerology: Numerology, n_rb: int, modulation_order: int) -> int:
    """Available coded bits per subframe per spatial stream."""
    if modulation_order not in MODULATION_ORDERS:
        raise ConfigError(f"modulation order must be one of {MODULATION_ORDERS}")
    if n_rb < 1:
        raise ConfigError("n_rb must be positive")
    return modulation_order * n_rb * numerology.data_res_per_rb


def effective_code_rate(tbs_bits: int, n_avail_bits: int) -> Fraction:
    """TBS over available bits as an exact fraction."""
    if tbs_bits <= 0 or n_avail_bits <= 0:
        raise ConfigError("code rate needs positive TBS and bit budget")
    return Fraction(tbs_bits, n_avail_bits)


def bicm_se(modulation_order: int, code_rate, n_streams: int = 1) -> float:
    """Spectral efficiency in bits per RE: m * CR * streams."""
    if modulation_order not in MODULATION_ORDERS:
        raise ConfigError(f"modulation order must be one of {MODULATION_ORDERS}")
    if not 0 < code_rate <= 1:
        raise ConfigError("code rate must be in (0, 1]")
    if n_streams not in (1, 2, 4):
        raise ConfigError("n_streams must be 1, 2 or 4")
    return float(modulation_order * code_rate * n_streams)


@dataclass(frozen=True)
class McsEntry:
    """One (mode, MCS, RB count) row of the bundled table."""

    mode: str
    mcs_index: int
    modulation_order: int
    i_tbs: int
    n_rb: int
    tbs_bits: int

    @property
    def code_rate(self) -> Fraction:
        num = canonical_numerology(self.mode, self.n_rb)
        return effective_code_rate(self.tbs_bits, n_avail(num, self.n_rb, self.modulation_order))


def _bundled_path(name: str):
    return resources.files("embms_link.data").joinpath(name)


def load_mcs_table(mode: str, path=None) -> list[McsEntry]:
    """Load and validate the MCS/TBS rows of one mode.

    Validation: rows parse, TBS is monotone nondecreasing in MCS index at
    every RB count, and no derived code rate exceeds the scheduling cap.
    """
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    src = _bundled_path("mcs_tbs.csv") if path is None else path
    entries = []
    try:
        with open(src, newline="") as f:
            reader = csv.DictReader(f)
            required = {"mode", "mcs_index", "modulation_order", "i_tbs", "n_rb", "tbs_bits"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise DataFileError(f"MCS table {src} is missing required columns")
            for row in reader:
                if row["mode"] != mode:
                    continue
                try:
                    entries.append(
                        McsEntry(
                            mode=row["mode"],
                            mcs_index=int(row["mcs_index"]),
                            modulation_order=int(row["modulation_order"]),
                            i_tbs=int(row["i_tbs"]),
                            n_rb=int(row["n_rb"]),
                            tbs_bits=int(row["tbs_bits"]),
                        )
                    )
                except (KeyError, ValueError) as exc:
                    raise DataFileError(f"malformed MCS row {row!r}: {exc}") from exc
    except OSError as exc:
        raise DataFileError(f"cannot read MCS table {src}: {exc}") from exc
    if not entries:
        raise DataFileError(f"no rows for mode {mode!r} in {src}")

    entries.sort(key=lambda e: (e.n_rb, e.mcs_index))
    by_rb: dict[int, list[McsEntry]] = {}
    for e in entries:
        if e.modulation_order not in MODULATION_ORDERS:
            raise DataFileError(f"bad modulation order in row {e}")
        if e.code_rate > CODE_RATE_CAP:
            raise DataFileError(
                f"code rate {float(e.code_rate):.3f} above cap for mcs={e.mcs_index} "
                f"n_rb={e.n_rb} ({mode})"
            )
        by_rb.setdefault(e.n_rb, []).append(e)
    for n_rb, rows in by_rb.items():
        for prev, cur in zip(rows, rows[1:]):
            if cur.tbs_bits < prev.tbs_bits:
                raise DataFileError(
                    f"TBS not monotone at n_rb={n_rb}: mcs {prev.mcs_index}->{cur.mcs_index}"
                )
    return entries


def mcs_entry(table: list[McsEntry], mcs_index: int, n_rb: int) -> McsEntry:
    for e in table:
        if e.mcs_index == mcs_index and e.n_rb == n_rb:
            return e
    raise ConfigError(f"MCS {mcs_index} at {n_rb} RB not in the bundled table")


@dataclass(frozen=True)
class SeTableRow:
    """Analytic SE for one MCS at a given RB count and stream count.

    ``se_total`` follows reporting precision: the per-stream SE is rounded
    to two decimals before scaling by the stream count, so multi-stream
    figures line up with the published single-stream values.
    """

    mcs_index: int
    modulation_order: int
    i_tbs: int
    tbs_bits: int
    n_avail_bits: int
    code_rate: Fraction
    n_streams: int

    @property
    def se_per_stream(self) -> float:
        return bicm_se(self.modulation_order, self.code_rate, 1)

    @property
    def se_total(self) -> float:
        return round(self.se_per_stream, 2) * self.n_streams


def se_table(mode: str, n_rb: int, n_streams: int = 1, path=None) -> list[SeTableRow]:
    """Analytic SE table over every bundled MCS of a mode at one RB count."""
    if mode == "mbsfn" and n_streams != 1:
        raise ConfigError("MBSFN transmits a single stream")
    num = canonical_numerology(mode, n_rb)
    rows = []
    for e in load_mcs_table(mode, path):
        if e.n_rb != n_rb:
            continue
        na = n_avail(num, n_rb, e.modulation_order)
        rows.append(
            SeTableRow(
                mcs_index=e.mcs_index,
                modulation_order=e.modulation_order,
                i_tbs=e.i_tbs,
                tbs_bits=e.tbs_bits,
                n_avail_bits=na,
                code_rate=effective_code_rate(e.tbs_bits, na),
                n_streams=n_streams,
            )
        )
    if not rows:
        raise ConfigError(f"no bundled MCS rows for {mode} at {n_rb} RB")
    return rows
