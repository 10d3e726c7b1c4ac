"""Reader for the link simulator's sweep CSV schema.

This package deliberately re-states the column contract instead of
importing the simulator: the CSV file is the interface between the two
components, so the reader validates the text it is given and nothing
else.  A sweep file mixes three row kinds under one header, told apart
by which fields are populated:

* measurement rows carry a CNR point with block counts and a BLER;
* threshold rows carry a refined threshold CNR (empty when the target
  BLER was never reached inside the scan window) and the analytic SE;
* capacity rows carry only a CNR and the Shannon bound at that CNR.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyInputError, SchemaError

HEADER = (
    "mode",
    "channel",
    "n_tx",
    "n_rx",
    "mcs",
    "modulation_order",
    "code_rate",
    "cnr_db",
    "blocks",
    "block_errors",
    "bler",
    "threshold_cnr_db",
    "se_bits_per_re",
)


@dataclass(frozen=True)
class LinkLabel:
    """The mode/channel/antenna identity shared by every row of a file."""

    mode: str
    channel: str
    n_tx: int
    n_rx: int

    def legend(self) -> str:
        return f"{self.mode} {self.n_tx}x{self.n_rx} ({self.channel})"


@dataclass(frozen=True)
class BlerRow:
    mcs: int
    modulation_order: int
    code_rate: float
    cnr_db: float
    blocks: int
    block_errors: int
    bler: float


@dataclass(frozen=True)
class ThresholdRow:
    mcs: int
    modulation_order: int
    code_rate: float
    threshold_cnr_db: float | None
    se_bits_per_re: float


@dataclass(frozen=True)
class SweepData:
    """Everything one sweep CSV contains, grouped by row kind."""

    path: Path
    label: LinkLabel
    bler_rows: tuple[BlerRow, ...]
    thresholds: tuple[ThresholdRow, ...]
    capacity: tuple[tuple[float, float], ...]


def _parse(kind, text: str, where: str):
    try:
        return kind(text)
    except ValueError as exc:
        raise SchemaError(f"{where}: {text!r} is not a {kind.__name__}") from exc


def read_sweep_csv(path) -> SweepData:
    """Parse and validate one sweep CSV file."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: file is empty, expected the sweep header")
    if tuple(rows[0]) != HEADER:
        raise SchemaError(
            f"{path}: header {rows[0]!r} does not match the sweep schema"
        )

    label: LinkLabel | None = None
    bler_rows: list[BlerRow] = []
    thresholds: list[ThresholdRow] = []
    capacity: list[tuple[float, float]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        where = f"{path}:{lineno}"
        if len(row) != len(HEADER):
            raise SchemaError(f"{where}: {len(row)} fields, expected {len(HEADER)}")
        field = dict(zip(HEADER, row))
        row_label = LinkLabel(
            mode=field["mode"],
            channel=field["channel"],
            n_tx=_parse(int, field["n_tx"], where),
            n_rx=_parse(int, field["n_rx"], where),
        )
        if label is None:
            label = row_label
        elif row_label != label:
            raise SchemaError(f"{where}: link identity changed mid-file")

        has_mcs = field["mcs"] != ""
        has_cnr = field["cnr_db"] != ""
        has_blocks = field["blocks"] != ""
        has_se = field["se_bits_per_re"] != ""
        if has_mcs and has_cnr and has_blocks and not has_se:
            bler_rows.append(
                BlerRow(
                    mcs=_parse(int, field["mcs"], where),
                    modulation_order=_parse(int, field["modulation_order"], where),
                    code_rate=_parse(float, field["code_rate"], where),
                    cnr_db=_parse(float, field["cnr_db"], where),
                    blocks=_parse(int, field["blocks"], where),
                    block_errors=_parse(int, field["block_errors"], where),
                    bler=_parse(float, field["bler"], where),
                )
            )
        elif has_mcs and not has_cnr and not has_blocks and has_se:
            raw = field["threshold_cnr_db"]
            thresholds.append(
                ThresholdRow(
                    mcs=_parse(int, field["mcs"], where),
                    modulation_order=_parse(int, field["modulation_order"], where),
                    code_rate=_parse(float, field["code_rate"], where),
                    threshold_cnr_db=None if raw == "" else _parse(float, raw, where),
                    se_bits_per_re=_parse(float, field["se_bits_per_re"], where),
                )
            )
        elif not has_mcs and has_cnr and not has_blocks and has_se:
            capacity.append(
                (
                    _parse(float, field["cnr_db"], where),
                    _parse(float, field["se_bits_per_re"], where),
                )
            )
        else:
            raise SchemaError(
                f"{where}: field pattern matches no known row kind"
            )

    if label is None:
        raise EmptyInputError(f"{path}: no data rows under the header")
    return SweepData(
        path=path,
        label=label,
        bler_rows=tuple(bler_rows),
        thresholds=tuple(thresholds),
        capacity=tuple(capacity),
    )
