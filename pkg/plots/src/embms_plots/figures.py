"""Figure rendering for sweep CSVs.

Two figure kinds:

* ``se_curve`` — achievable spectral efficiency versus CNR.  Each input
  file contributes one staircase through its measured (threshold, SE)
  points: below the first threshold nothing is achievable, and between
  thresholds the best already-unlocked MCS holds, so the curve is drawn
  as a monotone step function with steps exactly at the threshold CNRs.
  When the files carry Shannon-bound rows, the bound is overlaid once
  per distinct series (identical overlays from several files collapse
  to one line).
* ``bler_waterfall`` — block error rate versus CNR on a log axis, one
  line per MCS per input file.

Rendering never writes back to the CSVs, and identical inputs yield
identical plotted data series.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .errors import EmptyInputError, PlotError
from .schema import SweepData, read_sweep_csv

KINDS = ("se_curve", "bler_waterfall")


@dataclass(frozen=True)
class PlotSpec:
    """One rendering request: input CSVs, figure kind, output image."""

    inputs: tuple[Path, ...]
    kind: str
    out_path: Path
    title: str | None = None
    labels: tuple[str, ...] | None = None

    def validate(self) -> "PlotSpec":
        if self.kind not in KINDS:
            raise PlotError(f"figure kind {self.kind!r} not in {KINDS}")
        if not self.inputs:
            raise PlotError("at least one input CSV is required")
        if self.labels is not None and len(self.labels) != len(self.inputs):
            raise PlotError(
                f"{len(self.labels)} labels for {len(self.inputs)} inputs"
            )
        return self


def staircase_points(data: SweepData) -> tuple[list[float], list[float]]:
    """The (CNR, SE) support points of the achievable-SE staircase.

    Measured thresholds sorted by CNR, keeping each point only if it
    raises the best SE seen so far; with thresholds that are already
    nondecreasing in SE this keeps every achieved row.
    """
    achieved = sorted(
        (
            (t.threshold_cnr_db, t.se_bits_per_re)
            for t in data.thresholds
            if t.threshold_cnr_db is not None
        ),
    )
    xs: list[float] = []
    ys: list[float] = []
    best = float("-inf")
    for cnr, se in achieved:
        if se > best:
            xs.append(cnr)
            ys.append(se)
            best = se
    if not xs:
        raise EmptyInputError(
            f"{data.path}: no achieved thresholds to draw an SE curve from"
        )
    return xs, ys


def _draw_se_curve(ax, sweeps: list[SweepData], labels: list[str]) -> None:
    for data, label in zip(sweeps, labels):
        xs, ys = staircase_points(data)
        ax.step(xs, ys, where="post", linewidth=2.0, label=label)
    seen: set[tuple[tuple[float, float], ...]] = set()
    for data in sweeps:
        if data.capacity and data.capacity not in seen:
            seen.add(data.capacity)
            cnr = [c for c, _ in data.capacity]
            se = [s for _, s in data.capacity]
            ax.plot(cnr, se, "--", color="0.4", linewidth=1.2, label="Shannon bound")
    ax.set_ylabel("SE (bits per RE)")


def _draw_bler_waterfall(ax, sweeps: list[SweepData], labels: list[str]) -> None:
    drew = False
    for data, label in zip(sweeps, labels):
        by_mcs: dict[int, list] = {}
        for row in data.bler_rows:
            by_mcs.setdefault(row.mcs, []).append(row)
        for mcs in sorted(by_mcs):
            rows = sorted(by_mcs[mcs], key=lambda r: r.cnr_db)
            ax.semilogy(
                [r.cnr_db for r in rows],
                [r.bler for r in rows],
                marker="o",
                markersize=4,
                label=f"{label} MCS {mcs}",
            )
            drew = True
    if not drew:
        raise EmptyInputError("no BLER measurement rows to draw a waterfall from")
    ax.set_ylabel("BLER")


def render(spec: PlotSpec):
    """Render one figure and write it to ``spec.out_path``.

    Returns the matplotlib figure so callers can inspect the plotted
    data series; the caller owns closing it.
    """
    spec.validate()
    sweeps = [read_sweep_csv(path) for path in spec.inputs]
    labels = (
        list(spec.labels)
        if spec.labels is not None
        else [data.label.legend() for data in sweeps]
    )

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    try:
        if spec.kind == "se_curve":
            _draw_se_curve(ax, sweeps, labels)
        else:
            _draw_bler_waterfall(ax, sweeps, labels)
        ax.set_xlabel("CNR (dB)")
        ax.grid(True, alpha=0.4)
        ax.legend()
        if spec.title:
            ax.set_title(spec.title)
        fig.savefig(spec.out_path, dpi=150, bbox_inches="tight")
    except Exception:
        plt.close(fig)
        raise
    return fig
