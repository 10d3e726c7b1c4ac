"""Figure rendering: staircase geometry, overlays, and error paths."""

import pytest

pytest.importorskip("embms_plots", reason="figure package not installed")

import matplotlib.pyplot as plt
import numpy as np

from embms_plots import (
    EmptyInputError,
    PlotError,
    PlotSpec,
    read_sweep_csv,
    render,
    staircase_points,
)
from sweepcsv import bler_row, capacity_row, threshold_row, write_csv


def spec_for(paths, kind, out, **kwargs):
    return PlotSpec(inputs=tuple(paths), kind=kind, out_path=out, **kwargs)


def line_by_label(fig, label):
    matches = [ln for ln in fig.axes[0].get_lines() if ln.get_label() == label]
    assert len(matches) == 1, f"expected one line labeled {label!r}"
    return matches[0]


def test_staircase_is_sorted_and_skips_unachieved(tiny_sweep_csv):
    xs, ys = staircase_points(read_sweep_csv(tiny_sweep_csv))
    assert xs == [-6.25, 0.75]
    assert ys == pytest.approx([0.204058, 1.2])


def test_staircase_drops_dominated_points(tmp_path):
    # A point whose SE is below an already-achieved SE at lower CNR adds
    # nothing to the achievable staircase.
    path = write_csv(
        tmp_path / "cross.csv",
        [
            threshold_row(mcs=0, th=0.0, se=1.0),
            threshold_row(mcs=3, th=2.0, se=0.8),
            threshold_row(mcs=6, th=4.0, se=1.5),
        ],
    )
    xs, ys = staircase_points(read_sweep_csv(path))
    assert xs == [0.0, 4.0]
    assert ys == [1.0, 1.5]


def test_se_curve_series_match_file(tiny_sweep_csv, tmp_path):
    out = tmp_path / "fig.png"
    fig = render(spec_for([tiny_sweep_csv], "se_curve", out))
    try:
        step = line_by_label(fig, "scptm 1x1 (awgn)")
        assert step.get_drawstyle() == "steps-post"
        assert np.array_equal(step.get_xdata(), [-6.25, 0.75])
        assert np.array_equal(step.get_ydata(), [0.204058, 1.2])
        bound = line_by_label(fig, "Shannon bound")
        assert np.array_equal(bound.get_xdata(), [-10.0, 0.0, 10.0])
        assert np.array_equal(bound.get_ydata(), [0.137504, 1.0, 3.459432])
        assert out.exists() and out.stat().st_size > 0
    finally:
        plt.close(fig)


def test_two_inputs_overlay_two_curves_one_bound(tmp_path):
    a = write_csv(
        tmp_path / "a.csv",
        [threshold_row(prefix="scptm,rayleigh,2,2", th=5.0, se=0.4), capacity_row(prefix="scptm,rayleigh,2,2")],
    )
    b = write_csv(
        tmp_path / "b.csv",
        [threshold_row(prefix="mbsfn,rayleigh,1,2", th=2.0, se=0.2), capacity_row(prefix="mbsfn,rayleigh,1,2")],
    )
    fig = render(spec_for([a, b], "se_curve", tmp_path / "cmp.png"))
    try:
        labels = [ln.get_label() for ln in fig.axes[0].get_lines()]
        assert labels.count("scptm 2x2 (rayleigh)") == 1
        assert labels.count("mbsfn 1x2 (rayleigh)") == 1
        # identical capacity series from both files collapse to one line
        assert labels.count("Shannon bound") == 1
    finally:
        plt.close(fig)


def test_label_override_controls_legend(tiny_sweep_csv, tmp_path):
    fig = render(
        spec_for([tiny_sweep_csv], "se_curve", tmp_path / "fig.png", labels=("custom",))
    )
    try:
        assert line_by_label(fig, "custom") is not None
    finally:
        plt.close(fig)


def test_se_curve_without_achieved_thresholds_is_empty_input(tmp_path):
    path = write_csv(tmp_path / "none.csv", [threshold_row(th=None)])
    with pytest.raises(EmptyInputError, match="no achieved thresholds"):
        render(spec_for([path], "se_curve", tmp_path / "fig.png"))


def test_waterfall_one_line_per_mcs_sorted_by_cnr(tiny_sweep_csv, tmp_path):
    fig = render(spec_for([tiny_sweep_csv], "bler_waterfall", tmp_path / "w.png"))
    try:
        line0 = line_by_label(fig, "scptm 1x1 (awgn) MCS 0")
        line3 = line_by_label(fig, "scptm 1x1 (awgn) MCS 3")
        assert np.array_equal(line0.get_xdata(), [-8.0, -6.0])
        # the plotted BLER is the file text, which carries 8 decimals
        assert np.array_equal(line0.get_ydata(), [float(f"{50 / 60:.8f}"), 0.01])
        assert np.array_equal(line3.get_xdata(), [-1.0, 1.0])
        assert fig.axes[0].get_yscale() == "log"
    finally:
        plt.close(fig)


def test_waterfall_without_bler_rows_is_empty_input(tmp_path):
    path = write_csv(tmp_path / "thonly.csv", [threshold_row()])
    with pytest.raises(EmptyInputError, match="no BLER measurement rows"):
        render(spec_for([path], "bler_waterfall", tmp_path / "w.png"))


def test_spec_validation_errors(tmp_path):
    out = tmp_path / "fig.png"
    with pytest.raises(PlotError, match="figure kind"):
        render(PlotSpec(inputs=(tmp_path / "x.csv",), kind="pie", out_path=out))
    with pytest.raises(PlotError, match="at least one input"):
        render(PlotSpec(inputs=(), kind="se_curve", out_path=out))
    with pytest.raises(PlotError, match="labels for"):
        render(
            PlotSpec(
                inputs=(tmp_path / "x.csv",),
                kind="se_curve",
                out_path=out,
                labels=("a", "b"),
            )
        )


def test_title_is_applied(tiny_sweep_csv, tmp_path):
    fig = render(
        spec_for([tiny_sweep_csv], "se_curve", tmp_path / "fig.png", title="achievable SE")
    )
    try:
        assert fig.axes[0].get_title() == "achievable SE"
    finally:
        plt.close(fig)
