"""Shared fixtures for the figure-rendering tests."""

import pytest

from sweepcsv import bler_row, capacity_row, threshold_row, write_csv


@pytest.fixture
def tiny_sweep_csv(tmp_path):
    """A minimal but complete sweep file: BLER, thresholds, capacity."""
    rows = [
        bler_row(cnr=-8.0, blocks=60, errors=50),
        bler_row(cnr=-6.0, blocks=100, errors=1),
        bler_row(mcs=3, m=4, cr=0.3, cnr=-1.0, blocks=80, errors=50),
        bler_row(mcs=3, m=4, cr=0.3, cnr=1.0, blocks=100, errors=0),
        threshold_row(th=-6.25, se=0.204058),
        threshold_row(mcs=3, m=4, cr=0.3, th=0.75, se=1.2),
        threshold_row(mcs=6, m=4, cr=0.5, th=None, se=2.0),
        capacity_row(cnr=-10.0, se=0.137504),
        capacity_row(cnr=0.0, se=1.0),
        capacity_row(cnr=10.0, se=3.459432),
    ]
    return write_csv(tmp_path / "tiny_sweep.csv", rows)
