"""Resource budgets, code rates and analytic SE tables."""

from fractions import Fraction

import pytest

from embms_link import (
    ConfigError,
    DataFileError,
    Numerology,
    bicm_se,
    canonical_numerology,
    effective_code_rate,
    load_mcs_table,
    mcs_entry,
    n_avail,
    se_table,
)


def test_scptm_10mhz_structure():
    num = Numerology.scptm(10.0)
    assert num.n_ctrl_sym == 2
    assert num.n_sym == 12
    assert num.n_sc_rb == 12
    assert num.n_rs_rb == 6
    assert num.data_res_per_rb == 138


def test_scptm_narrow_bandwidth_has_three_control_symbols():
    for bw in (1.4, 3.0, 5.0):
        assert Numerology.scptm(bw).n_ctrl_sym == 3
    for bw in (10.0, 15.0, 20.0):
        assert Numerology.scptm(bw).n_ctrl_sym == 2


def test_mbsfn_numerologies():
    low = Numerology.mbsfn(1.25)
    assert (low.n_sym, low.n_sc_rb, low.n_rs_rb) == (1, 144, 24)
    assert low.data_res_per_rb == 120
    mid = Numerology.mbsfn(15.0)
    assert mid.n_sym == 12
    assert mid.cp == "extended"
    with pytest.raises(ConfigError):
        Numerology.mbsfn(30.0)


def test_n_avail_anchor_values():
    # QPSK SC-PTM at 10 MHz: 2 * 50 * 138
    assert n_avail(Numerology.scptm(10.0), 50, 2) == 13800
    # 256QAM MBSFN at 1.25 kHz: 8 * 50 * 120
    assert n_avail(Numerology.mbsfn(1.25), 50, 8) == 48000
    # single RB sanity
    assert n_avail(Numerology.mbsfn(1.25), 1, 2) == 240


def test_n_avail_rejects_bad_args():
    num = Numerology.scptm(10.0)
    with pytest.raises(ConfigError):
        n_avail(num, 50, 3)
    with pytest.raises(ConfigError):
        n_avail(num, 0, 2)


def test_effective_code_rate_is_exact():
    cr = effective_code_rate(48936, 55200)
    assert cr == Fraction(48936, 55200)
    assert abs(float(cr) - 0.887) < 1e-3
    cr = effective_code_rate(42368, 48000)
    assert abs(float(cr) - 0.882) < 1e-3
    with pytest.raises(ConfigError):
        effective_code_rate(0, 100)
    with pytest.raises(ConfigError):
        effective_code_rate(100, 0)


def test_bicm_se_values():
    assert bicm_se(2, 0.1, 1) == pytest.approx(0.2)
    table = load_mcs_table("scptm")
    cr = mcs_entry(table, 27, 50).code_rate
    assert abs(bicm_se(8, cr, 1) - 7.09) < 5e-3
    assert abs(bicm_se(8, cr, 4) - 28.36) < 1e-2
    with pytest.raises(ConfigError):
        bicm_se(2, 0.0, 1)
    with pytest.raises(ConfigError):
        bicm_se(2, 1.5, 1)
    with pytest.raises(ConfigError):
        bicm_se(2, 0.5, 3)


def test_bicm_se_linear_in_streams_and_code_rate():
    base = bicm_se(6, 0.5, 1)
    assert bicm_se(6, 0.5, 2) == pytest.approx(2 * base)
    assert bicm_se(6, 0.5, 4) == pytest.approx(4 * base)
    assert bicm_se(6, 0.25, 1) == pytest.approx(base / 2)


def test_bundled_scptm_table():
    table = load_mcs_table("scptm")
    at50 = [e for e in table if e.n_rb == 50]
    assert len(at50) == 28
    assert [e.mcs_index for e in at50] == list(range(28))
    assert max(e.i_tbs for e in at50) == 33
    tbs = [e.tbs_bits for e in at50]
    assert tbs == sorted(tbs)


def test_bundled_mbsfn_table_caps_at_itbs_32():
    table = load_mcs_table("mbsfn")
    assert max(e.i_tbs for e in table) == 32
    at50 = [e for e in table if e.n_rb == 50]
    top = max(at50, key=lambda e: e.mcs_index)
    assert top.i_tbs == 32
    assert abs(float(top.code_rate) - 0.882) < 1e-3


def test_code_rate_strictly_increases_within_modulation_order():
    for mode in ("scptm", "mbsfn"):
        table = load_mcs_table(mode)
        by_rb = {}
        for e in table:
            by_rb.setdefault(e.n_rb, []).append(e)
        for rows in by_rb.values():
            rows.sort(key=lambda e: e.mcs_index)
            for prev, cur in zip(rows, rows[1:]):
                if prev.modulation_order == cur.modulation_order:
                    assert cur.code_rate > prev.code_rate, (mode, cur)


def test_code_rate_cap_respected_everywhere():
    for mode in ("scptm", "mbsfn"):
        for e in load_mcs_table(mode):
            assert e.code_rate <= Fraction(925, 1000)


def test_peak_se_round_trips_published_precision():
    scptm = se_table("scptm", 50, 1)
    mbsfn = se_table("mbsfn", 50, 1)
    assert round(max(r.se_per_stream for r in scptm), 2) == 7.09
    assert round(max(r.se_per_stream for r in mbsfn), 2) == 7.06
    four = se_table("scptm", 50, 4)
    assert max(r.se_total for r in four) == pytest.approx(28.36, abs=5e-3)


def test_se_table_rejects_mbsfn_multistream():
    with pytest.raises(ConfigError):
        se_table("mbsfn", 50, 2)


def test_load_rejects_missing_file(tmp_path):
    with pytest.raises(DataFileError):
        load_mcs_table("scptm", tmp_path / "nope.csv")


def test_load_rejects_malformed_row(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(
        "mode,mcs_index,modulation_order,i_tbs,n_rb,tbs_bits\n"
        "scptm,0,2,0,50,oops\n"
    )
    with pytest.raises(DataFileError):
        load_mcs_table("scptm", bad)


def test_load_rejects_code_rate_above_cap(tmp_path):
    bad = tmp_path / "cap.csv"
    # 2 * 50 * 138 = 13800 available bits; 13000 bits is rate 0.94
    bad.write_text(
        "mode,mcs_index,modulation_order,i_tbs,n_rb,tbs_bits\n"
        "scptm,0,2,0,50,13000\n"
    )
    with pytest.raises(DataFileError):
        load_mcs_table("scptm", bad)


def test_load_rejects_nonmonotone_tbs(tmp_path):
    bad = tmp_path / "mono.csv"
    bad.write_text(
        "mode,mcs_index,modulation_order,i_tbs,n_rb,tbs_bits\n"
        "scptm,0,2,0,50,2216\n"
        "scptm,1,2,2,50,1384\n"
    )
    with pytest.raises(DataFileError):
        load_mcs_table("scptm", bad)


def test_mcs_entry_lookup_miss():
    table = load_mcs_table("scptm")
    with pytest.raises(ConfigError):
        mcs_entry(table, 27, 6)  # excluded by the code-rate cap
    with pytest.raises(ConfigError):
        mcs_entry(table, 99, 50)


def test_canonical_numerology():
    assert canonical_numerology("scptm", 50).n_ctrl_sym == 2
    assert canonical_numerology("scptm", 25).n_ctrl_sym == 3
    assert canonical_numerology("mbsfn", 50).subcarrier_spacing_khz == 1.25
