"""End-to-end transport block encode/decode chain."""

import numpy as np
import pytest

from embms_link import ConfigError, load_mcs_table, mcs_entry, n_avail, canonical_numerology
from embms_link.fec import chain_decode, chain_encode


def bits_to_llrs(coded, magnitude=20.0):
    return magnitude * (1.0 - 2.0 * coded.astype(np.float64))


def scptm_case(mcs, n_rb=50):
    table = load_mcs_table("scptm")
    entry = mcs_entry(table, mcs, n_rb)
    num = canonical_numerology("scptm", n_rb)
    return entry, n_avail(num, n_rb, entry.modulation_order)


@pytest.mark.parametrize("mcs", [0, 5, 13, 20, 27])
def test_noiseless_round_trip(mcs):
    entry, g = scptm_case(mcs)
    rng = np.random.default_rng(mcs)
    tb = rng.integers(0, 2, entry.tbs_bits, dtype=np.uint8)
    coded = chain_encode(tb, g, entry.modulation_order)
    assert coded.shape == (g,)
    result = chain_decode(
        bits_to_llrs(coded), entry.tbs_bits, g, entry.modulation_order
    )
    assert result.crc_ok and result.converged
    np.testing.assert_array_equal(result.bits, tb)


def test_single_block_small_tbs():
    entry, g = scptm_case(0, n_rb=6)
    rng = np.random.default_rng(42)
    tb = rng.integers(0, 2, entry.tbs_bits, dtype=np.uint8)
    coded = chain_encode(tb, g, entry.modulation_order)
    result = chain_decode(bits_to_llrs(coded), entry.tbs_bits, g, entry.modulation_order)
    assert result.crc_ok
    np.testing.assert_array_equal(result.bits, tb)


def test_mbsfn_highest_rate_round_trip():
    table = load_mcs_table("mbsfn")
    entry = mcs_entry(table, 26, 50)
    num = canonical_numerology("mbsfn", 50)
    g = n_avail(num, 50, entry.modulation_order)
    rng = np.random.default_rng(7)
    tb = rng.integers(0, 2, entry.tbs_bits, dtype=np.uint8)
    coded = chain_encode(tb, g, entry.modulation_order)
    result = chain_decode(bits_to_llrs(coded), entry.tbs_bits, g, entry.modulation_order)
    assert result.crc_ok
    np.testing.assert_array_equal(result.bits, tb)


def test_corrupted_llrs_never_pass_silently():
    entry, g = scptm_case(10)
    rng = np.random.default_rng(3)
    tb = rng.integers(0, 2, entry.tbs_bits, dtype=np.uint8)
    llrs = bits_to_llrs(chain_encode(tb, g, entry.modulation_order))
    # wipe out a third of the codeword with inverted strong LLRs
    idx = rng.choice(g, size=g // 3, replace=False)
    llrs[idx] *= -1.0
    result = chain_decode(llrs, entry.tbs_bits, g, entry.modulation_order)
    if result.crc_ok:
        np.testing.assert_array_equal(result.bits, tb)
    else:
        assert not result.converged or not np.array_equal(result.bits, tb)


def test_light_corruption_is_corrected():
    entry, g = scptm_case(4)
    rng = np.random.default_rng(11)
    tb = rng.integers(0, 2, entry.tbs_bits, dtype=np.uint8)
    llrs = bits_to_llrs(chain_encode(tb, g, entry.modulation_order))
    idx = rng.choice(g, size=40, replace=False)
    llrs[idx] *= -1.0
    result = chain_decode(llrs, entry.tbs_bits, g, entry.modulation_order)
    assert result.crc_ok
    np.testing.assert_array_equal(result.bits, tb)


def test_encode_validates_arguments():
    entry, g = scptm_case(0)
    tb = np.zeros(entry.tbs_bits, np.uint8)
    with pytest.raises(ConfigError):
        chain_encode(tb, g + 1, entry.modulation_order)  # not symbol aligned
    with pytest.raises(ConfigError):
        chain_decode(np.zeros(g - 2), entry.tbs_bits, g, entry.modulation_order)


def test_llr_clamp_keeps_decoder_finite():
    entry, g = scptm_case(6)
    rng = np.random.default_rng(13)
    tb = rng.integers(0, 2, entry.tbs_bits, dtype=np.uint8)
    llrs = bits_to_llrs(chain_encode(tb, g, entry.modulation_order), magnitude=1e9)
    result = chain_decode(llrs, entry.tbs_bits, g, entry.modulation_order)
    assert result.crc_ok
    np.testing.assert_array_equal(result.bits, tb)
