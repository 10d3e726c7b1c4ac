#!/usr/bin/env python3
"""Regenerate the CSV data files bundled with embms_link.

Emits into src/embms_link/data/:

  qpp_interleaver.csv   turbo-code QPP permutation parameters (TS 36.212
                        Table 5.1.3-3), one row per valid code block size
  mcs_tbs.csv           MCS -> (modulation, I_TBS) mapping plus transport
                        block sizes for the bundled RB counts (TS 36.213
                        Tables 7.1.7.1-1A / 7.1.7.2.1-1)
  constellations.csv    Gray-labelled QAM constellations with integer
                        coordinates (TS 36.211 section 7.1); points are
                        normalized to unit average energy at load time

The files are committed; rerun this script only when the tables change.
Rows whose effective code rate at the canonical numerology would exceed
the 0.925 scheduling cap are not emitted.
"""

import csv
import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "embms_link", "data")

# ---------------------------------------------------------------------------
# QPP interleaver parameters, TS 36.212 Table 5.1.3-3.  K: (f1, f2)
# ---------------------------------------------------------------------------

QPP_PARAMS = {
    40: (3, 10), 48: (7, 12), 56: (19, 42), 64: (7, 16), 72: (7, 18), 80: (11, 20),
    88: (5, 22), 96: (11, 24), 104: (7, 26), 112: (41, 84), 120: (103, 90), 128: (15, 32),
    136: (9, 34), 144: (17, 108), 152: (9, 38), 160: (21, 120), 168: (101, 84), 176: (21, 44),
    184: (57, 46), 192: (23, 48), 200: (13, 50), 208: (27, 52), 216: (11, 36), 224: (27, 56),
    232: (85, 58), 240: (29, 60), 248: (33, 62), 256: (15, 32), 264: (17, 198), 272: (33, 68),
    280: (103, 210), 288: (19, 36), 296: (19, 74), 304: (37, 76), 312: (19, 78), 320: (21, 120),
    328: (21, 82), 336: (115, 84), 344: (193, 86), 352: (21, 44), 360: (133, 90), 368: (81, 46),
    376: (45, 94), 384: (23, 48), 392: (243, 98), 400: (151, 40), 408: (155, 102), 416: (25, 52),
    424: (51, 106), 432: (47, 72), 440: (91, 110), 448: (29, 168), 456: (29, 114), 464: (247, 58),
    472: (29, 118), 480: (89, 180), 488: (91, 122), 496: (157, 62), 504: (55, 84), 512: (31, 64),
    528: (17, 66), 544: (35, 68), 560: (227, 420), 576: (65, 96), 592: (19, 74), 608: (37, 76),
    624: (41, 234), 640: (39, 80), 656: (185, 82), 672: (43, 252), 688: (21, 86), 704: (155, 44),
    720: (79, 120), 736: (139, 92), 752: (23, 94), 768: (217, 48), 784: (25, 98), 800: (17, 80),
    816: (127, 102), 832: (25, 52), 848: (239, 106), 864: (17, 48), 880: (137, 110), 896: (215, 112),
    912: (29, 114), 928: (15, 58), 944: (147, 118), 960: (29, 60), 976: (59, 122), 992: (65, 124),
    1008: (55, 84), 1024: (31, 64), 1056: (17, 66), 1088: (171, 204), 1120: (67, 140), 1152: (35, 72),
    1184: (19, 74), 1216: (39, 76), 1248: (19, 78), 1280: (199, 240), 1312: (21, 82), 1344: (211, 252),
    1376: (21, 86), 1408: (43, 88), 1440: (149, 60), 1472: (45, 92), 1504: (49, 846), 1536: (71, 48),
    1568: (13, 28), 1600: (17, 80), 1632: (25, 102), 1664: (183, 104), 1696: (55, 954), 1728: (127, 96),
    1760: (27, 110), 1792: (29, 112), 1824: (29, 114), 1856: (57, 116), 1888: (45, 354), 1920: (31, 120),
    1952: (59, 610), 1984: (185, 124), 2016: (113, 420), 2048: (31, 64), 2112: (17, 66), 2176: (171, 136),
    2240: (209, 420), 2304: (253, 216), 2368: (367, 444), 2432: (265, 456), 2496: (181, 468), 2560: (39, 80),
    2624: (27, 164), 2688: (127, 504), 2752: (143, 172), 2816: (43, 88), 2880: (29, 300), 2944: (45, 92),
    3008: (157, 188), 3072: (47, 96), 3136: (13, 28), 3200: (111, 240), 3264: (443, 204), 3328: (51, 104),
    3392: (51, 212), 3456: (451, 192), 3520: (257, 220), 3584: (57, 336), 3648: (313, 228), 3712: (271, 232),
    3776: (179, 236), 3840: (331, 120), 3904: (363, 244), 3968: (375, 248), 4032: (127, 168), 4096: (31, 64),
    4160: (33, 130), 4224: (43, 264), 4288: (33, 134), 4352: (477, 408), 4416: (35, 138), 4480: (233, 280),
    4544: (357, 142), 4608: (337, 480), 4672: (37, 146), 4736: (71, 444), 4800: (71, 120), 4864: (37, 152),
    4928: (39, 462), 4992: (127, 234), 5056: (39, 158), 5120: (39, 80), 5184: (31, 96), 5248: (113, 902),
    5312: (41, 166), 5376: (251, 336), 5440: (43, 170), 5504: (21, 86), 5568: (43, 174), 5632: (45, 176),
    5696: (45, 178), 5760: (161, 120), 5824: (89, 182), 5888: (323, 184), 5952: (47, 186), 6016: (23, 94),
    6080: (47, 190), 6144: (263, 480),
}

# ---------------------------------------------------------------------------
# Transport block sizes, TS 36.213 Table 7.1.7.2.1-1, columns for the
# bundled RB counts.  I_TBS 0..26 are the original rows; 27..33 are the
# 256QAM extension.  For the extension rows only the 50 and 100 RB entries
# are load-bearing here; the small-bandwidth entries follow the same
# per-RB scaling rounded down to a multiple of 8.
# ---------------------------------------------------------------------------

N_RB_COLUMNS = [6, 15, 25, 50, 100]

TBS_TABLE = {
    #      6 RB   15 RB   25 RB   50 RB   100 RB
    0:  [  152,   392,   680,  1384,  2792],
    1:  [  208,   520,   904,  1800,  3624],
    2:  [  256,   648,  1096,  2216,  4584],
    3:  [  328,   872,  1416,  2856,  5736],
    4:  [  408,  1064,  1800,  3624,  7224],
    5:  [  504,  1320,  2216,  4392,  8760],
    6:  [  600,  1544,  2600,  5160, 10296],
    7:  [  712,  1800,  3112,  6200, 12216],
    8:  [  808,  2024,  3496,  6968, 14112],
    9:  [  936,  2280,  3880,  7992, 15840],
    10: [ 1032,  2536,  4264,  8760, 17568],
    11: [ 1192,  2984,  4968,  9912, 19848],
    12: [ 1352,  3368,  5544, 11448, 22920],
    13: [ 1544,  3880,  6456, 12960, 25456],
    14: [ 1736,  4264,  7224, 14112, 28336],
    15: [ 1800,  4584,  7736, 15264, 30576],
    16: [ 1928,  4968,  7992, 16416, 32856],
    17: [ 2152,  5352,  9144, 18336, 36696],
    18: [ 2280,  5992,  9912, 19848, 39232],
    19: [ 2600,  6456, 10680, 21384, 43816],
    20: [ 2792,  6968, 11448, 22920, 46888],
    21: [ 2984,  7480, 12576, 25456, 51024],
    22: [ 3240,  7992, 13536, 27376, 55056],
    23: [ 3496,  8504, 14112, 28336, 57336],
    24: [ 3624,  9144, 15264, 30576, 61664],
    25: [ 3752,  9528, 15840, 31704, 63776],
    26: [ 4392, 11064, 18336, 36696, 75376],
    27: [ 4080, 10200, 17000, 34008, 68016],
    28: [ 4216, 10544, 17576, 35160, 70320],
    29: [ 4400, 11008, 18344, 36696, 73392],
    30: [ 4672, 11680, 19464, 38936, 77872],
    31: [ 4864, 12168, 20288, 40576, 81152],
    32: [ 5080, 12704, 21184, 42368, 84736],
    33: [ 5872, 14680, 24464, 48936, 97896],
}

# MCS -> (modulation order, I_TBS), TS 36.213 Table 7.1.7.1-1A (the
# 256QAM-capable mapping).  SC-PTM carries the full 0..27 range; the PMCH
# variant stops at I_TBS 32 because the extended-CP resource budget cannot
# carry the I_TBS 33 block inside the code-rate cap.
MCS_TABLE_256 = {
    0: (2, 0), 1: (2, 2), 2: (2, 4),
    3: (4, 6), 4: (4, 8), 5: (4, 10), 6: (4, 11), 7: (4, 12),
    8: (4, 13), 9: (4, 14), 10: (4, 15),
    11: (6, 16), 12: (6, 17), 13: (6, 18), 14: (6, 19), 15: (6, 20),
    16: (6, 21), 17: (6, 22), 18: (6, 23), 19: (6, 24),
    20: (8, 25), 21: (8, 27), 22: (8, 28), 23: (8, 29), 24: (8, 30),
    25: (8, 31), 26: (8, 32), 27: (8, 33),
}

CODE_RATE_CAP = 0.925


def data_res_per_rb(mode, n_rb):
    """Data REs per RB per subframe at the canonical numerology of a mode."""
    if mode == "scptm":
        n_ctrl = 2 if n_rb >= 50 else 3
        return (14 - n_ctrl) * 12 - 6
    if mode == "mbsfn":
        return 1 * 144 - 24
    raise ValueError(mode)


def write_qpp():
    path = os.path.join(OUT_DIR, "qpp_interleaver.csv")
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["k", "f1", "f2"])
        for k in sorted(QPP_PARAMS):
            f1, f2 = QPP_PARAMS[k]
            w.writerow([k, f1, f2])
    print(f"wrote {path} ({len(QPP_PARAMS)} sizes)")


def write_mcs_tbs():
    path = os.path.join(OUT_DIR, "mcs_tbs.csv")
    n_rows = 0
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["mode", "mcs_index", "modulation_order", "i_tbs", "n_rb", "tbs_bits"])
        for mode in ("scptm", "mbsfn"):
            for mcs in sorted(MCS_TABLE_256):
                m, i_tbs = MCS_TABLE_256[mcs]
                if mode == "mbsfn" and i_tbs > 32:
                    continue
                for col, n_rb in enumerate(N_RB_COLUMNS):
                    tbs = TBS_TABLE[i_tbs][col]
                    cr = tbs / (m * n_rb * data_res_per_rb(mode, n_rb))
                    if cr > CODE_RATE_CAP:
                        continue
                    w.writerow([mode, mcs, m, i_tbs, n_rb, tbs])
                    n_rows += 1
    print(f"wrote {path} ({n_rows} rows)")


def axis_level(bits):
    # Recursive Gray PAM used by the LTE tables: innermost pair maps to
    # 2 -/+ 1, each outer bit reflects and shifts by the next power of two.
    value = 1
    scale = 2
    for b in reversed(bits[1:]):
        value = scale - value if b == 0 else scale + value
        scale *= 2
    # at this point value is the magnitude for b0 = 0
    return value if bits[0] == 0 else -value


def write_constellations():
    path = os.path.join(OUT_DIR, "constellations.csv")
    n_rows = 0
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["M", "label_bits", "re", "im"])
        for m in (2, 4, 6, 8):
            M = 2 ** m
            half = m // 2
            for idx in range(M):
                bits = [(idx >> (m - 1 - i)) & 1 for i in range(m)]
                i_bits = bits[0::2]
                q_bits = bits[1::2]
                if half == 1:
                    re = 1 - 2 * i_bits[0]
                    im = 1 - 2 * q_bits[0]
                else:
                    re = axis_level(i_bits)
                    im = axis_level(q_bits)
                label = "".join(str(b) for b in bits)
                w.writerow([M, label, re, im])
                n_rows += 1
    print(f"wrote {path} ({n_rows} rows)")


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    write_qpp()
    write_mcs_tbs()
    write_constellations()


if __name__ == "__main__":
    main()
