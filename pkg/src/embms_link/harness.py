"""Monte Carlo link evaluation: BLER points, thresholds, SE curves.

Every trial's random stream is keyed by (master seed, MCS, CNR in
milli-dB, trial index), so a trial's outcome does not depend on how
trials are batched or distributed over workers.  Early stopping is
checked between fixed-size batches, which makes the set of trials run
— and therefore the whole result — a pure function of the
configuration.  Parallel workers only split batches; results reduce
by summation, independent of completion order.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .bicm import demap_llrs, descramble_llrs, map_symbols, scramble_bits
from .channel import apply_channel, draw_rayleigh, noise_variance
from .detector import mmse_detect, mrc_combine
from .errors import ConfigError
from .fec import chain_decode, chain_encode
from .grid import build_layout, extract_from_grid, map_to_grid
from .numerology import (
    MODES,
    bicm_se,
    canonical_numerology,
    load_mcs_table,
    mcs_entry,
    n_avail,
)

CHANNELS = ("awgn", "rayleigh")
FADING_STYLES = ("per_re", "block")
ANTENNA_COUNTS = (1, 2, 4)
SCRAMBLE_SEED_MASK = 2**31 - 1


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings; every field participates in determinism."""

    mode: str = "scptm"
    channel: str = "awgn"
    n_tx: int = 1
    n_rx: int = 1
    n_rb: int = 50
    mcs_list: tuple[int, ...] = tuple(range(0, 28, 3))
    cnr_start_db: float = -10.0
    cnr_stop_db: float = 40.0
    cnr_step_db: float = 1.0
    target_bler: float = 1e-2
    max_blocks: int = 10_000
    min_block_errors: int = 50
    batch_blocks: int = 100
    master_seed: int = 0
    scramble_seed: int = 0
    fading: str = "per_re"
    workers: int = 1

    def validate(self) -> "SimConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode {self.mode!r} not in {MODES}")
        if self.channel not in CHANNELS:
            raise ConfigError(f"channel {self.channel!r} not in {CHANNELS}")
        if self.n_tx not in ANTENNA_COUNTS or self.n_rx not in ANTENNA_COUNTS:
            raise ConfigError(f"antenna counts must be in {ANTENNA_COUNTS}")
        if self.n_rx < self.n_tx:
            raise ConfigError("spatial multiplexing needs n_rx >= n_tx")
        if self.mode == "mbsfn" and self.n_tx != 1:
            raise ConfigError("the multicast channel carries a single stream")
        if self.channel == "awgn" and (self.n_tx, self.n_rx) != (1, 1):
            raise ConfigError("the AWGN-only channel is single antenna")
        if not self.mcs_list:
            raise ConfigError("mcs_list must not be empty")
        if not 0.0 < self.target_bler < 1.0:
            raise ConfigError("target_bler must lie in (0, 1)")
        if self.cnr_step_db <= 0 or self.cnr_stop_db < self.cnr_start_db:
            raise ConfigError("CNR grid must be nonempty and increasing")
        if self.min_block_errors < 1 or self.batch_blocks < 1:
            raise ConfigError("block budgets must be positive")
        if self.max_blocks < self.batch_blocks:
            raise ConfigError("max_blocks must cover at least one batch")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if not 0 <= self.scramble_seed <= SCRAMBLE_SEED_MASK:
            raise ConfigError("scramble_seed outside [0, 2^31)")
        if self.fading not in FADING_STYLES:
            raise ConfigError(f"fading {self.fading!r} not in {FADING_STYLES}")
        return self

    def cnr_grid(self) -> list[float]:
        n = int((self.cnr_stop_db - self.cnr_start_db) / self.cnr_step_db + 1e-9) + 1
        return [self.cnr_start_db + i * self.cnr_step_db for i in range(n)]


@dataclass(frozen=True)
class BlerPoint:
    """One Monte Carlo estimate at a single (MCS, CNR) operating point."""

    mcs: int
    cnr_db: float
    blocks: int
    block_errors: int

    @property
    def bler(self) -> float:
        return self.block_errors / self.blocks

    @property
    def half_width(self) -> float:
        """95% normal-approximation confidence half-width."""
        p = self.bler
        return 1.96 * np.sqrt(p * (1.0 - p) / self.blocks)


@dataclass(frozen=True)
class ThresholdPoint:
    """Refined CNR threshold and analytic SE for one MCS."""

    mcs: int
    modulation_order: int
    code_rate: float
    threshold_cnr_db: float | None
    se_bits_per_re: float


@dataclass(frozen=True)
class SweepResult:
    """Everything a sweep produced, ready for serialization."""

    config: SimConfig
    bler_points: tuple[BlerPoint, ...]
    thresholds: tuple[ThresholdPoint, ...]
    capacity: tuple[tuple[float, float], ...]


def shannon_capacity(cnr_db: float) -> float:
    """AWGN capacity in bits per resource element."""
    return float(np.log2(1.0 + 10.0 ** (cnr_db / 10.0)))


# ---------------------------------------------------------------------------
# Single trial
# ---------------------------------------------------------------------------

@lru_cache(maxsize=128)
def _link_context(cfg: SimConfig, mcs: int):
    """Per-(config, mcs) precomputation shared by all trials."""
    entry = mcs_entry(load_mcs_table(cfg.mode), mcs, cfg.n_rb)
    num = canonical_numerology(cfg.mode, cfg.n_rb)
    layout = build_layout(num, cfg.n_rb)
    g = n_avail(num, cfg.n_rb, entry.modulation_order)
    return entry, layout, g


def _trial_rng(cfg: SimConfig, mcs: int, cnr_db: float, trial: int) -> np.random.Generator:
    # milli-dB resolution, offset so the seed entropy stays non-negative
    cnr_key = int(round(cnr_db * 1000.0)) + 1_000_000
    if cnr_key < 0:
        raise ConfigError(f"CNR {cnr_db} dB below the supported range")
    seq = np.random.SeedSequence((cfg.master_seed, mcs, cnr_key, trial))
    return np.random.default_rng(seq)


def _run_trial(cfg: SimConfig, mcs: int, cnr_db: float, trial: int) -> bool:
    """Simulate one subframe; True when any layer's transport block fails."""
    entry, layout, g = _link_context(cfg, mcs)
    m = entry.modulation_order
    rng = _trial_rng(cfg, mcs, cnr_db, trial)
    n_re = layout.n_data

    tbs = []
    layers = np.empty((cfg.n_tx, n_re), dtype=np.complex128)
    for layer in range(cfg.n_tx):
        tb = rng.integers(0, 2, entry.tbs_bits, dtype=np.uint8)
        tbs.append(tb)
        c_init = (cfg.scramble_seed + layer) & SCRAMBLE_SEED_MASK
        coded = scramble_bits(chain_encode(tb, g, m), c_init)
        grid = map_to_grid(map_symbols(coded, m), layout)
        layers[layer] = extract_from_grid(grid, layout)

    if cfg.channel == "awgn":
        h = None
    elif cfg.fading == "per_re":
        h = draw_rayleigh(n_re, cfg.n_rx, cfg.n_tx, rng)
    else:
        h = np.broadcast_to(draw_rayleigh(1, cfg.n_rx, cfg.n_tx, rng), (n_re, cfg.n_rx, cfg.n_tx))
    y, h_eff, sigma2 = apply_channel(layers, h, cnr_db, rng)

    if cfg.channel == "awgn":
        z = y[:, :1]
        nv = np.full((n_re, 1), sigma2)
    elif cfg.n_tx == 1:
        z_flat, nv_flat = mrc_combine(y, h_eff, sigma2)
        z, nv = z_flat[:, None], nv_flat[:, None]
    else:
        z, nv = mmse_detect(y, h_eff, sigma2)

    for layer in range(cfg.n_tx):
        llrs = demap_llrs(z[:, layer], m, nv[:, layer])
        c_init = (cfg.scramble_seed + layer) & SCRAMBLE_SEED_MASK
        result = chain_decode(descramble_llrs(llrs, c_init), entry.tbs_bits, g, m)
        if not (result.crc_ok and np.array_equal(result.bits, tbs[layer])):
            return True
    return False


def _chunk_errors(cfg: SimConfig, mcs: int, cnr_db: float, trials: list[int]) -> int:
    return sum(_run_trial(cfg, mcs, cnr_db, t) for t in trials)


def run_noiseless_trial(cfg: SimConfig, mcs: int, trial: int = 0) -> bool:
    """One trial at an effectively noise-free operating point.

    Fading configurations use an identity (or all-ones receive) channel
    so the round trip is deterministic; returns True on any bit error.
    """
    quiet = replace(cfg, channel="awgn") if (cfg.n_tx, cfg.n_rx) == (1, 1) else cfg
    if quiet.channel == "awgn":
        return _run_trial(quiet, mcs, 300.0, trial)
    # fixed unit channel: each layer arrives orthogonally
    entry, layout, g = _link_context(cfg, mcs)
    m = entry.modulation_order
    rng = _trial_rng(cfg, mcs, 300.0, trial)
    n_re = layout.n_data
    tbs, layer_list = [], []
    for layer in range(cfg.n_tx):
        tb = rng.integers(0, 2, entry.tbs_bits, dtype=np.uint8)
        tbs.append(tb)
        c_init = (cfg.scramble_seed + layer) & SCRAMBLE_SEED_MASK
        coded = scramble_bits(chain_encode(tb, g, m), c_init)
        grid = map_to_grid(map_symbols(coded, m), layout)
        layer_list.append(extract_from_grid(grid, layout))
    layers = np.asarray(layer_list)
    eye = np.zeros((cfg.n_rx, cfg.n_tx), dtype=np.complex128)
    for i in range(cfg.n_tx):
        eye[i % cfg.n_rx, i] = 1.0
    if cfg.n_tx == 1 and cfg.n_rx > 1:
        eye[:, 0] = 1.0  # all-ones column: coherent combining gain
    h = np.broadcast_to(eye, (n_re, cfg.n_rx, cfg.n_tx))
    y, h_eff, sigma2 = apply_channel(layers, h, 300.0, rng)
    if cfg.n_tx == 1:
        z_flat, nv_flat = mrc_combine(y, h_eff, sigma2)
        z, nv = z_flat[:, None], nv_flat[:, None]
    else:
        z, nv = mmse_detect(y, h_eff, sigma2)
    for layer in range(cfg.n_tx):
        llrs = demap_llrs(z[:, layer], m, nv[:, layer])
        c_init = (cfg.scramble_seed + layer) & SCRAMBLE_SEED_MASK
        result = chain_decode(descramble_llrs(llrs, c_init), entry.tbs_bits, g, m)
        if not (result.crc_ok and np.array_equal(result.bits, tbs[layer])):
            return True
    return False


# ---------------------------------------------------------------------------
# BLER point with deterministic batched early stopping
# ---------------------------------------------------------------------------

def run_bler_point(cfg: SimConfig, mcs: int, cnr_db: float, _pool=None) -> BlerPoint:
    """Estimate BLER at one operating point.

    Runs fixed-size batches of trials until ``min_block_errors`` block
    errors have accumulated or ``max_blocks`` trials have run; the
    early-stop check sits between batches so the trial set is
    worker-count invariant.
    """
    cfg.validate()
    blocks = 0
    errors = 0
    while blocks < cfg.max_blocks and errors < cfg.min_block_errors:
        n = min(cfg.batch_blocks, cfg.max_blocks - blocks)
        trials = list(range(blocks, blocks + n))
        if _pool is None or cfg.workers == 1 or n < 2 * cfg.workers:
            errors += _chunk_errors(cfg, mcs, cnr_db, trials)
        else:
            chunks = [c.tolist() for c in np.array_split(trials, cfg.workers) if c.size]
            jobs = [(cfg, mcs, cnr_db, c) for c in chunks]
            errors += sum(_pool.starmap(_chunk_errors, jobs))
        blocks += n
    return BlerPoint(mcs=mcs, cnr_db=cnr_db, blocks=blocks, block_errors=errors)


class _PointRunner:
    """Runs BLER points, deduplicating and recording them for the CSV."""

    def __init__(self, cfg: SimConfig, pool=None):
        self.cfg = cfg
        self.pool = pool
        self.records: dict[tuple[int, int], BlerPoint] = {}

    def bler(self, mcs: int, cnr_db: float) -> float:
        key = (mcs, int(round(cnr_db * 1000.0)))
        point = self.records.get(key)
        if point is None:
            point = run_bler_point(self.cfg, mcs, cnr_db, _pool=self.pool)
            self.records[key] = point
        return point.bler


def find_threshold(
    cfg: SimConfig,
    mcs: int,
    bler_fn=None,
    scan_floor_db: float | None = None,
) -> float | None:
    """Lowest CNR meeting the BLER target, refined to 0.25 dB.

    Scans the configured CNR grid upward for the first passing point,
    walking downward instead when the first scanned point already
    passes, then bisects the fail/pass bracket.  Returns the passing
    upper endpoint, or None when the target is never met ("unachieved").
    ``bler_fn(mcs, cnr_db) -> bler`` may replace the Monte Carlo runner.
    ``scan_floor_db`` skips grid points below a known-failing region.
    """
    cfg.validate()
    if bler_fn is None:
        bler_fn = _PointRunner(cfg).bler
    grid = cfg.cnr_grid()
    if scan_floor_db is not None:
        grid = [c for c in grid if c >= scan_floor_db - 1e-9]
        if not grid:
            return None

    last_fail = None
    first_pass = None
    for cnr in grid:
        if bler_fn(mcs, cnr) <= cfg.target_bler:
            first_pass = cnr
            break
        last_fail = cnr
    if first_pass is None:
        return None
    if last_fail is None:
        # the first scanned point passed: walk down to bracket the edge
        cnr = first_pass - cfg.cnr_step_db
        while cnr >= cfg.cnr_start_db - 1e-9:
            if bler_fn(mcs, cnr) > cfg.target_bler:
                last_fail = cnr
                break
            first_pass = cnr
            cnr -= cfg.cnr_step_db
        if last_fail is None:
            return first_pass  # passes all the way down the grid

    lo, hi = last_fail, first_pass
    while hi - lo > 0.25 + 1e-9:
        mid = 0.5 * (lo + hi)
        if bler_fn(mcs, mid) <= cfg.target_bler:
            hi = mid
        else:
            lo = mid
    return hi


def sweep_se_curve(cfg: SimConfig) -> SweepResult:
    """Thresholds and SE for every configured MCS plus the capacity overlay."""
    cfg.validate()
    table = load_mcs_table(cfg.mode)
    entries = {mcs: mcs_entry(table, mcs, cfg.n_rb) for mcs in cfg.mcs_list}

    pool = None
    try:
        if cfg.workers > 1:
            pool = multiprocessing.get_context("fork").Pool(cfg.workers)
        runner = _PointRunner(cfg, pool=pool)
        thresholds = []
        floor = None
        for mcs in sorted(cfg.mcs_list):
            entry = entries[mcs]
            th = find_threshold(cfg, mcs, bler_fn=runner.bler, scan_floor_db=floor)
            if th is not None:
                floor = th
            se = bicm_se(entry.modulation_order, float(entry.code_rate), cfg.n_tx)
            thresholds.append(
                ThresholdPoint(
                    mcs=mcs,
                    modulation_order=entry.modulation_order,
                    code_rate=float(entry.code_rate),
                    threshold_cnr_db=th,
                    se_bits_per_re=se,
                )
            )
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    points = tuple(
        sorted(runner.records.values(), key=lambda p: (p.mcs, p.cnr_db))
    )
    capacity = tuple((cnr, shannon_capacity(cnr)) for cnr in cfg.cnr_grid())
    return SweepResult(
        config=cfg,
        bler_points=points,
        thresholds=tuple(thresholds),
        capacity=capacity,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

CSV_HEADER = (
    "mode,channel,n_tx,n_rx,mcs,modulation_order,code_rate,cnr_db,"
    "blocks,block_errors,bler,threshold_cnr_db,se_bits_per_re"
)


def _fmt_cnr(value: float) -> str:
    return f"{value:.4f}"


def sweep_csv_lines(result: SweepResult) -> list[str]:
    """Deterministic CSV serialization: BLER rows, thresholds, capacity."""
    cfg = result.config
    prefix = f"{cfg.mode},{cfg.channel},{cfg.n_tx},{cfg.n_rx}"
    entries = {t.mcs: t for t in result.thresholds}
    lines = [CSV_HEADER]
    for p in result.bler_points:
        t = entries[p.mcs]
        lines.append(
            f"{prefix},{p.mcs},{t.modulation_order},{t.code_rate:.6f},"
            f"{_fmt_cnr(p.cnr_db)},{p.blocks},{p.block_errors},{p.bler:.8f},,"
        )
    for t in result.thresholds:
        th = "" if t.threshold_cnr_db is None else _fmt_cnr(t.threshold_cnr_db)
        lines.append(
            f"{prefix},{t.mcs},{t.modulation_order},{t.code_rate:.6f},"
            f",,,,{th},{t.se_bits_per_re:.6f}"
        )
    for cnr, se in result.capacity:
        lines.append(f"{prefix},,,,{_fmt_cnr(cnr)},,,,,{se:.6f}")
    return lines


def write_sweep_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(sweep_csv_lines(result)) + "\n")


def bler_csv_lines(cfg: SimConfig, entry, point: BlerPoint) -> list[str]:
    """Single BLER point in the same schema as sweep output."""
    prefix = f"{cfg.mode},{cfg.channel},{cfg.n_tx},{cfg.n_rx}"
    return [
        CSV_HEADER,
        f"{prefix},{point.mcs},{entry.modulation_order},{float(entry.code_rate):.6f},"
        f"{_fmt_cnr(point.cnr_db)},{point.blocks},{point.block_errors},{point.bler:.8f},,",
    ]
