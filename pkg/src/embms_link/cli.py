"""Command line interface: analytic tables, BLER points, SE sweeps.

Exit codes: 0 success, 1 configuration error (including bad flags),
2 data-file error.  Every flag can also be supplied through
``--config FILE`` holding ``key = value`` lines (flag names with
underscores); explicit flags override file values.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, DataFileError
from .harness import (
    SimConfig,
    bler_csv_lines,
    run_bler_point,
    sweep_se_curve,
    write_sweep_csv,
)
from .numerology import load_mcs_table, mcs_entry, se_table


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as configuration errors."""

    def error(self, message):
        raise ConfigError(message)


def _parse_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        text = open(path).read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _mcs_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"bad mcs list {text!r}: {exc}") from exc


_SIM_FIELDS = {
    "mode": str,
    "channel": str,
    "tx": int,
    "rx": int,
    "n_rb": int,
    "mcs_list": _mcs_list,
    "cnr_start": float,
    "cnr_stop": float,
    "cnr_step": float,
    "target_bler": float,
    "max_blocks": int,
    "min_errors": int,
    "batch_blocks": int,
    "seed": int,
    "scramble_seed": int,
    "fading": str,
    "workers": int,
}


def _add_sim_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value file; flags override it")
    parser.add_argument("--mode", choices=("scptm", "mbsfn"))
    parser.add_argument("--channel", choices=("awgn", "rayleigh"))
    parser.add_argument("--tx", type=int)
    parser.add_argument("--rx", type=int)
    parser.add_argument("--n-rb", type=int)
    parser.add_argument("--cnr-start", type=float)
    parser.add_argument("--cnr-stop", type=float)
    parser.add_argument("--cnr-step", type=float)
    parser.add_argument("--target-bler", type=float)
    parser.add_argument("--max-blocks", type=int)
    parser.add_argument("--min-errors", type=int)
    parser.add_argument("--batch-blocks", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--scramble-seed", type=int)
    parser.add_argument("--fading", choices=("per_re", "block"))
    parser.add_argument("--workers", type=int)


def _build_config(args: argparse.Namespace, **overrides) -> SimConfig:
    merged: dict = {}
    if getattr(args, "config", None):
        raw = _parse_config_file(args.config)
        for key, text in raw.items():
            if key not in _SIM_FIELDS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                merged[key] = _SIM_FIELDS[key](text)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {text!r} ({exc})") from exc
    for key in _SIM_FIELDS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    merged.update({k: v for k, v in overrides.items() if v is not None})

    rename = {
        "tx": "n_tx",
        "rx": "n_rx",
        "cnr_start": "cnr_start_db",
        "cnr_stop": "cnr_stop_db",
        "cnr_step": "cnr_step_db",
        "min_errors": "min_block_errors",
        "seed": "master_seed",
    }
    kwargs = {rename.get(k, k): v for k, v in merged.items()}
    try:
        return SimConfig(**kwargs).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_se_table(args) -> int:
    rows = se_table(args.mode, args.n_rb, args.streams)
    lines = ["mcs,modulation_order,code_rate,se_per_stream,se_total"]
    for row in rows:
        lines.append(
            f"{row.mcs_index},{row.modulation_order},{float(row.code_rate):.6f},"
            f"{row.se_per_stream:.6f},{row.se_total:.6f}"
        )
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return 0


def _cmd_bler(args) -> int:
    cfg = _build_config(args, mcs_list=(args.mcs,))
    entry = mcs_entry(load_mcs_table(cfg.mode), args.mcs, cfg.n_rb)
    point = run_bler_point(cfg, args.mcs, args.cnr_db)
    text = "\n".join(bler_csv_lines(cfg, entry, point)) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _build_config(args)
    result = sweep_se_curve(cfg)
    write_sweep_csv(result, args.out)
    achieved = sum(t.threshold_cnr_db is not None for t in result.thresholds)
    sys.stdout.write(
        f"swept {len(result.thresholds)} MCS points ({achieved} achieved), "
        f"{len(result.bler_points)} BLER points -> {args.out}\n"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="embms-link", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser("se-table", help="analytic spectral-efficiency table")
    p_table.add_argument("--mode", required=True, choices=("scptm", "mbsfn"))
    p_table.add_argument("--n-rb", required=True, type=int)
    p_table.add_argument("--streams", type=int, default=1)
    p_table.add_argument("--out", help="also write the table to this CSV file")
    p_table.set_defaults(func=_cmd_se_table)

    p_bler = sub.add_parser("bler", help="Monte Carlo BLER at one (MCS, CNR) point")
    _add_sim_flags(p_bler)
    p_bler.add_argument("--mcs", required=True, type=int)
    p_bler.add_argument("--cnr-db", required=True, type=float)
    p_bler.add_argument("--out", help="also write the result row to this CSV file")
    p_bler.set_defaults(func=_cmd_bler)

    p_sweep = sub.add_parser("sweep", help="SE-vs-CNR threshold sweep to CSV")
    _add_sim_flags(p_sweep)
    p_sweep.add_argument("--mcs-list", type=_mcs_list, dest="mcs_list")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except DataFileError as exc:
        print(f"data file error: {exc}", file=sys.stderr)
        return 2
