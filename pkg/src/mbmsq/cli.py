"""Command-line runner: build sets, spectra, bounds, rank profiles, BER
simulations and the canned figure experiments.

Every output file starts with ``#`` comment lines echoing the tool version,
worker count and the full configuration; the body is exactly what the
library's ``to_csv``/dump helpers return.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, fields, replace
from math import comb
from pathlib import Path

import numpy as np

from . import __version__
from .channel_sim import (
    SimConfig,
    ber_curve,
    ber_points_to_csv,
    ber_vs_nr,
    bracket_crossing,
    ebn0_from_snr,
)
from .constellation import (
    DEFAULT_PAIR_CAP,
    CapExceeded,
    MbmSignalSet,
    SignalSetError,
    conventional_set,
    distance_spectrum,
    dump_signal_set,
    proposed_set,
    rate,
)
from .gf2m import FieldError, field_new
from .link_analysis import bound_to_csv, energy_scale, pair_classes, rank_profile, union_bound
from .map_index_code import CodeParameterError, build_shortened_rs, dump_codebook
from .squaring import ConstructionError, build_constellation, dump_constellation, levels_for_block_length

OUTPUT_ENV = "MBMSQ_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_CAP = 0, 2, 3

log = logging.getLogger("mbmsq")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment.  ``scheme`` is ``mic-sq`` (coded blocks),
    ``conventional`` (one-use MBM with M-PAM, BPSK for M = 2) or
    ``squaring`` (the symbol constellation alone, from M and L)."""

    scheme: str = "mic-sq"
    N: int = 4
    K: int = 2
    m_rf: int = 4
    M: int = 2
    L: int = 0  # 0: derived from N
    primitive_poly: int = 0  # 0: built-in default
    n_r: int = 4
    snr_start: float = 0.0
    snr_stop: float = 12.0
    snr_step: float = 1.0
    seed: int = 0
    min_bit_errors: int = 100
    max_blocks: int = 10_000_000
    normalize: bool = True
    output: str = ""  # empty: $MBMSQ_OUTPUT_DIR or the working directory

    def validate(self) -> "ExperimentConfig":
        if self.scheme not in ("mic-sq", "conventional", "squaring"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.M < 2 or self.M & (self.M - 1):
            raise ConfigError("M must be a power of two")
        if self.scheme != "squaring" and not 1 <= self.m_rf <= 8:
            raise ConfigError("m_rf must be in 1..8")
        if self.scheme == "mic-sq":
            q = 1 << self.m_rf
            if not 1 <= self.K < self.N <= q - 1:
                raise ConfigError(f"need 1 <= K < N <= 2^m_rf - 1 = {q - 1}")
            if self.N & (self.N - 1):
                raise ConfigError("N must be a power of two")
        if self.scheme == "squaring" and self.L < 1:
            raise ConfigError("squaring scheme needs L >= 1")
        if self.n_r < 1:
            raise ConfigError("n_r must be >= 1")
        if self.snr_step <= 0 or self.snr_stop < self.snr_start:
            raise ConfigError("SNR range needs step > 0 and stop >= start")
        if not all(np.isfinite([self.snr_start, self.snr_stop, self.snr_step])):
            raise ConfigError("SNR range must be finite")
        if self.min_bit_errors < 1 or self.max_blocks < 1:
            raise ConfigError("stopping limits must be positive")
        return self

    @property
    def snr_points(self) -> list[float]:
        n = int(np.floor((self.snr_stop - self.snr_start) / self.snr_step + 1e-9)) + 1
        return [round(self.snr_start + i * self.snr_step, 10) for i in range(n)]

    def to_text(self) -> str:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif f.name == "primitive_poly":
                v = hex(v)
            out.append(f"{f.name} = {v}")
        return "\n".join(out) + "\n"

    def output_dir(self) -> Path:
        return Path(self.output or os.environ.get(OUTPUT_ENV) or ".")


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(key: str, raw: str, line: int | None):
    kind = _FIELD_TYPES[key]
    try:
        if kind == "bool":
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if kind == "int":
            return int(raw, 0)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind}", line) from None
    return raw


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` starts a comment) over defaults."""
    values = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", no)
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown key {key!r}", no)
        values[key] = (_coerce(key, val, no), no)
    cfg = replace(base or ExperimentConfig(), **{k: v for k, (v, _) in values.items()})
    try:
        return cfg.validate()
    except ConfigError as exc:
        # point at the offending line when one key is clearly to blame
        msg = str(exc)
        for key, (_, no) in values.items():
            if msg.startswith(key + " ") or msg.startswith(key + ":"):
                raise ConfigError(msg, no) from None
        raise


def build_set(cfg: ExperimentConfig) -> MbmSignalSet:
    if cfg.scheme == "conventional":
        alphabet = np.arange(-(cfg.M - 1), cfg.M, 2).astype(complex)
        return conventional_set(cfg.m_rf, alphabet)
    if cfg.scheme == "squaring":
        raise ConfigError("the squaring scheme has no block signal set")
    field = field_new(cfg.m_rf, cfg.primitive_poly or None)
    code = build_shortened_rs(field, cfg.N, cfg.K)
    L = cfg.L or levels_for_block_length(cfg.N)
    return proposed_set(code, build_constellation(cfg.M, L))


def header(cfg: ExperimentConfig, workers: int, extra: str = "") -> str:
    lines = [f"# mbmsq {__version__} workers={workers}" + (f" {extra}" if extra else "")]
    lines += ["# " + ln for ln in cfg.to_text().splitlines()]
    return "\n".join(lines) + "\n"


def _write(cfg: ExperimentConfig, name: str, body: str, workers: int, extra: str = "") -> Path:
    out = cfg.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(header(cfg, workers, extra) + body)
    print(path)
    return path


def _sim_config(cfg: ExperimentConfig, sset: MbmSignalSet, workers: int, n_r: int | None = None,
                snrs=None) -> SimConfig:
    return SimConfig(
        sset,
        n_r or cfg.n_r,
        list(cfg.snr_points if snrs is None else snrs),
        cfg.min_bit_errors,
        cfg.max_blocks,
        cfg.seed,
        cfg.normalize,
        workers,
    )


def cmd_build(cfg, args):
    if cfg.scheme == "squaring":
        const = build_constellation(cfg.M, cfg.L)
        _write(cfg, "constellation.txt", dump_constellation(const), args.workers)
        return
    if cfg.scheme == "mic-sq":
        sset = build_set(cfg)
        _write(cfg, "codebook.txt", dump_codebook(sset.codebook), args.workers)
        _write(cfg, "constellation.txt", dump_constellation(sset.constellation), args.workers)
    else:
        sset = build_set(cfg)
    _write(cfg, "signal_set.txt", dump_signal_set(sset), args.workers, f"rate={rate(sset):g}")


def cmd_spectrum(cfg, args):
    spec = distance_spectrum(build_set(cfg), cap=args.cap)
    _write(cfg, "spectrum.csv", spec.to_csv(), args.workers)


def cmd_ranks(cfg, args):
    prof = rank_profile(pair_classes(build_set(cfg), cap=args.cap))
    _write(cfg, "ranks.csv", prof.to_csv(), args.workers)
    print(f"min_rank={prof.min_rank} rank_one_pairs={prof.rank_one_pairs} total_pairs={prof.total_pairs}")


def cmd_bound(cfg, args):
    sset = build_set(cfg)
    snrs = cfg.snr_points
    rho = 10.0 ** (np.asarray(snrs) / 10.0)
    c2 = energy_scale(sset, cfg.normalize)
    ub = union_bound(pair_classes(sset, cap=args.cap), rho, cfg.n_r, energy_scale_sq=c2)
    _write(cfg, "bound.csv", bound_to_csv(snrs, ub), args.workers)


def cmd_simulate(cfg, args):
    pts = ber_curve(_sim_config(cfg, build_set(cfg), args.workers))
    _write(cfg, "ber.csv", ber_points_to_csv(pts), args.workers)


# canned figure experiments: (label, overrides)
FIG_SETS = {
    3: [("proposed", dict(scheme="mic-sq", N=4, K=2, m_rf=4, M=2, snr_start=0, snr_stop=8)),
        ("conventional", dict(scheme="conventional", m_rf=1, M=2, snr_start=0, snr_stop=14))],
    4: [("proposed", dict(scheme="mic-sq", N=4, K=2, m_rf=6, M=2, snr_start=0, snr_stop=7)),
        ("conventional", dict(scheme="conventional", m_rf=2, M=2, snr_start=0, snr_stop=13))],
    7: [("proposed", dict(scheme="mic-sq", N=4, K=2, m_rf=4, M=2)),
        ("conventional", dict(scheme="conventional", m_rf=1, M=2))],
    8: [("proposed", dict(scheme="mic-sq", N=4, K=2, m_rf=6, M=2)),
        ("conventional", dict(scheme="conventional", m_rf=2, M=2))],
    9: [("proposed", dict(scheme="mic-sq", N=4, K=2, m_rf=4, M=2, snr_start=0, snr_stop=8)),
        ("conventional", dict(scheme="conventional", m_rf=4, M=2, snr_start=4, snr_stop=18))],
}
FIG_NR = {
    5: [("proposed", dict(scheme="mic-sq", N=4, K=2, m_rf=6, M=2), range(1, 10)),
        ("conventional", dict(scheme="conventional", m_rf=2, M=2), range(1, 18))],
    6: [("proposed", dict(scheme="mic-sq", N=4, K=2, m_rf=6, M=2), range(1, 9)),
        ("conventional", dict(scheme="conventional", m_rf=2, M=2), range(1, 17))],
}
FIG_DESK_BLOCKS = 2_000_000


def cmd_figure(cfg, args):
    n = args.number
    base = replace(cfg, n_r=4, max_blocks=min(cfg.max_blocks, FIG_DESK_BLOCKS))
    if n in (3, 4, 9):
        for label, over in FIG_SETS[n]:
            c = replace(base, **over, snr_step=1.0).validate()
            sset = build_set(c)
            pts = ber_curve(_sim_config(c, sset, args.workers))
            if n == 9:
                eta = rate(sset)
                body = ber_points_to_csv(pts).splitlines()
                body[0] = body[0].replace("snr_db", "snr_db,ebn0_db", 1)
                for i, p in enumerate(pts, start=1):
                    first, rest = body[i].split(",", 1)
                    body[i] = f"{first},{float(ebn0_from_snr(p.snr_db, eta)):.4f},{rest}"
                _write(c, f"figure9_{label}.csv", "\n".join(body) + "\n", args.workers, f"rate={eta:g}")
                continue
            _write(c, f"figure{n}_{label}_sim.csv", ber_points_to_csv(pts), args.workers)
            if label == "proposed":
                rho = 10.0 ** (np.asarray(c.snr_points) / 10.0)
                ub = union_bound(pair_classes(sset, cap=args.cap), rho, c.n_r,
                                 energy_scale_sq=energy_scale(sset, c.normalize))
                _write(c, f"figure{n}_{label}_bound.csv", bound_to_csv(c.snr_points, ub), args.workers)
    elif n in (7, 8):
        # bound only, deep into the tail
        for label, over in FIG_SETS[n]:
            c = replace(base, **over, snr_start=0, snr_stop=60, snr_step=1.0).validate()
            sset = build_set(c)
            rho = 10.0 ** (np.asarray(c.snr_points) / 10.0)
            ub = union_bound(pair_classes(sset, cap=args.cap), rho, c.n_r,
                             energy_scale_sq=energy_scale(sset, c.normalize))
            keep = [i for i, b in enumerate(ub) if b >= 1e-20 or i == 0 or ub[i - 1] >= 1e-20]
            _write(c, f"figure{n}_{label}_bound.csv",
                   bound_to_csv([c.snr_points[i] for i in keep], ub[keep]), args.workers)
    elif n == 5:
        for label, over, nrs in FIG_NR[5]:
            c = replace(base, **over).validate()
            pts = ber_vs_nr(_sim_config(c, build_set(c), args.workers), list(nrs), 2.0)
            _write(c, f"figure5_{label}.csv", ber_points_to_csv(pts, by="n_r"), args.workers, "snr_db=2")
    elif n == 6:
        for label, over, nrs in FIG_NR[6]:
            c = replace(base, **over).validate()
            sset = build_set(c)
            rows = ["n_r,snr_db"]
            for nr in nrs:
                x, _ = bracket_crossing(_sim_config(c, sset, args.workers, n_r=nr), 1e-3, 10.0, 1.0)
                rows.append(f"{nr},{x:.3f}")
            _write(c, f"figure6_{label}.csv", "\n".join(rows) + "\n", args.workers, "target_ber=1e-3")
    else:
        raise ConfigError(f"no canned experiment for figure {n}; choose 3-9")


COMMANDS = {
    "build": cmd_build,
    "spectrum": cmd_spectrum,
    "bound": cmd_bound,
    "ranks": cmd_ranks,
    "simulate": cmd_simulate,
    "figure": cmd_figure,
}


def make_parser() -> argparse.ArgumentParser:
    defaults = ExperimentConfig()
    keys = ", ".join(f"{f.name}={getattr(defaults, f.name)!r}" for f in fields(ExperimentConfig))
    p = argparse.ArgumentParser(
        prog="mbmsq",
        description="Coded MBM signal sets: construction, spectra, bounds and BER simulation.",
        epilog=f"Config keys and defaults: {keys}.  Output directory defaults to ${OUTPUT_ENV}.",
    )
    p.add_argument("--version", action="version", version=f"mbmsq {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        if name == "figure":
            sp.add_argument("number", type=int, choices=range(3, 10))
        sp.add_argument("-c", "--config", help="file of 'key = value' lines")
        sp.add_argument("-s", "--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("-o", "--output", help="output directory")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--cap", type=int, default=DEFAULT_PAIR_CAP,
                        help="largest set size for full pair sweeps")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(args) -> ExperimentConfig:
    text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    cfg = parse_config(text)
    if args.set:
        cfg = parse_config("\n".join(args.set), base=cfg)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.output:
        cfg = replace(cfg, output=args.output)
    return cfg.validate()


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        cfg = load_config(args)
        COMMANDS[args.command](cfg, args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ConfigError, CodeParameterError, ConstructionError, SignalSetError, FieldError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
