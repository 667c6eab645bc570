"""Monte Carlo BER engine, slope estimation, and result persistence.

Every frame's randomness is keyed by (seed, SNR point, frame index), so a
single simulated frame can be replayed exactly and the error counts are
independent of how frames are distributed over workers.  Single-worker
runs are bit-identical run to run.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import time

import numpy as np

from . import constellation as cst
from .channel import SnrPoint, sample_channel, transmit
from .decoders import (BudgetExceededError, ml_decode, pic_group_decode,
                       pic_sic_decode, zf_decode, DECODER_NAMES,
                       ML_BUDGET_DEFAULT)
from .equivalent import build_equivalent_channel, default_grouping, \
    stack_received
from .stbc import encode, power_normalizer

WORKER_CHUNK = 256


class InsufficientStatisticsError(Exception):
    """Slope requested from too few adequately-measured BER points."""


@dataclass(frozen=True)
class SimConfig:
    """One BER sweep: code, channel size, receiver, SNR grid, stop rule."""
    spec: object
    n_rx: int
    constellation: str
    decoder: str
    snr_db_grid: tuple
    max_frames: int = 100000
    target_bit_errors: int = 500
    seed: int = 1
    workers: int = 1
    ml_budget: int = ML_BUDGET_DEFAULT

    def __post_init__(self):
        grid = tuple(float(v) for v in self.snr_db_grid)
        object.__setattr__(self, "snr_db_grid", grid)
        if any(b >= a for a, b in zip(grid[1:], grid)):
            raise ValueError("snr grid must be strictly increasing")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.target_bit_errors < 1:
            raise ValueError("target_bit_errors must be >= 1")
        if self.decoder not in DECODER_NAMES:
            raise ValueError(f"unknown decoder {self.decoder!r}")
        cst.by_name(self.constellation)


@dataclass(frozen=True)
class BerRecord:
    """One measured point of a BER sweep."""
    snr_db: float
    frames: int
    bit_errors: int
    bits: int
    ber: float
    decoder: str
    elapsed_s: float


def _frame_rng(seed, snr_key, frame_idx):
    return np.random.default_rng(
        np.random.SeedSequence((seed, snr_key, frame_idx)))


def _snr_key(snr_db):
    return int(round(snr_db * 1000.0))


def check_budget(config):
    """Raise before simulating when the decoder cannot afford the search."""
    if config.decoder == "ml":
        c = cst.by_name(config.constellation)
        required = c.order ** config.spec.l
        if required > config.ml_budget:
            raise BudgetExceededError(required, config.ml_budget)


def simulate_frame(config, snr_db, frame_idx, add_noise=True):
    """Simulate one frame end to end; returns (bit_errors, bits)."""
    spec = config.spec
    c = cst.by_name(config.constellation)
    rng = _frame_rng(config.seed, _snr_key(snr_db), frame_idx)
    snr = SnrPoint.from_db(snr_db)
    mu = power_normalizer(spec)

    bits = rng.integers(0, 2, spec.l * c.bits_per_symbol)
    s = cst.modulate(bits, c)
    x = encode(s, spec)
    h = sample_channel(rng, spec.m, config.n_rx)
    y = transmit(x, h, snr, mu, rng, add_noise=add_noise)

    if config.decoder == "ml":
        result = ml_decode(y, h, spec, c, snr, mu, budget=config.ml_budget)
    else:
        h_eq = build_equivalent_channel(spec, h)
        y_real = stack_received(y)
        if config.decoder == "zf":
            result = zf_decode(y_real, h_eq, c, snr, mu)
        elif config.decoder == "pic":
            result = pic_group_decode(y_real, h_eq, default_grouping(spec),
                                      c, snr, mu)
        else:
            result = pic_sic_decode(y_real, h_eq, default_grouping(spec),
                                    c, snr, mu)
    bits_hat = cst.hard_bits(result.s_hat, c)
    return int(np.count_nonzero(bits_hat != bits)), bits.size


def _simulate_range(args):
    config, snr_db, start, stop, add_noise = args
    errors = 0
    bits = 0
    for idx in range(start, stop):
        e, b = simulate_frame(config, snr_db, idx, add_noise)
        errors += e
        bits += b
    return errors, bits


def _run_point(config, snr_db, add_noise, pool):
    t0 = time.perf_counter()
    frames = errors = bits = 0
    if pool is None:
        while frames < config.max_frames and errors < config.target_bit_errors:
            e, b = simulate_frame(config, snr_db, frames, add_noise)
            frames += 1
            errors += e
            bits += b
    else:
        while frames < config.max_frames and errors < config.target_bit_errors:
            round_tasks = []
            for _ in range(config.workers):
                if frames >= config.max_frames:
                    break
                stop = min(frames + WORKER_CHUNK, config.max_frames)
                round_tasks.append((config, snr_db, frames, stop, add_noise))
                frames = stop
            for e, b in pool.map(_simulate_range, round_tasks):
                errors += e
                bits += b
    elapsed = time.perf_counter() - t0
    ber = errors / bits if bits else 0.0
    return BerRecord(snr_db, frames, errors, bits, ber, config.decoder, elapsed)


def run_ber_sweep(config, add_noise=True):
    """Simulate every SNR point until target_bit_errors or max_frames."""
    check_budget(config)
    records = []
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for snr_db in config.snr_db_grid:
                records.append(_run_point(config, snr_db, add_noise, pool))
    else:
        for snr_db in config.snr_db_grid:
            records.append(_run_point(config, snr_db, add_noise, None))
    return records


def estimate_diversity_slope(records, window, min_errors=100):
    """Diversity order estimate: minus the log10(BER) slope per 10 dB.

    Uses the records inside [window[0], window[1]] dB that accumulated at
    least min_errors bit errors; refuses (listing the per-point error
    counts) unless three such points exist.
    """
    lo, hi = window
    usable = [r for r in records
              if lo <= r.snr_db <= hi and r.bit_errors >= min_errors
              and r.ber > 0]
    if len(usable) < 3:
        detail = ", ".join(f"{r.snr_db:g} dB: {r.bit_errors} errors"
                           for r in records if lo <= r.snr_db <= hi)
        raise InsufficientStatisticsError(
            f"need >=3 points with >={min_errors} errors in [{lo}, {hi}] dB;"
            f" have {len(usable)} ({detail})")
    x = np.array([r.snr_db / 10.0 for r in usable])
    y = np.log10([r.ber for r in usable])
    slope = np.polyfit(x, y, 1)[0]
    return -float(slope)


RECORD_HEADER = "snr_db,frames,bit_errors,bits,ber,decoder,elapsed_s"


def write_records(path, records):
    """Append-friendly comma-separated record rows with a header line."""
    with open(path, "w") as f:
        f.write(RECORD_HEADER + "\n")
        for r in records:
            f.write(f"{r.snr_db!r},{r.frames},{r.bit_errors},{r.bits},"
                    f"{r.ber!r},{r.decoder},{r.elapsed_s!r}\n")


def read_records(path):
    records = []
    with open(path) as f:
        header = f.readline().strip()
        if header != RECORD_HEADER:
            raise ValueError(f"unrecognized record header {header!r}")
        for line in f:
            if not line.strip():
                continue
            snr, frames, errs, bits, ber, dec, elapsed = line.strip().split(",")
            records.append(BerRecord(float(snr), int(frames), int(errs),
                                     int(bits), float(ber), dec,
                                     float(elapsed)))
    return records


def write_plotdata(records, prefix):
    """One (snr_db, ber) series file per decoder, for external plotting."""
    by_decoder = {}
    for r in records:
        by_decoder.setdefault(r.decoder, []).append(r)
    paths = []
    for decoder, rows in sorted(by_decoder.items()):
        path = f"{prefix}_{decoder}.tsv"
        with open(path, "w") as f:
            f.write("snr_db\tber\n")
            for r in sorted(rows, key=lambda r: r.snr_db):
                f.write(f"{r.snr_db!r}\t{r.ber!r}\n")
        paths.append(path)
    return paths
