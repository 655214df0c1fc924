"""Channel models and the Monte Carlo BER/BLER harness.

Randomness is counter-based (Philox): the stream for a trial is keyed by the
master seed and the trial index, so a trial's outcome does not depend on which
worker ran it or in what order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.special import erfc, erfcinv

from .bch import ComponentCode
from .ibdd import DecoderConfig, decode_stream
from .srsc import ChainLayout, SrscConfig, block_shape, encode_chain, total_info_bits

_U64 = (1 << 64) - 1
STREAM_INFO = 0
STREAM_NOISE = 1


def q_function(x: float) -> float:
    return 0.5 * float(erfc(x / math.sqrt(2.0)))


def q_inverse(p: float) -> float:
    return math.sqrt(2.0) * float(erfcinv(2.0 * p))


def awgn_to_bsc(ebn0_db: float, rate: float) -> float:
    """Crossover probability of hard-decision BPSK over AWGN at Eb/N0 (dB)."""
    if not 0 < rate < 1:
        raise ValueError(f"rate must be in (0, 1), got {rate}")
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    return q_function(math.sqrt(2.0 * rate * 10 ** (ebn0_db / 10.0)))


def bsc_to_awgn(p: float, rate: float) -> float:
    """Eb/N0 (dB) at which hard-decision BPSK has crossover probability p."""
    if not 0 < p < 0.5:
        raise ValueError(f"p must be in (0, 0.5), got {p}")
    if not 0 < rate < 1:
        raise ValueError(f"rate must be in (0, 1), got {rate}")
    return 10.0 * math.log10(q_inverse(p) ** 2 / (2.0 * rate))


@dataclass(frozen=True)
class ChannelSpec:
    kind: str  # "bsc" or "awgn_hard"
    value: float  # p for bsc, Eb/N0 in dB for awgn_hard
    rate: float | None = None

    def __post_init__(self):
        if self.kind not in ("bsc", "awgn_hard"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if self.kind == "bsc" and not 0 <= self.value < 0.5:
            raise ValueError(f"crossover probability must be in [0, 0.5), got {self.value}")
        if self.kind == "awgn_hard" and self.rate is None:
            raise ValueError("awgn_hard needs the code rate for the Eb/N0 conversion")

    @property
    def crossover(self) -> float:
        if self.kind == "bsc":
            return float(self.value)
        return awgn_to_bsc(self.value, float(self.rate))


def trial_generator(seed: int, trial: int, stream: int) -> np.random.Generator:
    key = np.array([seed & _U64, ((trial << 1) | stream) & _U64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def apply_channel(blocks: Sequence[np.ndarray], spec: ChannelSpec, seed: int, chain_index: int = 0):
    """Flip each bit independently; returns (noisy blocks, error masks)."""
    p = spec.crossover
    sizes = [b.size for b in blocks]
    u = trial_generator(seed, chain_index, STREAM_NOISE).random(sum(sizes))
    flat = (u < p).astype(np.uint8)
    noisy, masks, pos = [], [], 0
    for b in blocks:
        mask = flat[pos : pos + b.size].reshape(b.shape)
        pos += b.size
        masks.append(mask)
        noisy.append(np.asarray(b, dtype=np.uint8) ^ mask)
    return noisy, masks


@dataclass
class SimStats:
    bits_measured: int = 0
    bit_errors: int = 0
    blocks_measured: int = 0
    block_errors: int = 0
    trials: int = 0
    seed: int = 0
    channel_errors: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_measured if self.bits_measured else 0.0

    @property
    def bler(self) -> float:
        return self.block_errors / self.blocks_measured if self.blocks_measured else 0.0

    @property
    def ci95(self) -> float:
        """Normal-approximation 95% half-width on the BER."""
        if not self.bits_measured:
            return 0.0
        b = self.ber
        return 1.959963984540054 * math.sqrt(b * (1 - b) / self.bits_measured)

    def merge(self, other: "SimStats") -> "SimStats":
        return SimStats(
            self.bits_measured + other.bits_measured,
            self.bit_errors + other.bit_errors,
            self.blocks_measured + other.blocks_measured,
            self.block_errors + other.block_errors,
            self.trials + other.trials,
            self.seed,
            self.channel_errors + other.channel_errors,
        )

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(ber=self.ber, bler=self.bler, ci95=self.ci95)
        return d


@dataclass(frozen=True)
class StopRule:
    min_bit_errors: int = 100
    max_blocks: int = 1000

    def __post_init__(self):
        if self.min_bit_errors < 1 or self.max_blocks < 1:
            raise ValueError("stop criteria must be positive")

    def done(self, stats: SimStats) -> bool:
        return stats.bit_errors >= self.min_bit_errors or stats.blocks_measured >= self.max_blocks


def measured_blocks(cfg: SrscConfig, L: int, window: int, exclude_edges: bool = True) -> range:
    """Blocks counted in BER: decided by a full window, minus the warm-up blocks."""
    if not exclude_edges:
        return range(1, L + 1)
    return range(cfg.w, min(L - window + 1, L - cfg.w + 1) + 1)


def measured_bits(cfg: SrscConfig, L: int, window: int, exclude_edges: bool = True) -> int:
    return sum(math.prod(block_shape(cfg, i)) for i in measured_blocks(cfg, L, window, exclude_edges))


@dataclass(frozen=True)
class TrialSetup:
    cfg: SrscConfig
    codes: tuple
    channel: ChannelSpec
    dcfg: DecoderConfig
    seed: int
    exclude_edges: bool = True


def run_trial(setup: TrialSetup, trial: int, layout: ChainLayout | None = None) -> SimStats:
    cfg, L = setup.cfg, setup.cfg.L
    info = trial_generator(setup.seed, trial, STREAM_INFO).integers(0, 2, total_info_bits(cfg, L), dtype=np.uint8)
    tx = encode_chain(cfg, setup.codes, info, L)
    rx, masks = apply_channel(tx, setup.channel, setup.seed, trial)
    out = decode_stream(cfg, setup.codes, rx, setup.dcfg, transmitted=tx, layout=layout)
    stats = SimStats(trials=1, seed=setup.seed)
    for i in measured_blocks(cfg, L, setup.dcfg.window, setup.exclude_edges):
        errs = int(np.count_nonzero(out[i - 1] != tx[i - 1]))
        stats.bits_measured += tx[i - 1].size
        stats.bit_errors += errs
        stats.blocks_measured += 1
        stats.block_errors += int(errs > 0)
        stats.channel_errors += int(masks[i - 1].sum())
    return stats


_worker_setup: TrialSetup | None = None
_worker_layout: ChainLayout | None = None


def _init_worker(setup: TrialSetup) -> None:
    global _worker_setup, _worker_layout
    _worker_setup = setup
    _worker_layout = ChainLayout(setup.cfg, setup.cfg.L)


def _worker_trial(trial: int) -> SimStats:
    return run_trial(_worker_setup, trial, _worker_layout)


def default_workers() -> int:
    return int(os.environ.get("SRSC_WORKERS", "1"))


def run_montecarlo(
    cfg: SrscConfig,
    codes: Sequence[ComponentCode],
    channel: ChannelSpec,
    dcfg: DecoderConfig,
    stop: StopRule = StopRule(),
    seed: int = 0,
    workers: int | None = None,
    batch: int = 8,
    exclude_edges: bool = True,
) -> SimStats:
    """Simulate chains until the stop rule fires.

    Trials run in fixed batches of ``batch`` consecutive indices and are merged
    in index order, stopping at the first trial that satisfies ``stop``; the
    result is therefore the same for any worker count.
    """
    dcfg.check(cfg)
    if cfg.L < dcfg.window:
        raise ValueError(f"chain length L={cfg.L} must be >= window W={dcfg.window}")
    if not measured_blocks(cfg, cfg.L, dcfg.window, exclude_edges):
        raise ValueError("chain too short: no blocks in the measurement region")
    workers = default_workers() if workers is None else workers
    setup = TrialSetup(cfg, tuple(codes), channel, dcfg, seed, exclude_edges)
    total = SimStats(seed=seed)
    trial = 0
    pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(setup,)) if workers > 1 else None
    layout = ChainLayout(cfg, cfg.L)
    try:
        while not stop.done(total):
            idx = range(trial, trial + batch)
            if pool is None:
                results = [run_trial(setup, k, layout) for k in idx]
            else:
                results = list(pool.map(_worker_trial, idx))
            for res in results:
                total = total.merge(res)
                trial += 1
                if stop.done(total):
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    return total
