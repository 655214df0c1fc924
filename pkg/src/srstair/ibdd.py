"""Sliding-window iterative bounded-distance decoding of SR-staircase chains."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bch import ComponentCode, bdd_flips
from .srsc import ChainLayout, SrscConfig, code_at

TRUE_IBDD = "true_ibdd"
MISCORRECTION_FREE = "miscorrection_free"
MODE_ALIASES = {"ibdd": TRUE_IBDD, "mf": MISCORRECTION_FREE, TRUE_IBDD: TRUE_IBDD, MISCORRECTION_FREE: MISCORRECTION_FREE}
SCHEDULES = ("newest_first", "oldest_first")


@dataclass(frozen=True)
class DecoderConfig:
    window: int = 7
    max_iterations: int = 8
    mode: str = TRUE_IBDD
    schedule: str = "newest_first"
    skip_clean: bool = True

    def __post_init__(self):
        if self.mode not in MODE_ALIASES:
            raise ValueError(f"unknown decoding mode {self.mode!r}")
        object.__setattr__(self, "mode", MODE_ALIASES[self.mode])
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}; choose from {SCHEDULES}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    def check(self, cfg: SrscConfig) -> None:
        if self.window < cfg.w:
            raise ValueError(f"window W={self.window} must be >= coupling width w={cfg.w}")


class WindowDecoder:
    """Decoder state over one received chain.

    The working buffer covers the whole chain; the window is the block range
    ``[start, start + W - 1]``.  Blocks before ``start`` have been emitted and
    are never touched again.
    """

    def __init__(
        self,
        cfg: SrscConfig,
        codes: Sequence[ComponentCode],
        received: Sequence[np.ndarray],
        dcfg: DecoderConfig,
        transmitted: Sequence[np.ndarray] | None = None,
        layout: ChainLayout | None = None,
    ):
        dcfg.check(cfg)
        L = len(received)
        if L < dcfg.window:
            raise ValueError(f"chain length {L} is shorter than the window W={dcfg.window}")
        if dcfg.mode == MISCORRECTION_FREE and transmitted is None:
            raise ValueError("miscorrection-free decoding needs the transmitted chain")
        self.cfg, self.codes, self.dcfg = cfg, codes, dcfg
        self.layout = layout if layout is not None and layout.L == L else ChainLayout(cfg, L)
        self.L = L
        self.buf = self.layout.pack(received)
        self.tx = self.layout.pack(transmitted) if transmitted is not None else None
        self.dirty = np.ones(self.layout.num_codewords, dtype=bool)
        self.start = 1
        self.sweeps = 0

    @property
    def end(self) -> int:
        return min(self.start + self.dcfg.window - 1, self.L)

    def active_times(self) -> range:
        """Times whose codewords lie wholly inside the window (or on known zeros)."""
        lo = 1 if self.start == 1 else self.start + self.cfg.w - 1
        return range(lo, self.end + 1)

    def _decode_codeword(self, i: int, r: int, code: ComponentCode, guard: bool) -> int:
        idx = self.layout.codeword_indices(i)[r]
        word = self.buf[idx]
        if self.tx is not None and self.dcfg.mode == MISCORRECTION_FREE:
            flips = np.flatnonzero(word != self.tx[idx])
            if flips.size > code.t:
                return 0
        else:
            flips = bdd_flips(code, word)
            if flips is None:
                return 0
        if flips.size == 0:
            return 0
        pos = idx[flips]
        if guard and (pos < self.layout.chain_start).any():
            # would flip a known pre-chain zero: treat as a decoding failure
            return 0
        self.buf[pos] ^= 1
        others = self.layout.bit_codewords[pos].ravel()
        self.dirty[others[others >= 0]] = True
        self.dirty[self.layout.cw_offset[i] + r] = False
        return int(flips.size)

    def sweep(self) -> int:
        """One pass over the active codewords; returns the number of bit flips."""
        times = list(self.active_times())
        if self.dcfg.schedule == "newest_first":
            times.reverse()
        flips = 0
        for i in times:
            code = code_at(self.codes, i)
            base = self.layout.cw_offset[i]
            guard = i < self.cfg.w
            for r in range(self.layout.shapes[i][0]):
                if self.dcfg.skip_clean and not self.dirty[base + r]:
                    continue
                self.dirty[base + r] = False
                flips += self._decode_codeword(i, r, code, guard)
        self.sweeps += 1
        return flips

    def iterate(self, max_iterations: int | None = None) -> int:
        """Sweep until nothing changes or the budget runs out; returns sweeps used."""
        budget = self.dcfg.max_iterations if max_iterations is None else max_iterations
        for it in range(1, budget + 1):
            if self.sweep() == 0:
                return it
        return budget

    def decode_window_position(self) -> np.ndarray:
        """Iterate at the current position, emit the oldest block, shift by one."""
        if self.start > self.L:
            raise StopIteration("all blocks already decided")
        self.iterate()
        out = self.block(self.start)
        self.start += 1
        return out

    def block(self, i: int) -> np.ndarray:
        return self.buf[self.layout.block_slice(i)].reshape(self.layout.shapes[i]).copy()

    def run(self) -> list[np.ndarray]:
        return [self.decode_window_position() for _ in range(self.start, self.L + 1)]


def decode_stream(
    cfg: SrscConfig,
    codes: Sequence[ComponentCode],
    received: Sequence[np.ndarray],
    dcfg: DecoderConfig,
    transmitted: Sequence[np.ndarray] | None = None,
    layout: ChainLayout | None = None,
) -> list[np.ndarray]:
    """Window-decode a whole chain; the tail is finished on the shrinking residual window."""
    return WindowDecoder(cfg, codes, received, dcfg, transmitted, layout).run()
