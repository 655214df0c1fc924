"""SR-staircase code construction.

Time indices ``i`` start at 1 and blocks at times ``<= 0`` are all-zero known
state.  Row and column indices inside blocks and codewords are 0-based.
Codeword columns returned by :func:`incidence` are full-length coordinates
(``0 .. 2^nu - 2``), so the first ``e`` of them are the virtual shortened bits.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .bch import ComponentCode, encode_systematic, make_component_code, parity_check


class ConfigError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class SrscConfig:
    nu1: int
    nu2: int
    t1: int
    t2: int
    m1: int
    m2: int
    q1: int = 1
    q2: int = 1
    w: int = 2
    L: int = 1

    @classmethod
    def symmetric(cls, nu: int, t: int, m: int, q: int = 1, w: int = 2, L: int = 1, t2: int | None = None):
        return cls(nu, nu, t, t if t2 is None else t2, m, m, q, q, w, L)

    def with_length(self, L: int) -> "SrscConfig":
        return replace(self, L=L)

    def nu(self, j: int) -> int:
        return self.nu1 if j == 1 else self.nu2

    def t(self, j: int) -> int:
        return self.t1 if j == 1 else self.t2

    def m(self, j: int) -> int:
        return self.m1 if j == 1 else self.m2

    def q(self, j: int) -> int:
        return self.q1 if j == 1 else self.q2

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("nu1", "nu2", "t1", "t2", "m1", "m2", "q1", "q2", "w", "L")}


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.message}"


def phi(i: int) -> int:
    """1 for even times, 2 for odd times."""
    if i < 0:
        raise ValueError(f"time index must be >= 0, got {i}")
    return (3 - (-1) ** i) // 2


def _phi(i: int) -> int:
    # parity map extended to the negative pre-chain times
    return 1 if i % 2 == 0 else 2


def component_length(cfg: SrscConfig, j: int) -> int:
    """Shortened length n_j = m_j + m_j * q_other / q_j (integer division assumed valid)."""
    other = 2 if j == 1 else 1
    return cfg.m(j) + cfg.m(j) * cfg.q(other) // cfg.q(j)


def shortening(cfg: SrscConfig, j: int) -> int:
    return (1 << cfg.nu(j)) - 1 - component_length(cfg, j)


def component_dimension(cfg: SrscConfig, j: int) -> int:
    return component_length(cfg, j) - cfg.nu(j) * cfg.t(j)


def block_shape(cfg: SrscConfig, i: int) -> tuple[int, int]:
    prev = _phi(i - 1)
    return cfg.m(prev) // cfg.q(prev), cfg.m(_phi(i))


def coupled_width(cfg: SrscConfig, i: int) -> int:
    j = _phi(i)
    return cfg.m(j) * cfg.q(_phi(i - 1)) // cfg.q(j)


def info_width(cfg: SrscConfig, i: int) -> int:
    return component_dimension(cfg, _phi(i)) - coupled_width(cfg, i)


def info_bits_per_block(cfg: SrscConfig, i: int) -> int:
    return block_shape(cfg, i)[0] * info_width(cfg, i)


def total_info_bits(cfg: SrscConfig, L: int | None = None) -> int:
    L = cfg.L if L is None else L
    return sum(info_bits_per_block(cfg, i) for i in range(1, L + 1))


def validate_config(cfg: SrscConfig, *, check_codes: bool = True) -> list[Violation]:
    """Every broken construction rule; an empty list means the config is usable."""
    out: list[Violation] = []

    def bad(rule, msg):
        out.append(Violation(rule, msg))

    for name in ("nu1", "nu2", "t1", "t2", "m1", "m2", "q1", "q2", "L"):
        if getattr(cfg, name) < 1:
            bad("positive", f"{name}={getattr(cfg, name)} must be >= 1")
    if cfg.w < 2:
        bad("coupling-width", f"w={cfg.w} must be >= 2")
    if out:
        return out
    for j in (1, 2):
        if not 3 <= cfg.nu(j) <= 16:
            bad("field", f"nu{j}={cfg.nu(j)} outside 3..16")
    if cfg.m1 % cfg.q1:
        bad("subblock-divisible", f"m1={cfg.m1} not divisible by q1={cfg.q1}")
    if cfg.m2 % cfg.q2:
        bad("subblock-divisible", f"m2={cfg.m2} not divisible by q2={cfg.q2}")
    if (cfg.m1 * cfg.q2) % cfg.q1:
        bad("coupled-width-integral", f"m1*q2={cfg.m1 * cfg.q2} not divisible by q1={cfg.q1}")
    if (cfg.m2 * cfg.q1) % cfg.q2:
        bad("coupled-width-integral", f"m2*q1={cfg.m2 * cfg.q1} not divisible by q2={cfg.q2}")
    for j in (1, 2):
        if cfg.m(j) % (cfg.w - 1):
            bad("coupling-divisible", f"m{j}={cfg.m(j)} not divisible by w-1={cfg.w - 1}")
    if cfg.w > 2 and (cfg.m1 != cfg.m2 or cfg.q1 != cfg.q2):
        bad("wide-coupling-symmetric", f"w={cfg.w} > 2 requires m1 = m2 and q1 = q2")
    for j in (1, 2):
        if not 3 <= cfg.nu(j) <= 16:
            continue
        n = component_length(cfg, j)
        if n > (1 << cfg.nu(j)) - 1:
            bad("component-length", f"n{j}={n} exceeds 2^nu{j}-1={(1 << cfg.nu(j)) - 1}")
            continue
        k = component_dimension(cfg, j)
        i = 2 if j == 1 else 1
        if k - coupled_width(cfg, i) < 0:
            bad("information-width", f"k{j}={k} is smaller than the coupled width {coupled_width(cfg, i)}")
        if check_codes and k >= 1:
            try:
                make_component_code(cfg.nu(j), cfg.t(j), n)
            except ValueError as exc:
                bad("component-code", f"C{j}: {exc}")
    return out


def check_config(cfg: SrscConfig) -> None:
    violations = validate_config(cfg)
    if violations:
        raise ConfigError(violations)


def rate(cfg: SrscConfig) -> Fraction:
    return 1 - (Fraction(cfg.nu1 * cfg.t1, cfg.m1) + Fraction(cfg.nu2 * cfg.t2, cfg.m2)) / 2


def make_codes(cfg: SrscConfig) -> tuple[ComponentCode, ComponentCode]:
    """Component codes (C1, C2); C1 protects even times, C2 odd times."""
    check_config(cfg)
    c1 = make_component_code(cfg.nu1, cfg.t1, component_length(cfg, 1))
    if (cfg.nu2, cfg.t2, component_length(cfg, 2)) == (cfg.nu1, cfg.t1, c1.n):
        return c1, c1
    return c1, make_component_code(cfg.nu2, cfg.t2, component_length(cfg, 2))


def code_at(codes: Sequence[ComponentCode], i: int) -> ComponentCode:
    return codes[_phi(i) - 1]


# --- interleaver -------------------------------------------------------------


def transform_index(cfg: SrscConfig, time: int, r: int, c: int) -> tuple[int, int]:
    """Position of bit (r, c) of B_time inside the rearranged block."""
    rows, cols = block_shape(cfg, time)
    if not (0 <= r < rows and 0 <= c < cols):
        raise IndexError(f"({r}, {c}) outside {rows}x{cols} block at time {time}")
    s = cols // cfg.q(_phi(time))
    return c % s, (c // s) * rows + r


def inverse_transform_index(cfg: SrscConfig, time: int, a: int, b: int) -> tuple[int, int]:
    rows, cols = block_shape(cfg, time)
    q = cfg.q(_phi(time))
    s = cols // q
    if not (0 <= a < s and 0 <= b < q * rows):
        raise IndexError(f"({a}, {b}) outside {s}x{q * rows} rearranged block at time {time}")
    return b % rows, (b // rows) * s + a


def transform_block(cfg: SrscConfig, block: np.ndarray, time: int) -> np.ndarray:
    """Split B_time column-wise into q sub-blocks, transpose each, concatenate."""
    rows, cols = block_shape(cfg, time)
    block = np.asarray(block)
    if block.shape != (rows, cols):
        raise ValueError(f"block at time {time} must be {rows}x{cols}, got {block.shape}")
    q = cfg.q(_phi(time))
    s = cols // q
    return block.reshape(rows, q, s).transpose(2, 1, 0).reshape(s, q * rows)


def inverse_transform_block(cfg: SrscConfig, rearranged: np.ndarray, time: int) -> np.ndarray:
    rows, cols = block_shape(cfg, time)
    q = cfg.q(_phi(time))
    s = cols // q
    rearranged = np.asarray(rearranged)
    if rearranged.shape != (s, q * rows):
        raise ValueError(f"rearranged block at time {time} must be {s}x{q * rows}, got {rearranged.shape}")
    return rearranged.reshape(s, q, rows).transpose(2, 1, 0).reshape(rows, cols)


def zero_block(cfg: SrscConfig, i: int) -> np.ndarray:
    return np.zeros(block_shape(cfg, i), dtype=np.uint8)


def coupled_segment(cfg: SrscConfig, history: Callable[[int], np.ndarray] | dict, i: int) -> np.ndarray:
    """The coupled part of the message matrix at time i.

    ``history`` maps a time index to its block (a dict or a callable); times
    not present are taken as zero blocks.
    """
    get = history if callable(history) else (lambda j: history.get(j))
    rows = block_shape(cfg, i)[0]
    cw = coupled_width(cfg, i)
    sw = cw // (cfg.w - 1)
    out = np.zeros((rows, cw), dtype=np.uint8)
    for l in range(1, cfg.w):
        j = i - l
        blk = get(j) if j >= 1 else None
        if blk is None:
            continue
        rearranged = transform_block(cfg, blk, j)
        out[:, (l - 1) * sw : l * sw] = rearranged[:, (l - 1) * sw : l * sw]
    return out


def encode_block(
    cfg: SrscConfig,
    codes: Sequence[ComponentCode],
    history: Callable[[int], np.ndarray] | dict,
    info: np.ndarray,
    i: int,
) -> np.ndarray:
    """Encode B_i from the preceding w-1 blocks and an info matrix."""
    code = code_at(codes, i)
    rows, cols = block_shape(cfg, i)
    info = np.asarray(info, dtype=np.uint8)
    if info.shape != (rows, info_width(cfg, i)):
        raise ValueError(f"info at time {i} must be {rows}x{info_width(cfg, i)}, got {info.shape}")
    coupled = coupled_segment(cfg, history, i)
    cw = encode_systematic(code, np.concatenate([coupled, info], axis=1))
    return np.ascontiguousarray(cw[:, coupled.shape[1] :])


def encode_chain(cfg: SrscConfig, codes: Sequence[ComponentCode], info_stream, L: int | None = None) -> list[np.ndarray]:
    """Encode B_1 .. B_L, consuming information bits in time, row, column order."""
    L = cfg.L if L is None else L
    bits = np.asarray(info_stream, dtype=np.uint8).ravel()
    need = total_info_bits(cfg, L)
    if bits.size < need:
        raise ValueError(f"information source exhausted: chain needs {need} bits, got {bits.size}")
    blocks: list[np.ndarray] = []
    pos = 0
    for i in range(1, L + 1):
        rows = block_shape(cfg, i)[0]
        width = info_width(cfg, i)
        info = bits[pos : pos + rows * width].reshape(rows, width)
        pos += rows * width
        history = {j: blocks[j - 1] for j in range(max(1, i - cfg.w + 1), i)}
        blocks.append(encode_block(cfg, codes, history, info, i))
    return blocks


def extract_info(cfg: SrscConfig, blocks: Sequence[np.ndarray]) -> np.ndarray:
    """Inverse of the bit consumption order of :func:`encode_chain`."""
    parts = [np.asarray(b)[:, : info_width(cfg, i)].ravel() for i, b in enumerate(blocks, start=1)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)


def codeword_matrix(cfg: SrscConfig, blocks: Sequence[np.ndarray], i: int) -> np.ndarray:
    """Shortened codeword rows [coupled segment, B_i] at time i (1-based)."""
    hist = {j: blocks[j - 1] for j in range(max(1, i - cfg.w + 1), i)}
    return np.concatenate([coupled_segment(cfg, hist, i), np.asarray(blocks[i - 1])], axis=1)


def audit_chain(cfg: SrscConfig, codes: Sequence[ComponentCode], blocks: Sequence[np.ndarray]) -> list[tuple[int, int]]:
    """(time, row) pairs whose codeword row fails its component parity check."""
    failures = []
    for i in range(1, len(blocks) + 1):
        ok = parity_check(code_at(codes, i), codeword_matrix(cfg, blocks, i))
        failures.extend((i, int(r)) for r in np.flatnonzero(~ok))
    return failures


# --- incidences ---------------------------------------------------------------


@dataclass(frozen=True)
class CodewordCoord:
    time: int
    row: int
    column: int


@dataclass(frozen=True)
class BitIncidence:
    current: CodewordCoord
    future: CodewordCoord | None

    @property
    def incidences(self) -> tuple[CodewordCoord, ...]:
        return (self.current,) if self.future is None else (self.current, self.future)


def future_destination(cfg: SrscConfig, i: int, r: int, c: int) -> tuple[int, int, int]:
    """(time, codeword row, coupled column) where bit (r, c) of B_i is re-encoded."""
    a, b = transform_index(cfg, i, r, c)
    sw = coupled_width(cfg, i + 1) // (cfg.w - 1)
    return i + 1 + b // sw, a, b


def incidence(cfg: SrscConfig, i: int, r: int, c: int, L: int | None = None) -> BitIncidence:
    L = cfg.L if L is None else L
    if i < 1:
        raise IndexError(f"time index must be >= 1, got {i}")
    rows, cols = block_shape(cfg, i)
    if not (0 <= r < rows and 0 <= c < cols):
        raise IndexError(f"({r}, {c}) outside {rows}x{cols} block at time {i}")
    cur = CodewordCoord(i, r, shortening(cfg, _phi(i)) + coupled_width(cfg, i) + c)
    ft, fr, fc = future_destination(cfg, i, r, c)
    fut = CodewordCoord(ft, fr, shortening(cfg, _phi(ft)) + fc) if ft <= L else None
    return BitIncidence(cur, fut)


def expand_to_staircase(cfg: SrscConfig, blocks: Sequence[np.ndarray]) -> list[tuple[np.ndarray, np.ndarray]]:
    """Replicate each block q times vertically, giving conventional staircase pairs.

    Returns ``(rearranged_prev_star, block_star)`` for each time; every row of
    their horizontal concatenation is a component codeword.
    """
    if cfg.w != 2 or cfg.q1 != cfg.q2:
        raise ValueError("staircase expansion needs w = 2 and q1 = q2")
    q = cfg.q1
    out = []
    for i, blk in enumerate(blocks, start=1):
        prev = blocks[i - 2] if i >= 2 else zero_block(cfg, i - 1)
        pi_prev = transform_block(cfg, prev, i - 1)
        out.append((np.tile(pi_prev, (q, 1)), np.tile(np.asarray(blk), (q, 1))))
    return out


class ChainLayout:
    """Flat-buffer view of a terminated chain, used by the window decoder.

    The buffer holds the w-1 zero blocks at times 2-w .. 0 followed by
    B_1 .. B_L, each row-major.  Codeword ``(i, r)`` has id
    ``cw_offset[i] + r``.
    """

    def __init__(self, cfg: SrscConfig, L: int | None = None):
        self.cfg = cfg
        self.L = cfg.L if L is None else L
        self.first_time = 2 - cfg.w
        self.shapes = {i: block_shape(cfg, i) for i in range(self.first_time, self.L + 1)}
        self.offsets: dict[int, int] = {}
        pos = 0
        for i in range(self.first_time, self.L + 1):
            self.offsets[i] = pos
            pos += self.shapes[i][0] * self.shapes[i][1]
        self.size = pos
        self.chain_start = self.offsets[1]
        self.cw_offset: dict[int, int] = {}
        cid = 0
        for i in range(1, self.L + 1):
            self.cw_offset[i] = cid
            cid += self.shapes[i][0]
        self.num_codewords = cid

    def block_slice(self, i: int) -> slice:
        r, c = self.shapes[i]
        return slice(self.offsets[i], self.offsets[i] + r * c)

    def pack(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        buf = np.zeros(self.size, dtype=np.uint8)
        for i, blk in enumerate(blocks, start=1):
            buf[self.block_slice(i)] = np.asarray(blk, dtype=np.uint8).ravel()
        return buf

    def unpack(self, buf: np.ndarray) -> list[np.ndarray]:
        return [buf[self.block_slice(i)].reshape(self.shapes[i]).copy() for i in range(1, self.L + 1)]

    def codeword_indices(self, i: int) -> np.ndarray:
        return self._cw_index[i]

    @cached_property
    def _cw_index(self) -> dict[int, np.ndarray]:
        cfg = self.cfg
        out = {}
        for i in range(1, self.L + 1):
            rows, cols = self.shapes[i]
            cw = coupled_width(cfg, i)
            sw = cw // (cfg.w - 1)
            j = np.arange(cw)
            src = i - 1 - j // sw
            a = np.arange(rows)[:, None]
            src_rows = np.array([self.shapes[s][0] for s in src])
            src_cols = np.array([self.shapes[s][1] for s in src])
            src_off = np.array([self.offsets[s] for s in src])
            rr = j % src_rows
            cc = (j // src_rows) * rows + a  # s_src == rows at time i
            coupled = src_off + rr * src_cols + cc
            own = self.offsets[i] + np.arange(rows)[:, None] * cols + np.arange(cols)[None, :]
            out[i] = np.ascontiguousarray(np.concatenate([coupled, own], axis=1).astype(np.int64))
        return out

    @cached_property
    def bit_codewords(self) -> np.ndarray:
        """(size, 2) array of codeword ids (current, future) per flat bit; -1 if absent."""
        out = np.full((self.size, 2), -1, dtype=np.int64)
        for i in range(1, self.L + 1):
            idx = self._cw_index[i]
            cw = coupled_width(self.cfg, i)
            ids = self.cw_offset[i] + np.arange(idx.shape[0])[:, None]
            out[idx[:, cw:], 0] = np.broadcast_to(ids, idx[:, cw:].shape)
            out[idx[:, :cw], 1] = np.broadcast_to(ids, idx[:, :cw].shape)
        return out
