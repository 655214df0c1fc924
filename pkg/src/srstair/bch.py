"""Shortened binary primitive BCH component codes.

Coordinate convention: a shortened word of length ``n`` is the tail of a
length ``2^nu - 1`` word whose leading ``e`` coordinates are fixed zeros.
Word index ``c`` carries the coefficient of ``x^(n-1-c)``, so the message sits
at the high degrees and the ``nu*t`` parity bits at degrees ``nu*t-1 .. 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .galois import FieldSpec, Gf2Polynomial, bch_generator_polynomial, build_field


class CodeConstructionError(ValueError):
    pass


CORRECTED = "corrected"
FAILURE = "failure"


@dataclass(frozen=True)
class DecodeOutcome:
    status: str
    codeword: np.ndarray | None = None
    flipped_positions: tuple[int, ...] = ()

    @property
    def corrected(self) -> bool:
        return self.status == CORRECTED


@dataclass(frozen=True, eq=False)
class ComponentCode:
    field: FieldSpec
    t: int
    e: int
    n: int
    k: int
    generator: Gf2Polynomial
    # k x (n-k) parity matrix: parity = message @ P (mod 2)
    parity_matrix: np.ndarray = field(repr=False)
    # t x n table of alpha^(j*(n-1-c)) for odd j = 1, 3, .., 2t-1
    _syndrome_table: np.ndarray = field(repr=False)

    @property
    def nu(self) -> int:
        return self.field.nu

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    def describe(self) -> str:
        return f"BCH(n={self.n}, k={self.k}, t={self.t}, nu={self.nu}, e={self.e})"


def make_component_code(nu: int, t: int, n: int, field_: FieldSpec | None = None) -> ComponentCode:
    """Shortened BCH code of length ``n`` correcting ``t`` errors over GF(2^nu)."""
    gf = field_ if field_ is not None else build_field(nu)
    if gf.nu != nu:
        raise CodeConstructionError(f"field has nu={gf.nu}, expected {nu}")
    full = gf.order
    e = full - n
    if e < 0:
        raise CodeConstructionError(f"length n={n} exceeds 2^{nu}-1={full}; extended codes are not supported")
    gen = bch_generator_polynomial(gf, t)
    if gen.degree != nu * t:
        raise CodeConstructionError(
            f"generator polynomial for nu={nu}, t={t} has degree {gen.degree}, not nu*t={nu * t}"
        )
    r = gen.degree
    k = n - r
    if k < 1:
        raise CodeConstructionError(f"dimension k=n-nu*t={k} must be at least 1 (n={n}, nu={nu}, t={t})")

    parity = np.zeros((k, r), dtype=np.uint8)
    # x^d mod g for d = 0 .. n-1, stepping the division register
    rem = 1
    top = 1 << r
    for d in range(n):
        if d >= r:
            c = n - 1 - d
            for p in range(r):
                parity[c, p] = (rem >> (r - 1 - p)) & 1
        rem <<= 1
        if rem & top:
            rem ^= gen.bits
    parity.setflags(write=False)

    degrees = np.arange(n - 1, -1, -1, dtype=np.int64)
    odd = np.arange(1, 2 * t, 2, dtype=np.int64)
    table = gf.exp[(odd[:, None] * degrees[None, :]) % full]
    table.setflags(write=False)
    return ComponentCode(
        field=gf, t=t, e=e, n=n, k=k, generator=gen, parity_matrix=parity, _syndrome_table=table
    )


def encode_systematic(code: ComponentCode, message: np.ndarray) -> np.ndarray:
    """Return ``[message, parity]``; accepts a single message or a stack of rows."""
    msg = np.asarray(message, dtype=np.uint8)
    if msg.shape[-1] != code.k:
        raise ValueError(f"message length {msg.shape[-1]} != k={code.k}")
    # float32 matmul is exact here: row sums never exceed k < 2^24
    par = (msg.astype(np.float32) @ code.parity_matrix.astype(np.float32)).astype(np.int64) & 1
    return np.concatenate([msg, par.astype(np.uint8)], axis=-1)


def parity_check(code: ComponentCode, words: np.ndarray) -> np.ndarray:
    """Boolean mask (per row) of words that are codewords."""
    w = np.asarray(words, dtype=np.uint8)
    if w.shape[-1] != code.n:
        raise ValueError(f"word length {w.shape[-1]} != n={code.n}")
    par = (w[..., : code.k].astype(np.float32) @ code.parity_matrix.astype(np.float32)).astype(np.int64) & 1
    return np.all(par.astype(np.uint8) == w[..., code.k :], axis=-1)


def syndromes(code: ComponentCode, word: np.ndarray) -> list[int]:
    """Syndromes S_1 .. S_2t of a shortened word (virtual prefix taken as zeros)."""
    ones = np.flatnonzero(word)
    gf = code.field
    odd = np.bitwise_xor.reduce(code._syndrome_table[:, ones], axis=1) if ones.size else np.zeros(code.t, np.int64)
    s = [0] * (2 * code.t)
    for i, v in enumerate(odd):
        s[2 * i] = int(v)
    for j in range(2, 2 * code.t + 1, 2):
        s[j - 1] = gf.mul(s[j // 2 - 1], s[j // 2 - 1])
    return s


def berlekamp_massey(gf: FieldSpec, synd: list[int]) -> list[int]:
    """Error-locator polynomial (lowest degree first) from syndromes S_1..S_2t."""
    c, b = [1], [1]
    length, shift, last = 0, 1, 1
    for r in range(len(synd)):
        d = synd[r]
        for i in range(1, length + 1):
            if i < len(c) and c[i]:
                d ^= gf.mul(c[i], synd[r - i])
        if d == 0:
            shift += 1
            continue
        coef = gf.div(d, last)
        nxt = c + [0] * max(0, len(b) + shift - len(c))
        for i, bi in enumerate(b):
            if bi:
                nxt[i + shift] ^= gf.mul(coef, bi)
        if 2 * length <= r:
            b, last = c, d
            length = r + 1 - length
            shift = 1
        else:
            shift += 1
        c = nxt
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def chien_roots(gf: FieldSpec, locator: list[int]) -> np.ndarray:
    """Degrees d in [0, 2^nu - 1) with locator(alpha^-d) = 0."""
    order = gf.order
    d = np.arange(order, dtype=np.int64)
    acc = np.zeros(order, dtype=np.int64)
    for j, cj in enumerate(locator):
        if cj:
            acc ^= gf.exp[(int(gf.log[cj]) - j * d) % order]
    return np.flatnonzero(acc == 0)


def bdd_flips(code: ComponentCode, word: np.ndarray) -> np.ndarray | None:
    """Positions a bounded-distance decoder would flip, or None on failure."""
    synd = syndromes(code, word)
    if not any(synd):
        return np.zeros(0, dtype=np.int64)
    loc = berlekamp_massey(code.field, synd)
    deg = len(loc) - 1
    if deg > code.t:
        return None
    roots = chien_roots(code.field, loc)
    if roots.size != deg:
        return None
    if roots.max() >= code.n:
        # located error in a shortened (always-zero) coordinate
        return None
    return np.sort(code.n - 1 - roots)


def bdd_decode(code: ComponentCode, word: np.ndarray) -> DecodeOutcome:
    w = np.asarray(word, dtype=np.uint8)
    if w.shape != (code.n,):
        raise ValueError(f"word shape {w.shape} != ({code.n},)")
    flips = bdd_flips(code, w)
    if flips is None:
        return DecodeOutcome(FAILURE)
    assert flips.size <= code.t
    out = w.copy()
    out[flips] ^= 1
    return DecodeOutcome(CORRECTED, out, tuple(int(f) for f in flips))


def genie_decode(code: ComponentCode, word: np.ndarray, transmitted: np.ndarray) -> DecodeOutcome:
    """Miscorrection-free decoder: corrects iff the true error weight is at most t."""
    w = np.asarray(word, dtype=np.uint8)
    tx = np.asarray(transmitted, dtype=np.uint8)
    if w.shape != (code.n,) or tx.shape != (code.n,):
        raise ValueError(f"word/transmitted shapes {w.shape}, {tx.shape} != ({code.n},)")
    diff = np.flatnonzero(w != tx)
    if diff.size > code.t:
        return DecodeOutcome(FAILURE)
    return DecodeOutcome(CORRECTED, tx.copy(), tuple(int(f) for f in diff))
