"""Density evolution for SR-staircase codes under miscorrection-free iBDD on the BSC."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..srsc import SrscConfig, component_length

DEFAULT_LENGTH = 128
MAX_AUTO_LENGTH = 1024


class ThresholdError(RuntimeError):
    pass


def f_poisson(lam: float, t: int, lower: int = 0) -> float:
    """1 - sum_{i=lower}^{t-1} lam^i e^-lam / i!.

    With ``lower=0`` this is P[Poisson(lam) >= t], the probability that a
    component word holding one tracked error has at least ``t`` others.
    """
    if lam < 0 or t < 1:
        raise ValueError(f"need lam >= 0 and t >= 1, got lam={lam}, t={t}")
    if lower not in (0, 1):
        raise ValueError("lower summation index must be 0 or 1")
    return _f(float(lam), int(t), int(lower))


@njit(cache=True)
def _f(lam, t, lower):
    term = math.exp(-lam)
    acc = term if lower == 0 else 0.0
    for i in range(1, t):
        term *= lam / i
        acc += term
    return 1.0 - acc


@dataclass
class DEProfile:
    x: np.ndarray
    iteration: int = 0

    @classmethod
    def initial(cls, L: int) -> "DEProfile":
        return cls(np.ones(L), 0)


@dataclass(frozen=True)
class EffectiveChannel:
    """Expected number of channel errors per component word, for each code."""

    M1: float
    M2: float

    @classmethod
    def from_config(cls, cfg: SrscConfig, p: float) -> "EffectiveChannel":
        return cls(p * component_length(cfg, 1), p * component_length(cfg, 2))


def de_step(profile: DEProfile, channel: EffectiveChannel, t1: int, t2: int, w: int, lower: int = 0) -> DEProfile:
    """One in-place left-to-right DE iteration (reference implementation).

    Position ``i`` (1-based, even -> code 1) sees the updated values of its
    left neighbours and the previous iteration of its right neighbours;
    positions outside ``[1, L]`` are zero.
    """
    x = profile.x.astype(float).copy()
    L = x.size
    if w > 2 and (channel.M1 != channel.M2):
        raise ValueError("w > 2 needs m1 = m2 and q1 = q2 (equal effective channels)")
    for i in range(1, L + 1):
        even = i % 2 == 0
        M, t = (channel.M1, t1) if even else (channel.M2, t2)
        s = 0.0
        for j in range(1, w):
            if i - j >= 1:
                s += x[i - j - 1]
            if i + j <= L:
                s += x[i + j - 1]
        x[i - 1] = _f(M / (2 * (w - 1)) * s, t, lower)
    return DEProfile(x, profile.iteration + 1)


@njit(cache=True)
def _run_de(p, n1, n2, t1, t2, w, L, lower, max_iterations, zero_tol, stall_tol):
    # returns (converged_to_zero, iterations, final max)
    off = w
    x = np.zeros(L + 2 * w)
    for i in range(L):
        x[off + i] = 1.0
    M1 = p * n1
    M2 = p * n2
    scale = 1.0 / (2 * (w - 1))
    for it in range(1, max_iterations + 1):
        change = 0.0
        top = 0.0
        for i in range(1, L + 1):
            if i % 2 == 0:
                M = M1
                t = t1
            else:
                M = M2
                t = t2
            s = 0.0
            for j in range(1, w):
                s += x[off + i - 1 - j] + x[off + i - 1 + j]
            v = _f(M * scale * s, t, lower)
            d = abs(v - x[off + i - 1])
            if d > change:
                change = d
            if v > top:
                top = v
            x[off + i - 1] = v
        if top < zero_tol:
            return True, it, top
        if change < stall_tol:
            return False, it, top
    return False, max_iterations, top


@dataclass(frozen=True)
class DESettings:
    lower: int = 0
    max_iterations: int = 100_000
    zero_tol: float = 1e-9
    stall_tol: float = 1e-12


def de_converges(cfg: SrscConfig, p: float, L: int, settings: DESettings = DESettings()) -> bool:
    """True when the DE profile of an L-block chain is driven to zero at crossover p."""
    n1, n2, t1, t2, w = _de_params(cfg)
    ok, _, _ = _run_de(p, n1, n2, t1, t2, w, L, settings.lower, settings.max_iterations,
                       settings.zero_tol, settings.stall_tol)
    return bool(ok)


def _de_params(cfg: SrscConfig):
    if cfg.w < 2:
        raise ValueError("coupling width must be >= 2")
    if cfg.w > 2 and (cfg.m1 != cfg.m2 or cfg.q1 != cfg.q2):
        raise ValueError(f"w={cfg.w} > 2 requires m1 = m2 and q1 = q2")
    return component_length(cfg, 1), component_length(cfg, 2), cfg.t1, cfg.t2, cfg.w


def _bisect(cfg: SrscConfig, L: int, tol: float, settings: DESettings, lo: float, hi: float) -> float:
    if not de_converges(cfg, lo, L, settings):
        raise ThresholdError(f"DE does not converge even at p={lo}; threshold is outside the search range")
    if de_converges(cfg, hi, L, settings):
        raise ThresholdError(f"DE converges at p={hi}; threshold is outside the search range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if de_converges(cfg, mid, L, settings):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class ThresholdResult:
    p_bar: float
    length: int
    history: tuple[tuple[int, float], ...] = field(default=())

    def __float__(self) -> float:
        return self.p_bar


def threshold_search(
    cfg: SrscConfig,
    tol: float = 1e-7,
    length: int | str = "auto",
    length_tol: float = 2e-6,
    settings: DESettings = DESettings(),
    search_range: tuple[float, float] = (1e-6, 0.5),
) -> ThresholdResult:
    """BSC threshold by bisection on p.

    ``length="auto"`` starts from 128 blocks and doubles the chain until the
    threshold moves by less than ``length_tol`` (capped at 1024 blocks).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = search_range
    if length != "auto":
        L = int(length)
        p = _bisect(cfg, L, tol, settings, lo, hi)
        return ThresholdResult(p, L, ((L, p),))
    L = DEFAULT_LENGTH
    prev = _bisect(cfg, L, tol, settings, lo, hi)
    history = [(L, prev)]
    while L < MAX_AUTO_LENGTH:
        L *= 2
        cur = _bisect(cfg, L, tol, settings, lo, hi)
        history.append((L, cur))
        if abs(cur - prev) < length_tol:
            return ThresholdResult(cur, L, tuple(history))
        prev = cur
    return ThresholdResult(prev, L, tuple(history))
