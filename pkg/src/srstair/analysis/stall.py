"""Stall patterns and the error-floor estimate under miscorrection-free iBDD."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..srsc import SrscConfig, block_shape, future_destination, _phi


class SearchBudgetExceeded(RuntimeError):
    pass


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def s_min_w2(t1: int, t2: int, q1: int, q2: int) -> int:
    """Exact minimum stall-pattern size for coupling width 2."""
    if min(t1, t2, q1, q2) < 1:
        raise ValueError("all parameters must be >= 1")
    a = max(_ceil_div(t2 + 1, q1) * (t1 + 1), _ceil_div(t1 + 1, q1) * (t2 + 1))
    b = max(_ceil_div(t1 + 1, q2) * (t2 + 1), _ceil_div(t2 + 1, q2) * (t1 + 1))
    return min(a, b)


def s_min_lb_wide(t1: int, t2: int) -> int:
    """Lower bound on the minimum stall size for w >= q + 1."""
    t = min(t1, t2)
    return (t + 1) * (t + 2) // 2


def lemma1_strict(q: int, w: int, t1: int, t2: int) -> bool:
    """Whether the wide-coupling lower bound is known to be strict."""
    if w < q + 1:
        raise ValueError(f"only defined for w >= q + 1 (got q={q}, w={w})")
    t = min(t1, t2)
    if t >= q:
        return True
    return t + 1 <= q and w <= (int(t1 != t2) + 1) * (t + 1)


def ber_floor(p: float, s_min: int, A_min: float, block_size: float) -> float:
    """Union-bound error floor s_min * A_min * p^s_min / block_size."""
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if s_min < 1 or block_size <= 0 or A_min < 0:
        raise ValueError("need s_min >= 1, block_size > 0, A_min >= 0")
    return min(1.0, s_min * A_min * p**s_min / block_size)


@dataclass(frozen=True)
class StallReport:
    s_min: int
    exact: bool
    lemma1_strict: bool | None
    A_min: float | None
    block_size: float
    floors: tuple[tuple[float, float], ...] = ()


def mean_block_size(cfg: SrscConfig) -> float:
    sizes = [r * c for r, c in (block_shape(cfg, 1), block_shape(cfg, 2))]
    return sum(sizes) / 2


def stall_report(cfg: SrscConfig, ps=(), A_min: float | None = None) -> StallReport:
    if cfg.w == 2:
        s, exact, strict = s_min_w2(cfg.t1, cfg.t2, cfg.q1, cfg.q2), True, None
    else:
        if cfg.m1 != cfg.m2 or cfg.q1 != cfg.q2:
            raise ValueError("w > 2 requires m1 = m2 and q1 = q2")
        if cfg.w < cfg.q1 + 1:
            raise ValueError(f"stall analysis covers w = 2 or w >= q + 1 only (q={cfg.q1}, w={cfg.w})")
        s, exact = s_min_lb_wide(cfg.t1, cfg.t2), False
        strict = lemma1_strict(cfg.q1, cfg.w, cfg.t1, cfg.t2)
    size = mean_block_size(cfg)
    floors = tuple((p, ber_floor(p, s, A_min, size)) for p in ps) if A_min is not None else ()
    return StallReport(s, exact, strict, A_min, size, floors)


# --- exhaustive oracle -----------------------------------------------------------


@dataclass
class StallSearchResult:
    size: int
    witness: tuple[tuple[int, int, int], ...]  # (time, row, col) of each error bit
    block_time: int
    count: int | None = None  # minimal patterns whose earliest bit is in B_block_time
    nodes: int = 0
    per_time: dict = field(default_factory=dict)


class _StallGeometry:
    def __init__(self, cfg: SrscConfig, block_time: int, span: int):
        self.bits: list[tuple[int, int, int]] = []
        self.cw_of: list[tuple[int, int]] = []
        cw_ids: dict[tuple[int, int], int] = {}
        need: list[int] = []
        for j in range(block_time, block_time + span):
            rows, cols = block_shape(cfg, j)
            for r in range(rows):
                for c in range(cols):
                    ft, fr, _ = future_destination(cfg, j, r, c)
                    ids = []
                    for key in ((j, r), (ft, fr)):
                        if key not in cw_ids:
                            cw_ids[key] = len(need)
                            need.append(cfg.t(_phi(key[0])) + 1)
                        ids.append(cw_ids[key])
                    self.bits.append((j, r, c))
                    self.cw_of.append((ids[0], ids[1]))
        self.need = need
        self.members: list[list[int]] = [[] for _ in need]
        for b, (u, v) in enumerate(self.cw_of):
            self.members[u].append(b)
            self.members[v].append(b)
        self.first_block_bits = sum(1 for b in self.bits if b[0] == block_time)


def _search(geo: _StallGeometry, limit: int, want_all: bool, budget: int, nodes: list[int]):
    """All (or the first) stall sets of exactly ``limit`` bits, canonical by min index."""
    found: list[frozenset] = []
    counts = [0] * len(geo.need)
    chosen: list[int] = []
    seen: set[frozenset] = set()

    def dfs(floor: int) -> bool:
        nodes[0] += 1
        if nodes[0] > budget:
            raise SearchBudgetExceeded(f"stall search exceeded {budget} nodes")
        key = frozenset(chosen)
        if key in seen:
            return False
        seen.add(key)
        deficit_total, best_cands = 0, None
        max_def = 0
        for b in chosen:
            for cw in geo.cw_of[b]:
                d = geo.need[cw] - counts[cw]
                if d > 0:
                    max_def = max(max_def, d)
        touched = {cw for b in chosen for cw in geo.cw_of[b]}
        deficits = {cw: geo.need[cw] - counts[cw] for cw in touched if counts[cw] < geo.need[cw]}
        if not deficits:
            found.append(key)
            return not want_all
        deficit_total = sum(deficits.values())
        remaining = limit - len(chosen)
        if max(max_def, _ceil_div(deficit_total, 2)) > remaining:
            return False
        for cw in deficits:
            cands = [b for b in geo.members[cw] if b > floor and b not in key]
            if len(cands) < deficits[cw]:
                return False
            if best_cands is None or len(cands) < len(best_cands):
                best_cands = cands
        for b in best_cands:
            chosen.append(b)
            for cw in geo.cw_of[b]:
                counts[cw] += 1
            stop = dfs(floor)
            for cw in geo.cw_of[b]:
                counts[cw] -= 1
            chosen.pop()
            if stop:
                return True
        return False

    for b0 in range(geo.first_block_bits):
        chosen.append(b0)
        for cw in geo.cw_of[b0]:
            counts[cw] += 1
        stop = dfs(b0)
        for cw in geo.cw_of[b0]:
            counts[cw] -= 1
        chosen.pop()
        if stop:
            break
    return found


def brute_force_smin(
    cfg: SrscConfig,
    block_time: int | None = None,
    max_size: int = 12,
    span: int = 2,
    count: bool = False,
    budget: int = 5_000_000,
) -> StallSearchResult:
    """Smallest error set in ``span`` consecutive blocks on which every touched
    component word holds more than t errors.

    The earliest bit must lie in ``B_block_time``.  When ``block_time`` is None
    both an even and an odd starting time are searched and the smaller result
    is returned.  ``count=True`` also enumerates all minimum patterns.
    Dimensions of each block must be small: this is an exhaustive search.
    """
    if cfg.w != 2:
        raise ValueError("the exhaustive stall oracle handles w = 2 only")
    times = [block_time] if block_time is not None else [2, 3]
    best: StallSearchResult | None = None
    per_time = {}
    for i in times:
        if i < 1:
            raise ValueError("block_time must be >= 1")
        geo = _StallGeometry(cfg, i, span)
        if len(geo.bits) > 4096:
            raise SearchBudgetExceeded(f"toy geometry too large ({len(geo.bits)} bits)")
        nodes = [0]
        res = None
        for s in range(1, max_size + 1):
            found = _search(geo, s, count, budget, nodes)
            if found:
                witness = tuple(geo.bits[b] for b in sorted(found[0]))
                res = StallSearchResult(s, witness, i, len(set(found)) if count else None, nodes[0])
                break
        if res is None:
            raise SearchBudgetExceeded(f"no stall pattern of size <= {max_size} starting at time {i}")
        per_time[i] = res.size
        if best is None or res.size < best.size:
            best = res
    best.per_time = per_time
    return best
