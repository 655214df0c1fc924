"""Reference design table: listed parameters, rates, block sizes and thresholds.

``extended_parity`` marks staircase baselines whose listed rate assumes extra
parity bits on the component code; formula rates are not expected to match
them.  ``de_m`` overrides ``m`` for density evolution where the listed ``m``
contradicts the listed block size.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .srsc import SrscConfig, block_shape, rate


@dataclass(frozen=True)
class Design:
    label: str
    scheme: str  # "staircase" or "sr-staircase"
    rate: float
    w: int
    nu: int
    m: int
    t1: int
    t2: int
    q: int
    block_size: int
    p_bar: float
    extended_parity: bool = False
    de_m: int | None = None
    note: str = ""

    def config(self, L: int = 1, for_de: bool = False) -> SrscConfig:
        m = self.de_m if (for_de and self.de_m is not None) else self.m
        return SrscConfig(self.nu, self.nu, self.t1, self.t2, m, m, self.q, self.q, self.w, L)

    def formula_rate(self) -> Fraction:
        return rate(self.config())

    def computed_block_size(self) -> int:
        r, c = block_shape(self.config(), 2)
        return r * c


DESIGNS: tuple[Design, ...] = (
    Design("SC-748", "staircase", 0.941, 2, 11, 748, 4, 4, 1, 559504, 5.240e-3),
    Design("SR-936", "sr-staircase", 0.941, 2, 11, 936, 5, 5, 2, 436178, 5.281e-3),
    Design("SR-1022", "sr-staircase", 0.941, 5, 11, 1022, 6, 5, 2, 522242, 5.334e-3,
           note="m=1022 is not divisible by w-1=4; only the DE is defined for this row"),
    Design("SC-510", "staircase", 0.937, 2, 10, 510, 3, 3, 1, 261120, 5.630e-3, extended_parity=True,
           note="listed rate includes two extended parity bits per component code"),
    Design("SR-876", "sr-staircase", 0.937, 2, 11, 876, 5, 5, 3, 255792, 5.643e-3),
    Design("SR-964", "sr-staircase", 0.937, 5, 11, 964, 6, 5, 4, 232324, 5.655e-3),
    Design("SC-360", "staircase", 0.917, 2, 10, 360, 3, 3, 1, 129600, 7.992e-3),
    Design("SR-480", "sr-staircase", 0.917, 4, 10, 480, 4, 4, 2, 115200, 8.170e-3),
    Design("SC-128", "staircase", 0.867, 2, 8, 128, 2, 2, 1, 16384, 1.402e-2, extended_parity=True,
           note="n=2m=256 exceeds 2^8-1; the component code is extended"),
    Design("SR-237", "sr-staircase", 0.867, 4, 9, 237, 4, 3, 3, 18732, 1.429e-2),
    Design("SC-112", "staircase", 0.833, 2, 9, 112, 2, 2, 1, 12996, 1.574e-2, extended_parity=True, de_m=114,
           note="listed block size 12996 = 114^2 and rate 1-19/114 point to m=114 with one extended parity bit"),
    Design("SR-216", "sr-staircase", 0.833, 5, 9, 216, 4, 4, 4, 11664, 1.816e-2),
    Design("SR-244", "sr-staircase", 0.834, 5, 9, 244, 5, 4, 4, 14884, 1.815e-2),
)

ANCHOR = "SC-510"


def by_label(label: str) -> Design:
    for d in DESIGNS:
        if d.label == label:
            return d
    raise KeyError(label)
