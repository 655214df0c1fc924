"""Arithmetic in GF(2^nu) and over GF(2)[x].

Field elements are plain ints in ``[0, 2^nu)``; bit ``i`` of an element is the
coefficient of ``alpha^i`` in the polynomial basis.  Multiplication goes
through log/antilog tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Minimum-weight primitive polynomials, bit i = coefficient of x^i.
DEFAULT_PRIMITIVE_POLYNOMIALS = {
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10001001,  # x^7 + x^3 + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
    9: 0x211,  # x^9 + x^4 + 1
    10: 0x409,  # x^10 + x^3 + 1
    11: 0x805,  # x^11 + x^2 + 1
    12: 0x1053,  # x^12 + x^6 + x^4 + x + 1
    13: 0x201B,  # x^13 + x^4 + x^3 + x + 1
    14: 0x4443,  # x^14 + x^10 + x^6 + x + 1
    15: 0x8003,  # x^15 + x + 1
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
}


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class Gf2Polynomial:
    """Polynomial over GF(2) packed into an int (bit i = coefficient of x^i)."""

    bits: int

    @classmethod
    def from_coefficients(cls, coeffs) -> "Gf2Polynomial":
        value = 0
        for i, c in enumerate(coeffs):
            if int(c) & 1:
                value |= 1 << i
        return cls(value)

    @property
    def degree(self) -> int:
        return self.bits.bit_length() - 1

    @property
    def coefficients(self) -> np.ndarray:
        """Lowest-degree-first 0/1 vector of length ``degree + 1``."""
        if self.bits == 0:
            return np.zeros(1, dtype=np.uint8)
        return np.array([(self.bits >> i) & 1 for i in range(self.degree + 1)], dtype=np.uint8)

    def __mul__(self, other: "Gf2Polynomial") -> "Gf2Polynomial":
        a, b, out = self.bits, other.bits, 0
        while b:
            if b & 1:
                out ^= a
            a <<= 1
            b >>= 1
        return Gf2Polynomial(out)

    def __mod__(self, other: "Gf2Polynomial") -> "Gf2Polynomial":
        if other.bits == 0:
            raise ZeroDivisionError("polynomial division by zero")
        a, db = self.bits, other.degree
        while a and a.bit_length() - 1 >= db:
            a ^= other.bits << (a.bit_length() - 1 - db)
        return Gf2Polynomial(a)

    def __str__(self) -> str:
        if self.bits == 0:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            if (self.bits >> i) & 1:
                terms.append("1" if i == 0 else ("x" if i == 1 else f"x^{i}"))
        return " + ".join(terms)


@dataclass(frozen=True, eq=False)
class FieldSpec:
    nu: int
    primitive_polynomial: int
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        """Number of nonzero elements, 2^nu - 1."""
        return (1 << self.nu) - 1

    @property
    def size(self) -> int:
        return 1 << self.nu

    def alpha_pow(self, k: int) -> int:
        return int(self.exp[k % self.order])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(int(self.log[a]) + int(self.log[b])) % self.order])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2^nu)")
        if a == 0:
            return 0
        return int(self.exp[(int(self.log[a]) - int(self.log[b])) % self.order])

    def inv(self, a: int) -> int:
        return self.div(1, a)

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            return 0 if k else 1
        return int(self.exp[(int(self.log[a]) * k) % self.order])


def build_field(nu: int, primitive_polynomial: int | Gf2Polynomial | None = None) -> FieldSpec:
    """Build log/antilog tables for GF(2^nu).

    ``primitive_polynomial`` may be an int bitmask or a ``Gf2Polynomial``; when
    omitted the built-in default for ``nu`` is used.  A polynomial whose root
    does not generate all ``2^nu - 1`` nonzero elements is rejected.
    """
    if not 3 <= nu <= 16:
        raise FieldError(f"extension degree must satisfy 3 <= nu <= 16, got {nu}")
    if primitive_polynomial is None:
        poly = DEFAULT_PRIMITIVE_POLYNOMIALS[nu]
    elif isinstance(primitive_polynomial, Gf2Polynomial):
        poly = primitive_polynomial.bits
    else:
        poly = int(primitive_polynomial)
    if poly.bit_length() - 1 != nu:
        raise FieldError(f"polynomial {Gf2Polynomial(poly)} has degree {poly.bit_length() - 1}, expected {nu}")
    if not poly & 1:
        raise FieldError(f"polynomial {Gf2Polynomial(poly)} is divisible by x, so it is not primitive")

    order = (1 << nu) - 1
    exp = np.zeros(order, dtype=np.int64)
    log = np.full(1 << nu, -1, dtype=np.int64)
    x = 1
    for k in range(order):
        if log[x] != -1:
            raise FieldError(
                f"polynomial {Gf2Polynomial(poly)} is not primitive: "
                f"alpha has multiplicative order {k}, not {order}"
            )
        exp[k] = x
        log[x] = k
        x <<= 1
        if x >> nu:
            x ^= poly
    if x != 1:
        # alpha^order must return to 1; otherwise x does not cycle (reducible case)
        raise FieldError(f"polynomial {Gf2Polynomial(poly)} is not primitive: alpha^{order} != 1")
    exp.setflags(write=False)
    log.setflags(write=False)
    return FieldSpec(nu=nu, primitive_polynomial=poly, exp=exp, log=log)


def cyclotomic_coset(field_: FieldSpec, exponent: int) -> list[int]:
    """Exponents of the conjugates of alpha^exponent, in generation order."""
    order = field_.order
    coset, e = [], exponent % order
    while e not in coset:
        coset.append(e)
        e = (2 * e) % order
    return coset


def minimal_polynomial(field_: FieldSpec, exponent: int) -> Gf2Polynomial:
    """Minimal polynomial of alpha^exponent over GF(2)."""
    if not 1 <= exponent <= field_.order - 1:
        raise FieldError(f"exponent must be in [1, {field_.order - 1}], got {exponent}")
    # coefficients in GF(2^nu), lowest degree first; product of (x - alpha^j)
    coeffs = [1]
    for j in cyclotomic_coset(field_, exponent):
        root = field_.alpha_pow(j)
        nxt = [0] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] ^= c
            nxt[d] ^= field_.mul(c, root)
        coeffs = nxt
    if any(c not in (0, 1) for c in coeffs):
        raise AssertionError("minimal polynomial has coefficients outside GF(2)")
    return Gf2Polynomial.from_coefficients(coeffs)


def bch_generator_polynomial(field_: FieldSpec, t: int) -> Gf2Polynomial:
    """LCM of the minimal polynomials of alpha^1 .. alpha^(2t)."""
    if t < 1 or 2 * t >= field_.order:
        raise FieldError(f"need 1 <= t and 2t < {field_.order}, got t={t}")
    seen: set[int] = set()
    gen = Gf2Polynomial(1)
    for j in range(1, 2 * t + 1):
        rep = min(cyclotomic_coset(field_, j))
        if rep in seen:
            continue
        seen.add(rep)
        gen = gen * minimal_polynomial(field_, j)
    return gen
