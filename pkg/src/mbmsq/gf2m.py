"""Arithmetic in GF(2^m), 1 <= m <= 8.

Elements are labelled by the integer read of their polynomial-basis
coefficient bits (bit i <-> coefficient of X^i).  That integer is also the
MAP index the element stands for, so the zero element is MAP index 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

# Minimal-weight primitive polynomials, bit i = coefficient of x^i.
DEFAULT_PRIMITIVE_POLYS = {
    1: 0b11,  # x + 1
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10001001,  # x^7 + x^3 + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
}


class FieldError(ValueError):
    pass


def poly_mulmod(a: int, b: int, poly: int, m: int) -> int:
    """Shift-and-reduce product of two field elements modulo ``poly``.

    Used to fill the tables, and kept public as the table-free reference.
    """
    result = 0
    top = 1 << m
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return result


@dataclass(frozen=True, eq=False)
class Field:
    """GF(2^m) realised with a primitive polynomial.

    ``exp_table`` has length ``2 * (q - 1)`` so products can index it with an
    unreduced log sum.  ``log_table[0]`` is unused (set to -1).
    """

    m: int
    primitive_poly: int
    exp_table: np.ndarray = dc_field(repr=False)
    log_table: np.ndarray = dc_field(repr=False)

    @property
    def order(self) -> int:
        return 1 << self.m

    @property
    def alpha(self) -> "FieldElement":
        return FieldElement(int(self.exp_table[1]), self)

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value), self)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Field)
            and self.m == other.m
            and self.primitive_poly == other.primitive_poly
        )

    def __hash__(self) -> int:
        return hash((self.m, self.primitive_poly))

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(v, self) for v in range(self.order)]

    # Scalar integer ops; these are what the coders use in inner loops.
    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[self.log_table[a] + self.log_table[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^m)")
        q1 = self.order - 1
        return int(self.exp_table[(q1 - self.log_table[a]) % q1])

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("zero has no inverse in GF(2^m)")
            return 1 if k == 0 else 0
        q1 = self.order - 1
        return int(self.exp_table[(self.log_table[a] * k) % q1])

    def mul_array(self, a, b) -> np.ndarray:
        """Elementwise product of integer arrays of field elements."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la = self.log_table[a]
        lb = self.log_table[b]
        out = self.exp_table[np.where((a == 0) | (b == 0), 0, la + lb)]
        return np.where((a == 0) | (b == 0), 0, out)


def field_new(m: int, primitive_poly: int | None = None) -> Field:
    """Build GF(2^m) with log/antilog tables.

    Parameters
    ----------
    m : int
        Extension degree, 1..8.
    primitive_poly : int, optional
        Bitmask of a primitive polynomial of degree ``m``.  Defaults to the
        entry in ``DEFAULT_PRIMITIVE_POLYS``.

    Raises
    ------
    FieldError
        If ``m`` is out of range or the polynomial is not primitive of
        degree ``m``.
    """
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= 8:
        raise FieldError(f"m must be an integer in 1..8, got {m!r}")
    m = int(m)
    poly = DEFAULT_PRIMITIVE_POLYS[m] if primitive_poly is None else int(primitive_poly)
    if poly.bit_length() != m + 1:
        raise FieldError(f"polynomial {poly:#x} does not have degree {m}")
    q = 1 << m
    q1 = q - 1

    # generator X (or 1 in GF(2)) must have multiplicative order q - 1
    gen = 2 if m > 1 else 1
    exp = np.zeros(2 * q1, dtype=np.int64)
    log = np.full(q, -1, dtype=np.int64)
    x = 1
    for i in range(q1):
        if log[x] != -1:
            raise FieldError(f"polynomial {poly:#x} is not primitive")
        exp[i] = x
        log[x] = i
        x = poly_mulmod(x, gen, poly, m)
    if x != 1:
        raise FieldError(f"polynomial {poly:#x} is not primitive")
    exp[q1:] = exp[:q1]
    exp.setflags(write=False)
    log.setflags(write=False)
    return Field(m, poly, exp, log)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: Field

    def __post_init__(self):
        if not 0 <= self.value < self.field.order:
            raise FieldError(f"value {self.value} not in GF(2^{self.field.m})")

    def _check(self, other: "FieldElement") -> None:
        if self.field != other.field:
            raise FieldError("operands belong to different fields")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.value ^ other.value, self.field)

    __sub__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field.mul(self.value, other.value), self.field)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.inv()

    def __pow__(self, k: int) -> "FieldElement":
        return FieldElement(self.field.pow(self.value, k), self.field)

    def __neg__(self) -> "FieldElement":
        return self

    def __int__(self) -> int:
        return self.value

    def inv(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __repr__(self) -> str:
        return f"GF{self.field.order}({self.value})"

    def poly_str(self) -> str:
        """Polynomial-basis form, e.g. ``X^2+1``."""
        if self.value == 0:
            return "0"
        terms = []
        for i in reversed(range(self.field.m)):
            if self.value >> i & 1:
                terms.append("1" if i == 0 else "X" if i == 1 else f"X^{i}")
        return "+".join(terms)


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


def pow(a: FieldElement, k: int) -> FieldElement:  # noqa: A001
    return a ** k
