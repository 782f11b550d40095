"""Exact scalar fields: the rationals and prime fields F_p.

Rational scalars are :class:`fractions.Fraction` (always in lowest terms with a
positive denominator).  Prime-field scalars are :class:`FpElement` values that
support the usual arithmetic operators, so algebra code can be written once
and run over either field.
"""

from __future__ import annotations

from random import Random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union


class FpElement:
    """Residue class modulo a prime ``p``."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _coerce(self, other) -> int:
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise ValueError(f"mixing F_{self.p} and F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return FpElement(self.value * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.value == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return FpElement(o * pow(self.value, -1, self.p), self.p)

    def __neg__(self):
        return FpElement(-self.value, self.p)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if k < 0:
            return FpElement(pow(self.value, -1, self.p), self.p) ** (-k)
        return FpElement(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.value == o

    def __hash__(self):
        return hash(self.value)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FpElement({self.value}, {self.p})"

    def __str__(self):
        return str(self.value)

    def __reduce__(self):
        return (FpElement, (self.value, self.p))


Scalar = Union[Fraction, FpElement]

_SCALAR_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?(?:\s+mod\s+(\d+))?\s*$")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Field:
    """An exact field: ``p == 0`` is the rationals, otherwise F_p."""

    p: int = 0

    def __post_init__(self):
        if self.p != 0 and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def from_name(cls, name: str) -> "Field":
        """Parse ``Q``, ``QQ``, ``F2``, ``F3``, ``GF(5)``, ``Fp:7`` and friends."""
        text = name.strip()
        if text.upper() in ("Q", "QQ"):
            return cls(0)
        m = re.fullmatch(r"(?:F|GF|Fp:?|GF\()(\d+)\)?", text, flags=re.IGNORECASE)
        if not m:
            raise ValueError(f"unknown field {name!r}")
        return cls(int(m.group(1)))

    @property
    def name(self) -> str:
        return "Q" if self.p == 0 else f"F{self.p}"

    @property
    def is_finite(self) -> bool:
        return self.p != 0

    @property
    def order(self) -> int | None:
        return self.p or None

    def __call__(self, x) -> Scalar:
        if self.p == 0:
            if isinstance(x, FpElement):
                raise TypeError("cannot coerce an F_p element into Q")
            return Fraction(x)
        if isinstance(x, FpElement):
            if x.p != self.p:
                raise ValueError(f"mixing F_{self.p} and F_{x.p}")
            return x
        if isinstance(x, Fraction):
            return FpElement(x.numerator, self.p) / x.denominator
        return FpElement(int(x), self.p)

    @property
    def zero(self) -> Scalar:
        return self(0)

    @property
    def one(self) -> Scalar:
        return self(1)

    def elements(self) -> Iterator[Scalar]:
        if not self.p:
            raise ValueError("Q has no finite enumeration")
        return (FpElement(i, self.p) for i in range(self.p))

    def random(self, rng: Random, nonzero: bool = False) -> Scalar:
        if self.p:
            lo = 1 if nonzero else 0
            return FpElement(rng.randrange(lo, self.p), self.p)
        while True:
            x = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
            if x or not nonzero:
                return x

    def parse(self, text: str) -> Scalar:
        """Read an exact scalar such as ``"-3/7"``, ``"2"`` or ``"2 mod 5"``."""
        m = _SCALAR_RE.match(str(text))
        if not m:
            raise ValueError(f"not an exact scalar: {text!r}")
        num, den, mod = m.groups()
        if mod is not None and int(mod) != self.p:
            raise ValueError(f"{text!r} is not an element of {self.name}")
        value = Fraction(int(num), int(den) if den else 1)
        return self(value)

    def format(self, x: Scalar) -> str:
        """Exact string form, the inverse of :meth:`parse`."""
        x = self(x)
        if self.p:
            return f"{x.value} mod {self.p}"
        return str(x)

    def signed(self, x: Scalar) -> int | Fraction:
        """A small signed representative, used for human-readable printing."""
        x = self(x)
        if self.p:
            v = x.value
            return v - self.p if self.p > 2 and v > self.p // 2 else v
        return x


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)
