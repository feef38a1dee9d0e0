"""Exact scalar fields: arbitrary-precision rationals and small prime fields.

Every scalar in the workbench is either a ``fractions.Fraction`` (rationals)
or an ``int`` in ``[0, p)`` (prime field F_p).  There is no floating point
anywhere; all arithmetic is exact and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import FieldError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    """The rationals (characteristic 0) or F_p for a prime p."""

    characteristic: int

    def __post_init__(self):
        p = self.characteristic
        if p != 0 and not _is_prime(p):
            raise FieldError(f"characteristic must be 0 or prime, got {p}")

    @property
    def kind(self) -> str:
        return "rational" if self.characteristic == 0 else "prime-field"

    def zero(self):
        return Fraction(0) if self.characteristic == 0 else 0

    def one(self):
        return Fraction(1) if self.characteristic == 0 else 1

    def coerce(self, x):
        """Bring an int/Fraction into canonical form for this field."""
        if self.characteristic == 0:
            return x if isinstance(x, Fraction) else Fraction(x)
        return int(x) % self.characteristic

    def add(self, a, b):
        if self.characteristic == 0:
            return a + b
        return (a + b) % self.characteristic

    def sub(self, a, b):
        if self.characteristic == 0:
            return a - b
        return (a - b) % self.characteristic

    def mul(self, a, b):
        if self.characteristic == 0:
            return a * b
        return (a * b) % self.characteristic

    def neg(self, a):
        if self.characteristic == 0:
            return -a
        return (-a) % self.characteristic

    def inv(self, a):
        if self.characteristic == 0:
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 / Fraction(a)
        return pow(int(a), self.characteristic - 2, self.characteristic)

    def __str__(self):
        return "Q" if self.characteristic == 0 else f"F{self.characteristic}"


QQ = Field(0)
GF2 = Field(2)


def GF(p: int) -> Field:
    return Field(p)


def parse_field(text: str) -> Field:
    """Parse a CLI field spec: ``q`` or ``fp:<p>``."""
    t = text.strip().lower()
    if t == "q":
        return QQ
    if t.startswith("fp:"):
        try:
            p = int(t[3:])
        except ValueError:
            raise FieldError(f"bad prime in field spec {text!r}")
        return Field(p)
    raise FieldError(f"unknown field spec {text!r} (expected 'q' or 'fp:<p>')")
