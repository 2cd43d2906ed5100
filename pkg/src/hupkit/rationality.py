"""Bounded-denominator rationality test by continued fractions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterator

from .serialization import exact


@dataclass(frozen=True)
class RationalityResult:
    kind: str  # "rational" | "no_rational_up_to" | "exact_rational"
    p: int | None = None
    q: int | None = None
    q_max: int | None = None
    error: float | None = None

    @property
    def rational(self) -> bool:
        return self.kind in ("rational", "exact_rational")

    def to_json(self) -> dict:
        if self.rational:
            data = {"kind": self.kind, "rational": [self.p, self.q]}
            if self.error is not None:
                data["error"] = self.error
            return data
        return {"kind": self.kind, "no_rational_up_to": self.q_max}


def convergents(x) -> Iterator[Fraction]:
    """Continued-fraction convergents of the exact value of ``x``."""
    r = exact(x)
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while True:
        a = r.numerator // r.denominator
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)
        frac = r - a
        if frac == 0:
            return
        r = 1 / frac


def rationality_test(x, q_max: int = 10_000, tol: float = 1e-9) -> RationalityResult:
    """First convergent ``p/q`` with ``q <= q_max`` and ``|x - p/q| <= tol``."""
    if q_max < 1 or tol <= 0:
        raise ValueError("q_max must be >= 1 and tol > 0")
    value = exact(x)
    for c in convergents(value):
        if c.denominator > q_max:
            break
        err = abs(float(value - c))
        if err <= tol:
            return RationalityResult("rational", c.numerator, c.denominator, q_max, err)
    return RationalityResult("no_rational_up_to", q_max=q_max)


def exact_rational(p: int, q: int) -> RationalityResult:
    if q <= 0:
        raise ValueError("denominator must be positive")
    g = gcd(p, q)
    return RationalityResult("exact_rational", p // g, q // g, error=0.0)
