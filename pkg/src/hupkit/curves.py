"""Exact algebra of strictly monotone piecewise-affine bijections.

Every map here is a continuous strictly monotone bijection between open
intervals.  Coordinates are stored as :class:`fractions.Fraction`, so
evaluation, inversion and composition are exact; float inputs are converted
without rounding.  Vectorised float evaluation is available separately for
sampling-based checks.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import DomainError, DomainMismatch, InvalidInterval
from .serialization import INF, Number, encode_number, exact, is_finite

__all__ = [
    "Interval",
    "MonotoneBijection",
    "Affine",
    "PiecewiseLinear",
    "BoundedPiecewiseLinear",
    "REAL_LINE",
    "compose",
    "invert",
    "power",
    "map_interval",
    "bijection_from_json",
]


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)``; endpoints may be infinite."""

    lo: Number
    hi: Number

    def __post_init__(self):
        lo, hi = exact(self.lo), exact(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not lo < hi:
            raise InvalidInterval(f"empty or degenerate interval ({lo}, {hi})")

    @property
    def bounded(self) -> bool:
        return is_finite(self.lo) and is_finite(self.hi)

    @property
    def width(self) -> Number:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        if not self.bounded:
            raise DomainError("unbounded interval has no midpoint")
        return (self.lo + self.hi) / 2

    def contains_point(self, x) -> bool:
        return self.lo < x < self.hi

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        """Open-interval overlap; intervals sharing only an endpoint do not overlap."""
        return self.lo < other.hi and other.lo < self.hi

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo < hi else None

    def interior_point(self) -> Fraction:
        """Some finite point inside the interval."""
        if self.bounded:
            return self.midpoint
        if is_finite(self.lo):
            return self.lo + 1
        if is_finite(self.hi):
            return self.hi - 1
        return Fraction(0)

    def as_floats(self) -> tuple[float, float]:
        return float(self.lo), float(self.hi)

    def to_json(self) -> list:
        return [encode_number(self.lo), encode_number(self.hi)]

    @classmethod
    def from_json(cls, data: Sequence) -> "Interval":
        if len(data) != 2:
            raise InvalidInterval(f"interval needs two endpoints, got {data!r}")
        return cls(exact(data[0]), exact(data[1]))

    def __repr__(self):
        return f"({_fmt(self.lo)}, {_fmt(self.hi)})"


REAL_LINE = Interval(-INF, INF)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(x)


class MonotoneBijection:
    """Common interface; concrete classes are :class:`Affine`,
    :class:`PiecewiseLinear` and :class:`BoundedPiecewiseLinear`."""

    domain: Interval
    codomain: Interval

    @property
    def direction(self) -> int:
        raise NotImplementedError

    @property
    def increasing(self) -> bool:
        return self.direction > 0

    def __call__(self, x) -> Fraction:
        x = exact(x)
        if not is_finite(x) or not self.domain.contains_point(x):
            raise DomainError(f"{x} outside domain {self.domain}")
        return self._eval(x)

    def _eval(self, x: Fraction) -> Fraction:
        raise NotImplementedError

    def endpoint_value(self, x: Number) -> Number:
        """Value at a point of the closed domain, with limits at the boundary."""
        if x == self.domain.lo:
            return self.codomain.lo if self.increasing else self.codomain.hi
        if x == self.domain.hi:
            return self.codomain.hi if self.increasing else self.codomain.lo
        return self(x)

    def inverse(self) -> "MonotoneBijection":
        raise NotImplementedError

    def pieces(self) -> list[tuple[Number, Number, Fraction, Fraction]]:
        """Affine pieces ``(lo, hi, slope, intercept)`` covering the domain."""
        raise NotImplementedError

    def knots(self) -> list[Fraction]:
        """Finite breakpoints (including finite domain endpoints)."""
        return []

    def evaluate(self, xs) -> np.ndarray:
        """Float evaluation; NaN outside the domain."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def map_interval(self, interval: Interval) -> Interval:
        return map_interval(self, interval)


@dataclass(frozen=True)
class Affine(MonotoneBijection):
    """``x -> slope * x + intercept`` on the whole line."""

    slope: Fraction
    intercept: Fraction = Fraction(0)

    def __post_init__(self):
        s, c = exact(self.slope), exact(self.intercept)
        if not (is_finite(s) and is_finite(c)):
            raise ValueError("affine coefficients must be finite")
        if s == 0:
            raise ValueError("slope must be nonzero")
        object.__setattr__(self, "slope", s)
        object.__setattr__(self, "intercept", c)

    domain = REAL_LINE
    codomain = REAL_LINE

    @property
    def direction(self) -> int:
        return 1 if self.slope > 0 else -1

    def _eval(self, x):
        return self.slope * x + self.intercept

    def endpoint_value(self, x):
        if not is_finite(x):
            return x * self.direction
        return self._eval(x)

    def inverse(self) -> "Affine":
        return Affine(1 / self.slope, -self.intercept / self.slope)

    def pieces(self):
        return [(-INF, INF, self.slope, self.intercept)]

    def evaluate(self, xs):
        xs = np.asarray(xs, dtype=float)
        return float(self.slope) * xs + float(self.intercept)

    def power(self, k: int) -> "Affine":
        """Closed form of the k-fold iterate (negative k iterates the inverse)."""
        if k < 0:
            return self.inverse().power(-k)
        s, c = self.slope, self.intercept
        if s == 1:
            return Affine(1, k * c)
        sk = s**k
        return Affine(sk, c * (sk - 1) / (s - 1))

    def to_json(self):
        return {
            "type": "affine",
            "slope": encode_number(self.slope),
            "intercept": encode_number(self.intercept),
        }

    def __repr__(self):
        return f"Affine({_fmt(self.slope)}, {_fmt(self.intercept)})"


def _check_knots(xs: tuple, ys: tuple) -> int:
    if len(xs) != len(ys):
        raise ValueError("x and y must have the same length")
    if len(xs) < 2:
        raise ValueError("need at least two breakpoints")
    if any(not is_finite(v) for v in xs + ys):
        raise ValueError("breakpoints must be finite")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("breakpoints must be strictly increasing")
    if all(b > a for a, b in zip(ys, ys[1:])):
        return 1
    if all(b < a for a, b in zip(ys, ys[1:])):
        return -1
    raise ValueError("values must be strictly monotone")


class _Knotted(MonotoneBijection):
    x: tuple
    y: tuple

    def _init_knots(self):
        xs = tuple(exact(v) for v in self.x)
        ys = tuple(exact(v) for v in self.y)
        d = _check_knots(xs, ys)
        object.__setattr__(self, "x", xs)
        object.__setattr__(self, "y", ys)
        object.__setattr__(self, "_direction", d)

    @property
    def direction(self) -> int:
        return self._direction

    def knots(self):
        return list(self.x)

    def _segment(self, i: int) -> tuple[Fraction, Fraction]:
        x0, x1, y0, y1 = self.x[i], self.x[i + 1], self.y[i], self.y[i + 1]
        s = (y1 - y0) / (x1 - x0)
        return s, y0 - s * x0

    def _eval(self, x):
        xs = self.x
        i = bisect.bisect_right(xs, x) - 1
        i = min(max(i, 0), len(xs) - 2)
        s, c = self._segment(i)
        return s * x + c

    def _interior_pieces(self):
        return [
            (self.x[i], self.x[i + 1], *self._segment(i)) for i in range(len(self.x) - 1)
        ]

    def _evaluate_floats(self, xs: np.ndarray) -> np.ndarray:
        kx = np.array([float(v) for v in self.x])
        ky = np.array([float(v) for v in self.y])
        out = np.interp(xs, kx, ky)
        s0 = (ky[1] - ky[0]) / (kx[1] - kx[0])
        s1 = (ky[-1] - ky[-2]) / (kx[-1] - kx[-2])
        left, right = xs < kx[0], xs > kx[-1]
        out = np.where(left, ky[0] + s0 * (xs - kx[0]), out)
        out = np.where(right, ky[-1] + s1 * (xs - kx[-1]), out)
        return out


@dataclass(frozen=True)
class PiecewiseLinear(_Knotted):
    """Interpolates ``(x[i], y[i])``; the end segments extend affinely to
    the whole line."""

    x: tuple
    y: tuple

    def __post_init__(self):
        self._init_knots()

    domain = REAL_LINE
    codomain = REAL_LINE

    def endpoint_value(self, x):
        if not is_finite(x):
            return x * self.direction
        return self._eval(x)

    def inverse(self) -> "PiecewiseLinear":
        if self.increasing:
            return PiecewiseLinear(self.y, self.x)
        return PiecewiseLinear(self.y[::-1], self.x[::-1])

    def pieces(self):
        inner = self._interior_pieces()
        first, last = inner[0], inner[-1]
        return [(-INF, first[0], first[2], first[3]), *inner, (last[1], INF, last[2], last[3])]

    def evaluate(self, xs):
        return self._evaluate_floats(np.asarray(xs, dtype=float))

    def to_json(self):
        return {
            "type": "pwl",
            "x": [encode_number(v) for v in self.x],
            "y": [encode_number(v) for v in self.y],
        }

    def __repr__(self):
        return f"PiecewiseLinear({[_fmt(v) for v in self.x]}, {[_fmt(v) for v in self.y]})"


@dataclass(frozen=True)
class BoundedPiecewiseLinear(_Knotted):
    """Piecewise-linear bijection ``(x[0], x[-1]) -> (min y, max y)``.

    The usual case is the symmetric one, ``(-a, a) -> (-b, b)``.
    """

    x: tuple
    y: tuple

    def __post_init__(self):
        self._init_knots()
        object.__setattr__(self, "domain", Interval(self.x[0], self.x[-1]))
        lo, hi = min(self.y[0], self.y[-1]), max(self.y[0], self.y[-1])
        object.__setattr__(self, "codomain", Interval(lo, hi))

    @classmethod
    def symmetric(cls, a, b, x, y) -> "BoundedPiecewiseLinear":
        a, b = exact(a), exact(b)
        xs, ys = [exact(v) for v in x], [exact(v) for v in y]
        if xs[0] != -a or xs[-1] != a:
            raise ValueError(f"breakpoints must start at -a={-a} and end at a={a}")
        if {ys[0], ys[-1]} != {-b, b}:
            raise ValueError(f"values at +-a must be +-b={b}")
        return cls(tuple(xs), tuple(ys))

    @property
    def half_widths(self) -> tuple[Fraction, Fraction] | None:
        """``(a, b)`` when the map is ``(-a, a) -> (-b, b)``, else None."""
        d, c = self.domain, self.codomain
        if d.lo == -d.hi and c.lo == -c.hi:
            return d.hi, c.hi
        return None

    def inverse(self) -> "BoundedPiecewiseLinear":
        if self.increasing:
            return BoundedPiecewiseLinear(self.y, self.x)
        return BoundedPiecewiseLinear(self.y[::-1], self.x[::-1])

    def pieces(self):
        return self._interior_pieces()

    def evaluate(self, xs):
        xs = np.asarray(xs, dtype=float)
        out = self._evaluate_floats(xs)
        lo, hi = self.domain.as_floats()
        return np.where((xs < lo) | (xs > hi), np.nan, out)

    def to_json(self):
        data = {
            "type": "bounded_pwl",
            "x": [encode_number(v) for v in self.x],
            "y": [encode_number(v) for v in self.y],
        }
        hw = self.half_widths
        if hw is not None:
            data["a"], data["b"] = encode_number(hw[0]), encode_number(hw[1])
        return data

    def __repr__(self):
        return (
            f"BoundedPiecewiseLinear({[_fmt(v) for v in self.x]}, "
            f"{[_fmt(v) for v in self.y]})"
        )


def invert(T: MonotoneBijection) -> MonotoneBijection:
    return T.inverse()


def map_interval(T: MonotoneBijection, interval: Interval) -> Interval:
    """Image of an open interval; endpoints swap for decreasing maps."""
    if not T.domain.contains(interval):
        raise DomainError(f"{interval} not inside domain {T.domain} of {T!r}")
    lo, hi = T.endpoint_value(interval.lo), T.endpoint_value(interval.hi)
    if lo > hi:
        lo, hi = hi, lo
    return Interval(lo, hi)


def _drop_collinear(xs: list, ys: list) -> tuple[list, list]:
    kx, ky = [xs[0]], [ys[0]]
    for i in range(1, len(xs) - 1):
        s_in = (ys[i] - ky[-1]) / (xs[i] - kx[-1])
        s_out = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
        if s_in != s_out:
            kx.append(xs[i])
            ky.append(ys[i])
    kx.append(xs[-1])
    ky.append(ys[-1])
    return kx, ky


def compose(A: MonotoneBijection, B: MonotoneBijection) -> MonotoneBijection:
    """Exact composition ``A o B`` (apply B first)."""
    if not A.domain.contains(B.codomain):
        raise DomainMismatch(f"codomain {B.codomain} of {B!r} not inside domain {A.domain}")
    if isinstance(A, Affine) and isinstance(B, Affine):
        return Affine(A.slope * B.slope, A.slope * B.intercept + A.intercept)

    B_inv = B.inverse()
    pts = set(B.knots())
    for k in A.knots():
        if B.codomain.contains_point(k):
            pts.add(B_inv(k))
    xs = sorted(pts)
    bounded = B.domain.bounded
    if not bounded and len(xs) < 2:
        # both maps affine on the relevant range
        only = xs[0] if xs else Fraction(0)
        xs = [only, only + 1]
    ys = [A.endpoint_value(B.endpoint_value(x)) for x in xs]
    xs, ys = _drop_collinear(xs, ys)
    if bounded:
        return BoundedPiecewiseLinear(tuple(xs), tuple(ys))
    if len(xs) == 2:
        s = (ys[1] - ys[0]) / (xs[1] - xs[0])
        return Affine(s, ys[0] - s * xs[0])
    return PiecewiseLinear(tuple(xs), tuple(ys))


def power(T: MonotoneBijection, k: int) -> MonotoneBijection:
    """k-fold iterate of a self-map; negative k iterates the inverse."""
    if isinstance(T, Affine):
        return T.power(k)
    if k < 0:
        T, k = T.inverse(), -k
    result = identity_like(T)
    base = T
    while k:
        if k & 1:
            result = compose(base, result)
        k >>= 1
        if k:
            base = compose(base, base)
    return result


def bijection_from_json(data: dict[str, Any]) -> MonotoneBijection:
    kind = data.get("type")
    if kind == "affine":
        return Affine(exact(data["slope"]), exact(data.get("intercept", 0)))
    if kind == "pwl":
        return PiecewiseLinear(tuple(data["x"]), tuple(data["y"]))
    if kind == "bounded_pwl":
        if "a" in data and "b" in data:
            return BoundedPiecewiseLinear.symmetric(data["a"], data["b"], data["x"], data["y"])
        return BoundedPiecewiseLinear(tuple(data["x"]), tuple(data["y"]))
    raise ValueError(f"unknown bijection type {kind!r}")


def identity_like(T: MonotoneBijection) -> MonotoneBijection:
    if T.domain.bounded:
        lo, hi = T.domain.lo, T.domain.hi
        return BoundedPiecewiseLinear((lo, hi), (lo, hi))
    return Affine(1)
