"""Orbit analysis of a monotone self-map and wandering-set classification.

The map of interest is the return map ``phi = T2^{-1} o T1`` of two curves.
Everything runs on exact rationals, so interval overlap, tangency and
fixed points are decided without rounding.
"""

from __future__ import annotations

import bisect
import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .curves import (
    Affine,
    Interval,
    MonotoneBijection,
    compose,
    map_interval,
)
from .errors import DomainError, InvalidGapSet, TruncationWarning
from .serialization import INF, Number, encode_number, exact, is_finite

DEFAULT_DEPTH = 64
DEFAULT_TOL = 1e-9
IDENTITY_TOL = 1e-12

__all__ = [
    "GeometricGapFamily",
    "GapSet",
    "FixedPointSet",
    "OrbitLimit",
    "Witness",
    "WanderingVerdict",
    "Order",
    "iterate",
    "fixed_points_of_square",
    "detect_identity_interval",
    "orbit_limit",
    "wandering_check",
    "interval_order",
]


# --------------------------------------------------------------------------
# gap sets


@dataclass(frozen=True)
class GeometricGapFamily:
    """Intervals ``(lam^j x_j, lam^j x_{j+1})`` for ``j = 0 .. depth-1``.

    ``x_n = lam*seed - (1/2)^n (lam - 1) seed``, i.e. the sequence with
    ``x_n = (x_{n-1} + lam*seed) / 2`` started at ``x_0 = seed``.  A positive
    seed gives a family marching to ``+inf``, a negative seed its mirror.
    With ``halving`` only the lower or upper half of each interval is kept.
    """

    lam: Fraction
    seed: Fraction
    depth: int
    halving: bool = False
    half: str = "lower"

    def __post_init__(self):
        lam, seed = exact(self.lam), exact(self.seed)
        if not (is_finite(lam) and lam > 1):
            raise InvalidGapSet(f"family ratio must exceed 1, got {lam}")
        if not is_finite(seed) or seed == 0:
            raise InvalidGapSet("family seed must be finite and nonzero")
        if int(self.depth) < 1:
            raise InvalidGapSet("family depth must be positive")
        if self.half not in ("lower", "upper"):
            raise InvalidGapSet(f"half must be 'lower' or 'upper', got {self.half!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "depth", int(self.depth))

    def term(self, n: int) -> Fraction:
        """Closed form ``lam*seed - (1/2)^n (lam-1) seed``."""
        return self.lam * self.seed - Fraction(1, 2**n) * (self.lam - 1) * self.seed

    def term_by_recurrence(self, n: int) -> Fraction:
        x = self.seed
        for _ in range(n):
            x = (x + self.lam * self.seed) / 2
        return x

    def full_interval(self, j: int) -> Interval:
        scale = self.lam**j
        u, v = scale * self.term(j), scale * self.term(j + 1)
        return Interval(min(u, v), max(u, v))

    def interval(self, j: int) -> Interval:
        full = self.full_interval(j)
        if not self.halving:
            return full
        mid = full.midpoint
        return Interval(full.lo, mid) if self.half == "lower" else Interval(mid, full.hi)

    def width(self, j: int) -> Fraction:
        return self.full_interval(j).width

    def intervals(self) -> list[Interval]:
        return [self.interval(j) for j in range(self.depth)]

    def to_json(self) -> dict:
        data = {
            "lambda": encode_number(self.lam),
            "seed": encode_number(self.seed),
            "depth": self.depth,
            "halving": self.halving,
        }
        if self.halving:
            data["half"] = self.half
        return data

    @classmethod
    def from_json(cls, data: dict) -> "GeometricGapFamily":
        unknown = set(data) - {"lambda", "seed", "depth", "halving", "half"}
        if unknown:
            raise InvalidGapSet(f"unknown family fields {sorted(unknown)}")
        return cls(
            exact(data["lambda"]),
            exact(data["seed"]),
            int(data["depth"]),
            bool(data.get("halving", False)),
            data.get("half", "lower"),
        )


@dataclass(frozen=True)
class Component:
    interval: Interval
    label: int = 1
    origin: tuple = ()

    def to_json(self) -> dict:
        return {"interval": self.interval.to_json(), "gaps": self.label, "origin": list(self.origin)}


def _check_disjoint(comps: Sequence[Component]) -> None:
    for prev, cur in zip(comps, comps[1:]):
        if prev.interval.overlaps(cur.interval):
            raise InvalidGapSet(f"gap components {prev.interval} and {cur.interval} overlap")


@dataclass(frozen=True)
class GapSet:
    """Open set given as finitely many open intervals plus geometric families."""

    intervals: tuple = ()
    families: tuple = ()

    def __post_init__(self):
        ivs = tuple(sorted((_as_interval(i) for i in self.intervals), key=lambda i: i.lo))
        fams = tuple(self.families)
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "families", fams)
        _check_disjoint(self.components())

    @property
    def is_empty(self) -> bool:
        return not self.intervals and not self.families

    @property
    def truncated(self) -> bool:
        return bool(self.families)

    def components(self, label: int = 1) -> list[Component]:
        comps = [Component(iv, label, ("interval", i)) for i, iv in enumerate(self.intervals)]
        for f, fam in enumerate(self.families):
            comps.extend(
                Component(iv, label, ("family", f, j)) for j, iv in enumerate(fam.intervals())
            )
        comps.sort(key=lambda c: c.interval.lo)
        return comps

    def hull(self) -> Interval | None:
        comps = self.components()
        if not comps:
            return None
        return Interval(comps[0].interval.lo, max(c.interval.hi for c in comps))

    def contains_point(self, x) -> bool:
        return any(c.interval.contains_point(x) for c in self.components())

    def scaled(self, s) -> "GapSet":
        """Image under ``x -> s x`` for ``s > 0``."""
        s = exact(s)
        if not s > 0:
            raise ValueError("scale must be positive")
        return GapSet(
            tuple(Interval(iv.lo * s, iv.hi * s) for iv in self.intervals),
            tuple(
                GeometricGapFamily(f.lam, f.seed * s, f.depth, f.halving, f.half)
                for f in self.families
            ),
        )

    def shifted(self, t) -> "GapSet":
        if self.families:
            raise ValueError("geometric families are not translation invariant")
        t = exact(t)
        return GapSet(tuple(Interval(iv.lo + t, iv.hi + t) for iv in self.intervals))

    def to_json(self) -> dict:
        return {
            "intervals": [iv.to_json() for iv in self.intervals],
            "families": [f.to_json() for f in self.families],
        }

    @classmethod
    def from_json(cls, data: dict | None) -> "GapSet":
        if not data:
            return cls()
        unknown = set(data) - {"intervals", "families"}
        if unknown:
            raise InvalidGapSet(f"unknown gap-set fields {sorted(unknown)}")
        return cls(
            tuple(Interval.from_json(iv) for iv in data.get("intervals", [])),
            tuple(GeometricGapFamily.from_json(f) for f in data.get("families", [])),
        )


def _as_interval(obj) -> Interval:
    if isinstance(obj, Interval):
        return obj
    return Interval.from_json(obj)


def tagged_components(gaps1: GapSet, gaps2: GapSet | None = None) -> list[Component]:
    comps = gaps1.components(1)
    if gaps2 is not None:
        comps += gaps2.components(2)
    comps.sort(key=lambda c: c.interval.lo)
    _check_disjoint(comps)
    return comps


def tail_region(fam: GeometricGapFamily) -> Interval:
    """Half-line containing every family interval beyond the truncation depth."""
    edge = fam.full_interval(fam.depth).lo if fam.seed > 0 else fam.full_interval(fam.depth).hi
    return Interval(edge, INF) if fam.seed > 0 else Interval(-INF, edge)


def _opposite_halves(f: GeometricGapFamily, h: GeometricGapFamily) -> bool:
    return (
        f.lam == h.lam and f.seed == h.seed and f.halving and h.halving and f.half != h.half
    )


def _tail_clashes(g: GapSet, other: GapSet) -> bool:
    for fam in g.families:
        region = tail_region(fam)
        for c in other.components():
            if c.origin[0] == "family" and _opposite_halves(fam, other.families[c.origin[1]]):
                continue
            if region.overlaps(c.interval):
                return True
        for h in other.families:
            if not _opposite_halves(fam, h) and region.overlaps(tail_region(h)):
                return True
    return False


def first_intersection(g1: GapSet, g2: GapSet) -> tuple[Interval | None, bool]:
    """First open overlap between two gap sets.

    Returns ``(overlap, certain)``.  Without an overlap among the truncated
    components, ``certain`` says whether the family tails are provably
    apart too: tails are compared through the half-lines that contain them,
    and two families splitting the same intervals into opposite halves
    never meet.
    """
    for a in g1.components():
        for b in g2.components():
            inter = a.interval.intersect(b.interval)
            if inter is not None:
                return inter, True
    certain = not (_tail_clashes(g1, g2) or _tail_clashes(g2, g1))
    return None, certain


# --------------------------------------------------------------------------
# iteration and fixed points


class Order(enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    OVERLAP = "overlap"


def interval_order(I: Interval, J: Interval) -> Order:
    """Three-way comparison of open intervals; a shared endpoint is not an overlap."""
    if I.hi <= J.lo:
        return Order.BEFORE
    if J.hi <= I.lo:
        return Order.AFTER
    return Order.OVERLAP


def iterate(phi: MonotoneBijection, interval: Interval, k: int) -> Interval:
    """Image of ``interval`` under the k-th iterate (negative k uses the inverse)."""
    if k == 0:
        return interval
    if isinstance(phi, Affine):
        return map_interval(phi.power(k), interval)
    step = phi if k > 0 else phi.inverse()
    for _ in range(abs(k)):
        interval = map_interval(step, interval)
    return interval


@dataclass(frozen=True)
class FixedPointSet:
    points: tuple
    identity_intervals: tuple

    def all_values(self) -> list[Number]:
        """Isolated points plus finite endpoints of identity intervals."""
        vals = list(self.points)
        for iv in self.identity_intervals:
            vals += [v for v in (iv.lo, iv.hi) if is_finite(v)]
        return sorted(set(vals))


def _near(x: Fraction, target: int, tol: float) -> bool:
    return abs(x - target) <= tol


def fixed_points_of_square(
    phi: MonotoneBijection, window: Interval, tol: float = DEFAULT_TOL
) -> FixedPointSet:
    """Fixed points of ``phi o phi`` inside ``window``.

    The square is piecewise affine, so each piece is solved exactly.  Pieces
    with slope and intercept within ``1e-12`` of the identity are reported as
    identity intervals (merged when adjacent); isolated roots are reported as
    points.  ``tol`` bounds the residual of every reported point.
    """
    sq = compose(phi, phi)
    points: list[Fraction] = []
    ident: list[list] = []
    for lo, hi, s, c in sq.pieces():
        piece = Interval(lo, hi).intersect(window)
        if piece is None:
            continue
        if _near(s, 1, IDENTITY_TOL) and _near(c, 0, IDENTITY_TOL):
            if ident and ident[-1][1] >= piece.lo:
                ident[-1][1] = max(ident[-1][1], piece.hi)
            else:
                ident.append([piece.lo, piece.hi])
            continue
        if s == 1:
            continue
        root = c / (1 - s)
        if lo <= root <= hi and window.contains_point(root):
            points.append(root)
    intervals = tuple(Interval(lo, hi) for lo, hi in ident)
    kept = []
    for p in sorted(set(points)):
        if any(iv.lo <= p <= iv.hi for iv in intervals):
            continue
        if abs(float(sq(p) - p)) > tol:
            raise AssertionError(f"fixed point {p} fails residual check")
        kept.append(p)
    return FixedPointSet(tuple(kept), intervals)


def detect_identity_interval(phi: MonotoneBijection, window: Interval) -> Interval | None:
    """Leftmost maximal open interval in ``window`` on which ``phi o phi = id``."""
    found = fixed_points_of_square(phi, window).identity_intervals
    return found[0] if found else None


@dataclass(frozen=True)
class OrbitLimit:
    limit: float
    iterations: int
    status: str  # "converged" | "escaped" | "inconclusive"

    @property
    def finite(self) -> bool:
        return self.status == "converged"


def orbit_limit(
    phi: MonotoneBijection,
    xi,
    max_iter: int = 10_000,
    tol: float = DEFAULT_TOL,
    escape_bound: float = 1e12,
) -> OrbitLimit:
    """Limit of the even iterates ``phi^(2n)(xi)``.

    Iterates the square numerically until consecutive values agree to
    ``tol`` or exceed ``escape_bound``.  When the orbit sits on an unbounded
    affine piece moving outward with no fixed point ahead, escape is
    concluded at once: that tail is provably divergent.
    """
    sq = compose(phi, phi)
    fixed = fixed_points_of_square(phi, phi.domain).all_values()
    pieces = sq.pieces()
    x = exact(xi)
    dom = phi.domain
    for n in range(max_iter + 1):
        nxt = sq(x)
        if abs(float(nxt - x)) < tol:
            return OrbitLimit(float(nxt), n + 1, "converged")
        if abs(float(nxt)) > escape_bound:
            return OrbitLimit(math.copysign(INF, float(nxt)), n + 1, "escaped")
        up = nxt > x
        lo, hi, s, c = next(p for p in pieces if p[0] <= x <= p[1])
        ahead = [v for v in fixed if (v > x if up else v < x)]
        if not ahead:
            if up and not is_finite(hi):
                return OrbitLimit(INF, n + 1, "escaped")
            if not up and not is_finite(lo):
                return OrbitLimit(-INF, n + 1, "escaped")
        # rounding keeps exact denominators from growing without bound
        x = Fraction(float(nxt)) if nxt.denominator > 2**200 else nxt
        if not dom.contains_point(x):
            return OrbitLimit(float(x), n + 1, "converged")
    return OrbitLimit(float(x), max_iter, "inconclusive")


# --------------------------------------------------------------------------
# wandering sets


@dataclass(frozen=True)
class Witness:
    """``phi^m(component) meets target``; ``source_part`` is the part of the
    component mapped into the target."""

    component: Component
    target: Component
    m: int
    source_part: Interval

    @property
    def case(self) -> int:
        return 2 * (self.component.label - 1) + self.target.label

    def to_json(self) -> dict:
        return {
            "component": self.component.to_json(),
            "target": self.target.to_json(),
            "m": self.m,
            "case": self.case,
            "source_part": self.source_part.to_json(),
        }


@dataclass
class WanderingVerdict:
    kind: str  # "wandering" | "non_wandering" | "inconclusive"
    witness: Witness | None = None
    escape_certificates: list = field(default_factory=list)
    reason: str | None = None
    rule: str | None = None

    @property
    def witness_interval(self) -> Interval | None:
        return self.witness.component.interval if self.witness else None

    @property
    def m(self) -> int | None:
        return self.witness.m if self.witness else None

    @property
    def case(self) -> int | None:
        return self.witness.case if self.witness else None

    def to_json(self) -> dict:
        data: dict[str, Any] = {"kind": self.kind}
        if self.witness is not None:
            data["witness"] = self.witness.to_json()
        if self.rule:
            data["rule"] = self.rule
        if self.reason:
            data["reason"] = self.reason
        if self.escape_certificates:
            data["escape_certificates"] = self.escape_certificates
        return data


def _first_overlap(J: Interval, comps: Sequence[Component], his: list) -> Component | None:
    # components are sorted and disjoint, so hi values are sorted too
    i = bisect.bisect_right(his, J.lo)
    if i < len(comps) and comps[i].interval.lo < J.hi:
        return comps[i]
    return None


def _region_is_free(region: Interval, comps: Sequence[Component]) -> bool:
    return not any(region.overlaps(c.interval) for c in comps)


def _nearest(values: Sequence, x, upward: bool, default):
    if upward:
        ahead = [v for v in values if v > x]
        return min(ahead) if ahead else default
    ahead = [v for v in values if v < x]
    return max(ahead) if ahead else default


def _parity_region(sq, fixed, dom: Interval, J: Interval) -> tuple[Interval, str]:
    """Open region containing every later same-parity iterate of ``J``."""
    rules = []
    lo, hi = J.lo, J.hi
    if is_finite(lo) and sq.endpoint_value(lo) < lo:
        lo = _nearest(fixed, lo, False, dom.lo)
        rules.append("escape" if not is_finite(lo) else "basin")
    if is_finite(hi) and sq.endpoint_value(hi) > hi:
        hi = _nearest(fixed, hi, True, dom.hi)
        rules.append("escape" if not is_finite(hi) else "basin")
    if not rules:
        rules.append("invariant")
    return Interval(lo, hi), "+".join(rules)


def _family_tail_certificate(
    phi: MonotoneBijection, comps: Sequence[Component], families: Sequence, depth: int
) -> dict | None:
    """Exact check of the three-case ordering of family orbits.

    Applies when phi is ``x -> x/lam`` (or its inverse) and every family
    shares that ratio, one seed per side of the origin.  For each family
    interval ``I_j`` and ``0 < |k| <= depth``::

        k < 0:       I_{j-k-1} <= phi^k(I_j) <= I_{j-k}
        0 < k <= j:  I_{j-k}   <= phi^k(I_j) <= I_{j-k+1}
        k > j:       phi^k(I_j) inside (0, seed)

    (mirrored for negative seeds), with ``<=`` meaning ordered as open
    intervals.  The closed form of the endpoint sequence makes these hold
    for every ``j`` and ``k``, so the truncated check extends to the tail.
    """
    if any(c.origin[0] != "family" for c in comps):
        return None
    if not isinstance(phi, Affine) or phi.intercept != 0:
        return None
    lams = {f.lam for f in families}
    if len(lams) != 1:
        return None
    (lam,) = lams
    if phi.slope == 1 / lam:
        sign = 1
    elif phi.slope == lam:
        sign = -1
    else:
        return None
    seeds = {f.seed for f in families}
    if len({s > 0 for s in seeds}) != len(seeds):
        return None

    checked = 0
    identity_err = Fraction(0)
    for seed in sorted(seeds):
        ref = GeometricGapFamily(lam, abs(seed), 1)
        max_j = max(f.depth for f in families if f.seed == seed)
        for n in range(max_j + 2):
            identity_err = max(identity_err, abs(ref.term(n) - ref.term_by_recurrence(n)))
        for j in range(max_j):
            I_j = ref.full_interval(j)
            for k in range(-depth, depth + 1):
                if k == 0:
                    continue
                kk = sign * k
                X = I_j if kk == 0 else Interval(I_j.lo / lam**kk, I_j.hi / lam**kk)
                if kk < 0:
                    ok = (
                        interval_order(ref.full_interval(j - kk - 1), X) is Order.BEFORE
                        and interval_order(X, ref.full_interval(j - kk)) is Order.BEFORE
                    )
                elif kk <= j:
                    ok = (
                        interval_order(ref.full_interval(j - kk), X) is Order.BEFORE
                        and interval_order(X, ref.full_interval(j - kk + 1)) is Order.BEFORE
                    )
                else:
                    ok = X.lo >= 0 and X.hi <= ref.seed
                if not ok:
                    return None
                checked += 1
    return {
        "rule": "geometric_family",
        "lambda": encode_number(lam),
        "seeds": [encode_number(s) for s in sorted(seeds)],
        "ordering_checks": checked,
        "endpoint_identity_max_error": float(identity_err),
    }


def _warn_truncated() -> None:
    warnings.warn(
        "geometric gap family truncated; the orbit tail is not certified",
        TruncationWarning,
        stacklevel=3,
    )


def wandering_check(
    phi: MonotoneBijection,
    gaps: GapSet,
    depth: int = DEFAULT_DEPTH,
    gaps2: GapSet | None = None,
) -> WanderingVerdict:
    """Classify ``S = gaps (u gaps2)`` as wandering for ``phi``.

    ``S`` meets ``phi^m(S)`` for some ``m != 0`` iff it does for some
    ``m > 0``, so only forward iterates ``m = 1 .. depth`` are searched; the
    first overlap (smallest m, then leftmost component) is the witness.  The
    case label is ``2*(source-1) + target`` where source and target say
    whether the components come from ``gaps`` (1) or ``gaps2`` (2).

    Without an overlap, each component is certified for all later iterates:
    the even and odd subsequences of its orbit are monotone (the square of
    phi is increasing), so they stay in a region bounded by the nearest
    fixed point of the square, the domain boundary, or infinity.  If that
    region is free of ``S`` the orbit never returns.  Geometric families
    use the exact ordering certificate of ``_family_tail_certificate``.
    """
    if phi.domain != phi.codomain:
        raise DomainError("wandering analysis needs a self-map")
    comps = tagged_components(gaps, gaps2)
    if not comps:
        return WanderingVerdict("wandering", rule="empty")
    for c in comps:
        if not phi.domain.contains(c.interval):
            raise DomainError(f"gap {c.interval} outside the domain {phi.domain}")

    M = int(depth)
    if M < 1:
        raise ValueError("depth must be positive")
    his = [c.interval.hi for c in comps]
    images = [[c.interval] for c in comps]
    for m in range(1, M + 1):
        for idx, comp in enumerate(comps):
            J = map_interval(phi, images[idx][-1])
            images[idx].append(J)
            target = _first_overlap(J, comps, his)
            if target is not None:
                back = iterate(phi, target.interval, -m)
                part = comp.interval.intersect(back)
                return WanderingVerdict(
                    "non_wandering", witness=Witness(comp, target, m, part), rule="overlap"
                )

    families = list(gaps.families) + (list(gaps2.families) if gaps2 is not None else [])
    if M < 2:
        # each parity of the orbit needs at least one iterate
        if families:
            _warn_truncated()
        return WanderingVerdict("inconclusive", reason=f"depth_exhausted: depth {M} < 2")
    if families:
        cert = _family_tail_certificate(phi, comps, families, M)
        if cert is not None:
            return WanderingVerdict("wandering", escape_certificates=[cert], rule="geometric_family")
        _warn_truncated()
        return WanderingVerdict(
            "inconclusive", reason=f"truncation: no overlap up to m={M}, family tail uncertified"
        )

    sq = compose(phi, phi)
    fixed = fixed_points_of_square(phi, phi.domain).all_values()
    certs = []
    for idx, comp in enumerate(comps):
        for parity in (0, 1):
            m = M if M % 2 == parity else M - 1
            J = images[idx][m]
            region, rule = _parity_region(sq, fixed, phi.domain, J)
            if not _region_is_free(region, comps):
                return WanderingVerdict(
                    "inconclusive",
                    escape_certificates=certs,
                    reason=f"depth_exhausted: orbit of {comp.interval} (parity {parity}) "
                    f"not separated from the gap set by m={M}",
                )
            certs.append(
                {
                    "component": comp.interval.to_json(),
                    "parity": parity,
                    "m": m,
                    "region": region.to_json(),
                    "rule": rule,
                }
            )
    return WanderingVerdict("wandering", escape_certificates=certs, rule="monotone_escape")
