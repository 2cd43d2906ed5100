"""Explicit annihilating measures on the coordinate cross.

A measure ``f dx1 (x) delta0 + delta0 (x) g dx2`` has Fourier transform
``mu^(xi1, xi2) = f^(xi1) + g^(xi2)``, so a counterexample is a pair of
compactly supported functions ``(f^, g^)`` on the frequency side.  Each side
is a sum of pieces ``sign * base(pullback(t))`` where ``base`` is a fixed
smooth bump and ``pullback`` is an exact monotone bijection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .curves import (
    Affine,
    Interval,
    MonotoneBijection,
    bijection_from_json,
    compose,
    map_interval,
    power,
)
from .dynamics import GapSet, Order, interval_order, iterate
from .errors import (
    CertificateMismatch,
    DegenerateInterval,
    FixedPointInsideInterval,
    OrbitOverlap,
    ShrinkFailed,
)
from .instances import CrossInstance
from .serialization import encode_number, exact, is_finite

MIN_WIDTH = 1e-9
PASS_NONTRIVIALITY = 0.5


# --------------------------------------------------------------------------
# bumps


@dataclass(frozen=True)
class SmoothBump:
    """``amplitude * e * exp(-1/(1-t^2))`` with ``t`` the rescaled position in ``support``.

    The factor ``e`` makes the peak value at the midpoint equal ``amplitude``.
    """

    support: Interval
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.support.bounded or self.support.width < MIN_WIDTH:
            raise DegenerateInterval(f"bump support {self.support} too short or unbounded")

    @property
    def peak(self) -> Fraction:
        return self.support.midpoint

    def __call__(self, xs) -> np.ndarray:
        x = np.asarray(xs, dtype=float)
        lo, hi = self.support.as_floats()
        c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        t = (x - c) / r
        out = np.zeros_like(x)
        inside = np.abs(t) < 1.0  # NaN compares False
        ti = t[inside]
        out[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - ti * ti))
        return out

    def to_json(self) -> dict:
        return {"support": self.support.to_json(), "amplitude": self.amplitude}

    @classmethod
    def from_json(cls, data: dict) -> "SmoothBump":
        return cls(Interval.from_json(data["support"]), float(data.get("amplitude", 1.0)))


@dataclass(frozen=True)
class BumpSum:
    terms: tuple

    @property
    def support(self) -> Interval:
        return Interval(min(t.support.lo for t in self.terms), max(t.support.hi for t in self.terms))

    @property
    def peaks(self) -> list[Fraction]:
        return [t.peak for t in self.terms]

    @property
    def sup_norm(self) -> float:
        return max(abs(t.amplitude) for t in self.terms)

    def __call__(self, xs) -> np.ndarray:
        x = np.asarray(xs, dtype=float)
        out = np.zeros_like(x)
        for t in self.terms:
            out += t(x)
        return out

    def to_json(self) -> list:
        return [t.to_json() for t in self.terms]

    @classmethod
    def from_json(cls, data: list) -> "BumpSum":
        return cls(tuple(SmoothBump.from_json(t) for t in data))


def bump(
    interval: Interval, zero_at_origin: bool = False, *, zero_at=None, amplitude: float = 1.0
) -> BumpSum:
    """Nonzero smooth function supported in ``interval``.

    With a zero point ``p`` inside the interval (the origin when
    ``zero_at_origin``), two bumps of opposite sign are placed on
    ``(p-w, p)`` and ``(p, p+w)`` so the value at ``p`` is exactly 0.
    """
    if not interval.bounded or interval.width < MIN_WIDTH:
        raise DegenerateInterval(f"interval {interval} too short or unbounded for a bump")
    p = exact(zero_at) if zero_at is not None else (Fraction(0) if zero_at_origin else None)
    if p is None or not interval.contains_point(p):
        return BumpSum((SmoothBump(interval, amplitude),))
    w = min(p - interval.lo, interval.hi - p)
    if w < MIN_WIDTH:
        raise DegenerateInterval(f"zero point {p} too close to the end of {interval}")
    return BumpSum(
        (SmoothBump(Interval(p - w, p), amplitude), SmoothBump(Interval(p, p + w), -amplitude))
    )


# --------------------------------------------------------------------------
# Fourier pairs


@dataclass(frozen=True)
class Piece:
    """``sign * base(pullback(t))`` on ``support``, zero elsewhere."""

    support: Interval
    sign: int
    base: BumpSum
    pullback: MonotoneBijection | None = None
    transform: str = "id"

    def __call__(self, xs) -> np.ndarray:
        x = np.asarray(xs, dtype=float)
        lo, hi = self.support.as_floats()
        inside = (x > lo) & (x < hi)
        out = np.zeros_like(x)
        if not inside.any():
            return out
        pts = x[inside]
        if self.pullback is not None:
            pts = self.pullback.evaluate(pts)
        out[inside] = self.sign * self.base(pts)
        return out

    def peak_points(self) -> list[Fraction]:
        """Points of the support where the piece attains the peaks of its base."""
        if self.pullback is None:
            return list(self.base.peaks)
        inv = self.pullback.inverse()
        return [inv(p) for p in self.base.peaks if inv.domain.contains_point(p)]

    def to_json(self) -> dict:
        return {
            "interval": self.support.to_json(),
            "sign": self.sign,
            "transform": self.transform,
            "pullback": None if self.pullback is None else self.pullback.to_json(),
            "base": self.base.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Piece":
        pb = data.get("pullback")
        sign = int(data["sign"])
        if sign not in (-1, 1):
            raise ValueError("piece sign must be +1 or -1")
        return cls(
            Interval.from_json(data["interval"]),
            sign,
            BumpSum.from_json(data["base"]),
            None if pb is None else bijection_from_json(pb),
            data.get("transform", "id"),
        )


@dataclass(frozen=True)
class FourierPair:
    f_pieces: tuple = ()
    g_pieces: tuple = ()
    kind: str = "thm1"
    construction: str = ""
    instance_kind: str | None = None
    params: dict = field(default_factory=dict)

    def f_hat(self, xs) -> np.ndarray:
        return _sum_pieces(self.f_pieces, xs)

    def g_hat(self, xs) -> np.ndarray:
        return _sum_pieces(self.g_pieces, xs)

    @property
    def f_supports(self) -> list[Interval]:
        return [p.support for p in self.f_pieces]

    @property
    def g_supports(self) -> list[Interval]:
        return [p.support for p in self.g_pieces]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "construction": self.construction,
            "instance_kind": self.instance_kind,
            "params": self.params,
            "supports": {
                "f": [s.to_json() for s in self.f_supports],
                "g": [s.to_json() for s in self.g_supports],
            },
            "f_pieces": [p.to_json() for p in self.f_pieces],
            "g_pieces": [p.to_json() for p in self.g_pieces],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FourierPair":
        if data.get("kind") not in ("thm1", "thm2A", "orbit", "zero"):
            raise ValueError(f"unknown certificate kind {data.get('kind')!r}")
        return cls(
            tuple(Piece.from_json(p) for p in data.get("f_pieces", [])),
            tuple(Piece.from_json(p) for p in data.get("g_pieces", [])),
            data["kind"],
            data.get("construction", ""),
            data.get("instance_kind"),
            dict(data.get("params", {})),
        )


def _sum_pieces(pieces: Sequence[Piece], xs) -> np.ndarray:
    x = np.asarray(xs, dtype=float)
    out = np.zeros_like(x)
    for p in pieces:
        out += p(x)
    return out


def zero_pair(instance_kind: str | None = None) -> FourierPair:
    return FourierPair(kind="zero", construction="zero", instance_kind=instance_kind)


# --------------------------------------------------------------------------
# constructions


def build_thm1_cex(instance: CrossInstance, gap: Interval, side: str) -> FourierPair:
    """Counterexample from a gap in one projection of an axis instance.

    ``side='f'`` uses a gap of ``gaps1`` and ``side='g'`` a gap of ``gaps2``.
    """
    if side not in ("f", "g"):
        raise ValueError("side must be 'f' or 'g'")
    kind = instance.kind
    params = {"gap": gap.to_json(), "side": side}
    if kind == "axis_axis":
        # f^(xi) + g^(a) = 0 off gaps1 and f^(b) + g^(eta) = 0 off gaps2
        if side == "f":
            f = (Piece(gap, 1, bump(gap, zero_at=instance.b)),)
            return FourierPair(f, (), "thm1", "f_side", kind, params)
        g = (Piece(gap, 1, bump(gap, zero_at=instance.a)),)
        return FourierPair((), g, "thm1", "g_side", kind, params)
    if kind == "axis_graph":
        T = instance.T2
        if side == "f":
            # h in the gap, s = -h o T^-1, and h vanishes where g^ is read at a
            h = bump(gap, zero_at=T.inverse()(instance.a))
            f = (Piece(gap, 1, h),)
            g = (Piece(map_interval(T, gap), -1, h, T.inverse(), "T_inv"),)
            return FourierPair(f, g, "thm1", "f_side", kind, params)
        img = map_interval(T, gap)
        g = (Piece(img, 1, bump(img, zero_at=instance.a)),)
        params["image"] = img.to_json()
        return FourierPair((), g, "thm1", "g_side", kind, params)
    raise ValueError(f"no projection counterexample for {kind}")


def build_support_gap_cex(instance: CrossInstance, gap: Interval) -> FourierPair:
    """A bump in a common gap of both curves, with ``g^ = 0``."""
    f = (Piece(gap, 1, bump(gap)),)
    return FourierPair(f, (), "thm1", "support_gap", instance.kind, {"gap": gap.to_json()})


def build_range_gap_cex(instance: CrossInstance, gap: Interval) -> FourierPair:
    """A bump in a common gap of ``T1(gaps1)`` and ``T2(gaps2)``, with ``f^ = 0``."""
    g = (Piece(gap, 1, bump(gap)),)
    return FourierPair((), g, "thm1", "range_gap", instance.kind, {"gap": gap.to_json()})


def build_identity_cex(
    T1: MonotoneBijection, T2: MonotoneBijection, I: Interval, instance_kind: str = "graph_graph"
) -> FourierPair:
    """Counterexample on an interval where ``phi o phi = id``.

    Increasing phi is the identity on I: ``f^ = h`` on I, ``g^ = -h o T2^-1``.
    Decreasing phi has one fixed point; the larger side of I around it is
    used as ``I~``, with ``f^ = h1`` on ``I~`` and ``h1 o phi^-1`` on
    ``phi(I~)``, ``g^ = -h1 o T1^-1`` on ``T1(I~)`` and
    ``-h1 o phi^-1 o T1^-1`` on ``T1 phi(I~)``.
    """
    phi = compose(T2.inverse(), T1)
    params: dict[str, Any] = {"interval": I.to_json()}
    if phi.increasing:
        h = bump(I)
        f = (Piece(I, 1, h),)
        g = (Piece(map_interval(T2, I), -1, h, T2.inverse(), "T2_inv"),)
        params["direction"] = "increasing"
        return FourierPair(f, g, "thm2A", "identity_increasing", instance_kind, params)

    xi0 = _decreasing_fixed_point(phi)
    sub = I
    if I.contains_point(xi0):
        left, right = Interval(I.lo, xi0), Interval(xi0, I.hi)
        sub = right if right.width >= left.width else left
    if sub.width < MIN_WIDTH:
        raise FixedPointInsideInterval(f"no room beside the fixed point {xi0} in {I}")
    image = map_interval(phi, sub)
    if sub.overlaps(image):
        raise FixedPointInsideInterval(f"{sub} meets its image {image}")
    h1 = bump(sub)
    phi_inv = phi.inverse()
    T1_inv = T1.inverse()
    f = (Piece(sub, 1, h1), Piece(image, 1, h1, phi_inv, "phi_inv"))
    g = (
        Piece(map_interval(T1, sub), -1, h1, T1_inv, "T1_inv"),
        Piece(map_interval(T1, image), -1, h1, compose(phi_inv, T1_inv), "phi_inv.T1_inv"),
    )
    params.update(direction="decreasing", fixed_point=encode_number(xi0), sub_interval=sub.to_json())
    return FourierPair(f, g, "thm2A", "identity_decreasing", instance_kind, params)


def _decreasing_fixed_point(phi: MonotoneBijection) -> Fraction:
    for lo, hi, s, c in phi.pieces():
        root = c / (1 - s)
        if lo <= root <= hi and phi.domain.contains_point(root):
            return root
    raise FixedPointInsideInterval("decreasing map without a fixed point")


def _strictly_apart(I: Interval, J: Interval) -> bool:
    return I.hi < J.lo or J.hi < I.lo


def _bounded_seed(phi: MonotoneBijection, I: Interval) -> Interval:
    if I.bounded:
        return I
    if is_finite(I.hi):
        return Interval(I.hi - 1, I.hi)
    if is_finite(I.lo):
        return Interval(I.lo, I.lo + 1)
    return Interval(0, 1)


def shrink_seed(phi: MonotoneBijection, I: Interval, max_bisections: int = 64) -> Interval:
    """Sub-interval ``I0`` of ``I`` with ``I0``, ``phi(I0)``, ``phi^2(I0)`` pairwise apart.

    Candidates are ``I`` itself and then halvings toward the upper and the
    lower endpoint.  Closures are required to be disjoint so that the bump
    supports built on the orbit never touch.
    """
    I = _bounded_seed(phi, I)
    w = I.width
    candidates = [I]
    for k in range(1, max_bisections + 1):
        step = w / 2**k
        candidates.append(Interval(I.hi - step, I.hi))
        candidates.append(Interval(I.lo, I.lo + step))
    for J in candidates:
        J1 = map_interval(phi, J)
        J2 = map_interval(phi, J1)
        if _strictly_apart(J, J1) and _strictly_apart(J, J2):
            return J
    raise ShrinkFailed(f"no sub-interval of {I} separates from its first two images")


def _chain_range(case: int, m: int) -> range:
    start = 0 if case in (3, 4) else 1
    stop = m if case in (1, 3) else m - 1
    return range(start, stop + 1)


def build_orbit_cex(
    T1: MonotoneBijection,
    T2: MonotoneBijection,
    I0: Interval,
    m: int,
    case: int,
    instance_kind: str = "graph_graph",
) -> FourierPair:
    """Counterexample supported on the orbit chain ``I0, phi(I0), ..., phi^m(I0)``.

    ``s(eta) = s0((T2 T1^-1)^k eta)`` on ``T1 phi^k(I0)`` for ``k = 0..m-1``
    and ``h(xi) = -s0(T1 phi^-k xi)`` on ``phi^k(I0)``.  The range of k for h
    depends on where the chain ends have to fall: it starts at 0 when
    ``I0`` sits in gaps2 and ends at m when ``phi^m(I0)`` sits in gaps1.

    case  source  target  h indices
    1     gaps1   gaps1   1 .. m
    2     gaps1   gaps2   1 .. m-1
    3     gaps2   gaps1   0 .. m
    4     gaps2   gaps2   0 .. m-1
    """
    if case not in (1, 2, 3, 4):
        raise ValueError(f"case must be 1..4, got {case!r}")
    if int(m) < 1:
        raise ValueError("orbit length m must be positive")
    m = int(m)
    phi = compose(T2.inverse(), T1)
    chain = [iterate(phi, I0, k) for k in range(m + 1)]
    images = [map_interval(T1, J) for J in chain]
    for seq, name in ((chain, "phi^k(I0)"), (images, "T1 phi^k(I0)")):
        for j in range(len(seq)):
            for k in range(j + 1, len(seq)):
                if interval_order(seq[j], seq[k]) is Order.OVERLAP:
                    raise OrbitOverlap(f"{name} pieces {j} and {k} overlap")

    s0 = bump(images[0])
    T1_inv = T1.inverse()
    Q = compose(T2, T1_inv)
    g_pieces = tuple(
        Piece(images[k], 1, s0, None if k == 0 else power(Q, k), "id" if k == 0 else f"(T2.T1_inv)^{k}")
        for k in range(m)
    )
    f_pieces = tuple(
        Piece(chain[k], -1, s0, compose(T1, power(phi, -k)), f"T1.phi^-{k}") for k in _chain_range(case, m)
    )
    params = {"I0": I0.to_json(), "m": m, "case": case, "chain": [J.to_json() for J in chain]}
    return FourierPair(f_pieces, g_pieces, "orbit", f"orbit_case_{case}", instance_kind, params)


# --------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    max_violation: float
    nontriviality: float
    samples: int
    tol: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol and self.nontriviality >= PASS_NONTRIVIALITY

    def to_json(self) -> dict:
        return {
            "max_violation": float(self.max_violation),
            "nontriviality": float(self.nontriviality),
            "samples": int(self.samples),
            "tol": float(self.tol),
            "pass": self.passed,
            "checks": {k: float(v) for k, v in sorted(self.checks.items())},
        }


def _hull(intervals: Iterable[Interval]) -> tuple[float, float] | None:
    ivs = [iv for iv in intervals if iv is not None]
    if not ivs:
        return None
    return float(min(iv.lo for iv in ivs)), float(max(iv.hi for iv in ivs))


def _grid(bounds: tuple[float, float] | None, samples: int, mandatory: Iterable) -> np.ndarray:
    pts = [float(p) for p in mandatory if is_finite(p)]
    if bounds is not None:
        lo, hi = bounds
        pad = 0.1 * max(hi - lo, 1e-6)
        lo, hi = lo - pad, hi + pad
        grid = np.linspace(lo, hi, samples)
        pts = [p for p in pts if lo <= p <= hi]
        return np.unique(np.concatenate([grid, np.asarray(pts, dtype=float)]))
    return np.unique(np.asarray(pts, dtype=float))


def _outside_gaps(xs: np.ndarray, gaps: GapSet) -> np.ndarray:
    keep = np.ones(xs.shape, dtype=bool)
    comps = gaps.components()
    if not comps:
        return xs
    los = np.array([float(c.interval.lo) for c in comps])
    his = np.array([float(c.interval.hi) for c in comps])
    idx = np.searchsorted(los, xs, side="left") - 1
    valid = idx >= 0
    keep[valid] = ~(xs[valid] < his[idx[valid]])
    # a point equal to a left endpoint is not inside an open gap
    return xs[keep]


def _sample_line(
    bounds: tuple[float, float] | None,
    samples: int,
    mandatory: Iterable,
    gaps: GapSet,
    domain: tuple[float, float] | None = None,
) -> np.ndarray:
    """``samples`` grid points of the padded window minus the open gaps.

    The count is split across the surviving segments by length, so the
    zero set always receives the full budget.
    """
    if bounds is None:
        return _outside_gaps(_grid(None, samples, mandatory), gaps)
    lo, hi = bounds
    pad = 0.1 * max(hi - lo, 1e-6)
    lo, hi = lo - pad, hi + pad
    if domain is not None:
        lo, hi = max(lo, domain[0]), min(hi, domain[1])
    segments = []
    cursor = lo
    for c in gaps.components():
        g_lo, g_hi = c.interval.as_floats()
        if g_hi <= cursor:
            continue
        if g_lo >= hi:
            break
        if g_lo > cursor:
            segments.append((cursor, g_lo))
        cursor = max(cursor, g_hi)
    if cursor < hi:
        segments.append((cursor, hi))
    total = sum(b - a for a, b in segments)
    parts = [np.asarray([float(p) for p in mandatory if is_finite(p)], dtype=float)]
    if total > 0:
        for a, b in segments:
            parts.append(np.linspace(a, b, max(2, int(np.ceil(samples * (b - a) / total)))))
    xs = np.unique(np.concatenate(parts))
    if domain is not None:
        xs = xs[(xs > domain[0]) & (xs < domain[1])]
    return _outside_gaps(xs, gaps)


def _preimages(T: MonotoneBijection, supports: Sequence[Interval]) -> list[Interval]:
    out = []
    inv = T.inverse()
    for s in supports:
        part = s.intersect(T.codomain)
        if part is not None:
            out.append(map_interval(inv, part))
    return out


def _piece_peaks(pieces: Sequence[Piece]) -> list[Fraction]:
    pts: list = []
    for p in pieces:
        pts += p.peak_points()
    return pts


def _endpoints(intervals: Iterable[Interval]) -> list:
    pts: list = []
    for iv in intervals:
        pts += [iv.lo, iv.hi]
    return pts


def _gap_endpoints(*gapsets: GapSet) -> list:
    return _endpoints(c.interval for g in gapsets for c in g.components())


def verify_vanishing(
    pair: FourierPair,
    instance: CrossInstance,
    samples: int = 10_000,
    tol: float = 1e-9,
    *,
    everywhere: bool = False,
) -> VerificationReport:
    """Sample ``|f^(xi1) + g^(xi2)|`` over the zero set of ``instance``.

    ``everywhere=True`` ignores the gaps and checks the graph identities on
    the whole window (used for identity-interval certificates).
    """
    if samples < 100:
        raise ValueError("at least 100 samples are required")
    if pair.instance_kind is not None and pair.instance_kind != instance.kind:
        raise CertificateMismatch(
            f"certificate built for {pair.instance_kind}, instance is {instance.kind}"
        )
    f, g = pair.f_hat, pair.g_hat
    fs, gs = pair.f_supports, pair.g_supports
    empty = GapSet()
    gaps1 = empty if everywhere else instance.gaps1
    gaps2 = empty if everywhere else instance.gaps2
    checks: dict[str, float] = {}
    count = 0

    def record(name: str, values: np.ndarray) -> None:
        nonlocal count
        count += values.size
        checks[name] = float(np.max(np.abs(values))) if values.size else 0.0

    kind = instance.kind
    f_peaks, g_peaks = _piece_peaks(pair.f_pieces), _piece_peaks(pair.g_pieces)
    if kind == "axis_axis":
        a, b = float(instance.a), float(instance.b)
        X1 = _sample_line(_hull(fs), samples, _endpoints(fs) + f_peaks + _gap_endpoints(instance.gaps1) + [instance.b], gaps1)
        Y2 = _sample_line(_hull(gs), samples, _endpoints(gs) + g_peaks + _gap_endpoints(instance.gaps2) + [instance.a], gaps2)
        record("line1", f(X1) + g(np.full_like(X1, a)))
        record("line2", f(np.full_like(Y2, b)) + g(Y2))
    else:
        curves = [("graph2", instance.T2, gaps2)] if kind == "axis_graph" else [
            ("graph1", instance.T1, gaps1),
            ("graph2", instance.T2, gaps2),
        ]
        spans = list(fs)
        for _, T, _ in curves:
            spans += _preimages(T, gs)
        mandatory = _endpoints(spans) + f_peaks
        for _, T, _ in curves:
            mandatory += _preimages_points(T, g_peaks)
        mandatory += _gap_endpoints(instance.gaps1, instance.gaps2)
        if kind == "bounded_graph_graph":
            dom = instance.T1.domain
            spans.append(dom)
            mandatory += [dom.lo, dom.hi]
        window = _hull(spans)
        X = _grid(window, samples, mandatory)
        if kind == "axis_graph":
            X1 = _sample_line(window, samples, mandatory, gaps1)
            record("line1", f(X1) + g(np.full_like(X1, float(instance.a))))
        for name, T, gaps in curves:
            Xi = _sample_line(window, samples, mandatory, gaps, T.domain.as_floats())
            record(name, f(Xi) + g(T.evaluate(Xi)))
        if kind == "bounded_graph_graph":
            dom, cod = instance.T1.domain, instance.T1.codomain
            d_lo, d_hi = dom.as_floats()
            c_lo, c_hi = cod.as_floats()
            Y = _grid(_hull(list(gs) + [cod]), samples, _endpoints(gs) + g_peaks + [cod.lo, cod.hi])
            right, left = X[X >= d_hi], X[X <= d_lo]
            record("ray1_right", f(right) + g(np.full_like(right, c_hi)))
            record("ray1_left", f(left) + g(np.full_like(left, c_lo)))
            up, down = Y[Y >= c_hi], Y[Y <= c_lo]
            record("ray2_left", f(np.full_like(up, d_lo)) + g(up))
            record("ray2_right", f(np.full_like(down, d_hi)) + g(down))

    Xf = _grid(_hull(fs), samples, f_peaks)
    Xg = _grid(_hull(gs), samples, g_peaks)
    nontriv = 0.0
    if Xf.size:
        nontriv = max(nontriv, float(np.max(np.abs(f(Xf)))))
    if Xg.size:
        nontriv = max(nontriv, float(np.max(np.abs(g(Xg)))))
    violation = max(checks.values()) if checks else 0.0
    return VerificationReport(violation, nontriv, count, tol, checks)


def _preimages_points(T: MonotoneBijection, pts: Sequence) -> list:
    inv = T.inverse()
    return [inv(p) for p in pts if T.codomain.contains_point(p)]


# --------------------------------------------------------------------------
# wave equation demo

_WAVE_PROFILE = SmoothBump(Interval(-1, 1))


def _wave_u(k1: float, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    kappa = (1.0 - k1) / (1.0 + k1)
    return _WAVE_PROFILE(kappa * (x + t)) - _WAVE_PROFILE(x - t)


def wave_demo(
    k1: float,
    n: int = 512,
    h: float = 1 / 64,
    lines: Sequence[float] | None = None,
    courant: float = 0.5,
) -> dict:
    """Residual of ``u(x,t) = h(((1-k1)/(1+k1))(x+t)) - h(x-t)`` in the wave equation.

    ``u`` is sampled on an ``n x n`` grid centred at the origin with spacing
    ``h`` in x and ``courant * h`` in t; ``u_tt - u_xx`` uses second-order
    central differences.  With ``courant = 1`` the stencil is exact on
    functions of ``x +- t`` and only round-off remains.  The trace is
    ``max |u|`` along ``t = c x`` for each slope ``c`` in ``lines`` (default
    ``k1`` and ``1/k1``).
    """
    k1 = float(k1)
    if k1 in (-1.0, 0.0):
        raise ValueError("k1 must differ from 0 and -1")
    coords = (np.arange(n) - n / 2) * h
    dt = courant * h
    X, T = np.meshgrid(coords, coords * courant, indexing="ij")
    u = _wave_u(k1, X, T)
    u_xx = (u[2:, 1:-1] - 2 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / h**2
    u_tt = (u[1:-1, 2:] - 2 * u[1:-1, 1:-1] + u[1:-1, :-2]) / dt**2
    residual = float(np.max(np.abs(u_tt - u_xx)))

    slopes = list(lines) if lines is not None else [k1, 1.0 / k1]
    xs = np.linspace(coords[0], coords[-1], 4 * n)
    trace = max(float(np.max(np.abs(_wave_u(k1, xs, c * xs)))) for c in slopes)
    return {
        "k1": k1,
        "n": n,
        "h": h,
        "courant": courant,
        "pde_residual": residual,
        "line_trace_max": trace,
        "lines": slopes,
    }


def wave_convergence(k1: float, ns: Sequence[int] = (128, 256, 512, 1024), length: float = 2.0) -> dict:
    """Grid refinement study on a fixed square; orders from successive residual ratios."""
    runs = [wave_demo(k1, n, length / n) for n in ns]
    res = [r["pde_residual"] for r in runs]
    orders = [math.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)]
    return {
        "k1": float(k1),
        "n": list(ns),
        "h": [r["h"] for r in runs],
        "pde_residual": res,
        "orders": orders,
        "line_trace_max": max(r["line_trace_max"] for r in runs),
    }
