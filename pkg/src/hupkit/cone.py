"""Uniqueness for the light cone against a pair of hyperplanes.

``S = {x : x_1^2 + ... + x_{n-1}^2 - x_n^2 = 0}`` and the zero set is
``H_{u1} u H_{u2}``.  The decision depends on the conic cut from the cone
by planes parallel to ``span(u1, v2)``, described by
``A s^2 + 2B st + C t^2 + 2D s + 2E t = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import (
    CriterionMismatch,
    DegenerateConic,
    DegenerateDirections,
    InstanceError,
    LightlikeNormal,
)
from .instances import HUP, NOT_HUP
from .rationality import RationalityResult, exact_rational, rationality_test

DISCRIMINANT_TOL = 1e-12
UNIT_TOL = 1e-9
LIGHTLIKE_TOL = 1e-12
DEFAULT_Q_MAX = 10_000
DEFAULT_TOL = 1e-9

__all__ = [
    "ConeInstance",
    "Frame",
    "SliceCoefficients",
    "RotationParams",
    "ConeDecision",
    "Q",
    "bilinear",
    "build_frame",
    "slice_coefficients",
    "classify",
    "rotation_params",
    "decide_cone",
    "decide_single_hyperplane",
    "cross_validate_hyperbola",
    "default_base_point",
]


def bilinear(x, y) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return float(x[:-1] @ y[:-1] - x[-1] * y[-1])


def Q(x) -> float:
    return bilinear(x, x)


@dataclass(frozen=True)
class ConeInstance:
    n: int
    u1: np.ndarray
    u2: np.ndarray
    theta_pi_rational: Fraction | None = None
    q_max: int = DEFAULT_Q_MAX

    def __post_init__(self):
        if self.n < 3:
            raise InstanceError("the cone needs n >= 3")
        vecs = []
        for name in ("u1", "u2"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (self.n,):
                raise InstanceError(f"{name} must have {self.n} entries")
            norm = float(np.linalg.norm(v))
            if abs(norm - 1) > UNIT_TOL:
                raise InstanceError(f"{name} is not a unit vector (norm {norm})")
            vecs.append(v / norm)
        object.__setattr__(self, "u1", vecs[0])
        object.__setattr__(self, "u2", vecs[1])
        if self.theta_pi_rational is not None:
            object.__setattr__(self, "theta_pi_rational", Fraction(self.theta_pi_rational))

    def swapped(self) -> "ConeInstance":
        return ConeInstance(self.n, self.u2, self.u1, self.theta_pi_rational, self.q_max)

    def to_json(self) -> dict:
        data: dict[str, Any] = {
            "n": self.n,
            "u1": [float(v) for v in self.u1],
            "u2": [float(v) for v in self.u2],
            "q_max": self.q_max,
        }
        if self.theta_pi_rational is not None:
            r = self.theta_pi_rational
            data["theta_pi_rational"] = [r.numerator, r.denominator]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "ConeInstance":
        allowed = {"n", "u1", "u2", "theta_pi_rational", "q_max", "schema_version"}
        unknown = set(data) - allowed
        if unknown:
            raise InstanceError(f"unknown cone fields {sorted(unknown)}")
        tpr = data.get("theta_pi_rational")
        if tpr is not None:
            if len(tpr) != 2 or int(tpr[1]) <= 0:
                raise InstanceError("theta_pi_rational must be [p, q] with q > 0")
            tpr = Fraction(int(tpr[0]), int(tpr[1]))
        return cls(
            int(data["n"]),
            np.asarray(data["u1"], dtype=float),
            np.asarray(data["u2"], dtype=float),
            tpr,
            int(data.get("q_max", DEFAULT_Q_MAX)),
        )


@dataclass(frozen=True)
class Frame:
    theta0: float
    v1: np.ndarray
    v2: np.ndarray

    def residuals(self, u1, u2) -> dict:
        c, s = math.cos(self.theta0), math.sin(self.theta0)
        return {
            "u2": float(np.max(np.abs(u2 - (c * u1 + s * self.v2)))),
            "v1": float(np.max(np.abs(self.v1 - (c * self.v2 - s * u1)))),
            "v2_u1": abs(float(self.v2 @ u1)),
            "v1_u2": abs(float(self.v1 @ u2)),
        }


def build_frame(u1, u2, theta0: float | None = None) -> Frame:
    """``v2`` completes ``u1`` to an orthonormal basis of ``span(u1, u2)``;
    ``v1`` does the same for ``u2``."""
    u1, u2 = np.asarray(u1, dtype=float), np.asarray(u2, dtype=float)
    cos0 = float(np.clip(u1 @ u2, -1.0, 1.0))
    w = u2 - cos0 * u1
    sin0 = float(np.linalg.norm(w))
    if sin0 < 1e-12:
        raise DegenerateDirections("u1 and u2 must not be parallel")
    if theta0 is None:
        theta0 = math.atan2(sin0, cos0)
    v2 = w / sin0
    c, s = math.cos(theta0), math.sin(theta0)
    v1 = c * v2 - s * u1
    return Frame(theta0, v1, v2)


@dataclass(frozen=True)
class SliceCoefficients:
    A: float
    B: float
    C: float
    D: float = 0.0
    E: float = 0.0

    @property
    def discriminant(self) -> float:
        return self.A * self.C - self.B**2

    @property
    def nondegeneracy(self) -> float:
        A, B, C, D, E = self.A, self.B, self.C, self.D, self.E
        return D**2 * (B**2 - A * C) - (A * E - B * D) ** 2


def default_base_point(n: int) -> np.ndarray:
    """Fixed generic point of the cone: ``(1, sqrt 2, ..., sqrt(n-1), r)`` with ``Q = 0``."""
    head = np.sqrt(np.arange(1, n, dtype=float))
    return np.concatenate([head, [np.linalg.norm(head)]])


def slice_coefficients(frame: Frame, u1, x=None) -> SliceCoefficients:
    u1 = np.asarray(u1, dtype=float)
    v2 = frame.v2
    D = E = 0.0
    if x is not None:
        D, E = bilinear(x, u1), bilinear(x, v2)
    return SliceCoefficients(Q(u1), bilinear(u1, v2), Q(v2), D, E)


def classify(A: float, B: float, C: float) -> str:
    d = A * C - B * B
    if abs(d) <= DISCRIMINANT_TOL:
        return "parabola"
    return "ellipse" if d > 0 else "hyperbola"


def _q(A, B, C, phi) -> float:
    c, s = math.cos(phi), math.sin(phi)
    return A * c * c + 2 * B * c * s + C * s * s


@dataclass(frozen=True)
class RotationParams:
    phi: float
    axis_ratio: float  # b/a (ellipse) or a0/b0 (hyperbola)
    g_phi: float
    g_perp: float
    classification: str

    def cross_term(self, A: float, B: float, C: float) -> float:
        """Coefficient of ``s't'`` after rotating by phi."""
        return 0.5 * (C - A) * math.sin(2 * self.phi) + B * math.cos(2 * self.phi)


def rotation_params(
    A: float, B: float, C: float, D: float | None = None, E: float | None = None
) -> RotationParams:
    """Rotation angle diagonalising the form and the resulting axis ratio.

    ``g(phi) = (B^2 - AC) A q(phi) / N`` with ``q(phi) = A c^2 + 2B cs + C s^2``
    and ``N = D^2 (B^2-AC) - (AE-BD)^2``.  Without a base point the factor
    ``(B^2 - AC) A / N`` is replaced by its sign: +1 for hyperbolas (it only
    decides which root of ``tan 2phi = 2B/(A-C)`` is labelled phi, and the
    criteria are unchanged) and ``sign(A)`` for ellipses.
    """
    cls = classify(A, B, C)
    if cls == "parabola":
        raise DegenerateConic("a parabolic slice has no rotation normal form")
    # for a real elliptic slice N < 0, so the factor has the sign of A
    scale = 1.0 if cls == "hyperbola" else math.copysign(1.0, A)
    if D is not None and E is not None:
        N = D**2 * (B**2 - A * C) - (A * E - B * D) ** 2
        if abs(N) <= 1e-12:
            raise DegenerateConic("degenerate slice through the chosen base point")
        scale = (B**2 - A * C) * A / N

    if cls == "ellipse" and abs(A - C) <= 1e-12 and abs(B) <= 1e-12:
        phi1 = 0.0
    else:
        phi1 = (0.5 * math.atan2(2 * B, A - C)) % (math.pi / 2)
    cands = [phi1, phi1 + math.pi / 2]
    g = [scale * _q(A, B, C, p) for p in cands]
    if cls == "hyperbola":
        i = 0 if g[0] > 0 else 1
        phi, g_phi, g_perp = cands[i], g[i], g[1 - i]
        # phi + pi/2 and phi - pi/2 have the same tangent and the same g
        ratio = math.sqrt(-g_perp / g_phi)
    else:
        if g[0] <= 0 or g[1] <= 0:
            raise DegenerateConic("the elliptic slice through the base point is not real")
        i = 0 if g[1] >= g[0] else 1
        phi, g_phi, g_perp = cands[i], g[i], g[1 - i]
        ratio = math.sqrt(g_phi / g_perp)
    return RotationParams(phi, ratio, g_phi, g_perp, cls)


@dataclass
class ConeDecision:
    verdict: str
    classification: str
    trace: list = field(default_factory=list)
    conditional: bool = False
    x_over_pi: dict | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        data: dict[str, Any] = {
            "verdict": self.verdict,
            "classification": self.classification,
            "conditional": self.conditional,
            "trace": list(self.trace),
            "details": self.details,
        }
        if self.x_over_pi is not None:
            data["x_over_pi"] = self.x_over_pi
        return data


def _angle_map(r: float, theta: float) -> float:
    """``arctan(r tan theta)`` continued through ``theta = pi/2`` (values mod pi)."""
    return math.atan2(r * math.sin(theta), math.cos(theta))


def _mod1_distance(x: float, y: float) -> float:
    d = (x - y) % 1.0
    return min(d, 1.0 - d)


def ellipse_x_over_pi(theta0: float, params: RotationParams) -> tuple[float, float]:
    """Both forms of the ellipse criterion, reduced to [0, 1).

    Sum form ``arctan(r tan(theta0 - phi)) + arctan(r tan phi)`` and the
    difference form with ``theta1 = pi - phi``, ``theta2 = theta0 - phi``.
    """
    r, phi = params.axis_ratio, params.phi
    total = (_angle_map(r, theta0 - phi) + _angle_map(r, phi)) / math.pi
    diff = (_angle_map(r, theta0 - phi) - _angle_map(r, math.pi - phi)) / math.pi
    return total % 1.0, diff % 1.0


def _check_lightlike(u, name: str, tol: float) -> None:
    if abs(Q(u)) <= tol:
        raise LightlikeNormal(
            f"Q({name}) = 0: {name} is light-like; decide that hyperplane with "
            "decide_single_hyperplane"
        )


def decide_cone(
    instance: ConeInstance,
    q_max: int | None = None,
    tol: float = DEFAULT_TOL,
    base_point=None,
    lightlike: str = "reduce",
) -> ConeDecision:
    """Decide ``(S, H_{u1} u H_{u2})``.

    A light-like normal makes its hyperplane a uniqueness set by itself, and
    so the union is one too.  ``lightlike="reduce"`` returns that verdict;
    ``"reject"`` raises :class:`LightlikeNormal` instead.
    """
    u1, u2 = instance.u1, instance.u2
    q_max = instance.q_max if q_max is None else q_max
    if lightlike not in ("reduce", "reject"):
        raise ValueError("lightlike must be 'reduce' or 'reject'")
    null = [name for name, u in (("u1", u1), ("u2", u2)) if abs(Q(u)) <= LIGHTLIKE_TOL]
    if null and lightlike == "reject":
        _check_lightlike(u1, "u1", LIGHTLIKE_TOL)
        _check_lightlike(u2, "u2", LIGHTLIKE_TOL)
    theta0 = None
    if instance.theta_pi_rational is not None:
        theta0 = float(instance.theta_pi_rational) * math.pi
        if abs(math.cos(theta0) - float(u1 @ u2)) > 1e-9:
            raise InstanceError("theta_pi_rational disagrees with the angle between u1 and u2")
    frame = build_frame(u1, u2, theta0)
    x = default_base_point(instance.n) if base_point is None else np.asarray(base_point, float)
    coeffs = slice_coefficients(frame, u1, x)
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    cls = classify(A, B, C)
    trace = [
        f"theta0 = {frame.theta0!r}",
        f"A = {A!r}, B = {B!r}, C = {C!r}, AC - B^2 = {coeffs.discriminant!r}",
        f"slice classification: {cls}",
    ]
    details: dict[str, Any] = {"A": A, "B": B, "C": C, "theta0": frame.theta0}

    if null:
        details["lightlike"] = null
        trace.append(
            f"Q({null[0]}) = 0: H_{null[0]} alone is a uniqueness set "
            "(decide_single_hyperplane), hence so is the union"
        )
        return ConeDecision(HUP, cls, trace, details=details)

    if cls == "parabola":
        trace.append("parabolic slices always give uniqueness")
        return ConeDecision(HUP, cls, trace, details=details)

    if cls == "hyperbola":
        bv = bilinear(frame.v1, frame.v2)
        closed = C * math.cos(frame.theta0) - B * math.sin(frame.theta0)
        if abs(bv - closed) > 1e-10:
            raise CriterionMismatch(f"B(v1, v2) = {bv} but C cos - B sin = {closed}")
        details["B_v1_v2"] = bv
        verdict = HUP if abs(bv) > tol else NOT_HUP
        trace.append(f"B(v1, v2) = {bv!r}")
        return ConeDecision(verdict, cls, trace, details=details)

    params = _rotation_with_base_point(frame, u1, x, base_point is None)
    total, diff = ellipse_x_over_pi(frame.theta0, params)
    if _mod1_distance(total, diff) > 1e-9:
        raise CriterionMismatch(f"sum form {total} and difference form {diff} disagree")
    details.update(phi=params.phi, axis_ratio=params.axis_ratio, x=total)
    trace.append(f"phi = {params.phi!r}, b/a = {params.axis_ratio!r}, x/pi = {total!r}")

    circle = abs(A - C) <= 1e-12 and abs(B) <= 1e-12
    if circle and instance.theta_pi_rational is not None:
        r = instance.theta_pi_rational % 1
        result: RationalityResult = exact_rational(r.numerator, r.denominator)
        trace.append(f"circle slice with exact angle: x/pi = {r}")
    else:
        result = rationality_test(total, q_max, tol)
    x_json = {"value": total, **result.to_json()}
    if result.rational:
        trace.append(f"x/pi = {result.p}/{result.q} is rational")
        return ConeDecision(NOT_HUP, cls, trace, False, x_json, details)
    trace.append(f"no rational with denominator <= {q_max} within {tol}: verdict conditional")
    return ConeDecision(HUP, cls, trace, True, x_json, details)


def _rotation_with_base_point(frame: Frame, u1, x, may_move: bool) -> RotationParams:
    """Rotation parameters, moving the default base point off degenerate slices."""
    tries = [x]
    if may_move:
        # the verdict does not depend on the point, so any generic one will do
        tries += [x * np.concatenate([np.full(x.size - 1, (-1.0) ** k), [1.0]]) for k in (1,)]
        tries += [np.roll(x[:-1], k).tolist() + [x[-1]] for k in range(1, x.size - 1)]
    err: DegenerateConic | None = None
    for pt in tries:
        co = slice_coefficients(frame, u1, np.asarray(pt, dtype=float))
        try:
            return rotation_params(co.A, co.B, co.C, co.D, co.E)
        except DegenerateConic as exc:
            err = exc
    assert err is not None
    raise err


def decide_single_hyperplane(u, tol: float = DEFAULT_TOL) -> ConeDecision:
    u = np.asarray(u, dtype=float)
    if u.size < 3:
        raise InstanceError("the cone needs n >= 3")
    qu = Q(u)
    verdict = HUP if abs(qu) <= tol else NOT_HUP
    return ConeDecision(verdict, "single_hyperplane", [f"Q(u) = {qu!r}"], details={"Q_u": qu})


# --------------------------------------------------------------------------
# cross-validation against the tangent criterion


def _reduce_angle(theta: float) -> float:
    t = theta % math.pi
    return 0.0 if math.isclose(t, math.pi, abs_tol=1e-12) else t


def tangent_criterion(A: float, B: float, C: float, theta0: float, rel_tol: float = 1e-8) -> bool:
    """HUP verdict for a hyperbolic slice read off the two lines in the rotated frame.

    The normals become the lines at angles ``pi - phi`` and ``theta0 - phi``
    in the principal axes of ``s'^2/a0^2 - t'^2/b0^2 = 1``.
    """
    params = rotation_params(A, B, C)
    ratio = params.axis_ratio
    th1 = _reduce_angle(math.pi - params.phi)
    th2 = _reduce_angle(theta0 - params.phi)

    def is_zero(t):
        return min(t, math.pi - t) <= 1e-12

    def is_right(t):
        return abs(t - math.pi / 2) <= 1e-12

    def asymptote(t):
        return not is_right(t) and math.isclose(abs(math.tan(t)), ratio, rel_tol=rel_tol)

    if asymptote(th1) or asymptote(th2):
        return True
    if is_zero(th1) or is_zero(th2):
        other = th2 if is_zero(th1) else th1
        return not is_right(other)
    if is_right(th1) or is_right(th2):
        return True
    product = math.tan(th1) * math.tan(th2)
    return not math.isclose(product, ratio**2, rel_tol=rel_tol)


@dataclass
class CrossValidationReport:
    trials: int
    hyperbolas: int
    skipped: int
    constructed: int
    disagreements: list

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "hyperbolas": self.hyperbolas,
            "skipped": self.skipped,
            "constructed": self.constructed,
            "disagreements": self.disagreements,
        }


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def _random_timelike_or_spacelike(rng, n) -> np.ndarray:
    while True:
        u = _random_unit(rng, n)
        if abs(Q(u)) > 1e-3:
            return u


def cross_validate_hyperbola(
    trials: int = 1000, rng: np.random.Generator | None = None, n: int = 3, tol: float = DEFAULT_TOL
) -> CrossValidationReport:
    """Compare ``B(v1, v2) != 0`` with the tangent criterion on random instances.

    Half of the trials are random pairs; the other half are built with
    ``tan(theta0) = C/B`` so that ``B(v1, v2) = 0``.  Non-hyperbolic slices
    are skipped and counted.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    disagreements, skipped, hyperbolas, constructed = [], 0, 0, 0
    for i in range(trials):
        u1 = _random_timelike_or_spacelike(rng, n)
        if i % 2 == 0:
            u2 = _random_timelike_or_spacelike(rng, n)
        else:
            w = rng.normal(size=n)
            w -= (w @ u1) * u1
            v2 = w / np.linalg.norm(w)
            B0, C0 = bilinear(u1, v2), Q(v2)
            th = math.atan2(C0, B0) % math.pi or math.pi / 2
            u2 = math.cos(th) * u1 + math.sin(th) * v2
            constructed += 1
        if abs(abs(float(u1 @ u2)) - 1) < 1e-9 or abs(Q(u2)) <= 1e-9:
            skipped += 1
            continue
        frame = build_frame(u1, u2)
        co = slice_coefficients(frame, u1)
        if classify(co.A, co.B, co.C) != "hyperbola":
            skipped += 1
            continue
        hyperbolas += 1
        by_form = abs(bilinear(frame.v1, frame.v2)) > tol
        by_tangent = tangent_criterion(co.A, co.B, co.C, frame.theta0)
        if by_form != by_tangent:
            disagreements.append({"trial": i, "u1": u1.tolist(), "u2": u2.tolist()})
    return CrossValidationReport(trials, hyperbolas, skipped, constructed, disagreements)
