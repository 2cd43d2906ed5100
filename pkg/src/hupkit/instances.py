"""Problem instances for the coordinate cross and decision records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any

from .curves import (
    Affine,
    BoundedPiecewiseLinear,
    Interval,
    MonotoneBijection,
    bijection_from_json,
)
from .dynamics import GapSet
from .errors import InstanceError
from .serialization import encode_number, exact

KINDS = ("axis_axis", "axis_graph", "graph_graph", "bounded_graph_graph")

HUP, NOT_HUP, UNKNOWN = "HUP", "NOT_HUP", "UNKNOWN"


@dataclass(frozen=True)
class CrossInstance:
    """Zero set ``Lambda = Lambda1 u Lambda2`` tested against the coordinate cross.

    * ``axis_axis``: ``Lambda1 = {(xi, a)}``, ``Lambda2 = {(b, eta)}``; gaps1
      lives on the first axis, gaps2 on the second.
    * ``axis_graph``: ``Lambda1 = {(xi, a)}``, ``Lambda2 = {(xi, T xi)}``.
    * ``graph_graph``: ``Lambdai = {(xi, Ti xi)}`` with Ti bijections of the line.
    * ``bounded_graph_graph``: Ti bijections ``(-a, a) -> (-b, b)`` with the
      four attached rays.

    ``gapsi`` is the open set of first coordinates (second for the vertical
    line of ``axis_axis``) missing from ``Lambdai``.
    """

    kind: str
    T1: MonotoneBijection | None = None
    T2: MonotoneBijection | None = None
    gaps1: GapSet = field(default_factory=GapSet)
    gaps2: GapSet = field(default_factory=GapSet)
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InstanceError(f"unknown instance kind {self.kind!r}")
        object.__setattr__(self, "a", exact(self.a))
        object.__setattr__(self, "b", exact(self.b))
        if self.kind == "axis_axis":
            return
        if self.kind == "axis_graph":
            if self.T2 is None:
                raise InstanceError("axis_graph needs the curve T")
            self._check_unbounded(self.T2)
            return
        if self.T1 is None or self.T2 is None:
            raise InstanceError(f"{self.kind} needs both T1 and T2")
        if self.kind == "graph_graph":
            self._check_unbounded(self.T1)
            self._check_unbounded(self.T2)
            return
        for T in (self.T1, self.T2):
            if not isinstance(T, BoundedPiecewiseLinear):
                raise InstanceError("bounded instances need bounded curves on both sides")
        if self.T1.domain != self.T2.domain or self.T1.codomain != self.T2.codomain:
            raise InstanceError("bounded curves must share domain and codomain")
        for g in (self.gaps1, self.gaps2):
            hull = g.hull()
            if hull is not None and not self.T1.domain.contains(hull):
                raise InstanceError(f"gaps {hull} leave the curve domain {self.T1.domain}")

    @staticmethod
    def _check_unbounded(T: MonotoneBijection) -> None:
        if T.domain.bounded or T.codomain.bounded:
            raise InstanceError(
                "curves on different kinds of domain are not supported; "
                "use bounded_graph_graph with two bounded curves"
            )

    @property
    def T(self) -> MonotoneBijection | None:
        return self.T2 if self.kind == "axis_graph" else None

    @property
    def phi(self) -> MonotoneBijection:
        from .curves import compose

        if self.T1 is None or self.T2 is None:
            raise InstanceError(f"{self.kind} has no return map")
        return compose(self.T2.inverse(), self.T1)

    def swapped(self) -> "CrossInstance":
        if self.kind not in ("graph_graph", "bounded_graph_graph"):
            raise InstanceError("only graph instances can swap curves")
        return replace(self, T1=self.T2, T2=self.T1, gaps1=self.gaps2, gaps2=self.gaps1)

    def to_json(self) -> dict:
        data: dict[str, Any] = {
            "kind": self.kind,
            "gaps1": self.gaps1.to_json(),
            "gaps2": self.gaps2.to_json(),
        }
        if self.kind == "axis_axis":
            data.update(a=encode_number(self.a), b=encode_number(self.b))
        elif self.kind == "axis_graph":
            data.update(a=encode_number(self.a), T=self.T2.to_json())
        else:
            data.update(T1=self.T1.to_json(), T2=self.T2.to_json())
        return data

    @classmethod
    def from_json(cls, data: dict) -> "CrossInstance":
        if not isinstance(data, dict) or "kind" not in data:
            raise InstanceError("instance must be an object with a 'kind' field")
        allowed = {"kind", "T1", "T2", "T", "gaps1", "gaps2", "a", "b", "schema_version"}
        unknown = set(data) - allowed
        if unknown:
            raise InstanceError(f"unknown instance fields {sorted(unknown)}")
        kind = data["kind"]
        gaps1 = GapSet.from_json(data.get("gaps1"))
        gaps2 = GapSet.from_json(data.get("gaps2"))
        if kind == "axis_axis":
            return cls(kind, gaps1=gaps1, gaps2=gaps2, a=data.get("a", 0), b=data.get("b", 0))
        if kind == "axis_graph":
            if "T" not in data:
                raise InstanceError("axis_graph needs 'T'")
            T = bijection_from_json(data["T"])
            return cls(kind, T2=T, gaps1=gaps1, gaps2=gaps2, a=data.get("a", 0))
        if "T1" not in data or "T2" not in data:
            raise InstanceError(f"{kind} needs 'T1' and 'T2'")
        T1, T2 = bijection_from_json(data["T1"]), bijection_from_json(data["T2"])
        return cls(kind, T1, T2, gaps1, gaps2)


def line(theta: float) -> Affine:
    """Line through the origin at angle ``theta`` as the graph ``xi -> tan(theta) xi``."""
    c = math.cos(theta)
    if abs(c) < 1e-15:
        raise InstanceError("a vertical line is not a graph over the first axis")
    t = math.tan(theta)
    if t == 0:
        raise InstanceError("a horizontal line is not a bijection")
    return Affine(t, 0)


@dataclass
class Decision:
    verdict: str
    certificate: Any = None
    trace: list = field(default_factory=list)
    reason: str | None = None
    evidence: dict | None = None

    def to_json(self) -> dict:
        data: dict[str, Any] = {"verdict": self.verdict, "trace": list(self.trace)}
        if self.reason:
            data["reason"] = self.reason
        if self.evidence is not None:
            data["evidence"] = self.evidence
        if self.certificate is not None:
            cert = self.certificate
            data["certificate"] = cert.to_json() if hasattr(cert, "to_json") else cert
        return data
