"""Decision procedures for zero sets on the coordinate cross."""

from __future__ import annotations

import warnings
from fractions import Fraction

from .certificates import (
    build_identity_cex,
    build_orbit_cex,
    build_range_gap_cex,
    build_support_gap_cex,
    build_thm1_cex,
    shrink_seed,
)
from .curves import Affine, Interval, map_interval
from .dynamics import (
    DEFAULT_DEPTH,
    GapSet,
    detect_identity_interval,
    first_intersection,
    wandering_check,
)
from .errors import InstanceError, TruncationWarning
from .instances import HUP, NOT_HUP, UNKNOWN, CrossInstance, Decision

__all__ = [
    "density_check",
    "decide_axis",
    "decide_general",
    "decide_bounded",
    "decide",
    "identity_window",
]


def density_check(E: GapSet) -> bool:
    """True iff the complement of the open set ``E`` is dense, i.e. ``E`` is empty."""
    return E.is_empty


def _first_gap(E: GapSet) -> Interval:
    return E.components()[0].interval


def decide_axis(instance: CrossInstance) -> Decision:
    if instance.kind not in ("axis_axis", "axis_graph"):
        raise InstanceError(f"decide_axis cannot handle {instance.kind}")
    trace = [f"instance kind {instance.kind}"]
    for side, gaps, label in (("f", instance.gaps1, "pi1(Lambda1)"), ("g", instance.gaps2, "pi2(Lambda2)")):
        if density_check(gaps):
            trace.append(f"{label} is dense")
            continue
        gap = _first_gap(gaps)
        where = gap
        if side == "g" and instance.kind == "axis_graph":
            where = map_interval(instance.T2, gap)
        trace.append(f"{label} misses the interval {where}")
        cert = build_thm1_cex(instance, gap, side)
        return Decision(NOT_HUP, cert, trace, evidence={"gap": gap.to_json(), "side": side})
    trace.append("both projections dense")
    return Decision(HUP, {"kind": "density"}, trace)


def identity_window(instance: CrossInstance) -> Interval:
    """Bounded window searched for an interval where ``phi o phi = id``.

    Piecewise maps are affine outside their knots, so a window covering the
    knots of ``phi^2`` and all gap endpoints, padded by one, meets every
    identity piece.
    """
    phi = instance.phi
    if phi.domain.bounded:
        return phi.domain
    if isinstance(phi, Affine):
        return Interval(-1, 1)
    from .curves import compose

    pts = list(compose(phi, phi).knots()) + list(phi.knots())
    for g in (instance.gaps1, instance.gaps2):
        for iv in g.intervals:
            pts += [v for v in (iv.lo, iv.hi)]
    pts = [p for p in pts if isinstance(p, Fraction)] or [Fraction(0)]
    return Interval(min(pts) - 1, max(pts) + 1)


def _part_a(instance: CrossInstance, trace: list) -> Decision | None:
    window = identity_window(instance)
    ident = detect_identity_interval(instance.phi, window)
    if ident is None:
        trace.append(f"phi^2 is not the identity on any interval of {window}")
        return None
    trace.append(f"phi^2 = id on {ident}")
    cert = build_identity_cex(instance.T1, instance.T2, ident, instance.kind)
    return Decision(NOT_HUP, cert, trace, evidence={"identity_interval": ident.to_json()})


def _pipeline(instance: CrossInstance, depth: int, trace: list) -> Decision:
    decision = _part_a(instance, trace)
    if decision is not None:
        return decision

    overlap, certain = first_intersection(instance.gaps1, instance.gaps2)
    if overlap is not None:
        trace.append(f"both curves miss {overlap}: pi1(Lambda) is not dense")
        cert = build_support_gap_cex(instance, overlap)
        return Decision(NOT_HUP, cert, trace, evidence={"common_gap": overlap.to_json()})
    if not certain:
        trace.append("gap families may meet beyond their truncation depth")
        return Decision(UNKNOWN, None, trace, reason="truncation: gap intersection not certified")
    trace.append("pi1(Lambda) is dense")

    if instance.kind == "bounded_graph_graph":
        decision = _range_density(instance, trace)
        if decision is not None:
            return decision

    phi = instance.phi
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        verdict = wandering_check(phi, instance.gaps1, depth, gaps2=instance.gaps2)
    truncated = any(issubclass(w.category, TruncationWarning) for w in caught)
    evidence = {"wandering": verdict.to_json()}
    if verdict.kind == "wandering":
        trace.append(f"gap set is wandering ({verdict.rule})")
        return Decision(HUP, {"kind": "wandering", **evidence}, trace, evidence=evidence)
    if verdict.kind == "inconclusive":
        trace.append(f"wandering check inconclusive: {verdict.reason}")
        reason = verdict.reason or "depth_exhausted"
        if truncated and not reason.startswith("truncation"):
            reason = "truncation: " + reason
        return Decision(UNKNOWN, None, trace, reason=reason, evidence=evidence)

    w = verdict.witness
    trace.append(
        f"phi^{w.m} maps gap {w.component.interval} into gap {w.target.interval} (case {w.case})"
    )
    I0 = shrink_seed(phi, w.source_part)
    trace.append(f"seed interval {I0}")
    cert = build_orbit_cex(instance.T1, instance.T2, I0, w.m, w.case, instance.kind)
    return Decision(NOT_HUP, cert, trace, evidence=evidence)


def _range_density(instance: CrossInstance, trace: list) -> Decision | None:
    T1, T2 = instance.T1, instance.T2
    for c1 in instance.gaps1.components():
        img1 = map_interval(T1, c1.interval)
        for c2 in instance.gaps2.components():
            common = img1.intersect(map_interval(T2, c2.interval))
            if common is not None:
                trace.append(f"both curves miss second coordinates {common}: pi2(Lambda) is not dense")
                cert = build_range_gap_cex(instance, common)
                return Decision(NOT_HUP, cert, trace, evidence={"common_range_gap": common.to_json()})
    trace.append("pi2(Lambda) is dense")
    return None


def decide_general(instance: CrossInstance, depth: int = DEFAULT_DEPTH) -> Decision:
    if instance.kind != "graph_graph":
        raise InstanceError(f"decide_general cannot handle {instance.kind}")
    return _pipeline(instance, depth, [f"instance kind {instance.kind}"])


def decide_bounded(instance: CrossInstance, depth: int = DEFAULT_DEPTH) -> Decision:
    if instance.kind != "bounded_graph_graph":
        raise InstanceError(f"decide_bounded cannot handle {instance.kind}")
    dom, cod = instance.T1.domain, instance.T1.codomain
    return _pipeline(instance, depth, [f"instance kind {instance.kind} on {dom} -> {cod}"])


def decide(instance: CrossInstance, depth: int = DEFAULT_DEPTH) -> Decision:
    if instance.kind in ("axis_axis", "axis_graph"):
        return decide_axis(instance)
    if instance.kind == "graph_graph":
        return decide_general(instance, depth)
    return decide_bounded(instance, depth)
