"""Acceptance suite: one marked group of tests per criterion.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; the
terminal summary prints one PASS/FAIL line per criterion.
"""

import json
import math
import os
import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest

from hupkit.certificates import shrink_seed, verify_vanishing, wave_convergence, wave_demo
from hupkit.cone import ConeInstance, cross_validate_hyperbola, decide_cone
from hupkit.curves import Affine, Interval, PiecewiseLinear, compose, map_interval
from hupkit.decider import decide, decide_axis, decide_general
from hupkit.dynamics import GapSet, GeometricGapFamily, Order, interval_order, iterate
from hupkit.errors import ShrinkFailed
from hupkit.instances import HUP, NOT_HUP, CrossInstance

ROOT = Path(__file__).resolve().parent.parent
INSTANCES = ROOT / "instances"
SAMPLES = 10_000


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def families(lam=4, depth=50, half=None):
    kw = {} if half is None else {"halving": True, "half": half}
    return [GeometricGapFamily(lam, 1, depth, **kw), GeometricGapFamily(lam, -1, depth, **kw)]


# ---------------------------------------------------------------- 1

C1 = criterion(1, "axis cross: density decides, gap certificates verify (<1 s each)")


@C1
def test_c01_dense_axes_are_unique():
    for a, b in [(0, 0), (1, -2), (F(1, 3), 5)]:
        d, dt = timed(decide_axis, CrossInstance("axis_axis", a=a, b=b))
        assert d.verdict == HUP and dt < 1.0


def _random_gap(rng):
    lo = F(int(rng.integers(-400, 400)), 40)
    return Interval(lo, lo + F(int(rng.integers(1, 120)), 40))


@C1
@pytest.mark.parametrize("side", ["gaps1", "gaps2"])
def test_c01_single_gap_certificates(side):
    rng = np.random.default_rng(101 if side == "gaps1" else 202)
    for _ in range(10):
        gap = _random_gap(rng)
        a, b = (F(int(x), 7) for x in rng.integers(-20, 20, size=2))
        inst = CrossInstance("axis_axis", a=a, b=b, **{side: GapSet([gap])})
        t0 = time.perf_counter()
        d = decide_axis(inst)
        report = verify_vanishing(d.certificate, inst, SAMPLES, 1e-8)
        assert time.perf_counter() - t0 < 1.0
        assert d.verdict == NOT_HUP and d.certificate.kind == "thm1"
        assert report.max_violation <= 1e-8 and report.nontriviality >= 0.5
        assert report.samples >= SAMPLES


# ---------------------------------------------------------------- 2

C2 = criterion(2, "mirror lines: identity-interval certificate vanishes on all of R (<1 s)")


@C2
@pytest.mark.parametrize("k", [1, 2, 0.5])
def test_c02_mirror_lines(k):
    T1, T2 = Affine(k, 0), Affine(-k, 0)
    inst = CrossInstance("graph_graph", T1, T2)
    t0 = time.perf_counter()
    d = decide_general(inst)
    pair = d.certificate
    rng = np.random.default_rng(7)
    lo, hi = min(s.as_floats()[0] for s in pair.f_supports), max(s.as_floats()[1] for s in pair.f_supports)
    xs = np.concatenate(
        [rng.uniform(-1e6, 1e6, SAMPLES // 2), rng.uniform(lo - 1, hi + 1, SAMPLES // 2)]
    )
    worst = max(
        float(np.max(np.abs(pair.f_hat(xs) + pair.g_hat(T.evaluate(xs))))) for T in (T1, T2)
    )
    assert time.perf_counter() - t0 < 1.0
    assert d.verdict == NOT_HUP and pair.kind == "thm2A"
    assert "identity_interval" in d.evidence
    assert worst <= 1e-10
    assert np.max(np.abs(pair.f_hat(xs))) >= 0.5 or np.max(np.abs(pair.g_hat(xs))) >= 0.5


# ---------------------------------------------------------------- 3

C3 = criterion(3, "bounded gap (4,20): non-wandering m=1 case 1, orbit certificate verifies (<1 s)")


@C3
def test_c03_bounded_gap():
    inst = CrossInstance("graph_graph", Affine(1, 0), Affine(4, 0), GapSet([Interval(4, 20)]))
    t0 = time.perf_counter()
    d = decide_general(inst)
    report = verify_vanishing(d.certificate, inst, SAMPLES, 1e-8)
    assert time.perf_counter() - t0 < 1.0
    w = d.evidence["wandering"]
    assert d.verdict == NOT_HUP and w["kind"] == "non_wandering"
    assert w["witness"]["m"] == 1 and w["witness"]["case"] == 1
    assert w["witness"]["component"]["interval"] == [4, 20]
    assert w["witness"]["source_part"] == [16, 20]
    assert d.certificate.kind == "orbit"
    assert report.passed and report.max_violation <= 1e-8


# ---------------------------------------------------------------- 4

C4 = criterion(4, "geometric families: wandering, orbit ordering holds for every interval (<5 s)")


def _closed_form(lam, a0, n):
    return lam * a0 - 0.5**n * (lam - 1) * a0


def _by_recurrence(lam, a0, count):
    out = [a0]
    for _ in range(count - 1):
        out.append((out[-1] + lam * a0) / 2)
    return out


def _before(I, J, rel=1e-12):
    """``I`` precedes ``J``, allowing a shared endpoint up to rounding."""
    return I[1] <= J[0] + rel * max(1.0, abs(J[0]))


@C4
def test_c04_wandering_families():
    lam, depth = 4, 50
    inst = CrossInstance("graph_graph", Affine(1, 0), Affine(lam, 0), GapSet(families=families(lam, depth)))
    d, dt = timed(decide_general, inst)
    assert dt < 5.0
    assert d.verdict == HUP and d.certificate["kind"] == "wandering"
    cert = d.certificate["wandering"]["escape_certificates"]
    assert cert and cert[0]["rule"] == "geometric_family"

    for a0 in (1.0, -1.0):
        seq = _by_recurrence(lam, abs(a0), depth + 2)
        for n, v in enumerate(seq):
            assert abs(v - _closed_form(lam, abs(a0), n)) <= 1e-12 * lam
        sign = 1 if a0 > 0 else -1

        def I(j):
            lo, hi = lam**j * seq[j], lam**j * seq[j + 1]
            return (lo, hi) if sign > 0 else (-hi, -lo)

        counts = {"before": 0, "between": 0, "inside": 0}
        for j in range(depth):
            for k in range(-depth, depth + 1):
                if k == 0 or (k < 0 and j - k > depth):
                    continue
                lo, hi = sorted((sign * lam ** (j - k) * seq[j], sign * lam ** (j - k) * seq[j + 1]))
                X = (lo, hi)
                if k < 0:
                    outer = (I(j - k - 1), I(j - k))
                elif k <= j:
                    outer = (I(j - k), I(j - k + 1))
                else:
                    assert 0 <= sign * lo and sign * hi <= abs(a0) * (1 + 1e-12)
                    counts["inside"] += 1
                    continue
                left, right = outer if sign > 0 else outer[::-1]
                assert _before(left, X) and _before(X, right), (a0, j, k)
                counts["before" if k < 0 else "between"] += 1
        assert min(counts.values()) > 500, counts


# ---------------------------------------------------------------- 5

C5 = criterion(5, "split-half families decide HUP; gap widths follow the closed form")


@C5
def test_c05_split_halves():
    inst = CrossInstance(
        "graph_graph", Affine(1, 0), Affine(4, 0),
        GapSet(families=families(half="lower")), GapSet(families=families(half="upper")),
    )
    assert decide_general(inst).verdict == HUP


@C5
def test_c05_gap_widths():
    lam, a0 = F(4), F(1)
    fam = GeometricGapFamily(lam, a0, 11)
    widths = [fam.width(j) for j in range(11)]
    assert widths == [(lam - 1) / 2 * (lam / 2) ** j * a0 for j in range(11)]
    assert all(b > a for a, b in zip(widths, widths[1:]))


# ---------------------------------------------------------------- 6

C6 = criterion(6, "1000 random affine maps: shrunk seeds have pairwise disjoint orbits to depth 32")


@C6
def test_c06_seed_orbits_disjoint():
    rng = np.random.default_rng(6)
    failures, done = 0, 0
    while done < 1000:
        p, q = int(rng.integers(1, 60)), int(rng.integers(1, 60))
        slope = F(p, q) * (1 if rng.random() < 0.5 else -1)
        intercept = F(int(rng.integers(-50, 50)), int(rng.integers(1, 20)))
        phi = Affine(slope, intercept)
        lo = F(int(rng.integers(-100, 100)), 10)
        I = Interval(lo, lo + F(int(rng.integers(1, 50)), 10))
        try:
            I0 = shrink_seed(phi, I)
        except ShrinkFailed:
            sq = phi.power(2)
            if not (sq.slope == 1 and sq.intercept == 0):
                failures += 1
            done += 1
            continue
        chain = [iterate(phi, I0, j) for j in range(33)]
        for i in range(33):
            for j in range(i + 1, 33):
                if interval_order(chain[i], chain[j]) is Order.OVERLAP:
                    failures += 1
                    break
            else:
                continue
            break
        done += 1
    assert failures == 0


# ---------------------------------------------------------------- 7

C7 = criterion(7, "wave demo: zero trace on both lines, second-order residual convergence")


@C7
@pytest.mark.parametrize("k1", [2.0, 3.0, 0.5])
def test_c07_wave(k1):
    assert wave_demo(k1)["line_trace_max"] <= 1e-12
    study = wave_convergence(k1)
    assert len(study["orders"]) == 3
    assert all(abs(o - 2.0) <= 0.2 for o in study["orders"]), study["orders"]
    assert study["line_trace_max"] <= 1e-12


# ---------------------------------------------------------------- 8

C8 = criterion(8, "light cone: parabola, hyperbola and circle cases; 1000-trial cross-validation (<5 s)")


@C8
def test_c08_cone_suite():
    t0 = time.perf_counter()
    e1 = np.array([1.0, 0, 0])
    r = 1 / math.sqrt(2)
    parab = decide_cone(ConeInstance(3, e1, r * e1 + r * np.array([0, r, r])))
    assert parab.classification == "parabola" and parab.verdict == HUP

    right = decide_cone(ConeInstance(3, e1, np.array([0, 0, 1.0])))
    assert right.classification == "hyperbola" and right.verdict == NOT_HUP
    assert abs(right.details["B"]) <= 1e-12

    quarter = decide_cone(ConeInstance(3, e1, np.array([r, 0, r])))
    assert quarter.classification == "hyperbola" and quarter.verdict == HUP
    assert (quarter.details["A"], quarter.details["B"], quarter.details["C"]) == pytest.approx((1, 0, -1))

    t = math.pi / 3
    circle = decide_cone(ConeInstance(3, e1, np.array([math.cos(t), math.sin(t), 0]), F(1, 3)))
    assert circle.classification == "ellipse" and circle.verdict == NOT_HUP
    assert circle.x_over_pi["kind"] == "exact_rational" and not circle.conditional

    report = cross_validate_hyperbola(1000, np.random.default_rng(2024))
    assert report.trials == 1000 and report.disagreements == []
    assert time.perf_counter() - t0 < 5.0


# ---------------------------------------------------------------- 9

C9 = criterion(9, "invariance: swap, translation, scaling, rotation (200 random pairs each)")


def _random_gapset(rng, count):
    edges = sorted(set(F(int(x), 8) for x in rng.integers(-80, 80, size=2 * count)))
    ivs = [Interval(edges[i], edges[i + 1]) for i in range(0, len(edges) - 1, 2)]
    return GapSet(ivs)


def _random_affine(rng):
    slope = F(int(rng.integers(1, 40)), int(rng.integers(1, 40))) * (1 if rng.random() < 0.5 else -1)
    return Affine(slope, F(int(rng.integers(-20, 20)), int(rng.integers(1, 8))))


def _random_pwl(rng):
    xs = sorted(set(F(int(x), 4) for x in rng.integers(-20, 20, size=3)))
    if len(xs) < 2:
        xs = [F(0), F(1)]
    ys = np.cumsum(rng.integers(1, 6, size=len(xs)))
    sign = 1 if rng.random() < 0.5 else -1
    return PiecewiseLinear(xs, [sign * F(int(y), 2) for y in ys])


@C9
def test_c09_swap_symmetry():
    rng = np.random.default_rng(91)
    verdicts = set()
    for i in range(200):
        pick = _random_affine if i % 2 else _random_pwl
        inst = CrossInstance(
            "graph_graph", pick(rng), pick(rng),
            _random_gapset(rng, int(rng.integers(0, 3))), _random_gapset(rng, int(rng.integers(0, 3))),
        )
        a, b = decide(inst, 24).verdict, decide(inst.swapped(), 24).verdict
        assert a == b, inst.to_json()
        verdicts.add(a)
    assert {HUP, NOT_HUP} <= verdicts


@C9
def test_c09_translation_invariance():
    rng = np.random.default_rng(92)
    for i in range(200):
        g1, g2 = _random_gapset(rng, int(rng.integers(0, 2))), _random_gapset(rng, int(rng.integers(0, 2)))
        a1, b1, a2, b2 = (F(int(x), 3) for x in rng.integers(-30, 30, size=4))
        if i % 2:
            base = dict(kind="axis_axis", gaps1=g1, gaps2=g2)
            x = CrossInstance(**base, a=a1, b=b1)
            y = CrossInstance(**base, a=a2, b=b2)
        else:
            T = _random_affine(rng)
            x = CrossInstance("axis_graph", T2=T, gaps1=g1, gaps2=g2, a=a1)
            y = CrossInstance("axis_graph", T2=T, gaps1=g1, gaps2=g2, a=a2)
        dx, dy = decide(x), decide(y)
        assert dx.verdict == dy.verdict
        if dy.verdict == NOT_HUP:
            assert verify_vanishing(dy.certificate, y, 2000, 1e-8).passed


@C9
def test_c09_scaling_invariance():
    rng = np.random.default_rng(93)
    for i in range(200):
        T1, T2 = _random_affine(rng), _random_affine(rng)
        g1, g2 = _random_gapset(rng, int(rng.integers(0, 3))), _random_gapset(rng, int(rng.integers(0, 2)))
        s = F(int(rng.integers(1, 30)), int(rng.integers(1, 30)))
        S, S_inv = Affine(s, 0), Affine(1 / s, 0)
        x = CrossInstance("graph_graph", T1, T2, g1, g2)
        y = CrossInstance(
            "graph_graph", compose(S, compose(T1, S_inv)), compose(S, compose(T2, S_inv)),
            g1.scaled(s), g2.scaled(s),
        )
        assert decide(x, 24).verdict == decide(y, 24).verdict
    fam = CrossInstance("graph_graph", Affine(1, 0), Affine(4, 0), GapSet(families=families(depth=20)))
    S, S_inv = Affine(3, 0), Affine(F(1, 3), 0)
    scaled = CrossInstance(
        "graph_graph", compose(S, compose(fam.T1, S_inv)), compose(S, compose(fam.T2, S_inv)),
        fam.gaps1.scaled(3), fam.gaps2,
    )
    assert decide(fam).verdict == decide(scaled).verdict == HUP


def _unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


@C9
def test_c09_cone_rotation_and_swap():
    rng = np.random.default_rng(94)
    kinds = set()
    for i in range(200):
        n = 3 + i % 4
        u1, u2 = _unit(rng, n), _unit(rng, n)
        R, _ = np.linalg.qr(rng.normal(size=(n - 1, n - 1)))
        rot = np.eye(n)
        rot[: n - 1, : n - 1] = R
        d = decide_cone(ConeInstance(n, u1, u2))
        dr = decide_cone(ConeInstance(n, rot @ u1, rot @ u2))
        ds = decide_cone(ConeInstance(n, u2, u1))
        assert d.verdict == dr.verdict == ds.verdict
        assert d.classification == dr.classification == ds.classification
        for key in ("A", "B", "C", "theta0"):
            assert abs(d.details[key] - dr.details[key]) <= 1e-10
        kinds.add(d.classification)
    assert {"ellipse", "hyperbola"} <= kinds


# ---------------------------------------------------------------- 10

C10 = criterion(10, "determinism: fixed HUPKIT_SEED gives byte-identical output")


def _cli(*args, seed="1234"):
    env = {**os.environ, "HUPKIT_SEED": seed}
    proc = subprocess.run(
        [sys.executable, "-m", "hupkit", *map(str, args)], capture_output=True, env=env, check=False
    )
    return proc.returncode, proc.stdout


@C10
@pytest.mark.parametrize(
    "args",
    [
        ("xval", "hyperbola", "--trials", 300),
        ("decide", INSTANCES / "bounded_gap.json"),
        ("decide", INSTANCES / "wandering_families.json"),
        ("cone", INSTANCES / "cone_circle_third.json"),
        ("demo", "wave", "--k1", 3),
    ],
    ids=["xval", "decide-orbit", "decide-wandering", "cone", "demo"],
)
def test_c10_byte_identical(args):
    first, second = _cli(*args), _cli(*args)
    assert first == second
    assert first[1] and json.loads(first[1])["schema_version"] == 1


@C10
def test_c10_seed_matters():
    _, a = _cli("xval", "hyperbola", "--trials", 50, seed="1")
    _, b = _cli("xval", "hyperbola", "--trials", 50, seed="2")
    assert a != b


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
