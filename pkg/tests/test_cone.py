import math
from fractions import Fraction as F

import numpy as np
import pytest

from hupkit.cone import (
    ConeInstance,
    Q,
    bilinear,
    build_frame,
    classify,
    cross_validate_hyperbola,
    decide_cone,
    decide_single_hyperplane,
    default_base_point,
    ellipse_x_over_pi,
    rotation_params,
    slice_coefficients,
    tangent_criterion,
)
from hupkit.errors import DegenerateConic, DegenerateDirections, InstanceError, LightlikeNormal
from hupkit.instances import HUP, NOT_HUP

E1 = np.array([1.0, 0.0, 0.0])
R2 = 1 / math.sqrt(2)


def cone(u2, u1=E1, exact=None):
    return ConeInstance(len(u1), np.asarray(u1, float), np.asarray(u2, float), exact)


def random_unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def test_build_frame_planar_rotation():
    t = math.pi / 3
    fr = build_frame(E1, [math.cos(t), math.sin(t), 0])
    assert fr.theta0 == pytest.approx(t)
    assert np.allclose(fr.v2, [0, 1, 0], atol=1e-12)
    assert np.allclose(fr.v1, [-math.sin(t), math.cos(t), 0], atol=1e-12)


@pytest.mark.parametrize("u2", [E1, -E1])
def test_build_frame_parallel(u2):
    with pytest.raises(DegenerateDirections):
        build_frame(E1, u2)


def test_frame_residuals_random():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        n = int(rng.integers(3, 7))
        u1, u2 = random_unit(rng, n), random_unit(rng, n)
        res = build_frame(u1, u2).residuals(u1, u2)
        assert max(res.values()) <= 1e-12


@pytest.mark.parametrize(
    "v2,abc",
    [([0, 0, 1], (1, 0, -1)), ([0, 1, 0], (1, 0, 1)), ([0, R2, R2], (1, 0, 0))],
)
def test_slice_coefficients(v2, abc):
    u2 = R2 * E1 + R2 * np.array(v2)
    fr = build_frame(E1, u2)
    co = slice_coefficients(fr, E1)
    assert (co.A, co.B, co.C) == pytest.approx(abc, abs=1e-12)
    assert co.D == co.E == 0


def test_slice_base_point_terms():
    fr = build_frame(E1, [0, 1, 0])
    x = default_base_point(3)
    assert Q(x) == pytest.approx(0, abs=1e-12)
    co = slice_coefficients(fr, E1, x)
    assert co.D == pytest.approx(bilinear(x, E1)) and co.E == pytest.approx(bilinear(x, fr.v2))


def test_classify():
    assert classify(1, 0, -1) == "hyperbola"
    assert classify(1, 0, 1) == "ellipse"
    assert classify(1, 0, 0) == "parabola"
    assert classify(1, 0, 1e-13) == "parabola"


def test_rotation_examples():
    r = rotation_params(1, 0, 1)
    assert r.phi == 0 and r.axis_ratio == 1
    r = rotation_params(1, 0, -1)
    assert r.phi == 0 and r.axis_ratio == pytest.approx(1)
    r = rotation_params(2, 1, 0)
    assert r.phi == pytest.approx(math.pi / 8)
    assert abs(r.cross_term(2, 1, 0)) <= 1e-12


def test_rotation_ordering_conventions():
    rng = np.random.default_rng(5)
    for _ in range(500):
        A, B, C = rng.normal(size=3)
        if abs(A * C - B * B) < 1e-3:
            continue
        r = rotation_params(A, B, C)
        assert abs(2 * r.cross_term(A, B, C)) <= 1e-10 * max(abs(A), abs(C), 1)
        if r.classification == "hyperbola":
            assert r.g_phi > 0 > r.g_perp
        else:
            assert r.g_perp >= r.g_phi


def test_rotation_degenerate_base_point():
    # N = D^2 (B^2 - AC) - (AE - BD)^2 vanishes with D = E = 0
    with pytest.raises(DegenerateConic):
        rotation_params(1, 0, 1, 0.0, 0.0)
    with pytest.raises(DegenerateConic):
        rotation_params(1, 0, 0)


def test_decide_hyperbola_right_angle():
    d = decide_cone(cone([0, 0, 1]))
    assert d.classification == "hyperbola" and d.verdict == NOT_HUP


def test_decide_hyperbola_quarter_angle():
    t = math.pi / 4
    d = decide_cone(cone([math.cos(t), 0, math.sin(t)]))
    assert d.classification == "hyperbola" and d.verdict == HUP
    with pytest.raises(LightlikeNormal):
        decide_cone(cone([math.cos(t), 0, math.sin(t)]), lightlike="reject")


def test_decide_hyperbola_generic_non_null():
    t = math.pi / 3
    u2 = [math.cos(t), 0, math.sin(t)]
    d = decide_cone(cone(u2))
    assert d.classification == "hyperbola"
    assert d.details["B_v1_v2"] == pytest.approx(-math.cos(t))
    assert d.verdict == HUP


def test_decide_circle_slice():
    t = math.pi / 3
    d = decide_cone(cone([math.cos(t), math.sin(t), 0]))
    assert d.classification == "ellipse" and d.verdict == NOT_HUP
    assert d.x_over_pi["rational"] == [1, 3]
    exact = decide_cone(cone([math.cos(t), math.sin(t), 0], exact=F(1, 3)))
    assert exact.x_over_pi["kind"] == "exact_rational" and not exact.conditional


def test_decide_ellipse_irrational_is_conditional():
    t = math.sqrt(2)
    d = decide_cone(cone([math.cos(t), math.sin(t), 0]))
    assert d.verdict == HUP and d.conditional
    assert d.x_over_pi["no_rational_up_to"] == 10_000


def test_exact_angle_must_match():
    t = math.pi / 3
    with pytest.raises(InstanceError):
        decide_cone(cone([math.cos(t), math.sin(t), 0], exact=F(1, 4)))


def test_decide_parabola():
    v2 = np.array([0, R2, R2])
    d = decide_cone(cone(R2 * E1 + R2 * v2))
    assert d.classification == "parabola" and d.verdict == HUP


def test_ellipse_forms_agree():
    rng = np.random.default_rng(11)
    seen = 0
    for _ in range(400):
        u1, u2 = random_unit(rng, 4), random_unit(rng, 4)
        fr = build_frame(u1, u2)
        co = slice_coefficients(fr, u1, default_base_point(4))
        if classify(co.A, co.B, co.C) != "ellipse":
            continue
        seen += 1
        total, diff = ellipse_x_over_pi(fr.theta0, rotation_params(co.A, co.B, co.C, co.D, co.E))
        assert min((total - diff) % 1, (diff - total) % 1) <= 1e-9
    assert seen > 20


def test_hyperbola_closed_form_identity():
    rng = np.random.default_rng(2)
    for _ in range(300):
        u1, u2 = random_unit(rng, 3), random_unit(rng, 3)
        fr = build_frame(u1, u2)
        co = slice_coefficients(fr, u1)
        if abs(math.cos(fr.theta0)) > 1e-6:
            closed = math.cos(fr.theta0) * (co.C - co.B * math.tan(fr.theta0))
            assert abs(bilinear(fr.v1, fr.v2) - closed) <= 1e-10


def test_single_hyperplane():
    assert decide_single_hyperplane([R2, 0, R2]).verdict == HUP
    assert decide_single_hyperplane([1, 0, 0]).verdict == NOT_HUP
    assert decide_single_hyperplane([0, 0, 1]).verdict == NOT_HUP


def test_cross_validation_clean():
    report = cross_validate_hyperbola(1000, np.random.default_rng(0))
    assert report.disagreements == []
    assert report.skipped > 0 and report.hyperbolas > 500


def test_tangent_criterion_degenerate_case():
    # right angle between the normals with B = 0: both criteria say not unique
    fr = build_frame(E1, [0, 0, 1])
    co = slice_coefficients(fr, E1)
    assert tangent_criterion(co.A, co.B, co.C, fr.theta0) is False
    assert abs(bilinear(fr.v1, fr.v2)) <= 1e-12


def test_instance_validation():
    with pytest.raises(InstanceError):
        ConeInstance(3, np.array([2.0, 0, 0]), np.array([0, 1.0, 0]))
    with pytest.raises(InstanceError):
        ConeInstance(2, np.array([1.0, 0]), np.array([0, 1.0]))
    data = cone([0, 1, 0], exact=F(1, 2)).to_json()
    assert ConeInstance.from_json(data).theta_pi_rational == F(1, 2)
    with pytest.raises(InstanceError):
        ConeInstance.from_json({**data, "extra": 1})


def test_json_output_shape():
    t = math.pi / 3
    out = decide_cone(cone([math.cos(t), math.sin(t), 0], exact=F(1, 3))).to_json()
    assert out["classification"] == "ellipse" and out["verdict"] == NOT_HUP
    assert out["x_over_pi"]["rational"] == [1, 3] and isinstance(out["trace"], list)
