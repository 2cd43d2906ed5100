from fractions import Fraction as F

import pytest

from hupkit.curves import (
    Affine,
    BoundedPiecewiseLinear,
    Interval,
    PiecewiseLinear,
    bijection_from_json,
    compose,
    invert,
    map_interval,
)
from hupkit.errors import DomainError, DomainMismatch, InvalidInterval


def test_eval_affine_and_pwl():
    assert Affine(0.5, 0)(2) == 1
    assert Affine(-2, 0)(3) == -6
    assert PiecewiseLinear([0, 1], [0, 2])(0.5) == 1


def test_pwl_affine_extension():
    T = PiecewiseLinear([0, 1, 2], [0, 2, 3])
    assert T(-1) == -2
    assert T(5) == 6


def test_invert_examples():
    assert invert(Affine(2, 1)) == Affine(0.5, -0.5)
    assert invert(Affine(-1, 0)) == Affine(-1, 0)
    inv = invert(PiecewiseLinear([0, 1], [0, 3]))
    assert inv == PiecewiseLinear([0, 3], [0, 1])


@pytest.mark.parametrize(
    "T",
    [
        Affine(3, -2),
        PiecewiseLinear([0, 1, 4], [0, 3, 4]),
        PiecewiseLinear([0, 1, 4], [5, 2, -1]),
        BoundedPiecewiseLinear.symmetric(1, 2, [-1, 0.5, 1], [-2, 0, 2]),
    ],
)
def test_invert_is_involutive(T):
    assert invert(invert(T)) == T


def test_compose_examples():
    assert compose(invert(Affine(2, 0)), Affine(0.5, 0)) == Affine(0.25, 0)
    T = PiecewiseLinear([0, 1, 2], [0, 5, 6])
    assert compose(Affine(1, 0), T) == T
    assert compose(T, Affine(1, 0)) == T
    assert compose(Affine(-1, 0), Affine(-1, 0)) == Affine(1, 0)


def test_single_piece_collapses_to_affine():
    assert compose(Affine(1, 0), PiecewiseLinear([0, 1], [0, 5])) == Affine(5, 0)


def test_compose_direction_is_sign_product():
    A = PiecewiseLinear([0, 1], [0, -3])
    B = Affine(2, 1)
    assert compose(A, B).direction == -1
    assert compose(A, A).direction == 1


def test_compose_domain_mismatch():
    bounded = BoundedPiecewiseLinear.symmetric(1, 1, [-1, 1], [-1, 1])
    with pytest.raises(DomainMismatch):
        compose(bounded, Affine(2, 0))


def test_map_interval_examples():
    assert map_interval(Affine(0.25, 0), Interval(4, 20)) == Interval(1, 5)
    assert map_interval(Affine(-2, 0), Interval(1, 2)) == Interval(-4, -2)
    with pytest.raises(InvalidInterval):
        Interval(3, 3)


def test_map_interval_unbounded():
    inf = float("inf")
    assert map_interval(Affine(-1, 0), Interval(0, inf)) == Interval(-inf, 0)


def test_bounded_domain_error():
    T = BoundedPiecewiseLinear.symmetric(1, 1, [-1, 1], [-1, 1])
    with pytest.raises(DomainError):
        T(2)
    with pytest.raises(DomainError):
        map_interval(T, Interval(0, 2))


def test_exact_arithmetic():
    T = Affine(F(1, 3), F(1, 7))
    assert invert(T)(T(F(2, 5))) == F(2, 5)


@pytest.mark.parametrize(
    "T",
    [
        Affine(2, 1),
        PiecewiseLinear([0, 1], [0, 2]),
        BoundedPiecewiseLinear.symmetric(1, 2, [-1, 0, 1], [-2, 1, 2]),
    ],
)
def test_json_round_trip(T):
    assert bijection_from_json(T.to_json()) == T


def test_json_schema():
    assert Affine(2, 0).to_json() == {"type": "affine", "slope": 2, "intercept": 0}
    assert PiecewiseLinear([0, 1], [0, 2]).to_json() == {"type": "pwl", "x": [0, 1], "y": [0, 2]}
    data = BoundedPiecewiseLinear.symmetric(1, 1, [-1, 1], [-1, 1]).to_json()
    assert data["type"] == "bounded_pwl" and data["a"] == 1 and data["b"] == 1
