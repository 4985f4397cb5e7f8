from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tilegroup.geometry import (
    DegeneratePolygonError,
    Isometry2,
    IrrationalTurn,
    RationalTurn,
    Rotation2,
    Similarity2,
    classify_angle,
    compose_isometry,
    interiors_overlap,
    point,
    point_in_polygon,
    polygon_congruence,
    signed_area2,
    triangulate,
)
from tilegroup.qfield import QScalar

from conftest import isometries, qscalars, rotations

F = Fraction
PIN = [point(0, 0, 5), point(1, 0, 5), point(2, 0, 5), point(2, 1, 5)]


def mat(g: Isometry2):
    """Float 3x3 affine matrix, an independent model of the stated convention."""
    import numpy as np

    c, s = float(g.rot.c), float(g.rot.s)
    lin = np.array([[c, -s], [s, c]])
    if g.reflect:
        lin = np.diag([1.0, -1.0]) @ lin
    m = np.eye(3)
    m[:2, :2] = lin
    m[:2, 2] = [float(g.trans[0]), float(g.trans[1])]
    return m


def test_rotation_product_is_quarter_turn():
    a = Rotation2.of(F(3, 5), F(4, 5), 5)
    b = Rotation2.of(F(4, 5), F(3, 5), 5)
    assert a @ b == Rotation2.of(0, 1, 5)


def test_rotation_requires_unit_norm():
    with pytest.raises(ValueError):
        Rotation2.of(F(1, 2), F(1, 2), 5)


@given(isometries())
def test_identity_and_inverse(g):
    e = Isometry2.identity(5)
    assert compose_isometry(g, e) == g
    assert compose_isometry(e, g) == g
    assert compose_isometry(g, g.inverse()).is_identity()
    assert compose_isometry(g.inverse(), g).is_identity()


@settings(max_examples=60)
@given(isometries(), isometries(), isometries())
def test_composition_associative(a, b, c):
    assert (a @ b) @ c == a @ (b @ c)


@settings(max_examples=60)
@given(isometries(), isometries(), qscalars(), qscalars())
def test_composition_acts_pointwise(g, h, x, y):
    v = (x, y)
    assert (g @ h).apply(v) == g.apply(h.apply(v))


@settings(max_examples=40)
@given(isometries(), isometries())
def test_composition_matches_matrix_model(g, h):
    import numpy as np

    assert np.allclose(mat(g @ h), mat(g) @ mat(h))


@given(st.lists(rotations(), min_size=1, max_size=12))
def test_unit_norm_survives_long_products(rs):
    acc = Rotation2.identity(5)
    for r in rs:
        acc = acc @ r
    assert acc.c * acc.c + acc.s * acc.s == 1


def test_reflection_convention():
    g = Isometry2(Rotation2.of(0, 1, 5), True, (QScalar(0, 0, 5), QScalar(0, 0, 5)))
    # rotate (1, 0) to (0, 1), then flip the second axis
    assert g.apply(point(1, 0, 5)) == point(0, -1, 5)


@pytest.mark.parametrize(
    "c,s,turn",
    [
        (0, 1, (1, 4)),
        (-1, 0, (1, 2)),
        (1, 0, (0, 1)),
        (F(1, 2), None, (1, 6)),
        (F(-1, 2), None, (1, 3)),
        (0, -1, (3, 4)),
    ],
)
def test_classify_rational_turns(c, s, turn):
    if s is None:
        s = QScalar(0, F(1, 2), 3)
        r = Rotation2(QScalar(c, 0, 3), s)
    else:
        r = Rotation2.of(c, s, 5)
    assert classify_angle(r) == RationalTurn(*turn)


def test_classify_eighth_turn_in_sqrt2():
    h = QScalar(0, F(1, 2), 2)
    assert classify_angle(Rotation2(h, h)) == RationalTurn(1, 8)
    assert classify_angle(Rotation2(-h, -h)) == RationalTurn(5, 8)


def test_rho_is_irrational_with_exact_power_check():
    rho = Rotation2.of(F(3, 5), F(4, 5), 5)
    assert isinstance(classify_angle(rho), IrrationalTurn)
    acc = Rotation2.identity(5)
    for _ in range(1000):
        acc = acc @ rho
        assert not acc.is_identity()


@pytest.mark.parametrize("D", [2, 3, 5])
def test_rational_turn_has_matching_order(D):
    # every rotation built from a table entry returns to the identity after `denominator` steps
    cands = [Rotation2.of(0, 1, D), Rotation2.of(-1, 0, D)]
    if D == 3:
        cands.append(Rotation2(QScalar(F(1, 2), 0, 3), QScalar(0, F(1, 2), 3)))
        cands.append(Rotation2(QScalar(0, F(1, 2), 3), QScalar(F(1, 2), 0, 3)))
    if D == 2:
        h = QScalar(0, F(1, 2), 2)
        cands.append(Rotation2(h, -h))
    for r in cands:
        cls = classify_angle(r)
        assert isinstance(cls, RationalTurn)
        assert (r ** cls.denominator).is_identity()
        if cls.denominator > 1:
            assert not (r ** (cls.denominator - 1)).is_identity() or cls.numerator == 0


@given(rotations())
def test_classification_consistent_with_power(r):
    cls = classify_angle(r)
    if isinstance(cls, RationalTurn):
        assert (r ** cls.denominator).is_identity()
    else:
        assert all(not (r ** n).is_identity() for n in range(1, 13))


def test_congruence_examples():
    assert polygon_congruence(PIN, PIN, False).is_identity()
    q = Rotation2.of(0, 1, 5)
    rotated = [q.apply(p) for p in PIN]
    g = polygon_congruence(PIN, rotated, False)
    assert g.rot == q and g.trans[0].is_zero() and g.trans[1].is_zero()
    mirror = [(x, -y) for x, y in PIN][::-1]
    assert polygon_congruence(PIN, mirror, False) is None
    assert polygon_congruence(PIN, mirror, True) is not None


@settings(max_examples=50)
@given(isometries())
def test_congruence_recovers_pose(g):
    image = [g.apply(p) for p in PIN]
    if g.reflect:
        image = image[::-1]
    found = polygon_congruence(PIN, image, allow_reflection=True)
    assert found is not None
    assert sorted(map(str, (found.apply(p) for p in PIN))) == sorted(map(str, image))


def test_congruence_rejects_degenerate():
    flat = [point(0, 0, 5), point(1, 0, 5), point(2, 0, 5)]
    with pytest.raises(DegeneratePolygonError):
        polygon_congruence(flat, flat, False)


def test_point_in_polygon_and_overlap():
    assert point_in_polygon(point(F(3, 2), F(1, 4), 5), PIN) == 1
    assert point_in_polygon(point(1, 0, 5), PIN) == 0
    assert point_in_polygon(point(0, 1, 5), PIN) == -1
    shifted = [(x + F(1, 7), y) for x, y in PIN]
    assert interiors_overlap(PIN, shifted)
    far = [(x + 2, y) for x, y in PIN]
    assert not interiors_overlap(PIN, far)


def test_triangulation_preserves_area():
    L = [point(0, 0, 5), point(2, 0, 5), point(2, 1, 5), point(1, 1, 5), point(1, 2, 5), point(0, 2, 5)]
    tris = triangulate(L)
    assert sum((signed_area2(t) for t in tris), QScalar(0, 0, 5)) == signed_area2(L)


def test_similarity_composition():
    lam = QScalar(0, 1, 5)
    g = Isometry2(Rotation2.of(F(3, 5), F(4, 5), 5), True, point(1, 2, 5))
    s1 = Similarity2(g, lam)
    s2 = Similarity2(Isometry2.identity(5), lam)
    v = point(F(1, 3), -1, 5)
    assert s1.compose(s2).apply(v) == s1.apply(s2.apply(v))
    assert s1.inverse().apply(s1.apply(v)) == v
    with pytest.raises(ValueError):
        Similarity2(g, -lam)
