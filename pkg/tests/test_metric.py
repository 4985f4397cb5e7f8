from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from conftest import centered_patch
from hypothesis import given, settings
from scipy.spatial import cKDTree
from hypothesis import strategies as st

from tilegroup.geometry import Isometry2, Rotation2
from tilegroup.metric import (
    CoverageError,
    PatchSpecError,
    agreement_radius_sq,
    boundary_in_ball,
    contraction_check,
    coverage_radius_sq,
    directed_hausdorff,
    hausdorff,
    parse_patchspec,
    sub_supertile_pair,
    tiling_distance,
)
from tilegroup.qfield import QScalar
from tilegroup.substitution import Patch, PlacedTile, bundled_system, load_system, supertile


@pytest.fixture(scope="module")
def pin():
    return bundled_system("pinwheel")


def sampled_hausdorff(A: np.ndarray, B: np.ndarray, h: float) -> float:
    """Dense-sampling oracle: both sets sampled at spacing <= h, point-set Hausdorff by brute force."""

    def sample(S):
        pts = []
        for a, b in S:
            k = max(1, math.ceil(np.linalg.norm(b - a) / h))
            ts = np.linspace(0.0, 1.0, k + 1)
            pts.append(a[None, :] + ts[:, None] * (b - a)[None, :])
        return np.concatenate(pts)

    pa, pb = sample(A), sample(B)
    return max(cKDTree(pb).query(pa)[0].max(), cKDTree(pa).query(pb)[0].max())


segment_sets = st.lists(
    st.tuples(*[st.floats(-2, 2, allow_nan=False) for _ in range(4)]), min_size=1, max_size=4
).map(lambda rows: np.array(rows, dtype=float).reshape(-1, 2, 2))


# -- Hausdorff on segment sets -------------------------------------------------


def test_identical_sets_are_at_distance_zero():
    A = np.array([[[0, 0], [1, 0]], [[1, 0], [1, 1]]], dtype=float)
    assert hausdorff(A, A.copy()) == 0.0
    assert hausdorff(A, A[::-1, ::-1].copy()) == 0.0


def test_parallel_unit_segments():
    A = np.array([[[0, 0], [1, 0]]], dtype=float)
    B = np.array([[[0, 1], [1, 1]]], dtype=float)
    assert hausdorff(A, B, 1e-9) == pytest.approx(1.0, abs=1e-9)


def test_empty_sentinels():
    A = np.array([[[0, 0], [1, 0]]], dtype=float)
    empty = np.zeros((0, 2, 2))
    assert hausdorff(empty, empty) == 0.0
    assert hausdorff(A, empty) == math.inf
    assert hausdorff(empty, A) == math.inf


def test_interior_maximum_is_found():
    # the farthest point of A from B is the midpoint, not an endpoint
    A = np.array([[[0, 0], [2, 0]]], dtype=float)
    B = np.array([[[0, 1], [0, 2]], [[2, 1], [2, 2]]], dtype=float)
    assert directed_hausdorff(A, B, 1e-9) == pytest.approx(math.sqrt(2), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(A=segment_sets, B=segment_sets)
def test_matches_sampling_oracle(A, B):
    tol = 1e-3
    assert abs(hausdorff(A, B, tol) - sampled_hausdorff(A, B, tol)) <= 2 * tol


@settings(max_examples=60, deadline=None)
@given(A=segment_sets, B=segment_sets, C=segment_sets)
def test_metric_axioms_on_segments(A, B, C):
    tol = 1e-9
    ab, ba = hausdorff(A, B, tol), hausdorff(B, A, tol)
    assert ab >= 0 and abs(ab - ba) <= tol
    assert hausdorff(A, C, tol) <= ab + hausdorff(B, C, tol) + 3 * tol


def test_translated_boundary(pin):
    t = 0.01
    A = np.array(
        [[[float(a[0]), float(a[1])], [float(b[0]), float(b[1])]] for poly in map(pin.tile_polygon, supertile(pin, 0, 2).tiles) for a, b in zip(poly, poly[1:] + poly[:1])]
    )
    B = A + np.array([t, 0.0])
    assert hausdorff(A, B, 1e-9) == pytest.approx(t, abs=1e-9)
    assert abs(hausdorff(A, B, 2e-3) - sampled_hausdorff(A, B, 2e-4)) <= 4e-3


# -- clipping ---------------------------------------------------------------------


def square_system():
    z = ["0", "0"]
    sq = [[["0", "0"], z], [["1", "0"], z], [["1", "0"], ["1", "0"]], [z, ["1", "0"]]]
    ident = {"c": {"a": "1", "b": "0"}, "s": {"a": "0", "b": "0"}}
    kids = [{"id": 0, "rotation": ident, "reflect": False, "translation": [[str(x), "0"], [str(y), "0"]]} for x in (0, 1) for y in (0, 1)]
    doc = {
        "field_d": 5,
        "expansion": {"a": "2", "b": "0"},
        "prototiles": [{"id": 0, "label": "sq", "chirality": "base", "vertices": sq}],
        "children": {"0": kids},
    }
    return load_system(doc, validate=False)


def test_far_patch_gives_empty_set(pin):
    far = Patch((PlacedTile(0, Isometry2.translation((QScalar(100, 0, 5), QScalar(0, 0, 5)))),))
    with pytest.raises(CoverageError):
        boundary_in_ball(pin, far, 2)
    b = boundary_in_ball(pin, far, 2, allow_partial=True)
    assert b.is_empty() and not b.covered


def test_unit_square_unclipped():
    sq = square_system()
    b = boundary_in_ball(sq, supertile(sq, 0, 0), 10, allow_partial=True)
    assert len(b) == 4 and len(b.segments) == 4
    assert b.length() == pytest.approx(4.0)


def test_square_patch_clipped_exactly():
    sq = square_system()
    patch = supertile(sq, 0, 3).transform(Isometry2.translation((QScalar(-4, 0, 5), QScalar(-4, 0, 5))))
    assert coverage_radius_sq(sq, patch) == 16
    b = boundary_in_ball(sq, patch, 2)
    # lines x = -2..2 and y = -2..2 clipped to the disc of radius 2
    expected = sum(2 * math.sqrt(4 - k * k) for k in range(-2, 3)) * 2
    assert b.length() == pytest.approx(expected, abs=1e-12)


def test_pinwheel_level4_centered(pin):
    x = parse_patchspec(pin, "supertile:0:4:transform=rot(1,0),t=(-40,-9)")
    assert coverage_radius_sq(pin, x) == 81
    b = boundary_in_ball(pin, x, 3)
    assert len(b) == 41
    assert b.length() == pytest.approx(76.44366193088936, rel=1e-12)
    with pytest.raises(CoverageError):
        boundary_in_ball(pin, x, 10)


@pytest.mark.parametrize("n,m", [(1, 2), (2, 3), (1, 3)])
def test_clipping_is_monotone(pin, n, m):
    x = centered_patch(pin, Fraction(1, 3), Fraction(1, 4), Fraction(-1, 5))
    small, big = boundary_in_ball(pin, x, n), boundary_in_ball(pin, x, m)
    assert directed_hausdorff(small.pieces, big.pieces, 1e-12) <= 1e-12


# -- tiling distance -----------------------------------------------------------


def test_distance_to_self_is_zero(pin):
    x = centered_patch(pin, Fraction(0), Fraction(0), Fraction(0))
    r = tiling_distance(pin, x, x, 3)
    assert r.value == 0.0 and r.n_at is None
    assert "finite-horizon" in r.text()


patch_params = st.tuples(
    st.fractions(-2, 2, max_denominator=5), st.fractions(-1 / 2, 1 / 2, max_denominator=6), st.fractions(-1 / 2, 1 / 2, max_denominator=6)
)


@settings(max_examples=8, deadline=None)
@given(p=patch_params, q=patch_params)
def test_distance_symmetric(pin, p, q):
    x, y = centered_patch(pin, *p), centered_patch(pin, *q)
    a, b = tiling_distance(pin, x, y, 3, 1e-9), tiling_distance(pin, y, x, 3, 1e-9)
    assert abs(a.value - b.value) <= 1e-9
    assert a.value >= 0
    assert (a.value == 0) == (p == q)


def test_rotation_pair_regression(pin):
    x = parse_patchspec(pin, "supertile:0:4:transform=rot(1,0),t=(-40,-9)")
    turn = Isometry2.rotation(Rotation2.of(Fraction(99, 101), Fraction(20, 101), 5))
    r = tiling_distance(pin, x, x.transform(turn), 8)
    expected = [0.199007449, 0.199007438, 0.136535763, 0.149567701, 0.094724384, 0.087602921, 0.062298341, 0.073598877]
    assert [v for _, v in r.per_n] == pytest.approx(expected, abs=1e-8)
    assert r.n_at == 1


def test_coverage_enforced(pin):
    x = centered_patch(pin, Fraction(0), Fraction(0), Fraction(0))
    with pytest.raises(CoverageError):
        tiling_distance(pin, x, x, 5)


# -- agreement and contraction -------------------------------------------------------


def test_agreement_radius_of_identical_patches(pin):
    x = supertile(pin, 0, 2)
    assert agreement_radius_sq(pin, x, x) is None
    rep = contraction_check(pin, x, x, 2)
    assert rep.ok and all(s.radius == math.inf for s in rep.steps)


def test_shared_sub_supertile_contracts(pin):
    x, y = sub_supertile_pair(pin, 0, 3, (3, 3), (2, 2))
    assert agreement_radius_sq(pin, x, y) == Fraction(9, 16)
    rep = contraction_check(pin, x, y, 2, n_max=2)
    assert rep.ok
    lam2 = pin.expansion * pin.expansion
    assert [s.radius_sq for s in rep.steps] == [Fraction(9, 16), Fraction(9, 16) * lam2, Fraction(9, 16) * lam2 * lam2]
    d = rep.distances()
    assert d == pytest.approx([0.2236067977, 0.1606046515, 0.0], abs=1e-9)
    assert d[0] > d[1] > d[2]


def test_pair_paths_must_match_types(pin):
    with pytest.raises(ValueError):
        sub_supertile_pair(pin, 0, 2, 0, 1)


def test_rotated_pair_stays_apart(pin):
    x = centered_patch(pin, Fraction(0), Fraction(0), Fraction(0), level=2)
    turn = Isometry2.rotation(Rotation2.of(Fraction(99, 101), Fraction(20, 101), 5))
    y = x.transform(turn)
    assert agreement_radius_sq(pin, x, y) == 0
    rep = contraction_check(pin, x, y, 2)
    assert rep.ok
    assert all(s.radius_sq == 0 for s in rep.steps)


# -- patch specs ----------------------------------------------------------------------


def test_patchspec_forms(pin):
    assert parse_patchspec(pin, "supertile:1:2") == supertile(pin, 1, 2)
    p = parse_patchspec(pin, "supertile:0:1:transform=rot(3/5,4/5),t=(1/2,-3)")
    assert len(p) == 5
    for bad in ("tile:0:1", "supertile:0:1:transform=rot(1,1)", "supertile:7:1", "supertile:0:1:transform=rot(1/0,0)"):
        with pytest.raises(PatchSpecError):
            parse_patchspec(pin, bad)
