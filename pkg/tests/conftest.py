from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from tilegroup.geometry import Isometry2, Rotation2
from tilegroup.qfield import QScalar
from tilegroup.substitution import bundled_rule_path

small_fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def qscalars(D: int = 5):
    return st.builds(lambda a, b: QScalar(a, b, D), small_fracs, small_fracs)


def _pythagorean(t: Fraction, D: int) -> Rotation2:
    den = 1 + t * t
    return Rotation2.of((1 - t * t) / den, 2 * t / den, D)


def rotations(D: int = 5):
    """Rational rotations times powers of the field's own unit rotation (2 + i)/sqrt5 when D = 5."""
    rational = st.builds(lambda t: _pythagorean(t, D), st.fractions(min_value=-6, max_value=6, max_denominator=7))
    if D != 5:
        return rational
    w = Rotation2(QScalar(0, Fraction(2, 5), 5), QScalar(0, Fraction(1, 5), 5))
    return st.builds(lambda r, k: r @ (w ** k), rational, st.integers(-3, 3))


def isometries(D: int = 5):
    return st.builds(
        lambda r, f, x, y: Isometry2(r, f, (x, y)), rotations(D), st.booleans(), qscalars(D), qscalars(D)
    )


@pytest.fixture
def pinwheel_doc():
    return json.loads(bundled_rule_path("pinwheel").read_text())


@pytest.fixture
def variant_doc():
    return json.loads(bundled_rule_path("pinwheel_variant").read_text())


def centered_patch(sys_, t: Fraction, dx: Fraction, dy: Fraction, level: int = 3, mirror: bool = False):
    """A level-3 supertile with an interior point moved to the origin, then turned and nudged.

    The interior point (8/5, 2/5) of the prototile, scaled up, is at least 4 away from
    the supertile's boundary, so shifts up to 1/2 keep the disc of radius 3 covered.
    """
    from tilegroup.substitution import supertile

    D = sys_.field_D
    lam = sys_.expansion ** level
    c = (lam * Fraction(8, 5), lam * Fraction(2, 5))
    z = QScalar(0, 0, D)
    centre = Isometry2(Rotation2.identity(D), False, (z - c[0], z - c[1]))
    turn = Isometry2(_pythagorean(t, D), mirror, (QScalar(dx, 0, D), QScalar(dy, 0, D)))
    return supertile(sys_, 0, level).transform(turn.compose(centre))
