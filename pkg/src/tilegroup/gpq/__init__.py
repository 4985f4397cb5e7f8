"""The rotation groups G(p, q) generated by quarter-axis rotations in SO(3)."""

from .spectrum import c_equivalence_obstruction, order_spectrum, spectrum_witnesses
from .structure import (
    Finite,
    Infinite,
    Presentation,
    UnsupportedPairError,
    case_e_form,
    g44_coset,
    normal_form,
    order,
    presentation,
    reduce_h1s,
)
from .words import GWord, WordSyntaxError

__all__ = [
    "Finite",
    "GWord",
    "Infinite",
    "Presentation",
    "UnsupportedPairError",
    "WordSyntaxError",
    "c_equivalence_obstruction",
    "case_e_form",
    "g44_coset",
    "normal_form",
    "order",
    "order_spectrum",
    "presentation",
    "reduce_h1s",
    "spectrum_witnesses",
]
