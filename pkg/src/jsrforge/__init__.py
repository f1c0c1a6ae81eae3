"""Chiral spectrum maximizing products of 2x2 matrix pairs.

Modules:

* ``words``     Lyndon words, chirality, rotation classes
* ``fricke``    Fricke trace polynomials and 2-isospectrality
* ``mat2``      closed-form 2x2 spectra, JSR bounds, realization from invariants
* ``polytope``  invariant polygons, balancing, uniqueness, Barabanov check
* ``search``    random trace-space search and table reproduction
* ``cli``       command-line entry point
"""

from .fricke import Poly5, Tuple5, fricke_polynomial, is_2_isospectral
from .mat2 import DomainError, jsr_bounds, realizable, realize
from .polytope import Certificate, Polygon, certify, certify_complex
from .words import chiral_pairs, lyndon_words, parse_word

__all__ = [
    "Certificate",
    "DomainError",
    "Polygon",
    "Poly5",
    "Tuple5",
    "certify",
    "certify_complex",
    "chiral_pairs",
    "fricke_polynomial",
    "is_2_isospectral",
    "jsr_bounds",
    "lyndon_words",
    "parse_word",
    "realizable",
    "realize",
]

__version__ = "0.1.0"
