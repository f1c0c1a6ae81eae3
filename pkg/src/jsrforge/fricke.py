"""Fricke trace polynomials of words in two 2x2 matrices.

For every word ``w`` there is an integer polynomial ``F_w`` with
``tr w(A, B) = F_w(tr A, tr B, tr AB, det A, det B)``.  It is computed by
folding the letters of ``w`` into a linear combination of ``I, A, B, AB``
and reducing with Cayley-Hamilton::

    A A = x A - u I
    B B = y B - v I
    B A = -A B + y A + x B - (x y - z) I

Coefficients are Python ints, so nothing overflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .words import validate

VARS = ("x", "y", "z", "u", "v")
Exponent = tuple[int, int, int, int, int]

_ZERO_EXP: Exponent = (0, 0, 0, 0, 0)


class Tuple5(NamedTuple):
    """The invariants ``(tr A, tr B, tr AB, det A, det B)`` of a pair."""

    x: float
    y: float
    z: float
    u: float
    v: float


def _graded_lex_key(e: Exponent):
    return (-sum(e), tuple(-k for k in e))


class Poly5:
    """Sparse polynomial in ``x, y, z, u, v`` with integer coefficients.

    Immutable and hashable; zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_key")

    def __init__(self, terms: Mapping[Exponent, int] | None = None):
        clean = {}
        if terms:
            for e, c in terms.items():
                if c:
                    if len(e) != 5:
                        raise ValueError(f"exponent must have 5 entries: {e}")
                    clean[tuple(e)] = int(c)
        self._terms = clean
        self._key = None

    @classmethod
    def const(cls, c: int) -> "Poly5":
        return cls({_ZERO_EXP: c})

    @classmethod
    def var(cls, name: str) -> "Poly5":
        e = [0] * 5
        e[VARS.index(name)] = 1
        return cls({tuple(e): 1})

    @property
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def key(self) -> tuple:
        """Canonical sorted-term serialisation, used as a dedup key."""
        if self._key is None:
            self._key = tuple(sorted(self._terms.items(), key=lambda t: _graded_lex_key(t[0])))
        return self._key

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly5.const(other)
        if not isinstance(other, Poly5):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self.key())

    def __add__(self, other: "Poly5") -> "Poly5":
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return Poly5(out)

    def __neg__(self) -> "Poly5":
        return Poly5({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "Poly5") -> "Poly5":
        return self + (-other)

    def __mul__(self, other) -> "Poly5":
        if isinstance(other, int):
            return Poly5({e: c * other for e, c in self._terms.items()})
        out: dict[Exponent, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly5(out)

    __rmul__ = __mul__

    def shift(self, var: int, power: int = 1, coeff: int = 1) -> "Poly5":
        """Multiply by ``coeff * var**power`` (cheap exponent shift)."""
        out = {}
        for e, c in self._terms.items():
            e2 = list(e)
            e2[var] += power
            out[tuple(e2)] = c * coeff
        return Poly5(out)

    def substitute_uv(self, u: int = 1, v: int = 1) -> "Poly5":
        out: dict[Exponent, int] = {}
        for (ex, ey, ez, eu, ev), c in self._terms.items():
            e = (ex, ey, ez, 0, 0)
            out[e] = out.get(e, 0) + c * u**eu * v**ev
        return Poly5(out)

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def weighted_degrees(self, weights: Iterable[int]) -> set[int]:
        w = tuple(weights)
        return {sum(a * b for a, b in zip(e, w)) for e in self._terms}

    def __call__(self, x, y, z, u, v):
        return self.evaluate(Tuple5(x, y, z, u, v))

    def evaluate(self, t) -> float:
        vals = tuple(t)
        total = 0.0
        for e, c in self._terms.items():
            term = float(c)
            for val, k in zip(vals, e):
                if k:
                    term *= val**k
            total += term
        return total

    def compile(self) -> "CompiledPoly":
        return CompiledPoly.from_poly(self)

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for e, c in self.key():
            mono = "*".join(
                VARS[i] if k == 1 else f"{VARS[i]}^{k}" for i, k in enumerate(e) if k
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly5({str(self)!r})"


@dataclass(frozen=True)
class CompiledPoly:
    """Array form of a polynomial for vectorised float evaluation."""

    exponents: np.ndarray  # (n_terms, 5) ints
    coeffs: np.ndarray  # (n_terms,) float64

    @classmethod
    def from_poly(cls, p: Poly5) -> "CompiledPoly":
        if p.is_zero():
            return cls(np.zeros((0, 5), dtype=np.int64), np.zeros(0))
        exps, coeffs = zip(*p.key())
        return cls(np.array(exps, dtype=np.int64), np.array(coeffs, dtype=float))

    def max_degree(self) -> int:
        return int(self.exponents.max()) if len(self.exponents) else 0

    def evaluate(self, powers: np.ndarray) -> np.ndarray:
        """Evaluate on a power table.

        ``powers[k, d, n]`` holds ``var_k ** d`` for sample ``n`` (see
        :func:`power_table`).  Returns one value per sample.
        """
        e = self.exponents
        terms = (
            powers[0, e[:, 0]]
            * powers[1, e[:, 1]]
            * powers[2, e[:, 2]]
            * powers[3, e[:, 3]]
            * powers[4, e[:, 4]]
        )
        return self.coeffs @ terms


def power_table(samples: np.ndarray, max_degree: int) -> np.ndarray:
    """``samples`` of shape (n, 5) -> table of shape (5, max_degree + 1, n)."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    table = np.empty((5, max_degree + 1, n))
    table[:, 0] = 1.0
    for d in range(1, max_degree + 1):
        table[:, d] = table[:, d - 1] * samples.T
    return table


# --- symbolic construction -------------------------------------------------

X, Y, Z, U, V = range(5)


@dataclass(frozen=True)
class LinearRep:
    """``w(A, B) = c0 I + c1 A + c2 B + c3 AB`` with polynomial coefficients."""

    c0: Poly5
    c1: Poly5
    c2: Poly5
    c3: Poly5

    def times_a(self) -> "LinearRep":
        c0, c1, c2, c3 = self.c0, self.c1, self.c2, self.c3
        # A.A = xA - uI ; B.A = -AB + yA + xB - (xy - z)I ; AB.A = zA + uB - yuI
        return LinearRep(
            -c1.shift(U) - c2.shift(X).shift(Y) + c2.shift(Z) - c3.shift(Y).shift(U),
            c0 + c1.shift(X) + c2.shift(Y) + c3.shift(Z),
            c2.shift(X) + c3.shift(U),
            -c2,
        )

    def times_b(self) -> "LinearRep":
        c0, c1, c2, c3 = self.c0, self.c1, self.c2, self.c3
        # A.B = AB ; B.B = yB - vI ; AB.B = yAB - vA
        return LinearRep(
            -c2.shift(V),
            -c3.shift(V),
            c0 + c2.shift(Y),
            c1 + c3.shift(Y),
        )

    def trace(self) -> Poly5:
        # tr I = 2, tr A = x, tr B = y, tr AB = z
        return self.c0 * 2 + self.c1.shift(X) + self.c2.shift(Y) + self.c3.shift(Z)


_ZERO = Poly5()
_ONE = Poly5.const(1)
_IDENTITY = LinearRep(_ONE, _ZERO, _ZERO, _ZERO)


@lru_cache(maxsize=1 << 16)
def linear_rep(w: str) -> LinearRep:
    """Reduced form of ``w(A, B)`` in the basis ``I, A, B, AB``."""
    if w == "":
        return _IDENTITY
    prev = linear_rep(w[:-1])
    return prev.times_a() if w[-1] == "a" else prev.times_b()


@lru_cache(maxsize=1 << 14)
def fricke_polynomial(w: str) -> Poly5:
    validate(w)
    return linear_rep(w).trace()


def reduced_fricke(w: str) -> Poly5:
    """``F_w`` with both determinants set to 1, a polynomial in ``x, y, z``."""
    return fricke_polynomial(w).substitute_uv(1, 1)


def is_2_isospectral(w1: str, w2: str) -> bool:
    """Exact test: do ``w1(A,B)`` and ``w2(A,B)`` share eigenvalues for all 2x2 pairs."""
    if w1.count("a") != w2.count("a") or w1.count("b") != w2.count("b"):
        return False
    return fricke_polynomial(w1) == fricke_polynomial(w2)


def eval_trace(w: str, t) -> float:
    return fricke_polynomial(w).evaluate(t)


def quadratic_spectral_radius(tau, delta):
    """Largest root modulus of ``l**2 - tau*l + delta`` (real coefficients).

    Works elementwise on arrays.
    """
    tau = np.asarray(tau, dtype=float)
    delta = np.asarray(delta, dtype=float)
    disc = tau * tau - 4.0 * delta
    real_roots = (np.abs(tau) + np.sqrt(np.maximum(disc, 0.0))) / 2.0
    complex_pair = np.sqrt(np.abs(delta))
    out = np.where(disc >= 0.0, real_roots, complex_pair)
    return out if out.ndim else float(out)


def eval_product_spectrum(w: str, t) -> tuple[float, float]:
    """Spectral radius of ``w(A, B)`` and its ``1/|w|`` power, from the invariants alone."""
    t = Tuple5(*t)
    tau = eval_trace(w, t)
    delta = t.u ** w.count("a") * t.v ** w.count("b")
    rho = float(quadratic_spectral_radius(tau, delta))
    return rho, rho ** (1.0 / len(w))


def dedup_isospectral(words: Iterable[str]) -> list[str]:
    """Keep the first word of each 2-isospectrality class, preserving order."""
    seen: set[Poly5] = set()
    out = []
    for w in words:
        p = fricke_polynomial(w)
        if p not in seen:
            seen.add(p)
            out.append(w)
    return out


def isospectral_classes(words: Iterable[str]) -> dict[Poly5, list[str]]:
    classes: dict[Poly5, list[str]] = {}
    for w in words:
        classes.setdefault(fricke_polynomial(w), []).append(w)
    return classes
