"""Closed-form 2x2 linear algebra: spectra, norms, JSR bounds, realization.

Matrices are plain ``numpy`` arrays of shape ``(2, 2)``, real or complex.
Batched variants accept stacks of shape ``(n, 2, 2)``.
"""

from __future__ import annotations

import math

import numpy as np

from .fricke import Tuple5, quadratic_spectral_radius

MAX_BOUNDS_LENGTH = 20
REL_TOL = 1e-9
ABS_TOL = 1e-12


class DomainError(ValueError):
    """Raised when an input lies outside an operation's mathematical domain."""


def as_matrix(m, dtype=float) -> np.ndarray:
    arr = np.asarray(m, dtype=dtype)
    if arr.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def trace(m):
    return m[..., 0, 0] + m[..., 1, 1]


def det(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def eigenvalues(m) -> tuple[complex, complex]:
    """Both eigenvalues, larger modulus first."""
    tau, delta = complex(trace(m)), complex(det(m))
    root = np.sqrt(tau * tau - 4 * delta)
    l1, l2 = (tau + root) / 2, (tau - root) / 2
    if abs(l2) > abs(l1):
        l1, l2 = l2, l1
    return l1, l2


def dominant_eigenvalue(m) -> complex | float:
    """Eigenvalue of largest modulus; returned as a float when real."""
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return eigenvalues(m)[0]
    tau, delta = float(trace(m)), float(det(m))
    disc = tau * tau - 4 * delta
    if disc < 0:
        return eigenvalues(m)[0]
    return (tau + math.copysign(math.sqrt(disc), tau)) / 2


def spectral_radius(m):
    """``max |lambda|`` from the characteristic quadratic; batched over leading axes."""
    m = np.asarray(m)
    if np.iscomplexobj(m):
        if m.ndim == 2:
            return abs(eigenvalues(m)[0])
        tau, delta = trace(m), det(m)
        root = np.sqrt(tau * tau - 4 * delta)
        return np.maximum(np.abs(tau + root), np.abs(tau - root)) / 2
    return quadratic_spectral_radius(trace(m), det(m))


def spectral_norm(m):
    """Largest singular value, batched; closed form on ``M^T M``."""
    m = np.asarray(m)
    fro2 = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    d = np.abs(det(m))
    disc = np.maximum(fro2 * fro2 - 4 * d * d, 0.0)
    out = np.sqrt((fro2 + np.sqrt(disc)) / 2)
    return out if out.ndim else float(out)


def evaluate_word(w: str, A, B) -> np.ndarray:
    """The product ``w(A, B)``, letters multiplied left to right."""
    out = np.eye(2, dtype=np.result_type(A, B))
    for ch in w:
        out = out @ (A if ch == "a" else B)
    return out


def invariants_of_pair(A, B) -> Tuple5:
    return Tuple5(
        float(trace(A)), float(trace(B)), float(trace(A @ B)), float(det(A)), float(det(B))
    )


def all_products(A, B, k: int) -> np.ndarray:
    """Stack of all ``2**k`` products of length ``k``.

    Row ``i`` is the word whose letters are the binary digits of ``i``
    (most significant first, 0 = a, 1 = b).
    """
    prods = np.stack([A, B])
    gens = prods
    for _ in range(k - 1):
        prods = np.einsum("nij,gjk->ngik", prods, gens).reshape(-1, 2, 2)
    return prods


def index_to_word(i: int, k: int) -> str:
    return format(i, f"0{k}b").replace("0", "a").replace("1", "b")


def jsr_bounds(A, B, k: int) -> tuple[float, float]:
    """Lower and upper bounds on the joint spectral radius from products of length <= k.

    The lower bound maximises ``rho(P)^(1/|P|)`` over every product of length
    at most ``k``; powers and rotations do not change this value, so it
    equals the maximum over primitive rotation classes.  The upper bound is
    the largest spectral norm of a length-``k`` product, to the power ``1/k``.
    """
    if not 1 <= k <= MAX_BOUNDS_LENGTH:
        raise ValueError(f"k must be in 1..{MAX_BOUNDS_LENGTH}")
    A = as_matrix(A)
    B = as_matrix(B)
    lower = 0.0
    prods = np.stack([A, B])
    for length in range(1, k + 1):
        if length > 1:
            prods = np.einsum("nij,gjk->ngik", prods, np.stack([A, B])).reshape(-1, 2, 2)
        lower = max(lower, float(np.max(spectral_radius(prods))) ** (1.0 / length))
    upper = float(np.max(spectral_norm(prods))) ** (1.0 / k)
    return lower, upper


def best_products(A, B, max_len: int, top: int = 5) -> list[tuple[str, float]]:
    """Primitive rotation classes with the largest normalised spectral radius."""
    from .words import canonical, is_primitive

    best: dict[str, float] = {}
    prods = None
    for length in range(1, max_len + 1):
        prods = np.stack([A, B]) if prods is None else np.einsum(
            "nij,gjk->ngik", prods, np.stack([A, B])
        ).reshape(-1, 2, 2)
        rho = spectral_radius(prods) ** (1.0 / length)
        for i in np.argsort(rho)[::-1][: 4 * top * length]:
            w = index_to_word(int(i), length)
            if is_primitive(w):
                c = canonical(w)
                best[c] = max(best.get(c, 0.0), float(rho[i]))
    return sorted(best.items(), key=lambda kv: -kv[1])[:top]


def gram_like_matrix(t) -> np.ndarray:
    x, y, z, u, v = t
    return np.array([[u, x / 2, z / 2], [x / 2, 1.0, y / 2], [z / 2, y / 2, v]])


def realizability_minors(t) -> tuple[float, float]:
    x, y, z, u, v = t
    return 4 * u - x * x, 4 * u * v - z * z - v * x * x - u * y * y + x * y * z


def realizable(t) -> bool:
    """Can ``t`` be the invariants of a pair of real 2x2 matrices?"""
    return min(realizability_minors(t)) <= 0


def _triangular_pair(x, y, z, u, v):
    # A upper triangular with real eigenvalues, B in companion form (c = 1 never vanishes)
    root = math.sqrt(max(x * x - 4 * u, 0.0))
    lam1 = (x + math.copysign(root, x)) / 2 if x else root / 2
    lam2 = u / lam1 if lam1 else x - lam1
    B = np.array([[0.0, -v], [1.0, y]])
    # tr(AB) = mu * 1 + lam2 * y
    mu = z - lam2 * y
    A = np.array([[lam1, mu], [0.0, lam2]])
    return A, B


def realize(t) -> tuple[np.ndarray, np.ndarray]:
    """A real pair ``(A, B)`` whose invariants are ``t``.

    Raises :class:`DomainError` when ``t`` is not realizable.
    """
    x, y, z, u, v = (float(c) for c in t)
    if not realizable((x, y, z, u, v)):
        raise DomainError(f"tuple {tuple(t)} is not realizable by real matrices")
    if 4 * u - x * x <= 0:
        return _triangular_pair(x, y, z, u, v)
    if 4 * v - y * y <= 0:
        B, A = _triangular_pair(y, x, z, v, u)
        return A, B
    p = math.sqrt(u - x * x / 4)
    q = math.sqrt(v - y * y / 4)
    a = p * q
    b = z - x * y / 2
    disc = b * b - 4 * a * a
    if disc <= 0:
        # boundary of the realizable set (up to rounding): double root of modulus 1
        mu = -math.copysign(1.0, b)
    else:
        # roots are reciprocal; take the one away from cancellation
        mu = (-b - math.copysign(math.sqrt(disc), b)) / (2 * a)
    A = np.array([[x / 2, -p], [p, x / 2]])
    B = np.array([[y / 2, -q / mu], [mu * q, y / 2]])
    return A, B


def commutator_cube_trace(A, B):
    C = A @ B - B @ A
    return trace(C @ C @ C)


def close(a, b, rel: float = REL_TOL, abs_: float = ABS_TOL) -> bool:
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), abs_)
