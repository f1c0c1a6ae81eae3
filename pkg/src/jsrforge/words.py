"""Words over the two-letter alphabet {a, b}.

A word is a plain ``str`` made of the letters ``a`` and ``b``.  The letter
``a`` stands for the matrix ``A`` and ``b`` for ``B``; the word ``"aababb"``
is the product ``A @ A @ B @ A @ B @ B``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

ALPHABET = "ab"
MAX_FRACTION_LENGTH = 24

_EXP_TOKEN = re.compile(r"([ab])(?:\^?(\d+))?")
_SWAP = str.maketrans("ab", "ba")


def validate(w: str) -> str:
    if not w or any(ch not in ALPHABET for ch in w):
        raise ValueError(f"not a word over {{a, b}}: {w!r}")
    return w


def parse_word(text: str) -> str:
    """Parse a word, accepting exponent notation.

    >>> parse_word("a2bab2")
    'aababb'
    >>> parse_word("a^3 b a^2 b")
    'aaabaab'
    """
    compact = text.replace(" ", "").replace("*", "")
    pos = 0
    out = []
    while pos < len(compact):
        m = _EXP_TOKEN.match(compact, pos)
        if m is None:
            raise ValueError(f"cannot parse word {text!r} at position {pos}")
        exponent = int(m.group(2)) if m.group(2) else 1
        if exponent < 1:
            raise ValueError(f"exponent must be positive in {text!r}")
        out.append(m.group(1) * exponent)
        pos = m.end()
    return validate("".join(out))


def format_word(w: str) -> str:
    """Exponent notation for display, e.g. ``aababb`` -> ``a2bab2``."""
    parts = []
    for m in re.finditer(r"a+|b+", w):
        run = m.group(0)
        parts.append(run[0] + (str(len(run)) if len(run) > 1 else ""))
    return "".join(parts)


def rotations(w: str) -> list[str]:
    return [w[i:] + w[:i] for i in range(len(w))]


def cyclic_rotations(w: str) -> set[str]:
    return set(rotations(w))


def canonical(w: str) -> str:
    """Lexicographically least rotation (``a < b``)."""
    return min(rotations(w))


def mirror(w: str) -> str:
    return w[::-1]


def swap_letters(w: str) -> str:
    return w.translate(_SWAP)


def is_primitive(w: str) -> bool:
    """True iff ``w`` is not a proper power ``u^m`` with ``m >= 2``."""
    n = len(w)
    # w is a proper power iff it occurs inside its own square at an offset 0 < k < n
    return (w + w).find(w, 1) == n


def is_chiral(w: str) -> bool:
    return canonical(mirror(w)) != canonical(w)


def is_lyndon(w: str) -> bool:
    return all(w < w[i:] + w[:i] for i in range(1, len(w)))


def _duval(max_len: int):
    # Duval's generation of Lyndon words of length <= max_len, in lex order
    w = [-1]
    while w:
        w[-1] += 1
        yield "".join(ALPHABET[i] for i in w)
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == len(ALPHABET) - 1:
            w.pop()


@lru_cache(maxsize=None)
def _lyndon_tuple(max_len: int) -> tuple[str, ...]:
    return tuple(sorted(_duval(max_len), key=lambda w: (len(w), w)))


def lyndon_words(max_len: int) -> list[str]:
    """All Lyndon words of length 1..max_len, ordered by length then lexicographically."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    return list(_lyndon_tuple(max_len))


def lyndon_words_of_length(n: int) -> list[str]:
    if n < 1:
        raise ValueError("length must be >= 1")
    return [w for w in _duval(n) if len(w) == n]


def substitute(w: str, img_a: str, img_b: str) -> str:
    """Image of ``w`` under the semigroup homomorphism a -> img_a, b -> img_b."""
    return "".join(img_a if ch == "a" else img_b for ch in w)


def chiral_pair(w: str) -> tuple[str, str]:
    """Canonical representatives of ``w`` and its mirror, smaller first."""
    p, q = canonical(w), canonical(mirror(w))
    return (p, q) if p <= q else (q, p)


def chiral_pairs(max_len: int, *, modulo_swap: bool = False) -> list[tuple[str, str]]:
    """Chiral pairs {w, mirror(w)} of primitive words up to ``max_len``.

    Pairs are counted modulo rotation and mirroring.  With ``modulo_swap`` the
    letter exchange a <-> b is quotiented out as well.
    """
    pairs = {chiral_pair(w) for w in lyndon_words(max_len) if is_chiral(w)}
    if modulo_swap:
        reduced = set()
        for p, q in pairs:
            swapped = chiral_pair(swap_letters(p))
            reduced.add(min((p, q), swapped))
        pairs = reduced
    return sorted(pairs, key=lambda pq: (len(pq[0]), pq))


def chiral_fraction(length: int, *, over: str = "primitive") -> Fraction:
    """Exact proportion of chiral objects of a given length.

    ``over="primitive"`` counts primitive rotation classes (Lyndon words);
    ``over="words"`` counts all ``2**length`` words, weighting each rotation
    class by its number of distinct rotations.
    """
    if not 1 <= length <= MAX_FRACTION_LENGTH:
        raise ValueError(f"length must be in 1..{MAX_FRACTION_LENGTH}")
    if over == "primitive":
        classes = lyndon_words_of_length(length)
        chiral = sum(1 for w in classes if is_chiral(w))
        return Fraction(chiral, len(classes))
    if over == "words":
        # a rotation class of period d contributes d words; chirality is a class property
        chiral = 0
        for d in range(1, length + 1):
            if length % d:
                continue
            chiral += d * sum(1 for w in lyndon_words_of_length(d) if is_chiral(w))
        return Fraction(chiral, 2**length)
    raise ValueError(f"unknown population {over!r}")
