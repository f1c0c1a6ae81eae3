"""Random search in trace space for pairs whose best product is chiral.

Five-tuples ``(x, y, z, u, v)`` are drawn uniformly, non-realizable ones are
dropped, and each remaining tuple is screened: the normalised spectral
radius of every target class is compared with every other class of the
isospectrally deduplicated Lyndon list, dropping the tuple as soon as some
word ties or beats the best target.  Survivors are realized as matrices and
handed to the invariant polygon certification.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import constants, mat2
from .fricke import (
    Poly5,
    Tuple5,
    dedup_isospectral,
    fricke_polynomial,
    power_table,
    quadratic_spectral_radius,
)
from .polytope import Certificate, certify
from .words import chiral_pairs, lyndon_words, mirror

TIE_TOL = 1e-12
BLOCK = 1 << 14
CSV_COLUMNS = ("sample_index", "x", "y", "z", "u", "v", "best_word", "normalized_rho", "gap", "status")
THREADS_ENV = "JSRFORGE_THREADS"

Sampler = Callable[[int, int], np.ndarray]


@dataclass(frozen=True)
class SearchConfig:
    n_samples: int
    max_word_len: int = constants.LYNDON_MAX_LEN
    target_chirals_max_len: int = constants.TARGET_MAX_LEN
    seed: int = 0
    ranges: dict = field(default_factory=lambda: dict(constants.SAMPLE_RANGES))
    certify: bool = True

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for name in "xyzuv":
            lo, hi = self.ranges[name]
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bad range for {name}: {(lo, hi)}")


@dataclass
class CandidateRecord:
    sample_index: int
    tuple: Tuple5
    best_word: str
    best_normalized_rho: float
    runner_up_gap: float
    status: str
    certificate: Certificate | None = None

    def csv_row(self) -> list[str]:
        return (
            [str(self.sample_index)]
            + [repr(float(c)) for c in self.tuple]
            + [self.best_word, repr(self.best_normalized_rho), repr(self.runner_up_gap), self.status]
        )


# --- screening ----------------------------------------------------------------


class Screener:
    """Vectorised screening of tuples against a list of words.

    ``words`` are grouped by Fricke polynomial; each target is compared with
    every class other than its own.  Ties across classes (within a relative
    ``TIE_TOL``) count as defeats.
    """

    def __init__(self, words: Sequence[str], targets: Sequence[str]):
        target_keys: dict[Poly5, str] = {}
        for t in targets:
            target_keys.setdefault(fricke_polynomial(t), t)
        self._target_words = list(target_keys.values())
        self._target = [self._compile(w, k) for k, w in target_keys.items()]
        self._others = []
        seen = set(target_keys)
        for w in words:
            k = fricke_polynomial(w)
            if k not in seen:
                seen.add(k)
                self._others.append(self._compile(w, k))
        # delta = u^na v^nb also reads the table
        self.max_degree = max(max(len(w) for w, *_ in self._target + self._others), 1)

    @staticmethod
    def _compile(w, poly):
        c = poly.compile()
        return w, c.exponents, c.coeffs, w.count("a"), w.count("b")

    @staticmethod
    def _rho(entry, powers):
        _, e, coeffs, na, nb = entry
        terms = powers[0, e[:, 0]] * powers[1, e[:, 1]] * powers[2, e[:, 2]]
        terms *= powers[3, e[:, 3]]
        terms *= powers[4, e[:, 4]]
        tau = coeffs @ terms
        delta = powers[3, na] * powers[4, nb]
        return quadratic_spectral_radius(tau, delta) ** (1.0 / (na + nb))

    def screen(self, samples: np.ndarray):
        """Best target index, its normalised rho, the runner-up value and the accept mask."""
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        n = len(samples)
        powers = power_table(samples, self.max_degree)
        vals = np.vstack([self._rho(t, powers) for t in self._target])
        order = np.argsort(-vals, axis=0, kind="stable")
        best = order[0]
        top = vals[best, np.arange(n)]
        runner = vals[order[1], np.arange(n)] if len(vals) > 1 else np.zeros(n)
        threshold = top * (1 - TIE_TOL)
        alive = runner < threshold
        for entry in self._others:
            idx = np.flatnonzero(alive)
            if len(idx) == 0:
                break
            r = self._rho(entry, powers[:, :, idx])
            runner[idx] = np.maximum(runner[idx], r)
            alive[idx[r >= threshold[idx]]] = False
        return best, top, runner, alive

    def word_of(self, target_index: int) -> str:
        return self._target_words[target_index]


@lru_cache(maxsize=8)
def word_list(max_len: int = constants.LYNDON_MAX_LEN) -> tuple[str, ...]:
    """Lyndon words up to ``max_len`` with one representative per isospectrality class."""
    return tuple(dedup_isospectral(lyndon_words(max_len)))


def default_targets(max_len: int = constants.TARGET_MAX_LEN) -> list[str]:
    """One word from each chiral pair up to ``max_len``."""
    return [p for p, _ in chiral_pairs(max_len)]


@lru_cache(maxsize=64)
def _screener(words: tuple[str, ...], targets: tuple[str, ...]) -> Screener:
    return Screener(words, targets)


def screen(t, target: str, words: Sequence[str] | None = None) -> bool:
    """Does ``target`` beat every non-isospectral word of ``words`` at ``t``?"""
    words = word_list() if words is None else words
    _, _, _, alive = _screener(tuple(words), (target,)).screen(np.asarray([tuple(t)], dtype=float))
    return bool(alive[0])


# --- sampling -------------------------------------------------------------------


def _block_rng(seed: int, block: int) -> np.random.Generator:
    # counter-based: each (seed, block) pair keys its own Philox stream
    return np.random.Generator(np.random.Philox(key=seed + (block << 64)))


def uniform_sampler(cfg: SearchConfig) -> Sampler:
    lo = np.array([cfg.ranges[k][0] for k in "xyzuv"], dtype=float)
    hi = np.array([cfg.ranges[k][1] for k in "xyzuv"], dtype=float)

    def sample_block(block: int, count: int) -> np.ndarray:
        return lo + (hi - lo) * _block_rng(cfg.seed, block).random((count, 5))

    return sample_block


def _realizable_mask(s: np.ndarray) -> np.ndarray:
    x, y, z, u, v = s.T
    m1 = 4 * u - x * x
    m2 = 4 * u * v - z * z - v * x * x - u * y * y + x * y * z
    return np.minimum(m1, m2) <= 0


def thread_count() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return n
    return min(os.cpu_count() or 1, 8)


def _certify_record(rec: CandidateRecord) -> CandidateRecord:
    try:
        A, B = mat2.realize(rec.tuple)
    except mat2.DomainError as exc:
        rec.status = f"rejected({exc})"
        return rec
    cert = certify(A, B, [rec.best_word, mirror(rec.best_word)])
    rec.certificate = cert
    rec.status = "certified" if cert.certified else f"rejected({cert.reason})"
    return rec


def run_search(
    cfg: SearchConfig,
    targets: Sequence[str] | None = None,
    sampler: Sampler | None = None,
    threads: int | None = None,
) -> list[CandidateRecord]:
    """Sample, screen and certify; records come back sorted by sample index.

    ``sampler(block, count)`` returns ``count`` tuples for block ``block``
    (sample indices ``block * BLOCK ...``); it defaults to the seeded
    uniform sampler and exists so tests can inject known tuples.
    """
    targets = default_targets(cfg.target_chirals_max_len) if targets is None else list(targets)
    if not targets:
        raise ValueError("no targets to search for")
    sampler = uniform_sampler(cfg) if sampler is None else sampler
    scr = _screener(word_list(cfg.max_word_len), tuple(targets))
    threads = thread_count() if threads is None else threads

    def run_block(block: int) -> list[CandidateRecord]:
        start = block * BLOCK
        count = min(BLOCK, cfg.n_samples - start)
        s = np.asarray(sampler(block, count), dtype=float).reshape(count, 5)
        keep = np.flatnonzero(_realizable_mask(s))
        if len(keep) == 0:
            return []
        best, top, runner, alive = scr.screen(s[keep])
        out = []
        for k in np.flatnonzero(alive):
            i = keep[k]
            out.append(
                CandidateRecord(
                    sample_index=start + int(i),
                    tuple=Tuple5(*(float(c) for c in s[i])),
                    best_word=scr.word_of(int(best[k])),
                    best_normalized_rho=float(top[k]),
                    runner_up_gap=float(top[k] - runner[k]),
                    status="screened",
                )
            )
        return out

    n_blocks = -(-cfg.n_samples // BLOCK)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        records = [r for chunk in pool.map(run_block, range(n_blocks)) for r in chunk]
        if cfg.certify:
            records = list(pool.map(_certify_record, records))
    records.sort(key=lambda r: r.sample_index)
    return records


def records_to_csv(records: Sequence[CandidateRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.csv_row())
    return buf.getvalue()


# --- table ------------------------------------------------------------------------


@dataclass
class TableRow:
    row: int
    word: str
    tuple: Tuple5
    n_table: int
    screened: bool
    verdict: str
    n_found: int | None
    reason: str | None

    @property
    def within_tolerance(self) -> bool:
        return self.n_found is not None and abs(self.n_found - self.n_table) <= constants.TABLE_VERTEX_TOLERANCE

    @property
    def ok(self) -> bool:
        return self.screened and self.verdict == "certified-unique-pair" and self.within_tolerance

    def to_json(self) -> dict:
        return {
            "row": self.row,
            "word": self.word,
            "tuple": list(self.tuple),
            "n_table": self.n_table,
            "screened": self.screened,
            "verdict": self.verdict,
            "n_found": self.n_found,
            "within_tolerance": self.within_tolerance,
            "ok": self.ok,
            "reason": self.reason,
        }


def reproduce_table(words: Sequence[str] | None = None) -> list[TableRow]:
    """Screen, realize and certify every row of the reference table."""
    words = word_list() if words is None else words
    report = []
    for i, (w, t, n) in enumerate(constants.TABLE, start=1):
        t = Tuple5(*t)
        accepted = screen(t, w, words)
        try:
            A, B = mat2.realize(t)
        except mat2.DomainError as exc:
            report.append(TableRow(i, w, t, n, accepted, "failed", None, str(exc)))
            continue
        cert = certify(A, B, [w, mirror(w)])
        report.append(TableRow(i, w, t, n, accepted, cert.verdict, cert.n_vertices // 2 if cert.polygon else None, cert.reason))
    return report
