"""Command-line interface.

Exit codes: 0 on success, 1 when the input is valid but the mathematical
question has a negative answer (not realizable, not certified, ...), 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import constants, fricke, mat2, search, words
from .polytope import certify

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _word(text: str) -> str:
    try:
        return words.parse_word(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _word_list(text: str) -> list[str]:
    return [_word(part) for part in text.split(",") if part.strip()]


def _ratios(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ratio list {text!r}") from None


def load_pair(path: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        data = json.loads(Path(path).read_text())
        return mat2.as_matrix(data["A"]), mat2.as_matrix(data["B"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read pair from {path}: {exc}") from None


def pair_json(A, B) -> dict:
    return {"A": np.asarray(A).tolist(), "B": np.asarray(B).tolist()}


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _summary(cert) -> str:
    lines = [f"verdict: {cert.verdict}"]
    if cert.reason:
        lines.append(f"reason: {cert.reason}")
    lines.append(f"smp words: {', '.join(words.format_word(w) for w in cert.smp_words)}")
    if cert.certified:
        lines += [
            f"joint spectral radius: {cert.scale:.12g}",
            f"dominant eigenvalue of first product: {cert.dominant_eigenvalue:.8g}",
            f"balancing ratios: {', '.join(f'{r:.6g}' for r in cert.ratios)}",
            f"vertices: {cert.n_vertices} ({cert.n_vertices // 2} pairs)",
            f"min interior margin: {cert.min_interior_margin:.4g}",
            f"max interior angle: {cert.max_interior_angle:.3f} deg",
            f"unique: {cert.unique}",
        ]
    return "\n".join(lines)


# --- subcommands -------------------------------------------------------------------


def cmd_fricke(args) -> int:
    p = fricke.reduced_fricke(args.word) if args.reduced else fricke.fricke_polynomial(args.word)
    if args.json:
        _emit({"word": args.word, "reduced": args.reduced, "polynomial": str(p),
               "terms": [[list(e), c] for e, c in p.key()]})
    else:
        print(p)
    return EXIT_OK


def cmd_words(args) -> int:
    if args.fraction is not None:
        frac = words.chiral_fraction(args.fraction, over=args.over)
        if args.json:
            _emit({"length": args.fraction, "over": args.over,
                   "numerator": frac.numerator, "denominator": frac.denominator, "value": float(frac)})
        else:
            print(f"{frac} = {float(frac):.6f}")
        return EXIT_OK
    if args.chiral:
        items = [list(p) for p in words.chiral_pairs(args.max_len, modulo_swap=args.modulo_swap)]
    else:
        items = words.lyndon_words(args.max_len)
        if args.dedup:
            items = fricke.dedup_isospectral(items)
    if args.count:
        print(len(items))
    elif args.json:
        _emit(items)
    else:
        for it in items:
            print(" ".join(it) if isinstance(it, list) else it)
    return EXIT_OK


def cmd_realize(args) -> int:
    t = (args.x, args.y, args.z, args.u, args.v)
    try:
        A, B = mat2.realize(t)
    except mat2.DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    _emit(pair_json(A, B), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    A, B = load_pair(args.pair)
    if not 1 <= args.k <= mat2.MAX_BOUNDS_LENGTH:
        raise UsageError(f"-k must be in 1..{mat2.MAX_BOUNDS_LENGTH}")
    lower, upper = mat2.jsr_bounds(A, B, args.k)
    if args.json:
        _emit({"k": args.k, "lower": lower, "upper": upper})
    else:
        print(f"lower {lower:.12g}")
        print(f"upper {upper:.12g}")
    return EXIT_OK


def cmd_certify(args) -> int:
    A, B = load_pair(args.pair)
    if args.ratios is not None and len(args.ratios) != len(args.smp):
        raise UsageError("--ratios needs one value per --smp word")
    cert = certify(A, B, args.smp, ratios=args.ratios, balancing=args.balancing)
    if args.json or args.out:
        _emit(cert.to_json(), args.out)
    if not args.json:
        print(_summary(cert))
    return EXIT_OK if cert.certified else EXIT_DOMAIN


def cmd_search(args) -> int:
    try:
        cfg = search.SearchConfig(
            n_samples=args.samples,
            max_word_len=args.max_len,
            target_chirals_max_len=args.targets_len,
            seed=args.seed,
            certify=not args.no_certify,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    records = search.run_search(cfg, threads=args.threads)
    text = search.records_to_csv(records)
    if args.out:
        Path(args.out).write_text(text)
        certified = sum(r.status == "certified" for r in records)
        print(f"{args.samples} samples, {len(records)} candidates, {certified} certified", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_reproduce_table(args) -> int:
    report = search.reproduce_table()
    if args.json:
        _emit([r.to_json() for r in report])
    else:
        for r in report:
            status = "PASS" if r.ok else "FAIL"
            found = "-" if r.n_found is None else r.n_found
            extra = f"  ({r.reason})" if r.reason else ""
            print(f"row {r.row} {words.format_word(r.word):>10}  screen={'ok' if r.screened else 'no'}"
                  f"  verdict={r.verdict}  n={found} (table {r.n_table})  {status}{extra}")
    return EXIT_OK if all(r.ok for r in report) else EXIT_DOMAIN


def cmd_example(args) -> int:
    A, B = constants.A0.copy(), constants.B0.copy()
    if args.perturb_b21 is None:
        cert = certify(A, B, constants.SMP_PAIR, ratios=[1.0, args.ratio])
        if args.json:
            _emit(cert.to_json())
        else:
            print(_summary(cert))
        return EXIT_OK if cert.verdict == "certified-unique-pair" else EXIT_DOMAIN

    B[1, 0] += args.perturb_b21
    pair = certify(A, B, constants.SMP_PAIR)
    runner = certify(A, B, [constants.RUNNER_UP_WORD])
    if args.json:
        _emit({"perturb_b21": args.perturb_b21, "chiral_pair": pair.to_json(), "runner_up": runner.to_json()})
    else:
        print("chiral pair:")
        print(_summary(pair))
        print()
        print(f"{words.format_word(constants.RUNNER_UP_WORD)} alone:")
        print(_summary(runner))
    return EXIT_OK if runner.certified and runner.unique else EXIT_DOMAIN


# --- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jsrforge", description="Chiral spectrum maximizing products of 2x2 pairs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fricke", help="Fricke trace polynomial of a word")
    p.add_argument("word", type=_word)
    p.add_argument("--reduced", action="store_true", help="set both determinants to 1")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fricke)

    p = sub.add_parser("words", help="Lyndon words, chiral pairs, chiral fractions")
    p.add_argument("--max-len", type=int, default=constants.TARGET_MAX_LEN)
    p.add_argument("--chiral", action="store_true", help="list chiral pairs")
    p.add_argument("--modulo-swap", action="store_true", help="also identify a <-> b")
    p.add_argument("--dedup", action="store_true", help="one word per isospectrality class")
    p.add_argument("--fraction", type=int, metavar="LENGTH")
    p.add_argument("--over", choices=("primitive", "words"), default="primitive")
    p.add_argument("--count", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_words)

    p = sub.add_parser("realize", help="real matrices with given invariants")
    for name in "xyzuv":
        p.add_argument(name, type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("bounds", help="joint spectral radius bounds")
    p.add_argument("--pair", required=True)
    p.add_argument("-k", type=int, default=8)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("certify", help="certify spectrum maximizing products")
    p.add_argument("--pair", required=True)
    p.add_argument("--smp", type=_word_list, required=True, help="comma separated, e.g. a2bab2,b2aba2")
    p.add_argument("--ratios", type=_ratios)
    p.add_argument("--balancing", choices=("centre", "margin"), default="centre")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("search", help="random trace-space search")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-len", type=int, default=constants.LYNDON_MAX_LEN)
    p.add_argument("--targets-len", type=int, default=constants.TARGET_MAX_LEN)
    p.add_argument("--threads", type=int)
    p.add_argument("--no-certify", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("reproduce-table", help="re-certify the reference table")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_reproduce_table)

    p = sub.add_parser("paper-example", help="certify the explicit chiral pair")
    p.add_argument("--perturb-b21", type=float, metavar="DELTA")
    p.add_argument("--ratio", type=float, default=constants.BALANCING_RATIO)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
