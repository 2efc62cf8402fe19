"""Command-line front end.

Four subcommands: ``cf`` expands a quadratic surd and prints its stabilizer
generator; ``decide`` runs the conjugacy decision on two descriptor files;
``orbit`` samples an orbit to CSV (and optionally SVG); ``verify`` runs the
full decide -> realize -> numerically-check pipeline.  All output is JSON on
stdout (CSV/SVG only as files) and deterministic for a fixed seed.

Exit codes: 0 success (for decide: conjugate; for verify: verified),
1 negative result (not conjugate / verification failed), 2 invalid input,
3 undecided or not-applicable (verify on a non-conjugate pair).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from .circlegroup import CircleGroupDescriptor, orbit_sample, orbit_svg, orbit_to_csv
from .conjugacy import (
    corrupt_witness,
    decide,
    verify_conjugation,
    witness_to_homeo,
)
from .exactnum import RationalInputError, Surd, cf_expand, stabilizer_generator
from .homeo import CirclePoint, Precision

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INVALID = 2
EXIT_UNDECIDED = 3


def _parse_surd(text: str) -> Surd:
    fields = {}
    for part in text.split(","):
        if "=" not in part:
            raise ValueError(f"malformed surd component {part!r} (expected key=value)")
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in ("a", "b", "c", "d"):
            raise ValueError(f"unknown surd field {key!r}")
        if key in fields:
            raise ValueError(f"duplicate surd field {key!r}")
        fields[key] = int(value)
    if "a" not in fields:
        raise ValueError("surd needs at least the field a")
    return Surd(fields["a"], fields.get("b", 0), fields.get("c", 1), fields.get("d", 1))


def _precision(args) -> Precision:
    return Precision(working_bits=args.precision_bits, singular_margin=args.delta)


def _load_descriptor(path: str) -> CircleGroupDescriptor:
    with open(path, "r", encoding="utf-8") as fh:
        return CircleGroupDescriptor.from_json(json.load(fh))


def _emit(obj: dict, out_path=None) -> None:
    text = json.dumps(obj, indent=2)
    print(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def cmd_cf(args) -> int:
    try:
        surd = _parse_surd(args.surd)
        cf = cf_expand(surd)
        T = stabilizer_generator(surd)
    except (ValueError, RationalInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    with mpmath.mp.workprec(args.precision_bits):
        value = mpmath.nstr(surd.value(args.precision_bits), 30)
    _emit(
        {
            "surd": surd.to_json(),
            "value": value,
            "cf": cf.to_json(),
            "stabilizer_generator": T.to_json() if T is not None else None,
        },
        args.out,
    )
    return EXIT_OK


def cmd_decide(args) -> int:
    try:
        d1 = _load_descriptor(args.d1)
        d2 = _load_descriptor(args.d2)
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    dec = decide(d1, d2)
    _emit(dec.to_json(), args.out)
    if dec.verdict == "conjugate":
        return EXIT_OK
    if dec.verdict == "not_conjugate":
        return EXIT_NEGATIVE
    return EXIT_UNDECIDED


def cmd_orbit(args) -> int:
    try:
        d = _load_descriptor(args.descriptor)
        t0 = Fraction(args.t0)
        if (t0 * d.k).denominator == 1:
            raise ValueError(f"t0 = {t0} is a marked point of the k = {d.k} orbit")
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    p = _precision(args)
    sample = orbit_sample(d, CirclePoint(t0), args.count, seed=args.seed, p=p)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(orbit_to_csv(sample))
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(orbit_svg(sample, d.k))
    _emit(
        {
            "count": args.count,
            "seed": args.seed,
            "skipped": sample.skipped,
            "max_gap": mpmath.nstr(sample.max_gap, 12),
            "csv": args.out,
            "svg": args.svg,
        }
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        d1 = _load_descriptor(args.d1)
        d2 = _load_descriptor(args.d2)
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    dec = decide(d1, d2)
    if dec.verdict != "conjugate":
        _emit({"decision": dec.to_json(), "report": None}, args.out)
        return EXIT_UNDECIDED
    p = _precision(args)
    wit = dec.witness
    realized = corrupt_witness(d1, wit) if args.corrupt_witness else wit
    psi = witness_to_homeo(d1, d2, realized, check=not args.corrupt_witness)
    report = verify_conjugation(
        psi, d1, d2, wit, grid_size=args.grid, tol=args.tol, p=p, seed=args.seed
    )
    _emit(
        {
            "decision": dec.to_json(),
            "corrupt_witness": bool(args.corrupt_witness),
            "seed": args.seed,
            "report": report,
        },
        args.out,
    )
    return EXIT_OK if report["ok"] else EXIT_NEGATIVE


_SHARED_FLAGS = (
    ("--precision-bits", int, 256, "working precision"),
    ("--delta", float, 1e-4, "trust margin near breakpoints"),
    ("--seed", int, 0, "seed for sampled grids"),
)


def _add_shared_flags(parser, top_level: bool) -> None:
    # Shared flags may appear before or after the subcommand.  The subparser
    # copies default to SUPPRESS so they never clobber a value parsed at the
    # top level.
    for name, typ, default, text in _SHARED_FLAGS:
        parser.add_argument(
            name, type=typ, help=text, default=default if top_level else argparse.SUPPRESS
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circleconj",
        description="conjugacy engine for integer-lattice circle homeomorphism groups",
    )
    _add_shared_flags(parser, top_level=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p_cf = sub.add_parser("cf", help="continued fraction and stabilizer of a quadratic surd")
    p_cf.add_argument("--surd", required=True, help="e.g. a=-1,b=1,c=1,d=2 for sqrt(2)-1")
    p_cf.add_argument("--out", default=None, help="also write the JSON to this file")
    p_cf.set_defaults(func=cmd_cf)

    p_dec = sub.add_parser("decide", help="decide conjugacy of two descriptor files")
    p_dec.add_argument("d1")
    p_dec.add_argument("d2")
    p_dec.add_argument("--out", default=None)
    p_dec.set_defaults(func=cmd_decide)

    p_orb = sub.add_parser("orbit", help="sample an orbit to CSV (and optional SVG)")
    p_orb.add_argument("descriptor")
    p_orb.add_argument("--t0", required=True, help="start point in [0,1), decimal or p/q")
    p_orb.add_argument("--count", type=int, default=1000)
    p_orb.add_argument("--out", required=True, help="CSV output path")
    p_orb.add_argument("--svg", default=None, help="optional SVG output path")
    p_orb.set_defaults(func=cmd_orbit)

    p_ver = sub.add_parser("verify", help="decide, realize and numerically verify")
    p_ver.add_argument("d1")
    p_ver.add_argument("d2")
    p_ver.add_argument("--grid", type=int, default=48)
    p_ver.add_argument("--tol", type=float, default=1e-6)
    p_ver.add_argument("--corrupt-witness", action="store_true", help="negative-control mode")
    p_ver.add_argument("--out", default=None)
    p_ver.set_defaults(func=cmd_verify)

    for p in (p_cf, p_dec, p_orb, p_ver):
        _add_shared_flags(p, top_level=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
