"""Command-line front end.  Every subcommand prints one JSON report."""

from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema
import mpmath
import sympy

from . import __version__
from .errors import InputError, ReebCountError
from .homology import (
    BettiTable,
    OrbitEntry,
    OrbitSystem,
    RankFunction,
    chi_m_from_ranks,
    chi_m_orbits,
    resonance_check,
    sh_ranks_brieskorn,
    sh_ranks_displaceable,
    sh_ranks_prequantization,
)
from .indexcalc import SymplecticPath, cz_index, mean_index_of_path
from .iteration import IterationProfile, QuadIrrational, index_sequence, mean_index_exact
from .multiplicity import (
    SearchBounds,
    TargetPattern,
    corollary_a_bound,
    single_orbit_feasibility,
    theorem_a_check,
    theorem_b_check,
    theorem_c_check,
)
from .symplin import (
    hyperbolic,
    nondegeneracy_class,
    normal_form_decomposition,
    parse_matrix_json,
    rho_angle,
    rotation,
    spectrum,
)

_RATIONAL = {"type": ["string", "integer"], "pattern": r"^-?\d+(/\d+)?$"}
_COUNTS = {"type": "object", "patternProperties": {r"^-?\d+$": {"type": "integer", "minimum": 0}},
           "additionalProperties": False}
_ANGLE = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": ["quad", "rat"]}},
    "oneOf": [
        {"properties": {"kind": {"const": "quad"}}, "required": ["p", "q", "d", "s"]},
        {"properties": {"kind": {"const": "rat"}}, "required": ["num", "den"]},
    ],
}
_PROFILE = {
    "type": "object",
    "required": ["r"],
    "properties": {
        "r": {"type": "integer"},
        "n": {"type": "integer", "minimum": 1},
        "thetas": {"type": "array", "items": _ANGLE},
        "long_data": {"type": ["object", "null"]},
    },
}
_MATRIX = {
    "type": "object",
    "required": ["dim", "entries"],
    "properties": {
        "dim": {"type": "integer", "minimum": 2},
        "entries": {"type": "array", "items": {"type": "array", "items": _RATIONAL}},
    },
}

SCHEMAS = {
    "matrix": _MATRIX,
    "path": {
        "type": "object",
        "required": ["tau", "samples"],
        "properties": {
            "tau": _RATIONAL,
            "samples": {"type": "array", "items": {"type": "object", "required": ["t", "matrix"],
                                                   "properties": {"t": _RATIONAL, "matrix": _MATRIX}}},
        },
    },
    "profile": _PROFILE,
    "betti": {
        "type": "object",
        "required": ["dim", "betti"],
        "properties": {"dim": {"type": "integer", "minimum": 2}, "betti": _COUNTS},
    },
    "ranks": {
        "type": "object",
        "required": ["tail_start", "period", "tail"],
        "properties": {
            "exceptional": _COUNTS,
            "tail_start": {"type": "integer"},
            "period": {"type": "integer", "minimum": 2},
            "tail": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            "descending": {"type": "boolean"},
        },
    },
    "system": {
        "type": "object",
        "required": ["n", "orbits"],
        "properties": {
            "n": {"type": "integer", "minimum": 1},
            "orbits": {"type": "array", "items": {"type": "object", "required": ["label", "profile"],
                                                  "properties": {"label": {"type": "string"}, "profile": _PROFILE}}},
        },
    },
    "brieskorn": {
        "type": "object",
        "required": ["a0", "n"],
        "properties": {"a0": {"type": "integer", "minimum": 1}, "n": {"type": "integer", "minimum": 2}},
    },
}


class CliInputError(InputError):
    pass


def load(path: str, schema: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliInputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise CliInputError(f"{path} is not valid JSON: {exc}") from exc
    validate(data, schema, path)
    return data


def validate(data, schema: str, source: str = "<input>") -> None:
    validator = jsonschema.Draft202012Validator(SCHEMAS[schema])
    error = next(iter(sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))), None)
    if error is not None:
        pointer = "/" + "/".join(str(p) for p in error.absolute_path)
        raise CliInputError(f"{source}: field {pointer}: {error.message}")


def plain(obj):
    """Convert results to JSON-ready values; rationals become "p/q" strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj.numerator) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return obj
    if isinstance(obj, mpmath.mpf):
        return float(obj)
    if isinstance(obj, mpmath.mpc):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, sympy.Basic):
        return str(obj)
    if isinstance(obj, enum.Enum):
        return obj.name
    if hasattr(obj, "to_json"):
        return plain(obj.to_json())
    if dataclasses.is_dataclass(obj):
        return {f.name: plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {",".join(map(str, k)) if isinstance(k, tuple) else str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [plain(v) for v in items]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(payload) -> str:
    return json.dumps(plain(payload), sort_keys=True, indent=2) + "\n"


# --------------------------------------------------------------------------
# argument groups


def _bounds_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--K", type=int, default=200, help="largest cover examined (default 200)")
    p.add_argument("--grid-mesh", type=int, default=64, help="initial cells per unit angle (default 64)")
    p.add_argument("--depth", type=int, default=8, help="bisection depth below the mesh (default 8)")
    p.add_argument("--r-min", type=int)
    p.add_argument("--r-max", type=int)
    p.add_argument("--no-resonance", action="store_true", help="do not impose the mean-index equation")
    p.add_argument("--workers", type=int, default=1)


def _target_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--brieskorn", action="store_true")
    g.add_argument("--displaceable", action="store_true")
    g.add_argument("--prequantization", action="store_true")
    g.add_argument("--ranks", metavar="FILE", help="rank function JSON")
    p.add_argument("--a0", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=int)
    p.add_argument("--betti", metavar="FILE")
    p.add_argument("--override", action="store_true", help="skip the a0 congruence and n parity checks")


def _bounds(args) -> SearchBounds:
    r_range = None
    if args.r_min is not None or args.r_max is not None:
        if args.r_min is None or args.r_max is None:
            raise CliInputError("--r-min and --r-max go together")
        r_range = (args.r_min, args.r_max)
    return SearchBounds(K=args.K, r_range=r_range, grid_mesh=args.grid_mesh, depth=args.depth,
                        resonance=not args.no_resonance, workers=args.workers)


def _need(args, *names) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise CliInputError("missing " + ", ".join(missing))


def _target(args) -> TargetPattern:
    if args.ranks:
        rf = RankFunction.from_json(load(args.ranks, "ranks"))
        _need(args, "n")
        return TargetPattern(rf, args.n)
    if args.brieskorn:
        _need(args, "a0", "n")
        return TargetPattern.brieskorn(args.a0, args.n, args.override)
    if args.displaceable:
        _need(args, "betti")
        return TargetPattern.displaceable(BettiTable.from_json(load(args.betti, "betti")))
    _need(args, "betti", "c", "n")
    q = BettiTable.from_json(load(args.betti, "betti"))
    return TargetPattern.prequantization(q.values, args.c, args.n)


# --------------------------------------------------------------------------
# commands


def cmd_matrix(args):
    m = parse_matrix_json(load(args.input, "matrix"))
    if args.op == "spectrum":
        return {"spectrum": spectrum(m)}
    if args.op == "rho":
        return {"rho_angle": rho_angle(m)}
    if args.op == "class":
        return {"class": nondegeneracy_class(m)}
    return {"normal_form": normal_form_decomposition(m, args.k_check)}


def cmd_path_index(args):
    path = SymplecticPath.from_json(load(args.input, "path"))
    return {"cz_index": cz_index(path), "mean_index": mean_index_of_path(path)}


def cmd_iterate(args):
    profile = IterationProfile.from_json(load(args.profile, "profile"))
    seq = index_sequence(profile, args.k)
    return {"indices": list(seq.values), "good": list(seq.good_flags),
            "mean_index": str(mean_index_exact(profile)), "mu1": profile.mu1}


def cmd_ranks(args):
    rf = _target(args).ranks
    lo, hi = args.window
    return {"rank_function": rf, "window": {d: c for d, c in rf.window(lo, hi).items() if c}}


def cmd_chi_m(args):
    if args.system:
        system = OrbitSystem.from_json(load(args.system, "system"))
        return {"chi_m": chi_m_orbits(system)}
    return {"chi_m": chi_m_from_ranks(_target(args).ranks)}


def cmd_resonance(args):
    system = OrbitSystem.from_json(load(args.system, "system"))
    report = resonance_check(system, _target(args).ranks, args.N)
    return {"resonance": report, "N": args.N}


def cmd_feasibility(args):
    bounds = _bounds(args)
    return {"report": single_orbit_feasibility(_target(args), bounds)}


def cmd_theorem(args):
    bounds = _bounds(args)
    if args.which == "a":
        _need(args, "betti")
        betti = BettiTable.from_json(load(args.betti, "betti"))
        out = {"report": theorem_a_check(betti, bounds)}
        if betti.n == 2:
            out["corollary_a"] = corollary_a_bound(betti)
        return out
    if args.which == "b":
        _need(args, "betti", "c", "n")
        q = BettiTable.from_json(load(args.betti, "betti"))
        return {"report": theorem_b_check(q.values, args.c, args.n, bounds)}
    _need(args, "a0", "n")
    return {"report": theorem_c_check(args.a0, args.n, bounds)}


def fixture_suite() -> dict[str, dict]:
    """Golden inputs, keyed by file name."""
    ellipsoid = OrbitSystem((
        OrbitEntry("short", IterationProfile(2, (QuadIrrational(0, 1, 2, 2),), 2)),
        OrbitEntry("long", IterationProfile(4, (QuadIrrational(-1, 1, 2, 1),), 2)),
    ), 2)
    files = {
        "ball_n2.json": BettiTable.ball(2).to_json(),
        "ball_n3.json": BettiTable.ball(3).to_json(),
        "ball_n5.json": BettiTable.ball(5).to_json(),
        "filling_b3_n2.json": BettiTable.for_filling(2, {3: 1}).to_json(),
        "filling_b4_2_n3.json": BettiTable.for_filling(3, {4: 2}).to_json(),
        "appendix_b2_n3.json": BettiTable.for_filling(3, {2: 1}).to_json(),
        "sphere_s2.json": BettiTable(2, {0: 1, 2: 1}).to_json(),
        "ellipsoid_system.json": ellipsoid.to_json(),
        "brieskorn_a7_n3.json": {"a0": 7, "n": 3},
        "brieskorn_a9_n3.json": {"a0": 9, "n": 3},
        "brieskorn_a1_n3.json": {"a0": 1, "n": 3},
        "hyp2.json": IterationProfile(2, (), 2).to_json(),
        "rotation_quarter.json": rotation(0, 1).to_json(),
        "hyperbolic_2.json": hyperbolic(2).to_json(),
        "ranks_brieskorn_a7_n3.json": sh_ranks_brieskorn(7, 3).to_json(),
        "ranks_ball_n2.json": sh_ranks_displaceable(BettiTable.ball(2)).to_json(),
        "ranks_prequant_s2_c2.json": sh_ranks_prequantization({0: 1, 2: 1}, 2, 2).to_json(),
    }
    return files


FIXTURE_SCHEMAS = {
    "ball_n2.json": "betti", "ball_n3.json": "betti", "ball_n5.json": "betti",
    "filling_b3_n2.json": "betti", "filling_b4_2_n3.json": "betti", "appendix_b2_n3.json": "betti",
    "sphere_s2.json": "betti", "ellipsoid_system.json": "system",
    "brieskorn_a7_n3.json": "brieskorn", "brieskorn_a9_n3.json": "brieskorn", "brieskorn_a1_n3.json": "brieskorn",
    "hyp2.json": "profile", "rotation_quarter.json": "matrix", "hyperbolic_2.json": "matrix",
    "ranks_brieskorn_a7_n3.json": "ranks", "ranks_ball_n2.json": "ranks", "ranks_prequant_s2_c2.json": "ranks",
}


def emit_fixture_suite(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, data in sorted(fixture_suite().items()):
        validate(data, FIXTURE_SCHEMAS[name], name)
        path = directory / name
        path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
        written.append(path)
    return written


def cmd_fixtures(args):
    return {"written": [str(p) for p in emit_fixture_suite(args.dir)]}


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reebcount", description=__doc__)
    parser.add_argument("--version", action="version", version=f"reebcount {__version__}")
    parser.add_argument("--json-out", metavar="FILE", help="also write the report to FILE")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix", help="spectrum, rho, nondegeneracy class or normal form of a matrix")
    p.add_argument("op", choices=["spectrum", "rho", "class", "normal-form"])
    p.add_argument("input", metavar="FILE")
    p.add_argument("--k-check", type=int, default=64)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("path-index", help="index and mean index of a sampled path")
    p.add_argument("input", metavar="FILE")
    p.set_defaults(func=cmd_path_index)

    p = sub.add_parser("iterate", help="indices of the first k covers")
    p.add_argument("--profile", required=True, metavar="FILE")
    p.add_argument("--k", "--K", dest="k", type=int, default=10)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("ranks", help="rank function of a target")
    _target_args(p)
    p.add_argument("--window", nargs=2, type=int, default=(0, 40), metavar=("LO", "HI"))
    p.set_defaults(func=cmd_ranks)

    p = sub.add_parser("chi-m", help="mean Euler characteristic")
    p.add_argument("--system", metavar="FILE", help="orbit system JSON instead of a target")
    _target_args(p, required=False)
    p.set_defaults(func=cmd_chi_m)

    p = sub.add_parser("resonance", help="compare orbit and rank sides of the resonance identity")
    p.add_argument("--system", required=True, metavar="FILE")
    _target_args(p)
    p.add_argument("--N", type=int, default=10_000)
    p.set_defaults(func=cmd_resonance)

    p = sub.add_parser("feasibility", help="bounded single-orbit search")
    _target_args(p)
    _bounds_args(p)
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("theorem", help="replay a two-orbit theorem")
    p.add_argument("which", choices=["a", "b", "c"])
    p.add_argument("--a0", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=int)
    p.add_argument("--betti", metavar="FILE")
    _bounds_args(p)
    p.set_defaults(func=cmd_theorem)

    p = sub.add_parser("fixtures", help="write the golden fixture files")
    p.add_argument("--dir", default="fixtures")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "chi-m" and not args.system and not (args.brieskorn or args.displaceable
                                                                 or args.prequantization or args.ranks):
            raise CliInputError("chi-m needs --system or a target")
        result = args.func(args)
    except InputError as exc:
        print(json.dumps({"error": str(exc), "kind": "input"}, sort_keys=True), file=sys.stderr)
        return 2
    except (ReebCountError, ArithmeticError, OSError) as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}, sort_keys=True), file=sys.stderr)
        return 1
    payload = {"tool": "reebcount", "version": __version__, "command": args.command, "result": result}
    if hasattr(args, "K"):
        payload["bounds"] = _bounds(args).to_json()
    text = dumps(payload)
    sys.stdout.write(text)
    if args.json_out:
        try:
            Path(args.json_out).write_text(text)
        except OSError as exc:
            print(json.dumps({"error": str(exc), "kind": "io"}), file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
