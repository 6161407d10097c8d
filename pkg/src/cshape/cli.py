"""Command-line frontend: ``cshape <subcommand> FILE [options]``.

Every subcommand prints a JSON report (sorted keys, two-space indent) with
the tool version, the SHA-256 of the input file and the budgets used.
Numbers are wrapped as ``{"exact": v}`` or ``{"bound": v}``; rationals are
written as ``"p/q"`` strings.

Exit codes: 0 success, 2 invalid input, 3 budget exhausted (the partial
report is still written).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from .errors import ConsistencyError, InvalidInput, InvalidState, ResourceError
from .specfile import SpecError, parse, serialize

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


class Bound:
    """Marks a value as an upper bound rather than an exact quantity."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class BudgetExhausted(Exception):
    """Raised by a section that finished with an inconclusive answer."""


def _scalar(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return round(v, 12)
    return v


def _is_num(v) -> bool:
    return isinstance(v, (int, Fraction, float)) and not isinstance(v, bool)


def _raw(v):
    if _is_num(v):
        return _scalar(v)
    if isinstance(v, (list, tuple)):
        return [_raw(x) for x in v]
    return v


def encode(obj):
    """Plain JSON with every number or numeric vector tagged exact|bound."""
    if isinstance(obj, Bound):
        return {"bound": _raw(obj.value)}
    if _is_num(obj):
        return {"exact": _scalar(obj)}
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        if obj and all(_is_num(x) for x in obj):
            return {"exact": [_scalar(x) for x in obj]}
        return [encode(x) for x in obj]
    return obj


def dumps(report: dict) -> str:
    return json.dumps(encode(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ------------------------------------------------------------------ input

def _read_input(name: str) -> tuple:
    """(text, source label). Bare names fall back to the packaged examples."""
    path = Path(name)
    if path.exists():
        return path.read_bytes(), str(path)
    stem = path.name if path.suffix == ".sub" else path.name + ".sub"
    packaged = resources.files("cshape").joinpath("data", stem)
    if packaged.is_file():
        return packaged.read_bytes(), f"cshape:{stem}"
    raise SpecError(0, 0, "no such file", name)


def _letters_rows(zeta, pattern) -> list:
    """Rows of a 2-D pattern as strings, top row first; '.' marks holes."""
    pts = pattern.as_dict()
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    width = max(len(a) for a in zeta.alphabet)
    rows = []
    for y in range(max(ys), min(ys) - 1, -1):
        rows.append(" ".join(pts.get((x, y), ".").rjust(width) for x in range(min(xs), max(xs) + 1)))
    return rows


def _pattern_json(pattern) -> dict:
    return {"support": [list(p) for p in pattern.support], "letters": list(pattern.letters)}


def _lattice_json(lat) -> dict:
    return {"basis": [list(r) for r in lat.basis], "index": lat.index()}


def _parse_vector(text: str) -> tuple:
    try:
        return tuple(Fraction(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"cannot read vector {text!r}") from None


def _parse_matrix(text: str, d: int) -> tuple:
    rows = [tuple(int(x) for x in r.split(",")) for r in text.split()]
    if len(rows) != d or any(len(r) != d for r in rows):
        raise InvalidInput(f"matrix {text!r} is not {d}x{d}")
    return tuple(rows)


def _parse_map(text: str) -> dict:
    out = {}
    for item in text.split(","):
        if ":" not in item:
            raise InvalidInput(f"letter map entries look like a:b, got {item!r}")
        a, b = item.split(":", 1)
        out[a.strip()] = b.strip()
    return out


# --------------------------------------------------------------- sections

def sec_validate(zeta, args) -> dict:
    from .substitution import is_bijective, is_bijective_on_extremities, is_primitive
    prim, power = is_primitive(zeta)
    return {"ok": True, "dim": zeta.d, "letters": zeta.size, "det": zeta.q,
            "alphabet": list(zeta.alphabet), "L": [list(r) for r in zeta.L],
            "primitive": prim, "primitive_power": power, "bijective": is_bijective(zeta),
            "bijective_on_extremities": is_bijective_on_extremities(zeta) if zeta.d <= 3 else None,
            "declared_aperiodic": zeta.declared_aperiodic}


def sec_iterate(zeta, args) -> dict:
    from .substitution import iterate
    n = args.n if args.n is not None else 1
    pats = iterate(zeta, n, args.cell_cap)
    letters = [args.letter] if args.letter else list(zeta.alphabet)
    out = {}
    for a in letters:
        if a not in pats:
            raise InvalidInput(f"unknown letter {a!r}")
        entry = {"cells": len(pats[a].support)}
        if zeta.d == 2:
            entry["rows"] = _letters_rows(zeta, pats[a])
        else:
            entry["pattern"] = _pattern_json(pats[a])
        out[a] = entry
    return {"level": n, "images": out}


def sec_kset(zeta, args) -> dict:
    from .substitution import k_set_oracle
    m = max(1, min(args.max_level, 4))
    oracle = k_set_oracle(zeta, m)
    return {"K": [list(k) for k in zeta.k_set], "K_bar": [list(k) for k in zeta.k_bar],
            "fill_cover": [list(k) for k in zeta.fill_cover], "size": len(zeta.k_set),
            "oracle_levels": m, "oracle_agrees": oracle == list(zeta.k_set)}


def _shape(zeta, spec: str | None):
    import itertools
    from .lattice import integer_ball
    if spec in (None, "K"):
        return list(zeta.k_set)
    kind, _, val = spec.partition(":")
    if kind == "ball":
        return integer_ball(int(val), zeta.d)
    if kind == "box":
        sides = [int(x) for x in val.split(",")]
        if len(sides) != zeta.d:
            raise InvalidInput(f"box needs {zeta.d} side lengths")
        return list(itertools.product(*(range(s) for s in sides)))
    raise InvalidInput(f"shape must be K, ball:R or box:a,b,..., got {spec!r}")


def sec_language(zeta, args) -> dict:
    from .patterns import language
    shape = _shape(zeta, args.shape)
    pats = language(zeta, shape, args.cell_cap)
    out = {"shape": args.shape or "K", "count": len(pats)}
    if zeta.d == 2:
        out["patterns"] = [_letters_rows(zeta, p) for p in pats]
    else:
        out["patterns"] = [_pattern_json(p) for p in pats]
    return out


def sec_tile(zeta, args) -> dict:
    from .geometry import tile_raster
    if zeta.d != 2:
        raise InvalidInput("tile images need d = 2")
    n = args.n if args.n is not None else 6
    approx, pgm, svg = tile_raster(zeta, n, args.width, args.height, args.margin, args.cell_cap)
    out = {"level": n, "points": len(approx.points), "distinct_points": len(set(approx.points)),
           "width": args.width, "height": args.height, "margin": args.margin}
    if args.output:
        path = Path(args.output)
        data = pgm if path.suffix.lower() == ".pgm" else svg.encode("utf-8")
        path.write_bytes(data)
        out["format"] = "pgm" if path.suffix.lower() == ".pgm" else "svg"
        out["image_sha256"] = hashlib.sha256(data).hexdigest()
    return out


def sec_polytope(zeta, args) -> dict:
    from .geometry import digit_tile_hull, facet_normal_eigencheck, polytope_test
    test = polytope_test(zeta, max(args.max_level, 2))
    out = {"counts": test.counts, "max_level": max(args.max_level, 2)}
    if not test.is_polytope:
        out["status"] = "unknown"
        raise BudgetExhausted(out)
    out["status"] = "polytope"
    out["level"] = test.level
    if zeta.d <= 3:
        hull = digit_tile_hull(zeta, test.level)
        out["hull_vertices"] = [list(v) for v in hull.vertices]
        out["facet_normals"] = [list(f.normal) for f in hull.facets]
        try:
            report, eig, integral = facet_normal_eigencheck(zeta, level=test.level)
            out["facet_eigen"] = [{"normal": list(r.normal), "power": r.power} for r in report]
            out["rational_eigenvalues"] = list(eig)
            out["integer_eigenvalues"] = integral
        except InvalidInput as exc:
            out["facet_eigen"] = {"skipped": str(exc)}
    return out


def _directions(zeta, args):
    from .directions import direction_report
    return direction_report(zeta, n_max=args.max_level, r_max=args.max_radius)


def sec_directions(zeta, args, rep=None) -> dict:
    rep = rep or _directions(zeta, args)
    cones = []
    for c in rep.cones:
        row = {"face": [list(p) for p in c.face], "generators": [list(g) for g in c.cone.generators],
               "dim": c.cone.dim, "status": c.status}
        if c.certificate is not None:
            cert = c.certificate
            row["certificate"] = {"W": [list(w) for w in cert.W], "k": list(cert.k), "n": cert.n,
                                  "f": list(cert.f), "witnesses": [_pattern_json(w) for w in cert.witnesses]}
        if c.radius is not None:
            row["coding_radius"] = c.radius
        cones.append(row)
    out = {"cones": cones, "counts": rep.counts(), "n_max": rep.n_max, "r_max": rep.r_max}
    if rep.counts()["unknown"]:
        raise BudgetExhausted(out)
    return out


def sec_height(zeta, args) -> dict:
    from .morphisms import height_lattice
    h = height_lattice(zeta, cap=args.cell_cap)
    out = {"lattice": _lattice_json(h.lattice), "observed": _lattice_json(h.observed),
           "window": h.window, "stable": h.stable}
    if not h.stable:
        raise BudgetExhausted(out)
    return out


def sec_eigen(zeta, args) -> dict:
    from .morphisms import eigenvalue_check, height_lattice
    if not args.vector:
        raise InvalidInput("give at least one --vector")
    h = height_lattice(zeta, cap=args.cell_cap).lattice
    return {"height": _lattice_json(h),
            "checks": [{"vector": list(_parse_vector(v)), "eigenvalue": eigenvalue_check(_parse_vector(v), zeta, h)}
                       for v in args.vector]}


def sec_reduce(zeta, args) -> dict:
    from .patterns import period_search
    from .substitution import is_reduced, reduce
    red = is_reduced(zeta)
    out = {"reduced": red.reduced, "eta": red.eta, "classes": red.classes}
    if not red.reduced:
        rz, _ = reduce(zeta)
        out["reduction"] = {"alphabet": list(rz.alphabet), "rules": {a: list(r) for a, r in rz.rules.items()},
                            "spec": serialize(rz).splitlines()}
        # periods seen on two nested patches: evidence, not proof
        out["observed_periods"] = [list(p) for p in period_search(rz, args.max_radius, args.cell_cap)]
    return out


def sec_aut(zeta, args) -> dict:
    from .morphisms import automorphisms, group_closed, radius_bound
    mode = getattr(args, "mode", "bijective")
    radius = getattr(args, "radius", None)
    out = {"mode": mode}
    try:
        rb = radius_bound(zeta)
        out["radius_bound"] = {"factor": Bound(rb.factor), "radius": Bound(rb.radius)}
    except InvalidInput as exc:
        out["radius_bound"] = {"skipped": str(exc)}
    group = automorphisms(zeta, mode, radius, node_cap=getattr(args, "node_cap", 200000))
    elems = []
    for bm in group.elements:
        if bm.radius == 0:
            elems.append({"letter_map": {k[0]: v for k, v in sorted(bm.table.items())}})
        else:
            elems.append({"radius": bm.radius, "entries": len(bm.table)})
    out.update({"order": group.order, "complete": group.complete, "elements": elems})
    if mode == "bijective":
        perms = [tuple(zeta.index[bm.table[(a,)]] for a in zeta.alphabet) for bm in group.elements]
        out["group_closed"] = group_closed(zeta, perms)
    if not group.complete:
        raise BudgetExhausted(out)
    return out


def sec_symmetry(zeta, args, rep=None) -> dict:
    from .morphisms import injective_mod3, symmetry_candidates
    rep = rep or _directions(zeta, args)
    normals = sorted({g for c in rep.nondeterministic_cones() for g in c.generators})
    cands = symmetry_candidates(zeta, normals, n_max=max(1, min(args.max_level, 3)))
    return {"normals": [list(v) for v in normals], "count": len(cands),
            "candidates": [{"M": [list(r) for r in c.M], "order": c.order, "norm_bound": Bound(c.norm_bound),
                            "normalizer": c.normalizer} for c in cands],
            "distinct_mod_3": injective_mod3(cands)}


def sec_verify(zeta, args) -> dict:
    from .morphisms import BlockMap, verify_homomorphism
    if not args.map:
        raise InvalidInput("give the letter map with --map a:b,b:a")
    mapping = _parse_map(args.map)
    if set(mapping) != set(zeta.alphabet):
        raise InvalidInput("the letter map must cover the alphabet")
    M = _parse_matrix(args.matrix, zeta.d) if args.matrix else None
    res = verify_homomorphism(zeta, M, BlockMap.letter_map(mapping, zeta.d), args.window)
    out = {"ok": res.ok, "window": res.window}
    if res.counterexample is not None:
        out["counterexample"] = _pattern_json(res.counterexample)
    return out


def sec_repetitivity(zeta, args) -> dict:
    from .patterns import repetitivity
    radii = list(range(1, max(1, min(args.max_radius, 3)) + 1))
    rep = repetitivity(zeta, radii, seed=args.seed, samples=16, cap=args.cell_cap)
    return {"radii": rep.radii, "values": [Bound(v) for v in rep.values],
            "exponent": Bound(rep.exponent), "seed": args.seed}


SECTIONS = {
    "validate": sec_validate, "iterate": sec_iterate, "kset": sec_kset, "language": sec_language,
    "tile": sec_tile, "polytope": sec_polytope, "directions": sec_directions, "height": sec_height,
    "eigen": sec_eigen, "reduce": sec_reduce, "aut": sec_aut, "symmetry": sec_symmetry,
    "verify": sec_verify,
}


def _run(fn, zeta, args, **kw):
    """(section, exhausted)."""
    try:
        return fn(zeta, args, **kw), False
    except BudgetExhausted as exc:
        return exc.args[0], True
    except ResourceError as exc:
        return {"budget_exhausted": str(exc)}, True


def run_report(zeta, args) -> tuple:
    """Full pipeline; sections whose hypotheses fail are marked skipped."""
    from .substitution import is_bijective, is_primitive
    out, exhausted = {}, False

    def add(name, fn, **kw):
        nonlocal exhausted
        try:
            sec, ex = _run(fn, zeta, args, **kw)
        except (InvalidInput, InvalidState) as exc:
            sec, ex = {"skipped": str(exc)}, False
        out[name] = sec
        exhausted |= ex
        return sec, ex

    add("validate", sec_validate)
    add("kset", sec_kset)
    prim = is_primitive(zeta)[0]
    if prim:
        add("height", sec_height)
        add("reduce", sec_reduce)
        add("repetitivity", sec_repetitivity)
    if zeta.d == 2:
        poly, ex = add("polytope", sec_polytope)
        if poly.get("status") == "polytope" and prim and zeta.size > 1:
            try:
                rep = _directions(zeta, args)
            except (InvalidInput, InvalidState) as exc:
                out["directions"] = {"skipped": str(exc)}
            else:
                add("directions", sec_directions, rep=rep)
                add("symmetry", sec_symmetry, rep=rep)
    if prim and is_bijective(zeta) and zeta.size > 1:
        add("aut", sec_aut)
    return out, exhausted


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="substitution file, or the name of a packaged example")
    common.add_argument("--max-level", type=int, default=5, help="iteration budget n_max")
    common.add_argument("--max-radius", type=int, default=4, help="radius budget r_max")
    common.add_argument("--cell-cap", type=int, default=10**7, help="maximum cells per patch")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled statistics")
    common.add_argument("-o", "--output", help="output path (the image for 'tile', else the JSON report)")

    parser = argparse.ArgumentParser(prog="cshape", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cshape {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "kset", "polytope", "directions", "height", "reduce", "symmetry", "report"):
        sub.add_parser(name, parents=[common])
    p = sub.add_parser("iterate", parents=[common])
    p.add_argument("-n", type=int, help="power of the substitution")
    p.add_argument("--letter")
    p = sub.add_parser("language", parents=[common])
    p.add_argument("--shape", help="K (default), ball:R or box:a,b")
    p = sub.add_parser("tile", parents=[common])
    p.add_argument("-n", type=int, help="approximation level")
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--margin", type=int, default=8)
    p = sub.add_parser("eigen", parents=[common])
    p.add_argument("--vector", action="append", help="rational vector such as 1/2,0 (repeatable)")
    p = sub.add_parser("aut", parents=[common])
    p.add_argument("--mode", choices=("bijective", "general"), default="bijective")
    p.add_argument("--radius", type=int, help="block-map radius for the general search")
    p.add_argument("--node-cap", type=int, default=200000)
    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--map", help="letter map a:b,b:a")
    p.add_argument("--matrix", help="matrix rows such as 0,1 1,0")
    p.add_argument("--window", type=int, default=2)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw, source = _read_input(args.file)
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SpecError(0, 0, f"not UTF-8: {exc}", source) from None
        zeta = parse(text, source)
        report = {"tool": {"name": "cshape", "version": __version__},
                  "input": {"sha256": hashlib.sha256(raw).hexdigest()},
                  "budgets": {"max_level": args.max_level, "max_radius": args.max_radius,
                              "cell_cap": args.cell_cap, "seed": args.seed}}
        if args.command == "report":
            sections, exhausted = run_report(zeta, args)
            report.update(sections)
        else:
            sec, exhausted = _run(SECTIONS[args.command], zeta, args)
            report[args.command] = sec
    except (InvalidInput, InvalidState) as exc:
        print(f"cshape: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConsistencyError as exc:
        print(f"cshape: internal consistency check failed: {exc}", file=sys.stderr)
        return 1
    report["status"] = "partial" if exhausted else "ok"
    text = dumps(report)
    if args.output and args.command != "tile":
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_BUDGET if exhausted else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
