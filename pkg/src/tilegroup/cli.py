"""Command-line front end.

Exit codes: 0 success, 1 failed validation or check, 2 usage or input error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import metric
from .gpq import GWord, UnsupportedPairError, WordSyntaxError, c_equivalence_obstruction, order, order_spectrum, presentation
from .gpq.oracle import relator_residuals
from .orientation import NoTileOfTypeError, compare_systems, group_descriptor, supertile_orientations
from .render import write_svg
from .substitution import (
    DEFAULT_MAX_TILES,
    ResourceCapError,
    RuleFileError,
    RuleValidationError,
    SubstitutionSystem,
    bundled_rule_path,
    load_system,
    orientation_classes,
    supertile,
    validate_rule,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
RELATOR_TOL = 1e-9


class UsageError(Exception):
    pass


def _rule_path(arg: str) -> Path:
    """A file path, or the name of a bundled rule such as ``pinwheel``."""
    p = Path(arg)
    if p.exists():
        return p
    bundled = bundled_rule_path(arg)
    if bundled.exists():
        return bundled
    raise UsageError(f"no rule file {arg!r} (and no bundled rule of that name)")


def _load(arg: str, validate: bool = True) -> SubstitutionSystem:
    try:
        return load_system(_rule_path(arg), validate=validate)
    except RuleValidationError as exc:
        raise UsageError(f"{arg}: rule fails validation ({', '.join(exc.report.failed())}); run `validate` for details")
    except RuleFileError as exc:
        raise UsageError(f"{arg}: {exc}")


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True) if args.json else text)


# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    sys_ = _load(args.rule, validate=False)
    report = validate_rule(sys_)
    status = "all conditions pass" if report.ok else "FAILED: " + ", ".join(report.failed())
    _emit(args, {"rule": args.rule, **report.to_json()}, f"{report.text()}\n{args.rule}: {status}")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_gen(args) -> int:
    sys_ = _load(args.rule)
    patch = supertile(sys_, args.proto, args.level, max_tiles=args.max_tiles)
    write_svg(sys_, patch, args.out)
    counts = patch.counts()
    stats = {
        "rule": sys_.name,
        "proto": args.proto,
        "level": args.level,
        "tiles": len(patch),
        "per_type": {str(k): counts[k] for k in sorted(counts)},
        "distinct_orientations": len(orientation_classes(sys_, args.proto, args.level)),
        "svg": str(args.out),
    }
    print(json.dumps(stats, indent=2, sort_keys=True))
    return EXIT_OK


def _descriptor(sys_: SubstitutionSystem, args):
    oset = supertile_orientations(sys_, args.proto, args.level, args.type)
    return oset, group_descriptor(oset)


def cmd_orient(args) -> int:
    sys_ = _load(args.rule)
    try:
        oset, desc = _descriptor(sys_, args)
    except NoTileOfTypeError as exc:
        raise UsageError(str(exc))
    payload = {"rule": sys_.name, "proto": args.proto, "level": args.level, "descriptor": desc.to_json()}
    lines = [f"{sys_.name} level {args.level}, prototile {args.proto}:", desc.text()]
    if desc.coordinates:
        shown = desc.coordinates[: args.show]
        lines.append("decompositions (rotation = quarter^k * rho^m):")
        lines += [f"  {r} = ({d.k}, {d.m})" for r, d in shown]
        if len(desc.coordinates) > len(shown):
            lines.append(f"  ... {len(desc.coordinates) - len(shown)} more (use --json for all)")
    if args.compare:
        other = _load(args.compare)
        try:
            _, desc2 = _descriptor(other, args)
        except NoTileOfTypeError as exc:
            raise UsageError(f"{args.compare}: {exc}")
        cmp = compare_systems(sys_.name, desc, other.name, desc2)
        payload["compare"] = {"rule": other.name, "descriptor": desc2.to_json(), "report": cmp.to_json()}
        lines += ["", f"{other.name} level {args.level}, prototile {args.proto}:", desc2.text(), "", cmp.text()]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _pair(p: int, q: int):
    try:
        return presentation(p, q)
    except UnsupportedPairError as exc:
        raise UsageError(str(exc))


def cmd_gpq(args) -> int:
    if args.gpq_cmd == "order":
        pres = _pair(args.p, args.q)
        try:
            w = GWord.parse(args.word)
        except WordSyntaxError as exc:
            raise UsageError(str(exc))
        res = order(w, pres, frame=args.frame)
        n = getattr(res, "n", None)
        _emit(
            args,
            {"word": str(w), "p": args.p, "q": args.q, "frame": args.frame, "finite": n is not None, "order": n},
            f"order of {w} in G({args.p},{args.q}): {res}",
        )
        return EXIT_OK
    if args.gpq_cmd == "spectrum":
        _pair(args.p, args.q)
        spec = sorted(order_spectrum(args.p, args.q))
        _emit(args, {"p": args.p, "q": args.q, "spectrum": spec}, f"spectrum of G({args.p},{args.q}): {spec}")
        return EXIT_OK
    if args.gpq_cmd == "obstruction":
        _pair(args.p, args.q)
        _pair(args.p2, args.q2)
        ob = c_equivalence_obstruction((args.p, args.q), (args.p2, args.q2))
        _emit(args, ob.to_json(), ob.text() + (f"\nwitness orders: {sorted(ob.witnesses())}" if ob.found else ""))
        return EXIT_OK
    # check-relations
    pres = _pair(args.p, args.q)
    rows = relator_residuals(args.p, args.q)
    ok = all(r < RELATOR_TOL for _, r in rows)
    text = [pres.summary()] + [f"  {name}: |M - I| = {r:.3g}" for name, r in rows]
    text.append("all relators evaluate to the identity" if ok else "RELATOR CHECK FAILED")
    _emit(
        args,
        {**pres.to_json(), "residuals": {name: r for name, r in rows}, "tol": RELATOR_TOL, "ok": ok},
        "\n".join(text),
    )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_distance(args) -> int:
    sys_ = _load(args.rule)
    try:
        x = metric.parse_patchspec(sys_, args.left)
        y = metric.parse_patchspec(sys_, args.right)
    except metric.PatchSpecError as exc:
        raise UsageError(str(exc))
    try:
        rep = metric.tiling_distance(sys_, x, y, args.nmax, args.tol)
    except metric.CoverageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(args, rep.to_json(), rep.text())
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tilegroup", description="Substitution tilings, orientation groups and G(p,q).")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("validate", parents=[common], help="check a rule file")
    v.add_argument("rule")
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("gen", help="render a supertile to SVG and print JSON stats")
    g.add_argument("rule")
    g.add_argument("--proto", type=int, required=True)
    g.add_argument("--level", type=int, required=True)
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--max-tiles", type=int, default=DEFAULT_MAX_TILES)
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("orient", parents=[common], help="relative orientations of a supertile")
    o.add_argument("rule")
    o.add_argument("--proto", type=int, required=True)
    o.add_argument("--level", type=int, required=True)
    o.add_argument("--type", type=int, default=None, help="tile type to collect (default: the supertile's type)")
    o.add_argument("--compare", metavar="RULE2")
    o.add_argument("--show", type=int, default=12, help="decompositions to list in text output")
    o.set_defaults(func=cmd_orient)

    q = sub.add_parser("gpq", help="the groups G(p,q)")
    qs = q.add_subparsers(dest="gpq_cmd", required=True)
    qo = qs.add_parser("order", parents=[common])
    qo.add_argument("word")
    qo.add_argument("p", type=int)
    qo.add_argument("q", type=int)
    qo.add_argument("--frame", choices=("input", "presentation"), default="input")
    for name in ("spectrum", "check-relations"):
        x = qs.add_parser(name, parents=[common])
        x.add_argument("p", type=int)
        x.add_argument("q", type=int)
    qb = qs.add_parser("obstruction", parents=[common])
    for name in ("p", "q", "p2", "q2"):
        qb.add_argument(name, type=int)
    q.set_defaults(func=cmd_gpq)

    d = sub.add_parser("distance", parents=[common], help="finite-horizon tiling distance of two patches")
    d.add_argument("rule")
    d.add_argument("--left", required=True)
    d.add_argument("--right", required=True)
    d.add_argument("--nmax", type=int, required=True)
    d.add_argument("--tol", type=float, default=1e-9)
    d.set_defaults(func=cmd_distance)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
