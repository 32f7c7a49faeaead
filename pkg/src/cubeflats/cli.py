"""Command-line front end.

Subcommands: dual, hull, helly, pack, classify, dichotomy, obstruct,
fixtures.  Inputs are JSON (cube complexes, wallspaces, periodic wallspaces,
direct intersection data) or the tubular presentation text format.  Reports
are deterministic JSON; DOT and figure files are written on request, and the
fixtures runner emits a tab-delimited summary.

Exit codes: 0 ok, 1 I/O error, 2 validation failure, 3 negative verdict
under --fail-on-negative.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .complexes import CubeComplex, InvalidComplexError, NoCommonPoint, isomorphic
from .lattices import (NonPrimitiveVectorError, PresentationSyntaxError, hnf,
                       obstruction, parse_presentation, tubular_obstruction)
from .periodic import (PeriodicWallspace, SemiCrossingPresent, ValidationError,
                       alignment_classes, classify_pair, dichotomy,
                       disjointness_index, pushoff, window_hull)
from .reports import (Report, dichotomy_result, digest_bytes, error_payload,
                      pushoff_result)
from .wallspaces import Wallspace, WallspaceError, dual_with_orientations

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NEGATIVE = 3

MODELING_ASSUMPTIONS = [
    "crossing depends only on the translate difference (lattice equivariance)",
    "infinite statements are checked at finite window radius and must be "
    "stable when the radius doubles",
]


def fixtures_dir() -> Path:
    return Path(resources.files("cubeflats") / "fixtures")


def fixture_path(name: str) -> Path:
    return fixtures_dir() / name


def _read_bytes(path: str) -> bytes:
    return Path(path).read_bytes()


def _load_json(raw: bytes):
    return json.loads(raw.decode("utf-8"))


def _parse_vertex_set(text: str):
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise ValueError(f"bad vertex set {text!r}; expected comma-separated ids")


def _load_complex(raw: bytes, args) -> CubeComplex:
    c = CubeComplex.from_json_dict(_load_json(raw))
    if args.strict:
        c.validate(median_limit=args.validate_limit)
    return c


def _emit(report: Report, args) -> None:
    text = report.to_json()
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_dual(args) -> int:
    raw = _read_bytes(args.input)
    space = Wallspace.from_json_dict(_load_json(raw))
    complex_, orientations = dual_with_orientations(space)
    if args.strict:
        complex_.validate(median_limit=args.validate_limit)
    result = {
        "n_points": space.n_points,
        "n_walls": space.n_walls,
        "vertex_count": complex_.n_vertices,
        "hyperplane_count": complex_.n_hyperplanes,
        "complex": complex_.to_json_dict(),
    }
    if args.dot:
        Path(args.dot).write_text(complex_.to_dot())
    if args.figure:
        from .figures import save_complex_figure
        save_complex_figure(complex_, args.figure, title="dual cube complex")
    _emit(Report("dual", digest_bytes(raw), _option_echo(args), result), args)
    return EXIT_OK


def _cmd_hull(args) -> int:
    raw = _read_bytes(args.input)
    c = _load_complex(raw, args)
    vertices = _parse_vertex_set(args.set[0])
    hull = c.hull(vertices)
    result = {
        "input_set": sorted(set(vertices)),
        "hull": sorted(hull),
        "input_was_convex": sorted(set(vertices)) == sorted(hull),
    }
    _emit(Report("hull", digest_bytes(raw), _option_echo(args), result), args)
    return EXIT_OK


def _cmd_helly(args) -> int:
    raw = _read_bytes(args.input)
    c = _load_complex(raw, args)
    family = [_parse_vertex_set(s) for s in args.set]
    outcome = c.helly_point(family)
    if isinstance(outcome, NoCommonPoint):
        result = {"no_common_point": [outcome.first, outcome.second]}
    else:
        result = {"common_vertex": outcome}
    _emit(Report("helly", digest_bytes(raw), _option_echo(args), result), args)
    return EXIT_OK


def _cmd_pack(args) -> int:
    raw = _read_bytes(args.input)
    c = _load_complex(raw, args)
    translates = [_parse_vertex_set(s) for s in args.set]
    number = c.packing_number(translates, args.radius)
    result = {"packing_number": number, "radius": args.radius,
              "translates": len(translates)}
    _emit(Report("pack", digest_bytes(raw), _option_echo(args), result), args)
    return EXIT_OK


def _cmd_classify(args) -> int:
    raw = _read_bytes(args.input)
    pw = PeriodicWallspace.from_json_dict(_load_json(raw))
    from .periodic import validate

    validate(pw)
    refs = list(pw.orbit_refs())
    pairs = []
    semi = False
    for i, a in enumerate(refs):
        for b in refs[i + 1:]:
            cls = classify_pair(pw, a, b)
            entry = {"a": list(a), "b": list(b), "kind": cls.kind}
            if cls.kind == "semi-crossing":
                semi = True
                entry["direction"] = cls.direction
                entry["threshold"] = cls.threshold
            pairs.append(entry)
    result = {
        "valid": True,
        "orbit_count": len(refs),
        "pairs": pairs,
        "semi_crossing_present": semi,
        "disjointness_indices": [
            {"orbit": list(r), "index": disjointness_index(pw, *r)} for r in refs],
    }
    if not semi:
        result["alignment_classes"] = [[list(r) for r in c]
                                       for c in alignment_classes(pw)]
    else:
        result["alignment_classes"] = None
    _emit(Report("classify", digest_bytes(raw), _option_echo(args), result,
                 assumed_hypotheses=list(MODELING_ASSUMPTIONS)), args)
    return EXIT_OK


def _cmd_dichotomy(args) -> int:
    raw = _read_bytes(args.input)
    pw = PeriodicWallspace.from_json_dict(_load_json(raw))
    report = dichotomy(pw, args.rank, args.window)
    result = dichotomy_result(report)
    if args.dot or args.figure:
        hull = window_hull(pw, args.window)
        if args.dot:
            Path(args.dot).write_text(hull.complex.to_dot())
        if args.figure:
            from .figures import save_window_hull_figure
            save_window_hull_figure(hull, args.figure,
                                    title=f"window hull, N={args.window}")
    _emit(Report("dichotomy", digest_bytes(raw), _option_echo(args), result,
                 assumed_hypotheses=list(MODELING_ASSUMPTIONS)), args)
    if args.fail_on_negative and report.kind == "non-cocompact":
        return EXIT_NEGATIVE
    return EXIT_OK


def _cmd_obstruct(args) -> int:
    raw = _read_bytes(args.input)
    if args.input.endswith(".txt"):
        pres = parse_presentation(raw.decode("utf-8"))
        report = tubular_obstruction(pres)
    else:
        data = _load_json(raw)
        try:
            p, k = int(data["p"]), int(data["k"])
            lattices_in = data["lattices"]
        except (KeyError, TypeError):
            raise ValueError(
                'obstruction JSON needs "p", "k" and "lattices"') from None
        lats = [hnf(p, vectors) for vectors in lattices_in]
        report = obstruction(lats, p, k)
    result = report.to_json_dict()
    if args.figure:
        from .figures import save_obstruction_figure
        save_obstruction_figure(report, args.figure)
    _emit(Report("obstruct", digest_bytes(raw), _option_echo(args), result,
                 assumed_hypotheses=list(report.assumed_hypotheses)), args)
    if args.fail_on_negative and report.fired:
        return EXIT_NEGATIVE
    return EXIT_OK


# ---------------------------------------------------------------------------
# shipped fixtures


def _run_fixtures(args) -> int:
    rows = []
    figure_dir = Path(args.figure_dir) if args.figure_dir else None
    if figure_dir:
        figure_dir.mkdir(parents=True, exist_ok=True)

    def record(name, command, expected, actual):
        rows.append((name, command, expected, actual,
                     "ok" if expected == actual else "MISMATCH"))

    name = "square_grid.json"
    pw = PeriodicWallspace.from_json_dict(_load_json(_read_bytes(fixture_path(name))))
    rep = dichotomy(pw, rank=2, radius=4)
    widths = tuple(f.quasiline_width for f in rep.verdict.factors) \
        if rep.kind == "product-of-quasilines" else None
    record(name, "dichotomy --rank 2",
           "product-of-quasilines: 2 factors, widths (0, 0)",
           f"{rep.kind}: {len(rep.factor_vertex_counts)} factors, widths {widths}")
    record(name, "dichotomy --rank 2 (hull = product)",
           "hull count equals factor product",
           "hull count equals factor product"
           if rep.hull_vertex_count ==
           rep.factor_vertex_counts[0] * rep.factor_vertex_counts[1]
           else f"hull {rep.hull_vertex_count} != product")
    if figure_dir:
        from .figures import save_window_hull_figure
        save_window_hull_figure(window_hull(pw, 4), figure_dir / "square_grid.png")

    name = "glide_plane.json"
    pw = PeriodicWallspace.from_json_dict(_load_json(_read_bytes(fixture_path(name))))
    rep = dichotomy(pw, rank=1, radius=4)
    witness = rep.verdict.witness.kind if rep.kind == "non-cocompact" else None
    record(name, "dichotomy --rank 1",
           "non-cocompact: excess-classes (2 classes), hull 81",
           f"{rep.kind}: {witness} "
           f"({getattr(rep.verdict.witness, 'alignment_class_count', '?')} classes), "
           f"hull {rep.hull_vertex_count}")
    if figure_dir:
        from .figures import save_window_hull_figure
        save_window_hull_figure(window_hull(pw, 4), figure_dir / "glide_plane.png")

    name = "halfplane.json"
    pw = PeriodicWallspace.from_json_dict(_load_json(_read_bytes(fixture_path(name))))
    rep = dichotomy(pw, rank=1, radius=6)
    if rep.kind == "non-cocompact" and rep.verdict.witness.kind == "semi-crossing":
        w = rep.verdict.witness
        actual = (f"non-cocompact: semi-crossing, Q={list(w.maximal_class)}, "
                  f"pushoff displacement {w.min_displacement}")
    else:
        actual = rep.kind
    record(name, "dichotomy --rank 1",
           "non-cocompact: semi-crossing, Q=[(0, 0)], pushoff displacement 1",
           actual)
    if figure_dir:
        from .figures import save_window_hull_figure
        save_window_hull_figure(window_hull(pw, 6), figure_dir / "halfplane.png")

    name = "three_directions.json"
    data = _load_json(_read_bytes(fixture_path(name)))
    rep = obstruction([hnf(data["p"], v) for v in data["lattices"]],
                      data["p"], data["k"])
    record(name, "obstruct",
           "fired with 3 classes, threshold 3",
           f"{'fired' if rep.fired else 'not fired'} with "
           f"{len(rep.classes)} classes, threshold {rep.threshold}")
    if figure_dir:
        from .figures import save_obstruction_figure
        save_obstruction_figure(rep, figure_dir / "three_directions.png")

    name = "generic_hnn_rank3.txt"
    rep = tubular_obstruction(
        parse_presentation(_read_bytes(fixture_path(name)).decode("utf-8")))
    record(name, "obstruct",
           "fired with 4 classes, threshold 4",
           f"{'fired' if rep.fired else 'not fired'} with "
           f"{len(rep.classes)} classes, threshold {rep.threshold}")
    if figure_dir:
        from .figures import save_obstruction_figure
        save_obstruction_figure(rep, figure_dir / "generic_hnn_rank3.png")

    name = "two_crossing_walls.json"
    space = Wallspace.from_json_dict(_load_json(_read_bytes(fixture_path(name))))
    complex_, _ = dual_with_orientations(space)
    ok = complex_.n_vertices == 4 and isomorphic(complex_, CubeComplex.grid(2, 2))
    record(name, "dual", "square (4-cycle)",
           "square (4-cycle)" if ok
           else f"{complex_.n_vertices} vertices, {len(complex_.edges)} edges")
    if figure_dir:
        from .figures import save_complex_figure
        save_complex_figure(complex_, figure_dir / "two_crossing_walls.png")

    lines = ["fixture\tcommand\texpected\tactual\tstatus"]
    lines += ["\t".join(row) for row in rows]
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r[4] == "ok" for r in rows) else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def _option_echo(args) -> dict:
    skip = {"func", "input", "output"}
    return {k: v for k, v in sorted(vars(args).items())
            if k not in skip and not k.startswith("_") and v is not None
            and not callable(v)}


def _add_common(p, with_input=True):
    if with_input:
        p.add_argument("input", help="input file")
    p.add_argument("-o", "--output", help="write the JSON report here "
                                          "(default: stdout)")
    strict = p.add_mutually_exclusive_group()
    strict.add_argument("--strict", dest="strict", action="store_true",
                        default=True, help="fully validate complexes (default)")
    strict.add_argument("--no-strict", dest="strict", action="store_false",
                        help="skip full median-graph validation")
    p.add_argument("--validate-limit", type=int, default=5000,
                   help="vertex bound for the cubic median-axiom check")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubeflats",
        description="Combinatorial analysis of CAT(0) cube complexes: "
                    "wallspace duals, hulls, Helly points, packing, orbit "
                    "classification over periodic flats, and integer-lattice "
                    "cubulation obstructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dual", help="dual cube complex of a wallspace")
    _add_common(p)
    p.add_argument("--dot", help="write a DOT export of the 1-skeleton")
    p.add_argument("--figure", help="render the complex to this image file")
    p.set_defaults(func=_cmd_dual)

    p = sub.add_parser("hull", help="convex hull of a vertex set")
    _add_common(p)
    p.add_argument("--set", action="append", required=True,
                   help="comma-separated vertex ids")
    p.set_defaults(func=_cmd_hull)

    p = sub.add_parser("helly", help="common vertex of convex sets")
    _add_common(p)
    p.add_argument("--set", action="append", required=True,
                   help="comma-separated vertex ids (repeat per member)")
    p.set_defaults(func=_cmd_helly)

    p = sub.add_parser("pack", help="packing multiplicity of thickened translates")
    _add_common(p)
    p.add_argument("--set", action="append", required=True,
                   help="comma-separated vertex ids (repeat per translate)")
    p.add_argument("-r", "--radius", type=int, default=0,
                   help="thickening radius (default 0)")
    p.set_defaults(func=_cmd_pack)

    p = sub.add_parser("classify",
                       help="validate periodic wall data and classify orbit pairs")
    _add_common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("dichotomy", help="hull dichotomy for periodic wall data")
    _add_common(p)
    p.add_argument("--rank", type=int, required=True,
                   help="rank of the acting lattice")
    p.add_argument("-N", "--window", type=int, default=6,
                   help="window radius (default 6)")
    p.add_argument("--fail-on-negative", action="store_true",
                   help="exit 3 on a non-cocompact verdict")
    p.add_argument("--dot", help="write a DOT export of the window hull")
    p.add_argument("--figure", help="render the window hull to this image file")
    p.set_defaults(func=_cmd_dichotomy)

    p = sub.add_parser("obstruct",
                       help="commensurability obstruction (JSON intersections "
                            "or .txt tubular presentation)")
    _add_common(p)
    p.add_argument("--fail-on-negative", action="store_true",
                   help="exit 3 when the obstruction fires")
    p.add_argument("--figure", help="render the report to this image file")
    p.set_defaults(func=_cmd_obstruct)

    p = sub.add_parser("fixtures", help="run the shipped fixtures")
    _add_common(p, with_input=False)
    p.add_argument("--figure-dir", help="render one figure per fixture here")
    p.add_argument("--dir", action="store_true",
                   help="print the fixtures directory and exit")
    p.set_defaults(func=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fixtures":
            if args.dir:
                sys.stdout.write(str(fixtures_dir()) + "\n")
                return EXIT_OK
            return _run_fixtures(args)
        return args.func(args)
    except OSError as exc:
        sys.stderr.write(f"cubeflats: i/o error: {exc}\n")
        return EXIT_IO
    except ValueError as exc:
        payload = error_payload(type(exc).__name__, exc)
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        sys.stderr.write(f"cubeflats: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
