"""Command-line interface: ``prismatica <command> ...``.

Every command prints (or writes with ``--output``) one JSON report carrying
``"schema": 1``.  Exit codes: 0 when the report has no violations, 1 when it
has some, 2 for usage and input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import PrismaticaError
from .fixtures import FIXTURE_NAMES, fixture_complex
from .simplicial import complex_from_json, verify_identities

SCHEMA = 1
EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    """Bad command-line input or malformed input file."""


def threads() -> int:
    """Parallelism cap from ``PRISMATICA_THREADS`` (default 1)."""
    raw = os.environ.get("PRISMATICA_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"PRISMATICA_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"PRISMATICA_THREADS must be a positive integer, got {raw!r}")
    return n


def load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def parse_deg(text: str):
    from .prismatic import MultiDegree

    try:
        nums = [int(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"--deg expects p,q0,...,qp, got {text!r}") from None
    if not nums or len(nums) != nums[0] + 2:
        raise InputError(f"--deg {text!r}: need p followed by p+1 fiber degrees")
    return MultiDegree(nums[0], tuple(nums[1:]))


def complex_doc(args) -> tuple[str, dict]:
    if getattr(args, "input", None):
        doc = load_json(args.input)
        if not isinstance(doc, dict) or "vertices" not in doc:
            raise InputError(f"{args.input}: expected an object with \"vertices\" and \"simplices\"")
        return args.input, doc
    if not getattr(args, "fixture", None):
        raise InputError("give --fixture NAME or --input FILE")
    try:
        return args.fixture, fixture_complex(args.fixture)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None


def build_space(args, D=None):
    name, doc = complex_doc(args)
    return name, complex_from_json(doc, D)


# -- commands -------------------------------------------------------------------------------------

def cmd_validate(args):
    from .homology import simplicial_chain_complex

    name, S = build_space(args, args.D)
    violations = verify_identities(S)
    bad = simplicial_chain_complex(S).check_d_squared()
    violations += [{"identity": "boundary squared", "degree": n} for n in bad]
    report = {"command": "validate", "input": name, "D": S.D,
              "generators": [len(S.generators(n)) for n in range(S.D + 1)],
              "violations": violations}
    return report, len(violations)


def cmd_prism_enumerate(args):
    from .prismatic import prism_cells

    deg = parse_deg(args.deg)
    need = sum(deg.q) + deg.p + (deg.p + 1 if args.construction == "Pbar" else 0)
    name, S = build_space(args, max(need, args.D or 0))
    space = S
    if args.construction == "Pf":
        space = _to_point(S)
    cells = prism_cells(space, args.construction, deg)
    report = {"command": "prism enumerate", "input": name, "construction": args.construction,
              "deg": str(deg), "count": len(cells), "cells": [c.to_json() for c in cells],
              "violations": []}
    return report, 0


def _to_point(S):
    """``S -> *``; its P(f) is P(S)."""
    from .prismatic import SimplicialMap
    from .simplicial import from_complex

    point = from_complex(["*"], [], S.D)
    return SimplicialMap.from_vertex_map(S, point, {v: 0 for v in range(len(S.generators(0)))})


def cmd_homology(args):
    from .homology import homology, prismatic_total_complex, simplicial_chain_complex

    name, S = build_space(args)
    N = args.max_degree
    if args.construction == "simplicial":
        C = simplicial_chain_complex(S.truncated(max(N, S.D)) if S.D < N else S)
    else:
        space = _to_point(S) if args.construction == "Pf" else S
        C = prismatic_total_complex(space, args.construction, N)
    bad = C.check_d_squared()
    rows = []
    if not bad:
        for entry in homology(C, check=False):
            if entry["degree"] > N:
                break
            g = entry["group"]
            rows.append({"degree": entry["degree"], "betti": g.betti, "torsion": list(g.torsion),
                         "group": str(g), "reliable": entry["reliable"]})
    violations = [{"kind": "boundary squared", "degree": n} for n in bad]
    # reliable Betti numbers, trailing zeros dropped
    betti = [r["betti"] for r in rows if r["reliable"]]
    while betti and betti[-1] == 0:
        betti.pop()
    report = {"command": "homology", "input": name, "construction": args.construction,
              "max_degree": N, "homology": rows, "betti": betti, "violations": violations}
    return report, len(violations)


def cmd_star(args):
    from .prismatic import prism_cells
    from .star import multidegrees, pbar, pbar_inverse, st_iso, star_cells, star_complex

    name, doc = complex_doc(args)
    S = complex_from_json(doc, max(2 * args.max_p + 1 + (args.max_p + 1) * args.max_q, args.D))
    st = star_complex(doc["vertices"], doc.get("simplices", []))
    iso = st_iso(doc["vertices"], doc.get("simplices", []), args.D)
    violations = [dict(f, dim=d["dim"]) for d in iso["dims"] for f in d["failures"]]
    tables = []
    for deg in multidegrees(args.max_p, args.max_q):
        image = {}
        for g in prism_cells(S, "Pbar", deg):
            image.setdefault(pbar(g), []).append(g)
        targets = star_cells(S, deg)
        preimages = []
        for cell in targets:
            found = image.get(cell, [])
            if len(found) == 1:
                pre = found[0]
                if pbar_inverse(cell, S) != pre:
                    violations.append({"kind": "round trip", "deg": str(deg), "cell": cell.to_json()})
                preimages.append(pre.payload.to_json())
            else:
                preimages.append(None)
                violations.append({"kind": "no preimage" if not found else "several preimages",
                                   "deg": str(deg), "cell": cell.to_json()})
        tables.append({"deg": str(deg), "cells": [c.to_json() for c in targets],
                       "preimages": preimages})
    report = {"command": "star", "input": name, "star_complex": st,
              "st_iso": iso, "pbar": tables, "violation_count": len(violations),
              "violations": violations[:200]}
    return report, len(violations)


def _gauge_inputs(args, D=None):
    from .gauge import GAUGE_FIXTURES, transition_set_from_json

    if os.path.exists(args.gauge):
        gdoc = load_json(args.gauge)
    elif args.gauge in GAUGE_FIXTURES:
        gdoc = GAUGE_FIXTURES[args.gauge]
    else:
        raise InputError(f"--gauge {args.gauge!r} is neither a file nor a shipped config "
                         f"({', '.join(GAUGE_FIXTURES)})")
    if not isinstance(gdoc, dict) or "group" not in gdoc:
        raise InputError(f"{args.gauge}: expected an object with \"group\" and \"values\"")
    if not args.fixture and not args.input:
        if "fixture" not in gdoc:
            raise InputError("give --fixture or --input (the gauge config names no complex)")
        args.fixture = gdoc["fixture"]
    name, S = build_space(args, D)
    T = transition_set_from_json(S, gdoc)
    return name, S, T


def cmd_gauge_check(args):
    from .gauge import check_cocycle, check_compatibility

    name, S, T = _gauge_inputs(args)
    comp = check_compatibility(T, args.samples, args.seed)
    coc = check_cocycle(T, args.samples, args.seed)
    report = {"command": "gauge check", "input": name, "gauge": Path(args.gauge).name,
              "group": T.group.spec(), "seed": args.seed, "compatibility": comp, "cocycle": coc,
              "violations": comp["violations"] + coc["violations"]}
    return report, comp["violation_count"] + coc["violation_count"]


def cmd_gauge_transport(args):
    from .gauge import check_transport

    name, S, T = _gauge_inputs(args)
    rep = check_transport(T, args.samples, args.seed)
    report = {"command": "gauge transport", "input": name, "gauge": Path(args.gauge).name,
              "group": T.group.spec(), "seed": args.seed, "transport": rep,
              "violations": rep["violations"]}
    return report, rep["violation_count"]


def cmd_classify(args):
    from .classifying import (
        check_m_compatibility,
        classify_cell,
        from_interior,
        interior_grid,
        random_interior,
    )
    from .gauge import SplitMix64
    from .prismatic import prism_cells

    deg = parse_deg(args.deg)
    name, S, T = _gauge_inputs(args, sum(deg.q) + 2 * deg.p + 1)
    G = T.group
    rng = SplitMix64(args.seed)
    points = [(t, [tuple(1.0 - k / (qi + 1) for k in range(1, qi + 1)) for qi in deg.q])
              for t in interior_grid(deg.p)]
    for _ in range(args.samples):
        points.append((random_interior(deg.p, rng), [random_interior(qi, rng) for qi in deg.q]))
    cells = prism_cells(S, "Pbar", deg)
    rows, violations = [], []
    for gamma in cells:
        evals = []
        for t, s in points:
            a = classify_cell(T, gamma, t, s)
            evals.append({"t": list(t), "t_bary": list(from_interior(t)),
                          "s": [list(v) for v in s], "a": [G.to_json(x) for x in a]})
        faces = []
        for i in range(deg.p + 1 if deg.p >= 1 else 0):
            rep = check_m_compatibility(T, gamma, i, samples=args.samples, seed=args.seed)
            faces.append(rep)
            if not rep["ok"]:
                violations.append({"cell": gamma.payload.to_json(), "face": i,
                                   "max_discrepancy": rep["max_discrepancy"],
                                   "independent_of_s_i": rep["independent_of_s_i"]})
        rows.append({"payload": gamma.payload.to_json(), "label": S.label(gamma.payload.gen),
                     "evaluations": evals, "compatibility": faces})
    report = {"command": "classify", "input": name, "gauge": Path(args.gauge).name,
              "group": G.spec(), "deg": str(deg), "seed": args.seed, "cells": rows,
              "violations": violations}
    return report, len(violations)


# the battery behind ``suite``: (report file, argv)
SUITE = (
    [(f"validate_{f}.json", ["validate", "--fixture", f]) for f in FIXTURE_NAMES]
    + [(f"homology_{c}_{f}.json", ["homology", "--fixture", f, "--construction", c,
                                    "--max-degree", "3"])
       for f in ("circle", "rp2_6", "mobius5") for c in ("simplicial", "P", "Pbar")]
    + [("prism_Pbar_triangle.json", ["prism", "enumerate", "--fixture", "triangle",
                                      "--construction", "Pbar", "--deg", "1,0,1"])]
    + [(f"star_{f}.json", ["star", "--fixture", f, "--max-p", "1", "--max-q", "1", "--D", "3"])
       for f in ("point", "interval", "circle")]
    + [(f"gauge_check_{g}.json", ["gauge", "check", "--gauge", g]) for g in
       ("z5", "z5_tetra", "s3_tetra", "so2_tetra")]
    + [(f"gauge_transport_{g}.json", ["gauge", "transport", "--gauge", g]) for g in
       ("z5", "z5_tetra", "s3_tetra", "so2_tetra")]
    + [(f"classify_{g}.json", ["classify", "--gauge", g, "--deg", "1,0,1", "--samples", "5"])
       for g in ("z5", "s3_tetra", "so2_tetra")]
)


def _suite_job(job):
    fname, argv = job
    parser = build_parser()
    args = parser.parse_args(argv)
    report, nviol = args.func(args)
    return fname, render(report), nviol


def cmd_suite(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n = threads()
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_suite_job, SUITE))
    else:
        results = [_suite_job(job) for job in SUITE]
    summary = []
    for fname, text, nviol in results:
        (out / fname).write_text(text)
        summary.append({"report": fname, "violations": nviol})
    failed = [row["report"] for row in summary if row["violations"]]
    report = {"command": "suite", "reports": summary, "violations": failed}
    # every report is written either way; the exit code says whether any failed
    return report, len(failed)


# -- plumbing -------------------------------------------------------------------------------------

def render(report: dict) -> str:
    body = {"schema": SCHEMA}
    body.update(report)
    body["ok"] = not report.get("violations") and not report.get("violation_count")
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def _add_input(p, fixture_help="shipped fixture name"):
    p.add_argument("--fixture", help=f"{fixture_help} ({', '.join(FIXTURE_NAMES)}, tetrahedron)")
    p.add_argument("--input", help="complex JSON file {\"vertices\": [...], \"simplices\": [[...]]}")


def _add_gauge(p):
    _add_input(p, "complex the config lives on; defaults to the config's own fixture")
    p.add_argument("--gauge", required=True, help="gauge config JSON file or shipped config name")
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prismatica", description=__doc__.splitlines()[0])
    parser.add_argument("--output", "-o", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="simplicial identities and boundary squared")
    _add_input(p)
    p.add_argument("--D", type=int, default=6, help="truncation dimension (default 6)")
    p.set_defaults(func=cmd_validate)

    prism = sub.add_parser("prism", help="prismatic constructions")
    psub = prism.add_subparsers(dest="prism_command", required=True)
    p = psub.add_parser("enumerate", help="list the cells of one multidegree")
    _add_input(p)
    p.add_argument("--construction", choices=("P", "Pbar", "Pf", "E"), default="P")
    p.add_argument("--deg", required=True, help="p,q0,...,qp")
    p.add_argument("--D", type=int, default=None)
    p.set_defaults(func=cmd_prism_enumerate)

    p = sub.add_parser("homology", help="integer homology")
    _add_input(p)
    p.add_argument("--construction", choices=("simplicial", "P", "Pbar", "Pf"), default="simplicial")
    p.add_argument("--max-degree", type=int, default=3)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("star", help="star complex, St isomorphism and pbar tables")
    _add_input(p)
    p.add_argument("--max-p", type=int, default=1)
    p.add_argument("--max-q", type=int, default=1)
    p.add_argument("--D", type=int, default=3, help="dimension bound for the St comparison")
    p.set_defaults(func=cmd_star)

    gauge = sub.add_parser("gauge", help="transition functions")
    gsub = gauge.add_subparsers(dest="gauge_command", required=True)
    p = gsub.add_parser("check", help="compatibility and cocycle conditions")
    _add_gauge(p)
    p.set_defaults(func=cmd_gauge_check)
    p = gsub.add_parser("transport", help="parallel transport boundary conditions")
    _add_gauge(p)
    p.set_defaults(func=cmd_gauge_transport)

    p = sub.add_parser("classify", help="evaluate the classifying map on Pbar cells")
    _add_gauge(p)
    p.add_argument("--deg", required=True, help="p,q0,...,qp")
    p.set_defaults(func=cmd_classify, samples=10)

    p = sub.add_parser("suite", help="run the standard battery and write one report per command")
    p.add_argument("--out", required=True, help="directory for the reports")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        threads()
        report, nviol = args.func(args)
    except InputError as exc:
        print(f"prismatica: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrismaticaError as exc:
        print(f"prismatica: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(report)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if nviol == 0 else EXIT_VIOLATIONS


if __name__ == "__main__":
    sys.exit(main())
