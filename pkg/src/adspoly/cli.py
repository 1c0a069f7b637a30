"""Command-line entry point: JSON in, JSON out.

Exit codes: 0 success, 2 domain violation (with a report), 3 refusal on size
bounds, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any

import numpy as np

from .admissibility import AngleAssignment, check_gamma_admissible, sample_admissible, sample_admissible_with_signs
from .duality import dual_polyhedron, truncate
from .errors import AdsPolyError, DomainError, NumericalError, RefusalError, TooLarge
from .graphs import MarkedGraph, flip_graph, validate_marked_graph
from .polyhedron import (
    HyperidealPolyhedron,
    angle_map,
    induced_metric_complex,
    polyhedron_from_json,
    puncture_holonomy,
    vertex_angle_sum,
)
from .realization import SolveOptions, realize_with_log
from .rigidity import rigidity_report

DEFAULT_POLY_MAX_N = 12

EXIT_OK, EXIT_DOMAIN, EXIT_REFUSED, EXIT_NUMERICAL = 0, 2, 3, 4


# --- output ---------------------------------------------------------------------------


def _plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into JSON-native containers."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _encode(obj: Any) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format(obj, ".17g")
        # keep a float marker so that parsing returns a float again
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in obj.items()) + "}"
    return "[" + ", ".join(_encode(v) for v in obj) + "]"


def dumps(obj: Any) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(_plain(obj))


# --- input ----------------------------------------------------------------------------


def _load(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise DomainError(f"{path}: {exc.strerror}") from exc


def _max_n(default: int) -> int:
    raw = os.environ.get("ADSPOLY_MAX_N")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise DomainError(f"ADSPOLY_MAX_N must be an integer, got {raw!r}") from exc


def _check_size(n: int) -> None:
    limit = _max_n(DEFAULT_POLY_MAX_N)
    if n > limit:
        raise TooLarge(f"n = {n} exceeds the size cap {limit} (set ADSPOLY_MAX_N to raise it)")


def _graph(path: str) -> MarkedGraph:
    data = _load(path)
    g = MarkedGraph.from_json(data.get("graph", data) if isinstance(data, dict) else data)
    _check_size(g.n)
    return g


def _angles(path: str) -> AngleAssignment:
    data = _load(path)
    if not isinstance(data, dict) or "graph" not in data or "theta" not in data:
        raise DomainError("angle JSON needs 'graph' and 'theta'")
    theta = AngleAssignment.from_json(data)
    _check_size(theta.graph.n)
    return theta


def _polyhedron(path: str) -> HyperidealPolyhedron:
    data = _load(path)
    if not isinstance(data, dict):
        raise DomainError("polyhedron JSON must be an object")
    verts = data.get("vertices")
    if isinstance(verts, list):
        _check_size(len(verts))
    return polyhedron_from_json(data)


# --- OBJ ------------------------------------------------------------------------------


def obj_text(P: HyperidealPolyhedron, rings: int = 12, segments: int = 48) -> str:
    """Hull faces plus a band of the quadric x1^2 + x2^2 - x3^2 = 1 covering the vertex heights."""
    verts = P.chart_vertices()
    lines = ["o polyhedron"]
    lines += [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in verts]
    lines += ["f " + " ".join(str(i + 1) for i in face) for face in P.faces]
    top = 1.2 * max(float(np.abs(verts[:, 2]).max()), 0.1)
    base = len(verts) + 1
    lines.append("o quadric")
    for i in range(rings + 1):
        h = -top + 2 * top * i / rings
        r = math.sqrt(1 + h * h)
        for j in range(segments):
            a = 2 * math.pi * j / segments
            lines.append(f"v {r * math.cos(a):.17g} {r * math.sin(a):.17g} {h:.17g}")
    for i in range(rings):
        for j in range(segments):
            a = base + i * segments + j
            b = base + i * segments + (j + 1) % segments
            lines.append(f"f {a} {b} {b + segments} {a + segments}")
    return "\n".join(lines) + "\n"


def _write_obj(P: HyperidealPolyhedron, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(obj_text(P))


# --- commands -------------------------------------------------------------------------


def _polyhedron_json(P: HyperidealPolyhedron) -> dict:
    out = P.to_json()
    out["vertexAngleSums"] = [vertex_angle_sum(P, v) for v in range(P.n)]
    return out


def cmd_validate_graph(args):
    rep = validate_marked_graph(_graph(args.graph))
    body = {"valid": rep.valid, "failures": [{"check": c, "reason": r, "witness": w} for c, r, w in rep.failures]}
    return (EXIT_OK if rep.valid else EXIT_DOMAIN), body


def cmd_check_angles(args):
    rep = check_gamma_admissible(_angles(args.angles), tol=args.tol)
    return (EXIT_OK if rep.satisfied else EXIT_DOMAIN), rep.to_json()


def cmd_sample_angles(args):
    g = _graph(args.graph)
    if args.signs:
        theta = sample_admissible_with_signs(g, list(args.signs), seed=args.seed)
    else:
        theta = sample_admissible(g, seed=args.seed)
    return EXIT_OK, theta.to_json()


def cmd_build(args):
    P = _polyhedron(args.polyhedron)
    _write_obj(P, args.obj)
    return EXIT_OK, _polyhedron_json(P)


def cmd_angles(args):
    P = _polyhedron(args.polyhedron)
    body = angle_map(P).to_json()
    body["vertexAngleSums"] = [vertex_angle_sum(P, v) for v in range(P.n)]
    return EXIT_OK, body


def cmd_dual(args):
    return EXIT_OK, dual_polyhedron(_polyhedron(args.polyhedron)).to_json()


def cmd_truncate(args):
    T = truncate(_polyhedron(args.polyhedron))
    return EXIT_OK, {
        "vertexLifts": T.lifts,
        "labels": [list(lb) for lb in T.labels],
        "faces": [list(f) for f in T.faces],
        "faceCovectors": T.covectors,
        "truncationFaces": {str(v): f for v, f in sorted(T.truncation_faces.items())},
        "newEdgeAngles": [{"vertex": v, "face": f, "angle": a} for (v, f), a in sorted(T.new_edge_angles().items())],
    }


def cmd_metric(args):
    return EXIT_OK, induced_metric_complex(_polyhedron(args.polyhedron)).to_json()


def cmd_holonomy(args):
    P = _polyhedron(args.polyhedron)
    verts = range(P.n) if args.vertex is None else [args.vertex]
    out = []
    for v in verts:
        if not 0 <= v < P.n:
            raise DomainError(f"vertex {v} out of range")
        m = puncture_holonomy(P, v)
        out.append({"vertex": v, "sign": P.vertex_signs[v], "matrix": m, "trace": float(np.trace(m))})
    return EXIT_OK, {"holonomy": out}


def cmd_rigidity(args):
    return EXIT_OK, rigidity_report(_polyhedron(args.polyhedron)).to_json()


def cmd_realize(args):
    theta = _angles(args.angles)
    opts = SolveOptions(residual_tol=args.tol, seed=args.seed)
    P, log = realize_with_log(theta, opts)
    body = _polyhedron_json(P)
    body["residual"] = float(np.abs(np.array(angle_map(P).values) - theta.values).max())
    body["log"] = log.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps(P.to_json()) + "\n")
    _write_obj(P, args.obj)
    return EXIT_OK, body


def cmd_flip_graph(args):
    nodes, links = flip_graph(args.n, max_n=_max_n(9))
    seen = {0} if nodes else set()
    stack = list(seen)
    adj: dict[int, list[int]] = {}
    for a, b in links:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    while stack:
        for nxt in adj.get(stack.pop(), []):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return EXIT_OK, {"count": len(nodes), "connected": bool(nodes) and len(seen) == len(nodes)}


def cmd_export_obj(args):
    P = _polyhedron(args.polyhedron)
    text = obj_text(P)
    with open(args.obj, "w", encoding="utf-8") as fh:
        fh.write(text)
    return EXIT_OK, {"written": args.obj, "vertices": P.n, "faces": len(P.faces)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adspoly", description="Hyperideal polyhedra in anti-de Sitter space.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    add("validate-graph", cmd_validate_graph, "check a marked graph").add_argument("graph")
    p = add("check-angles", cmd_check_angles, "check the admissibility conditions")
    p.add_argument("angles")
    p.add_argument("--tol", type=float, default=1e-8)
    p = add("sample-angles", cmd_sample_angles, "draw admissible angles on a graph")
    p.add_argument("graph")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--signs", help="vertex signs as a string such as 0+0+, to pin the ideal vertices")
    for name, func, text in (
        ("build", cmd_build, "build a polyhedron from chart vertices"),
        ("angles", cmd_angles, "dihedral angles of a polyhedron"),
        ("dual", cmd_dual, "dual polyhedron"),
        ("truncate", cmd_truncate, "truncate the hyperideal vertices"),
        ("metric", cmd_metric, "induced metric complex"),
        ("rigidity", cmd_rigidity, "angle-Jacobian rigidity report"),
    ):
        p = add(name, func, text)
        p.add_argument("polyhedron")
        if name == "build":
            p.add_argument("--obj")
    p = add("holonomy", cmd_holonomy, "holonomy around the punctures")
    p.add_argument("polyhedron")
    p.add_argument("--vertex", type=int)
    p = add("realize", cmd_realize, "find the polyhedron with given angles")
    p.add_argument("--angles", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--obj")
    p = add("flip-graph", cmd_flip_graph, "count admissible triangulations and test flip connectivity")
    p.add_argument("--n", type=int, required=True)
    p = add("export-obj", cmd_export_obj, "write the hull and a quadric reference mesh")
    p.add_argument("polyhedron")
    p.add_argument("--obj", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, body = args.func(args)
    except RefusalError as exc:
        code, body = EXIT_REFUSED, {"error": type(exc).__name__, "message": str(exc)}
    except NumericalError as exc:
        code, body = EXIT_NUMERICAL, {"error": type(exc).__name__, "message": str(exc)}
    except (DomainError, AdsPolyError) as exc:
        code, body = EXIT_DOMAIN, {"error": type(exc).__name__, "message": str(exc)}
    sys.stdout.write(dumps(body) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
