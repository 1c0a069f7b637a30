"""Checking the four admissibility conditions on edge weights, and sampling the admissible cone."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError
from .graphs import MarkedGraph, Side, enumerate_condition_witnesses, require_valid

IDEAL_TOL = 1e-8
STRICT_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class AngleAssignment:
    graph: MarkedGraph
    values: tuple[float, ...]  # aligned with graph.edges

    def __post_init__(self):
        if len(self.values) != len(self.graph.edges):
            raise DomainError("one angle per edge is required")

    @classmethod
    def from_mapping(cls, graph: MarkedGraph, theta: Mapping[str, float]) -> "AngleAssignment":
        keys = [e.key for e in graph.edges]
        if len(set(keys)) != len(keys):
            raise DomainError("graph has repeated edge keys; angles cannot be addressed by key")
        if set(theta) != set(keys):
            missing = sorted(set(keys) - set(theta))
            extra = sorted(set(theta) - set(keys))
            raise DomainError(f"angle domain must equal the edge set (missing {missing}, extra {extra})")
        return cls(graph, tuple(float(theta[k]) for k in keys))

    def as_mapping(self) -> dict[str, float]:
        return {e.key: v for e, v in zip(self.graph.edges, self.values)}

    def scaled(self, t: float) -> "AngleAssignment":
        return AngleAssignment(self.graph, tuple(t * v for v in self.values))

    def to_json(self) -> dict:
        return {"graph": self.graph.to_json(), "theta": self.as_mapping()}

    @classmethod
    def from_json(cls, data: dict) -> "AngleAssignment":
        return cls.from_mapping(MarkedGraph.from_json(data["graph"]), data["theta"])


@dataclass
class AdmissibilityReport:
    satisfied: bool
    violations: list[tuple[str, tuple[str, ...], float]]
    vertex_sums: dict[int, float]
    predicted_signs: dict[int, str]
    flagged: list[tuple[str, tuple[str, ...], float]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "violations": [{"condition": c, "witness": list(w), "lhs": v} for c, w, v in self.violations],
            "vertexSums": {str(k): v for k, v in self.vertex_sums.items()},
            "predictedSigns": {str(k): s for k, s in self.predicted_signs.items()},
            "flagged": [{"condition": c, "witness": list(w), "lhs": v} for c, w, v in self.flagged],
        }


def check_gamma_admissible(
    theta: AngleAssignment, tol: float = IDEAL_TOL, edge_bound: int | None = None
) -> AdmissibilityReport:
    g = theta.graph
    require_valid(g)
    vals = theta.values
    keys = tuple(e.key for e in g.edges)
    violations: list[tuple[str, tuple[str, ...], float]] = []
    flagged: list[tuple[str, tuple[str, ...], float]] = []

    for e, v in zip(g.edges, vals):
        bad = v >= 0 if e.side is Side.EQUATOR else v <= 0
        if bad:
            violations.append(("i", (e.key,), v))

    w = enumerate_condition_witnesses(g, edge_bound)

    def total(ids):
        return float(sum(vals[i] for i in ids))

    sums: dict[int, float] = {}
    signs: dict[int, str] = {}
    for v, ids in enumerate(w.faces_of_dual):
        s = total(ids)
        sums[v] = s
        witness = tuple(keys[i] for i in ids)
        if s < -tol:
            violations.append(("ii", witness, s))
            signs[v] = "+"
        elif abs(s) <= tol:
            signs[v] = "0"
            if abs(s) > STRICT_FLOOR:
                flagged.append(("ii", witness, s))
        else:
            signs[v] = "+"

    for cond, items in (("iii", w.circuits_two_gamma), ("iv", [p for p, _ in w.paths_one_gamma])):
        for ids in items:
            s = total(ids)
            witness = tuple(keys[i] for i in ids)
            if s <= 0:
                violations.append((cond, witness, s))
            elif s <= STRICT_FLOOR:
                flagged.append((cond, witness, s))

    return AdmissibilityReport(not violations, violations, sums, signs, flagged)


def sample_admissible(
    graph: MarkedGraph, seed: int | None = None, edge_bound: int | None = None, max_doublings: int = 60
) -> AngleAssignment:
    """Random negative equator weights, positive chord weights doubled until admissible."""
    require_valid(graph)
    rng = np.random.default_rng(seed)
    base = []
    for e in graph.edges:
        mag = float(rng.uniform(0.5, 1.5))
        base.append(-mag if e.side is Side.EQUATOR else mag)
    for k in range(max_doublings):
        vals = tuple(v if v < 0 else v * 2.0**k for v in base)
        cand = AngleAssignment(graph, vals)
        if check_gamma_admissible(cand, edge_bound=edge_bound).satisfied:
            return cand
    raise DomainError("no admissible scaling found")


def sample_admissible_with_signs(
    graph: MarkedGraph,
    signs,
    seed: int | None = None,
    near=None,
    slack: float = 0.25,
    edge_bound: int | None = None,
) -> AngleAssignment:
    """Admissible weights whose vertex sums vanish exactly at the vertices marked '0'.

    With `near`, the L1-closest such weights with every strict condition holding by
    `slack` times the mean |near|; otherwise a random point with a unit margin.
    """
    from scipy.optimize import linprog

    require_valid(graph)
    signs = list(signs)
    if len(signs) != graph.n or set(signs) - {"0", "+"}:
        raise DomainError("need one sign in {'0', '+'} per vertex")
    rng = np.random.default_rng(seed)
    m = len(graph.edges)
    w = enumerate_condition_witnesses(graph, edge_bound)
    if near is None:
        near = [rng.uniform(-1.5, -0.5) if e.side is Side.EQUATOR else rng.uniform(0.5, 1.5) for e in graph.edges]
        margin = 1.0
    else:
        near = [float(x) for x in near]
        margin = slack * float(np.mean(np.abs(near)))

    def row(ids, sign=1.0):
        r = np.zeros(2 * m)
        r[list(ids)] = sign
        return r

    # strict conditions: row . theta >= margin; ideal vertices: row . theta = 0
    strict, equal = [], []
    for i, e in enumerate(graph.edges):
        strict.append(row([i], -1.0 if e.side is Side.EQUATOR else 1.0))
    for v, ids in enumerate(w.faces_of_dual):
        (equal if signs[v] == "0" else strict).append(row(ids))
    strict += [row(ids) for ids in w.circuits_two_gamma]
    strict += [row(ids) for ids, _ in w.paths_one_gamma]
    # deviations u >= |theta - near|
    dev = []
    for i in range(m):
        for sgn in (1.0, -1.0):
            r = np.zeros(2 * m)
            r[i], r[m + i] = sgn, -1.0
            dev.append((r, sgn * near[i]))
    a_ub = np.vstack([-np.array(strict)] + [r for r, _ in dev])
    b_ub = np.concatenate([np.full(len(strict), -margin), [b for _, b in dev]])
    res = linprog(
        np.concatenate([np.zeros(m), np.ones(m)]),
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=np.array(equal) if equal else None,
        b_eq=np.zeros(len(equal)) if equal else None,
        bounds=[(None, None)] * m + [(0, None)] * m,
        method="highs",
    )
    if res.status != 0:
        raise DomainError("no admissible weights with these vertex signs")
    return AngleAssignment(graph, tuple(float(x) for x in res.x[:m]))
