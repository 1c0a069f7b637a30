"""Marked graphs on the N-punctured sphere with a Hamiltonian equator.

Vertices 0..n-1 are listed in equator order.  Every non-equatorial edge is a
chord of the n-gon drawn either in the top disk or in the bottom disk, so the
embedding is fixed by the two chord sets.  Faces are stored as vertex cycles:
top faces run in increasing cyclic order, bottom faces in decreasing order, so
each edge occurs once in each direction across the face list.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator

from .errors import EquatorEdge, InvalidGraph, NonFlippable, NotATriangulation, TooLarge

DEFAULT_MAX_N = 9
DEFAULT_WITNESS_EDGE_BOUND = 30


class Side(Enum):
    EQUATOR = "equator"
    TOP = "top"
    BOTTOM = "bottom"


@dataclass(frozen=True, order=True)
class Edge:
    u: int
    v: int
    side: Side = field(compare=False)

    def __post_init__(self):
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    @property
    def key(self) -> str:
        return f"{self.u}-{self.v}"

    @property
    def pair(self) -> tuple[int, int]:
        return (self.u, self.v)

    def other(self, w: int) -> int:
        return self.v if w == self.u else self.u


def edge_key(u: int, v: int) -> str:
    return f"{min(u, v)}-{max(u, v)}"


def _crosses(a: tuple[int, int], b: tuple[int, int]) -> bool:
    (p, q), (r, s) = sorted(a), sorted(b)
    if len({p, q, r, s}) < 4:
        return False
    return (p < r < q) != (p < s < q)


def _split_regions(n: int, chords: Iterable[tuple[int, int]]) -> list[list[int]]:
    regions = [list(range(n))]
    for a, b in sorted(tuple(sorted(c)) for c in chords):
        for k, reg in enumerate(regions):
            if a in reg and b in reg:
                i, j = sorted((reg.index(a), reg.index(b)))
                if j - i in (1, len(reg) - 1):
                    raise InvalidGraph(f"chord {a}-{b} duplicates a region side")
                regions[k : k + 1] = [reg[i : j + 1], reg[j:] + reg[: i + 1]]
                break
        else:
            raise InvalidGraph(f"chord {a}-{b} crosses another chord on its side")
    return regions


def _rotate_min(cycle: Iterable[int]) -> tuple[int, ...]:
    c = list(cycle)
    k = c.index(min(c))
    return tuple(c[k:] + c[:k])


@dataclass(frozen=True, eq=False)
class MarkedGraph:
    n: int
    edges: tuple[Edge, ...]

    @classmethod
    def from_diagonals(cls, n: int, top: Iterable = (), bottom: Iterable = ()) -> "MarkedGraph":
        edges = [Edge(i, (i + 1) % n, Side.EQUATOR) for i in range(n)]
        edges += [Edge(a, b, Side.TOP) for a, b in top]
        edges += [Edge(a, b, Side.BOTTOM) for a, b in bottom]
        return cls(n, tuple(sorted(edges, key=lambda e: (e.u, e.v, e.side.value))))

    def chords(self, side: Side) -> list[tuple[int, int]]:
        return [e.pair for e in self.edges if e.side is side]

    @property
    def top(self) -> list[tuple[int, int]]:
        return self.chords(Side.TOP)

    @property
    def bottom(self) -> list[tuple[int, int]]:
        return self.chords(Side.BOTTOM)

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        """Top faces (increasing order) followed by bottom faces (decreasing order)."""
        top = [tuple(r) for r in _split_regions(self.n, self.top)]
        bottom = [tuple(reversed(r)) for r in _split_regions(self.n, self.bottom)]
        return tuple(_rotate_min(f) for f in sorted(top)) + tuple(_rotate_min(f) for f in sorted(bottom, key=sorted))

    @property
    def face_sides(self) -> tuple[Side, ...]:
        k = len(_split_regions(self.n, self.top))
        return tuple(Side.TOP if i < k else Side.BOTTOM for i in range(len(self.faces)))

    def edge_index(self) -> dict[tuple[int, int, Side], int]:
        return {(e.u, e.v, e.side): i for i, e in enumerate(self.edges)}

    def find_edge(self, u: int, v: int, side: Side | None = None) -> int:
        a, b = min(u, v), max(u, v)
        for i, e in enumerate(self.edges):
            if e.pair == (a, b) and (side is None or e.side is side):
                return i
        raise KeyError(edge_key(u, v))

    def face_edge_ids(self, face_index: int) -> list[int]:
        """Edge indices along a face boundary, in face order."""
        face = self.faces[face_index]
        side = self.face_sides[face_index]
        out = []
        for a, b in zip(face, face[1:] + face[:1]):
            if _is_equator_pair(a, b, self.n):
                out.append(self.find_edge(a, b, Side.EQUATOR))
            else:
                out.append(self.find_edge(a, b, side))
        return out

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {i: set() for i in range(self.n)}
        for e in self.edges:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
        return adj

    def is_triangulation(self) -> bool:
        try:
            return all(len(f) == 3 for f in self.faces)
        except InvalidGraph:
            return False

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "edges": [{"u": e.u, "v": e.v, "side": e.side.value} for e in self.edges],
            "faces": [[self.edges[i].key for i in self.face_edge_ids(k)] for k in range(len(self.faces))],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MarkedGraph":
        try:
            n = int(data["n"])
            edges = tuple(Edge(int(e["u"]), int(e["v"]), Side(e["side"])) for e in data["edges"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidGraph(f"malformed graph JSON: {exc}") from exc
        g = cls(n, tuple(sorted(edges, key=lambda e: (e.u, e.v, e.side.value))))
        if "faces" in data and data["faces"] is not None:
            given = sorted(sorted(f) for f in data["faces"])
            computed = sorted(sorted(g.edges[i].key for i in g.face_edge_ids(k)) for k in range(len(g.faces)))
            if given != computed:
                raise InvalidGraph("stated faces disagree with the chord embedding")
        return g

    def __eq__(self, other):
        return isinstance(other, MarkedGraph) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def signature(self):
        return (self.n, tuple(sorted(self.top)), tuple(sorted(self.bottom)))

    def __repr__(self):
        return f"MarkedGraph(n={self.n}, top={sorted(self.top)}, bottom={sorted(self.bottom)})"


def _is_equator_pair(a: int, b: int, n: int) -> bool:
    return (b - a) % n in (1, n - 1)


@dataclass
class ValidationReport:
    valid: bool
    failures: list[tuple[str, str, object]]


def _separating_pair(n: int, adj: dict[int, set[int]]):
    for k in range(3):
        for removed in itertools.combinations(range(n), k):
            rest = [v for v in range(n) if v not in removed]
            if len(rest) < 2:
                return removed
            seen = {rest[0]}
            queue = deque([rest[0]])
            while queue:
                w = queue.popleft()
                for x in adj[w]:
                    if x not in removed and x not in seen:
                        seen.add(x)
                        queue.append(x)
            if len(seen) < len(rest):
                return removed
    return None


def is_three_connected(g: MarkedGraph) -> bool:
    return g.n >= 4 and _separating_pair(g.n, g.adjacency()) is None


def validate_marked_graph(g: MarkedGraph) -> ValidationReport:
    failures: list[tuple[str, str, object]] = []
    n = g.n
    if n < 4:
        failures.append(("size", "at least four vertices are needed", n))
        return ValidationReport(False, failures)
    for e in g.edges:
        if not (0 <= e.u < n and 0 <= e.v < n) or e.u == e.v:
            failures.append(("vertex", "edge endpoints out of range or equal", e.key))
    if failures:
        return ValidationReport(False, failures)
    equator = {e.pair for e in g.edges if e.side is Side.EQUATOR}
    for i in range(n):
        pair = tuple(sorted((i, (i + 1) % n)))
        if pair not in equator:
            failures.append(("equator", "missing equator edge", edge_key(*pair)))
    for e in g.edges:
        if e.side is Side.EQUATOR and not _is_equator_pair(e.u, e.v, n):
            failures.append(("equator", "edge tagged equator is not consecutive", e.key))
        if e.side is not Side.EQUATOR and _is_equator_pair(e.u, e.v, n):
            failures.append(("side", "equator pair tagged as a chord", e.key))
    seen: dict[tuple, int] = {}
    for e in g.edges:
        seen[(e.pair, e.side)] = seen.get((e.pair, e.side), 0) + 1
    for (pair, side), c in seen.items():
        if c > 1:
            failures.append(("duplicate", f"edge repeated on side {side.value}", edge_key(*pair)))
    for side in (Side.TOP, Side.BOTTOM):
        chords = g.chords(side)
        for a, b in itertools.combinations(chords, 2):
            if _crosses(a, b):
                failures.append(("disk", f"{side.value} chords cross", (edge_key(*a), edge_key(*b))))
    if failures:
        return ValidationReport(False, failures)
    faces = g.faces
    if n - len(g.edges) + len(faces) != 2:
        failures.append(("euler", "V - E + F != 2", (n, len(g.edges), len(faces))))
    witness = _separating_pair(n, g.adjacency())
    if witness is not None:
        failures.append(("3-connected", "removing these vertices disconnects the graph", witness))
    return ValidationReport(not failures, failures)


def require_valid(g: MarkedGraph) -> None:
    rep = validate_marked_graph(g)
    if not rep.valid:
        code, msg, wit = rep.failures[0]
        raise InvalidGraph(f"{code}: {msg} ({wit})")


# --- duality ------------------------------------------------------------------------


@dataclass(frozen=True)
class DualGraph:
    """Vertices are face indices of the primal graph; dual edge i is dual to primal edge i."""

    n_vertices: int
    edge_ends: tuple[tuple[int, int], ...]
    vertex_faces: tuple[tuple[int, ...], ...]
    vertex_edges: tuple[tuple[int, ...], ...]

    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(self.n_vertices)}
        for k, (a, b) in enumerate(self.edge_ends):
            adj[a].append((b, k))
            adj[b].append((a, k))
        return adj


def dual_graph(g: MarkedGraph) -> DualGraph:
    require_valid(g)
    owners: dict[int, list[int]] = {i: [] for i in range(len(g.edges))}
    for f in range(len(g.faces)):
        for i in g.face_edge_ids(f):
            owners[i].append(f)
    for i, fs in owners.items():
        if len(fs) != 2:
            raise InvalidGraph(f"edge {g.edges[i].key} borders {len(fs)} faces")
    # cyclic order of faces around each vertex: walk across the edge leaving v
    succ_face: dict[tuple[int, int], int] = {}
    pred_of: dict[tuple[int, int], int] = {}
    for f, face in enumerate(g.faces):
        k = len(face)
        for j, v in enumerate(face):
            succ_face[(f, v)] = face[(j + 1) % k]
            pred_of[(v, face[(j - 1) % k])] = f
    vertex_faces, vertex_edges = [], []
    ids = [g.face_edge_ids(f) for f in range(len(g.faces))]
    for v in range(g.n):
        start = next(f for f, face in enumerate(g.faces) if v in face)
        order, edges = [start], []
        f = start
        while True:
            s = succ_face[(f, v)]
            face = g.faces[f]
            j = face.index(v)
            edges.append(ids[f][j])
            f = pred_of[(v, s)]
            if f == start:
                break
            order.append(f)
        vertex_faces.append(tuple(order))
        vertex_edges.append(tuple(edges))
    ends = tuple((owners[i][0], owners[i][1]) for i in range(len(g.edges)))
    return DualGraph(len(g.faces), ends, tuple(vertex_faces), tuple(vertex_edges))


# --- triangulations and flips -------------------------------------------------------


def triangulation_admissible(g: MarkedGraph) -> bool:
    """No pair of vertices is joined by both a top and a bottom edge."""
    if not g.is_triangulation():
        raise NotATriangulation("every face must be a triangle")
    return not (set(g.top) & set(g.bottom))


def flip(g: MarkedGraph, u: int, v: int, side: Side | str | None = None) -> MarkedGraph:
    if isinstance(side, str):
        side = Side(side)
    if not g.is_triangulation():
        raise NotATriangulation("flips are defined on triangulations")
    a, b = min(u, v), max(u, v)
    candidates = [e for e in g.edges if e.pair == (a, b)]
    if not candidates:
        raise KeyError(edge_key(a, b))
    if side is None:
        chords = [e for e in candidates if e.side is not Side.EQUATOR]
        if not chords:
            raise EquatorEdge("equator edges cannot be flipped")
        if len(chords) > 1:
            raise InvalidGraph("edge is both top and bottom; name the side")
        side = chords[0].side
    if side is Side.EQUATOR:
        raise EquatorEdge("equator edges cannot be flipped")
    if not any(e.side is side for e in candidates):
        raise KeyError(edge_key(a, b))
    tris = [f for f, s in zip(g.faces, g.face_sides) if s is side and a in f and b in f]
    if len(tris) != 2:
        raise NonFlippable("edge does not separate two triangles")
    apex = [next(w for w in f if w not in (a, b)) for f in tris]
    if apex[0] == apex[1]:
        raise NonFlippable("quadrilateral is degenerate")
    new = tuple(sorted(apex))
    chords = [c for c in g.chords(side) if c != (a, b)]
    if new in chords:
        raise NonFlippable("flipped diagonal already present")
    chords.append(new)
    top = chords if side is Side.TOP else g.top
    bottom = chords if side is Side.BOTTOM else g.bottom
    return MarkedGraph.from_diagonals(g.n, top, bottom)


def polygon_triangulations(vertices: list[int]) -> Iterator[list[tuple[int, int]]]:
    """All triangulations of a convex polygon given by its cyclic vertex list, as chord lists."""
    k = len(vertices)
    if k < 3:
        yield []
        return
    a, b = vertices[0], vertices[-1]
    for m in range(1, k - 1):
        left, right = vertices[: m + 1], vertices[m:]
        extra = []
        if m > 1:
            extra.append(tuple(sorted((a, vertices[m]))))
        if m < k - 2:
            extra.append(tuple(sorted((vertices[m], b))))
        for lt in polygon_triangulations(left):
            for rt in polygon_triangulations(right):
                yield lt + rt + extra


def _check_n(n: int, max_n: int | None) -> None:
    limit = DEFAULT_MAX_N if max_n is None else max_n
    if n < 4:
        raise InvalidGraph("need n >= 4")
    if n > limit:
        raise TooLarge(f"n = {n} exceeds the configured maximum {limit}")


def enumerate_admissible_triangulations(n: int, max_n: int | None = None) -> list[MarkedGraph]:
    _check_n(n, max_n)
    tris = [frozenset(t) for t in polygon_triangulations(list(range(n)))]
    out = []
    for top in tris:
        for bottom in tris:
            if not (top & bottom):
                out.append(MarkedGraph.from_diagonals(n, sorted(top), sorted(bottom)))
    return out


def _polygon_flips(n: int, chords: frozenset) -> list[frozenset]:
    triangles = _split_regions(n, chords)
    out = []
    for a, b in chords:
        apex = [next(w for w in t if w not in (a, b)) for t in triangles if a in t and b in t]
        out.append((chords - {(a, b)}) | {tuple(sorted(apex))})
    return out


def flip_graph(n: int, max_n: int | None = None) -> tuple[list[MarkedGraph], set[tuple[int, int]]]:
    """Admissible triangulations and the index pairs joined by a single flip."""
    _check_n(n, max_n)
    tris = [frozenset(t) for t in polygon_triangulations(list(range(n)))]
    flips = {t: _polygon_flips(n, t) for t in tris}
    pairs = [(t, b) for t in tris for b in tris if not (t & b)]
    index = {p: i for i, p in enumerate(pairs)}
    links = set()
    for i, (t, b) in enumerate(pairs):
        moves = [(t2, b) for t2 in flips[t]] + [(t, b2) for b2 in flips[b]]
        for m in moves:
            j = index.get(m)
            if j is not None:
                links.add((min(i, j), max(i, j)))
    nodes = [MarkedGraph.from_diagonals(n, sorted(t), sorted(b)) for t, b in pairs]
    return nodes, links


def is_flip_graph_connected(n: int, max_n: int | None = None) -> bool:
    nodes, links = flip_graph(n, max_n)
    adj: dict[int, list[int]] = {i: [] for i in range(len(nodes))}
    for i, j in links:
        adj[i].append(j)
        adj[j].append(i)
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(nodes)


def complete_to_admissible_triangulation(g: MarkedGraph) -> MarkedGraph:
    """Triangulate every non-triangular face without pairing a top and a bottom chord."""
    require_valid(g)
    if g.is_triangulation():
        return g
    top_regions = [r for r in _split_regions(g.n, g.top) if len(r) > 3]
    bottom_regions = [r for r in _split_regions(g.n, g.bottom) if len(r) > 3]

    def side_options(regions, forbidden):
        options = [
            [t for t in polygon_triangulations(r) if not (set(t) & forbidden)] for r in regions
        ]
        for combo in itertools.product(*options):
            yield [c for t in combo for c in t]

    for top_extra in side_options(top_regions, set(g.bottom)):
        top = g.top + top_extra
        for bottom_extra in side_options(bottom_regions, set(top)):
            h = MarkedGraph.from_diagonals(g.n, top, g.bottom + bottom_extra)
            if triangulation_admissible(h):
                return h
    raise InvalidGraph("no admissible completion exists")


# --- witnesses for the admissibility conditions -------------------------------------


@dataclass(frozen=True)
class ConditionWitnesses:
    """Edge-index tuples; each path is stored with the vertex of its dual face."""

    faces_of_dual: tuple[tuple[int, ...], ...]
    circuits_two_gamma: tuple[tuple[int, ...], ...]
    paths_one_gamma: tuple[tuple[tuple[int, ...], int], ...]


def enumerate_condition_witnesses(g: MarkedGraph, edge_bound: int | None = None) -> ConditionWitnesses:
    """Exhaustive DFS over the dual graph, pruned by the number of equator-dual edges.

    Removing the equator-dual edges leaves two trees (top and bottom faces), so
    the pruned search stays polynomial in the graph size.
    """
    bound = DEFAULT_WITNESS_EDGE_BOUND if edge_bound is None else edge_bound
    if len(g.edges) > bound:
        raise TooLarge(f"{len(g.edges)} edges exceed the witness enumeration bound {bound}")
    d = dual_graph(g)
    adj = d.adjacency()
    gamma = {i for i, e in enumerate(g.edges) if e.side is Side.EQUATOR}
    face_edge_sets = [frozenset(es) for es in d.vertex_edges]

    circuits: set[frozenset[int]] = set()
    for start in range(d.n_vertices):
        stack = [(start, (start,), ())]
        while stack:
            node, verts, edges = stack.pop()
            ng = sum(1 for e in edges if e in gamma)
            for nxt, eid in adj[node]:
                if eid in edges:
                    continue
                g_count = ng + (eid in gamma)
                if g_count > 2:
                    continue
                if nxt == start and len(edges) >= 1:
                    cyc = edges + (eid,)
                    if g_count == 2:
                        circuits.add(frozenset(cyc))
                    continue
                if nxt in verts or nxt < start:
                    continue
                stack.append((nxt, verts + (nxt,), edges + (eid,)))
    circuits = {c for c in circuits if c not in face_edge_sets}

    paths: dict[frozenset[int], int] = {}
    for v in range(g.n):
        ring = set(d.vertex_faces[v])
        fset = face_edge_sets[v]
        for start in ring:
            stack = [(start, (start,), (), 0)]
            while stack:
                node, verts, edges, ng = stack.pop()
                if ng == 1 and node in ring and node != start and not set(edges) <= fset:
                    paths.setdefault(frozenset(edges), v)
                for nxt, eid in adj[node]:
                    if nxt in verts:
                        continue
                    c = ng + (eid in gamma)
                    if c > 1:
                        continue
                    stack.append((nxt, verts + (nxt,), edges + (eid,), c))
    return ConditionWitnesses(
        faces_of_dual=tuple(d.vertex_edges),
        circuits_two_gamma=tuple(sorted(tuple(sorted(c)) for c in circuits)),
        paths_one_gamma=tuple(sorted((tuple(sorted(p)), v) for p, v in paths.items())),
    )
