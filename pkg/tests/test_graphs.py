import itertools
import random

import networkx as nx
import pytest

from adspoly.errors import EquatorEdge, InvalidGraph, NotATriangulation, TooLarge
from adspoly.graphs import (
    MarkedGraph,
    Side,
    complete_to_admissible_triangulation,
    dual_graph,
    enumerate_admissible_triangulations,
    enumerate_condition_witnesses,
    flip,
    flip_graph,
    is_flip_graph_connected,
    is_three_connected,
    polygon_triangulations,
    triangulation_admissible,
    validate_marked_graph,
)

TET = MarkedGraph.from_diagonals(4, [(0, 2)], [(1, 3)])
PENT = MarkedGraph.from_diagonals(5, [(0, 2), (0, 3)], [(1, 3), (1, 4)])


def nx_three_connected(g: MarkedGraph) -> bool:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(e.pair for e in g.edges)
    return nx.node_connectivity(h) >= 3


def test_validate_examples():
    assert validate_marked_graph(TET).valid
    bad = validate_marked_graph(MarkedGraph.from_diagonals(4, [(0, 2)], [(0, 2)]))
    assert not bad.valid
    assert bad.failures[0][0] == "3-connected" and set(bad.failures[0][2]) == {0, 2}
    assert not validate_marked_graph(MarkedGraph.from_diagonals(4)).valid


def test_validate_catches_structural_errors():
    crossing = MarkedGraph.from_diagonals(5, [(0, 2), (1, 3)], [(0, 3)])
    assert any(f[0] == "disk" for f in validate_marked_graph(crossing).failures)
    missing = MarkedGraph(4, tuple(e for e in TET.edges if e.pair != (0, 1)))
    assert any(f[0] == "equator" for f in validate_marked_graph(missing).failures)
    assert not validate_marked_graph(MarkedGraph.from_diagonals(3)).valid


def test_euler_and_face_orientation():
    for g in enumerate_admissible_triangulations(6):
        assert g.n - len(g.edges) + len(g.faces) == 2
        directed = [(f[i], f[(i + 1) % len(f)]) for f in g.faces for i in range(len(f))]
        assert len(directed) == len(set(directed)) == 2 * len(g.edges)


def test_dual_graph_tetrahedron_is_k4():
    d = dual_graph(TET)
    h = nx.Graph()
    h.add_edges_from(d.edge_ends)
    assert nx.is_isomorphic(h, nx.complete_graph(4))
    assert len(d.edge_ends) == len(TET.edges)


def test_dual_faces_are_vertex_stars():
    for g in enumerate_admissible_triangulations(6)[:20] + [PENT]:
        d = dual_graph(g)
        for v in range(g.n):
            star = {i for i, e in enumerate(g.edges) if v in e.pair}
            assert set(d.vertex_edges[v]) == star
            assert set(d.vertex_faces[v]) == {f for f, face in enumerate(g.faces) if v in face}
            # consecutive faces in the ring share the listed edge
            ring = d.vertex_faces[v]
            for k, eid in enumerate(d.vertex_edges[v]):
                assert set(d.edge_ends[eid]) == {ring[k], ring[(k + 1) % len(ring)]}


def test_triangulation_admissibility_examples():
    assert triangulation_admissible(TET)
    assert not triangulation_admissible(MarkedGraph.from_diagonals(4, [(0, 2)], [(0, 2)]))
    assert triangulation_admissible(PENT)
    with pytest.raises(NotATriangulation):
        triangulation_admissible(MarkedGraph.from_diagonals(5, [(0, 2)], [(1, 3), (1, 4)]))


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_criterion_matches_three_connectivity(n):
    tris = [frozenset(t) for t in polygon_triangulations(list(range(n)))]
    rng = random.Random(n)
    pairs = list(itertools.product(tris, tris))
    if len(pairs) > 3000:
        pairs = rng.sample(pairs, 3000)
    for top, bottom in pairs:
        g = MarkedGraph.from_diagonals(n, sorted(top), sorted(bottom))
        assert triangulation_admissible(g) == nx_three_connected(g) == is_three_connected(g)


def test_flip_examples():
    g = flip(TET, 0, 2)
    assert g.top == [(1, 3)] and g.bottom == [(1, 3)]
    assert flip(g, 1, 3, Side.TOP) == TET
    with pytest.raises(EquatorEdge):
        flip(TET, 0, 1)
    for h in enumerate_admissible_triangulations(6)[:30]:
        for a, b in h.top:
            f = flip(h, a, b)
            assert f.is_triangulation() and len(f.faces) == len(h.faces)
            if triangulation_admissible(f):
                assert validate_marked_graph(f).valid


def test_flip_graph_facts():
    nodes, links = flip_graph(4)
    assert len(nodes) == 2 and not links
    assert not is_flip_graph_connected(4)
    nodes, _ = flip_graph(5)
    assert len(nodes) == 10
    assert is_flip_graph_connected(5)
    assert is_flip_graph_connected(6)
    assert is_flip_graph_connected(7)
    with pytest.raises(TooLarge):
        flip_graph(12)


def test_flip_graph_links_match_flip():
    nodes, links = flip_graph(6)
    index = {g: i for i, g in enumerate(nodes)}
    expected = set()
    for i, g in enumerate(nodes):
        for side in (Side.TOP, Side.BOTTOM):
            for a, b in g.chords(side):
                j = index.get(flip(g, a, b, side))
                if j is not None:
                    expected.add((min(i, j), max(i, j)))
    assert expected == links


def _nx_witnesses(g: MarkedGraph):
    d = dual_graph(g)
    h = nx.Graph()
    for k, (a, b) in enumerate(d.edge_ends):
        h.add_edge(a, b, id=k)
    gamma = {i for i, e in enumerate(g.edges) if e.side is Side.EQUATOR}
    faces = {frozenset(es) for es in d.vertex_edges}

    def ids(nodes, closed):
        seq = list(nodes) + ([nodes[0]] if closed else [])
        return frozenset(h.edges[a, b]["id"] for a, b in zip(seq, seq[1:]))

    circuits = set()
    for cyc in nx.simple_cycles(h):
        es = ids(cyc, True)
        if len(es & gamma) == 2 and es not in faces:
            circuits.add(es)
    paths = set()
    for v in range(g.n):
        ring = d.vertex_faces[v]
        fset = set(d.vertex_edges[v])
        for s, t in itertools.combinations(ring, 2):
            for p in nx.all_simple_paths(h, s, t):
                es = ids(p, False)
                if len(es & gamma) == 1 and not es <= fset:
                    paths.add(es)
    return circuits, paths


@pytest.mark.parametrize(
    "g",
    [TET, PENT, MarkedGraph.from_diagonals(6, [(0, 2), (2, 4), (0, 4)], [(1, 3), (3, 5), (1, 5)])]
    + enumerate_admissible_triangulations(6)[::17],
)
def test_witnesses_match_networkx(g):
    w = enumerate_condition_witnesses(g)
    circuits, paths = _nx_witnesses(g)
    assert {frozenset(c) for c in w.circuits_two_gamma} == circuits
    assert {frozenset(p) for p, _ in w.paths_one_gamma} == paths
    assert len(w.faces_of_dual) == g.n
    gamma = {i for i, e in enumerate(g.edges) if e.side is Side.EQUATOR}
    for p, _ in w.paths_one_gamma:
        assert len(set(p) & gamma) == 1


def test_witness_bound():
    g = enumerate_admissible_triangulations(8)[0]
    with pytest.raises(TooLarge):
        enumerate_condition_witnesses(g, edge_bound=10)


def _random_valid_graph(rng: random.Random, n: int) -> MarkedGraph:
    g = rng.choice(enumerate_admissible_triangulations(n))
    top, bottom = list(g.top), list(g.bottom)
    for _ in range(rng.randint(0, 3)):
        side = rng.choice([top, bottom])
        if not side:
            continue
        chord = rng.choice(side)
        side.remove(chord)
        h = MarkedGraph.from_diagonals(n, top, bottom)
        if not validate_marked_graph(h).valid:
            side.append(chord)
    return MarkedGraph.from_diagonals(n, top, bottom)


def test_complete_to_admissible_triangulation():
    assert complete_to_admissible_triangulation(TET) == TET
    quad = MarkedGraph.from_diagonals(5, [(0, 2)], [(1, 3), (1, 4)])
    assert validate_marked_graph(quad).valid
    full = complete_to_admissible_triangulation(quad)
    assert triangulation_admissible(full) and set(quad.top) <= set(full.top)
    rng = random.Random(0)
    for _ in range(50):
        g = _random_valid_graph(rng, rng.randint(5, 7))
        h = complete_to_admissible_triangulation(g)
        assert triangulation_admissible(h)
        assert set(g.top) <= set(h.top) and set(g.bottom) <= set(h.bottom)


def test_json_round_trip():
    data = PENT.to_json()
    assert MarkedGraph.from_json(data) == PENT
    data["faces"][0] = ["0-1", "1-2", "0-3"]
    with pytest.raises(InvalidGraph):
        MarkedGraph.from_json(data)
