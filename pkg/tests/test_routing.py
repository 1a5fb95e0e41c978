"""Routing: Dijkstra vs exhaustive oracle, safety, backups, GeoJSON."""

import json

import numpy as np
import pytest

from floodroute.roadnet import Edge, HazardOverlay, RoadGraph
from floodroute.routing import (
    Route,
    RouteRequest,
    backup_route,
    route_from_geojson,
    route_to_geojson,
    shortest_route,
)

from .oracles import enumerate_shortest


def make_graph(nodes, edges):
    """nodes: {id: (lon, lat)}; edges: (id, a, b, length_m, strength) rows.

    Lengths are synthetic so tests control weights exactly; polylines are
    straight lines between endpoints.
    """
    built = {}
    for edge_id, a, b, length_m, strength in edges:
        built[edge_id] = Edge(
            id=edge_id,
            from_node=a,
            to_node=b,
            polyline=(nodes[a], nodes[b]),
            length_m=length_m,
            strength=strength,
        )
    return RoadGraph(nodes=dict(nodes), edges=built)


def triangle():
    nodes = {"A": (0.0, 0.0), "B": (1.0, 0.0), "C": (1.0, 1.0)}
    return make_graph(
        nodes,
        [("ab", "A", "B", 1.0, 1.0), ("bc", "B", "C", 1.0, 1.0), ("ac", "A", "C", 3.0, 1.0)],
    )


def overlay_for(graph, blocked=()):
    return HazardOverlay(blocked={e: e in blocked for e in graph.edges})


def oracle_adjacency(graph, overlay, closed=frozenset()):
    adjacency = {n: [] for n in graph.nodes}
    for edge in graph.edges.values():
        if edge.id in closed or overlay.is_blocked(edge.id):
            continue
        adjacency[edge.from_node].append((edge.to_node, edge.id, edge.weight))
        adjacency[edge.to_node].append((edge.from_node, edge.id, edge.weight))
    return adjacency


def check_route_integrity(route, graph, overlay, closed=frozenset()):
    """Independent validity check: connectivity, safety, and totals."""
    assert len(route.edge_ids) == len(route.node_ids) - 1
    for (a, b), edge_id in zip(zip(route.node_ids, route.node_ids[1:]), route.edge_ids):
        edge = graph.edges[edge_id]
        assert {a, b} == {edge.from_node, edge.to_node}
        assert not overlay.is_blocked(edge_id)
        assert edge_id not in closed
    weights = [graph.edges[e].weight for e in route.edge_ids]
    lengths = [graph.edges[e].length_m for e in route.edge_ids]
    assert route.total_cost == pytest.approx(sum(weights), rel=1e-12, abs=1e-12)
    assert route.total_length_m == pytest.approx(sum(lengths), rel=1e-12, abs=1e-12)


def random_graph(rng, integer_weights):
    n = int(rng.integers(2, 13))
    ids = [f"n{i:02d}" for i in range(n)]
    nodes = {nid: (float(i % 5) * 0.01, float(i // 5) * 0.01) for i, nid in enumerate(ids)}
    m = int(rng.integers(1, n + 5))
    edges = []
    for j in range(m):
        a, b = rng.choice(n, size=2, replace=False)
        if integer_weights:
            weight = float(rng.integers(1, 11))
        else:
            weight = float(rng.uniform(0.1, 10.0))
        edges.append((f"e{j:02d}", ids[int(a)], ids[int(b)], weight, 1.0))
    return make_graph(nodes, edges)


class TestShortestRoute:
    def test_identity_route(self):
        graph = triangle()
        route = shortest_route(graph, overlay_for(graph), RouteRequest("A", "A"))
        assert route.node_ids == ("A",)
        assert route.edge_ids == ()
        assert route.total_cost == 0.0
        assert route.total_length_m == 0.0
        assert route.is_empty

    def test_triangle_prefers_two_hop(self):
        graph = triangle()
        route = shortest_route(graph, overlay_for(graph), RouteRequest("A", "C"))
        assert route.node_ids == ("A", "B", "C")
        assert route.edge_ids == ("ab", "bc")
        assert route.total_cost == 2.0

    def test_triangle_with_blocked_leg(self):
        graph = triangle()
        route = shortest_route(graph, overlay_for(graph, {"ab"}), RouteRequest("A", "C"))
        assert route.node_ids == ("A", "C")
        assert route.edge_ids == ("ac",)
        assert route.total_cost == 3.0

    def test_closed_edges_act_like_blocks(self):
        graph = triangle()
        request = RouteRequest("A", "C", closed_edges={"bc"})
        route = shortest_route(graph, overlay_for(graph), request)
        assert route.edge_ids == ("ac",)

    def test_unreachable_is_none(self):
        nodes = {"A": (0.0, 0.0), "B": (1.0, 0.0), "X": (5.0, 5.0)}
        graph = make_graph(nodes, [("ab", "A", "B", 1.0, 1.0)])
        assert shortest_route(graph, overlay_for(graph), RouteRequest("A", "X")) is None

    def test_fully_blocked_is_none(self):
        graph = triangle()
        overlay = overlay_for(graph, {"ab", "bc", "ac"})
        assert shortest_route(graph, overlay, RouteRequest("A", "C")) is None

    def test_unknown_origin(self):
        graph = triangle()
        with pytest.raises(ValueError, match="unknown node id 'Z'"):
            shortest_route(graph, overlay_for(graph), RouteRequest("Z", "C"))

    def test_unknown_closed_edge(self):
        graph = triangle()
        request = RouteRequest("A", "C", closed_edges={"nope"})
        with pytest.raises(ValueError, match="unknown closed edge id 'nope'"):
            shortest_route(graph, overlay_for(graph), request)

    def test_deterministic_tie_break(self):
        # Two equal-cost paths; the smaller node id must win extraction.
        nodes = {"A": (0.0, 0.0), "M": (1.0, 1.0), "Z": (1.0, -1.0), "D": (2.0, 0.0)}
        graph = make_graph(
            nodes,
            [
                ("e1", "A", "M", 1.0, 1.0),
                ("e2", "A", "Z", 1.0, 1.0),
                ("e3", "M", "D", 1.0, 1.0),
                ("e4", "Z", "D", 1.0, 1.0),
            ],
        )
        route = shortest_route(graph, overlay_for(graph), RouteRequest("A", "D"))
        assert route.node_ids == ("A", "M", "D")

    @pytest.mark.parametrize("integer_weights", [True, False])
    def test_matches_exhaustive_oracle(self, integer_weights):
        rng = np.random.default_rng(101 if integer_weights else 102)
        for _ in range(100):
            graph = random_graph(rng, integer_weights)
            overlay = overlay_for(graph)
            ids = sorted(graph.nodes)
            origin, destination = (
                ids[int(rng.integers(len(ids)))],
                ids[int(rng.integers(len(ids)))],
            )
            route = shortest_route(graph, overlay, RouteRequest(origin, destination))
            best_cost, _ = enumerate_shortest(
                oracle_adjacency(graph, overlay), origin, destination
            )
            if best_cost is None:
                assert route is None
            else:
                check_route_integrity(route, graph, overlay)
                if integer_weights:
                    assert route.total_cost == best_cost
                else:
                    assert route.total_cost == pytest.approx(best_cost, rel=1e-9)

    def test_safety_under_random_blocking(self):
        rng = np.random.default_rng(103)
        for _ in range(100):
            graph = random_graph(rng, integer_weights=False)
            blocked = {e for e in graph.edges if rng.random() < 0.3}
            closed = frozenset(e for e in graph.edges if rng.random() < 0.15)
            overlay = overlay_for(graph, blocked)
            ids = sorted(graph.nodes)
            origin, destination = (
                ids[int(rng.integers(len(ids)))],
                ids[int(rng.integers(len(ids)))],
            )
            route = shortest_route(
                graph, overlay, RouteRequest(origin, destination, closed)
            )
            if route is not None:
                check_route_integrity(route, graph, overlay, closed)

    def test_monotone_degradation(self):
        rng = np.random.default_rng(104)
        for _ in range(60):
            graph = random_graph(rng, integer_weights=False)
            edge_ids = sorted(graph.edges)
            small = {e for e in edge_ids if rng.random() < 0.2}
            large = small | {e for e in edge_ids if rng.random() < 0.2}
            ids = sorted(graph.nodes)
            origin, destination = ids[0], ids[-1]
            before = shortest_route(
                graph, overlay_for(graph, small), RouteRequest(origin, destination)
            )
            after = shortest_route(
                graph, overlay_for(graph, large), RouteRequest(origin, destination)
            )
            if before is None:
                assert after is None
            elif after is not None:
                assert after.total_cost >= before.total_cost - 1e-9

    def test_strength_scaling_is_exact_for_powers_of_two(self):
        rng = np.random.default_rng(105)
        for _ in range(30):
            graph = random_graph(rng, integer_weights=False)
            scaled = RoadGraph(
                nodes=graph.nodes,
                edges={
                    eid: Edge(
                        id=e.id,
                        from_node=e.from_node,
                        to_node=e.to_node,
                        polyline=e.polyline,
                        length_m=e.length_m,
                        strength=e.strength * 4.0,
                    )
                    for eid, e in graph.edges.items()
                },
            )
            ids = sorted(graph.nodes)
            request = RouteRequest(ids[0], ids[-1])
            base = shortest_route(graph, overlay_for(graph), request)
            quad = shortest_route(scaled, overlay_for(scaled), request)
            if base is None:
                assert quad is None
            else:
                assert quad.edge_ids == base.edge_ids
                assert quad.total_cost == 4.0 * base.total_cost
                assert quad.total_length_m == base.total_length_m

    def test_symmetry(self):
        rng = np.random.default_rng(106)
        for _ in range(50):
            graph = random_graph(rng, integer_weights=True)
            ids = sorted(graph.nodes)
            overlay = overlay_for(graph)
            forward = shortest_route(graph, overlay, RouteRequest(ids[0], ids[-1]))
            reverse = shortest_route(graph, overlay, RouteRequest(ids[-1], ids[0]))
            if forward is None:
                assert reverse is None
            else:
                assert forward.total_cost == reverse.total_cost


class TestRouteShape:
    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="route shape mismatch"):
            Route(node_ids=("a", "b"), edge_ids=(), total_cost=0.0, total_length_m=0.0)

    def test_empty_node_list_rejected(self):
        with pytest.raises(ValueError, match="at least its origin"):
            Route(node_ids=(), edge_ids=(), total_cost=0.0, total_length_m=0.0)


class TestBackupRoute:
    def test_closure_off_route_returns_primary_unchanged(self):
        graph = triangle()
        overlay = overlay_for(graph)
        primary = shortest_route(graph, overlay, RouteRequest("A", "C"))
        backup = backup_route(graph, overlay, primary, {"ac"})
        assert backup is primary

    def test_triangle_backup(self):
        graph = triangle()
        overlay = overlay_for(graph)
        primary = shortest_route(graph, overlay, RouteRequest("A", "C"))
        assert primary.node_ids == ("A", "B", "C")
        backup = backup_route(graph, overlay, primary, {"bc"})
        assert backup.node_ids == ("A", "C")
        assert backup.total_cost == 3.0
        assert "bc" not in backup.edge_ids

    def test_backup_none_when_severed(self):
        nodes = {"A": (0.0, 0.0), "B": (1.0, 0.0)}
        graph = make_graph(nodes, [("ab", "A", "B", 1.0, 1.0)])
        overlay = overlay_for(graph)
        primary = shortest_route(graph, overlay, RouteRequest("A", "B"))
        assert backup_route(graph, overlay, primary, {"ab"}) is None

    def test_prior_closures_still_respected(self):
        graph = triangle()
        overlay = overlay_for(graph)
        closed = frozenset({"ac"})
        primary = shortest_route(graph, overlay, RouteRequest("A", "C", closed))
        assert primary.node_ids == ("A", "B", "C")
        # Closing bc with ac already closed leaves no path at all.
        assert backup_route(graph, overlay, primary, {"bc"}, closed_edges=closed) is None

    def test_backup_never_cheaper(self):
        rng = np.random.default_rng(107)
        checked = 0
        while checked < 50:
            graph = random_graph(rng, integer_weights=False)
            overlay = overlay_for(graph)
            ids = sorted(graph.nodes)
            primary = shortest_route(graph, overlay, RouteRequest(ids[0], ids[-1]))
            if primary is None or primary.is_empty:
                continue
            drop = primary.edge_ids[int(rng.integers(len(primary.edge_ids)))]
            backup = backup_route(graph, overlay, primary, {drop})
            if backup is not None:
                assert drop not in backup.edge_ids
                assert backup.total_cost >= primary.total_cost - 1e-9
                check_route_integrity(backup, graph, overlay, {drop})
            checked += 1


class TestRouteGeojson:
    def test_empty_route_has_only_summary(self):
        graph = triangle()
        route = shortest_route(graph, overlay_for(graph), RouteRequest("A", "A"))
        doc = json.loads(route_to_geojson(route, graph))
        assert doc["type"] == "FeatureCollection"
        assert len(doc["features"]) == 1
        summary = doc["features"][0]
        assert summary["geometry"] is None
        assert summary["properties"]["summary"] is True
        assert summary["properties"]["total_cost"] == 0.0
        assert summary["properties"]["total_length_m"] == 0.0

    def test_single_edge_route_has_two_features(self):
        graph = triangle()
        route = shortest_route(graph, overlay_for(graph, {"ab"}), RouteRequest("A", "C"))
        doc = json.loads(route_to_geojson(route, graph))
        assert len(doc["features"]) == 2
        line = doc["features"][0]
        assert line["geometry"]["type"] == "LineString"
        assert line["properties"]["edge_id"] == "ac"
        assert line["properties"]["length_m"] == 3.0

    def test_coordinates_verbatim_even_when_traversed_backwards(self):
        graph = triangle()
        route = shortest_route(graph, overlay_for(graph, {"ab"}), RouteRequest("C", "A"))
        doc = json.loads(route_to_geojson(route, graph))
        coordinates = doc["features"][0]["geometry"]["coordinates"]
        assert coordinates == [[0.0, 0.0], [1.0, 1.0]]

    def test_round_trip_is_byte_identical(self):
        graph = triangle()
        for request in [
            RouteRequest("A", "C"),
            RouteRequest("C", "A"),
            RouteRequest("A", "A"),
        ]:
            route = shortest_route(graph, overlay_for(graph), request)
            text = route_to_geojson(route, graph)
            rebuilt = route_from_geojson(text, graph)
            assert rebuilt == route
            assert route_to_geojson(rebuilt, graph) == text

    def test_trailing_newline_and_compact_separators(self):
        graph = triangle()
        route = shortest_route(graph, overlay_for(graph), RouteRequest("A", "C"))
        text = route_to_geojson(route, graph)
        assert text.endswith("\n")
        assert ", " not in text

    def test_unknown_edge_rejected(self):
        graph = triangle()
        route = Route(
            node_ids=("A", "C"), edge_ids=("zz",), total_cost=1.0, total_length_m=1.0
        )
        with pytest.raises(ValueError, match="'zz'"):
            route_to_geojson(route, graph)

    def test_parse_errors(self):
        graph = triangle()
        with pytest.raises(ValueError, match="not valid JSON"):
            route_from_geojson("{", graph)
        with pytest.raises(ValueError, match="FeatureCollection"):
            route_from_geojson('{"type":"Feature"}', graph)
        with pytest.raises(ValueError, match="summary"):
            route_from_geojson('{"type":"FeatureCollection","features":[]}', graph)
