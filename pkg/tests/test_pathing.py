"""Graph-state measurement rules, routing and plan construction.

The measurement rules are checked one Pauli at a time against the
stabilizer oracle (LC equivalence of the surviving graph); end-to-end
plan tests build full renormalized instances, apply the plan and demand
the exact brick-wall target.
"""

import numpy as np
import pytest

from percrenorm.lattice import BlockSpec, LatticeKind, build_block
from percrenorm.pathing import (
    GraphState,
    IncompletePlanError,
    MeasurementPlan,
    NotFullError,
    UnoccupiedBlockError,
    apply_plan,
    build_plan,
    extract_routes,
    hexagonal_state,
    hexagonal_target,
    route_block,
    verify_target,
)
from percrenorm.percolation import (
    Configuration,
    PercolationParams,
    label_clusters,
    sample,
)
from percrenorm.renorm import RenormScheme, build_renormalized
from percrenorm.rng import RngSpec
from percrenorm.stabilizer import lc_equivalent, stabilizer_oracle

from conftest import adj_sets


def random_graph_state(rng, n, p=0.5):
    adj = {v: set() for v in range(n)}
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                adj[a].add(b)
                adj[b].add(a)
    return GraphState(adj)


def test_graph_state_construction_and_copy():
    gs = GraphState({0: {1}, 1: {0, 2}, 2: {1}})
    assert gs.n_vertices() == 3
    assert gs.has_edge(0, 1) and not gs.has_edge(0, 2)
    cp = gs.copy()
    cp.measure_z(1)
    assert gs.has_edge(0, 1)
    assert cp.n_vertices() == 2
    with pytest.raises(ValueError):
        GraphState({0: {0}})
    with pytest.raises(ValueError):
        GraphState({0: {5}})


def test_from_configuration_uses_effective_bonds():
    g = build_block(LatticeKind.CUBIC, 2)
    cfg = sample(g, PercolationParams.mixed(0.7, 0.6), RngSpec(3))
    gs = GraphState.from_configuration(cfg)
    assert set(gs.adjacency) == set(np.nonzero(cfg.open_sites)[0].tolist())
    eff = cfg.effective_bonds()
    want = {
        (int(u), int(v))
        for u, v in zip(g.edges[eff, 0], g.edges[eff, 1])
    }
    have = {
        (min(v, w), max(v, w)) for v, nb in gs.adjacency.items() for w in nb
    }
    assert have == want


def test_local_complement_is_an_involution():
    rng = np.random.default_rng(2)
    for _ in range(20):
        gs = random_graph_state(rng, 6)
        v = int(rng.integers(0, 6))
        before = {w: set(nb) for w, nb in gs.adjacency.items()}
        gs.local_complement(v)
        gs.local_complement(v)
        assert gs.adjacency == before


@pytest.mark.parametrize("basis", ["X", "Y", "Z"])
def test_measurement_rules_match_stabilizer_oracle(basis):
    rng = np.random.default_rng({"X": 10, "Y": 11, "Z": 12}[basis])
    for _ in range(60):
        n = int(rng.integers(2, 8))
        gs = random_graph_state(rng, n, p=0.55)
        v = int(rng.integers(0, n))
        want = stabilizer_oracle(gs.adjacency, [(v, basis)]).adjacency
        {"X": gs.measure_x, "Y": gs.measure_y, "Z": gs.measure_z}[basis](v)
        assert lc_equivalent(gs.adjacency, want)


def test_x_rule_on_isolated_vertex_deletes_it():
    gs = GraphState({0: set(), 1: {2}, 2: {1}})
    gs.measure_x(0)
    assert set(gs.adjacency) == {1, 2}


def test_hexagonal_target_structure():
    t = hexagonal_target(4)
    edges = t.edges()
    assert len(edges) == len(set(edges))
    n_vert = 4 * 3
    n_horiz = sum(1 for x in range(3) for y in range(4) if (x + y) % 2 == 0)
    assert len(edges) == n_vert + n_horiz
    for x in range(4):
        for y in range(4):
            deg = sum(1 for a, b in edges if (x, y) in (a, b))
            assert deg == t.degree(x, y)
            assert deg <= 3
    with pytest.raises(ValueError):
        hexagonal_target(0)


def test_hexagonal_state_verifies_as_its_own_target():
    gs = hexagonal_state(3)
    assert verify_target(gs, 3)
    assert not verify_target(gs, 2)
    # tampering with one edge must be caught
    gs.adjacency[0].discard(1)
    gs.adjacency[1].discard(0)
    assert not verify_target(gs, 3)


def test_route_block_arms_live_in_the_open_cluster():
    g = build_block(LatticeKind.CUBIC, 4)
    cfg = Configuration(g, np.ones(g.n_vertices, bool), np.ones(g.n_edges, bool))
    lab = label_clusters(cfg)
    rb = route_block(cfg, lab, BlockSpec((0, 0, 0), (4, 4, 4)))
    assert set(rb.arms) == {(0, -1), (0, 1), (1, -1), (1, 1)}
    for (axis, side), path in rb.arms.items():
        assert path[0] == rb.midpoint
        coord = g.coords[path[-1], axis]
        assert coord == (0 if side < 0 else 3)
        # arm interiors are pairwise disjoint
    seen = set()
    for path in rb.arms.values():
        inner = set(path[1:])
        assert not (inner & seen)
        seen |= inner


def test_route_block_raises_without_crossing_cluster():
    g = build_block(LatticeKind.CUBIC, 3)
    cfg = Configuration(g, np.ones(g.n_vertices, bool), np.zeros(g.n_edges, bool))
    lab = label_clusters(cfg)
    with pytest.raises(UnoccupiedBlockError):
        route_block(cfg, lab, BlockSpec((0, 0, 0), (3, 3, 3)))


def _full_instance(kind, L, k, p_site, p_bond, max_seed=200):
    scheme = RenormScheme(kind, L, k, PercolationParams.mixed(p_site, p_bond))
    for seed in range(max_seed):
        rl = build_renormalized(scheme, RngSpec(seed))
        if rl.is_full():
            return rl
    raise AssertionError("no full instance found")


def test_extract_routes_invariants():
    rl = _full_instance(LatticeKind.CUBIC, 2, 2, 1.0, 0.4)
    rs = extract_routes(rl)
    L = rl.scheme.L
    assert set(rs.junctions) == {(x, y) for x in range(L) for y in range(L)}
    target_bonds = {tuple(sorted(e)) for e in hexagonal_target(L).edges()}
    assert set(rs.routes) == target_bonds
    cfg = rl.config
    eff = cfg.effective_bonds()
    open_edges = {
        (int(u), int(v))
        for u, v in zip(cfg.graph.edges[eff, 0], cfg.graph.edges[eff, 1])
    }
    interiors: set[int] = set()
    for (a, b), path in rs.routes.items():
        assert path[0] == rs.junctions[a]
        assert path[-1] == rs.junctions[b]
        for u, v in zip(path, path[1:]):
            assert (min(u, v), max(u, v)) in open_edges
        inner = set(path[1:-1])
        assert not (inner & set(rs.junctions.values()))
        assert not (inner & interiors)
        interiors |= inner


def test_extract_routes_requires_full_lattice():
    scheme = RenormScheme(LatticeKind.CUBIC, 2, 1, PercolationParams.mixed(1.0, 0.0))
    rl = build_renormalized(scheme, RngSpec(0))
    with pytest.raises(NotFullError):
        extract_routes(rl)


def test_build_plan_assignment_partition():
    rl = _full_instance(LatticeKind.CUBIC, 2, 2, 1.0, 0.4)
    rs = extract_routes(rl)
    plan = build_plan(rl, rs)
    open_ids = set(np.nonzero(rl.config.open_sites)[0].tolist())
    assert set(plan.assignment) == open_ids
    counts = plan.counts()
    assert counts["KEEP"] == rl.scheme.L**2
    assert {v for v, b in plan.assignment.items() if b == "KEEP"} == set(
        rs.junctions.values()
    )
    interiors = {
        v for path in rs.routes.values() for v in path[1:-1]
    }
    assert {v for v, b in plan.assignment.items() if b == "Y"} == interiors
    assert counts["X"] == 0  # the plan never needs X on these instances


def test_plan_text_round_trip():
    rl = _full_instance(LatticeKind.CUBIC, 2, 2, 1.0, 0.4)
    plan = build_plan(rl, extract_routes(rl))
    back = MeasurementPlan.from_text(plan.to_text())
    assert back.assignment == plan.assignment
    with pytest.raises(ValueError):
        MeasurementPlan.from_text("0 Q\n")
    with pytest.raises(ValueError):
        MeasurementPlan.from_text("0 Z\n0 Y\n")


@pytest.mark.parametrize(
    "kind,L,k,p_site,p_bond",
    [
        (LatticeKind.CUBIC, 2, 2, 1.0, 0.4),
        (LatticeKind.CUBIC, 2, 3, 1.0, 0.4),
        (LatticeKind.DIAMOND, 2, 4, 0.9, 0.6),
    ],
)
def test_end_to_end_plan_prepares_target(kind, L, k, p_site, p_bond):
    rl = _full_instance(kind, L, k, p_site, p_bond, max_seed=40)
    plan = build_plan(rl, extract_routes(rl))
    out = apply_plan(GraphState.from_configuration(rl.config), plan)
    assert verify_target(out, L)


def test_apply_plan_requires_exact_cover():
    rl = _full_instance(LatticeKind.CUBIC, 2, 2, 1.0, 0.4)
    plan = build_plan(rl, extract_routes(rl))
    gs = GraphState.from_configuration(rl.config)
    short = MeasurementPlan(
        {v: b for v, b in list(plan.assignment.items())[:-1]},
        plan.junctions,
        plan.routes,
    )
    with pytest.raises(ValueError):
        apply_plan(gs, short)
    extra = dict(plan.assignment)
    extra[10**9] = "Z"
    with pytest.raises(ValueError):
        apply_plan(gs, MeasurementPlan(extra, plan.junctions, plan.routes))


def test_build_plan_rejects_tampered_routes():
    rl = _full_instance(LatticeKind.CUBIC, 2, 2, 1.0, 0.4)
    rs = extract_routes(rl)
    key = next(iter(rs.routes))
    broken = dict(rs.routes)
    broken.pop(key)
    with pytest.raises(IncompletePlanError):
        build_plan(rl, type(rs)(rs.junctions, broken))
