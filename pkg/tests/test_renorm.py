"""Renormalization cross-checked by an independent witness oracle.

The oracle recomputes every renormalized site and bond from the raw
configuration using slice_block, BFS labeling and a dict-based gluing
pass, sharing no code with the trial kernel.
"""

import math

import numpy as np
import pytest

from percrenorm.lattice import LatticeKind, face, slice_block
from percrenorm.percolation import PercolationParams
from percrenorm.renorm import (
    BoundConstants,
    OverlapMode,
    RenormScheme,
    bound_block_size,
    build_renormalized,
    estimate_P,
    evaluate_lower_bound,
    min_block_size,
    scaling_scan,
    underlying_graph,
)
from percrenorm.rng import RngSpec

from conftest import bfs_labels


def oracle_renormalize(rl):
    """Recompute (occupied, designated, east, north) from rl.config."""
    scheme = rl.scheme
    cfg = rl.config
    graph = underlying_graph(scheme)
    L = scheme.L
    labels_global = np.full(graph.n_vertices, -1, dtype=np.int64)
    occupied = np.zeros((L, L), dtype=bool)
    designated = np.full((L, L), -1, dtype=np.int64)
    for bx in range(L):
        for by in range(L):
            sub = slice_block(graph, scheme.block_spec(bx, by))
            par = sub.parent_vertex_ids
            local = bfs_labels(
                sub.n_vertices,
                sub.edges,
                cfg.open_sites[par],
                cfg.open_bonds[sub.parent_edge_ids],
            )
            ok = local >= 0
            labels_global[par[ok]] = par[local[ok]]
            # crossing clusters of this block along the scheme axes
            best_size, best_label = 0, -1
            uniq = np.unique(local[ok])
            for lab in uniq:
                members = np.nonzero(local == lab)[0]
                crosses = True
                for axis in scheme.axes:
                    lo = set(face(sub, axis, "low").vertex_ids.tolist())
                    hi = set(face(sub, axis, "high").vertex_ids.tolist())
                    ms = set(members.tolist())
                    if not (ms & lo and ms & hi):
                        crosses = False
                        break
                if crosses:
                    size = len(members)
                    glob = int(par[lab])
                    if size > best_size or (size == best_size and glob < best_label):
                        best_size, best_label = size, glob
            occupied[bx, by] = best_label >= 0
            designated[bx, by] = best_label

    def bond_present(a, b):
        da = designated[a]
        db = designated[b]
        if da < 0 or db < 0:
            return False
        eu, ev = graph.edges[:, 0], graph.edges[:, 1]
        w = graph.coords[:, :2] // (
            scheme.block_units * (4 if scheme.kind is LatticeKind.DIAMOND else 1)
        )
        blk_of = [tuple(t) for t in w.tolist()]
        if scheme.overlap is OverlapMode.DISJOINT_FACE_CONNECTED:
            for e in np.nonzero(cfg.open_bonds)[0]:
                u, v = int(eu[e]), int(ev[e])
                pa, pb = blk_of[u], blk_of[v]
                if {pa, pb} != {a, b}:
                    continue
                lu = labels_global[u] if pa == a else labels_global[v]
                lv = labels_global[v] if pa == a else labels_global[u]
                if lu == da and lv == db:
                    return True
            return False
        # overlapping rule: glue block-local clusters across open boundary bonds
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for lab in (int(da), int(db)):
            parent.setdefault(lab, lab)
        for e in np.nonzero(cfg.open_bonds)[0]:
            u, v = int(eu[e]), int(ev[e])
            pa, pb = blk_of[u], blk_of[v]
            if {pa, pb} != {a, b}:
                continue
            lu, lv = int(labels_global[u]), int(labels_global[v])
            if lu < 0 or lv < 0:
                continue
            parent.setdefault(lu, lu)
            parent.setdefault(lv, lv)
            ru, rv = find(lu), find(lv)
            if ru != rv:
                parent[rv] = ru
        return find(int(da)) == find(int(db))

    east = np.zeros((L - 1, L), dtype=bool)
    north = np.zeros((L, L - 1), dtype=bool)
    for x in range(L - 1):
        for y in range(L):
            east[x, y] = bond_present((x, y), (x + 1, y))
    for x in range(L):
        for y in range(L - 1):
            north[x, y] = bond_present((x, y), (x, y + 1))
    return occupied, designated, east, north


@pytest.mark.parametrize(
    "kind,L,k,p_site,p_bond,seeds",
    [
        (LatticeKind.CUBIC, 2, 2, 1.0, 0.35, range(6)),
        (LatticeKind.CUBIC, 3, 1, 0.85, 0.5, range(4)),
        (LatticeKind.DIAMOND, 2, 2, 0.75, 0.6, range(6)),
        (LatticeKind.DIAMOND, 2, 1, 1.0, 0.5, range(4)),
    ],
)
def test_build_renormalized_matches_witness_oracle(kind, L, k, p_site, p_bond, seeds):
    scheme = RenormScheme(kind, L, k, PercolationParams.mixed(p_site, p_bond))
    for seed in seeds:
        rl = build_renormalized(scheme, RngSpec(seed))
        occ, desig, east, north = oracle_renormalize(rl)
        np.testing.assert_array_equal(rl.site_occupied, occ)
        np.testing.assert_array_equal(rl.designated, desig)
        np.testing.assert_array_equal(rl.bond_east, east)
        np.testing.assert_array_equal(rl.bond_north, north)


def test_bond_witnesses_check_out():
    scheme = RenormScheme(
        LatticeKind.DIAMOND, 2, 2, PercolationParams.mixed(0.9, 0.7)
    )
    hits = 0
    for seed in range(8):
        rl = build_renormalized(scheme, RngSpec(seed))
        graph = underlying_graph(scheme)
        for x in range(scheme.L - 1):
            for y in range(scheme.L):
                if not rl.bond_east[x, y]:
                    continue
                e = int(rl.bond_witness_east[x, y])
                assert rl.config.open_bonds[e]
                u, v = graph.edges[e]
                assert {
                    int(rl.block_labels[u]),
                    int(rl.block_labels[v]),
                } == {int(rl.designated[x, y]), int(rl.designated[x + 1, y])}
                hits += 1
    assert hits > 0


def test_degenerate_probabilities():
    full = RenormScheme(LatticeKind.CUBIC, 2, 1, PercolationParams.mixed(1.0, 1.0))
    assert build_renormalized(full, RngSpec(0)).is_full()
    void = RenormScheme(LatticeKind.CUBIC, 2, 1, PercolationParams.mixed(1.0, 0.0))
    rl = build_renormalized(void, RngSpec(0))
    assert not rl.site_occupied.any()
    sites, bonds = rl.missing()
    assert len(sites) == 4 and len(bonds) == 4


def test_missing_and_bond_present_views_agree():
    scheme = RenormScheme(LatticeKind.CUBIC, 3, 1, PercolationParams.mixed(0.9, 0.5))
    rl = build_renormalized(scheme, RngSpec(5))
    sites, bonds = rl.missing()
    for x in range(3):
        for y in range(3):
            assert ((x, y) in sites) == (not rl.site_occupied[x, y])
    for a, b in bonds:
        assert not rl.bond_present(a, b)
    with pytest.raises(ValueError):
        rl.bond_present((0, 0), (1, 1))


def test_scheme_validation_and_conventions():
    p = PercolationParams.mixed(1.0, 0.5)
    cubic = RenormScheme(LatticeKind.CUBIC, 3, 2, p)
    assert cubic.overlap is OverlapMode.OVERLAPPING_CUBIC
    assert cubic.block_units == 4
    assert cubic.region_extent == (12, 12, 4)
    diamond = RenormScheme(LatticeKind.DIAMOND, 3, 2, p)
    assert diamond.overlap is OverlapMode.DISJOINT_FACE_CONNECTED
    assert diamond.block_units == 2
    assert diamond.region_extent == (6, 6, 2)
    with pytest.raises(ValueError):
        RenormScheme(LatticeKind.PYROCHLORE, 2, 2, p)
    with pytest.raises(ValueError):
        RenormScheme(LatticeKind.CUBIC, 0, 2, p)
    with pytest.raises(ValueError):
        RenormScheme(LatticeKind.DIAMOND, 2, 2, p, OverlapMode.OVERLAPPING_CUBIC)
    with pytest.raises(ValueError):
        RenormScheme(LatticeKind.CUBIC, 2, 2, p, axes=(3,))


def test_estimate_P_counts_trial_streams():
    scheme = RenormScheme(LatticeKind.CUBIC, 2, 1, PercolationParams.mixed(1.0, 0.5))
    est = estimate_P(scheme, 40, RngSpec(7, 100))
    direct = sum(
        build_renormalized(scheme, RngSpec(7, 100 + t)).is_full() for t in range(40)
    )
    assert est.successes == direct
    assert est.estimate == direct / 40
    assert estimate_P(scheme, 40, RngSpec(7, 100), workers=3) == est


def test_positive_association_of_neighboring_blocks():
    # occupancy events of adjacent blocks are increasing in the same bonds;
    # their joint frequency must not undercut independence by more than noise
    scheme = RenormScheme(LatticeKind.CUBIC, 2, 2, PercolationParams.bond(0.35))
    n = 600
    both = a_cnt = b_cnt = 0
    for t in range(n):
        rl = build_renormalized(scheme, RngSpec(41, t))
        a = bool(rl.site_occupied[0, 0])
        b = bool(rl.site_occupied[1, 0])
        a_cnt += a
        b_cnt += b
        both += a and b
    fa, fb, fab = a_cnt / n, b_cnt / n, both / n
    sigma = math.sqrt(fa * fb * ((1 - fa) + (1 - fb)) / n) + 1e-12
    assert fab >= fa * fb - 3 * sigma


def test_min_block_size_finds_supercritical_diamond():
    res = min_block_size(
        LatticeKind.DIAMOND,
        PercolationParams.mixed(1.0, 0.5),
        2,
        0.5,
        trials=120,
        k_max=8,
        rng=RngSpec(3),
    )
    assert res.k is not None
    hit = [r for r in res.rows if r.k == res.k]
    assert len(hit) == 1 and hit[0].estimate >= 0.5 and not hit[0].aborted
    # scanned k values below the answer all fell short or were prescreened
    for r in res.rows:
        if r.k < res.k:
            assert r.aborted or r.estimate < 0.5


def test_min_block_size_prescreen_is_sound():
    kwargs = dict(
        kind=LatticeKind.DIAMOND,
        params=PercolationParams.mixed(1.0, 0.5),
        L=2,
        P_threshold=0.5,
        trials=120,
        k_max=8,
        rng=RngSpec(3),
    )
    with_screen = min_block_size(**kwargs, prescreen=True)
    without = min_block_size(**kwargs, prescreen=False, early_stop=False)
    assert with_screen.k == without.k


def test_min_block_size_not_found_below_threshold():
    res = min_block_size(
        LatticeKind.DIAMOND,
        PercolationParams.mixed(0.75, 0.5),
        4,
        0.5,
        trials=80,
        k_max=3,
        rng=RngSpec(9),
    )
    assert res.k is None
    assert len(res.prescreened) > 0


def test_scaling_scan_shape():
    res = scaling_scan(
        LatticeKind.DIAMOND,
        PercolationParams.mixed(1.0, 0.5),
        [1, 2],
        0.5,
        trials=60,
        k_max=6,
        rng=RngSpec(2),
    )
    ks = res.min_k()
    assert set(ks) == {1, 2}
    assert all(v is not None for v in ks.values())


def test_bound_constants_validation():
    with pytest.raises(ValueError):
        BoundConstants(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        BoundConstants(1.0, 1.0, 1.0, epsilon=-0.5)
    with pytest.raises(ValueError):
        BoundConstants(1.0, 1.0, 1.0, k0=0)
    with pytest.raises(ValueError):
        evaluate_lower_bound(2, 0.5, BoundConstants(1.0, 1.0, 1.0, k0=1))
    with pytest.raises(ValueError):
        evaluate_lower_bound(0, 2.0, BoundConstants(1.0, 1.0, 1.0))


def test_lower_bound_matches_high_precision_reference():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 60
    consts = BoundConstants(1.0, 1.0, 1.0)
    for L, k in ((10, 25.0), (100, 31.6227766), (1000, 40.0), (3, 18.0)):
        a, c, d = map(mp.mpf, (consts.a, consts.c, consts.d))
        kk, LL = mp.mpf(k), mp.mpf(L)
        t_cross = 1 - mp.e ** (-d * kk * kk)
        t1 = 1 - (2 * kk) ** 6 * a * mp.e ** (-c * kk)
        t2 = 1 - (4 * kk) ** 6 * a * mp.e ** (-2 * c * kk)
        # a non-positive factor collapses the product, matching the log clamp
        if t1 <= 0 or t2 <= 0:
            full_ref = mp.mpf(0)
        else:
            full_ref = t_cross ** (2 * LL * LL - LL) * (t1 * t1 * t2) ** (LL * (LL - 1))
        simp_ref = t1 ** (5 * LL * LL) if t1 > 0 else mp.mpf(0)
        got = evaluate_lower_bound(L, k, consts)
        assert got.full == pytest.approx(float(full_ref), rel=1e-9, abs=1e-12)
        assert got.simplified == pytest.approx(float(simp_ref), rel=1e-9, abs=1e-12)


def test_bound_clamps_and_block_size_rule():
    consts = BoundConstants(1.0, 1.0, 1.0, epsilon=0.5)
    res = evaluate_lower_bound(100, 2.0, consts)
    assert res.full == 0.0  # (2k)^6 a e^{-ck} > 1 collapses the log term
    assert 0.0 <= res.simplified <= 1.0
    assert bound_block_size(100, consts) == pytest.approx(10.0)
    big = evaluate_lower_bound(10**6, bound_block_size(10**6, consts), consts)
    assert big.simplified > 0.99
