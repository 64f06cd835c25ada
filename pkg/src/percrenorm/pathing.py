"""Classical post-processing: routes, T-junctions, measurement plans.

Turns one full renormalized instance into a per-qubit measurement plan
whose graph-state rewriting leaves the brick-wall hexagonal lattice on
the junction qubits:

* one junction vertex per superlattice site, carrying up to three arms
  per the brick-wall orientation (east or west arm alternates with site
  parity, north/south always);
* one route per hexagonal edge, joining the two junction vertices by a
  shortest open path inside the union of the two blocks;
* Z on every other open vertex, Y along route interiors, Keep on
  junctions.

Routes are built sequentially with masking so that kept vertices induce
exactly the union of the route paths: interiors of distinct routes are
never adjacent, no interior is adjacent to a foreign junction, and
shortest paths are chordless. That makes the Y-contractions commute into
the exact target adjacency, which verify_target then confirms by
rewriting.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .lattice import BlockSpec, _SLICE_SCALE
from .percolation import ClusterLabeling, Configuration
from .renorm import RenormalizedLattice, _tables_for


class UnoccupiedBlockError(ValueError):
    """Block has no crossing cluster."""


class NotFullError(ValueError):
    """Renormalized instance is missing sites or bonds."""

    def __init__(self, sites, bonds):
        self.sites = list(sites)
        self.bonds = list(bonds)
        super().__init__(
            f"instance not full: {len(self.sites)} missing sites {self.sites[:8]}, "
            f"{len(self.bonds)} missing bonds {self.bonds[:8]}"
        )


class IncompletePlanError(ValueError):
    """A required route is missing or unroutable; names the bond."""

    def __init__(self, bond, reason=""):
        self.bond = bond
        super().__init__(f"no route for bond {bond[0]}-{bond[1]}" + (f": {reason}" if reason else ""))


class GraphState:
    """Simple graph over qubit ids with per-vertex local Clifford flags.

    The flags count frame-touching operations (bookkeeping only); graph
    adjacency is the tracked object, equivalence up to local Cliffords is
    decided by the stabilizer oracle at desk scale.
    """

    def __init__(
        self,
        adjacency: Optional[Mapping[int, Iterable[int]]] = None,
        junctions: Optional[dict] = None,
    ):
        self.adjacency: dict[int, set[int]] = {}
        if adjacency:
            for v in adjacency:
                self.adjacency[int(v)] = set()
            for v, nbrs in adjacency.items():
                for w in nbrs:
                    if int(w) == int(v) or int(w) not in self.adjacency:
                        raise ValueError(f"bad edge {v}-{w}")
                    self.adjacency[int(v)].add(int(w))
                    self.adjacency[int(w)].add(int(v))
        self.lc: dict[int, int] = {v: 0 for v in self.adjacency}
        self.junctions = junctions

    @classmethod
    def from_configuration(cls, cfg: Configuration) -> "GraphState":
        gs = cls()
        open_ids = np.nonzero(cfg.open_sites)[0]
        gs.adjacency = {int(v): set() for v in open_ids}
        eff = cfg.effective_bonds()
        eu = cfg.graph.edges[eff, 0]
        ev = cfg.graph.edges[eff, 1]
        for u, v in zip(eu.tolist(), ev.tolist()):
            gs.adjacency[u].add(v)
            gs.adjacency[v].add(u)
        gs.lc = {v: 0 for v in gs.adjacency}
        return gs

    def copy(self) -> "GraphState":
        gs = GraphState()
        gs.adjacency = {v: set(nbrs) for v, nbrs in self.adjacency.items()}
        gs.lc = dict(self.lc)
        gs.junctions = dict(self.junctions) if self.junctions else None
        return gs

    def n_vertices(self) -> int:
        return len(self.adjacency)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency.get(u, ())

    def local_complement(self, v: int) -> None:
        nbrs = sorted(self.adjacency[v])
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                a, b = nbrs[i], nbrs[j]
                if b in self.adjacency[a]:
                    self.adjacency[a].discard(b)
                    self.adjacency[b].discard(a)
                else:
                    self.adjacency[a].add(b)
                    self.adjacency[b].add(a)
        self.lc[v] += 1
        for w in nbrs:
            self.lc[w] += 1

    def _delete(self, v: int) -> None:
        for w in self.adjacency.pop(v):
            self.adjacency[w].discard(v)
        self.lc.pop(v, None)

    def measure_z(self, v: int) -> None:
        for w in self.adjacency[v]:
            self.lc[w] += 1
        self._delete(v)

    def measure_y(self, v: int) -> None:
        self.local_complement(v)
        self._delete(v)

    def measure_x(self, v: int) -> None:
        """Local complementation at the designated neighbor (lowest id),
        Y rule at v, local complementation at the same neighbor; an
        isolated vertex degenerates to deletion."""
        nbrs = self.adjacency[v]
        if not nbrs:
            self._delete(v)
            return
        b = min(nbrs)
        self.local_complement(b)
        self.measure_y(v)
        self.local_complement(b)


@dataclass(frozen=True)
class HexTarget:
    """Brick-wall hexagonal lattice on an L x L site grid: vertical edges
    everywhere, horizontal edge (x,y)-(x+1,y) iff x+y is even. Interior
    sites have degree 3 with arms {N,E,S} or {N,W,S} by parity."""

    L: int

    def sites(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.L) for y in range(self.L)]

    def edges(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        out = []
        for x in range(self.L - 1):
            for y in range(self.L):
                if (x + y) % 2 == 0:
                    out.append(((x, y), (x + 1, y)))
        for x in range(self.L):
            for y in range(self.L - 1):
                out.append(((x, y), (x, y + 1)))
        return out

    def degree(self, x: int, y: int) -> int:
        d = 0
        if y > 0:
            d += 1
        if y < self.L - 1:
            d += 1
        if x < self.L - 1 and (x + y) % 2 == 0:
            d += 1
        if x > 0 and (x - 1 + y) % 2 == 0:
            d += 1
        return d


def hexagonal_target(L: int) -> HexTarget:
    if L < 1:
        raise ValueError("L must be >= 1")
    return HexTarget(L)


def hexagonal_state(L: int) -> GraphState:
    """The target as a graph state with site (x,y) on qubit x*L + y."""
    t = hexagonal_target(L)
    adj = {x * L + y: set() for x, y in t.sites()}
    for (x1, y1), (x2, y2) in t.edges():
        adj[x1 * L + y1].add(x2 * L + y2)
        adj[x2 * L + y2].add(x1 * L + y1)
    return GraphState(adj, junctions={s: s[0] * L + s[1] for s in t.sites()})


@dataclass(frozen=True)
class RoutedBlock:
    midpoint: int
    arms: dict  # (axis, side) -> vertex path from midpoint to that face
    cluster_label: int


def _bfs_path(
    indptr: np.ndarray,
    nbr: np.ndarray,
    eid: np.ndarray,
    eff: np.ndarray,
    allowed: np.ndarray,
    start: int,
    targets: set[int],
) -> Optional[list[int]]:
    """Shortest path from start to any target inside the open masked
    subgraph; shortest paths here are chordless, which the plan relies on."""
    if start in targets:
        return [start]
    parent = {start: -1}
    dq = deque([start])
    while dq:
        v = dq.popleft()
        for i in range(indptr[v], indptr[v + 1]):
            w = int(nbr[i])
            if w in parent or not eff[eid[i]] or not allowed[w]:
                continue
            parent[w] = v
            if w in targets:
                path = [w]
                while path[-1] != start:
                    path.append(parent[path[-1]])
                return path[::-1]
            dq.append(w)
    return None


_DEFAULT_FACES = ((0, -1), (0, 1), (1, -1), (1, 1))


def route_block(
    cfg: Configuration,
    labeling: ClusterLabeling,
    block: BlockSpec,
    faces: Sequence[tuple[int, int]] = _DEFAULT_FACES,
    max_candidates: int = 64,
) -> RoutedBlock:
    """Midpoint and one arm per requested face inside the designated
    crossing cluster of the block.

    The designated cluster is the largest cluster crossing every axis
    named in `faces` (ties to the smallest label); the midpoint is its
    vertex closest to the block's geometric center (ties to the lowest
    id). Arms are shortest paths from the midpoint to each face, built
    in order with later arms avoiding earlier ones; if some arm cannot
    be routed the next midpoint candidate is tried.
    """
    graph = cfg.graph
    scale = _SLICE_SCALE[graph.kind]
    lo = scale * np.array(block.origin, dtype=np.int64)
    hi = scale * (np.array(block.origin) + np.array(block.extent)) - 1
    inside = ((graph.coords >= lo) & (graph.coords <= hi)).all(axis=1)
    ids = np.nonzero(inside)[0]
    if len(ids) == 0:
        raise ValueError("block contains no vertices")
    labs = labeling.labels[ids]
    ok = labs >= 0
    axes = sorted({axis for axis, _ in faces})
    face_ids = {
        (axis, side): ids[
            ok & (graph.coords[ids, axis] == (lo[axis] if side < 0 else hi[axis]))
        ]
        for axis in axes
        for side in (-1, 1)
    }
    crossing = None
    for axis in axes:
        both = np.intersect1d(
            labeling.labels[face_ids[(axis, -1)]], labeling.labels[face_ids[(axis, 1)]]
        )
        crossing = both if crossing is None else np.intersect1d(crossing, both)
    crossing = crossing[crossing >= 0] if crossing is not None else np.array([], np.int64)
    if len(crossing) == 0:
        raise UnoccupiedBlockError(f"block at {block.origin} has no crossing cluster")
    sizes = {int(c): int(np.sum(labs == c)) for c in crossing}
    best = max(sizes.values())
    designated = min(c for c, s in sizes.items() if s == best)

    cluster_ids = ids[labs == designated]
    center = (lo + hi) / 2.0
    d2 = ((graph.coords[cluster_ids] - center) ** 2).sum(axis=1)
    cand_order = cluster_ids[np.lexsort((cluster_ids, d2))]

    indptr, nbr, eid = graph.csr()
    eff = cfg.effective_bonds()
    in_cluster = np.zeros(graph.n_vertices, dtype=bool)
    in_cluster[cluster_ids] = True
    face_targets = {
        f: set(int(v) for v in face_ids[f] if in_cluster[v]) for f in faces
    }

    for mid in cand_order[: max_candidates].tolist():
        arms = {}
        allowed = in_cluster.copy()
        for f in faces:
            path = _bfs_path(indptr, nbr, eid, eff, allowed, mid, face_targets[f])
            if path is None:
                break
            arms[f] = path
            allowed[path[1:]] = False  # later arms meet earlier ones only at mid
        else:
            return RoutedBlock(int(mid), arms, int(designated))
    raise UnoccupiedBlockError(
        f"block at {block.origin} crosses but no midpoint routes all faces"
    )


@dataclass
class RouteSet:
    """Junction vertex per site plus one open path per hexagonal edge."""

    junctions: dict  # (x, y) -> vertex id
    routes: dict  # ((x1,y1),(x2,y2)) sorted pair -> tuple of vertex ids


def _bond_key(a, b):
    return (a, b) if a <= b else (b, a)


def extract_routes(rl: RenormalizedLattice) -> RouteSet:
    """Junction placement and masked route construction on a full instance.

    Junction candidates per block are designated-cluster vertices ranked
    by spare open degree beyond the arm count, distance to the block
    center, then id. Each needed arm direction reserves a distinct
    junction neighbor as its preferred first step, so arms routed early
    cannot consume another arm's only exit. Routes are shortest open
    paths within the union of their two blocks avoiding previous
    interiors, their neighbors, foreign junctions and their neighbors;
    a planning pass reserves an ideal corridor per bond which later
    routing keeps clear until the owning bond is built. Blocked bonds
    are retried at the front of the routing order, and persistently
    blocked bonds get their junctions moved to the next candidate.
    """
    scheme = rl.scheme
    L = scheme.L
    if rl.config is None or rl.block_labels is None:
        raise ValueError("instance carries no configuration detail")
    sites_missing, bonds_missing = rl.missing()
    if sites_missing or bonds_missing:
        raise NotFullError(sites_missing, bonds_missing)
    cfg = rl.config
    graph = cfg.graph
    target = hexagonal_target(L)
    indptr, nbr, eid = graph.csr()
    eff = cfg.effective_bonds()
    tab = _tables_for(scheme)

    # effective open degree per vertex
    deg = np.zeros(graph.n_vertices, dtype=np.int64)
    eu, ev = graph.edges[:, 0], graph.edges[:, 1]
    np.add.at(deg, eu[eff], 1)
    np.add.at(deg, ev[eff], 1)

    n = graph.n_vertices
    scale = _SLICE_SCALE[graph.kind]
    ax0, ax1 = scheme.axes
    coords = graph.coords
    base = target.edges()
    base_order = sorted(base)

    open_sites = cfg.open_sites.copy()
    # geometric block membership; with overlapping blocks a vertex belongs
    # to several, so membership is by bounding box rather than a partition
    block_lo = {}
    block_hi = {}
    for x in range(L):
        for y in range(L):
            spec = scheme.block_spec(x, y)
            block_lo[(x, y)] = scale * np.array(spec.origin)
            block_hi[(x, y)] = scale * (np.array(spec.origin) + np.array(spec.extent)) - 1

    _member_cache: dict[tuple[int, int], np.ndarray] = {}

    def in_block(site):
        m = _member_cache.get(site)
        if m is None:
            m = (
                (graph.coords >= block_lo[site]) & (graph.coords <= block_hi[site])
            ).all(axis=1)
            _member_cache[site] = m
        return m

    # junction candidates per block: designated-cluster vertices ranked by
    # spare open degree beyond the arm count, then distance to the block
    # center (not the cluster centroid), then id
    cand_lists: dict[tuple[int, int], np.ndarray] = {}
    for x in range(L):
        for y in range(L):
            b = x * L + y
            vids = tab.v_par[tab.v_off[b] : tab.v_off[b + 1]]
            members = vids[rl.block_labels[vids] == rl.designated[x, y]]
            center = (block_lo[(x, y)] + block_hi[(x, y)]) / 2.0
            need = target.degree(x, y)
            tier = np.full(len(members), 3, dtype=np.int64)
            tier[deg[members] >= need] = 2
            tier[deg[members] >= need + 1] = 1
            tier[deg[members] >= need + 2] = 0
            d2 = ((coords[members] - center) ** 2).sum(axis=1)
            cand_lists[(x, y)] = members[np.lexsort((members, d2, tier))]

    def place(choice):
        # scan forward from the chosen candidate until clear of junctions
        # placed so far; fall back to the first unclaimed one
        adj_to_junction = np.zeros(n, dtype=bool)
        taken = np.zeros(n, dtype=bool)
        junctions: dict[tuple[int, int], int] = {}
        for site in sorted(cand_lists):
            cl = cand_lists[site]
            start = choice[site] % len(cl)
            j = None
            for off in range(len(cl)):
                c = int(cl[(start + off) % len(cl)])
                if taken[c]:
                    continue
                if j is None:
                    j = c
                if not adj_to_junction[c]:
                    j = c
                    break
            if j is None:
                return None
            junctions[site] = j
            taken[j] = True
            adj_to_junction[j] = True
            for i in range(indptr[j], indptr[j + 1]):
                if eff[eid[i]]:
                    adj_to_junction[nbr[i]] = True
        return junctions

    def try_route(junctions):
        # how many junctions neighbor each vertex (foreign-junction masking)
        j_nbr_count = np.zeros(n, dtype=np.int64)
        j_nbrs: dict[int, list[int]] = {}
        for j in junctions.values():
            ns = [int(nbr[i]) for i in range(indptr[j], indptr[j + 1]) if eff[eid[i]]]
            j_nbrs[j] = ns
            for w in ns:
                j_nbr_count[w] += 1
        junction_mask = np.zeros(n, dtype=bool)
        junction_mask[list(junctions.values())] = True

        # adjacent junction pairs need no path; every other arm reserves a
        # distinct junction neighbor as its preferred first step, so arms
        # routed earlier cannot consume another arm's only exit
        direct: dict = {}
        arm_dirs: dict[tuple[int, int], list] = {s: [] for s in junctions}
        for a, b in base:
            jA, jB = junctions[a], junctions[b]
            if jB in j_nbrs[jA]:
                direct[_bond_key(a, b)] = (jA, jB)
                continue
            d = (b[0] - a[0], b[1] - a[1])
            arm_dirs[a].append((d, b))
            arm_dirs[b].append(((-d[0], -d[1]), a))

        stub: dict = {}  # (site, direction) -> reserved vertex, or None
        reserved: set[int] = set()
        for site in sorted(arm_dirs):
            j = junctions[site]
            for d, other in sorted(arm_dirs[site]):
                pair_mask = in_block(site) | in_block(other)
                cands = [
                    w
                    for w in j_nbrs[j]
                    if not junction_mask[w]
                    and j_nbr_count[w] == 1
                    and w not in reserved
                    and pair_mask[w]
                ]
                if not cands:
                    stub[(site, d)] = None
                    continue
                # neighbor pointing toward the arm wins; ties to lowest id
                gain = {
                    w: d[0] * (coords[w, ax0] - coords[j, ax0])
                    + d[1] * (coords[w, ax1] - coords[j, ax1])
                    for w in cands
                }
                s = min(cands, key=lambda w: (-gain[w], w))
                stub[(site, d)] = s
                reserved.add(s)
        stub_mask = np.zeros(n, dtype=bool)
        stub_mask[list(reserved)] = True
        no_pending = np.zeros(n, dtype=bool)

        def bond_context(a, _b):
            jA, jB = junctions[a], junctions[_b]
            d = (_b[0] - a[0], _b[1] - a[1])
            sA = stub[(a, d)]
            sB = stub[(_b, (-d[0], -d[1]))]
            in_union = in_block(a) | in_block(_b)
            # next to a foreign junction stays clear; next to own ends is ok
            fc = j_nbr_count.copy()
            for j in (jA, jB):
                fc[j_nbrs[j]] -= 1
            return jA, jB, sA, sB, in_union & open_sites & ~junction_mask & (fc == 0)

        def route_one(mask, jA, jB, sA, sB, pending):
            # reserved steps of arms not routed yet stay unconsumed; our own
            # reservation is lifted, never any of the masks already applied
            allowed = mask & ~pending
            for s in (sA, sB):
                if s is not None:
                    allowed[s] = mask[s]
            if sA is not None and sB is not None and mask[sA] and mask[sB]:
                # first pass: leave and enter through the reserved steps and
                # keep clear of the end junctions' other reserved steps
                restricted = allowed.copy()
                restricted[j_nbrs[jA]] = False
                restricted[j_nbrs[jB]] = False
                for j in (jA, jB):
                    for w in j_nbrs[j]:
                        if pending[w] and w != sA and w != sB:
                            for i in range(indptr[w], indptr[w + 1]):
                                if eff[eid[i]]:
                                    restricted[nbr[i]] = False
                restricted[sA] = True
                restricted[sB] = True
                mid = _bfs_path(indptr, nbr, eid, eff, restricted, sA, {sB})
                if mid is not None:
                    return [jA, *mid, jB]
            # relaxed pass: any free first step
            allowed[jA] = True
            allowed[jB] = True
            return _bfs_path(indptr, nbr, eid, eff, allowed, jA, {jB})

        def plan_phase(order):
            # ideal corridor per bond; only arms sharing a junction exclude
            # each other here, so crossings between unrelated corridors stay
            # possible and get resolved while routing
            plans: dict = {}
            pending = stub_mask.copy()
            for a, _b in order:
                key = _bond_key(a, _b)
                if key in direct:
                    continue
                jA, jB, sA, sB, base_mask = bond_context(a, _b)
                sib = np.zeros(n, dtype=bool)
                for key2, p2 in plans.items():
                    if a in key2 or _b in key2:
                        for u in p2[1:-1]:
                            sib[u] = True
                            for i in range(indptr[u], indptr[u + 1]):
                                if eff[eid[i]]:
                                    sib[nbr[i]] = True
                path = route_one(base_mask & ~sib, jA, jB, sA, sB, pending)
                if path is None:
                    # last resort: another arm's reserved step may be the
                    # only way through; feasibility beats the reservation
                    path = route_one(base_mask & ~sib, jA, jB, sA, sB, no_pending)
                if path is None:
                    return (a, _b), None
                plans[key] = path
                for s in (sA, sB):
                    if s is not None:
                        pending[s] = False
            return None, plans

        def final_phase(order, plans):
            used = np.zeros(n, dtype=bool)  # route interiors
            used_nbr = np.zeros(n, dtype=bool)
            pending = stub_mask.copy()
            # corridors of bonds not routed yet, kept clear while earlier
            # bonds route so boundary glue and junction access survive
            pc_used = np.zeros(n, dtype=np.int64)
            pc_nbr = np.zeros(n, dtype=np.int64)

            def corridor(path, sign):
                for u in path[1:-1]:
                    pc_used[u] += sign
                    for i in range(indptr[u], indptr[u + 1]):
                        if eff[eid[i]]:
                            pc_nbr[nbr[i]] += sign

            for path in plans.values():
                corridor(path, +1)
            routes: dict = dict(direct)
            for a, _b in order:
                key = _bond_key(a, _b)
                if key in routes:
                    continue
                corridor(plans[key], -1)
                jA, jB, sA, sB, base_mask = bond_context(a, _b)
                hard = base_mask & ~used & ~used_nbr
                path = route_one(
                    hard & (pc_used == 0) & (pc_nbr == 0), jA, jB, sA, sB, pending
                )
                if path is None:
                    path = route_one(hard & (pc_used == 0), jA, jB, sA, sB, pending)
                if path is None:
                    path = route_one(hard, jA, jB, sA, sB, pending)
                if path is None:
                    path = route_one(hard, jA, jB, sA, sB, no_pending)
                if path is None:
                    return (a, _b), None
                routes[key] = tuple(path)
                interior = path[1:-1]
                used[interior] = True
                for u in interior:
                    for i in range(indptr[u], indptr[u + 1]):
                        if eff[eid[i]]:
                            used_nbr[nbr[i]] = True
                for s in (sA, sB):
                    if s is not None:
                        pending[s] = False
            return None, routes

        # contention between routes depends on routing order; blocked bonds
        # are promoted to the front of the order and both phases restart
        promoted: list = []
        failed = None
        for _ in range(8):
            order = promoted + [e for e in base_order if e not in promoted]
            failed, plans = plan_phase(order)
            if plans is not None:
                failed, routes = final_phase(order, plans)
                if routes is not None:
                    return None, RouteSet(junctions, routes)
            if failed in promoted:
                promoted.remove(failed)
            promoted.insert(0, failed)
        return failed, None

    # a bond that stays blocked through the order retries gets a junction
    # moved to the next candidate: first its own ends (lower open degree
    # first), then surrounding junctions, which can pin the only way
    # through even when they are not ends of the blocked bond
    choice = {site: 0 for site in cand_lists}
    advances = {site: 0 for site in cand_lists}
    fail_count: dict = {}
    failed = None
    for _ in range(120):
        junctions = place(choice)
        if junctions is None:
            break
        failed, routes = try_route(junctions)
        if routes is not None:
            return routes
        a, _b = failed
        ends = sorted((a, _b), key=lambda s: (int(deg[junctions[s]]), advances[s], s))
        around = sorted(
            s
            for s in cand_lists
            if s not in ends
            and min(abs(s[0] - e[0]) + abs(s[1] - e[1]) for e in ends) == 1
        )
        rotation = ends + around
        i = fail_count.get(failed, 0)
        fail_count[failed] = i + 1
        if i and i % len(rotation) == 0:
            # a full cycle of single advances failed; kick the whole
            # neighborhood to escape oscillating placements
            for s in rotation:
                choice[s] += 1
                advances[s] += 1
        pick = rotation[i % len(rotation)]
        choice[pick] += 1
        advances[pick] += 1
    raise IncompletePlanError(failed, "masked search found no open path")


_BASES = ("X", "Y", "Z", "KEEP")


@dataclass
class MeasurementPlan:
    """Per-open-vertex assignment; Keep vertices are exactly the junctions."""

    assignment: dict[int, str]
    junctions: dict
    routes: dict

    def counts(self) -> dict[str, int]:
        out = {b: 0 for b in _BASES}
        for b in self.assignment.values():
            out[b] += 1
        return out

    def to_text(self) -> str:
        """One `vertex_id basis` line per open vertex, ascending vertex id."""
        return "\n".join(f"{v} {self.assignment[v]}" for v in sorted(self.assignment)) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MeasurementPlan":
        assignment = {}
        for line in text.strip().splitlines():
            vs, basis = line.split()
            if basis not in _BASES:
                raise ValueError(f"unknown basis {basis!r}")
            v = int(vs)
            if v in assignment:
                raise ValueError(f"vertex {v} assigned twice")
            assignment[v] = basis
        return cls(assignment, {}, {})


def build_plan(rl: RenormalizedLattice, routes: RouteSet) -> MeasurementPlan:
    """Keep junctions, Y route interiors, Z every other open vertex.

    Validates that the kept vertices induce exactly the union of the
    route paths in the open subgraph, so the Y contractions yield the
    hexagonal target adjacency precisely.
    """
    sites_missing, bonds_missing = rl.missing()
    if sites_missing or bonds_missing:
        raise NotFullError(sites_missing, bonds_missing)
    cfg = rl.config
    L = rl.scheme.L
    target = hexagonal_target(L)
    for bond in target.edges():
        if _bond_key(*bond) not in routes.routes:
            raise IncompletePlanError(bond)

    junction_ids = set(routes.junctions.values())
    interiors: set[int] = set()
    route_edges: set[tuple[int, int]] = set()
    for key, path in routes.routes.items():
        for u, v in zip(path, path[1:]):
            route_edges.add((u, v) if u < v else (v, u))
        for u in path[1:-1]:
            if u in interiors or u in junction_ids:
                raise IncompletePlanError(key, f"vertex {u} used twice")
            interiors.add(u)

    kept = junction_ids | interiors
    eff = cfg.effective_bonds()
    eu, ev = cfg.graph.edges[eff, 0], cfg.graph.edges[eff, 1]
    kept_mask = np.zeros(cfg.graph.n_vertices, dtype=bool)
    kept_mask[list(kept)] = True
    both = kept_mask[eu] & kept_mask[ev]
    induced = {
        (int(u), int(v)) if u < v else (int(v), int(u))
        for u, v in zip(eu[both], ev[both])
    }
    if induced != route_edges:
        stray = (induced - route_edges) | (route_edges - induced)
        raise IncompletePlanError(
            (min(routes.junctions), max(routes.junctions)),
            f"kept vertices induce stray adjacency {sorted(stray)[:4]}",
        )

    assignment = {}
    for v in np.nonzero(cfg.open_sites)[0].tolist():
        if v in junction_ids:
            assignment[v] = "KEEP"
        elif v in interiors:
            assignment[v] = "Y"
        else:
            assignment[v] = "Z"
    return MeasurementPlan(assignment, dict(routes.junctions), dict(routes.routes))


def apply_plan(gs: GraphState, plan: MeasurementPlan) -> GraphState:
    """Measure per plan: all Z in ascending id, then X ascending, then Y
    ascending. The order is part of the output contract (X picks its
    designated neighbor from the current graph)."""
    missing = [v for v in gs.adjacency if v not in plan.assignment]
    if missing:
        raise ValueError(f"plan does not cover vertices {missing[:8]}")
    extra = [v for v in plan.assignment if v not in gs.adjacency]
    if extra:
        raise ValueError(f"plan assigns absent vertices {extra[:8]}")
    out = gs.copy()
    for basis, op in (("Z", out.measure_z), ("X", out.measure_x), ("Y", out.measure_y)):
        for v in sorted(v for v, b in plan.assignment.items() if b == basis):
            op(v)
    out.junctions = dict(plan.junctions)
    return out


def verify_target(gs_out: GraphState, L: int) -> bool:
    """True iff gs_out is exactly the brick-wall hexagonal lattice under
    the junction correspondence attached by apply_plan."""
    if gs_out.junctions is None:
        raise ValueError("graph state carries no junction correspondence")
    target = hexagonal_target(L)
    sites = target.sites()
    if set(gs_out.junctions) != set(sites):
        return False
    ids = [gs_out.junctions[s] for s in sites]
    if len(set(ids)) != len(ids) or set(gs_out.adjacency) != set(ids):
        return False
    want = {
        (min(gs_out.junctions[a], gs_out.junctions[b]), max(gs_out.junctions[a], gs_out.junctions[b]))
        for a, b in target.edges()
    }
    have = {
        (v, w)
        for v, nbrs in gs_out.adjacency.items()
        for w in nbrs
        if v < w
    }
    return have == want
