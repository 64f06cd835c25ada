"""Block renormalization of lattice percolation into an L x L superlattice.

A scheme tiles the underlying region into L^2 disjoint blocks. A block
renormalizes to an occupied site when it contains a cluster crossing the
required axes; the designated cluster is the largest crossing cluster
(ties to the smallest cluster label). Neighbor blocks are joined by a
renormalized bond when their designated clusters are connected:

* overlapping-cubic: connected within the union of the two blocks. Block
  components are glued along open boundary bonds, which yields exactly the
  components of the union region.
* disjoint-face-connected: some single open bond through the common face
  joins the two designated clusters directly.

The cubic scheme uses (2k)^3-vertex blocks, the diamond scheme k^3-cell
blocks with matching third extent, so the underlying regions are
(2kL, 2kL, 2k) vertices and (kL, kL, k) cells respectively.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .lattice import BlockSpec, LatticeGraph, LatticeKind, build_block
from .percolation import (
    Configuration,
    PercolationParams,
    _edge_cols,
    crossing_clusters,
    label_clusters,
    sample,
)
from .rng import RngSpec, uniforms


class OverlapMode(str, Enum):
    OVERLAPPING_CUBIC = "overlapping-cubic"
    DISJOINT_FACE_CONNECTED = "disjoint-face-connected"


_DEFAULT_OVERLAP = {
    LatticeKind.CUBIC: OverlapMode.OVERLAPPING_CUBIC,
    LatticeKind.DIAMOND: OverlapMode.DISJOINT_FACE_CONNECTED,
}

_UNIT_SCALE = {LatticeKind.CUBIC: 1, LatticeKind.DIAMOND: 4}


@dataclass(frozen=True)
class RenormScheme:
    """Parameters of one renormalization experiment."""

    kind: LatticeKind
    L: int
    k: int
    params: PercolationParams
    overlap: Optional[OverlapMode] = None
    axes: tuple[int, ...] = (0, 1)

    def __post_init__(self) -> None:
        if self.kind not in _UNIT_SCALE:
            raise ValueError(f"renormalization is defined on cubic and diamond, not {self.kind.value}")
        if self.L < 1 or self.k < 1:
            raise ValueError("L and k must be positive")
        if self.overlap is None:
            object.__setattr__(self, "overlap", _DEFAULT_OVERLAP[self.kind])
        if (
            self.overlap == OverlapMode.OVERLAPPING_CUBIC
            and self.kind != LatticeKind.CUBIC
        ):
            raise ValueError("overlapping blocks are defined on the cubic lattice only")
        axes = tuple(sorted(set(int(a) for a in self.axes)))
        if not axes or any(a not in (0, 1, 2) for a in axes):
            raise ValueError("axes must be a non-empty subset of {0, 1, 2}")
        object.__setattr__(self, "axes", axes)

    @property
    def block_units(self) -> int:
        """Block side in lattice units (vertices for cubic, cells for diamond)."""
        return 2 * self.k if self.overlap == OverlapMode.OVERLAPPING_CUBIC else self.k

    @property
    def region_extent(self) -> tuple[int, int, int]:
        s = self.block_units
        return (s * self.L, s * self.L, s)

    def block_spec(self, bx: int, by: int) -> BlockSpec:
        if not (0 <= bx < self.L and 0 <= by < self.L):
            raise ValueError("block index out of range")
        s = self.block_units
        return BlockSpec((bx * s, by * s, 0), (s, s, s), block_size_k=self.k)


def underlying_graph(scheme: RenormScheme) -> LatticeGraph:
    return build_block(scheme.kind, scheme.region_extent)


@dataclass
class _Tables:
    """Flat per-block and per-bond index tables consumed by the trial kernel."""

    n_vertices: int
    n_edges: int
    n_blocks: int
    n_bonds: int
    v_par: np.ndarray  # int64, block-major parent vertex ids
    v_off: np.ndarray
    e_lu: np.ndarray  # int32 block-local edge endpoints
    e_lv: np.ndarray
    e_par: np.ndarray  # int64 parent edge ids
    e_off: np.ndarray
    fmask: np.ndarray  # uint8 per entry of v_par
    need: int
    b_pe: np.ndarray  # int64 boundary parent edge ids, bond-major
    b_lu: np.ndarray  # int32 local endpoint index in block a
    b_lv: np.ndarray
    b_off: np.ndarray
    b_blka: np.ndarray  # int32 block index per bond
    b_blkb: np.ndarray
    bond_rule: int


def _bond_index(L: int, direction: int, bx: int, by: int) -> int:
    # east bonds (bx,by)-(bx+1,by) first, then north bonds (bx,by)-(bx,by+1)
    if direction == 0:
        return bx * L + by
    return L * (L - 1) + bx * (L - 1) + by


@lru_cache(maxsize=3)
def _tables_cached(
    kind: LatticeKind, L: int, k: int, overlap: OverlapMode, axes: tuple[int, ...]
) -> _Tables:
    scheme = RenormScheme(kind, L, k, PercolationParams(), overlap, axes)
    graph = underlying_graph(scheme)
    coords = graph.coords
    unit = _UNIT_SCALE[kind]
    w = unit * scheme.block_units  # block width in coordinate steps
    n_blocks = L * L
    nv, ne = graph.n_vertices, graph.n_edges

    bxy = coords[:, :2] // w
    blk = bxy[:, 0] * L + bxy[:, 1]

    order = np.argsort(blk, kind="stable").astype(np.int64)
    counts = np.bincount(blk, minlength=n_blocks)
    if not (counts == counts[0]).all():
        raise AssertionError("blocks must partition the region evenly")
    v_off = np.zeros(n_blocks + 1, dtype=np.int64)
    np.cumsum(counts, out=v_off[1:])
    vloc = np.empty(nv, dtype=np.int64)
    vloc[order] = np.arange(nv, dtype=np.int64) - np.repeat(v_off[:-1], counts)

    eu, ev = _edge_cols(graph)
    internal = blk[eu] == blk[ev]
    ie = np.nonzero(internal)[0].astype(np.int64)
    gorder = np.argsort(blk[eu[ie]], kind="stable")
    e_par = ie[gorder]
    e_lu = vloc[eu[e_par]].astype(np.int32)
    e_lv = vloc[ev[e_par]].astype(np.int32)
    e_off = np.zeros(n_blocks + 1, dtype=np.int64)
    np.cumsum(np.bincount(blk[eu[ie]], minlength=n_blocks), out=e_off[1:])

    # boundary bonds between lexicographically adjacent blocks; diagonal
    # block crossings take part in no renormalized bond
    n_bonds = 2 * L * (L - 1)
    be = np.nonzero(~internal)[0].astype(np.int64)
    u = eu[be]
    v = ev[be]
    swap = (bxy[u, 0] > bxy[v, 0]) | (
        (bxy[u, 0] == bxy[v, 0]) & (bxy[u, 1] > bxy[v, 1])
    )
    a_end = np.where(swap, v, u)
    b_end = np.where(swap, u, v)
    dbx = bxy[b_end, 0] - bxy[a_end, 0]
    dby = bxy[b_end, 1] - bxy[a_end, 1]
    east = (dbx == 1) & (dby == 0)
    north = (dbx == 0) & (dby == 1)
    keep = east | north
    be, a_end, b_end = be[keep], a_end[keep], b_end[keep]
    bond_id = np.where(
        east[keep],
        bxy[a_end, 0] * L + bxy[a_end, 1],
        L * (L - 1) + bxy[a_end, 0] * (L - 1) + bxy[a_end, 1],
    )
    border = np.lexsort((be, bond_id))
    b_pe = be[border]
    b_lu = vloc[a_end[border]].astype(np.int32)
    b_lv = vloc[b_end[border]].astype(np.int32)
    b_off = np.zeros(n_bonds + 1, dtype=np.int64)
    if n_bonds:
        np.cumsum(np.bincount(bond_id, minlength=n_bonds), out=b_off[1:])
    b_blka = np.empty(n_bonds, dtype=np.int32)
    b_blkb = np.empty(n_bonds, dtype=np.int32)
    for bx in range(L - 1):
        for by in range(L):
            i = _bond_index(L, 0, bx, by)
            b_blka[i] = bx * L + by
            b_blkb[i] = (bx + 1) * L + by
    for bx in range(L):
        for by in range(L - 1):
            i = _bond_index(L, 1, bx, by)
            b_blka[i] = bx * L + by
            b_blkb[i] = bx * L + by + 1

    # per-vertex face bits relative to the enclosing block
    fmask_global = np.zeros(nv, dtype=np.uint8)
    for axis in (0, 1):
        r = coords[:, axis] - bxy[:, axis] * w
        fmask_global[r == 0] |= 1 << (2 * axis)
        fmask_global[r == w - 1] |= 2 << (2 * axis)
    w2 = unit * scheme.block_units  # third extent equals the block side
    fmask_global[coords[:, 2] == 0] |= 1 << 4
    fmask_global[coords[:, 2] == w2 - 1] |= 2 << 4
    need = 0
    for axis in axes:
        need |= 3 << (2 * axis)

    bond_rule = 1 if overlap == OverlapMode.OVERLAPPING_CUBIC else 0
    return _Tables(
        n_vertices=nv,
        n_edges=ne,
        n_blocks=n_blocks,
        n_bonds=n_bonds,
        v_par=order,
        v_off=v_off,
        e_lu=e_lu,
        e_lv=e_lv,
        e_par=e_par,
        e_off=e_off,
        fmask=fmask_global[order],
        need=need,
        b_pe=b_pe,
        b_lu=b_lu,
        b_lv=b_lv,
        b_off=b_off,
        b_blka=b_blka,
        b_blkb=b_blkb,
        bond_rule=bond_rule,
    )


def _tables_for(scheme: RenormScheme) -> _Tables:
    return _tables_cached(scheme.kind, scheme.L, scheme.k, scheme.overlap, scheme.axes)


class _TrialBuffers:
    def __init__(self, tab: _Tables) -> None:
        self.occupied = np.empty(tab.n_blocks, dtype=np.uint8)
        self.designated = np.empty(tab.n_blocks, dtype=np.int64)
        self.bond_ok = np.empty(tab.n_bonds, dtype=np.uint8)
        self.bond_witness = np.empty(tab.n_bonds, dtype=np.int64)
        self.labels = np.empty(len(tab.v_par), dtype=np.int64)
        self._const: dict[tuple[str, int], np.ndarray] = {}

    def const(self, value: float, n: int) -> np.ndarray:
        key = (repr(value), n)
        arr = self._const.get(key)
        if arr is None:
            arr = np.full(n, value, dtype=np.float64)
            self._const[key] = arr
        return arr


def _trial_uniforms(
    buffers: _TrialBuffers, tab: _Tables, params: PercolationParams, spec: RngSpec
) -> tuple[np.ndarray, np.ndarray]:
    # degenerate probabilities skip generation; 0.0 compares open for p >= 1
    # and 1.0 compares closed for p <= 0, matching percolation.sample exactly
    if 0.0 < params.p_site < 1.0:
        u_site = uniforms(spec, 0, tab.n_vertices)
    else:
        u_site = buffers.const(0.0 if params.p_site >= 1.0 else 1.0, tab.n_vertices)
    if 0.0 < params.p_bond < 1.0:
        u_bond = uniforms(spec, tab.n_vertices, tab.n_edges)
    else:
        u_bond = buffers.const(0.0 if params.p_bond >= 1.0 else 1.0, tab.n_edges)
    return u_site, u_bond


def _run_trial(
    tab: _Tables,
    params: PercolationParams,
    spec: RngSpec,
    buffers: _TrialBuffers,
    early_exit: int,
) -> int:
    u_site, u_bond = _trial_uniforms(buffers, tab, params, spec)
    return _kernels.renorm_trial(
        tab.n_blocks,
        tab.v_par,
        tab.v_off,
        tab.e_lu,
        tab.e_lv,
        tab.e_par,
        tab.e_off,
        tab.fmask,
        tab.need,
        tab.n_bonds,
        tab.b_pe,
        tab.b_lu,
        tab.b_lv,
        tab.b_off,
        tab.b_blka,
        tab.b_blkb,
        u_site,
        u_bond,
        params.p_site,
        params.p_bond,
        tab.bond_rule,
        early_exit,
        buffers.occupied,
        buffers.designated,
        buffers.bond_ok,
        buffers.bond_witness,
        buffers.labels,
    )


@dataclass
class RenormalizedLattice:
    """One renormalized sample with provenance.

    site_occupied[x, y] is block (x, y); bond_east[x, y] joins (x, y) to
    (x+1, y) and bond_north[x, y] joins (x, y) to (x, y+1). designated
    holds the designated crossing-cluster label per block (-1 when
    unoccupied); crossing_labels lists all crossing-cluster labels.
    block_labels maps every region vertex to the label of its cluster
    within its own block (-1 closed). Bond witnesses record the open
    boundary bond (disjoint rule) or the smallest glued component label
    (overlapping rule), -1 for absent bonds.
    """

    scheme: RenormScheme
    site_occupied: np.ndarray
    bond_east: np.ndarray
    bond_north: np.ndarray
    designated: np.ndarray
    crossing_labels: list[list[int]]
    bond_witness_east: np.ndarray
    bond_witness_north: np.ndarray
    config: Optional[Configuration] = None
    block_labels: Optional[np.ndarray] = None

    def is_full(self) -> bool:
        return bool(
            self.site_occupied.all()
            and self.bond_east.all()
            and self.bond_north.all()
        )

    def bond_present(self, a: tuple[int, int], b: tuple[int, int]) -> bool:
        (x1, y1), (x2, y2) = sorted((tuple(a), tuple(b)))
        if (x2 - x1, y2 - y1) == (1, 0):
            return bool(self.bond_east[x1, y1])
        if (x2 - x1, y2 - y1) == (0, 1):
            return bool(self.bond_north[x1, y1])
        raise ValueError(f"{a} and {b} are not superlattice neighbors")

    def missing(self) -> tuple[list[tuple[int, int]], list[tuple]]:
        """(unoccupied sites, absent neighbor bonds) for reporting."""
        L = self.scheme.L
        sites = [
            (x, y) for x in range(L) for y in range(L) if not self.site_occupied[x, y]
        ]
        bonds = []
        for x in range(L - 1):
            for y in range(L):
                if not self.bond_east[x, y]:
                    bonds.append(((x, y), (x + 1, y)))
        for x in range(L):
            for y in range(L - 1):
                if not self.bond_north[x, y]:
                    bonds.append(((x, y), (x, y + 1)))
        return sites, bonds

    def block_vertices(self, bx: int, by: int) -> np.ndarray:
        tab = _tables_for(self.scheme)
        b = bx * self.scheme.L + by
        return tab.v_par[tab.v_off[b] : tab.v_off[b + 1]]


def is_full(rl: RenormalizedLattice) -> bool:
    return rl.is_full()


def build_renormalized(scheme: RenormScheme, rng: RngSpec) -> RenormalizedLattice:
    """Draw one configuration on the underlying region and renormalize it."""
    tab = _tables_for(scheme)
    buffers = _TrialBuffers(tab)
    _run_trial(tab, scheme.params, rng, buffers, early_exit=0)
    L = scheme.L

    graph = underlying_graph(scheme)
    cfg = sample(graph, scheme.params, rng)
    block_labels = np.empty(tab.n_vertices, dtype=np.int64)
    block_labels[tab.v_par] = buffers.labels

    # all crossing labels per block, not just the designated one
    crossing: list[list[int]] = []
    fmask = tab.fmask
    need = tab.need
    for b in range(tab.n_blocks):
        s, t = tab.v_off[b], tab.v_off[b + 1]
        labs = buffers.labels[s:t]
        ok = labs >= 0
        uniq, inv = np.unique(labs[ok], return_inverse=True)
        if len(uniq) == 0:
            crossing.append([])
            continue
        acc = np.zeros(len(uniq), dtype=np.int64)
        np.bitwise_or.at(acc, inv, fmask[s:t][ok].astype(np.int64))
        crossing.append(uniq[(acc & need) == need].tolist())

    occ = buffers.occupied.reshape(L, L).astype(bool).copy()
    desig = buffers.designated.reshape(L, L).copy()
    n_e = L * (L - 1)
    bond_ok = buffers.bond_ok.astype(bool)
    return RenormalizedLattice(
        scheme=scheme,
        site_occupied=occ,
        bond_east=bond_ok[:n_e].reshape(L - 1, L).copy() if L > 1 else np.zeros((0, L), dtype=bool),
        bond_north=bond_ok[n_e:].reshape(L, L - 1).copy() if L > 1 else np.zeros((L, 0), dtype=bool),
        designated=desig,
        crossing_labels=crossing,
        bond_witness_east=buffers.bond_witness[:n_e].reshape(L - 1, L).copy()
        if L > 1
        else np.zeros((0, L), dtype=np.int64),
        bond_witness_north=buffers.bond_witness[n_e:].reshape(L, L - 1).copy()
        if L > 1
        else np.zeros((L, 0), dtype=np.int64),
        config=cfg,
        block_labels=block_labels,
    )


@dataclass(frozen=True)
class PEstimate:
    estimate: float
    stderr: float
    trials: int
    successes: int
    aborted: bool = False


def _estimate_chunk(args) -> int:
    scheme, rng, t0, t1 = args
    tab = _tables_for(scheme)
    buffers = _TrialBuffers(tab)
    successes = 0
    for t in range(t0, t1):
        successes += _run_trial(
            tab, scheme.params, rng.with_stream(rng.stream_id + t), buffers, 1
        )
    return successes


def _run_trial_range(
    scheme: RenormScheme, rng: RngSpec, t0: int, t1: int, workers: int
) -> int:
    n = t1 - t0
    workers = max(1, min(int(workers), n))
    if workers == 1:
        return _estimate_chunk((scheme, rng, t0, t1))
    step = (n + workers - 1) // workers
    jobs = [(scheme, rng, a, min(a + step, t1)) for a in range(t0, t1, step)]
    with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
        return sum(pool.map(_estimate_chunk, jobs))


def estimate_P(
    scheme: RenormScheme, trials: int, rng: RngSpec, workers: int = 1
) -> PEstimate:
    """Bernoulli estimate of is_full over independent samples.

    Trial t reads stream rng.stream_id + t; results are independent of
    worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    successes = _run_trial_range(scheme, rng, 0, trials, workers)
    p = successes / trials
    se = math.sqrt(p * (1.0 - p) / trials)
    return PEstimate(p, se, trials, successes)


@dataclass(frozen=True)
class ScanRow:
    L: int
    k: int
    estimate: float
    stderr: float
    trials: int
    aborted: bool


@dataclass(frozen=True)
class PrescreenRow:
    L: int
    k: int
    block_estimate: float
    stderr: float
    trials: int


@dataclass
class MinBlockResult:
    L: int
    k: Optional[int]  # None when the threshold is unreachable within k_max
    rows: list[ScanRow]
    prescreened: list[PrescreenRow]


@dataclass
class ScalingResult:
    threshold: float
    per_L: list[MinBlockResult]

    def min_k(self) -> dict[int, Optional[int]]:
        return {r.L: r.k for r in self.per_L}


def _scheme_block_graph(scheme: RenormScheme) -> LatticeGraph:
    s = scheme.block_units
    return build_block(scheme.kind, (s, s, s))


def _single_block_estimate(
    graph: LatticeGraph,
    params: PercolationParams,
    trials: int,
    rng: RngSpec,
    axes: Sequence[int],
) -> tuple[float, float]:
    successes = 0
    for t in range(trials):
        cfg = sample(graph, params, rng.with_stream(rng.stream_id + t))
        lab = label_clusters(cfg)
        if len(crossing_clusters(lab, axes)):
            successes += 1
    p = successes / trials
    return p, math.sqrt(p * (1.0 - p) / trials)


_BATCH = 64


def min_block_size(
    kind: LatticeKind,
    params: PercolationParams,
    L: int,
    P_threshold: float,
    trials: int,
    k_max: int,
    rng: RngSpec,
    k_min: int = 1,
    overlap: Optional[OverlapMode] = None,
    axes: Sequence[int] = (0, 1),
    prescreen: bool = True,
    prescreen_trials: int = 400,
    early_stop: bool = True,
    workers: int = 1,
) -> MinBlockResult:
    """Smallest k <= k_max with estimate_P >= P_threshold, scanning k ascending.

    Two sound shortcuts keep hopeless k cheap, both only ever skipping k
    values whose estimate would fall below the threshold:

    * prescreen: P(full) <= P(single block crosses); when the single-block
      estimate sits 3 standard errors below the threshold the k is skipped.
    * early_stop: a run aborts once the remaining trials cannot lift the
      success count to threshold * trials.

    Streams: k index j uses streams [j*(prescreen_trials+trials), ...) off
    the caller's stream_id, prescreen first.
    """
    if not 0.0 < P_threshold < 1.0:
        raise ValueError("P_threshold must lie strictly between 0 and 1")
    if k_max < k_min or k_min < 1:
        raise ValueError("need 1 <= k_min <= k_max")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    span = prescreen_trials + trials
    rows: list[ScanRow] = []
    pres: list[PrescreenRow] = []
    found: Optional[int] = None
    for j, k in enumerate(range(k_min, k_max + 1)):
        base = rng.with_stream(rng.stream_id + j * span)
        scheme = RenormScheme(kind, L, k, params, overlap, tuple(axes))
        if prescreen and L > 1 and prescreen_trials > 0:
            q, qse = _single_block_estimate(
                _scheme_block_graph(scheme), params, prescreen_trials, base, scheme.axes
            )
            pres.append(PrescreenRow(L, k, q, qse, prescreen_trials))
            if q + 3.0 * qse < P_threshold:
                continue
        est_rng = base.with_stream(base.stream_id + prescreen_trials)
        needed = math.ceil(P_threshold * trials - 1e-9)
        successes = 0
        done = 0
        aborted = False
        while done < trials:
            t1 = min(done + _BATCH, trials)
            successes += _run_trial_range(scheme, est_rng, done, t1, workers)
            done = t1
            if early_stop and successes + (trials - done) < needed:
                aborted = True
                break
        p = successes / done
        rows.append(ScanRow(L, k, p, math.sqrt(p * (1.0 - p) / done), done, aborted))
        if not aborted and p >= P_threshold:
            found = k
            break
    return MinBlockResult(L, found, rows, pres)


def scaling_scan(
    kind: LatticeKind,
    params: PercolationParams,
    L_values: Sequence[int],
    P_threshold: float,
    trials: int,
    k_max: int,
    rng: RngSpec,
    **kwargs,
) -> ScalingResult:
    """min_block_size per L. L index i offsets streams by
    i * (k_max - k_min + 1) * (prescreen_trials + trials)."""
    k_min = kwargs.get("k_min", 1)
    prescreen_trials = kwargs.get("prescreen_trials", 400)
    span = (k_max - k_min + 1) * (prescreen_trials + trials)
    out = []
    for i, L in enumerate(L_values):
        base = rng.with_stream(rng.stream_id + i * span)
        out.append(
            min_block_size(kind, params, L, P_threshold, trials, k_max, base, **kwargs)
        )
    return ScalingResult(P_threshold, out)


@dataclass(frozen=True)
class BoundConstants:
    """User-supplied constants of the analytic lower bound; the source
    proof only asserts their existence."""

    a: float
    c: float
    d: float
    epsilon: float = 0.5
    k0: int = 1

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.c > 0 and self.d > 0 and self.epsilon > 0):
            raise ValueError("a, c, d and epsilon must be positive")
        if self.k0 < 1:
            raise ValueError("k0 must be a positive integer")


@dataclass(frozen=True)
class BoundResult:
    full: float
    simplified: float


def _log_term(x: float) -> float:
    # log(1 - x) for x in [0, 1); -inf collapses the bound to 0
    if x >= 1.0:
        return -math.inf
    return math.log1p(-x)


def evaluate_lower_bound(L: int, k: float, constants: BoundConstants) -> BoundResult:
    """Analytic lower bound on the probability of a full L x L lattice.

    Full form: (1 - e^{-d k^2})^(2L^2 - L)
               * ((1 - (2k)^6 a e^{-ck})^2 (1 - (4k)^6 a e^{-2ck}))^(L(L-1)).
    Simplified form: (1 - (2k)^6 a e^{-ck})^(5 L^2). Both evaluated in log
    space and clamped to [0, 1]; k may be fractional (k = L^epsilon use).
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if k < constants.k0:
        raise ValueError(f"bound is valid for k >= k0 = {constants.k0}")
    a, c, d = constants.a, constants.c, constants.d
    t_cross = _log_term(math.exp(-d * k * k))
    t_uniq1 = _log_term((2 * k) ** 6 * a * math.exp(-c * k))
    t_uniq2 = _log_term((4 * k) ** 6 * a * math.exp(-2 * c * k))

    def power(log_term: float, exponent: float) -> float:
        if exponent == 0:
            return 0.0
        return exponent * log_term

    ln_full = power(t_cross, 2 * L * L - L) + power(2 * t_uniq1 + t_uniq2, L * (L - 1))
    ln_simple = power(t_uniq1, 5 * L * L)

    def clamp(ln_p: float) -> float:
        if ln_p == -math.inf:
            return 0.0
        return min(1.0, math.exp(min(ln_p, 0.0)))

    return BoundResult(clamp(ln_full), clamp(ln_simple))


def bound_block_size(L: int, constants: BoundConstants) -> float:
    """The k = L^epsilon block-size rule used in the limit statement."""
    return float(L) ** constants.epsilon
