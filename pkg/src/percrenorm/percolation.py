"""Percolation sampling, cluster labeling and crossing statistics.

Random elements are indexed deterministically per configuration: site
uniforms occupy stream elements [0, V), bond uniforms [V, V+E), loss
uniforms [V+E, V+E+V). An element is open iff its uniform is strictly
below the corresponding probability, so raising a probability with the
same stream never closes anything (monotone coupling), and trials are
reproducible regardless of scheduling.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .lattice import LatticeGraph, LatticeKind, build_block, face
from .rng import RngSpec, uniforms


class Model(str, Enum):
    BOND = "bond"
    SITE = "site"
    MIXED = "mixed"


@dataclass(frozen=True)
class PercolationParams:
    """Open probabilities for sites and bonds plus the model tag.

    The pure models pin the unused probability to 1; inconsistent
    combinations are rejected.
    """

    p_site: float = 1.0
    p_bond: float = 1.0
    model: Model = Model.MIXED

    def __post_init__(self) -> None:
        for name, p in (("p_site", self.p_site), ("p_bond", self.p_bond)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p!r}")
        if self.model == Model.BOND and self.p_site != 1.0:
            raise ValueError("bond model forces p_site = 1")
        if self.model == Model.SITE and self.p_bond != 1.0:
            raise ValueError("site model forces p_bond = 1")

    @classmethod
    def bond(cls, p: float) -> "PercolationParams":
        return cls(1.0, float(p), Model.BOND)

    @classmethod
    def site(cls, p: float) -> "PercolationParams":
        return cls(float(p), 1.0, Model.SITE)

    @classmethod
    def mixed(cls, p_site: float, p_bond: float) -> "PercolationParams":
        return cls(float(p_site), float(p_bond), Model.MIXED)


@dataclass
class Configuration:
    """One sampled configuration on a lattice graph."""

    graph: LatticeGraph
    open_sites: np.ndarray  # bool[V]
    open_bonds: np.ndarray  # bool[E]

    def validate(self) -> None:
        if self.open_sites.shape != (self.graph.n_vertices,):
            raise ValueError("open_sites length does not match graph")
        if self.open_bonds.shape != (self.graph.n_edges,):
            raise ValueError("open_bonds length does not match graph")

    @property
    def n_open_sites(self) -> int:
        return int(self.open_sites.sum())

    @property
    def n_open_bonds(self) -> int:
        return int(self.open_bonds.sum())

    def effective_bonds(self) -> np.ndarray:
        """Bonds that are open and have both endpoints open."""
        eu, ev = _edge_cols(self.graph)
        return self.open_bonds & self.open_sites[eu] & self.open_sites[ev]

    def dumps(self) -> str:
        """Hex bitset dump. Bit i of a set is bit (i % 8) of byte (i // 8)."""
        sites_hex = np.packbits(self.open_sites, bitorder="little").tobytes().hex()
        bonds_hex = np.packbits(self.open_bonds, bitorder="little").tobytes().hex()
        return (
            f"configuration sites {self.graph.n_vertices} bonds {self.graph.n_edges}\n"
            f"sites {sites_hex}\n"
            f"bonds {bonds_hex}\n"
        )

    @classmethod
    def loads(cls, text: str, graph: LatticeGraph) -> "Configuration":
        lines = text.strip().splitlines()
        if len(lines) != 3:
            raise ValueError("configuration dump must have three lines")
        head = lines[0].split()
        if len(head) != 5 or head[0] != "configuration":
            raise ValueError(f"malformed header: {lines[0]!r}")
        nv, ne = int(head[2]), int(head[4])
        if nv != graph.n_vertices or ne != graph.n_edges:
            raise ValueError("dump does not match graph shape")

        def unpack(line: str, tag: str, count: int) -> np.ndarray:
            name, hexstr = line.split()
            if name != tag:
                raise ValueError(f"expected {tag} line, got {name!r}")
            raw = np.frombuffer(bytes.fromhex(hexstr), dtype=np.uint8)
            bits = np.unpackbits(raw, bitorder="little")[:count]
            return bits.astype(bool)

        return cls(graph, unpack(lines[1], "sites", nv), unpack(lines[2], "bonds", ne))


def _edge_cols(graph: LatticeGraph) -> tuple[np.ndarray, np.ndarray]:
    cols = getattr(graph, "_edge_cols", None)
    if cols is None:
        cols = (
            np.ascontiguousarray(graph.edges[:, 0]),
            np.ascontiguousarray(graph.edges[:, 1]),
        )
        graph._edge_cols = cols
    return cols


def _threshold_mask(spec: RngSpec, start: int, count: int, p: float) -> np.ndarray:
    # u < 1 always holds and u < 0 never does, so the degenerate cases skip
    # generation without changing the result.
    if p >= 1.0:
        return np.ones(count, dtype=bool)
    if p <= 0.0:
        return np.zeros(count, dtype=bool)
    return uniforms(spec, start, count) < p


def sample(
    graph: LatticeGraph, params: PercolationParams, rng: RngSpec
) -> Configuration:
    """Draw one configuration; bit-identical for identical inputs."""
    nv, ne = graph.n_vertices, graph.n_edges
    open_sites = _threshold_mask(rng, 0, nv, params.p_site)
    open_bonds = _threshold_mask(rng, nv, ne, params.p_bond)
    return Configuration(graph, open_sites, open_bonds)


def close_lost_sites(
    cfg: Configuration, p_loss: float, rng: RngSpec, radius: int = 1
) -> tuple[Configuration, np.ndarray]:
    """Heralded loss: mark lost sites, close them and their neighborhood.

    Loss uniforms are elements [V+E, V+E+V) of the stream. Every site
    within graph distance ``radius`` of a lost site is closed (measured
    out), regardless of bond occupation. Returns the new configuration
    and the lost-site mask.
    """
    if not 0.0 <= p_loss <= 1.0:
        raise ValueError("p_loss must lie in [0, 1]")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    graph = cfg.graph
    nv, ne = graph.n_vertices, graph.n_edges
    lost = _threshold_mask(rng, nv + ne, nv, p_loss)
    closed = lost.copy()
    eu, ev = _edge_cols(graph)
    for _ in range(radius):
        grown = closed.copy()
        grown[ev[closed[eu]]] = True
        grown[eu[closed[ev]]] = True
        if (grown == closed).all():
            break
        closed = grown
    return (
        Configuration(graph, cfg.open_sites & ~closed, cfg.open_bonds.copy()),
        lost,
    )


@dataclass
class ClusterLabeling:
    """Cluster labels: label of a cluster is its smallest open vertex id."""

    graph: LatticeGraph
    labels: np.ndarray  # int64[V], -1 for closed sites

    def cluster_sizes(self) -> dict[int, int]:
        ids, counts = np.unique(self.labels[self.labels >= 0], return_counts=True)
        return dict(zip(ids.tolist(), counts.tolist()))

    def labels_on_face(self, axis: int, side: str) -> np.ndarray:
        ids = face(self.graph, axis, side).vertex_ids
        labs = self.labels[ids]
        return np.unique(labs[labs >= 0])


def label_clusters(cfg: Configuration) -> ClusterLabeling:
    """Union-find labeling of the open subgraph (near-linear in open bonds)."""
    cfg.validate()
    eu, ev = _edge_cols(cfg.graph)
    labels = _kernels.label_min(
        cfg.graph.n_vertices,
        eu,
        ev,
        np.ascontiguousarray(cfg.open_sites, dtype=np.uint8),
        np.ascontiguousarray(cfg.open_bonds, dtype=np.uint8),
    )
    return ClusterLabeling(cfg.graph, labels)


def crossing_clusters(
    labeling: ClusterLabeling, axes: Sequence[int] = (0, 1)
) -> np.ndarray:
    """Labels of clusters touching both opposite faces for every given axis."""
    out: Optional[np.ndarray] = None
    for axis in axes:
        both = np.intersect1d(
            labeling.labels_on_face(axis, "low"),
            labeling.labels_on_face(axis, "high"),
            assume_unique=True,
        )
        out = both if out is None else np.intersect1d(out, both, assume_unique=True)
    if out is None:
        raise ValueError("axes must be non-empty")
    return out


def count_crossing_clusters(labeling: ClusterLabeling, axis: int) -> int:
    return len(crossing_clusters(labeling, (axis,)))


def face_bitmask(graph: LatticeGraph, axes: Sequence[int]) -> tuple[np.ndarray, int]:
    """Per-vertex face bits (low face of axis a: bit 2a, high: bit 2a+1) and
    the bit pattern a crossing cluster must cover."""
    mask = np.zeros(graph.n_vertices, dtype=np.uint8)
    need = 0
    for axis in axes:
        mask[face(graph, axis, "low").vertex_ids] |= 1 << (2 * axis)
        mask[face(graph, axis, "high").vertex_ids] |= 2 << (2 * axis)
        need |= 3 << (2 * axis)
    return mask, need


def block_graph(kind: LatticeKind, k: int) -> LatticeGraph:
    """The size-k block of each kind: (2k)^3 vertices for cubic, k^3
    conventional cells for diamond, coverings of those for the covering
    kinds."""
    if k < 1:
        raise ValueError("k must be positive")
    if kind in (LatticeKind.CUBIC, LatticeKind.COVERING_CUBIC):
        return build_block(kind, 2 * k)
    return build_block(kind, k)


@dataclass(frozen=True)
class CrossingEstimate:
    estimate: float
    stderr: float
    trials: int
    successes: int


def _bernoulli(successes: int, trials: int) -> tuple[float, float]:
    p = successes / trials
    return p, float(np.sqrt(p * (1.0 - p) / trials))


def _crossing_chunk(args) -> int:
    kind, k, params, rng, t0, t1, axes, p_loss, radius = args
    graph = block_graph(kind, k)
    successes = 0
    for t in range(t0, t1):
        spec = rng.with_stream(rng.stream_id + t)
        cfg = sample(graph, params, spec)
        if p_loss > 0.0:
            cfg, _ = close_lost_sites(cfg, p_loss, spec, radius)
        lab = label_clusters(cfg)
        if len(crossing_clusters(lab, axes)):
            successes += 1
    return successes


def estimate_crossing_prob(
    kind: LatticeKind,
    k: int,
    params: PercolationParams,
    trials: int,
    rng: RngSpec,
    axes: Sequence[int] = (0, 1),
    p_loss: float = 0.0,
    loss_radius: int = 1,
    workers: int = 1,
) -> CrossingEstimate:
    """Bernoulli estimate of the block-crossing probability.

    Trial t reads stream rng.stream_id + t, so results do not depend on
    worker count or scheduling.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    axes = tuple(axes)
    chunks = _chunk_ranges(trials, workers)
    jobs = [
        (kind, k, params, rng, t0, t1, axes, float(p_loss), int(loss_radius))
        for t0, t1 in chunks
    ]
    if len(jobs) == 1:
        successes = _crossing_chunk(jobs[0])
    else:
        with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
            successes = sum(pool.map(_crossing_chunk, jobs))
    p, se = _bernoulli(successes, trials)
    return CrossingEstimate(p, se, trials, successes)


@dataclass(frozen=True)
class CrossingCurve:
    p_values: np.ndarray
    estimates: np.ndarray
    stderrs: np.ndarray
    trials: int


def _curve_chunk(args) -> np.ndarray:
    kind, k, params, rng, t0, t1, axes = args
    graph = block_graph(kind, k)
    eu, ev = _edge_cols(graph)
    fmask, need = face_bitmask(graph, axes)
    nv, ne = graph.n_vertices, graph.n_edges
    crit = np.empty(t1 - t0, dtype=np.float64)
    for t in range(t0, t1):
        spec = rng.with_stream(rng.stream_id + t)
        open_sites = _threshold_mask(spec, 0, nv, params.p_site)
        u_bond = uniforms(spec, nv, ne)
        order = np.argsort(u_bond, kind="stable")
        crit[t - t0] = _kernels.bond_sweep(
            nv,
            eu,
            ev,
            u_bond,
            order,
            np.ascontiguousarray(open_sites, dtype=np.uint8),
            fmask,
            need,
        )
    return crit


def crossing_curve(
    kind: LatticeKind,
    k: int,
    params: PercolationParams,
    p_values: Sequence[float],
    trials: int,
    rng: RngSpec,
    axes: Sequence[int] = (0, 1),
    workers: int = 1,
) -> CrossingCurve:
    """Crossing probability versus p_bond from a single bond-insertion sweep
    per trial.

    Each trial yields the critical uniform at which crossing first appears;
    the curve point at p is the fraction of trials with critical uniform
    < p window, exactly matching per-p sampling with the same streams.
    Requires a bond or mixed model (p_site held fixed from params).
    """
    if params.model == Model.SITE:
        raise ValueError("crossing_curve sweeps p_bond; use a bond or mixed model")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    axes = tuple(axes)
    chunks = _chunk_ranges(trials, workers)
    jobs = [(kind, k, params, rng, t0, t1, axes) for t0, t1 in chunks]
    if len(jobs) == 1:
        crit = _curve_chunk(jobs[0])
    else:
        with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
            crit = np.concatenate(list(pool.map(_curve_chunk, jobs)))
    pv = np.asarray(list(p_values), dtype=np.float64)
    est = np.empty(len(pv))
    se = np.empty(len(pv))
    for i, p in enumerate(pv):
        est[i], se[i] = _bernoulli(int((crit < p).sum()), trials)
    return CrossingCurve(pv, est, se, trials)


def _chunk_ranges(trials: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(int(workers), trials))
    if workers == 1:
        return [(0, trials)]
    step = (trials + workers - 1) // workers
    return [(i, min(i + step, trials)) for i in range(0, trials, step)]
