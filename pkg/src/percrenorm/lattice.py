"""Lattice graphs: cubic and diamond blocks, covering lattices, faces, slicing.

Vertex and edge orderings are deterministic and documented per builder;
other modules rely on them for reproducible indexing of random elements.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

Side = str  # "low" or "high"

_SIDES = ("low", "high")


class LatticeKind(str, Enum):
    CUBIC = "cubic"
    DIAMOND = "diamond"
    COVERING_CUBIC = "covering-cubic"
    PYROCHLORE = "pyrochlore"

    @classmethod
    def parse(cls, token: str) -> "LatticeKind":
        for kind in cls:
            if kind.value == token:
                return kind
        raise ValueError(f"unknown lattice kind {token!r}")


# Conventional diamond cell with quadrupled integer coordinates: four sites
# on each fcc sublattice. A-sites have all-even coordinates, B-sites all-odd.
_DIAMOND_A = np.array([[0, 0, 0], [0, 2, 2], [2, 0, 2], [2, 2, 0]], dtype=np.int64)
_DIAMOND_B = np.array([[1, 1, 1], [1, 3, 3], [3, 1, 3], [3, 3, 1]], dtype=np.int64)
_DIAMOND_OFFSETS = np.concatenate([_DIAMOND_A, _DIAMOND_B])
# Displacements from an A-site to its four bonded B-sites.
_DIAMOND_STEPS = np.array(
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=np.int64
)


def _diamond_bond_table() -> list[tuple[int, int, np.ndarray, int]]:
    """(a_offset_index, step_index, cell_shift, b_offset_index) for all 16 bonds."""
    table = []
    for oa in range(4):
        for si in range(4):
            target = _DIAMOND_A[oa] + _DIAMOND_STEPS[si]
            shift = target // 4  # floor division, handles -1 -> shift -1, local 3
            local = target - 4 * shift
            matches = np.nonzero((_DIAMOND_B == local).all(axis=1))[0]
            assert len(matches) == 1
            table.append((oa, si, shift, int(matches[0])))
    return table


_DIAMOND_BONDS = _diamond_bond_table()


@dataclass(frozen=True)
class Face:
    axis: int
    side: Side
    vertex_ids: np.ndarray


@dataclass(frozen=True)
class BlockSpec:
    """Axis-aligned region in lattice units (vertices for cubic, cells for diamond)."""

    origin: tuple[int, int, int]
    extent: tuple[int, int, int]
    block_size_k: Optional[int] = None

    def __post_init__(self) -> None:
        if len(self.origin) != 3 or len(self.extent) != 3:
            raise ValueError("origin and extent must have three components")
        if any(e <= 0 for e in self.extent):
            raise ValueError("extent must be positive")
        if self.block_size_k is not None and self.block_size_k <= 0:
            raise ValueError("block_size_k must be positive")


class LatticeGraph:
    """Immutable finite lattice patch: coordinates, edges, faces.

    Attributes
    ----------
    kind : LatticeKind
    dims : tuple of int
        Extent in lattice units (vertices per axis for cubic, conventional
        cells per axis for diamond; inherited from the base for coverings).
    coords : (V, 3) int64 array or None
        Integer site coordinates. Diamond coordinates are quadrupled so all
        sites are integral; covering coordinates are the sums of the two
        base endpoints (doubled midpoints). None for graphs parsed from an
        edge list.
    edges : (E, 2) int64 array
        Each row (u, v) with u < v, in the builder's documented order.
    parent_vertex_ids, parent_edge_ids : int64 arrays or None
        Set on graphs produced by slice_block.
    """

    def __init__(
        self,
        kind: LatticeKind,
        dims: tuple[int, int, int],
        coords: Optional[np.ndarray],
        edges: np.ndarray,
        bounds_lo: Optional[np.ndarray] = None,
        bounds_hi: Optional[np.ndarray] = None,
        n_vertices: Optional[int] = None,
        face_sets: Optional[dict] = None,
        parent_vertex_ids: Optional[np.ndarray] = None,
        parent_edge_ids: Optional[np.ndarray] = None,
    ) -> None:
        self.kind = kind
        self.dims = tuple(int(d) for d in dims)
        self.coords = coords
        self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if n_vertices is None:
            if coords is None:
                raise ValueError("n_vertices required when coords are absent")
            n_vertices = len(coords)
        self._n_vertices = int(n_vertices)
        self.bounds_lo = bounds_lo
        self.bounds_hi = bounds_hi
        self.parent_vertex_ids = parent_vertex_ids
        self.parent_edge_ids = parent_edge_ids
        self._face_sets = face_sets
        self._csr: Optional[tuple[np.ndarray, np.ndarray, np.ndarray]] = None

    @property
    def n_vertices(self) -> int:
        return self._n_vertices

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n_vertices).astype(
            np.int64
        )

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Adjacency as (indptr, neighbor, edge_id), neighbors of v at indptr[v]:indptr[v+1]."""
        if self._csr is None:
            eu, ev = self.edges[:, 0], self.edges[:, 1]
            src = np.concatenate([eu, ev])
            dst = np.concatenate([ev, eu])
            eid = np.concatenate([np.arange(self.n_edges)] * 2).astype(np.int64)
            order = np.argsort(src, kind="stable")
            deg = np.bincount(src, minlength=self.n_vertices)
            indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            self._csr = (indptr, dst[order], eid[order])
        return self._csr

    def neighbors(self, v: int) -> np.ndarray:
        indptr, nbr, _ = self.csr()
        return nbr[indptr[v] : indptr[v + 1]]

    def face(self, axis: int, side: Side) -> Face:
        return face(self, axis, side)

    def __repr__(self) -> str:
        return (
            f"LatticeGraph({self.kind.value}, dims={self.dims}, "
            f"V={self.n_vertices}, E={self.n_edges})"
        )


def _as_extent(extent) -> tuple[int, int, int]:
    if isinstance(extent, (int, np.integer)):
        extent = (extent, extent, extent)
    extent = tuple(int(e) for e in extent)
    if len(extent) != 3 or any(e <= 0 for e in extent):
        raise ValueError("extent must be a positive int or triple")
    return extent


def _build_cubic(extent: tuple[int, int, int]) -> LatticeGraph:
    a, b, c = extent
    n = a * b * c
    ids = np.arange(n, dtype=np.int64)
    x, rem = np.divmod(ids, b * c)
    y, z = np.divmod(rem, c)
    coords = np.stack([x, y, z], axis=1)
    # Edges grouped by axis, ascending source id within each group.
    parts = []
    strides = (b * c, c, 1)
    limits = (a, b, c)
    comps = (x, y, z)
    for axis in range(3):
        src = ids[comps[axis] < limits[axis] - 1]
        parts.append(np.stack([src, src + strides[axis]], axis=1))
    edges = np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
    return LatticeGraph(
        LatticeKind.CUBIC,
        extent,
        coords,
        edges,
        bounds_lo=np.zeros(3, dtype=np.int64),
        bounds_hi=np.array(extent, dtype=np.int64) - 1,
    )


def _build_diamond(extent: tuple[int, int, int]) -> LatticeGraph:
    na, nb, nc = extent
    ncells = na * nb * nc
    cell_ids = np.arange(ncells, dtype=np.int64)
    ci, rem = np.divmod(cell_ids, nb * nc)
    cj, cl = np.divmod(rem, nc)
    base = 4 * np.stack([ci, cj, cl], axis=1)  # (ncells, 3)
    coords = (base[:, None, :] + _DIAMOND_OFFSETS[None, :, :]).reshape(-1, 3)

    cell_grid = np.stack([ci, cj, cl], axis=1)
    lim = np.array(extent, dtype=np.int64)
    parts = []
    # One edge family per (A-offset, step); each A-B bond appears exactly once.
    for oa, _si, shift, ob in _DIAMOND_BONDS:
        target = cell_grid + shift
        ok = ((target >= 0) & (target < lim)).all(axis=1)
        src_cell = cell_ids[ok]
        dst_cell = (target[ok, 0] * nb + target[ok, 1]) * nc + target[ok, 2]
        u = src_cell * 8 + oa
        v = dst_cell * 8 + 4 + ob
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        parts.append(np.stack([lo, hi], axis=1))
    edges = np.concatenate(parts)
    return LatticeGraph(
        LatticeKind.DIAMOND,
        extent,
        coords,
        edges,
        bounds_lo=np.zeros(3, dtype=np.int64),
        bounds_hi=4 * np.array(extent, dtype=np.int64) - 1,
    )


def build_block(kind: LatticeKind, extent) -> LatticeGraph:
    """Build a finite block of the given lattice kind.

    ``extent`` counts vertices per axis for cubic and conventional cells per
    axis for diamond. Covering kinds build the base block of the same extent
    and return its covering lattice.

    Vertex ordering: cubic id = (x*b + y)*c + z; diamond id = cell*8 + offset
    with cells in row-major order and the eight cell sites in the fixed
    offset order (four A-sites, then four B-sites). Edge ordering: cubic by
    axis then source id; diamond by bond family (A-offset, step) then cell.
    """
    extent = _as_extent(extent)
    if kind == LatticeKind.CUBIC:
        return _build_cubic(extent)
    if kind == LatticeKind.DIAMOND:
        return _build_diamond(extent)
    if kind == LatticeKind.COVERING_CUBIC:
        return covering_lattice(_build_cubic(extent))
    if kind == LatticeKind.PYROCHLORE:
        return covering_lattice(_build_diamond(extent))
    raise ValueError(f"unknown lattice kind {kind!r}")


_COVERING_OF = {
    LatticeKind.CUBIC: LatticeKind.COVERING_CUBIC,
    LatticeKind.DIAMOND: LatticeKind.PYROCHLORE,
}


def covering_lattice(graph: LatticeGraph) -> LatticeGraph:
    """Covering lattice: one vertex per edge of the base, adjacent iff the
    base edges share an endpoint.

    Covering vertex i corresponds to base edge i; its coordinates are the
    sum of the two base endpoint coordinates (the doubled midpoint). Faces
    are inherited: a covering vertex lies on a face iff its base edge has an
    endpoint on that face of the base. Edges are grouped by the shared base
    vertex, ascending, each group in lexicographic pair order.
    """
    if graph.n_edges < 1:
        raise ValueError("covering lattice requires at least one base edge")
    try:
        kind = _COVERING_OF[graph.kind]
    except KeyError:
        raise ValueError(f"covering of {graph.kind.value} is not supported") from None
    eu, ev = graph.edges[:, 0], graph.edges[:, 1]
    coords = None
    if graph.coords is not None:
        coords = graph.coords[eu] + graph.coords[ev]

    # Incident edge lists per base vertex, each sorted ascending.
    src = np.concatenate([eu, ev])
    eid = np.concatenate([np.arange(graph.n_edges, dtype=np.int64)] * 2)
    order = np.lexsort((eid, src))
    sorted_src = src[order]
    sorted_eid = eid[order]
    starts = np.searchsorted(sorted_src, np.arange(graph.n_vertices + 1))
    parts = []
    for v in range(graph.n_vertices):
        inc = sorted_eid[starts[v] : starts[v + 1]]
        d = len(inc)
        if d < 2:
            continue
        iu, iv = np.triu_indices(d, k=1)
        parts.append(np.stack([inc[iu], inc[iv]], axis=1))
    edges = (
        np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
    )

    face_sets = {}
    for axis in range(3):
        for side in _SIDES:
            base_face = face(graph, axis, side)
            mask = np.zeros(graph.n_vertices, dtype=bool)
            mask[base_face.vertex_ids] = True
            face_sets[(axis, side)] = np.nonzero(mask[eu] | mask[ev])[0].astype(
                np.int64
            )

    bounds_lo = bounds_hi = None
    if graph.bounds_lo is not None:
        bounds_lo = 2 * graph.bounds_lo
        bounds_hi = 2 * graph.bounds_hi
    return LatticeGraph(
        kind,
        graph.dims,
        coords,
        edges,
        bounds_lo=bounds_lo,
        bounds_hi=bounds_hi,
        n_vertices=graph.n_edges,
        face_sets=face_sets,
    )


def face(graph: LatticeGraph, axis: int, side: Side) -> Face:
    """Vertices on the given face of the block.

    For cubic and diamond this is the extremal-coordinate test against the
    region bounds. For diamond that is equivalent to having a nearest
    neighbor beyond the face in the infinite lattice, since both sublattices
    step +1 and -1 along every axis. Covering kinds carry face sets from
    their base: a covering vertex is on a face iff its base edge touches it.
    """
    if axis not in (0, 1, 2):
        raise ValueError("axis must be 0, 1 or 2")
    if side not in _SIDES:
        raise ValueError("side must be 'low' or 'high'")
    if graph._face_sets is not None:
        return Face(axis, side, graph._face_sets[(axis, side)])
    if graph.coords is None or graph.bounds_lo is None:
        raise ValueError("graph carries no geometry; faces unavailable")
    bound = graph.bounds_lo[axis] if side == "low" else graph.bounds_hi[axis]
    ids = np.nonzero(graph.coords[:, axis] == bound)[0].astype(np.int64)
    return Face(axis, side, ids)


_SLICE_SCALE = {LatticeKind.CUBIC: 1, LatticeKind.DIAMOND: 4}


def slice_block(graph: LatticeGraph, spec: BlockSpec) -> LatticeGraph:
    """Induced subgraph on an axis-aligned sub-block.

    Origin and extent are in lattice units (vertices for cubic, cells for
    diamond). The result records parent_vertex_ids and parent_edge_ids;
    vertex order follows parent ids, edge order follows the parent edge
    list. Covering kinds cannot be sliced: their vertices sit on base
    edges, so unit-aligned regions do not induce well-defined sub-blocks.
    """
    try:
        scale = _SLICE_SCALE[graph.kind]
    except KeyError:
        raise ValueError(f"slicing {graph.kind.value} blocks is not supported") from None
    if graph.coords is None:
        raise ValueError("graph carries no geometry; slicing unavailable")
    origin = np.array(spec.origin, dtype=np.int64)
    extent = np.array(spec.extent, dtype=np.int64)
    lo = scale * origin
    hi = scale * (origin + extent) - 1
    if graph.bounds_lo is not None and (
        (lo < graph.bounds_lo).any() or (hi > graph.bounds_hi).any()
    ):
        raise ValueError("block region exceeds graph bounds")
    inside = ((graph.coords >= lo) & (graph.coords <= hi)).all(axis=1)
    vids = np.nonzero(inside)[0].astype(np.int64)
    emask = inside[graph.edges[:, 0]] & inside[graph.edges[:, 1]]
    eids = np.nonzero(emask)[0].astype(np.int64)
    new_index = np.full(graph.n_vertices, -1, dtype=np.int64)
    new_index[vids] = np.arange(len(vids))
    edges = new_index[graph.edges[eids]]
    return LatticeGraph(
        graph.kind,
        tuple(int(e) for e in spec.extent),
        graph.coords[vids],
        edges,
        bounds_lo=lo,
        bounds_hi=hi,
        parent_vertex_ids=vids,
        parent_edge_ids=eids,
    )


def export_edge_list(graph: LatticeGraph) -> str:
    """Text edge list: header line, then one 'u v' line per edge.

    Header: ``vertices V edges E kind K dims a b c``.
    """
    buf = io.StringIO()
    a, b, c = graph.dims
    buf.write(
        f"vertices {graph.n_vertices} edges {graph.n_edges} "
        f"kind {graph.kind.value} dims {a} {b} {c}\n"
    )
    for u, v in graph.edges:
        buf.write(f"{u} {v}\n")
    return buf.getvalue()


def parse_edge_list(text: str) -> LatticeGraph:
    """Parse the export_edge_list format.

    The result carries connectivity only (no coordinates or faces); rebuild
    with build_block when geometry is needed for a canonical block.
    """
    lines = text.strip().splitlines()
    if not lines:
        raise ValueError("empty edge list")
    head = lines[0].split()
    if (
        len(head) != 10
        or head[0] != "vertices"
        or head[2] != "edges"
        or head[4] != "kind"
        or head[6] != "dims"
    ):
        raise ValueError(f"malformed header: {lines[0]!r}")
    n_vertices = int(head[1])
    n_edges = int(head[3])
    kind = LatticeKind.parse(head[5])
    dims = (int(head[7]), int(head[8]), int(head[9]))
    body = lines[1:]
    if len(body) != n_edges:
        raise ValueError(f"expected {n_edges} edge lines, found {len(body)}")
    if n_edges:
        edges = np.array([ln.split() for ln in body], dtype=np.int64)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    if edges.size and (edges.min() < 0 or edges.max() >= n_vertices):
        raise ValueError("edge endpoint out of range")
    return LatticeGraph(kind, dims, None, edges, n_vertices=n_vertices)
