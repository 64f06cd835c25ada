"""Exact stabilizer simulation of Pauli measurements on graph states.

Desk-scale verification oracle (n <= 10): simulates single-qubit X/Y/Z
measurements on a graph state by tableau arithmetic, then normalizes the
survivor back to a graph with a recorded local Clifford layer. Ground
truth for the graph-rewriting rules in the pathing module.

Generators are stored as i^r * prod_j X_j^x[j] Z_j^z[j] with r mod 4 and
the X factor left of Z on each qubit. Measurement outcomes are chosen as
+1 on the random branch; determined outcomes are reported as recorded.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

MAX_ORACLE_QUBITS = 10

_PAULI_BITS = {"X": (1, 0, 0), "Y": (1, 1, 1), "Z": (0, 1, 0)}


def _normalize_adjacency(graph) -> dict[int, set[int]]:
    adj = graph.adjacency if hasattr(graph, "adjacency") else graph
    out: dict[int, set[int]] = {int(v): set() for v in adj}
    for v, nbrs in adj.items():
        for w in nbrs:
            v, w = int(v), int(w)
            if v == w:
                raise ValueError("graph states carry simple graphs, no loops")
            if w not in out:
                raise ValueError(f"edge {v}-{w} leaves the vertex set")
            out[v].add(w)
            out[w].add(v)
    return out


class Tableau:
    """Stabilizer tableau over a fixed list of qubit ids."""

    def __init__(self, adjacency: Mapping[int, Iterable[int]]):
        adj = _normalize_adjacency(adjacency)
        self.ids: list[int] = sorted(adj)
        n = len(self.ids)
        pos = {v: i for i, v in enumerate(self.ids)}
        self.x = np.eye(n, dtype=np.uint8)
        self.z = np.zeros((n, n), dtype=np.uint8)
        for v, nbrs in adj.items():
            for w in nbrs:
                self.z[pos[v], pos[w]] = 1
        self.r = np.zeros(n, dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.ids)

    def _rowmult(self, i: int, j: int) -> None:
        """row i *= row j (phases: moving row j's X past row i's Z)."""
        self.r[i] = (self.r[i] + self.r[j] + 2 * int(np.sum(self.z[i] & self.x[j]))) % 4
        self.x[i] ^= self.x[j]
        self.z[i] ^= self.z[j]

    def measure(self, qubit: int, basis: str) -> int:
        """Measure one qubit and drop it from the tableau.

        Returns +1/-1; the random branch reports +1 (that outcome is
        post-selected into the state).
        """
        if basis not in _PAULI_BITS:
            raise ValueError(f"basis must be X, Y or Z, not {basis!r}")
        try:
            q = self.ids.index(qubit)
        except ValueError:
            raise ValueError(f"qubit {qubit} is not in the state") from None
        px, pz, pr = _PAULI_BITS[basis]
        anti = np.nonzero((self.x[:, q] & pz) ^ (self.z[:, q] & px))[0]
        if len(anti):
            pivot = int(anti[0])
            for i in anti[1:]:
                self._rowmult(int(i), pivot)
            self.x[pivot] = 0
            self.z[pivot] = 0
            self.x[pivot, q] = px
            self.z[pivot, q] = pz
            self.r[pivot] = pr  # +1 outcome branch
            outcome = 1
        else:
            pivot, outcome = self._determined(q, px, pz, pr)
        # clear the measured qubit from every other generator
        for i in range(self.n):
            if i != pivot and (self.x[i, q] or self.z[i, q]):
                self._rowmult(i, pivot)
        keep = [i for i in range(self.n) if i != pivot]
        cols = [c for c in range(self.n) if c != q]
        self.x = self.x[np.ix_(keep, cols)]
        self.z = self.z[np.ix_(keep, cols)]
        self.r = self.r[keep]
        del self.ids[q]
        return outcome

    def _determined(self, q: int, px: int, pz: int, pr: int) -> tuple[int, int]:
        """The measured Pauli lies in the stabilizer group: rewrite some
        generator into the pure single-qubit Pauli and report the sign."""
        n = self.n
        # solve sum of generator bit rows == target over GF(2)
        m = np.concatenate([self.x.T, self.z.T])  # (2n, n): column per generator
        target = np.zeros(2 * n, dtype=np.uint8)
        target[q] = px
        target[n + q] = pz
        a = np.concatenate([m, target[:, None]], axis=1).astype(np.uint8)
        piv_cols: list[int] = []
        row = 0
        for col in range(n):
            hit = np.nonzero(a[row:, col])[0]
            if len(hit) == 0:
                continue
            a[[row, row + hit[0]]] = a[[row + hit[0], row]]
            for rr in range(2 * n):
                if rr != row and a[rr, col]:
                    a[rr] ^= a[row]
            piv_cols.append(col)
            row += 1
            if row == 2 * n:
                break
        if a[row:, n].any():
            raise AssertionError("measurement neither anticommutes nor is determined")
        subset = [piv_cols[i] for i in range(len(piv_cols)) if a[i, n]]
        first = subset[0]
        for j in subset[1:]:
            self._rowmult(first, j)
        if not (self.x[first, q] == px and self.z[first, q] == pz):
            raise AssertionError("determined-solve produced the wrong Pauli")
        outcome = 1 if self.r[first] % 4 == pr else -1
        self.r[first] = pr  # normalize the retained pure generator to +P
        return first, outcome

    # local Clifford column operations used by graph normalization
    def _apply_h(self, c: int) -> None:
        both = (self.x[:, c] & self.z[:, c]).astype(bool)
        self.r[both] = (self.r[both] + 2) % 4
        self.x[:, c], self.z[:, c] = self.z[:, c].copy(), self.x[:, c].copy()

    def _apply_s_dag(self, c: int) -> None:
        hit = self.x[:, c].astype(bool)
        self.r[hit] = (self.r[hit] + 3) % 4
        self.z[hit, c] ^= 1

    def _apply_z(self, c: int) -> None:
        hit = self.x[:, c].astype(bool)
        self.r[hit] = (self.r[hit] + 2) % 4

    def _swap_rows(self, i: int, j: int) -> None:
        if i != j:
            self.x[[i, j]] = self.x[[j, i]]
            self.z[[i, j]] = self.z[[j, i]]
            self.r[[i, j]] = self.r[[j, i]]

    def _echelon_x(self) -> tuple[int, list[int]]:
        """Reduced row echelon form over the X block (row ops only).
        Returns (rank, pivot columns); pure-Z rows end up at the bottom."""
        rank = 0
        piv: list[int] = []
        for col in range(self.n):
            hit = [r for r in range(rank, self.n) if self.x[r, col]]
            if not hit:
                continue
            self._swap_rows(rank, hit[0])
            for r in range(self.n):
                if r != rank and self.x[r, col]:
                    self._rowmult(r, rank)
            piv.append(col)
            rank += 1
        return rank, piv

    def to_graph(self) -> tuple[dict[int, set[int]], dict[int, tuple[str, ...]]]:
        """Normalize to graph form; returns (adjacency, local Clifford layer).

        The layer maps qubit id to the tuple of single-qubit ops applied
        during normalization (bookkeeping; the state equals the graph
        state up to the inverses of these ops).
        """
        n = self.n
        lc: dict[int, list[str]] = {v: [] for v in self.ids}
        # Make the X block invertible. In reduced echelon form any pure-Z
        # row must put Z on some non-pivot column (commutation with the
        # pivot rows forbids support on pivot columns alone), and an H
        # there raises the X rank by one.
        for _ in range(n + 1):
            rank, piv = self._echelon_x()
            if rank == n:
                break
            cand = [c for c in range(n) if c not in piv and self.z[rank, c]]
            if not cand:
                raise AssertionError("dependent stabilizer generators")
            self._apply_h(cand[0])
            lc[self.ids[cand[0]]].append("H")
        else:
            raise AssertionError("X block never became invertible")
        if not (self.x == np.eye(n, dtype=np.uint8)).all():
            raise AssertionError("reduced echelon at full rank must be the identity")
        if not (self.z == self.z.T).all():
            raise AssertionError("Z block must be symmetric in graph form")
        for c in range(n):
            if self.z[c, c]:
                self._apply_s_dag(c)
                lc[self.ids[c]].append("S")
        for c in range(n):
            if self.r[c] % 4 == 2:
                self._apply_z(c)
                lc[self.ids[c]].append("Z")
        if (self.r % 4).any():
            raise AssertionError("non-real phases survived graph normalization")
        adj = {
            self.ids[i]: {self.ids[j] for j in np.nonzero(self.z[i])[0]}
            for i in range(n)
        }
        return adj, {v: tuple(ops) for v, ops in lc.items()}


@dataclass(frozen=True)
class OracleResult:
    adjacency: dict[int, set[int]]
    local_cliffords: dict[int, tuple[str, ...]]
    outcomes: tuple[int, ...]


def stabilizer_oracle(
    graph, measurements: Sequence[tuple[int, str]], max_qubits: int = MAX_ORACLE_QUBITS
) -> OracleResult:
    """Measure the given (qubit, basis) sequence on the graph state of
    `graph` and return the surviving graph with its local Clifford layer.

    Refuses graphs above max_qubits; this is a verification oracle, not a
    simulator.
    """
    adj = _normalize_adjacency(graph)
    if len(adj) > max_qubits:
        raise ValueError(f"oracle accepts at most {max_qubits} qubits, got {len(adj)}")
    tab = Tableau(adj)
    outcomes = []
    for qubit, basis in measurements:
        outcomes.append(tab.measure(int(qubit), basis.upper()))
    final_adj, lc = tab.to_graph()
    return OracleResult(final_adj, lc, tuple(outcomes))


def _canon(adj: Mapping[int, set[int]]) -> frozenset:
    return frozenset(
        (v, w) if v < w else (w, v) for v, nbrs in adj.items() for w in nbrs
    )


def lc_equivalent(a, b, max_states: int = 500_000) -> bool:
    """True iff the two graphs are related by local complementations.

    Breadth-first walk over the local-complementation orbit of `a`
    (feasible at oracle scale); graphs on different vertex sets are never
    equivalent.
    """
    adj_a = _normalize_adjacency(a)
    adj_b = _normalize_adjacency(b)
    if set(adj_a) != set(adj_b):
        return False
    target = _canon(adj_b)
    start = _canon(adj_a)
    if start == target:
        return True
    verts = sorted(adj_a)
    seen = {start}
    queue = deque([start])
    while queue:
        edges = queue.popleft()
        adj = {v: set() for v in verts}
        for v, w in edges:
            adj[v].add(w)
            adj[w].add(v)
        for v in verts:
            nbrs = sorted(adj[v])
            if len(nbrs) < 2:
                continue
            new = set(edges)
            for i in range(len(nbrs)):
                for j in range(i + 1, len(nbrs)):
                    e = (nbrs[i], nbrs[j])
                    if e in new:
                        new.remove(e)
                    else:
                        new.add(e)
            key = frozenset(new)
            if key == target:
                return True
            if key not in seen:
                seen.add(key)
                if len(seen) > max_states:
                    raise RuntimeError("local-complementation orbit exceeded cap")
                queue.append(key)
    return False
