"""Stabilizer oracle validated against dense state vectors.

The heavy check: measure random Pauli sequences on random graph states,
project the dense state vector the same way, and demand that the oracle's
graph plus local Clifford layer reproduces the projected state exactly
(up to global phase). Token semantics: applying the listed ops, in order,
with H, S-dagger and Z maps the post-measurement state to the graph state
of the reported adjacency.
"""

import numpy as np
import pytest

from percrenorm.stabilizer import Tableau, lc_equivalent, stabilizer_oracle

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
SDG = np.array([[1, 0], [0, -1j]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": Z,
}
TOKEN = {"H": H, "S": SDG, "Z": Z}


def graph_vec(adj, ids):
    n = len(ids)
    if n == 0:
        return np.array([1.0 + 0j])
    pos = {v: i for i, v in enumerate(ids)}
    vec = np.ones(2**n, dtype=complex) / 2 ** (n / 2)
    for i in range(2**n):
        bits = [(i >> (n - 1 - j)) & 1 for j in range(n)]
        for v, nbrs in adj.items():
            for w in nbrs:
                if v < w and bits[pos[v]] and bits[pos[w]]:
                    vec[i] *= -1
    return vec


def op_at(op, q, n):
    out = np.array([[1.0 + 0j]])
    for i in range(n):
        out = np.kron(out, op if i == q else I2)
    return out


def random_adj(rng, n, p=0.5):
    adj = {v: set() for v in range(n)}
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                adj[a].add(b)
                adj[b].add(a)
    return adj


def test_oracle_matches_state_vector_on_random_sequences():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(120):
        n = int(rng.integers(2, 5))
        adj = random_adj(rng, n)
        n_meas = int(rng.integers(1, n))
        qubits = rng.choice(n, size=n_meas, replace=False)
        meas = [(int(q), "XYZ"[int(rng.integers(0, 3))]) for q in qubits]
        res = stabilizer_oracle(adj, meas)

        psi = graph_vec(adj, list(range(n)))
        cur = list(range(n))
        for (q, basis), o in zip(meas, res.outcomes):
            m = len(cur)
            qi = cur.index(q)
            proj = (np.eye(2**m) + o * op_at(PAULI[basis], qi, m)) / 2
            psi = proj @ psi
            norm = np.linalg.norm(psi)
            assert norm > 1e-9  # +1 branch is post-selected, never impossible
            psi = psi / norm
            # the measured qubit factors out; keep the larger slice
            tens = psi.reshape([2] * m)
            s0 = np.take(tens, 0, axis=qi).reshape(-1)
            s1 = np.take(tens, 1, axis=qi).reshape(-1)
            psi = s0 if np.linalg.norm(s0) >= np.linalg.norm(s1) else s1
            psi = psi / np.linalg.norm(psi)
            cur.pop(qi)

        assert set(res.adjacency) == set(cur)
        got = psi
        for i, v in enumerate(cur):
            for tok in res.local_cliffords.get(v, ()):
                got = op_at(TOKEN[tok], i, len(cur)) @ got
        target = graph_vec(res.adjacency, cur)
        overlap = abs(np.vdot(got, target))
        assert overlap == pytest.approx(1.0, abs=1e-9)
        checked += 1
    assert checked == 120


def test_deterministic_outcomes():
    # Z on one half of a Bell-type graph edge fixes X on the other side:
    # measure Z(0) on the 2-vertex graph, then X(1) is determined
    res = stabilizer_oracle({0: {1}, 1: {0}}, [(0, "Z"), (1, "X")])
    # after Z(0) the vertex 1 is in an X eigenstate fixed by the outcome
    assert res.outcomes[1] == res.outcomes[0]
    # measuring X twice on the same qubit is idempotent in sign
    r2 = stabilizer_oracle({0: {1}, 1: {0}}, [(0, "X")])
    assert r2.outcomes[0] in (-1, 1)


def test_oracle_validates_input():
    with pytest.raises(ValueError):
        stabilizer_oracle({0: set()}, [(0, "Q")])
    with pytest.raises(ValueError):
        stabilizer_oracle({0: set()}, [(1, "Z")])
    big = {v: set() for v in range(100)}
    with pytest.raises(ValueError):
        stabilizer_oracle(big, [(0, "Z")], max_qubits=10)


def test_lc_equivalence_basics():
    # triangle and star on three vertices are LC equivalent
    triangle = {0: {1, 2}, 1: {0, 2}, 2: {0, 1}}
    star = {0: {1, 2}, 1: {0}, 2: {0}}
    path = {0: {1}, 1: {0, 2}, 2: {1}}
    assert lc_equivalent(triangle, star)
    assert lc_equivalent(star, path)
    empty = {0: set(), 1: set(), 2: set()}
    assert not lc_equivalent(triangle, empty)
    assert not lc_equivalent(triangle, {0: {1}, 1: {0}})  # different vertex sets


def test_lc_equivalence_respects_orbit_invariants():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(3, 6))
        adj = random_adj(rng, n)
        # local complementation at a vertex stays in the orbit
        v = int(rng.integers(0, n))
        out = {w: set(x) for w, x in adj.items()}
        nbrs = sorted(out[v])
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                a, b = nbrs[i], nbrs[j]
                if b in out[a]:
                    out[a].discard(b)
                    out[b].discard(a)
                else:
                    out[a].add(b)
                    out[b].add(a)
        assert lc_equivalent(adj, out)


def test_tableau_round_trip_graph_form():
    rng = np.random.default_rng(11)
    for _ in range(15):
        n = int(rng.integers(2, 6))
        adj = random_adj(rng, n)
        got, lc = Tableau(adj).to_graph()
        assert got == {v: set(w) for v, w in adj.items()}
        assert all(ops == () for ops in lc.values())
