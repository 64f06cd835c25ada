"""Pure-Python kernels.

Reference implementations of the hot loops; the compiled twins in _ckern
must produce identical outputs. Selected at import time by _kernels when
the extension is unavailable or PERCRENORM_BACKEND=python is set. Slow on
large regions, fine for small jobs and for cross-checking.

Cluster labels are canonical: the label of a cluster is the smallest open
vertex id it contains, closed vertices get -1. Face masks are bitmasks,
bit (2*axis) for the low face and bit (2*axis + 1) for the high face; a
cluster crosses the required axes when the OR of its members' masks
contains every bit of ``need``.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _find(parent: list[int], i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]  # path halving
        i = parent[i]
    return i


def label_min(
    n: int,
    eu: np.ndarray,
    ev: np.ndarray,
    open_sites: np.ndarray,
    open_bonds: np.ndarray,
) -> np.ndarray:
    """Connected-component labels of the open subgraph.

    A bond contributes only if it is open and both endpoints are open.
    Open isolated vertices are size-1 clusters labeled by themselves.
    """
    parent = list(range(n))
    size = [1] * n
    for e in range(len(eu)):
        if not open_bonds[e]:
            continue
        u = int(eu[e])
        v = int(ev[e])
        if not (open_sites[u] and open_sites[v]):
            continue
        ru, rv = _find(parent, u), _find(parent, v)
        if ru == rv:
            continue
        if size[ru] < size[rv]:
            ru, rv = rv, ru
        parent[rv] = ru
        size[ru] += size[rv]
    labels = np.full(n, -1, dtype=np.int64)
    rep: dict[int, int] = {}
    for v in range(n):
        if open_sites[v]:
            r = _find(parent, v)
            if r not in rep:
                rep[r] = v  # ascending scan, first hit is the minimum id
            labels[v] = rep[r]
    return labels


def bond_sweep(
    n: int,
    eu: np.ndarray,
    ev: np.ndarray,
    u_bond: np.ndarray,
    order: np.ndarray,
    open_sites: np.ndarray,
    fmask: np.ndarray,
    need: int,
) -> float:
    """Critical uniform of the bond-insertion sweep.

    Bonds are inserted in the given order (ascending uniform); the return
    value is the uniform of the bond whose insertion first creates a
    cluster touching all faces required by ``need``, so the configuration
    at bond parameter p crosses iff the returned value is < p. Returns
    -1.0 when a single open vertex already crosses and inf when crossing
    never occurs.
    """
    parent = list(range(n))
    size = [1] * n
    mask = [0] * n
    for v in range(n):
        if open_sites[v]:
            m = int(fmask[v])
            mask[v] = m
            if m & need == need:
                return -1.0
    for idx in order:
        e = int(idx)
        u = int(eu[e])
        v = int(ev[e])
        if not (open_sites[u] and open_sites[v]):
            continue
        ru, rv = _find(parent, u), _find(parent, v)
        if ru == rv:
            continue
        if size[ru] < size[rv]:
            ru, rv = rv, ru
        parent[rv] = ru
        size[ru] += size[rv]
        mask[ru] |= mask[rv]
        if mask[ru] & need == need:
            return float(u_bond[e])
    return float(np.inf)


def renorm_trial(
    n_blocks: int,
    v_par: np.ndarray,
    v_off: np.ndarray,
    e_lu: np.ndarray,
    e_lv: np.ndarray,
    e_par: np.ndarray,
    e_off: np.ndarray,
    fmask: np.ndarray,
    need: int,
    n_bonds: int,
    b_pe: np.ndarray,
    b_lu: np.ndarray,
    b_lv: np.ndarray,
    b_off: np.ndarray,
    b_blka: np.ndarray,
    b_blkb: np.ndarray,
    u_site: np.ndarray,
    u_bond: np.ndarray,
    p_site: float,
    p_bond: float,
    bond_rule: int,
    early_exit: int,
    occupied: np.ndarray,
    designated: np.ndarray,
    bond_ok: np.ndarray,
    bond_witness: np.ndarray,
    labels: np.ndarray,
) -> int:
    """One renormalization trial over precomputed block tables.

    Blocks are labeled independently on their induced subgraphs; a block is
    occupied when some cluster touches every face in ``need``, and its
    designated cluster is the largest crossing cluster (ties to the
    smallest label). Bond rule 0 declares a bond present when some open
    boundary bond joins the two designated clusters (witness: its parent
    edge id). Bond rule 1 glues the two blocks' clusters along all open
    boundary bonds and requires the designated clusters to end in the same
    component (witness: the smallest cluster label in that component).

    Labels are written per block in v_par order as parent vertex ids.
    Returns 1 when every block is occupied and every bond present. With
    early_exit, returns 0 at the first failure and leaves the remaining
    outputs unspecified.
    """
    for b in range(n_blocks):
        s, t = int(v_off[b]), int(v_off[b + 1])
        nv = t - s
        pv = v_par[s:t]
        site_open = u_site[pv] < p_site
        es, et = int(e_off[b]), int(e_off[b + 1])
        bond_open = u_bond[e_par[es:et]] < p_bond
        local_labels = label_min(nv, e_lu[es:et], e_lv[es:et], site_open, bond_open)
        # map local min-ids to parent ids
        glob = np.where(local_labels >= 0, pv[np.maximum(local_labels, 0)], -1)
        labels[s:t] = glob
        # crossing clusters via face masks
        best_label = -1
        best_size = 0
        open_idx = np.nonzero(local_labels >= 0)[0]
        if len(open_idx):
            labs = glob[open_idx]
            masks = fmask[s:t][open_idx].astype(np.int64)
            uniq, inv = np.unique(labs, return_inverse=True)
            acc = np.zeros(len(uniq), dtype=np.int64)
            np.bitwise_or.at(acc, inv, masks)
            sizes = np.bincount(inv, minlength=len(uniq))
            crossing = (acc & need) == need
            if crossing.any():
                cl = uniq[crossing]
                cs = sizes[crossing]
                top = cs == cs.max()
                best_label = int(cl[top].min())
                best_size = int(cs.max())
        occupied[b] = 1 if best_label >= 0 else 0
        designated[b] = best_label
        if best_label < 0 and early_exit:
            return 0
    all_ok = bool(occupied[:n_blocks].all())
    for i in range(n_bonds):
        s, t = int(b_off[i]), int(b_off[i + 1])
        da = designated[b_blka[i]]
        db = designated[b_blkb[i]]
        oa = int(v_off[b_blka[i]])
        ob = int(v_off[b_blkb[i]])
        ok = 0
        witness = -1
        if da >= 0 and db >= 0:
            if bond_rule == 0:
                for j in range(s, t):
                    pe = int(b_pe[j])
                    if u_bond[pe] >= p_bond:
                        continue
                    if (
                        labels[oa + b_lu[j]] == da
                        and labels[ob + b_lv[j]] == db
                    ):
                        ok = 1
                        witness = pe
                        break
            else:
                uf: dict[int, int] = {}
                umin: dict[int, int] = {}

                def find(x: int) -> int:
                    while uf[x] != x:
                        uf[x] = uf[uf[x]]
                        x = uf[x]
                    return x

                for lab in (int(da), int(db)):
                    uf.setdefault(lab, lab)
                    umin.setdefault(lab, lab)
                for j in range(s, t):
                    if u_bond[int(b_pe[j])] >= p_bond:
                        continue
                    la = int(labels[oa + b_lu[j]])
                    lb = int(labels[ob + b_lv[j]])
                    if la < 0 or lb < 0:
                        continue
                    for lab in (la, lb):
                        uf.setdefault(lab, lab)
                        umin.setdefault(lab, lab)
                    ra, rb = find(la), find(lb)
                    if ra != rb:
                        uf[rb] = ra
                        umin[ra] = min(umin[ra], umin[rb])
                if find(int(da)) == find(int(db)):
                    ok = 1
                    witness = umin[find(int(da))]
        bond_ok[i] = ok
        bond_witness[i] = witness
        if not ok:
            all_ok = False
            if early_exit:
                return 0
    return 1 if all_ok else 0
