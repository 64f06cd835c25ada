# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Semantics documented in _kernels_py; outputs must match
that module bit for bit, tests compare the two directly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32
ctypedef cnp.uint8_t u8
ctypedef cnp.float64_t f64

BACKEND = "compiled"


cdef inline i64 _find(i64* parent, i64 i) noexcept nogil:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


cdef inline i64 _glue_index(i64* g_lab, i64 gn, i64 lab) noexcept nogil:
    cdef i64 i
    for i in range(gn):
        if g_lab[i] == lab:
            return i
    return -1


cdef inline i64 _glue_insert(i64* g_lab, i64* g_parent, i64* g_min, i64 gn, i64 lab) noexcept nogil:
    cdef i64 i
    for i in range(gn):
        if g_lab[i] == lab:
            return gn
    g_lab[gn] = lab
    g_parent[gn] = gn
    g_min[gn] = lab
    return gn + 1


def label_min(i64 n, i64[::1] eu, i64[::1] ev, u8[::1] open_sites, u8[::1] open_bonds):
    labels_arr = np.empty(n, dtype=np.int64)
    parent_arr = np.arange(n, dtype=np.int64)
    size_arr = np.ones(n, dtype=np.int64)
    first_arr = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] labels = labels_arr
    cdef i64[::1] parent = parent_arr
    cdef i64[::1] size = size_arr
    cdef i64[::1] first = first_arr
    cdef i64 m = eu.shape[0]
    cdef i64 e, u, v, ru, rv, r
    with nogil:
        for e in range(m):
            if not open_bonds[e]:
                continue
            u = eu[e]
            v = ev[e]
            if not (open_sites[u] and open_sites[v]):
                continue
            ru = _find(&parent[0], u)
            rv = _find(&parent[0], v)
            if ru == rv:
                continue
            if size[ru] < size[rv]:
                ru, rv = rv, ru
            parent[rv] = ru
            size[ru] += size[rv]
        for v in range(n):
            if open_sites[v]:
                r = _find(&parent[0], v)
                if first[r] < 0:
                    first[r] = v
                labels[v] = first[r]
            else:
                labels[v] = -1
    return labels_arr


def bond_sweep(
    i64 n,
    i64[::1] eu,
    i64[::1] ev,
    f64[::1] u_bond,
    i64[::1] order,
    u8[::1] open_sites,
    u8[::1] fmask,
    u8 need,
):
    parent_arr = np.arange(n, dtype=np.int64)
    size_arr = np.ones(n, dtype=np.int64)
    mask_arr = np.zeros(n, dtype=np.uint8)
    cdef i64[::1] parent = parent_arr
    cdef i64[::1] size = size_arr
    cdef u8[::1] mask = mask_arr
    cdef i64 m = order.shape[0]
    cdef i64 i, e, u, v, ru, rv
    cdef double out = np.inf
    cdef int hit = 0
    with nogil:
        for v in range(n):
            if open_sites[v]:
                mask[v] = fmask[v]
                if (mask[v] & need) == need:
                    out = -1.0
                    hit = 1
                    break
        if not hit:
            for i in range(m):
                e = order[i]
                u = eu[e]
                v = ev[e]
                if not (open_sites[u] and open_sites[v]):
                    continue
                ru = _find(&parent[0], u)
                rv = _find(&parent[0], v)
                if ru == rv:
                    continue
                if size[ru] < size[rv]:
                    ru, rv = rv, ru
                parent[rv] = ru
                size[ru] += size[rv]
                mask[ru] = mask[ru] | mask[rv]
                if (mask[ru] & need) == need:
                    out = u_bond[e]
                    break
    return out


def renorm_trial(
    i64 n_blocks,
    i64[::1] v_par,
    i64[::1] v_off,
    i32[::1] e_lu,
    i32[::1] e_lv,
    i64[::1] e_par,
    i64[::1] e_off,
    u8[::1] fmask,
    int need,
    i64 n_bonds,
    i64[::1] b_pe,
    i32[::1] b_lu,
    i32[::1] b_lv,
    i64[::1] b_off,
    i32[::1] b_blka,
    i32[::1] b_blkb,
    f64[::1] u_site,
    f64[::1] u_bond,
    double p_site,
    double p_bond,
    int bond_rule,
    int early_exit,
    u8[::1] occupied,
    i64[::1] designated,
    u8[::1] bond_ok,
    i64[::1] bond_witness,
    i64[::1] labels,
):
    cdef i64 max_nv = 1, max_be = 1, b, i
    for b in range(n_blocks):
        if v_off[b + 1] - v_off[b] > max_nv:
            max_nv = v_off[b + 1] - v_off[b]
    for i in range(n_bonds):
        if b_off[i + 1] - b_off[i] > max_be:
            max_be = b_off[i + 1] - b_off[i]

    parent_arr = np.empty(max_nv, dtype=np.int64)
    size_arr = np.empty(max_nv, dtype=np.int64)
    first_arr = np.empty(max_nv, dtype=np.int64)
    mask_arr = np.empty(max_nv, dtype=np.uint8)
    wopen_arr = np.empty(max_nv, dtype=np.uint8)
    cdef i64[::1] parent = parent_arr
    cdef i64[::1] size = size_arr
    cdef i64[::1] first = first_arr
    cdef u8[::1] mask = mask_arr
    cdef u8[::1] wopen = wopen_arr

    cdef i64 glue_cap = 2 * max_be + 2
    g_lab_arr = np.empty(glue_cap, dtype=np.int64)
    g_parent_arr = np.empty(glue_cap, dtype=np.int64)
    g_min_arr = np.empty(glue_cap, dtype=np.int64)
    cdef i64[::1] g_lab = g_lab_arr
    cdef i64[::1] g_parent = g_parent_arr
    cdef i64[::1] g_min = g_min_arr

    cdef i64 s, t, nv, e, u, v, ru, rv, r, sz, lab
    cdef i64 best_size, best_label
    cdef i64 da, db, oa, ob, pe, la, lb, ga, gb, gn, j, witness
    cdef int ok, all_ok = 1, stop = 0

    with nogil:
        for b in range(n_blocks):
            s = v_off[b]
            t = v_off[b + 1]
            nv = t - s
            for i in range(nv):
                parent[i] = i
                size[i] = 1
                first[i] = -1
                if u_site[v_par[s + i]] < p_site:
                    wopen[i] = 1
                    mask[i] = fmask[s + i]
                else:
                    wopen[i] = 0
                    mask[i] = 0
            for e in range(e_off[b], e_off[b + 1]):
                if u_bond[e_par[e]] >= p_bond:
                    continue
                u = e_lu[e]
                v = e_lv[e]
                if not (wopen[u] and wopen[v]):
                    continue
                ru = _find(&parent[0], u)
                rv = _find(&parent[0], v)
                if ru == rv:
                    continue
                if size[ru] < size[rv]:
                    ru, rv = rv, ru
                parent[rv] = ru
                size[ru] += size[rv]
                mask[ru] = mask[ru] | mask[rv]
            for i in range(nv):
                if wopen[i]:
                    r = _find(&parent[0], i)
                    if first[r] < 0:
                        first[r] = i
                    labels[s + i] = v_par[s + first[r]]
                else:
                    labels[s + i] = -1
            best_size = 0
            best_label = -1
            for i in range(nv):
                if wopen[i] and parent[i] == i:
                    if (mask[i] & need) == need:
                        sz = size[i]
                        lab = v_par[s + first[i]]
                        if sz > best_size or (sz == best_size and lab < best_label):
                            best_size = sz
                            best_label = lab
            if best_label >= 0:
                occupied[b] = 1
            else:
                occupied[b] = 0
                all_ok = 0
            designated[b] = best_label
            if best_label < 0 and early_exit:
                stop = 1
                break

        if not stop:
            for i in range(n_bonds):
                s = b_off[i]
                t = b_off[i + 1]
                da = designated[b_blka[i]]
                db = designated[b_blkb[i]]
                oa = v_off[b_blka[i]]
                ob = v_off[b_blkb[i]]
                ok = 0
                witness = -1
                if da >= 0 and db >= 0:
                    if bond_rule == 0:
                        for j in range(s, t):
                            pe = b_pe[j]
                            if u_bond[pe] >= p_bond:
                                continue
                            if labels[oa + b_lu[j]] == da and labels[ob + b_lv[j]] == db:
                                ok = 1
                                witness = pe
                                break
                    else:
                        # symbol table over cluster labels, linear scan (small)
                        gn = 0
                        gn = _glue_insert(&g_lab[0], &g_parent[0], &g_min[0], gn, da)
                        gn = _glue_insert(&g_lab[0], &g_parent[0], &g_min[0], gn, db)
                        for j in range(s, t):
                            if u_bond[b_pe[j]] >= p_bond:
                                continue
                            la = labels[oa + b_lu[j]]
                            lb = labels[ob + b_lv[j]]
                            if la < 0 or lb < 0:
                                continue
                            gn = _glue_insert(&g_lab[0], &g_parent[0], &g_min[0], gn, la)
                            gn = _glue_insert(&g_lab[0], &g_parent[0], &g_min[0], gn, lb)
                            ga = _find(&g_parent[0], _glue_index(&g_lab[0], gn, la))
                            gb = _find(&g_parent[0], _glue_index(&g_lab[0], gn, lb))
                            if ga != gb:
                                g_parent[gb] = ga
                                if g_min[gb] < g_min[ga]:
                                    g_min[ga] = g_min[gb]
                        ga = _find(&g_parent[0], _glue_index(&g_lab[0], gn, da))
                        gb = _find(&g_parent[0], _glue_index(&g_lab[0], gn, db))
                        if ga == gb:
                            ok = 1
                            witness = g_min[ga]
                bond_ok[i] = ok
                bond_witness[i] = witness
                if not ok:
                    all_ok = 0
                    if early_exit:
                        stop = 1
                        break
    if stop:
        return 0
    return all_ok
