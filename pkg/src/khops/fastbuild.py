"""Compiled assembly of the unified complex for large cubes.

Same output as the pure-Python builder in ``complex``; that one is kept as
the reference implementation and the two are compared in the tests.
"""

from __future__ import annotations

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None


def available() -> bool:
    return numba is not None


def _edge_kernel_py(s, c, circle_of, xarc, ncircles, loops, offsets, marked,
                    se, so, out_src, out_tgt, out_e, out_o, pos, count_only):
    t = s | (1 << c)
    cs = circle_of[s]
    ct = circle_of[t]
    ns = ncircles[s]
    nt = ncircles[t]
    nsa = ns - loops
    nta = nt - loops
    cmap = np.empty(ns, dtype=np.int64)
    seen = np.zeros(ns, dtype=np.uint8)
    for a in range(cs.shape[0]):
        k = cs[a]
        if seen[k] == 0:
            seen[k] = 1
            cmap[k] = ct[a]
    for k in range(loops):
        cmap[nsa + k] = nta + k
    a0 = cs[xarc[c, 0]]
    b0 = cs[xarc[c, 2]]
    split = a0 == b0
    tail = 0
    head = 0
    if split:
        tail = ct[xarc[c, 1]]
        head = ct[xarc[c, 3]]
        cmap[a0] = tail
    mk_s = marked[s]
    mk_t = marked[t]
    seq = np.empty(ns, dtype=np.int64)
    for mask in range(1 << ns):
        if mk_s >= 0 and not (mask >> mk_s) & 1:
            continue
        src = offsets[s] + mask
        if not split and (mask >> a0) & 1 and (mask >> b0) & 1:
            continue
        # images of the monomial's circles, in source order
        m = 0
        tm = 0
        for k in range(ns):
            if (mask >> k) & 1:
                seq[m] = cmap[k]
                tm |= 1 << cmap[k]
                m += 1
        inv = 0
        for x in range(m):
            for y in range(x + 1, m):
                if seq[x] > seq[y]:
                    inv += 1
        base = -1 if inv & 1 else 1
        if not split:
            if mk_t >= 0 and not (tm >> mk_t) & 1:
                continue
            if not count_only:
                out_src[pos] = src
                out_tgt[pos] = offsets[t] + tm
                out_e[pos] = se
                out_o[pos] = so * base
            pos += 1
            continue
        a_in = (mask >> a0) & 1
        for which in range(2):
            v = tail if which == 0 else head
            if (tm >> v) & 1:
                continue
            if a_in and which == 0:
                continue
            t2 = tm | (1 << v)
            if mk_t >= 0 and not (t2 >> mk_t) & 1:
                continue
            below = 0
            for x in range(m):
                if seq[x] < v:
                    below += 1
            sg = base * (-1 if below & 1 else 1) * (1 if which == 0 else -1)
            if not count_only:
                out_src[pos] = src
                out_tgt[pos] = offsets[t] + t2
                out_e[pos] = se
                out_o[pos] = so * sg
            pos += 1
    return pos


def _all_edges_py(n, circle_of, xarc, ncircles, loops, offsets, marked,
                  even, odd, out_src, out_tgt, out_e, out_o, count_only):
    pos = 0
    for s in range(1 << n):
        for c in range(n):
            if (s >> c) & 1:
                continue
            pos = _edge_kernel(s, c, circle_of, xarc, ncircles, loops, offsets, marked,
                               even[s, c], odd[s, c], out_src, out_tgt, out_e, out_o,
                               pos, count_only)
    return pos


if numba is not None:
    _edge_kernel = numba.njit(cache=True)(_edge_kernel_py)
    _all_edges = numba.njit(cache=True)(_all_edges_py)
else:  # pragma: no cover
    _edge_kernel = _edge_kernel_py
    _all_edges = _all_edges_py


def build(cube, even, odd, reduced):
    """Unified complex of ``cube`` (see ``complex.build_unified``)."""
    from .complex import Block, UnifiedComplex
    n = cube.n
    d = cube.diagram
    ncirc = cube.ncircles.astype(np.int64)
    offsets = np.zeros((1 << n) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(np.int64(1) << ncirc)
    if reduced:
        marked = np.array([cube.marked_circle(s) for s in range(1 << n)], dtype=np.int64)
    else:
        marked = np.full(1 << n, -1, dtype=np.int64)
    circle_of = cube.circle_of.astype(np.int64)
    if circle_of.shape[1] == 0:
        circle_of = np.zeros((1 << n, 1), dtype=np.int64)
    xarc = cube.xarc.astype(np.int64).reshape(n, 4) if n else np.zeros((0, 4), dtype=np.int64)
    ev = even.astype(np.int64)
    od = odd.astype(np.int64)
    dummy = np.zeros(0, dtype=np.int64)
    total = _all_edges(n, circle_of, xarc, ncirc, cube.loops, offsets, marked, ev, od,
                       dummy, dummy, dummy, dummy, True)
    src = np.empty(total, dtype=np.int64)
    tgt = np.empty(total, dtype=np.int64)
    ve = np.empty(total, dtype=np.int64)
    vo = np.empty(total, dtype=np.int64)
    _all_edges(n, circle_of, xarc, ncirc, cube.loops, offsets, marked, ev, od,
               src, tgt, ve, vo, False)

    # enumerate generators and their gradings
    states = np.repeat(np.arange(1 << n, dtype=np.int64), np.int64(1) << ncirc)
    gids = np.arange(offsets[-1], dtype=np.int64)
    masks = gids - offsets[states]
    if reduced:
        keep = (masks >> marked[states]) & 1 == 1
        gids, states, masks = gids[keep], states[keep], masks[keep]
    pop = _popcount(masks)
    w = cube.weights.astype(np.int64)[states]
    ii = w - d.n_minus
    qq = ncirc[states] - 2 * pop + w + d.n_plus - 2 * d.n_minus + (1 if reduced else 0)
    basis = {}
    index = np.full(offsets[-1], -1, dtype=np.int64)
    key = ii * (1 << 20) + (qq + (1 << 19))
    order = np.lexsort((gids, key))
    skey = key[order]
    bounds = np.flatnonzero(np.diff(skey)) + 1
    starts = np.concatenate([[0], bounds])
    ends = np.concatenate([bounds, [len(skey)]])
    bg_of_key = {}
    for a, b in zip(starts.tolist(), ends.tolist()):
        sel = order[a:b]
        g = gids[sel]
        bg = (int(ii[sel[0]]), int(qq[sel[0]]))
        basis[bg] = g
        index[g] = np.arange(len(g))
        bg_of_key[int(skey[a])] = bg
    dd = {}
    if total:
        gsrc = np.searchsorted(gids, src)
        k = key[gsrc]
        order = np.argsort(k, kind="stable")
        sk = k[order]
        bounds = np.flatnonzero(np.diff(sk)) + 1
        starts = np.concatenate([[0], bounds])
        ends = np.concatenate([bounds, [len(sk)]])
        for a, b in zip(starts.tolist(), ends.tolist()):
            sel = order[a:b]
            bg = bg_of_key[int(sk[a])]
            dd[bg] = Block(index[tgt[sel]], index[src[sel]], ve[sel], vo[sel])
    return UnifiedComplex(basis, dd)


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.int64)
    out = np.zeros_like(x)
    while np.any(x):
        out += x & 1
        x = x >> 1
    return out
