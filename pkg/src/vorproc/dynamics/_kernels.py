"""numba step loops for the Voronoi culling dynamics."""
import numpy as np
from numba import njit

from ..geometry import _circle, _planar

FENWICK_REFRESH = 1024

ERR_NONE = 0
ERR_GEOMETRY = 1
ERR_WEIGHTS = 2
ERR_REDRAW = 3  # placement too close to a survivor; caller redraws


@njit(cache=True)
def fenwick_build(w, tree):
    n = w.shape[0]
    tree[0] = 0.0
    for i in range(1, n + 1):
        tree[i] = w[i - 1]
    for i in range(1, n + 1):
        j = i + (i & -i)
        if j <= n:
            tree[j] += tree[i]


@njit(cache=True)
def fenwick_add(tree, i, delta):
    n = tree.shape[0] - 1
    k = i + 1
    while k <= n:
        tree[k] += delta
        k += k & -k


@njit(cache=True)
def fenwick_total(tree):
    n = tree.shape[0] - 1
    s = 0.0
    k = n
    while k > 0:
        s += tree[k]
        k -= k & -k
    return s


@njit(cache=True)
def fenwick_find(tree, w, target):
    """Smallest slot whose prefix sum exceeds target (target in [0, total))."""
    n = tree.shape[0] - 1
    pos = 0
    step = 1
    while step * 2 <= n:
        step *= 2
    rem = target
    while step > 0:
        nxt = pos + step
        if nxt <= n and tree[nxt] <= rem:
            pos = nxt
            rem -= tree[nxt]
        step //= 2
    if pos >= n:
        pos = n - 1
    # rounding can land on a zero-weight slot; move to the nearest positive one
    if w[pos] <= 0.0:
        k = pos
        while k < n and w[k] <= 0.0:
            k += 1
        if k == n:
            k = pos
            while k >= 0 and w[k] <= 0.0:
                k -= 1
        pos = k
    return pos


@njit(cache=True)
def sample_many(tree, w, u, out):
    total = fenwick_total(tree)
    for k in range(u.shape[0]):
        out[k] = fenwick_find(tree, w, u[k] * total)


@njit(cache=True)
def weight_of(mode, alpha, table, area, deg):
    if mode == 0:
        return area ** alpha
    return table[deg]


@njit(cache=True)
def run_planar(nsteps, draws, mode, alpha, table, weights, tree, labels,
               next_label, pts, active, kind, g, head, nxt, bucket, polys,
               polylab, nverts, areas, nbrs, nnbrs, touches, bufx, bufy,
               buflab, tmpx, tmpy, tmplab, changed, rec_slot, rec_label,
               rec_share, rec_point, step0):
    """Apply nsteps culling/replacement steps in place.

    draws[t] = (cull uniform, x, y).  A placement closer than MIN_SEPARATION
    to a survivor stops the run before step t mutates anything.
    Returns (next_label, steps done, error code).
    """
    for t in range(nsteps):
        if (step0 + t) % FENWICK_REFRESH == 0:
            fenwick_build(weights, tree)
        total = fenwick_total(tree)
        if not total > 0.0:
            return next_label, t, ERR_WEIGHTS
        j = fenwick_find(tree, weights, draws[t, 0] * total)
        share = weights[j] / total
        qx = draws[t, 1]
        qy = draws[t, 2]
        if _planar.nearest_sq_dist(qx, qy, pts, active, j, kind, g, head,
                                   nxt) < _planar.MIN_SEPARATION ** 2:
            return next_label, t, ERR_REDRAW
        rec_slot[t] = j
        rec_label[t] = labels[j]
        rec_share[t] = share
        rec_point[t, 0] = qx
        rec_point[t, 1] = qy
        nc, st = _planar.replace(j, qx, qy, pts, active, kind, g, head, nxt,
                                 bucket, polys, polylab, nverts, areas, nbrs,
                                 nnbrs, touches, bufx, bufy, buflab, tmpx,
                                 tmpy, tmplab, changed)
        if st != _planar.OK:
            return next_label, t, ERR_GEOMETRY
        labels[j] = next_label
        next_label += 1
        for q in range(nc):
            s = changed[q]
            wn = weight_of(mode, alpha, table, areas[s], nnbrs[s])
            fenwick_add(tree, s, wn - weights[s])
            weights[s] = wn
    return next_label, nsteps, ERR_NONE


@njit(cache=True)
def run_circle(nsteps, draws, alpha, weights, tree, labels, next_label,
               pos, order, rank, widths, changed, rec_slot, rec_label,
               rec_share, rec_point, step0):
    n = pos.shape[0]
    for t in range(nsteps):
        if (step0 + t) % FENWICK_REFRESH == 0:
            fenwick_build(weights, tree)
        total = fenwick_total(tree)
        if not total > 0.0:
            return next_label, t, ERR_WEIGHTS
        j = fenwick_find(tree, weights, draws[t, 0] * total)
        share = weights[j] / total
        q = draws[t, 1]
        # sorted neighbours of q are the only candidates for a near clash
        if _circle.too_close(q, j, pos, order, _planar.MIN_SEPARATION):
            return next_label, t, ERR_REDRAW
        rec_slot[t] = j
        rec_label[t] = labels[j]
        rec_share[t] = share
        rec_point[t, 0] = q
        nc = _circle.replace(j, q, pos, order, rank, widths, changed)
        labels[j] = next_label
        next_label += 1
        for k in range(nc):
            s = changed[k]
            wn = widths[s] ** alpha
            fenwick_add(tree, s, wn - weights[s])
            weights[s] = wn
    return next_label, nsteps, ERR_NONE
