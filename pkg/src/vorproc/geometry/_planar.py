"""numba kernels for planar Voronoi cells on the unit square and flat torus.

Each cell is rebuilt independently: start from the domain box, clip by the
bisector half-planes of candidate generators found ring by ring in a bucket
grid, and stop once the next ring lies beyond twice the cell's radius.
A single-point replacement only rebuilds the cells adjacent to the removed
and inserted points, so per-step cost is local.
"""
import numpy as np
from numba import njit

SQUARE = 0
TORUS = 1

BOUNDARY = -1  # edge on the boundary of the unit square
SELF_IMAGE = -2  # torus box edge (bisector with a periodic copy of itself)

EDGE_EPS = 1e-12  # shared edges shorter than this are not adjacency
MIN_SEPARATION = 1e-12

OK = 0
ERR_OVERFLOW = 1


@njit(cache=True)
def grid_size(n):
    g = int(np.sqrt(n / 2.0))
    return max(g, 1)


@njit(cache=True)
def bucket_index(x, y, g):
    bx = int(x * g)
    by = int(y * g)
    if bx >= g:
        bx = g - 1
    if by >= g:
        by = g - 1
    if bx < 0:
        bx = 0
    if by < 0:
        by = 0
    return bx, by


@njit(cache=True)
def grid_insert(i, pts, g, head, nxt, bucket):
    bx, by = bucket_index(pts[i, 0], pts[i, 1], g)
    b = by * g + bx
    bucket[i] = b
    nxt[i] = head[b]
    head[b] = i


@njit(cache=True)
def grid_remove(i, head, nxt, bucket):
    b = bucket[i]
    j = head[b]
    if j == i:
        head[b] = nxt[i]
    else:
        while j >= 0:
            k = nxt[j]
            if k == i:
                nxt[j] = nxt[i]
                break
            j = k
    nxt[i] = -1
    bucket[i] = -1


@njit(cache=True)
def grid_build(pts, active, g, head, nxt, bucket):
    head[:] = -1
    nxt[:] = -1
    bucket[:] = -1
    for i in range(pts.shape[0] - 1, -1, -1):
        if active[i]:
            grid_insert(i, pts, g, head, nxt, bucket)


@njit(cache=True)
def _clip(vx, vy, lab, nv, ox, oy, olab, dx, dy, c, label):
    """Clip polygon (vx, vy, lab)[:nv] by {z : z.d <= c}; write into o*.

    lab[k] labels the edge from vertex k to vertex k+1.  Returns the new
    vertex count or -1 when the output buffer would overflow.
    """
    cap = ox.shape[0]
    m = 0
    for k in range(nv):
        k2 = k + 1 if k + 1 < nv else 0
        ax = vx[k]
        ay = vy[k]
        bx = vx[k2]
        by = vy[k2]
        da = ax * dx + ay * dy - c
        db = bx * dx + by * dy - c
        if da <= 0.0:
            if m >= cap:
                return -1
            ox[m] = ax
            oy[m] = ay
            olab[m] = lab[k]
            m += 1
            if db > 0.0 and da < 0.0:
                t = da / (da - db)
                if m >= cap:
                    return -1
                ox[m] = ax + t * (bx - ax)
                oy[m] = ay + t * (by - ay)
                olab[m] = label
                m += 1
            elif db > 0.0:
                # a sits on the line; the new edge starts at a
                olab[m - 1] = label
                # ...unless the edge a->b was the previous kept edge: handled
                # by the zero-length cleanup below
        else:
            if db < 0.0:
                t = da / (da - db)
                if m >= cap:
                    return -1
                ox[m] = ax + t * (bx - ax)
                oy[m] = ay + t * (by - ay)
                olab[m] = lab[k]
                m += 1
    return m


@njit(cache=True)
def _dedupe(vx, vy, lab, nv, eps):
    """Drop vertices whose outgoing edge has length <= eps."""
    if nv < 3:
        return nv
    changed = True
    while changed and nv >= 3:
        changed = False
        for k in range(nv):
            k2 = k + 1 if k + 1 < nv else 0
            ex = vx[k2] - vx[k]
            ey = vy[k2] - vy[k]
            if ex * ex + ey * ey <= eps * eps:
                # merge vertex k into k2: edge k vanishes; previous edge now
                # ends at k2
                for q in range(k, nv - 1):
                    vx[q] = vx[q + 1]
                    vy[q] = vy[q + 1]
                    lab[q] = lab[q + 1]
                nv -= 1
                changed = True
                break
    return nv


@njit(cache=True)
def compute_cell(i, pts, active, kind, g, head, nxt, bufx, bufy, buflab,
                 tmpx, tmpy, tmplab):
    """Build the cell of generator i in local coordinates (relative to pts[i]).

    Returns (nv, status).  The polygon lives in bufx/bufy/buflab[:nv];
    buflab holds the slot index of the neighbour across each edge, or
    BOUNDARY / SELF_IMAGE.
    """
    px = pts[i, 0]
    py = pts[i, 1]
    if kind == SQUARE:
        x0, x1, y0, y1 = -px, 1.0 - px, -py, 1.0 - py
        blab = BOUNDARY
    else:
        x0, x1, y0, y1 = -0.5, 0.5, -0.5, 0.5
        blab = SELF_IMAGE
    bufx[0] = x0
    bufy[0] = y0
    bufx[1] = x1
    bufy[1] = y0
    bufx[2] = x1
    bufy[2] = y1
    bufx[3] = x0
    bufy[3] = y1
    for k in range(4):
        buflab[k] = blab
    nv = 4
    maxr2 = 0.0
    for k in range(nv):
        r2 = bufx[k] * bufx[k] + bufy[k] * bufy[k]
        if r2 > maxr2:
            maxr2 = r2

    h = 1.0 / g
    bx, by = bucket_index(px, py, g)
    ring = 0
    while True:
        if ring >= 1:
            lo = (ring - 1) * h
            if lo * lo >= 4.0 * maxr2:
                break
        if kind == SQUARE and ring > g:
            break
        # buckets at Chebyshev distance == ring
        for oy in range(-ring, ring + 1):
            edge_row = oy == -ring or oy == ring
            step = 1 if edge_row else 2 * ring
            if step == 0:
                step = 1
            ox = -ring
            while ox <= ring:
                cx = bx + ox
                cy = by + oy
                sx = 0.0
                sy = 0.0
                valid = True
                if kind == SQUARE:
                    if cx < 0 or cx >= g or cy < 0 or cy >= g:
                        valid = False
                else:
                    qx = cx // g
                    qy = cy // g
                    sx = float(qx)
                    sy = float(qy)
                    cx = cx - qx * g
                    cy = cy - qy * g
                if valid:
                    j = head[cy * g + cx]
                    while j >= 0:
                        if j != i and active[j]:
                            dx = pts[j, 0] + sx - px
                            dy = pts[j, 1] + sy - py
                            d2 = dx * dx + dy * dy
                            if d2 < 4.0 * maxr2:
                                c = 0.5 * d2
                                # any vertex strictly outside?
                                cut = False
                                for k in range(nv):
                                    if bufx[k] * dx + bufy[k] * dy - c > 0.0:
                                        cut = True
                                        break
                                if cut:
                                    m = _clip(bufx, bufy, buflab, nv, tmpx,
                                              tmpy, tmplab, dx, dy, c, j)
                                    if m < 0:
                                        return 0, ERR_OVERFLOW
                                    m = _dedupe(tmpx, tmpy, tmplab, m, 1e-15)
                                    for k in range(m):
                                        bufx[k] = tmpx[k]
                                        bufy[k] = tmpy[k]
                                        buflab[k] = tmplab[k]
                                    nv = m
                                    maxr2 = 0.0
                                    for k in range(nv):
                                        r2 = bufx[k] * bufx[k] + bufy[k] * bufy[k]
                                        if r2 > maxr2:
                                            maxr2 = r2
                        j = nxt[j]
                ox += step
        ring += 1
    return nv, OK


@njit(cache=True)
def store_cell(i, nv, bufx, bufy, buflab, pts, polys, polylab, nverts, areas,
               nbrs, nnbrs, touches):
    """Copy a computed cell into the tessellation arrays.

    Neighbours are the distinct labels of edges longer than EDGE_EPS.
    Returns ERR_OVERFLOW if the storage is too small.
    """
    if nv > polys.shape[1]:
        return ERR_OVERFLOW
    px = pts[i, 0]
    py = pts[i, 1]
    a = 0.0
    for k in range(nv):
        k2 = k + 1 if k + 1 < nv else 0
        a += bufx[k] * bufy[k2] - bufx[k2] * bufy[k]
        polys[i, k, 0] = bufx[k] + px
        polys[i, k, 1] = bufy[k] + py
        polylab[i, k] = buflab[k]
    areas[i] = 0.5 * a
    nverts[i] = nv
    cnt = 0
    t = False
    for k in range(nv):
        k2 = k + 1 if k + 1 < nv else 0
        ex = bufx[k2] - bufx[k]
        ey = bufy[k2] - bufy[k]
        if ex * ex + ey * ey <= EDGE_EPS * EDGE_EPS:
            continue
        lab = buflab[k]
        if lab == BOUNDARY:
            t = True
        elif lab >= 0:
            dup = False
            for q in range(cnt):
                if nbrs[i, q] == lab:
                    dup = True
                    break
            if not dup:
                if cnt >= nbrs.shape[1]:
                    return ERR_OVERFLOW
                nbrs[i, cnt] = lab
                cnt += 1
    # sorted neighbour lists make outputs independent of clip order
    for a1 in range(1, cnt):
        v = nbrs[i, a1]
        b1 = a1 - 1
        while b1 >= 0 and nbrs[i, b1] > v:
            nbrs[i, b1 + 1] = nbrs[i, b1]
            b1 -= 1
        nbrs[i, b1 + 1] = v
    nnbrs[i] = cnt
    touches[i] = t
    return OK


@njit(cache=True)
def rebuild_cell(i, pts, active, kind, g, head, nxt, polys, polylab, nverts,
                 areas, nbrs, nnbrs, touches, bufx, bufy, buflab, tmpx, tmpy,
                 tmplab):
    nv, st = compute_cell(i, pts, active, kind, g, head, nxt, bufx, bufy,
                          buflab, tmpx, tmpy, tmplab)
    if st != OK:
        return st
    return store_cell(i, nv, bufx, bufy, buflab, pts, polys, polylab, nverts,
                      areas, nbrs, nnbrs, touches)


@njit(cache=True)
def rebuild_all(pts, active, kind, g, head, nxt, polys, polylab, nverts, areas,
                nbrs, nnbrs, touches, bufx, bufy, buflab, tmpx, tmpy, tmplab):
    for i in range(pts.shape[0]):
        if not active[i]:
            continue
        st = rebuild_cell(i, pts, active, kind, g, head, nxt, polys, polylab,
                          nverts, areas, nbrs, nnbrs, touches, bufx, bufy,
                          buflab, tmpx, tmpy, tmplab)
        if st != OK:
            return st
    return OK


@njit(cache=True)
def nearest_sq_dist(x, y, pts, active, skip, kind, g, head, nxt):
    """Squared distance from (x, y) to the nearest active point other than skip."""
    h = 1.0 / g
    bx, by = bucket_index(x, y, g)
    best = np.inf
    ring = 0
    while True:
        if ring >= 1:
            lo = (ring - 1) * h
            if lo * lo >= best:
                break
        if ring > g + 1:
            break
        for oy in range(-ring, ring + 1):
            edge_row = oy == -ring or oy == ring
            step = 1 if edge_row else 2 * ring
            if step == 0:
                step = 1
            ox = -ring
            while ox <= ring:
                cx = bx + ox
                cy = by + oy
                sx = 0.0
                sy = 0.0
                valid = True
                if kind == SQUARE:
                    if cx < 0 or cx >= g or cy < 0 or cy >= g:
                        valid = False
                else:
                    qx = cx // g
                    qy = cy // g
                    sx = float(qx)
                    sy = float(qy)
                    cx = cx - qx * g
                    cy = cy - qy * g
                if valid:
                    j = head[cy * g + cx]
                    while j >= 0:
                        if j != skip and active[j]:
                            dx = pts[j, 0] + sx - x
                            dy = pts[j, 1] + sy - y
                            d2 = dx * dx + dy * dy
                            if d2 < best:
                                best = d2
                        j = nxt[j]
                ox += step
        ring += 1
    return best


@njit(cache=True)
def replace(i, qx, qy, pts, active, kind, g, head, nxt, bucket, polys, polylab,
            nverts, areas, nbrs, nnbrs, touches, bufx, bufy, buflab, tmpx,
            tmpy, tmplab, changed):
    """Move generator slot i to (qx, qy), rebuilding only affected cells.

    Writes the changed slots into `changed` and returns (count, status).
    The caller guarantees the minimum separation of the new point.
    """
    nc = 0
    # removal: only the old neighbours of i can grow
    grid_remove(i, head, nxt, bucket)
    active[i] = False
    for q in range(nnbrs[i]):
        j = nbrs[i, q]
        changed[nc] = j
        nc += 1
    for q in range(nc):
        st = rebuild_cell(changed[q], pts, active, kind, g, head, nxt, polys,
                          polylab, nverts, areas, nbrs, nnbrs, touches, bufx,
                          bufy, buflab, tmpx, tmpy, tmplab)
        if st != OK:
            return nc, st
    # insertion: only the new neighbours of i can shrink
    pts[i, 0] = qx
    pts[i, 1] = qy
    active[i] = True
    grid_insert(i, pts, g, head, nxt, bucket)
    st = rebuild_cell(i, pts, active, kind, g, head, nxt, polys, polylab,
                      nverts, areas, nbrs, nnbrs, touches, bufx, bufy, buflab,
                      tmpx, tmpy, tmplab)
    if st != OK:
        return nc, st
    for q in range(nnbrs[i]):
        j = nbrs[i, q]
        st = rebuild_cell(j, pts, active, kind, g, head, nxt, polys, polylab,
                          nverts, areas, nbrs, nnbrs, touches, bufx, bufy,
                          buflab, tmpx, tmpy, tmplab)
        if st != OK:
            return nc, st
        seen = False
        for r in range(nc):
            if changed[r] == j:
                seen = True
                break
        if not seen:
            changed[nc] = j
            nc += 1
    changed[nc] = i
    nc += 1
    return nc, OK
