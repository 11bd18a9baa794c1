"""numba kernels for disk-union areas and the birth-death chain.

Exact areas use Green's theorem on the boundary arcs of the region; the
midpoint-grid quadrature is kept for the clipped-to-the-square variant and
as an independent check.
"""
import numpy as np
from numba import njit

TWO_PI = 2.0 * np.pi
QUAD = 64


@njit(cache=True)
def _merge(lo, hi, m):
    """Sort and merge m intervals in place; returns the merged count."""
    # insertion sort on lo
    for a in range(1, m):
        l = lo[a]
        h = hi[a]
        b = a - 1
        while b >= 0 and lo[b] > l:
            lo[b + 1] = lo[b]
            hi[b + 1] = hi[b]
            b -= 1
        lo[b + 1] = l
        hi[b + 1] = h
    k = 0
    for a in range(m):
        if k > 0 and lo[a] <= hi[k - 1]:
            if hi[a] > hi[k - 1]:
                hi[k - 1] = hi[a]
        else:
            lo[k] = lo[a]
            hi[k] = hi[a]
            k += 1
    return k


@njit(cache=True)
def _add_interval(lo, hi, m, centre, half):
    a = (centre - half) % TWO_PI
    b = a + 2.0 * half
    if b <= TWO_PI:
        lo[m] = a
        hi[m] = b
        return m + 1
    lo[m] = a
    hi[m] = TWO_PI
    lo[m + 1] = 0.0
    hi[m + 1] = b - TWO_PI
    return m + 2


@njit(cache=True)
def _arc_integral(cx, cy, rho, t1, t2):
    # 1/2 * integral of (x dy - y dx) along the ccw arc t1 -> t2
    return 0.5 * (rho * (cx * (np.sin(t2) - np.sin(t1)) - cy * (np.cos(t2) - np.cos(t1)))
                  + rho * rho * (t2 - t1))


@njit(cache=True)
def _uncovered_integral(cx, cy, others_x, others_y, k, skip, rho, win_c, win_h,
                        lo, hi, clo, chi):
    """Green integral over arcs of circle (cx, cy) inside the window interval
    (centre win_c, half-width win_h; win_h < 0 means the full circle) that are
    not covered by disks others[:k] (excluding index skip)."""
    m = 0
    for q in range(k):
        if q == skip:
            continue
        dx = others_x[q] - cx
        dy = others_y[q] - cy
        d = np.sqrt(dx * dx + dy * dy)
        if d >= 2.0 * rho:
            continue
        half = np.arccos(d / (2.0 * rho))
        m = _add_interval(lo, hi, m, np.arctan2(dy, dx), half)
    m = _merge(lo, hi, m)
    # window pieces
    nw = 0
    if win_h < 0.0:
        clo[0] = 0.0
        chi[0] = TWO_PI
        nw = 1
    else:
        nw = _add_interval(clo, chi, 0, win_c, win_h)
    total = 0.0
    for w in range(nw):
        a = clo[w]
        b = chi[w]
        cur = a
        for q in range(m):
            if hi[q] <= cur:
                continue
            if lo[q] >= b:
                break
            if lo[q] > cur:
                total += _arc_integral(cx, cy, rho, cur, lo[q])
            if hi[q] > cur:
                cur = hi[q]
            if cur >= b:
                break
        if cur < b:
            total += _arc_integral(cx, cy, rho, cur, b)
    return total


@njit(cache=True)
def exclusive_area(ux, uy, nx, ny, k, rho, lo, hi, clo, chi):
    """Area of B(u, rho) minus the union of disks centred at (nx, ny)[:k].

    Coordinates are taken relative to u.  The region's boundary is the part
    of u's circle outside every other disk (counter-clockwise) plus the parts
    of the other circles inside B(u) and outside the rest (clockwise).
    """
    for q in range(k):
        nx[q] -= ux
        ny[q] -= uy
    area = _uncovered_integral(0.0, 0.0, nx, ny, k, -1, rho, 0.0, -1.0, lo, hi, clo, chi)
    for j in range(k):
        dx = -nx[j]
        dy = -ny[j]
        d = np.sqrt(dx * dx + dy * dy)
        if d >= 2.0 * rho:
            continue
        half = np.arccos(d / (2.0 * rho))
        area -= _uncovered_integral(nx[j], ny[j], nx, ny, k, j, rho,
                                    np.arctan2(dy, dx), half, lo, hi, clo, chi)
    for q in range(k):
        nx[q] += ux
        ny[q] += uy
    if area < 0.0:
        area = 0.0
    return area


@njit(cache=True)
def quadrature_exclusive_area(ux, uy, nx, ny, k, rho, clip, grid):
    """Midpoint rule on a grid x grid lattice over the bounding square of B(u)."""
    h = 2.0 * rho / grid
    r2 = rho * rho
    cnt = 0
    for a in range(grid):
        x = ux - rho + (a + 0.5) * h
        if clip and (x < 0.0 or x > 1.0):
            continue
        for b in range(grid):
            y = uy - rho + (b + 0.5) * h
            if clip and (y < 0.0 or y > 1.0):
                continue
            if (x - ux) ** 2 + (y - uy) ** 2 > r2:
                continue
            covered = False
            for q in range(k):
                if (x - nx[q]) ** 2 + (y - ny[q]) ** 2 <= r2:
                    covered = True
                    break
            if not covered:
                cnt += 1
    return cnt * h * h


# ---------------------------------------------------------------- spatial hash

@njit(cache=True)
def _bucket(x, y, g):
    bx = int(x * g)
    by = int(y * g)
    return min(max(bx, 0), g - 1), min(max(by, 0), g - 1)


@njit(cache=True)
def hash_insert(s, pts, g, head, nxt, prv, bucket):
    bx, by = _bucket(pts[s, 0], pts[s, 1], g)
    b = by * g + bx
    bucket[s] = b
    nxt[s] = head[b]
    prv[s] = -1
    if head[b] >= 0:
        prv[head[b]] = s
    head[b] = s


@njit(cache=True)
def hash_remove(s, head, nxt, prv, bucket):
    b = bucket[s]
    if prv[s] >= 0:
        nxt[prv[s]] = nxt[s]
    else:
        head[b] = nxt[s]
    if nxt[s] >= 0:
        prv[nxt[s]] = prv[s]
    nxt[s] = -1
    prv[s] = -1
    bucket[s] = -1


@njit(cache=True)
def gather(ux, uy, skip, pts, g, head, nxt, rho, nx, ny):
    """Centres within 2 rho of u (5x5 bucket neighbourhood, bucket side >= rho)."""
    bx, by = _bucket(ux, uy, g)
    k = 0
    lim = 4.0 * rho * rho
    for oy in range(-2, 3):
        cy = by + oy
        if cy < 0 or cy >= g:
            continue
        for ox in range(-2, 3):
            cx = bx + ox
            if cx < 0 or cx >= g:
                continue
            s = head[cy * g + cx]
            while s >= 0:
                if s != skip:
                    dx = pts[s, 0] - ux
                    dy = pts[s, 1] - uy
                    if dx * dx + dy * dy < lim:
                        if k >= nx.shape[0]:
                            return -1
                        nx[k] = pts[s, 0]
                        ny[k] = pts[s, 1]
                        k += 1
                s = nxt[s]
    return k


@njit(cache=True)
def new_area(ux, uy, skip, pts, g, head, nxt, rho, clip, nx, ny, lo, hi, clo, chi):
    k = gather(ux, uy, skip, pts, g, head, nxt, rho, nx, ny)
    if k < 0:
        return -1.0
    if clip:
        return quadrature_exclusive_area(ux, uy, nx, ny, k, rho, True, QUAD)
    return exclusive_area(ux, uy, nx, ny, k, rho, lo, hi, clo, chi)


# ---------------------------------------------------------------- chain

@njit(cache=True)
def run_chain(nsteps, draws, log_beta, log_gamma, rho, clip, pts, members, where,
              n, free, nfree, g, head, nxt, prv, bucket, coverage, nx, ny, lo, hi,
              clo, chi, trace_every, count_trace, cov_trace, step0):
    """Birth-death Metropolis-Hastings proposals, in place.

    draws[t] = (move, x, y, accept) uniforms; a death picks member
    floor(x * n).  Returns (steps done, n, nfree, coverage, accepted, error);
    error 2 means the slot pool is full and step `steps done` was not applied.
    """
    accepted = 0
    for t in range(nsteps):
        if draws[t, 0] < 0.5:
            ux = draws[t, 1]
            uy = draws[t, 2]
            a = new_area(ux, uy, -1, pts, g, head, nxt, rho, clip, nx, ny, lo, hi,
                         clo, chi)
            if a < 0.0:
                return t, n, nfree, coverage, accepted, 1
            log_ratio = log_beta - log_gamma * a - np.log(n + 1.0)
            if log_ratio >= 0.0 or np.log(draws[t, 3]) < log_ratio:
                if nfree == 0:
                    return t, n, nfree, coverage, accepted, 2
                nfree -= 1
                s = free[nfree]
                pts[s, 0] = ux
                pts[s, 1] = uy
                members[n] = s
                where[s] = n
                n += 1
                hash_insert(s, pts, g, head, nxt, prv, bucket)
                coverage += a
                accepted += 1
        elif n > 0:
            i = int(draws[t, 1] * n)
            if i >= n:
                i = n - 1
            s = members[i]
            a = new_area(pts[s, 0], pts[s, 1], s, pts, g, head, nxt, rho, clip, nx,
                         ny, lo, hi, clo, chi)
            if a < 0.0:
                return t, n, nfree, coverage, accepted, 1
            log_ratio = np.log(float(n)) - (log_beta - log_gamma * a)
            if log_ratio >= 0.0 or np.log(draws[t, 3]) < log_ratio:
                hash_remove(s, head, nxt, prv, bucket)
                last = members[n - 1]
                members[i] = last
                where[last] = i
                where[s] = -1
                n -= 1
                free[nfree] = s
                nfree += 1
                coverage -= a
                accepted += 1
        if trace_every > 0 and (step0 + t + 1) % trace_every == 0:
            ti = (step0 + t + 1) // trace_every - 1
            if 0 <= ti < count_trace.shape[0]:
                count_trace[ti] = n
                cov_trace[ti] = coverage
    return nsteps, n, nfree, coverage, accepted, 0


@njit(cache=True)
def union_area(pts, n, rho, g, head, nxt, nx, ny, lo, hi, clo, chi):
    """Exact area of the union of radius-rho disks at pts[:n] (unclipped)."""
    total = 0.0
    for s in range(n):
        ux = pts[s, 0]
        uy = pts[s, 1]
        k = gather(ux, uy, s, pts, g, head, nxt, rho, nx, ny)
        if k < 0:
            return -1.0
        # one common origin for every arc, or the Green sum is not closed
        for q in range(k):
            nx[q] -= 0.5
            ny[q] -= 0.5
        total += _uncovered_integral(ux - 0.5, uy - 0.5, nx, ny, k, -1, rho, 0.0, -1.0,
                                     lo, hi, clo, chi)
    return total
