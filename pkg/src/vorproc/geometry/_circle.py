"""numba kernels for Voronoi cells on the circle of circumference 1."""
import numpy as np
from numba import njit


@njit(cache=True)
def _gap(a, b):
    # forward spacing from a to b on the circle
    d = b - a
    if d < 0.0:
        d += 1.0
    return d


@njit(cache=True)
def width_at(k, pos, order):
    n = order.shape[0]
    if n == 1:
        return 1.0
    x = pos[order[k]]
    left = pos[order[k - 1 if k > 0 else n - 1]]
    right = pos[order[k + 1 if k + 1 < n else 0]]
    if n == 2:
        return 0.5
    return 0.5 * (_gap(left, x) + _gap(x, right))


@njit(cache=True)
def all_widths(pos, order, widths):
    for k in range(order.shape[0]):
        widths[order[k]] = width_at(k, pos, order)


@njit(cache=True)
def replace(i, q, pos, order, rank, widths, changed):
    """Move slot i to position q, keeping `order` sorted.  Returns the number
    of changed slots written into `changed`."""
    n = order.shape[0]
    nc = 0
    if n == 1:
        pos[i] = q
        changed[0] = i
        return 1
    r = rank[i]
    changed[nc] = order[r - 1 if r > 0 else n - 1]
    nc += 1
    rr = order[r + 1 if r + 1 < n else 0]
    if rr != changed[0]:
        changed[nc] = rr
        nc += 1
    for k in range(r, n - 1):
        order[k] = order[k + 1]
    # binary search over the remaining n-1 sorted slots
    lo = 0
    hi = n - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if pos[order[mid]] < q:
            lo = mid + 1
        else:
            hi = mid
    for k in range(n - 1, lo, -1):
        order[k] = order[k - 1]
    order[lo] = i
    pos[i] = q
    a = min(r, lo)
    b = max(r, lo)
    for k in range(a, b + 1):
        rank[order[k]] = k
    for off in (-1, 1):
        k = lo + off
        if k < 0:
            k += n
        elif k >= n:
            k -= n
        s = order[k]
        seen = False
        for t in range(nc):
            if changed[t] == s:
                seen = True
        if not seen:
            changed[nc] = s
            nc += 1
    changed[nc] = i
    nc += 1
    for t in range(nc):
        widths[changed[t]] = width_at(rank[changed[t]], pos, order)
    return nc


@njit(cache=True)
def too_close(q, skip, pos, order, eps):
    """True if q lies within eps of any slot other than `skip`."""
    n = order.shape[0]
    lo = 0
    hi = n
    while lo < hi:
        mid = (lo + hi) // 2
        if pos[order[mid]] < q:
            lo = mid + 1
        else:
            hi = mid
    # predecessor and successor, with one extra on each side in case one is `skip`
    for off in range(-2, 2):
        k = (lo + off) % n
        s = order[k]
        if s == skip:
            continue
        d = abs(pos[s] - q)
        if min(d, 1.0 - d) < eps:
            return True
    return False
