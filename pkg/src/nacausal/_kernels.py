"""Compiled inner loops for envelope construction.

Every routine works on plain float64 arrays and performs the same operations
for a given column regardless of where that column sits, which the exchange
symmetry of NA-MEMD relies on. ``fastmath`` stays off for the same reason.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def local_extrema(x):
    """Interior strict extrema; a flat run counts once at its midpoint."""
    n = x.shape[0]
    imax = np.empty(n, np.int64)
    imin = np.empty(n, np.int64)
    nmax = 0
    nmin = 0
    # walk runs of equal values
    prev_val = x[0]
    run_start = 0
    i = 1
    while i < n and x[i] == prev_val:
        i += 1
    if i >= n:
        return imax[:0], imin[:0]
    prev_dir = 1 if x[i] > prev_val else -1
    while i < n:
        run_start = i
        val = x[i]
        while i + 1 < n and x[i + 1] == val:
            i += 1
        run_end = i
        if run_end + 1 >= n:
            break
        nxt = x[run_end + 1]
        new_dir = 1 if nxt > val else -1
        if prev_dir > 0 and new_dir < 0:
            imax[nmax] = (run_start + run_end) // 2
            nmax += 1
        elif prev_dir < 0 and new_dir > 0:
            imin[nmin] = (run_start + run_end) // 2
            nmin += 1
        prev_dir = new_dir
        i = run_end + 1
    return imax[:nmax], imin[:nmin]


@njit(cache=True)
def zero_crossings(x):
    count = 0
    last = 0.0
    for v in x:
        if v == 0.0:
            continue
        if last != 0.0 and (v > 0.0) != (last > 0.0):
            count += 1
        last = v
    return count


@njit(cache=True)
def _rev(a):
    return a[::-1].copy()


@njit(cache=True)
def _cat(a, b):
    out = np.empty(a.shape[0] + b.shape[0], np.int64)
    out[: a.shape[0]] = a
    out[a.shape[0]:] = b
    return out


@njit(cache=True)
def _one(v):
    out = np.empty(1, np.int64)
    out[0] = v
    return out


@njit(cache=True)
def _knots(left_src, left_sym, mid, right_src, right_sym):
    """Mirrored left part, the extrema themselves, mirrored right part.

    Returns sorted unique abscissae and the matching source sample indices.
    """
    nl, nm, nr = left_src.shape[0], mid.shape[0], right_src.shape[0]
    t = np.empty(nl + nm + nr, np.int64)
    s = np.empty(nl + nm + nr, np.int64)
    for j in range(nl):
        t[j] = 2 * left_sym - left_src[j]
        s[j] = left_src[j]
    for j in range(nm):
        t[nl + j] = mid[j]
        s[nl + j] = mid[j]
    for j in range(nr):
        t[nl + nm + j] = 2 * right_sym - right_src[j]
        s[nl + nm + j] = right_src[j]
    order = np.argsort(t, kind="mergesort")
    t = t[order]
    s = s[order]
    keep = np.ones(t.shape[0], np.bool_)
    for j in range(1, t.shape[0]):
        if t[j] == t[j - 1]:
            keep[j] = False
    return t[keep], s[keep]


@njit(cache=True)
def mirror_knots(imax, imin, x, nbsym):
    """Symmetric edge extension of the extrema sets (Rilling et al. 2003).

    Requires at least one maximum and one minimum.
    """
    last = x.shape[0] - 1
    if imax[0] < imin[0]:
        if x[0] > x[imin[0]]:
            lmax = _rev(imax[1:nbsym + 1])
            lmin = _rev(imin[:nbsym])
            lsym = imax[0]
        else:
            lmax = _rev(imax[:nbsym])
            lmin = _cat(_rev(imin[:nbsym - 1]), _one(0))
            lsym = 0
    else:
        if x[0] < x[imax[0]]:
            lmax = _rev(imax[:nbsym])
            lmin = _rev(imin[1:nbsym + 1])
            lsym = imin[0]
        else:
            lmax = _cat(_rev(imax[:nbsym - 1]), _one(0))
            lmin = _rev(imin[:nbsym])
            lsym = 0

    nx, nn = imax.shape[0], imin.shape[0]
    if imax[nx - 1] < imin[nn - 1]:
        if x[last] < x[imax[nx - 1]]:
            rmax = _rev(imax[max(nx - nbsym, 0):])
            rmin = _rev(imin[max(nn - nbsym - 1, 0):nn - 1])
            rsym = imin[nn - 1]
        else:
            rmax = _cat(_one(last), _rev(imax[max(nx - nbsym + 1, 0):]))
            rmin = _rev(imin[max(nn - nbsym, 0):])
            rsym = last
    else:
        if x[last] > x[imin[nn - 1]]:
            rmax = _rev(imax[max(nx - nbsym - 1, 0):nx - 1])
            rmin = _rev(imin[max(nn - nbsym, 0):])
            rsym = imax[nx - 1]
        else:
            rmax = _rev(imax[max(nx - nbsym, 0):])
            rmin = _cat(_one(last), _rev(imin[max(nn - nbsym + 1, 0):]))
            rsym = last

    # mirrored points must reach past the edge, else mirror about the edge itself
    reach_min = lmin.shape[0] > 0 and 2 * lsym - lmin[0] > 0
    reach_max = lmax.shape[0] > 0 and 2 * lsym - lmax[0] > 0
    if reach_min or reach_max:
        if lsym == imax[0]:
            lmax = _rev(imax[:nbsym])
        else:
            lmin = _rev(imin[:nbsym])
        lsym = 0
    reach_min = rmin.shape[0] > 0 and 2 * rsym - rmin[rmin.shape[0] - 1] < last
    reach_max = rmax.shape[0] > 0 and 2 * rsym - rmax[rmax.shape[0] - 1] < last
    if reach_min or reach_max:
        if rsym == imax[nx - 1]:
            rmax = _rev(imax[max(nx - nbsym, 0):])
        else:
            rmin = _rev(imin[max(nn - nbsym, 0):])
        rsym = last

    tmax, smax = _knots(lmax, lsym, imax, rmax, rsym)
    tmin, smin = _knots(lmin, lsym, imin, rmin, rsym)
    return tmax, smax, tmin, smin


@njit(cache=True)
def spline_slopes(t, y):
    """Knot slopes of the not-a-knot cubic interpolant through (t, y).

    ``y`` is (knots, channels). Two knots give the chord, three the parabola.
    From four knots on, the boundary rows are eliminated into their
    neighbours, leaving a strictly diagonally dominant tridiagonal system.
    """
    k, c = y.shape
    s = np.empty((k, c))
    dx = np.empty(k - 1)
    sl = np.empty((k - 1, c))
    for i in range(k - 1):
        dx[i] = t[i + 1] - t[i]
        for j in range(c):
            sl[i, j] = (y[i + 1, j] - y[i, j]) / dx[i]
    if k == 2:
        for j in range(c):
            s[0, j] = sl[0, j]
            s[1, j] = sl[0, j]
        return s
    if k == 3:
        for j in range(c):
            curv = (sl[1, j] - sl[0, j]) / (t[2] - t[0])
            s[0, j] = sl[0, j] - curv * dx[0]
            s[1, j] = sl[0, j] + curv * dx[0]
            s[2, j] = sl[1, j] + curv * dx[1]
        return s

    m = k - 2  # unknowns s[1..k-2]
    sub = np.zeros(m)
    diag = np.empty(m)
    sup = np.zeros(m)
    rhs = np.empty((m, c))
    span0 = t[2] - t[0]
    span1 = t[k - 1] - t[k - 3]
    b0 = np.empty(c)
    bl = np.empty(c)
    for j in range(c):
        b0[j] = ((dx[0] + 2.0 * span0) * dx[1] * sl[0, j] + dx[0] * dx[0] * sl[1, j]) / span0
        bl[j] = (dx[k - 2] * dx[k - 2] * sl[k - 3, j] + (2.0 * span1 + dx[k - 2]) * dx[k - 3] * sl[k - 2, j]) / span1
    for r in range(m):
        i = r + 1
        diag[r] = 2.0 * (dx[i - 1] + dx[i])
        if r > 0:
            sub[r] = dx[i]
        if r < m - 1:
            sup[r] = dx[i - 1]
        for j in range(c):
            rhs[r, j] = 3.0 * (dx[i] * sl[i - 1, j] + dx[i - 1] * sl[i, j])
    # fold the not-a-knot rows into the first and last unknowns
    diag[0] = span0
    diag[m - 1] = span1
    for j in range(c):
        rhs[0, j] -= b0[j]
        rhs[m - 1, j] -= bl[j]

    # Thomas elimination
    for r in range(1, m):
        w = sub[r] / diag[r - 1]
        diag[r] -= w * sup[r - 1]
        for j in range(c):
            rhs[r, j] -= w * rhs[r - 1, j]
    for j in range(c):
        s[m, j] = rhs[m - 1, j] / diag[m - 1]
    for r in range(m - 2, -1, -1):
        for j in range(c):
            s[r + 1, j] = (rhs[r, j] - sup[r] * s[r + 2, j]) / diag[r]
    for j in range(c):
        s[0, j] = (b0[j] - span0 * s[1, j]) / dx[1]
        s[k - 1, j] = (bl[j] - span1 * s[k - 2, j]) / dx[k - 3]
    return s


@njit(cache=True)
def spline_add(t, y, n, out):
    """Add the not-a-knot spline through (t, y), sampled at 0..n-1, into ``out``."""
    s = spline_slopes(t, y)
    k, c = y.shape
    j = 0
    for g in range(n):
        while j < k - 2 and g >= t[j + 1]:
            j += 1
        h = t[j + 1] - t[j]
        u = g - t[j]
        for ch in range(c):
            slope = (y[j + 1, ch] - y[j, ch]) / h
            c2 = (3.0 * slope - 2.0 * s[j, ch] - s[j + 1, ch]) / h
            c3 = (s[j, ch] + s[j + 1, ch] - 2.0 * slope) / (h * h)
            out[g, ch] += y[j, ch] + u * (s[j, ch] + u * (c2 + u * c3))


@njit(cache=True)
def envelope_sum(y, z, nbsym, out):
    """Add upper + lower envelopes of ``z`` (knots at the extrema of ``y``) into ``out``.

    Returns (usable, imf_shaped); ``out`` is untouched when not usable.
    """
    imax, imin = local_extrema(y)
    if imax.shape[0] < 2 or imin.shape[0] < 2:
        return False, True
    shaped = abs(imax.shape[0] + imin.shape[0] - zero_crossings(y)) <= 1
    n = y.shape[0]
    tmax, smax, tmin, smin = mirror_knots(imax, imin, y, nbsym)
    spline_add(tmax.astype(np.float64), z[smax], n, out)
    spline_add(tmin.astype(np.float64), z[smin], n, out)
    return True, shaped


@njit(cache=True)
def project(h, r):
    n, c = h.shape
    y = np.empty(n)
    for t in range(n):
        acc = h[t, 0] * r[0]
        if c > 1:
            acc = acc + h[t, 1] * r[1]
        for ch in range(2, c):
            acc = acc + h[t, ch] * r[ch]
        y[t] = acc
    return y


@njit(cache=True)
def directional_mean(h, directions, nbsym):
    """Envelope mean of ``h`` (samples x channels) averaged over projections.

    Directions are consumed in adjacent pairs whose contributions are summed
    before accumulation, so a direction set closed under swapping the first
    two coordinates yields a result that is exactly equivariant under
    swapping the first two channels.

    Returns (mean, usable projection count, all usable projections IMF-shaped).
    """
    n, c = h.shape
    total = np.zeros((n, c))
    first = np.empty((n, c))
    second = np.empty((n, c))
    count = 0
    shaped_all = True
    d = directions.shape[0]
    for p in range(0, d, 2):
        first[:] = 0.0
        ok_a, sh_a = envelope_sum(project(h, directions[p]), h, nbsym, first)
        ok_b = False
        sh_b = True
        if p + 1 < d:
            second[:] = 0.0
            ok_b, sh_b = envelope_sum(project(h, directions[p + 1]), h, nbsym, second)
        if ok_a and ok_b:
            total += first + second
        elif ok_a:
            total += first
        elif ok_b:
            total += second
        count += int(ok_a) + int(ok_b)
        shaped_all = shaped_all and (sh_a or not ok_a) and (sh_b or not ok_b)
    if count > 0:
        total /= 2.0 * count
    return total, count, shaped_all
