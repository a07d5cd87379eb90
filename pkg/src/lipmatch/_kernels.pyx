# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""C kernels for the sliding-window operators.

Two families live here.  The morphological kernels (extremum, span_minmax,
span_rank) sweep offset-major with contiguous row access; the direct map
kernels evaluate every window independently, pixel-major, exactly as the
probing definition reads.  All windows are restricted to the image domain
and tolerant variants recompute the drop count from each border window's
actual cardinality.  Loops run without the GIL, so callers may partition
rows across threads.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, log, log1p
from libc.stdlib cimport free, malloc
from libc.string cimport memset

cnp.import_array()


# ---------------------------------------------------------------------------
# bounded heaps kept in flat scratch buffers (root = slot 0)

cdef inline void _minheap_push(double* h, Py_ssize_t n, double v) noexcept nogil:
    cdef Py_ssize_t i = n, p
    while i > 0:
        p = (i - 1) >> 1
        if h[p] <= v:
            break
        h[i] = h[p]
        i = p
    h[i] = v


cdef inline void _minheap_sift(double* h, Py_ssize_t n, double v) noexcept nogil:
    # replace root by v, restore heap of size n
    cdef Py_ssize_t i = 0, c
    while True:
        c = 2 * i + 1
        if c >= n:
            break
        if c + 1 < n and h[c + 1] < h[c]:
            c += 1
        if h[c] >= v:
            break
        h[i] = h[c]
        i = c
    h[i] = v


cdef inline void _maxheap_push(double* h, Py_ssize_t n, double v) noexcept nogil:
    cdef Py_ssize_t i = n, p
    while i > 0:
        p = (i - 1) >> 1
        if h[p] >= v:
            break
        h[i] = h[p]
        i = p
    h[i] = v


cdef inline void _maxheap_sift(double* h, Py_ssize_t n, double v) noexcept nogil:
    cdef Py_ssize_t i = 0, c
    while True:
        c = 2 * i + 1
        if c >= n:
            break
        if c + 1 < n and h[c + 1] > h[c]:
            c += 1
        if h[c] <= v:
            break
        h[i] = h[c]
        i = c
    h[i] = v


cdef inline double _minheap_shrink(double* h, Py_ssize_t n, Py_ssize_t keep) noexcept nogil:
    # pop the smallest until `keep` remain; return the new root
    cdef double last
    while n > keep:
        n -= 1
        last = h[n]
        _minheap_sift(h, n, last)
    return h[0]


cdef inline double _maxheap_shrink(double* h, Py_ssize_t n, Py_ssize_t keep) noexcept nogil:
    cdef double last
    while n > keep:
        n -= 1
        last = h[n]
        _maxheap_sift(h, n, last)
    return h[0]


cdef inline void _admit_top(double* tbuf, int* ts, double* tthr,
                            Py_ssize_t x, Py_ssize_t cap, double v) noexcept nogil:
    # v passed the packed threshold: enter the "cap largest" min-heap
    cdef double* th = tbuf + x * cap
    if ts[x] < cap:
        _minheap_push(th, ts[x], v)
        ts[x] += 1
        if ts[x] == cap:
            tthr[x] = th[0]
    else:
        _minheap_sift(th, cap, v)
        tthr[x] = th[0]


cdef inline void _admit_bot(double* bbuf, int* bs, double* bthr,
                            Py_ssize_t x, Py_ssize_t cap, double v) noexcept nogil:
    cdef double* bh = bbuf + x * cap
    if bs[x] < cap:
        _maxheap_push(bh, bs[x], v)
        bs[x] += 1
        if bs[x] == cap:
            bthr[x] = bh[0]
    else:
        _maxheap_sift(bh, cap, v)
        bthr[x] = bh[0]


# ---------------------------------------------------------------------------
# morphological kernels (offset-major)

# output tiles sized to keep the running accumulators cache-resident
DEF BLK_ROWS = 16


def extremum(double[:, ::1] u, long[::1] oy, long[::1] ox, double[::1] w,
             bint want_max, double empty_val):
    """Extremum over {u(x+h) + w(h) : x+h in domain}; empty windows get empty_val."""
    cdef Py_ssize_t H = u.shape[0], W = u.shape[1], n = oy.shape[0]
    cdef cnp.ndarray out_arr = np.full((H, W), -INFINITY if want_max else INFINITY)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t j, y, x, y0, y1, rr0, rr1, c0, c1, dy, dx
    cdef double wj, v, ov
    with nogil:
        for y0 in range(0, H, BLK_ROWS):
            y1 = y0 + BLK_ROWS
            if y1 > H:
                y1 = H
            for j in range(n):
                dy = oy[j]; dx = ox[j]; wj = w[j]
                rr0 = y0 if y0 >= -dy else -dy
                rr1 = y1 if y1 <= H - dy else H - dy
                c0 = -dx if dx < 0 else 0
                c1 = W - dx if dx > 0 else W
                if want_max:
                    for y in range(rr0, rr1):
                        for x in range(c0, c1):
                            v = u[y + dy, x + dx] + wj
                            ov = out[y, x]
                            out[y, x] = v if v > ov else ov
                else:
                    for y in range(rr0, rr1):
                        for x in range(c0, c1):
                            v = u[y + dy, x + dx] + wj
                            ov = out[y, x]
                            out[y, x] = v if v < ov else ov
    cdef double init = -INFINITY if want_max else INFINITY
    if empty_val != init:
        out_arr[np.isinf(out_arr) & _empty_mask((H, W), oy, ox)] = empty_val
    return out_arr


def _empty_mask(shape, oy, ox):
    from ._kernels_py import window_counts
    return window_counts(shape[0], shape[1], np.asarray(oy), np.asarray(ox)) == 0


def span_minmax(double[:, ::1] u, long[::1] oy, long[::1] ox, double[::1] w):
    """(max, min) over {u(x+h) + w(h)} per pixel in one sweep."""
    cdef Py_ssize_t H = u.shape[0], W = u.shape[1], n = oy.shape[0]
    cdef cnp.ndarray hi_arr = np.full((H, W), -INFINITY)
    cdef cnp.ndarray lo_arr = np.full((H, W), INFINITY)
    cdef double[:, ::1] hi = hi_arr
    cdef double[:, ::1] lo = lo_arr
    cdef Py_ssize_t j, y, x, y0, y1, rr0, rr1, c0, c1, cc0, cc1, x0, x1, dy, dx
    cdef double wj, v, hv, lv
    with nogil:
        for y0 in range(0, H, BLK_ROWS):
            y1 = y0 + BLK_ROWS
            if y1 > H:
                y1 = H
            x0 = 0
            while x0 < W:
                x1 = x0 + 192
                if x1 > W:
                    x1 = W
                for j in range(n):
                    dy = oy[j]; dx = ox[j]; wj = w[j]
                    rr0 = y0 if y0 >= -dy else -dy
                    rr1 = y1 if y1 <= H - dy else H - dy
                    c0 = -dx if dx < 0 else 0
                    c1 = W - dx if dx > 0 else W
                    cc0 = c0 if c0 > x0 else x0
                    cc1 = c1 if c1 < x1 else x1
                    for y in range(rr0, rr1):
                        for x in range(cc0, cc1):
                            v = u[y + dy, x + dx] + wj
                            hv = hi[y, x]
                            lv = lo[y, x]
                            hi[y, x] = v if v > hv else hv
                            lo[y, x] = v if v < lv else lv
                x0 = x1
    return hi_arr, lo_arr


def span_rank(double[:, ::1] u, long[::1] oy, long[::1] ox, double[::1] w,
              double drop_frac):
    """Per-window order statistics of {u(x+h) + w(h)}.

    Returns (top, bot) where, for a window of n samples and
    k = floor(drop_frac * n), top is the (k+1)-th largest and bot the
    (k+1)-th smallest value.  Empty windows give (-inf, +inf).
    Pixels are processed in column blocks so the per-pixel selection
    buffers stay in L1.
    """
    cdef Py_ssize_t H = u.shape[0], W = u.shape[1], n = oy.shape[0]
    cdef cnp.ndarray top_arr = np.empty((H, W))
    cdef cnp.ndarray bot_arr = np.empty((H, W))
    cdef double[:, ::1] top = top_arr
    cdef double[:, ::1] bot = bot_arr
    cdef Py_ssize_t cap = <Py_ssize_t>(drop_frac * n) + 1
    # block width chosen so the image rows under the probe plus the
    # selection buffers stay L1-resident
    cdef Py_ssize_t rspan = 1, cspan = 1, j
    for j in range(n):
        if oy[j] < -rspan or oy[j] > rspan:
            rspan = -oy[j] if oy[j] < 0 else oy[j]
        if ox[j] < -cspan or ox[j] > cspan:
            cspan = -ox[j] if ox[j] < 0 else ox[j]
    cdef Py_ssize_t blk = (24576 - 16 * (2 * rspan + 1) * cspan) // (
        16 * (rspan + cap) + 72
    )
    if blk < 16:
        blk = 16
    if blk > 256:
        blk = 256
    if blk > W:
        blk = W
    cdef double* tbuf = <double*>malloc(blk * cap * sizeof(double))
    cdef int* ts = <int*>malloc(blk * sizeof(int))
    cdef double* tthr = <double*>malloc(blk * sizeof(double))
    cdef double* bbuf = <double*>malloc(blk * cap * sizeof(double))
    cdef int* bs = <int*>malloc(blk * sizeof(int))
    cdef double* bthr = <double*>malloc(blk * sizeof(double))
    cdef int* cdelta = <int*>malloc((blk + 1) * sizeof(int))
    cdef int* tidx = <int*>malloc(blk * sizeof(int))
    cdef double* tval = <double*>malloc(blk * sizeof(double))
    cdef int* bidx = <int*>malloc(blk * sizeof(int))
    cdef double* bval = <double*>malloc(blk * sizeof(double))
    cdef long* soy = <long*>malloc(n * sizeof(long))
    cdef long* sox = <long*>malloc(n * sizeof(long))
    cdef double* sw = <double*>malloc(n * sizeof(double))
    if (tbuf == NULL or ts == NULL or tthr == NULL or bbuf == NULL
            or bs == NULL or bthr == NULL or cdelta == NULL
            or tidx == NULL or tval == NULL or bidx == NULL or bval == NULL
            or soy == NULL or sox == NULL or sw == NULL):
        free(tbuf); free(ts); free(tthr); free(bbuf); free(bs); free(bthr)
        free(cdelta); free(tidx); free(tval); free(bidx); free(bval)
        free(soy); free(sox); free(sw)
        raise MemoryError()
    # feed offsets in a fixed pseudo-random order: the selection result is
    # order-independent, but monotone runs in smooth images would otherwise
    # turn every sample into a new record and flood the heaps
    cdef unsigned long long state = 0x9E3779B97F4A7C15ULL
    cdef Py_ssize_t jj, pick
    for jj in range(n):
        soy[jj] = oy[jj]; sox[jj] = ox[jj]; sw[jj] = w[jj]
    for jj in range(n - 1, 0, -1):
        state = state * 6364136223846793005ULL + 1442695040888963407ULL
        pick = <Py_ssize_t>((state >> 33) % <unsigned long long>(jj + 1))
        if pick != jj:
            soy[jj], soy[pick] = soy[pick], soy[jj]
            sox[jj], sox[pick] = sox[pick], sox[jj]
            sw[jj], sw[pick] = sw[pick], sw[jj]
    cdef Py_ssize_t y, x, xi, x0, x1, c0, c1, dy, dx, yy, k, nn, i, mt, mb
    cdef double wj, v
    cdef double* up
    cdef bint at, ab
    with nogil:
        for y in range(H):
            x0 = 0
            while x0 < W:
                x1 = x0 + blk
                if x1 > W:
                    x1 = W
                memset(ts, 0, (x1 - x0) * sizeof(int))
                memset(bs, 0, (x1 - x0) * sizeof(int))
                memset(cdelta, 0, (x1 - x0 + 1) * sizeof(int))
                for x in range(x1 - x0):
                    tthr[x] = -INFINITY
                    bthr[x] = INFINITY
                for j in range(n):
                    dy = soy[j]
                    yy = y + dy
                    if yy < 0 or yy >= H:
                        continue
                    dx = sox[j]; wj = sw[j]
                    c0 = -dx if dx < 0 else 0
                    c1 = W - dx if dx > 0 else W
                    if c0 < x0:
                        c0 = x0
                    if c1 > x1:
                        c1 = x1
                    if c0 >= c1:
                        continue
                    cdelta[c0 - x0] += 1
                    cdelta[c1 - x0] -= 1
                    up = &u[yy, 0] + dx + x0
                    # branch-free admission scan, rare-path processing after
                    mt = 0
                    mb = 0
                    for xi in range(c0 - x0, c1 - x0):
                        v = up[xi] + wj
                        at = v > tthr[xi]
                        ab = v < bthr[xi]
                        tidx[mt] = <int>xi
                        tval[mt] = v
                        mt += at
                        bidx[mb] = <int>xi
                        bval[mb] = v
                        mb += ab
                    for i in range(mt):
                        _admit_top(tbuf, ts, tthr, tidx[i], cap, tval[i])
                    for i in range(mb):
                        _admit_bot(bbuf, bs, bthr, bidx[i], cap, bval[i])
                nn = 0
                for x in range(x0, x1):
                    nn += cdelta[x - x0]
                    xi = x - x0
                    if nn == 0:
                        top[y, x] = -INFINITY
                        bot[y, x] = INFINITY
                        continue
                    k = <Py_ssize_t>(drop_frac * nn)
                    top[y, x] = _minheap_shrink(tbuf + xi * cap, ts[xi], k + 1)
                    bot[y, x] = _maxheap_shrink(bbuf + xi * cap, bs[xi], k + 1)
                x0 = x1
    free(tbuf); free(ts); free(tthr); free(bbuf); free(bs); free(bthr)
    free(cdelta); free(tidx); free(tval); free(bidx); free(bval)
    free(soy); free(sox); free(sw)
    return top_arr, bot_arr


def rank_fixed(double[:, ::1] u, long[::1] oy, long[::1] ox, double[::1] w,
               bint top_side, long k, double empty_val):
    """(k+1)-th largest (top) or smallest of {u(x+h) + w(h)}; fixed drop count.

    Callers must ensure k < window cardinality everywhere.
    """
    cdef Py_ssize_t H = u.shape[0], W = u.shape[1], n = oy.shape[0]
    cdef cnp.ndarray out_arr = np.empty((H, W))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t cap = k + 1
    cdef double* buf = <double*>malloc(cap * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t j, y, x, yy, xx, sz
    cdef double v
    with nogil:
        for y in range(H):
            for x in range(W):
                sz = 0
                for j in range(n):
                    yy = y + oy[j]
                    if yy < 0 or yy >= H:
                        continue
                    xx = x + ox[j]
                    if xx < 0 or xx >= W:
                        continue
                    v = u[yy, xx] + w[j]
                    if top_side:
                        if sz < cap:
                            _minheap_push(buf, sz, v)
                            sz += 1
                        elif v > buf[0]:
                            _minheap_sift(buf, cap, v)
                    else:
                        if sz < cap:
                            _maxheap_push(buf, sz, v)
                            sz += 1
                        elif v < buf[0]:
                            _maxheap_sift(buf, cap, v)
                out[y, x] = buf[0] if sz == cap else empty_val
    free(buf)
    return out_arr


# ---------------------------------------------------------------------------
# direct map kernels (pixel-major double-sided probing)

cdef void _sort_inplace(double* a, Py_ssize_t n) noexcept nogil:
    # iterative quicksort, median-of-three pivot, insertion sort for small runs
    cdef Py_ssize_t lo_st[64]
    cdef Py_ssize_t hi_st[64]
    cdef Py_ssize_t sp = 0, lo = 0, hi = n - 1, i, j, mid
    cdef double pivot, tmp
    if n < 2:
        return
    while True:
        if hi - lo < 16:
            for i in range(lo + 1, hi + 1):
                pivot = a[i]
                j = i - 1
                while j >= lo and a[j] > pivot:
                    a[j + 1] = a[j]
                    j -= 1
                a[j + 1] = pivot
            if sp == 0:
                return
            sp -= 1
            lo = lo_st[sp]
            hi = hi_st[sp]
            continue
        mid = lo + ((hi - lo) >> 1)
        if a[mid] < a[lo]:
            tmp = a[mid]; a[mid] = a[lo]; a[lo] = tmp
        if a[hi] < a[mid]:
            tmp = a[hi]; a[hi] = a[mid]; a[mid] = tmp
            if a[mid] < a[lo]:
                tmp = a[mid]; a[mid] = a[lo]; a[lo] = tmp
        pivot = a[mid]
        i = lo; j = hi
        while i <= j:
            while a[i] < pivot:
                i += 1
            while a[j] > pivot:
                j -= 1
            if i <= j:
                tmp = a[i]; a[i] = a[j]; a[j] = tmp
                i += 1; j -= 1
        # recurse into the smaller side first, stack the larger
        if j - lo < hi - i:
            if i < hi:
                lo_st[sp] = i; hi_st[sp] = hi; sp += 1
            hi = j
        else:
            if lo < j:
                lo_st[sp] = lo; hi_st[sp] = j; sp += 1
            lo = i
        if lo >= hi:
            if sp == 0:
                return
            sp -= 1
            lo = lo_st[sp]
            hi = hi_st[sp]


cdef inline void _direct_window(double[:, ::1] f, long* oy, long* ox, Py_ssize_t n,
                                Py_ssize_t H, Py_ssize_t W, Py_ssize_t y, Py_ssize_t x,
                                bint check, bint mult, double* bv1, double* bv2,
                                double m, double drop_frac, double* buf,
                                double* res_top, double* res_bot, Py_ssize_t* res_n) noexcept nogil:
    # one window of the direct evaluation: compute the contrasts, then take
    # the order statistics of the collected values
    cdef Py_ssize_t j, yy, xx, nn = 0, k
    cdef double v, fv, gtop = -INFINITY, gbot = INFINITY
    for j in range(n):
        yy = y + oy[j]
        xx = x + ox[j]
        if check:
            if yy < 0 or yy >= H or xx < 0 or xx >= W:
                continue
        fv = f[yy, xx]
        if mult:
            v = log1p(-fv / m) / bv1[j]
        else:
            v = (fv - bv1[j]) / bv2[j]
        if drop_frac == 0.0:
            if v > gtop:
                gtop = v
            if v < gbot:
                gbot = v
            nn += 1
        else:
            buf[nn] = v
            nn += 1
    if nn > 0 and drop_frac != 0.0:
        _sort_inplace(buf, nn)
        k = <Py_ssize_t>(drop_frac * nn)
        gbot = buf[k]
        gtop = buf[nn - 1 - k]
    res_top[0] = gtop
    res_bot[0] = gbot
    res_n[0] = nn


def map_direct(double[:, ::1] f, long[::1] oy, long[::1] ox,
               double[::1] b1, double[::1] b2, double m,
               double drop_frac, bint mult):
    """Direct per-window probing distance map.

    mult: window sample -> ln(1 - f/m)/b1 (b1 = probe log-transmittances),
    map value ln(top/bot).  Additive: sample -> (f - b1)/b2, map value
    (top - bot)/(1 - bot/m).  Empty windows give 0.
    """
    cdef Py_ssize_t H = f.shape[0], W = f.shape[1], n = oy.shape[0]
    cdef cnp.ndarray out_arr = np.empty((H, W))
    cdef double[:, ::1] out = out_arr
    cdef double* buf = <double*>malloc(n * sizeof(double))
    cdef long* coy = <long*>malloc(n * sizeof(long))
    cdef long* cox = <long*>malloc(n * sizeof(long))
    cdef double* cb1 = <double*>malloc(n * sizeof(double))
    cdef double* cb2 = <double*>malloc(n * sizeof(double))
    if buf == NULL or coy == NULL or cox == NULL or cb1 == NULL or cb2 == NULL:
        free(buf); free(coy); free(cox); free(cb1); free(cb2)
        raise MemoryError()
    cdef Py_ssize_t j, y, x
    cdef Py_ssize_t ry0 = 0, ry1 = H, rx0 = 0, rx1 = W
    for j in range(n):
        coy[j] = oy[j]; cox[j] = ox[j]; cb1[j] = b1[j]
        cb2[j] = b2[j] if b2.shape[0] == n else 1.0
        if -oy[j] > ry0: ry0 = -oy[j]
        if H - oy[j] < ry1: ry1 = H - oy[j]
        if -ox[j] > rx0: rx0 = -ox[j]
        if W - ox[j] < rx1: rx1 = W - ox[j]
    if ry0 > ry1: ry0 = ry1
    if rx0 > rx1: rx0 = rx1
    cdef double gtop, gbot
    cdef Py_ssize_t nn
    with nogil:
        for y in range(H):
            for x in range(W):
                if ry0 <= y < ry1 and rx0 <= x < rx1:
                    _direct_window(f, coy, cox, n, H, W, y, x, False, mult,
                                   cb1, cb2, m, drop_frac, buf,
                                   &gtop, &gbot, &nn)
                else:
                    _direct_window(f, coy, cox, n, H, W, y, x, True, mult,
                                   cb1, cb2, m, drop_frac, buf,
                                   &gtop, &gbot, &nn)
                if nn == 0:
                    out[y, x] = 0.0
                elif mult:
                    out[y, x] = log(gtop / gbot)
                else:
                    out[y, x] = (gtop - gbot) / (1.0 - gbot / m)
    free(buf); free(coy); free(cox); free(cb1); free(cb2)
    return out_arr


# ---------------------------------------------------------------------------
# reconstruction by erosion (raster/anti-raster sweeps)

def reconstruct_erosion(double[:, ::1] marker, double[:, ::1] mask):
    """Geodesic reconstruction by erosion (8-connectivity), marker >= mask."""
    cdef Py_ssize_t H = marker.shape[0], W = marker.shape[1]
    cdef cnp.ndarray r_arr = np.array(marker, dtype=np.float64, copy=True)
    cdef double[:, ::1] r = r_arr
    cdef Py_ssize_t y, x
    cdef double v, e
    cdef bint changed = True
    with nogil:
        while changed:
            changed = False
            for y in range(H):
                for x in range(W):
                    e = r[y, x]
                    if y > 0:
                        if r[y - 1, x] < e: e = r[y - 1, x]
                        if x > 0 and r[y - 1, x - 1] < e: e = r[y - 1, x - 1]
                        if x < W - 1 and r[y - 1, x + 1] < e: e = r[y - 1, x + 1]
                    if x > 0 and r[y, x - 1] < e: e = r[y, x - 1]
                    v = mask[y, x] if mask[y, x] > e else e
                    if v != r[y, x]:
                        r[y, x] = v
                        changed = True
            for y in range(H - 1, -1, -1):
                for x in range(W - 1, -1, -1):
                    e = r[y, x]
                    if y < H - 1:
                        if r[y + 1, x] < e: e = r[y + 1, x]
                        if x > 0 and r[y + 1, x - 1] < e: e = r[y + 1, x - 1]
                        if x < W - 1 and r[y + 1, x + 1] < e: e = r[y + 1, x + 1]
                    if x < W - 1 and r[y, x + 1] < e: e = r[y, x + 1]
                    v = mask[y, x] if mask[y, x] > e else e
                    if v != r[y, x]:
                        r[y, x] = v
                        changed = True
    return r_arr
