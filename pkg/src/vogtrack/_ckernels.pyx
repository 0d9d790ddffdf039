# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_pykernels``; outputs are identical."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def block_mean(const unsigned char[:, ::1] a, int factor):
    cdef Py_ssize_t h = a.shape[0] // factor
    cdef Py_ssize_t w = a.shape[1] // factor
    cdef Py_ssize_t oy, ox, y, x
    cdef long n = factor * factor
    cdef long s
    out = np.empty((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    cdef long[::1] acc = np.zeros(w, dtype=np.int_)
    for oy in range(h):
        for ox in range(w):
            acc[ox] = 0
        for y in range(oy * factor, (oy + 1) * factor):
            for ox in range(w):
                s = 0
                for x in range(ox * factor, (ox + 1) * factor):
                    s += a[y, x]
                acc[ox] += s
        for ox in range(w):
            o[oy, ox] = <unsigned char>((acc[ox] + n // 2) // n)
    return out


cdef inline int _find(int[::1] parent, int i) nogil:
    cdef int r = i
    while parent[r] != r:
        r = parent[r]
    cdef int nxt
    while parent[i] != r:
        nxt = parent[i]
        parent[i] = r
        i = nxt
    return r


cdef inline void _union(int[::1] parent, int a, int b) nogil:
    a = _find(parent, a)
    b = _find(parent, b)
    if a < b:
        parent[b] = a
    elif b < a:
        parent[a] = b


def label8(mask):
    """Two-pass union-find labelling; labels follow raster order of first pixel."""
    cdef const unsigned char[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    out = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] lab = out
    cdef int[::1] parent = np.zeros(h * w + 1, dtype=np.int32)
    cdef int nxt = 1
    cdef Py_ssize_t y, x
    cdef int cur
    for y in range(h):
        for x in range(w):
            if not m[y, x]:
                continue
            cur = 0
            if x > 0 and lab[y, x - 1]:
                cur = lab[y, x - 1]
            if y > 0:
                if x > 0 and lab[y - 1, x - 1]:
                    if cur:
                        _union(parent, cur, lab[y - 1, x - 1])
                    else:
                        cur = lab[y - 1, x - 1]
                if lab[y - 1, x]:
                    if cur:
                        _union(parent, cur, lab[y - 1, x])
                    else:
                        cur = lab[y - 1, x]
                if x + 1 < w and lab[y - 1, x + 1]:
                    if cur:
                        _union(parent, cur, lab[y - 1, x + 1])
                    else:
                        cur = lab[y - 1, x + 1]
            if not cur:
                cur = nxt
                parent[cur] = cur
                nxt += 1
            lab[y, x] = cur
    # provisional roots are minimal provisional ids, and provisional ids grow in
    # raster order, so renumbering roots in increasing order reproduces the
    # first-pixel raster ordering of the BFS reference
    cdef int[::1] final = np.zeros(nxt, dtype=np.int32)
    cdef int count = 0
    cdef int i, r
    for i in range(1, nxt):
        r = _find(parent, i)
        if r == i:
            count += 1
            final[i] = count
    for y in range(h):
        for x in range(w):
            if lab[y, x]:
                lab[y, x] = final[_find(parent, lab[y, x])]
    return out, count


cdef inline bint _probe(const unsigned char[:, ::1] img, Py_ssize_t x, Py_ssize_t y,
                        int direction, double bright, long[::1] probes):
    cdef Py_ssize_t rows = img.shape[0]
    cdef long total = 0
    cdef Py_ssize_t i, yy
    for i in range(probes.shape[0]):
        yy = y + direction * probes[i]
        if yy < 0:
            yy = 0
        elif yy > rows - 1:
            yy = rows - 1
        total += img[yy, x]
    return total >= bright * probes.shape[0]


cdef enum:
    END_GAP = 4  # same as _pykernels.END_GAP


cdef inline long _iabs(long v):
    return -v if v < 0 else v


cdef inline bint _enclosed(const unsigned char[:, ::1] img, long x, long y, long reach,
                           double threshold):
    cdef long w = img.shape[1]
    if x - reach < 0 or x + reach >= w:
        return False
    return img[y, x - reach] <= threshold and img[y, x + reach] <= threshold


cdef inline bint _joined(const unsigned char[:, ::1] img, long x, long y, long xp, long yp,
                         double threshold):
    cdef long lo = y if y < yp else yp
    cdef long hi = yp if y < yp else y
    cdef long yy
    yy = lo
    while yy <= hi and img[yy, x] <= threshold:
        yy += 1
    if yy > hi:
        return True
    yy = lo
    while yy <= hi and img[yy, xp] <= threshold:
        yy += 1
    return yy > hi


cdef long _slab(const unsigned char[:, ::1] img, long x, long xp, long anchor, long height,
                int direction, double threshold, double bright, long[::1] probes,
                long y0, long y1, bint nearest, long *visited, bint *passed):
    cdef long rows = img.shape[0]
    cdef long top = anchor - height // 2
    cdef long lo = top if top > y0 else y0
    cdef long hi = top + height - 1
    cdef long yy, best = -1
    if lo < 1:
        lo = 1
    if hi > y1:
        hi = y1
    if hi > rows - 2:
        hi = rows - 2
    yy = lo if direction < 0 else hi
    while lo <= yy <= hi:
        visited[0] += 1
        if img[yy, x] <= threshold and img[yy + direction, x] > threshold:
            if not (nearest and best >= 0 and _iabs(yy - anchor) >= _iabs(best - anchor)):
                if _joined(img, x, yy, xp, anchor, threshold):
                    best = yy
                    if not nearest:
                        break
        yy -= direction
    passed[0] = best >= 0 and _probe(img, x, best, direction, bright, probes)
    return best


def zigzag(img, double threshold, double sclera_threshold, long xc, long yc,
           bbox, long slab0, probes=(2, 3), long max_gap=4):
    cdef const unsigned char[:, ::1] im = np.ascontiguousarray(img, dtype=np.uint8)
    cdef long[::1] pr = np.asarray(probes, dtype=np.int_)
    cdef long x0 = bbox[0], y0 = bbox[1], x1 = bbox[2], y1 = bbox[3]
    cdef long rows = im.shape[0]
    cdef long width = x1 - x0 + 1
    cdef long visited = 0
    cdef long g, y, nb, anchor0, anchor, k, x, xp, row, last_x, last_y, height, misses
    cdef int side, other, direction, step, si, sti
    cdef bint ok, sampled
    xs, ys, sides = [], [], []
    ends = []
    # columns already sampled, per side
    cdef unsigned char[:, ::1] taken = np.zeros((2, max(width, 1)), dtype=np.uint8)

    for si in range(2):
        side = si
        direction = -1 if si == 0 else 1
        y = yc
        while True:
            while y0 <= y + direction <= y1 and im[y + direction, xc] <= threshold:
                y += direction
                visited += 1
            g = 1
            while g <= max_gap and y0 <= y + direction * g <= y1 and im[y + direction * g, xc] > threshold:
                g += 1
                visited += 1
            if (g <= max_gap and y0 <= y + direction * g <= y1
                    and _enclosed(im, xc, y + direction, max_gap + 1, threshold)):
                y += direction * g
            else:
                break
        nb = y + direction
        if not (y0 <= nb <= y1 and 0 <= nb < rows):
            continue
        visited += 1
        anchor0 = y
        sampled = _probe(im, xc, y, direction, sclera_threshold, pr)
        if sampled:
            xs.append(xc)
            ys.append(y)
            sides.append(side)
            taken[side, xc - x0] = 1
        for sti in range(2):
            step = -1 if sti == 0 else 1
            anchor = anchor0
            last_x = xc if sampled else -1
            last_y = y
            k = 0
            while True:
                k += 1
                x = xc + step * k
                if x < x0 or x > x1:
                    break
                row = _slab(im, x, x - step, anchor, slab0 + k, direction, threshold,
                            sclera_threshold, pr, y0, y1, False, &visited, &ok)
                if row < 0:
                    if last_x >= 0 and _iabs(x - last_x) <= END_GAP:
                        ends.append((side, step, last_x, last_y, slab0 + k))
                    break
                anchor = row
                if ok:
                    xs.append(x)
                    ys.append(row)
                    sides.append(side)
                    taken[side, x - x0] = 1
                    last_x = x
                    last_y = row

    for side, step, last_x, last_y, height in ends:
        other = 1 - side
        direction = -1 if other == 0 else 1
        anchor = last_y
        x = last_x
        xp = last_x
        misses = 0
        while x0 <= x <= x1 and not taken[other, x - x0]:
            row = _slab(im, x, xp, anchor, height, direction, threshold,
                        sclera_threshold, pr, y0, y1, True, &visited, &ok)
            if row < 0:
                break
            if ok:
                xs.append(x)
                ys.append(row)
                sides.append(other)
                taken[other, x - x0] = 1
                misses = 0
            else:
                misses += 1
                if misses > END_GAP:
                    break
            anchor = row
            height += 1
            xp = x
            x -= step
    return (
        np.asarray(xs, dtype=np.int64),
        np.asarray(ys, dtype=np.int64),
        np.asarray(sides, dtype=np.int8),
        visited,
    )
