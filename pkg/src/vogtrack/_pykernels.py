"""Pure-Python/NumPy implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` must reproduce them
exactly. Selected at import time by :mod:`vogtrack.kernels` when the
compiled extension is unavailable.
"""

from collections import deque

import numpy as np


def block_mean(a, factor):
    """Round-half-up mean of each ``factor x factor`` block of a uint8 array."""
    h, w = a.shape
    n = factor * factor
    sums = a.reshape(h // factor, factor, w // factor, factor).sum(axis=(1, 3), dtype=np.int64)
    return ((sums + n // 2) // n).astype(np.uint8)


def label8(mask):
    """8-connected component labelling of a boolean mask.

    Labels are assigned 1..K in raster order of each component's first pixel.
    Returns ``(labels, K)`` with ``labels`` an int32 array.
    """
    h, w = mask.shape
    m = mask.tolist()
    labels = [[0] * w for _ in range(h)]
    count = 0
    queue = deque()
    for y in range(h):
        row = m[y]
        for x in range(w):
            if not row[x] or labels[y][x]:
                continue
            count += 1
            labels[y][x] = count
            queue.append((y, x))
            while queue:
                cy, cx = queue.popleft()
                for ny in (cy - 1, cy, cy + 1):
                    if ny < 0 or ny >= h:
                        continue
                    mrow = m[ny]
                    lrow = labels[ny]
                    for nx in (cx - 1, cx, cx + 1):
                        if 0 <= nx < w and mrow[nx] and not lrow[nx]:
                            lrow[nx] = count
                            queue.append((ny, nx))
    return np.array(labels, dtype=np.int32).reshape(h, w), count


# a chain ending within this many columns of its last sample has reached
# a lateral end of the iris
END_GAP = 4


def _probe(img, x, y, direction, threshold_bright, probes):
    h = img.shape[0]
    total = 0
    for d in probes:
        yy = min(max(y + direction * d, 0), h - 1)
        total += int(img[yy, x])
    return total >= threshold_bright * len(probes)


def _enclosed(img, x, y, reach, threshold):
    """True when row ``y`` is foreground ``reach`` columns either side of ``x``."""
    w = img.shape[1]
    return all(0 <= x + d < w and img[y, x + d] <= threshold for d in (-reach, reach))


def _joined(img, x, y, xp, yp, threshold):
    """True when column ``x`` or ``xp`` is foreground all the way between rows
    ``y`` and ``yp``: the two border pixels bound the same dark region."""
    lo, hi = min(y, yp), max(y, yp)
    for col in (x, xp):
        yy = lo
        while yy <= hi and img[yy, col] <= threshold:
            yy += 1
        if yy > hi:
            return True
    return False


def _slab(img, x, xp, anchor, height, direction, threshold, sclera_threshold, probes, y0, y1, nearest=False):
    """Border pixel in the slab of column ``x`` joined to ``(xp, anchor)``.

    Takes the first such pixel from the slab's outer end, or with ``nearest``
    the one closest to the anchor (ties to the outer one). Returns
    ``(row, passed, visited)``; ``row`` is -1 when there is none.
    """
    rows = img.shape[0]
    top = anchor - height // 2
    lo = max(top, y0, 1)
    hi = min(top + height - 1, y1, rows - 2)
    order = range(lo, hi + 1) if direction < 0 else range(hi, lo - 1, -1)
    visited = 0
    best = -1
    for yy in order:
        visited += 1
        if img[yy, x] <= threshold and img[yy + direction, x] > threshold:
            if nearest and best >= 0 and abs(yy - anchor) >= abs(best - anchor):
                continue
            if not _joined(img, x, yy, xp, anchor, threshold):
                continue
            best = yy
            if not nearest:
                break
    if best < 0:
        return -1, False, visited
    return best, _probe(img, x, best, direction, sclera_threshold, probes), visited


def zigzag(img, threshold, sclera_threshold, xc, yc, bbox, slab0, probes=(2, 3), max_gap=4):
    """Follow the upper and lower iris borders outward from ``(xc, yc)``.

    ``bbox`` is ``(x0, y0, x1, y1)`` inclusive. A border pixel is a foreground
    pixel (``<= threshold``) whose vertical neighbour toward the outside is
    background; it is accepted as an iris-sclera sample when the mean of the
    pixels ``probes`` steps further out is at least ``sclera_threshold``.

    The initial vertical scan steps over light gaps of at most ``max_gap``
    pixels with dark pixels beyond and beside them (glare inside the iris); a
    sliver of sclera between iris and eyelid is open to the sides and stops it. In each slab only
    the first border pixel joined to the anchor through foreground counts: a
    sample if it passes the probe, otherwise just the next anchor.

    A chain that runs out of border within ``END_GAP`` columns of its last
    sample has reached a lateral end of the iris. From there the other border is followed back toward the
    centre, taking the joined border pixel nearest the anchor, until more than
    ``END_GAP`` columns in a row fail the probe; this picks up iris arcs whose
    middle is hidden under an eyelid.

    Returns ``(xs, ys, sides, visited)``; ``sides`` is 0 for the upper border
    and 1 for the lower border, ``visited`` counts pixels examined.
    """
    x0, y0, x1, y1 = bbox
    xs, ys, sides = [], [], []
    taken = (set(), set())
    ends = []
    visited = 0
    rows = img.shape[0]

    def keep(x, y, side):
        xs.append(x)
        ys.append(y)
        sides.append(side)
        taken[side].add(x)

    for side, direction in ((0, -1), (1, 1)):
        # initial vertical scan in the start column
        y = yc
        while True:
            while y0 <= y + direction <= y1 and img[y + direction, xc] <= threshold:
                y += direction
                visited += 1
            g = 1
            while g <= max_gap and y0 <= y + direction * g <= y1 and img[y + direction * g, xc] > threshold:
                g += 1
                visited += 1
            if g <= max_gap and y0 <= y + direction * g <= y1 and _enclosed(img, xc, y + direction, max_gap + 1, threshold):
                y += direction * g  # a glare hole: dark beyond and on both sides
            else:
                break
        nb = y + direction
        if not (y0 <= nb <= y1 and 0 <= nb < rows):
            continue
        visited += 1
        anchor0 = y
        sampled = _probe(img, xc, y, direction, sclera_threshold, probes)
        if sampled:
            keep(xc, y, side)

        for step in (-1, 1):
            anchor = anchor0
            last = (xc, y) if sampled else None
            k = 0
            while True:
                k += 1
                x = xc + step * k
                if x < x0 or x > x1:
                    break
                first, ok, n = _slab(
                    img, x, x - step, anchor, slab0 + k, direction, threshold, sclera_threshold, probes, y0, y1
                )
                visited += n
                if first < 0:
                    if last is not None and abs(x - last[0]) <= END_GAP:
                        ends.append((side, step, last, slab0 + k))
                    break
                anchor = first
                if ok:
                    keep(x, first, side)
                    last = (x, first)

    # wrap round each lateral end onto the other border, heading back inward
    for side, step, (xe, ye), height in ends:
        other = 1 - side
        direction = -1 if other == 0 else 1
        anchor = ye
        x, xp = xe, xe
        misses = 0
        while x0 <= x <= x1 and x not in taken[other]:
            row, ok, n = _slab(
                img, x, xp, anchor, height, direction, threshold, sclera_threshold, probes, y0, y1, nearest=True
            )
            visited += n
            if row < 0:
                break
            if ok:
                keep(x, row, other)
                misses = 0
            else:
                misses += 1
                if misses > END_GAP:
                    break
            anchor = row
            height += 1
            x, xp = x - step, x
    return (
        np.asarray(xs, dtype=np.int64),
        np.asarray(ys, dtype=np.int64),
        np.asarray(sides, dtype=np.int8),
        visited,
    )
