"""Grayscale raster type, binary PGM I/O, downscaling, isodata thresholding
and connected-component segmentation.

Bounding boxes throughout the package are ``(x_min, y_min, x_max, y_max)``
with inclusive bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import DimensionError, PgmFormatError

BBox = tuple[int, int, int, int]


@dataclass(frozen=True)
class GrayImage:
    """8-bit single-channel image; ``pixels`` is a read-only (height, width) array."""

    pixels: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(self.pixels)
        if a.ndim != 2:
            raise DimensionError(f"expected a 2-D raster, got shape {a.shape}")
        if a.dtype != np.uint8:
            if a.size and (a.min() < 0 or a.max() > 255):
                raise ValueError("intensities must lie in [0, 255]")
            a = a.astype(np.uint8)
        if a is self.pixels and a.flags.writeable:
            a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "pixels", a)

    @classmethod
    def from_bytes(cls, width: int, height: int, data: bytes) -> "GrayImage":
        if len(data) != width * height:
            raise DimensionError(f"expected {width * height} bytes, got {len(data)}")
        return cls(np.frombuffer(data, dtype=np.uint8).reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def data(self) -> bytes:
        return self.pixels.tobytes()

    def __getitem__(self, xy):
        x, y = xy
        return int(self.pixels[y, x])

    def crop(self, bbox: BBox) -> np.ndarray:
        x0, y0, x1, y1 = bbox
        return self.pixels[y0 : y1 + 1, x0 : x1 + 1]


# --------------------------------------------------------------------- PGM

_WS = b" \t\n\r\v\f"


def load_pgm(raw: bytes) -> GrayImage:
    """Parse a binary (P5) PGM with maxval <= 255."""
    raw = bytes(raw)
    if raw[:2] != b"P5":
        raise PgmFormatError(f"bad magic {raw[:2]!r}, expected b'P5'", 0)
    pos = 2
    values = []
    while len(values) < 3:
        if pos >= len(raw):
            raise PgmFormatError("truncated header", pos)
        c = raw[pos : pos + 1]
        if c in _WS and c:
            pos += 1
            continue
        if c == b"#":
            end = raw.find(b"\n", pos)
            if end < 0:
                raise PgmFormatError("unterminated comment", pos)
            pos = end + 1
            continue
        if pos == 2:
            raise PgmFormatError("missing whitespace after magic", pos)
        start = pos
        while pos < len(raw) and raw[pos : pos + 1] not in _WS and raw[pos : pos + 1] != b"#":
            pos += 1
        token = raw[start:pos]
        if not token.isdigit():
            raise PgmFormatError(f"non-numeric header token {token!r}", start)
        values.append((int(token), start))
    (width, _), (height, _), (maxval, moff) = values
    if maxval > 255:
        raise PgmFormatError(f"maxval {maxval} > 255 is not supported", moff)
    if maxval < 1 or width < 1 or height < 1:
        raise PgmFormatError("header values must be positive", moff)
    if pos >= len(raw) or raw[pos : pos + 1] not in _WS:
        raise PgmFormatError("missing whitespace before raster", pos)
    pos += 1
    need = width * height
    body = raw[pos : pos + need]
    if len(body) < need:
        raise PgmFormatError(f"truncated raster: need {need} bytes, have {len(body)}", pos + len(body))
    img = GrayImage.from_bytes(width, height, body)
    if maxval < 255 and int(img.pixels.max(initial=0)) > maxval:
        raise PgmFormatError(f"pixel value exceeds maxval {maxval}", pos + int(np.argmax(img.pixels > maxval)))
    return img


def save_pgm(img: GrayImage) -> bytes:
    """Canonical P5 encoding: ``P5\\n<w> <h>\\n255\\n`` followed by the raster."""
    return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.data


def read_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        return load_pgm(fh.read())


def write_pgm(path, img: GrayImage) -> None:
    with open(path, "wb") as fh:
        fh.write(save_pgm(img))


# ------------------------------------------------------------- processing


def downscale(img: GrayImage, factor: int) -> GrayImage:
    """Block-mean downscaling with round-half-up."""
    if factor < 1:
        raise ValueError("factor must be >= 1")
    if img.width % factor or img.height % factor:
        raise DimensionError(f"factor {factor} does not divide {img.width}x{img.height}")
    if factor == 1:
        return img
    return GrayImage(kernels.block_mean(img.pixels, factor))


def _class_split(csum_n, csum_s, k):
    """Class means for the partition ``<= k`` / ``> k``; None if a class is empty."""
    n_lo = int(csum_n[k])
    n_hi = int(csum_n[-1]) - n_lo
    if n_lo == 0 or n_hi == 0:
        return None
    s_lo = int(csum_s[k])
    s_hi = int(csum_s[-1]) - s_lo
    return (s_lo / n_lo + s_hi / n_hi) / 2


def isodata_threshold(img: GrayImage, roi: Optional[BBox] = None, max_iter: int = 64) -> float:
    """Ridler-Calvard iterative threshold.

    Starts from the global mean and alternates between splitting at the
    current threshold and averaging the two class means. Iteration stops once
    the class partition no longer changes (the threshold is then an exact
    fixed point) or after ``max_iter`` rounds. A degenerate histogram with an
    empty class returns the global mean.
    """
    a = img.pixels if roi is None else _crop_checked(img, roi)
    hist = np.bincount(a.ravel(), minlength=256)
    return isodata_from_histogram(hist, max_iter)


def isodata_from_histogram(hist, max_iter: int = 64) -> float:
    hist = np.asarray(hist, dtype=np.int64)
    csum_n = np.cumsum(hist)
    csum_s = np.cumsum(hist * np.arange(hist.size, dtype=np.int64))
    total_n = int(csum_n[-1])
    if total_n == 0:
        raise ValueError("empty region")
    total_s = int(csum_s[-1])
    mean = total_s / total_n
    k = total_s // total_n
    t = _class_split(csum_n, csum_s, k)
    if t is None:
        return mean
    for _ in range(max_iter):
        k_new = int(np.floor(t))
        if k_new == k:
            return t
        k = k_new
        t_new = _class_split(csum_n, csum_s, k)
        if t_new is None:
            return mean
        t = t_new
    return t


def _crop_checked(img: GrayImage, roi: BBox) -> np.ndarray:
    x0, y0, x1, y1 = roi
    if not (0 <= x0 <= x1 < img.width and 0 <= y0 <= y1 < img.height):
        raise ValueError(f"roi {roi} outside {img.width}x{img.height} image or empty")
    return img.crop(roi)


# ------------------------------------------------------------ segmentation


@dataclass(frozen=True)
class RegionStats:
    label: int
    pixel_count: int
    bbox: BBox
    centroid: tuple[float, float]

    @property
    def width(self) -> int:
        return self.bbox[2] - self.bbox[0] + 1

    @property
    def height(self) -> int:
        return self.bbox[3] - self.bbox[1] + 1


@dataclass(frozen=True)
class LabelMap:
    """Region ids per pixel: 0 is background, regions are 1..K by size rank."""

    labels: np.ndarray

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]


def segment(img: GrayImage, threshold: float) -> tuple[LabelMap, list[RegionStats]]:
    """Label 8-connected dark regions (intensity <= threshold).

    Regions are numbered by decreasing pixel count, ties broken by bounding
    box position (top first, then left).
    """
    if not 0 <= threshold <= 255:
        raise ValueError("threshold must lie in [0, 255]")
    mask = img.pixels <= threshold
    raw, count = kernels.label8(mask)
    if count == 0:
        return LabelMap(np.zeros_like(raw)), []

    flat = raw.ravel()
    ys, xs = np.divmod(np.arange(flat.size), img.width)
    fg = flat > 0
    lab = flat[fg]
    xs = xs[fg]
    ys = ys[fg]
    counts = np.bincount(lab, minlength=count + 1)
    sx = np.bincount(lab, weights=xs, minlength=count + 1)
    sy = np.bincount(lab, weights=ys, minlength=count + 1)
    big = np.iinfo(np.int64).max
    xmin = np.full(count + 1, big)
    ymin = np.full(count + 1, big)
    xmax = np.full(count + 1, -1)
    ymax = np.full(count + 1, -1)
    np.minimum.at(xmin, lab, xs)
    np.minimum.at(ymin, lab, ys)
    np.maximum.at(xmax, lab, xs)
    np.maximum.at(ymax, lab, ys)

    ids = np.arange(1, count + 1)
    order = sorted(ids, key=lambda i: (-counts[i], ymin[i], xmin[i], ymax[i], xmax[i]))
    remap = np.zeros(count + 1, dtype=np.int32)
    regions = []
    for rank, i in enumerate(order, start=1):
        remap[i] = rank
        regions.append(
            RegionStats(
                label=rank,
                pixel_count=int(counts[i]),
                bbox=(int(xmin[i]), int(ymin[i]), int(xmax[i]), int(ymax[i])),
                centroid=(sx[i] / counts[i], sy[i] / counts[i]),
            )
        )
    return LabelMap(remap[raw]), regions
