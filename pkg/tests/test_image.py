import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import block_mean_naive, flood_components, isodata_exhaustive
from vogtrack.errors import DimensionError, PgmFormatError
from vogtrack.image import (
    GrayImage,
    downscale,
    isodata_threshold,
    load_pgm,
    read_pgm,
    save_pgm,
    segment,
    write_pgm,
)


def img(a):
    return GrayImage(np.asarray(a, dtype=np.uint8))


# ------------------------------------------------------------------ PGM


def test_minimal_pgm():
    im = load_pgm(b"P5\n2 1\n255\n" + bytes([0, 255]))
    assert (im.width, im.height) == (2, 1)
    assert im[0, 0] == 0 and im[1, 0] == 255


def test_pgm_comments_and_whitespace():
    im = load_pgm(b"P5 # c\n3\t# more\n 2 255\n" + bytes(range(6)))
    assert im.pixels.tolist() == [[0, 1, 2], [3, 4, 5]]


@pytest.mark.parametrize(
    "raw, offset",
    [
        (b"P6\n1 1\n255\n\x00", 0),
        (b"P5\n2 2\n255\n\x00", 12),
        (b"P5\n1 1\n65535\n\x00\x00", 7),
        (b"P5\n1 x\n255\n\x00", 5),
    ],
)
def test_pgm_errors_name_offset(raw, offset):
    with pytest.raises(PgmFormatError) as ei:
        load_pgm(raw)
    assert ei.value.offset == offset


def test_pgm_pixel_above_maxval():
    with pytest.raises(PgmFormatError):
        load_pgm(b"P5\n1 1\n100\n" + bytes([200]))


@given(st.integers(1, 9), st.integers(1, 9), st.data())
def test_pgm_roundtrip(w, h, data):
    px = data.draw(st.lists(st.integers(0, 255), min_size=w * h, max_size=w * h))
    im = GrayImage.from_bytes(w, h, bytes(px))
    again = load_pgm(save_pgm(im))
    assert again.data == im.data and (again.width, again.height) == (w, h)


def test_pgm_file_roundtrip(tmp_path):
    im = img(np.arange(12).reshape(3, 4))
    write_pgm(tmp_path / "a.pgm", im)
    assert read_pgm(tmp_path / "a.pgm").data == im.data


def test_image_is_read_only():
    a = np.zeros((2, 2), dtype=np.uint8)
    im = GrayImage(a)
    a[0, 0] = 9
    assert im[0, 0] == 0
    with pytest.raises(ValueError):
        im.pixels[0, 0] = 1


# ------------------------------------------------------------ downscale


def test_downscale_uniform():
    out = downscale(img(np.full((480, 640), 100)), 8)
    assert (out.width, out.height) == (80, 60)
    assert (out.pixels == 100).all()


def test_downscale_rounds_half_up():
    assert downscale(img([[0, 0], [255, 255]]), 2).pixels.tolist() == [[128]]


def test_downscale_matches_naive():
    rng = np.random.default_rng(1)
    a = rng.integers(0, 256, size=(480, 640), dtype=np.uint8)
    assert downscale(img(a), 8).pixels.tolist() == block_mean_naive(a.tolist(), 8)


def test_downscale_rejects_non_divisible():
    with pytest.raises(DimensionError):
        downscale(img(np.zeros((10, 12))), 8)


# -------------------------------------------------------------- isodata


def test_isodata_bimodal():
    assert isodata_threshold(img([[50, 50, 200, 200]])) == 125


def test_isodata_uniform():
    assert isodata_threshold(img(np.full((4, 4), 100))) == 100


def test_isodata_roi():
    a = np.full((4, 8), 255, dtype=np.uint8)
    a[:, :4] = [[50, 200] * 2] * 4
    assert isodata_threshold(img(a), roi=(0, 0, 3, 3)) == 125
    with pytest.raises(ValueError):
        isodata_threshold(img(a), roi=(0, 0, 8, 3))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 255), min_size=1, max_size=300))
def test_isodata_matches_exhaustive(values):
    assert isodata_threshold(img([values])) == isodata_exhaustive(values)


@given(st.lists(st.integers(0, 255), min_size=2, max_size=200))
def test_isodata_within_range(values):
    t = isodata_threshold(img([values]))
    assert min(values) <= t <= max(values)


# ------------------------------------------------------------- segment


def test_segment_empty():
    labels, regions = segment(img(np.full((5, 5), 200)), 100)
    assert regions == [] and not labels.labels.any()


def test_segment_orders_by_size():
    a = np.full((20, 20), 255, dtype=np.uint8)
    a[1:4, 1:4] = 0  # 9 px
    a[10:16, 10:15] = 0  # 30 px
    _, regions = segment(img(a), 100)
    assert [r.pixel_count for r in regions] == [30, 9]
    assert regions[0].bbox == (10, 10, 14, 15)
    assert regions[0].centroid == (12.0, 12.5)


def test_segment_diagonal_is_connected():
    a = np.full((3, 3), 255, dtype=np.uint8)
    a[0, 0] = a[1, 1] = a[2, 2] = 0
    _, regions = segment(img(a), 10)
    assert len(regions) == 1 and regions[0].pixel_count == 3


@pytest.mark.parametrize("seed", range(5))
def test_segment_matches_flood_fill(seed):
    rng = np.random.default_rng(seed)
    a = np.where(rng.random((40, 50)) < 0.45, 0, 255).astype(np.uint8)
    labels, regions = segment(img(a), 128)
    comps = flood_components((a <= 128).tolist())
    assert sorted(len(c) for c in comps) == sorted(r.pixel_count for r in regions)
    lab = labels.labels
    seen = set()
    for comp in comps:
        ids = {int(lab[y, x]) for x, y in comp}
        assert len(ids) == 1
        (i,) = ids
        assert i not in seen and i > 0
        seen.add(i)
        assert regions[i - 1].pixel_count == len(comp)
    counts = [r.pixel_count for r in regions]
    assert counts == sorted(counts, reverse=True)
    assert [r.label for r in regions] == list(range(1, len(regions) + 1))


def test_segment_tie_breaks_top_then_left():
    a = np.full((10, 10), 255, dtype=np.uint8)
    a[5, 1] = 0
    a[1, 7] = 0
    a[1, 3] = 0
    _, regions = segment(img(a), 10)
    assert [r.bbox[:2] for r in regions] == [(3, 1), (7, 1), (1, 5)]
