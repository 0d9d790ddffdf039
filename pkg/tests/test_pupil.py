import numpy as np
import pytest

from vogtrack.errors import DetectionFailure
from vogtrack.image import GrayImage, downscale, isodata_threshold, segment
from vogtrack.pupil import (
    EyeRegionEstimate,
    IrisColumnEstimate,
    extract_eye_region,
    locate_iris,
    refine,
    rescale_to_full,
    window_width_for,
)
from vogtrack.synth import EyeScene, gaze_scene, render


def img(a):
    return GrayImage(np.asarray(a, dtype=np.uint8))


def two_blobs(top, bottom):
    a = np.full((40, 40), 255, dtype=np.uint8)
    a[2:2 + top // 20, 0:20] = 0
    a[20:20 + bottom // 20, 10:30] = 0
    return img(a)


def test_eye_is_lower_region():
    im = two_blobs(300, 200)
    labels, regions = segment(im, 100)
    assert [r.pixel_count for r in regions] == [300, 200]
    eye = extract_eye_region(labels, regions, 100)
    assert eye.bbox_lowres == (10, 20, 29, 29)
    assert eye.eyebrow_bbox == (0, 2, 19, 16)


def test_one_region_fails():
    a = np.full((10, 10), 255, dtype=np.uint8)
    a[2:5, 2:5] = 0
    labels, regions = segment(img(a), 100)
    with pytest.raises(DetectionFailure, match="eye area not found"):
        extract_eye_region(labels, regions, 100)


def eye_on(bbox, a):
    return EyeRegionEstimate(bbox, bbox, 100.0, (0, 0, 0, 0))


def test_window_width():
    assert window_width_for(100) == 15
    assert window_width_for(3) == 1


def test_dark_blob_wins():
    a = np.full((20, 100), 255, dtype=np.uint8)
    a[8:11, 60:63] = 0
    iris = locate_iris(img(a), eye_on((0, 0, 99, 19), a), 100)
    assert iris.window_width == 15
    assert iris.window_x <= 60 and iris.window_x + 14 >= 62
    assert iris.window_x == 48  # leftmost of the tied positions


def test_no_foreground_fails():
    a = np.full((10, 40), 255, dtype=np.uint8)
    with pytest.raises(DetectionFailure, match="iris not found"):
        locate_iris(img(a), eye_on((0, 0, 39, 9), a), 100)


def test_refine_symmetric():
    a = np.full((10, 60), 200, dtype=np.uint8)
    a[:, 27:33] = 40
    eye = eye_on((0, 0, 59, 9), a)
    iris = IrisColumnEstimate(window_x=27, window_width=6, window_height=10, score=60)
    r = refine(img(a), eye, iris)
    x0, _, x1, _ = r.bbox_lowres
    assert (27 - x0) == (x1 - 32) == 6
    assert r.threshold == 120


def test_refine_ignores_glare_outside():
    rng = np.random.default_rng(0)
    a = rng.integers(30, 220, size=(10, 60)).astype(np.uint8)
    eye = eye_on((0, 0, 59, 9), a)
    iris = IrisColumnEstimate(window_x=27, window_width=6, window_height=10, score=1)
    t0 = refine(img(a), eye, iris).threshold
    b = a.copy()
    b[:, :5] = 255
    assert refine(img(b), eye, iris).threshold == t0


def test_rescale():
    eye = EyeRegionEstimate((2, 3, 10, 9), (2, 3, 10, 9), 77.0, (0, 0, 1, 1))
    iris = IrisColumnEstimate(4, 2, 7, 5, 3)
    e8, i8 = rescale_to_full(eye, iris, 8)
    assert e8.bbox_fullres == (16, 24, 80, 72) and e8.threshold == 77.0
    assert (i8.window_x, i8.window_width, i8.window_height, i8.window_y) == (32, 16, 56, 24)
    e1, i1 = rescale_to_full(eye, iris, 1)
    assert e1.bbox_fullres == eye.bbox_lowres and i1 == iris


@pytest.mark.parametrize("gaze", [(0, 0), (16, 0), (-16, 0), (0, 12), (8, -8)])
def test_synthetic_eye(gaze):
    full, truth = render(gaze_scene(EyeScene(noise_sigma=8.0), *gaze))
    small = downscale(full, 8)
    t = isodata_threshold(small)
    labels, regions = segment(small, t)
    eye = extract_eye_region(labels, regions, t, 8)
    tx, ty = (v / 8 for v in truth.pupil_center)
    x0, y0, x1, y1 = eye.bbox_lowres
    assert x0 <= tx <= x1 and y0 <= ty <= y1
    iris = locate_iris(small, eye, t)
    assert abs(iris.center_x - tx) <= iris.window_width / 2
