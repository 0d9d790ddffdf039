import math

import numpy as np
import pytest

from vogtrack.errors import INSUFFICIENT_AFTER_REMOVAL, INSUFFICIENT_SAMPLES, DetectionFailure
from vogtrack.image import GrayImage
from vogtrack.pipeline import STAGES, detect_frame
from vogtrack.synth import EyeScene, gaze_scene, occluded_scene, render


@pytest.mark.parametrize("gaze", [(ax, ay) for ax in (-16, 0, 16) for ay in (-10, 0, 10)])
def test_clean_gaze_grid(gaze):
    im, truth = render(gaze_scene(EyeScene(), *gaze))
    r = detect_frame(im)
    assert math.dist((r.pupil.a, r.pupil.b), truth.pupil_center) <= 1.0
    assert math.dist((r.corner.x, r.corner.y), truth.corner) <= 2.0
    assert r.pupil.R == pytest.approx(truth.iris_radius, abs=1.5)


def test_offset_and_timings():
    im, truth = render(EyeScene(noise_sigma=8.0, seed=2))
    tm = {}
    r = detect_frame(im, timings=tm)
    assert set(tm) == set(STAGES) | {"total"}
    assert r.offset == (r.pupil.a - r.corner.x, r.pupil.b - r.corner.y)


def test_nasal_side():
    im, truth = render(EyeScene(), side="nasal")
    from vogtrack.config import RunConfig

    r = detect_frame(im, RunConfig(corner_side="nasal"))
    assert math.dist((r.corner.x, r.corner.y), truth.corner) <= 2.0


@pytest.mark.parametrize("aperture", [0.0, 8.0, 16.0])
def test_closed_eye_reports_insufficient_samples(aperture):
    im, truth = render(EyeScene(eyelid_aperture=aperture))
    assert truth.visible_iris_fraction < 0.15
    with pytest.raises(DetectionFailure) as e:
        detect_frame(im)
    assert e.value.code in (INSUFFICIENT_SAMPLES, INSUFFICIENT_AFTER_REMOVAL)


def test_blank_frame_fails():
    with pytest.raises(DetectionFailure):
        detect_frame(GrayImage(np.zeros((480, 640), dtype=np.uint8)))


def test_occluded_vertical_gaze_still_tracks():
    im, truth = render(gaze_scene(occluded_scene(), 0.0, 8.0))
    r = detect_frame(im)
    assert math.dist((r.pupil.a, r.pupil.b), truth.pupil_center) <= 2.0


def test_arc_coverage():
    from vogtrack.circle import Circle
    from vogtrack.pipeline import arc_coverage

    c = Circle(0.0, 0.0, 10.0)
    full = [(10 * math.cos(math.radians(a)), 10 * math.sin(math.radians(a))) for a in range(0, 360, 10)]
    assert arc_coverage(full, c) == pytest.approx(350.0)
    half = [p for p in full if p[1] >= -1e-9]
    assert arc_coverage(half, c) == pytest.approx(180.0)
    # wraps through 180 degrees
    left = [(10 * math.cos(math.radians(a)), 10 * math.sin(math.radians(a))) for a in range(150, 211, 10)]
    assert arc_coverage(left, c) == pytest.approx(60.0)
    assert arc_coverage([(10.0, 0.0)], c) == 0.0


@pytest.mark.parametrize("ay", [-40, 40])
def test_thin_cap_is_refused(ay):
    # only a sliver of the iris shows between the lids: no circle is reported
    im, truth = render(gaze_scene(EyeScene(eyelid_aperture=48.0, noise_sigma=8.0, seed=1), 16, ay))
    assert truth.visible_iris_fraction < 0.15
    with pytest.raises(DetectionFailure) as e:
        detect_frame(im)
    assert e.value.code == INSUFFICIENT_SAMPLES
