import math
from dataclasses import replace

import numpy as np
import pytest

from gearfwm.errors import InsufficientSamplesError, UnwrapAmbiguityError
from gearfwm.field_render import GridSpec, render
from gearfwm.fwm_process import DetectMode
from gearfwm.hybrid_state import overlap
from gearfwm.pattern_analysis import Annulus, visibility
from gearfwm.signal_prep import PrepConfig, eq1_closed_form
from gearfwm.sweep import FrameSetup, profile_of, run_sweep, simulate_frame, sweep_thetas

FIG4_THETAS = [0, 15, 30, 45, 60, 75, 90]


def degrees_sweep(setup, start, end, steps, **kw):
    thetas = sweep_thetas(math.radians(start), math.radians(end), steps, setup.l)
    return run_sweep(setup, thetas, **kw)


def test_setup_validation():
    with pytest.raises(ValueError):
        FrameSetup(l=2, sampling="spiral")
    with pytest.raises(ValueError):
        FrameSetup(l=0)
    with pytest.raises(ValueError):
        FrameSetup(l=2, radial_samples=0)
    with pytest.raises(ValueError):
        FrameSetup(l=2, annulus=Annulus(1.0, 3.0))
    with pytest.raises(ValueError):
        FrameSetup(l=20, bins=100)
    assert FrameSetup(l=-3).petals == 6
    assert FrameSetup(l=2).sampling == "pixel"


def test_frame_signal_is_eq1():
    setup = FrameSetup(l=3, theta0=0.2)
    frame = simulate_frame(setup, 0.5)
    assert overlap(frame.signal, eq1_closed_form(PrepConfig(l=3, theta0=0.2))) == pytest.approx(1.0, abs=1e-10)
    assert frame.detected.norm() == pytest.approx(1.0, abs=1e-12)


def test_sweep_thetas_validation():
    with pytest.raises(InsufficientSamplesError):
        sweep_thetas(0.0, 1.0, 2, 2)
    with pytest.raises(UnwrapAmbiguityError):
        sweep_thetas(0.0, math.pi / 2, 4, 2)
    assert len(sweep_thetas(0.0, math.pi / 2, 7, 2)) == 7


def test_fig4_sequence_l2():
    result = degrees_sweep(FrameSetup(l=2), 0, 90, 7)
    thetas, alphas = zip(*result.samples_deg())
    assert thetas == pytest.approx(FIG4_THETAS)
    assert alphas == pytest.approx(FIG4_THETAS, abs=1e-6)
    fit = result.fit_deg()
    assert fit.slope == pytest.approx(1.0, abs=1e-6)
    assert fit.max_residual < 1e-6


def test_quarter_turn_repeats_image():
    setup = FrameSetup(l=2, grid=GridSpec(n=512))
    a = render(simulate_frame(setup, 0.0).detected, setup.grid).pixels
    b = render(simulate_frame(setup, math.pi / 2).detected, setup.grid).pixels
    assert np.max(np.abs(a - b)) < 1e-9


def test_l20_slope():
    result = degrees_sweep(FrameSetup(l=20), 0, 90, 19)
    fit = result.fit_deg()
    assert abs(fit.slope) == pytest.approx(0.1, abs=1e-6)
    assert fit.max_residual < 1e-6


@pytest.mark.parametrize("l", [1, 2, 5, 20, -2])
def test_control_law(l):
    rng = np.random.default_rng(abs(l) + 100)
    theta0 = float(rng.uniform(0, math.pi))
    start = float(rng.uniform(-30, 30))
    result = degrees_sweep(FrameSetup(l=l, theta0=theta0), start, start + 60, 13)
    fit = result.fit_deg()
    assert fit.slope == pytest.approx(2 / l, abs=1e-6)


def test_theta0_moves_intercept_only():
    theta0 = math.radians(10)
    setup = FrameSetup(l=2, theta0=theta0)
    reference = simulate_frame(replace(setup, theta0=0.0), 0.0).detected
    thetas = sweep_thetas(0.0, math.pi / 2, 7, 2)
    fit = run_sweep(setup, thetas, reference=reference).fit_deg()
    assert fit.slope == pytest.approx(1.0, abs=1e-6)
    assert fit.intercept == pytest.approx(-10.0, abs=1e-6)


def test_full_detection_same_rotation():
    dominant = degrees_sweep(FrameSetup(l=2), 0, 45, 4)
    full = degrees_sweep(FrameSetup(l=2, detect_mode=DetectMode.FULL), 0, 45, 4)
    assert full.alphas == pytest.approx(dominant.alphas, abs=1e-8)
    expected = (2.1 ** 2 - 1) / (2.1 ** 2 + 1)
    detected = full.frames[0].detected
    analytic = FrameSetup(l=2, detect_mode=DetectMode.FULL, sampling="polar")
    assert visibility(profile_of(analytic, detected), 4) == pytest.approx(expected, abs=1e-9)
    from_image = FrameSetup(l=2, detect_mode=DetectMode.FULL)
    assert visibility(profile_of(from_image, detected), 4) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("l", [2, 20])
def test_image_and_analytic_sampling_agree(l):
    thetas = sweep_thetas(0.0, math.pi / 4, 19, l)
    image = run_sweep(FrameSetup(l=l), thetas)
    analytic = run_sweep(FrameSetup(l=l, sampling="polar"), thetas)
    assert np.degrees(image.alphas) == pytest.approx(np.degrees(analytic.alphas), abs=1e-6)
    for theta, alpha in analytic.samples_deg():
        assert alpha == pytest.approx(2 * theta / l, abs=1e-6)


def test_render_reuses_image_profile():
    setup = FrameSetup(l=2)
    frame = simulate_frame(setup, 0.3)
    img = render(frame.detected, setup.grid)
    assert np.array_equal(profile_of(setup, frame.detected, img).bins, profile_of(setup, frame.detected).bins)


def test_workers_keep_order():
    setup = FrameSetup(l=5)
    thetas = sweep_thetas(0.0, math.pi / 4, 9, 5)
    serial = run_sweep(setup, thetas)
    pooled = run_sweep(setup, list(reversed(thetas)), workers=4)
    assert pooled.thetas == serial.thetas
    assert pooled.alphas == pytest.approx(serial.alphas, abs=1e-12)


def test_empty_sweep():
    with pytest.raises(InsufficientSamplesError):
        run_sweep(FrameSetup(l=2), [])
