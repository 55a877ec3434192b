import math

import numpy as np
import pytest
from scipy.integrate import quad

from gearfwm.errors import AllZeroImageError
from gearfwm.field_render import (
    GridSpec,
    IntensityImage,
    encode_pgm,
    evaluate_intensity,
    lg_amplitude,
    read_pgm,
    render,
    write_pgm,
)
from gearfwm.fwm_process import FwmParams, detected_state, fwm_transfer
from gearfwm.hybrid_state import HybridState, PolAxis
from gearfwm.signal_prep import PrepConfig, eq1_closed_form

H, V = PolAxis.H, PolAxis.V


def gear(l, theta, theta0=0.0):
    params = FwmParams(theta=theta)
    return detected_state(fwm_transfer(eq1_closed_form(PrepConfig(l=l, theta0=theta0, theta=theta)), params), params)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(n=16)
    with pytest.raises(ValueError):
        GridSpec(extent=0.0)


def test_effective_waist():
    grid = GridSpec()
    assert grid.effective_waist(0) == 1.0
    assert grid.effective_waist(2) == 1.0
    assert grid.effective_waist(20) == pytest.approx(0.6 * 2.5 / math.sqrt(10))
    assert grid.ring_radius(20) == pytest.approx(1.5)


def test_coordinates_put_row_zero_on_top():
    x, y = GridSpec(n=32).coordinates()
    assert y[0, 0] > 0 > y[-1, 0]
    assert x[0, 0] < 0 < x[0, -1]
    assert x[0, 0] == pytest.approx(-x[0, -1])


@pytest.mark.parametrize("l", [0, 1, 2, 7, 20])
def test_lg_mode_has_unit_power(l):
    w = 0.8
    power, _ = quad(lambda r: abs(lg_amplitude(l, r, 0.0, w)) ** 2 * r, 0, 20 * w)
    assert 2 * math.pi * power == pytest.approx(1.0, abs=1e-7)


def test_lg_rejects_negative_radius():
    with pytest.raises(ValueError):
        lg_amplitude(1, -0.1, 0.0)


def test_image_validation():
    with pytest.raises(ValueError):
        IntensityImage(np.array([[0.0, -1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        IntensityImage(np.zeros(4))


def test_unit_peak():
    img = IntensityImage(np.array([[0.0, 2.0], [1.0, 0.5]])).unit_peak()
    assert img.normalization == "unit-peak"
    assert img.peak == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(AllZeroImageError):
        IntensityImage(np.zeros((2, 2))).unit_peak()


def test_render_is_non_negative():
    img = render(gear(2, 0.3), GridSpec(n=64))
    assert img.pixels.shape == (64, 64)
    assert img.pixels.min() >= 0.0
    assert img.l_abs == 2


def test_render_orientation_y_up():
    # |0> + e^{-i pi/2}|1> is brightest at phi = pi/2, i.e. straight up
    s = HybridState({(0, H): 1.0, (1, H): -1j}).normalized()
    img = render(s, GridSpec(n=64))
    row, col = np.unravel_index(np.argmax(img.pixels), img.pixels.shape)
    assert row < 32
    assert col in (31, 32)


def test_donut_is_uniform_on_ring():
    grid = GridSpec()
    phi = np.linspace(0, 2 * math.pi, 4001)
    for theta0 in (0.0, 0.4, 1.3):
        s = eq1_closed_form(PrepConfig(l=2, theta0=theta0))
        ring = evaluate_intensity(s, grid, np.full_like(phi, grid.ring_radius(2)), phi)
        assert (ring.max() - ring.min()) / ring.max() < 1e-9


def test_donut_independent_of_theta0():
    grid = GridSpec(n=128)
    a = render(eq1_closed_form(PrepConfig(l=3, theta0=0.0)), grid).pixels
    b = render(eq1_closed_form(PrepConfig(l=3, theta0=0.77)), grid).pixels
    assert np.max(np.abs(a - b)) < 1e-12


@pytest.mark.parametrize("l,theta,theta0", [(2, 0.7, 0.0), (5, 0.3, 0.1), (-3, 1.2, -0.4), (20, 0.05, 0.0)])
def test_gear_rotation_closed_form(l, theta, theta0):
    grid = GridSpec()
    alpha = 2 * (theta - theta0) / l
    rng = np.random.default_rng(abs(l))
    r = rng.uniform(0, grid.half_width, 2000)
    phi = rng.uniform(-math.pi, math.pi, 2000)
    rotated = evaluate_intensity(gear(l, theta, theta0), grid, r, phi)
    base = evaluate_intensity(gear(l, theta0, theta0), grid, r, phi - alpha)
    scale = base.max()
    assert np.max(np.abs(rotated - base)) / scale < 1e-6


def test_gear_intensity_formula():
    # I = R^2 (1 - sin(2 l phi - 4 delta)) for the detected state
    grid = GridSpec()
    l, delta = 2, 0.3
    phi = np.linspace(0, 2 * math.pi, 721)
    r = np.full_like(phi, 1.0)
    got = evaluate_intensity(gear(l, delta), grid, r, phi)
    radial = abs(lg_amplitude(l, 1.0, 0.0)) ** 2
    expected = radial * (1 - np.sin(2 * l * phi - 4 * delta))
    assert np.allclose(got, expected, rtol=0, atol=1e-12)


@pytest.mark.parametrize("l", [2, 20])
def test_render_energy_matches_norm(l):
    grid = GridSpec(n=512)
    for state in (eq1_closed_form(PrepConfig(l=l)), gear(l, 0.2)):
        img = render(state, grid)
        energy = img.pixels.sum() * grid.pitch ** 2
        assert energy == pytest.approx(state.norm() ** 2, rel=0.01)


def test_pgm_bytes():
    img = IntensityImage(np.array([[0.0, 1.0], [0.5, 0.25]]))
    data = encode_pgm(img)
    assert data == b"P5\n2 2\n65535\n" + bytes([0x00, 0x00, 0xFF, 0xFF, 0x80, 0x00, 0x40, 0x00])


def test_pgm_rejects_all_zero(tmp_path):
    with pytest.raises(AllZeroImageError):
        write_pgm(IntensityImage(np.zeros((4, 4))), tmp_path / "z.pgm")
    assert not (tmp_path / "z.pgm").exists()


def test_pgm_write_and_read_back(tmp_path):
    img = render(gear(2, 0.4), GridSpec(n=48))
    path = write_pgm(img, tmp_path / "sub" / "fwm.pgm")
    samples = read_pgm(path)
    assert samples.shape == (48, 48)
    assert samples.max() == 65535
    expected = np.floor(img.pixels * (65535 / img.peak) + 0.5)
    assert np.array_equal(samples, expected.astype(np.uint16))
    assert [p.name for p in path.parent.iterdir()] == ["fwm.pgm"]


def test_pgm_is_deterministic(tmp_path):
    img = render(gear(3, 0.1), GridSpec(n=40))
    a = write_pgm(img, tmp_path / "a.pgm").read_bytes()
    b = write_pgm(render(gear(3, 0.1), GridSpec(n=40)), tmp_path / "b.pgm").read_bytes()
    assert a == b
