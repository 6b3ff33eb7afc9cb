"""Cushion shading math and image output."""

import numpy as np
import pytest

from segmap import BACKGROUND, CROSSING
from segmap.render import (
    ShadingProfile,
    default_palette,
    load_palette,
    normal_at,
    render_image,
    run_height,
    save_image,
    shading_coefficients,
)
from segmap.state import CellState


PROFILE = ShadingProfile(h=1.0, r=8)   # w = 4 pixels


# ---------------------------------------------------------------------------
# Quadratic profile constraints
# ---------------------------------------------------------------------------

def test_ramp_boundary_conditions():
    x1, x2 = 0.0, 40.0
    w, h = PROFILE.w, PROFILE.h
    assert run_height(x1, x2, x1, PROFILE, False) == pytest.approx(0.0, abs=1e-9)
    assert run_height(x1, x2, x1 + w, PROFILE, False) == pytest.approx(h, abs=1e-9)
    assert run_height(x1, x2, x2, PROFILE, False) == pytest.approx(0.0, abs=1e-9)
    # z'(x1 + w) = 2(a(x1+w) + b) = 0
    a, b = shading_coefficients(x1, x2, x1 + w, PROFILE, False)
    assert 2 * (a * (x1 + w) + b) == pytest.approx(0.0, abs=1e-9)


def test_plateau_is_flat_at_height_h():
    x1, x2 = 0.0, 40.0
    for x in np.linspace(x1 + PROFILE.w, x2 - PROFILE.w, 17)[1:-1]:
        a, b = shading_coefficients(x1, x2, x, PROFILE, False)
        assert (a, b) == (0.0, 0.0)
        assert run_height(x1, x2, x, PROFILE, False) == PROFILE.h


def test_plateau_normal_is_straight_up_exactly():
    n = normal_at((20.0, 20.0), (0.0, 40.0), (0.0, 40.0), PROFILE, False)
    assert n == (0.0, 0.0, 1.0)


def test_separator_valley_reaches_minus_h():
    x1, x2 = 0.0, 40.0
    mid = (x1 + x2) / 2
    assert run_height(x1, x2, mid, PROFILE, True) == -PROFILE.h
    assert run_height(x1, x2, x1 + PROFILE.w, PROFILE, True) == pytest.approx(
        -PROFILE.h, abs=1e-9)


def test_short_run_clamps_ramp_width():
    # a run narrower than 2w uses half its width for each ramp
    x1, x2 = 0.0, 4.0
    mid = 2.0
    assert run_height(x1, x2, mid, PROFILE, False) == pytest.approx(PROFILE.h)
    assert run_height(x1, x2, x1, PROFILE, False) == pytest.approx(0.0)


def test_ramp_is_monotone():
    x1, x2 = 0.0, 40.0
    xs = np.linspace(x1, x1 + PROFILE.w, 33)
    zs = [run_height(x1, x2, float(x), PROFILE, False) for x in xs]
    assert all(b >= a for a, b in zip(zs, zs[1:]))


# ---------------------------------------------------------------------------
# Palette
# ---------------------------------------------------------------------------

def test_default_palette_covers_and_cycles():
    pal = default_palette(range(45))
    assert len(pal) == 45
    assert len(set(pal.values())) == 45   # luminance perturbation keeps all distinct
    # beyond 20 entries the base color repeats darker
    r0, g0, b0 = pal[0]
    r20, g20, b20 = pal[20]
    assert (r20, g20, b20) == (int(r0 * 0.7), int(g0 * 0.7), int(b0 * 0.7))


def test_load_palette(tmp_path):
    p = tmp_path / "pal.txt"
    p.write_text("# comment\n0 #ff0000\n1 #00ff00\n\n2 #0000ff\n")
    pal = load_palette(p)
    assert pal == {0: (255, 0, 0), 1: (0, 255, 0), 2: (0, 0, 255)}


def test_render_rejects_incomplete_palette():
    cells = np.array([[0, 1], [1, 0]], dtype=np.int32)
    profile = ShadingProfile(palette={0: (1, 2, 3)})
    with pytest.raises(KeyError):
        render_image(CellState(cells), profile)


# ---------------------------------------------------------------------------
# Image output
# ---------------------------------------------------------------------------

def test_render_shapes_and_colors():
    cells = np.array([[0, 0, 1],
                      [0, 0, 1],
                      [BACKGROUND, 1, 1]], dtype=np.int32)
    img = render_image(CellState(cells), PROFILE)
    assert img.shape == (3 * PROFILE.r, 3 * PROFILE.r, 3)
    assert img.dtype == np.uint8


def test_crossing_rendered_as_knob():
    cells = np.array([[9, 0, 9],
                      [1, CROSSING, 1],
                      [9, 0, 9]], dtype=np.int32)
    profile = ShadingProfile(r=8, crossing_color=(10, 10, 10))
    img = render_image(CellState(cells), profile)
    block = img[8:16, 8:16]
    # the knob's own color shows through somewhere in its cell
    assert (block > 0).any()


def test_save_image_png_and_ppm(tmp_path):
    img = np.zeros((4, 4, 3), dtype=np.uint8)
    img[..., 0] = 200
    png = tmp_path / "out.png"
    save_image(img, png)
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    ppm = tmp_path / "out.ppm"
    save_image(img, ppm, fmt="ppm")
    assert ppm.read_bytes().startswith(b"P6")


def test_profile_validation():
    with pytest.raises(ValueError):
        ShadingProfile(r=0)
    with pytest.raises(ValueError):
        ShadingProfile(h=0)
    with pytest.raises(ValueError):
        ShadingProfile(w=-1)
