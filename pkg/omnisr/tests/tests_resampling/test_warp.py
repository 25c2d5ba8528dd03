"""Tests the :obj:`omnisr.resampling.warp` module."""

import math

import numpy as np
import pytest

from omnisr.errors.errors import OmniError
from omnisr.geometry.coords import ProjectionSpec
from omnisr.geometry.projections import plane_to_sphere, raster_plane_grid
from omnisr.resampling.errors import Sampling, Warping
from omnisr.resampling.kernels import Kernel, OutOfBounds, SampleSpec
from omnisr.resampling.warp import warp, warp_plan, warp_to_sphere_points
from omnisr.test_utils.common import error_match, smooth_erp, smooth_sphere_function

WRAP = SampleSpec(out_of_bounds=OutOfBounds.WRAP_LONGITUDE)
CLAMP = SampleSpec(out_of_bounds=OutOfBounds.CLAMP_EDGE)


def test_erp_identity(erp_16):
    """Checks that warping an ERP onto itself leaves it untouched."""
    image, mask = warp(erp_16, ProjectionSpec.erp(16), ProjectionSpec.erp(16), WRAP)
    assert mask.all()
    assert np.abs(image - erp_16).max() < 1e-9


def test_constant_erp_to_perspective():
    """Checks that a constant ERP stays constant in a perspective view."""
    image, mask = warp(
        np.full((64, 128, 3), 0.4), ProjectionSpec.erp(64), ProjectionSpec.perspective(16, 16, view=(1.0, 0.5)), WRAP)
    assert mask.all()
    assert np.allclose(image, 0.4, atol=1e-12)


def test_erp_to_fisheye_and_back():
    """Checks that a smooth ERP survives the conversion to a wide fisheye and back over the northern hemisphere."""
    erp = smooth_erp(64)
    fisheye_spec = ProjectionSpec.fisheye(128, aperture=math.radians(200))
    fisheye, mask = warp(erp, ProjectionSpec.erp(64), fisheye_spec, WRAP)
    assert mask.all()

    theta, phi = raster_plane_grid(ProjectionSpec.erp(64))
    north = (phi >= 0) & (phi < math.radians(75))
    values, back_mask = warp_to_sphere_points(fisheye, fisheye_spec, theta[north], phi[north], CLAMP)
    assert back_mask.all()
    mse = np.mean((values - erp[north]) ** 2)
    assert 10 * math.log10(1 / mse) >= 40


def test_warp_to_sphere_points_masks_the_other_hemisphere():
    """Checks that points the source cannot see are masked and zero."""
    fisheye = np.ones((16, 16, 1))
    values, mask = warp_to_sphere_points(
        fisheye, ProjectionSpec.fisheye(16), np.array([0.0, 0.0]), np.array([0.5, -0.5]))
    assert mask.tolist() == [True, False]
    assert values[1, 0] == 0.0


def test_warp_is_linear(rng):
    """Checks the linearity of the warp in the source values."""
    a, b = rng.random((16, 32, 2)), rng.random((16, 32, 2))
    src_spec, dst_spec = ProjectionSpec.erp(16), ProjectionSpec.perspective(8, 12, view=(-2.0, 0.3))
    combined, _ = warp(2 * a - 3 * b, src_spec, dst_spec, WRAP)
    first, _ = warp(a, src_spec, dst_spec, WRAP)
    second, _ = warp(b, src_spec, dst_spec, WRAP)
    assert np.abs(combined - (2 * first - 3 * second)).max() < 1e-12


def test_masked_pixels_are_zero():
    """Checks that the destination pixels outside the source coverage are exactly zero."""
    fisheye = np.full((32, 32, 3), 0.9)
    image, mask = warp(fisheye, ProjectionSpec.fisheye(32), ProjectionSpec.erp(16))
    assert mask[:4].all()
    assert not mask[-4:].any()
    assert (image[~mask] == 0).all()


def test_uncoverable_destination_with_a_filling_policy():
    """Checks that a source which cannot cover the destination requires the zero policy."""
    with pytest.raises(OmniError, match=error_match(Warping.IncompatibleSpecs)):
        warp(np.ones((32, 32, 3)), ProjectionSpec.fisheye(32), ProjectionSpec.erp(16), CLAMP)


def test_wrap_policy_requires_an_erp_source():
    """Checks that the longitude wrap-around is refused for a fisheye source."""
    with pytest.raises(OmniError, match=error_match(Sampling.InvalidPolicy)):
        warp(np.ones((32, 32, 3)), ProjectionSpec.fisheye(32), ProjectionSpec.erp(16), WRAP)


def test_source_shape_must_match_the_spec():
    """Checks that the source raster must have the shape of its spec."""
    with pytest.raises(OmniError, match=error_match(Sampling.InvalidImage)):
        warp(np.ones((16, 16, 3)), ProjectionSpec.erp(16), ProjectionSpec.erp(8), WRAP)


def test_threads_do_not_change_the_output(erp_32):
    """Checks that the warp does not depend on the number of worker threads."""
    dst_spec = ProjectionSpec.fisheye(24, aperture=math.radians(200), hemisphere="back")
    serial, serial_mask = warp(erp_32, ProjectionSpec.erp(32), dst_spec, WRAP, threads=1)
    parallel, parallel_mask = warp(erp_32, ProjectionSpec.erp(32), dst_spec, WRAP, threads=3)
    assert np.array_equal(serial_mask, parallel_mask)
    assert np.allclose(serial, parallel, atol=1e-12)


def test_perspective_view_of_a_smooth_sphere():
    """Checks that a perspective view samples the sphere where its pixels look at."""
    spec = ProjectionSpec.perspective(12, 16, fov=math.radians(60), view=(0.7, -0.2))
    image, _ = warp(smooth_erp(64), ProjectionSpec.erp(64), spec, SampleSpec(kernel=Kernel.BILINEAR))
    theta, phi, _ = plane_to_sphere(*raster_plane_grid(spec), spec)
    assert np.abs(image - smooth_sphere_function(theta, phi)).max() < 0.01


def test_plan_is_reused_for_the_same_geometry(rng):
    """Checks that the second warp of the same geometry reuses the cached plan and returns its own mask."""
    src_spec, dst_spec = ProjectionSpec.erp(16), ProjectionSpec.fisheye(12, aperture=math.radians(200))
    warp_plan.cache_clear()
    first, first_mask = warp(rng.random((16, 32, 3)), src_spec, dst_spec, WRAP)
    first_mask[:] = False
    second, second_mask = warp(np.ones((16, 32, 3)), src_spec, dst_spec, WRAP)
    assert warp_plan.cache_info().hits == 1
    assert second_mask.all()
    assert not np.array_equal(first, second)


def test_rows_select_a_band_of_the_destination(erp_32):
    """Checks that warping a band of rows gives the same rows as the full warp."""
    dst_spec = ProjectionSpec.perspective(12, 16, view=(0.4, 0.2))
    full, full_mask = warp(erp_32, ProjectionSpec.erp(32), dst_spec, WRAP)
    band, band_mask = warp(erp_32, ProjectionSpec.erp(32), dst_spec, WRAP, rows=(3, 8))
    assert band.shape == (5, 16, 3)
    assert np.array_equal(band_mask, full_mask[3:8])
    assert np.abs(band - full[3:8]).max() < 1e-12


@pytest.mark.parametrize("rows", [(4, 4), (6, 2), (0, 13)])
def test_invalid_rows(erp_16, rows):
    """Checks that the rows must be a non-empty range within the destination."""
    with pytest.raises(OmniError, match=error_match(Warping.InvalidRows)):
        warp(erp_16, ProjectionSpec.erp(16), ProjectionSpec.perspective(12, 16), WRAP, rows=rows)
