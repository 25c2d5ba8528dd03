"""Tests the :obj:`omnisr.geometry.projections` module."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from omnisr.errors.errors import OmniError
from omnisr.geometry.coords import PlaneCoord, ProjectionSpec, SphericalCoord, wrap_longitude
from omnisr.geometry.errors import Projection
from omnisr.geometry.projections import (
    erp_from_sphere,
    erp_from_sphere_arrays,
    fisheye_from_sphere,
    fisheye_from_sphere_arrays,
    perspective_from_sphere,
    perspective_from_sphere_arrays,
    pixel_to_plane,
    plane_to_pixel,
    sphere_from_erp,
    sphere_from_erp_arrays,
    sphere_from_fisheye,
    sphere_from_fisheye_arrays,
    sphere_from_perspective_arrays,
)
from omnisr.test_utils.common import error_match

FISHEYE = ProjectionSpec.fisheye(512, aperture=math.pi)
CAMERA = ProjectionSpec.perspective(64, 64, fov=math.pi / 2)


@pytest.mark.parametrize(("theta", "expected"), [
    (math.pi, math.pi), (-math.pi, math.pi), (0.0, 0.0), (3 * math.pi, math.pi), (-0.5, -0.5)
])
def test_wrap_longitude(theta, expected):
    """Checks that longitudes wrap into ``(-pi, pi]``."""
    assert wrap_longitude(theta) == pytest.approx(expected, abs=1e-15)


def test_spherical_coord_rejects_latitudes_beyond_the_poles():
    """Checks that latitudes are rejected rather than clamped, whereas longitudes wrap."""
    with pytest.raises(ValidationError):
        SphericalCoord(theta=0, phi=2)
    assert SphericalCoord(theta=3 * math.pi, phi=0).theta == pytest.approx(math.pi)


@pytest.mark.parametrize(("s", "p"), [
    ((0.0, 0.0), (0.0, 0.0)),
    ((math.pi / 2, math.pi / 4), (math.pi / 2, math.pi / 4)),
])
def test_erp_from_sphere(s, p):
    """Checks the ERP projection at a few points and its inverse."""
    point = erp_from_sphere(SphericalCoord(theta=s[0], phi=s[1]))
    assert point == pytest.approx(p)
    assert sphere_from_erp(point) == SphericalCoord(theta=s[0], phi=s[1])


def test_erp_round_trip(rng):
    """Checks that the inverse ERP projection is exact."""
    theta = rng.uniform(-math.pi, math.pi, 1000)
    phi = rng.uniform(-math.pi / 2, math.pi / 2, 1000)
    back_theta, back_phi, valid = sphere_from_erp_arrays(*erp_from_sphere_arrays(theta, phi))
    assert valid.all()
    assert np.abs(back_theta - theta).max() < 1e-12
    assert np.abs(back_phi - phi).max() < 1e-12


@pytest.mark.parametrize(("s", "p"), [
    ((0.0, math.pi / 2), (0.0, 0.0)),
    ((0.0, 0.0), (1.0, 0.0)),
    ((math.pi / 2, 0.0), (0.0, 1.0)),
])
def test_fisheye_from_sphere(s, p):
    """Checks the horizontal fisheye projection at the centre and on the rim."""
    point = fisheye_from_sphere(SphericalCoord(theta=s[0], phi=s[1]), FISHEYE)
    assert point.x == pytest.approx(p[0], abs=1e-12)
    assert point.y == pytest.approx(p[1], abs=1e-12)


def test_fisheye_out_of_hemisphere():
    """Checks that a southern point cannot be projected onto the front fisheye."""
    with pytest.raises(OmniError, match=error_match(Projection.OutOfHemisphere)):
        fisheye_from_sphere(SphericalCoord(theta=0, phi=-0.1), FISHEYE)


def test_back_fisheye_covers_the_south():
    """Checks that the back lens of the pair looks at the south pole."""
    back = ProjectionSpec.fisheye(512, aperture=math.pi, hemisphere="back")
    assert fisheye_from_sphere(SphericalCoord(theta=1.0, phi=-math.pi / 2), back) == pytest.approx((0, 0), abs=1e-12)
    with pytest.raises(OmniError, match=error_match(Projection.OutOfHemisphere)):
        fisheye_from_sphere(SphericalCoord(theta=0, phi=0.1), back)


@pytest.mark.parametrize(("hemisphere", "rotation", "phi_range"), [
    ("front", (0.0, 0.0), (0.01, math.pi / 2 - 0.01)),
    ("back", (0.0, 0.0), (-math.pi / 2 + 0.01, -0.01)),
    ("front", (0.3, math.pi / 6), (-math.pi / 6 + 0.01, math.pi / 3 - 0.01)),
])
def test_fisheye_round_trip(rng, hemisphere, rotation, phi_range):
    """Checks that the inverse fisheye projection recovers covered points."""
    spec = ProjectionSpec.fisheye(512, aperture=math.pi, rotation=rotation, hemisphere=hemisphere)
    theta = rng.uniform(-math.pi + 0.01, math.pi - 0.01, 10_000)
    phi = rng.uniform(*phi_range, 10_000)
    x, y, valid = fisheye_from_sphere_arrays(theta, phi, spec)
    assert valid.all()
    back_theta, back_phi, back_valid = sphere_from_fisheye_arrays(x, y, spec)
    assert back_valid.all()
    assert np.abs(wrap_longitude(back_theta - theta)).max() < 1e-10
    assert np.abs(back_phi - phi).max() < 1e-10


def test_fisheye_beyond_the_rim_stays_on_the_sphere():
    """Checks that plane points beyond the rim of a wide fisheye still map back to the sphere."""
    spec = ProjectionSpec.fisheye(64, aperture=math.radians(200))
    s = sphere_from_fisheye(PlaneCoord(1.2, 0.0), spec)
    assert s.phi == pytest.approx(math.pi / 2 - math.radians(100) * 1.2)


@pytest.mark.parametrize(("s", "p"), [
    ((0.0, 0.0), (0.0, 0.0)),
    ((math.pi / 4, 0.0), (1.0, 0.0)),
    ((0.0, math.pi / 4), (0.0, 1.0)),
])
def test_perspective_from_sphere(s, p):
    """Checks the gnomonic projection of a camera looking at ``(0, 0)``."""
    point, _ = perspective_from_sphere(SphericalCoord(theta=s[0], phi=s[1]), CAMERA)
    assert point.x == pytest.approx(p[0], abs=1e-12)
    assert point.y == pytest.approx(p[1], abs=1e-12)


def test_perspective_behind_camera():
    """Checks that points behind the camera are rejected."""
    with pytest.raises(OmniError, match=error_match(Projection.BehindCamera)):
        perspective_from_sphere(SphericalCoord(theta=math.pi, phi=0), CAMERA)


def test_perspective_inside_fov_flag():
    """Checks the field of view flag."""
    _, inside = perspective_from_sphere(SphericalCoord(theta=0.2, phi=0.1), CAMERA)
    _, outside = perspective_from_sphere(SphericalCoord(theta=1.2, phi=0.1), CAMERA)
    assert inside
    assert not outside


@pytest.mark.parametrize("view", [(0.0, 0.0), (0.4, 0.3), (-2.0, -1.0)])
def test_perspective_round_trip(rng, view):
    """Checks that the perspective projection inverts its inverse on the whole frame."""
    spec = ProjectionSpec.perspective(32, 48, fov=math.radians(100), view=view)
    ex, ey = spec.half_extent
    x = rng.uniform(-ex, ex, 10_000)
    y = rng.uniform(-ey, ey, 10_000)
    theta, phi, valid = sphere_from_perspective_arrays(x, y, spec)
    assert valid.all()
    back_x, back_y, in_front, inside = perspective_from_sphere_arrays(theta, phi, spec)
    assert in_front.all()
    assert np.abs(back_x - x).max() < 1e-10
    assert np.abs(back_y - y).max() < 1e-10


def test_perspective_half_extent_spans_the_longer_side():
    """Checks that the field of view spans the longer side of the frame."""
    ex, ey = ProjectionSpec.perspective(50, 100, fov=math.pi / 2).half_extent
    assert ex == pytest.approx(1.0)
    assert ey == pytest.approx(0.5)


def test_erp_pixel_centres():
    """Checks the latitude and longitude of ERP pixel centres; the top row is north."""
    spec = ProjectionSpec.erp(4)
    theta, phi = pixel_to_plane(np.array([0, 3]), np.array([0, 7]), spec)
    assert phi == pytest.approx([math.pi / 2 - 0.5 / 4 * math.pi, math.pi / 2 - 3.5 / 4 * math.pi])
    assert theta == pytest.approx([0.5 / 8 * 2 * math.pi - math.pi, 7.5 / 8 * 2 * math.pi - math.pi])


@pytest.mark.parametrize("spec", [
    ProjectionSpec.erp(8), ProjectionSpec.fisheye(10, aperture=2.0), ProjectionSpec.perspective(6, 9)
])
def test_pixel_centre_convention(spec):
    """Checks that every raster puts the centre of pixel ``(m, n)`` at ``(n + 0.5, m + 0.5)``."""
    rows, cols = np.meshgrid(np.arange(spec.height), np.arange(spec.width), indexing="ij")
    col, row = plane_to_pixel(*pixel_to_plane(rows, cols, spec), spec)
    assert np.abs(col - (cols + 0.5)).max() < 1e-9
    assert np.abs(row - (rows + 0.5)).max() < 1e-9


@pytest.mark.parametrize("kwargs", [
    dict(kind="erp", width=10, height=4),
    dict(kind="fisheye", width=10, height=10, aperture=7.0),
    dict(kind="fisheye", width=10, height=8, aperture=3.0),
    dict(kind="perspective", width=10, height=10, fov=3.2),
])
def test_projection_spec_invariants(kwargs):
    """Checks that inconsistent projection specs are rejected."""
    with pytest.raises(ValidationError):
        ProjectionSpec(**kwargs)
