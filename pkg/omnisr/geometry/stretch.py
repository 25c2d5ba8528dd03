"""The module which implements the closed-form stretching ratios of the projections and their numeric oracle.

The stretching ratio ``K`` of a projection is the ratio between the area of a spherical surface element and the area
of its image on the projection plane, i.e. ``K = cos(phi) / |J|`` where ``J`` is the Jacobian determinant of the
sphere to plane map in terms of ``(theta, phi)``.

Note:
    Fisheye plane areas are measured in angular units, i.e. the unit-disk coordinates scaled by ``A_F / 2``. See
    :func:`metric_plane_map`.
"""

import math
from typing import Callable

import numpy as np
from pydantic import Field, validate_call
from typing_extensions import Annotated

from omnisr.geometry.coords import (
    HALF_PI,
    Hemisphere,
    PlaneCoord,
    ProjectionKind,
    ProjectionSpec,
    SphericalCoord,
)
from omnisr.geometry.errors import Distortion, Projection
from omnisr.geometry.projections import (
    fisheye_from_sphere_arrays,
    perspective_from_sphere_arrays,
    raster_plane_grid,
)

RHO_EPSILON = 1e-9
"""Below this fisheye radius, the general (rotated) fisheye ratio is considered singular."""

JACOBIAN_EPSILON = 1e-12
"""Below this absolute Jacobian determinant, the numeric ratio is considered singular."""

PlaneMap = Callable[[np.ndarray | float, np.ndarray | float], tuple]
"""A sphere to plane map ``(theta, phi) -> (x, y)`` working on scalars or arrays."""

FiniteStep = Annotated[float, Field(gt=0, le=1e-3)]
"""The type hint validator for finite difference steps."""


def stretch_erp_arrays(y):
    """Element-wise ``K_ERP = cos(y)``."""
    return np.cos(y)


def stretch_fisheye_arrays(x, y, spec: ProjectionSpec):
    """Element-wise fisheye stretching ratio on the unit-disk plane of ``spec``.

    The ratio reads ``cos(pi/2 - (A_F/2) * rho - d_phi_r) / ((A_F/2) * rho)``; at the disk centre the analytic limit
    ``1`` is used when ``d_phi_r == 0``, whereas the rotated form diverges and gives ``nan``.
    """
    half_aperture = spec.aperture / 2
    d_phi = spec.rotation[1]
    r = half_aperture * np.hypot(x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.cos(HALF_PI - r - d_phi) / r
    centre = r < RHO_EPSILON * half_aperture
    return np.where(centre, 1.0 if d_phi == 0 else np.nan, k)


def stretch_perspective_arrays(x, y):
    """Element-wise ``K_P = (1 + x^2 + y^2)^(-3/2)``."""
    return (1 + np.square(x) + np.square(y)) ** -1.5


def stretch_erp(p: PlaneCoord) -> float:
    """The ERP stretching ratio ``cos(y)``.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Distortion.DomainError`` if ``|y| > pi/2``.
    """
    if abs(p.y) > HALF_PI:
        raise Distortion.DomainError.with_information(y=p.y)
    return math.cos(p.y)


def stretch_fisheye(p: PlaneCoord, spec: ProjectionSpec) -> float:
    """The fisheye stretching ratio at a point of the unit disk.

    For ``A_F = pi`` without rotation, this is ``(2/pi) * sin((pi/2) * rho) / rho``.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Distortion.DomainError`` if the point lies outside the unit disk.

        :class:`~omnisr.errors.errors.OmniError`:
            ``Distortion.SingularJacobian`` if the point is (numerically) at the centre of a rotated fisheye.
    """
    if spec.kind != ProjectionKind.FISHEYE:
        raise Projection.InvalidProjection.with_information(expected="fisheye", got=str(spec.kind))
    rho = math.hypot(p.x, p.y)
    if rho > 1:
        raise Distortion.DomainError.with_information(rho=rho)
    if rho < RHO_EPSILON:
        if spec.rotation[1] != 0:
            raise Distortion.SingularJacobian.with_information(rho=rho, d_phi=spec.rotation[1])
        return 1.0
    r = spec.aperture / 2 * rho
    return math.cos(HALF_PI - r - spec.rotation[1]) / r


def stretch_perspective(p: PlaneCoord, spec: ProjectionSpec | None = None) -> float:
    """The perspective stretching ratio ``(1 + x^2 + y^2)^(-3/2)``.

    Args:
        p:
            The point on the gnomonic plane.
        spec (Optional, default ``None``):
            When given, the point is checked against the field of view of the spec.
    """
    if not (math.isfinite(p.x) and math.isfinite(p.y)):
        raise Distortion.DomainError.with_information(x=p.x, y=p.y)
    if spec is not None:
        ex, ey = spec.half_extent
        if abs(p.x) > ex or abs(p.y) > ey:
            raise Distortion.DomainError.with_information(x=p.x, y=p.y)
    return (1 + p.x * p.x + p.y * p.y) ** -1.5


def stretch_erp_over_fisheye(phi: float) -> float:
    """The ratio ``K_ERP / K_Fisheye = pi/2 - |phi|`` at corresponding points of the horizontally spliced pair."""
    if abs(phi) > HALF_PI:
        raise Distortion.DomainError.with_information(phi=phi)
    return HALF_PI - abs(phi)


def spliced_fisheye_point(s: SphericalCoord, aperture: float = math.pi) -> tuple[Hemisphere, PlaneCoord]:
    """Finds the fisheye of the horizontally spliced pair which covers a point and its position on that fisheye.

    The northern hemisphere (``phi >= 0``) belongs to the front lens, the southern one to the back lens.
    """
    hemisphere: Hemisphere = "front" if s.phi >= 0 else "back"
    spec = ProjectionSpec.fisheye(2, aperture=aperture, hemisphere=hemisphere)
    x, y, _ = fisheye_from_sphere_arrays(s.theta, s.phi, spec)
    return hemisphere, PlaneCoord(float(x), float(y))


def metric_plane_map(spec: ProjectionSpec) -> PlaneMap:
    """Makes the sphere to plane map of ``spec`` in the units the closed-form stretching ratios are written in.

    The ERP map does not wrap longitudes, so that finite differences across the date line stay smooth.
    """
    match spec.kind:
        case ProjectionKind.ERP:
            return lambda theta, phi: (np.asarray(theta, dtype=np.float64), np.asarray(phi, dtype=np.float64))
        case ProjectionKind.FISHEYE:
            half_aperture = spec.aperture / 2

            def fisheye_map(theta, phi):
                x, y, _ = fisheye_from_sphere_arrays(theta, phi, spec)
                return half_aperture * x, half_aperture * y

            return fisheye_map
        case ProjectionKind.PERSPECTIVE:

            def perspective_map(theta, phi):
                x, y, _, _ = perspective_from_sphere_arrays(theta, phi, spec)
                return x, y

            return perspective_map


@validate_call
def numeric_stretch(plane_map: Callable, s: SphericalCoord, h: FiniteStep = 1e-5) -> float:
    """Computes the stretching ratio ``cos(phi) / |J|`` with a central finite difference Jacobian.

    This is the oracle against which every closed-form ratio is checked.

    Args:
        plane_map:
            The sphere to plane map, e.g. from :func:`metric_plane_map`.
        s:
            The point on the sphere, interior to the domain of the map.
        h (Optional, default ``1e-5``):
            The finite difference step in radians, in ``(0, 1e-3]``.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Distortion.DomainError`` if the stencil crosses a pole or the map is undefined at the stencil.

        :class:`~omnisr.errors.errors.OmniError`:
            ``Distortion.SingularJacobian`` if ``|J| < 1e-12``.
    """
    if abs(s.phi) + h > HALF_PI:
        raise Distortion.DomainError.with_information(phi=s.phi, h=h)

    thetas = np.array([s.theta + h, s.theta - h, s.theta, s.theta])
    phis = np.array([s.phi, s.phi, s.phi + h, s.phi - h])
    x, y = (np.asarray(v, dtype=np.float64) for v in plane_map(thetas, phis))
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise Distortion.DomainError.with_information(theta=s.theta, phi=s.phi)

    x_theta, y_theta = (x[0] - x[1]) / (2 * h), (y[0] - y[1]) / (2 * h)
    x_phi, y_phi = (x[2] - x[3]) / (2 * h), (y[2] - y[3]) / (2 * h)
    jacobian = abs(x_theta * y_phi - x_phi * y_theta)
    if jacobian < JACOBIAN_EPSILON:
        raise Distortion.SingularJacobian.with_information(theta=s.theta, phi=s.phi)
    return math.cos(s.phi) / jacobian


def stretch_map(spec: ProjectionSpec) -> np.ndarray:
    """Renders the stretching ratio at every pixel centre of the raster of ``spec``.

    Returns:
        A ``(height, width)`` array; fisheye pixels outside the unit disk are ``nan``.
    """
    x, y = raster_plane_grid(spec)
    match spec.kind:
        case ProjectionKind.ERP:
            return stretch_erp_arrays(y)
        case ProjectionKind.FISHEYE:
            k = stretch_fisheye_arrays(x, y, spec)
            return np.where(np.hypot(x, y) <= 1, k, np.nan)
        case ProjectionKind.PERSPECTIVE:
            return stretch_perspective_arrays(x, y)
