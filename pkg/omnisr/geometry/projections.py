"""The module which implements the closed-form transforms between the unit sphere and the ERP, Fisheye and Perspective
planes, as well as the pixel-centre conventions of their rasters.

Every transform comes in two flavours:
  - an *array* flavour (``*_arrays``) which works element-wise on numpy arrays and reports out-of-domain points
    through a boolean validity array, and
  - a *scalar* flavour working on :class:`~omnisr.geometry.coords.SphericalCoord` and
    :class:`~omnisr.geometry.coords.PlaneCoord` which raises the errors of :obj:`omnisr.geometry.errors`.

Note:
    The top raster row maps to the north pole and pixel ``(m, n)`` is sampled at its centre ``(m + 0.5, n + 0.5)``,
    uniformly for all projections.
"""

import math

import numpy as np

from omnisr.geometry.coords import (
    HALF_PI,
    PlaneCoord,
    ProjectionKind,
    ProjectionSpec,
    SphericalCoord,
    wrap_longitude,
)
from omnisr.geometry.errors import Distortion, Projection


def _require(spec: ProjectionSpec, kind: ProjectionKind) -> None:
    if spec.kind != kind:
        raise Projection.InvalidProjection.with_information(expected=str(kind), got=str(spec.kind))


def _lens_sign(spec: ProjectionSpec) -> float:
    return 1.0 if spec.hemisphere == "front" else -1.0


def sphere_to_vector(theta, phi):
    """Converts spherical coordinates to unit vectors ``(x, y, z)``; ``z`` points to the north pole."""
    cos_phi = np.cos(phi)
    return cos_phi * np.cos(theta), cos_phi * np.sin(theta), np.sin(phi)


def vector_to_sphere(x, y, z):
    """Converts (not necessarily unit) vectors to spherical coordinates ``(theta, phi)``."""
    return np.arctan2(y, x), np.arctan2(z, np.hypot(x, y))


# ERP -------------------------------------------------------------------------------------------------------------


def erp_from_sphere_arrays(theta, phi):
    """The ERP plane coordinates ``(x_E, y_E) = (theta, phi)``."""
    return wrap_longitude(np.asarray(theta, dtype=np.float64)), np.asarray(phi, dtype=np.float64)


def sphere_from_erp_arrays(x, y):
    """The inverse of :func:`erp_from_sphere_arrays`, with the validity of each point."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return wrap_longitude(x), y, np.abs(y) <= HALF_PI


def erp_from_sphere(s: SphericalCoord) -> PlaneCoord:
    """Projects a point of the sphere onto the ERP plane.

    Example:
        .. code-block:: python

            erp_from_sphere(SphericalCoord(theta=0, phi=0)) == PlaneCoord(0, 0)
    """
    return PlaneCoord(s.theta, s.phi)


def sphere_from_erp(p: PlaneCoord) -> SphericalCoord:
    """The inverse of :func:`erp_from_sphere`."""
    if abs(p.y) > HALF_PI:
        raise Distortion.DomainError.with_information(y=p.y)
    return SphericalCoord(theta=p.x, phi=p.y)


# Fisheye ---------------------------------------------------------------------------------------------------------


def fisheye_from_sphere_arrays(theta, phi, spec: ProjectionSpec):
    """Projects points of the sphere onto the unit-disk fisheye plane of ``spec``.

    The point is first aligned with the horizontally spliced fisheye by the rotation of the spec, then
    ``rho = 2 * (pi/2 - phi*) / A_F`` and ``theta_F = theta*``.

    Returns:
        The tuple ``(x_F, y_F, valid)`` where ``valid`` is false for points outside the covered hemisphere
        (``rho > 1``) or beyond the pole after the alignment shift.
    """
    _require(spec, ProjectionKind.FISHEYE)
    sign = _lens_sign(spec)
    d_theta, d_phi = spec.rotation
    theta_r = sign * np.asarray(theta, dtype=np.float64) + d_theta
    phi_r = sign * np.asarray(phi, dtype=np.float64) + d_phi
    rho = (HALF_PI - phi_r) * 2 / spec.aperture
    valid = (rho <= 1) & (phi_r <= HALF_PI)
    return rho * np.cos(theta_r), rho * np.sin(theta_r), valid


def sphere_from_fisheye_arrays(x, y, spec: ProjectionSpec):
    """The inverse of :func:`fisheye_from_sphere_arrays`.

    Points beyond the rim (``rho > 1``) keep following the equidistant model; they are valid as long as they land on
    the sphere, which lets fisheye rasters carry content beyond the rim for interpolation support.

    Returns:
        The tuple ``(theta, phi, valid)``.
    """
    _require(spec, ProjectionKind.FISHEYE)
    sign = _lens_sign(spec)
    d_theta, d_phi = spec.rotation
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    phi_r = HALF_PI - spec.aperture * np.hypot(x, y) / 2
    phi = sign * (phi_r - d_phi)
    theta = wrap_longitude(sign * (np.arctan2(y, x) - d_theta))
    valid = (phi_r >= -HALF_PI) & (np.abs(phi) <= HALF_PI)
    return theta, np.clip(phi, -HALF_PI, HALF_PI), valid


def fisheye_from_sphere(s: SphericalCoord, spec: ProjectionSpec) -> PlaneCoord:
    """Projects a point of the sphere onto the fisheye plane.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Projection.OutOfHemisphere`` if the point is not covered by this fisheye (``rho > 1``), in which case
            the caller routes it to the other fisheye of the pair.

    Example:
        .. code-block:: python

            spec = ProjectionSpec.fisheye(512, aperture=math.pi)
            fisheye_from_sphere(SphericalCoord(theta=0, phi=0), spec) == PlaneCoord(1, 0)
    """
    x, y, valid = fisheye_from_sphere_arrays(s.theta, s.phi, spec)
    if not valid:
        raise Projection.OutOfHemisphere.with_information(theta=s.theta, phi=s.phi)
    return PlaneCoord(float(x), float(y))


def sphere_from_fisheye(p: PlaneCoord, spec: ProjectionSpec) -> SphericalCoord:
    """The inverse of :func:`fisheye_from_sphere`."""
    theta, phi, valid = sphere_from_fisheye_arrays(p.x, p.y, spec)
    if not valid:
        raise Distortion.DomainError.with_information(x=p.x, y=p.y)
    return SphericalCoord(theta=float(theta), phi=float(phi))


# Perspective -----------------------------------------------------------------------------------------------------


def _to_camera(x, y, z, view: tuple[float, float]):
    """Rotates world vectors into the camera frame, whose optical axis is ``+x`` and whose up direction is ``+z``."""
    theta_p, phi_p = view
    ct, st = math.cos(theta_p), math.sin(theta_p)
    cp, sp = math.cos(phi_p), math.sin(phi_p)
    x1 = x * ct + y * st
    y1 = -x * st + y * ct
    return x1 * cp + z * sp, y1, -x1 * sp + z * cp


def _from_camera(x, y, z, view: tuple[float, float]):
    """The inverse of :func:`_to_camera`."""
    theta_p, phi_p = view
    ct, st = math.cos(theta_p), math.sin(theta_p)
    cp, sp = math.cos(phi_p), math.sin(phi_p)
    x1 = x * cp - z * sp
    z1 = x * sp + z * cp
    return x1 * ct - y * st, x1 * st + y * ct, z1


def perspective_from_sphere_arrays(theta, phi, spec: ProjectionSpec):
    """Projects points of the sphere onto the gnomonic plane of the perspective camera.

    In the camera frame, ``x_P = tan(theta)`` and ``y_P = tan(phi) / cos(theta)``.

    Returns:
        The tuple ``(x_P, y_P, in_front, inside_fov)``. Points behind the camera get ``nan`` coordinates.
    """
    _require(spec, ProjectionKind.PERSPECTIVE)
    xc, yc, zc = _to_camera(*sphere_to_vector(np.asarray(theta, dtype=np.float64), phi), spec.view)
    in_front = xc > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        xp = np.where(in_front, yc / np.where(in_front, xc, 1.0), np.nan)
        yp = np.where(in_front, zc / np.where(in_front, xc, 1.0), np.nan)
    ex, ey = spec.half_extent
    inside = in_front & (np.abs(np.nan_to_num(xp, nan=np.inf)) <= ex) & (np.abs(np.nan_to_num(yp, nan=np.inf)) <= ey)
    return xp, yp, in_front, inside


def sphere_from_perspective_arrays(x, y, spec: ProjectionSpec):
    """The inverse of :func:`perspective_from_sphere_arrays`; every plane point is valid."""
    _require(spec, ProjectionKind.PERSPECTIVE)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    theta, phi = vector_to_sphere(*_from_camera(np.ones_like(x), x, y, spec.view))
    return wrap_longitude(theta), phi, np.isfinite(theta)


def perspective_from_sphere(s: SphericalCoord, spec: ProjectionSpec) -> tuple[PlaneCoord, bool]:
    """Projects a point of the sphere onto the perspective plane.

    Returns:
        The plane coordinate and a flag which is ``True`` when the point lies inside the field of view.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Projection.BehindCamera`` if the point is behind the camera.
    """
    xp, yp, in_front, inside = perspective_from_sphere_arrays(s.theta, s.phi, spec)
    if not in_front:
        raise Projection.BehindCamera.with_information(theta=s.theta, phi=s.phi)
    return PlaneCoord(float(xp), float(yp)), bool(inside)


def sphere_from_perspective(p: PlaneCoord, spec: ProjectionSpec) -> SphericalCoord:
    """The inverse of :func:`perspective_from_sphere`."""
    theta, phi, _ = sphere_from_perspective_arrays(p.x, p.y, spec)
    return SphericalCoord(theta=float(theta), phi=float(phi))


# Generic dispatch and raster conventions -------------------------------------------------------------------------


def sphere_to_plane(theta, phi, spec: ProjectionSpec):
    """Projects points of the sphere onto the plane of any projection.

    Returns:
        The tuple ``(x, y, valid)``, where ``valid`` marks the points lying inside the domain of the projection (the
        covered hemisphere for fisheye, the field of view for perspective).
    """
    match spec.kind:
        case ProjectionKind.ERP:
            x, y = erp_from_sphere_arrays(theta, phi)
            return x, y, np.ones(np.shape(x), dtype=bool)
        case ProjectionKind.FISHEYE:
            return fisheye_from_sphere_arrays(theta, phi, spec)
        case ProjectionKind.PERSPECTIVE:
            x, y, _, inside = perspective_from_sphere_arrays(theta, phi, spec)
            return x, y, inside


def plane_to_sphere(x, y, spec: ProjectionSpec):
    """Maps plane points of any projection back to the sphere, see :func:`sphere_to_plane`."""
    match spec.kind:
        case ProjectionKind.ERP:
            return sphere_from_erp_arrays(x, y)
        case ProjectionKind.FISHEYE:
            return sphere_from_fisheye_arrays(x, y, spec)
        case ProjectionKind.PERSPECTIVE:
            return sphere_from_perspective_arrays(x, y, spec)


def pixel_to_plane(rows, cols, spec: ProjectionSpec):
    """Converts integer (or fractional) pixel indices to plane coordinates of the pixel centres.

    For ERP, row ``m`` has latitude ``pi/2 - (m + 0.5) / M * pi`` and column ``n`` has longitude
    ``(n + 0.5) / N * 2 * pi - pi``.
    """
    u = (np.asarray(cols, dtype=np.float64) + 0.5) / spec.width
    v = (np.asarray(rows, dtype=np.float64) + 0.5) / spec.height
    match spec.kind:
        case ProjectionKind.ERP:
            return u * 2 * np.pi - np.pi, HALF_PI - v * np.pi
        case ProjectionKind.FISHEYE:
            return 2 * u - 1, 1 - 2 * v
        case ProjectionKind.PERSPECTIVE:
            ex, ey = spec.half_extent
            return ex * (2 * u - 1), ey * (1 - 2 * v)


def plane_to_pixel(x, y, spec: ProjectionSpec):
    """Converts plane coordinates to *continuous* pixel coordinates ``(col, row)``.

    The centre of pixel ``(m, n)`` is at ``(n + 0.5, m + 0.5)``, which is the convention of every sampler in
    :obj:`omnisr.resampling`.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    match spec.kind:
        case ProjectionKind.ERP:
            return (x + np.pi) / (2 * np.pi) * spec.width, (HALF_PI - y) / np.pi * spec.height
        case ProjectionKind.FISHEYE:
            return (x + 1) / 2 * spec.width, (1 - y) / 2 * spec.height
        case ProjectionKind.PERSPECTIVE:
            ex, ey = spec.half_extent
            return (x / ex + 1) / 2 * spec.width, (1 - y / ey) / 2 * spec.height


def raster_plane_grid(spec: ProjectionSpec):
    """The plane coordinates of all pixel centres of the raster of ``spec``, as two ``(height, width)`` arrays."""
    rows, cols = np.meshgrid(np.arange(spec.height), np.arange(spec.width), indexing="ij")
    return pixel_to_plane(rows, cols, spec)
