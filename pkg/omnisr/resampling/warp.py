"""The module which implements the destination-driven warper between projection rasters.

For each destination pixel centre, the warper maps the destination plane to the sphere and the sphere to the source
plane, then gathers the source with the sampler of a :class:`~omnisr.resampling.kernels.SampleSpec`. There is no
forward splatting, hence the output has no holes.

The gather only depends on the geometry. It is stored as a sparse matrix in a :class:`WarpPlan`, which is cached per
``(source, destination, sampling)`` so that every raster of a dataset reuses the plan of the first one.
"""

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from loguru import logger
from pydantic import ConfigDict, NonNegativeInt, PositiveInt, validate_call
from scipy.sparse import csr_matrix

from omnisr.geometry.coords import ProjectionKind, ProjectionSpec
from omnisr.geometry.projections import pixel_to_plane, plane_to_pixel, plane_to_sphere, sphere_to_plane
from omnisr.resampling.errors import Sampling, Warping
from omnisr.resampling.kernels import OutOfBounds, SampleSpec, apply_sampling, as_image_grid, sampling_matrix

WARP_PLAN_CACHE_SIZE = 8
"""The number of warp plans kept in memory. A plan holds about 200 MB per million destination pixels."""


class WarpPlan(NamedTuple):
    """The precomputed gather of a warp.

    ``matrix`` maps the flattened source raster to the flattened destination rows, ``mask`` marks the destination
    pixels with an in-domain source point and ``valid`` the destination pixels which exist on the sphere.
    """
    matrix: csr_matrix
    mask: np.ndarray
    valid: np.ndarray


def check_policy(src_spec: ProjectionSpec, sample: SampleSpec) -> None:
    """Checks that the out-of-bounds policy of ``sample`` is applicable to the source projection.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Sampling.InvalidPolicy`` if the longitude wrap-around is requested for a non-ERP source.
    """
    if sample.out_of_bounds == OutOfBounds.WRAP_LONGITUDE and src_spec.kind != ProjectionKind.ERP:
        raise Sampling.InvalidPolicy.with_information(source=str(src_spec.kind))


def sphere_sampling_matrix(
        src_spec: ProjectionSpec,
        theta,
        phi,
        sample: SampleSpec = SampleSpec(),
        valid=None) -> tuple[csr_matrix, np.ndarray]:
    """Builds the sparse matrix which samples rasters of ``src_spec`` at arbitrary points of the sphere.

    Returns:
        A tuple ``(matrix, mask)`` where the mask, of the shape of ``theta``, marks the points with an in-domain
        source point. The rows of the other points are zero.
    """
    x, y, inside = sphere_to_plane(theta, phi, src_spec)
    mask = inside & np.isfinite(x) & np.isfinite(y)
    if valid is not None:
        mask &= valid
    col, row = plane_to_pixel(np.where(mask, x, 0.0), np.where(mask, y, 0.0), src_spec)
    return sampling_matrix(src_spec.shape, col, row, sample, keep=mask), mask


def warp_to_sphere_points(
        src: np.ndarray,
        src_spec: ProjectionSpec,
        theta,
        phi,
        sample: SampleSpec = SampleSpec(),
        valid=None) -> tuple[np.ndarray, np.ndarray]:
    """Samples the source raster at arbitrary points of the sphere.

    Args:
        src:
            The source image grid, whose raster is described by ``src_spec``.
        src_spec:
            The source projection.
        theta:
            The longitudes of the points, an array of any shape.
        phi:
            The latitudes of the points, of the same shape as ``theta``.
        sample (Optional, default bicubic with the ``zero`` policy):
            The kernel and out-of-bounds policy.
        valid (Optional, default ``None``):
            An optional boolean array marking the points which actually exist.

    Returns:
        A tuple ``(values, mask)`` of shapes ``theta.shape + (channels,)`` and ``theta.shape``. Values are exactly
        zero where the mask is false.
    """
    matrix, mask = sphere_sampling_matrix(src_spec, theta, phi, sample, valid)
    values = apply_sampling(matrix, src, mask.shape)
    values[~mask] = 0.0
    return values, mask


@lru_cache(maxsize=WARP_PLAN_CACHE_SIZE)
def warp_plan(
        src_spec: ProjectionSpec,
        dst_spec: ProjectionSpec,
        sample: SampleSpec = SampleSpec(),
        rows: tuple[int, int] | None = None) -> WarpPlan:
    """Computes (or fetches from the cache) the gather of the destination rows ``range(*rows)``, by default all."""
    start, stop = rows or (0, dst_spec.height)
    logger.debug(f"Planning the warp of {src_spec.kind} {src_spec.shape} to {dst_spec.kind} rows {start}:{stop} ...")
    grid_rows, grid_cols = np.meshgrid(np.arange(start, stop), np.arange(dst_spec.width), indexing="ij")
    x, y = pixel_to_plane(grid_rows, grid_cols, dst_spec)
    theta, phi, valid = plane_to_sphere(x, y, dst_spec)
    matrix, mask = sphere_sampling_matrix(src_spec, theta, phi, sample, valid)
    mask.flags.writeable = False
    valid.flags.writeable = False
    return WarpPlan(matrix, mask, valid)


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def warp(
        src: np.ndarray,
        src_spec: ProjectionSpec,
        dst_spec: ProjectionSpec,
        sample: SampleSpec = SampleSpec(),
        threads: PositiveInt = 1,
        rows: tuple[NonNegativeInt, NonNegativeInt] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Converts a raster from one projection to another.

    Args:
        src:
            The source image grid of shape ``src_spec.shape + (channels,)``.
        src_spec:
            The source projection.
        dst_spec:
            The destination projection.
        sample (Optional, default bicubic with the ``zero`` policy):
            The kernel and out-of-bounds policy.
        threads (Optional, default ``1``):
            The number of worker threads over chunks of destination rows. The output does not depend on it.
        rows (Optional, default ``None``):
            Only warps the destination rows ``range(start, stop)`` given as ``(start, stop)``.

    Returns:
        A tuple ``(image, mask)`` where the mask is true at the destination pixels with an in-domain source point.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Warping.IncompatibleSpecs`` if some destination pixels on the sphere cannot be covered by the source
            and the policy is not ``zero``. Pixels which do not exist on the sphere (e.g. beyond the reach of a wide
            fisheye) are masked in any case.

        :class:`~omnisr.errors.errors.OmniError`:
            ``Sampling.InvalidImage`` or ``Sampling.InvalidPolicy`` for an invalid source or policy.
    """
    src = as_image_grid(src)
    if src.shape[:2] != src_spec.shape:
        raise Sampling.InvalidImage.with_information(shape=src.shape, expected=src_spec.shape)
    check_policy(src_spec, sample)
    if rows is not None and not rows[0] < rows[1] <= dst_spec.height:
        raise Warping.InvalidRows.with_information(rows=rows, height=dst_spec.height)

    plan = warp_plan(src_spec, dst_spec, sample, rows)
    uncovered = plan.valid & ~plan.mask
    if sample.out_of_bounds != OutOfBounds.ZERO and uncovered.any():
        raise Warping.IncompatibleSpecs.with_information(uncovered=int(uncovered.sum()))

    flat = src.reshape(-1, src.shape[2])
    if threads == 1:
        values = plan.matrix @ flat
    else:
        height = plan.mask.shape[0]
        bounds = np.linspace(0, height, min(threads, height) + 1).astype(int) * dst_spec.width
        with ThreadPoolExecutor(max_workers=threads) as executor:
            parts = list(executor.map(lambda start, stop: plan.matrix[start:stop] @ flat, bounds[:-1], bounds[1:]))
        values = np.concatenate(parts, axis=0)
    image = values.reshape(plan.mask.shape + (src.shape[2],))
    return image, plan.mask.copy()
