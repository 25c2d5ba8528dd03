"""The module which projects plain image patches onto the ERP as if they were perspective images.

A window of a plain image is treated as a perspective image with a fixed field of view, looking at the longitude
``0`` and the latitude ``Phi_p``, and is warped onto an ERP canvas. The farther ``Phi_p`` from the equator, the more
distorted the projection.
"""

import math
from typing import NamedTuple

import numpy as np

from omnisr.augmentation.errors import Augmentation
from omnisr.config.config import AugmentConfig
from omnisr.geometry.coords import HALF_PI, ProjectionSpec
from omnisr.geometry.projections import pixel_to_plane, plane_to_pixel, sphere_from_perspective_arrays
from omnisr.resampling.kernels import Kernel, OutOfBounds, SampleSpec, as_image_grid
from omnisr.resampling.warp import warp_to_sphere_points

POLE_TOLERANCE = 1e-12
"""Patches may touch a pole up to this tolerance in radians."""

BORDER_SAMPLES = 256
"""The number of samples per side of the perspective frame used to bound its footprint on the canvas."""

FROM_PERSPECTIVE = SampleSpec(kernel=Kernel.BICUBIC_ANTIALIASED, out_of_bounds=OutOfBounds.CLAMP_EDGE)


class ErpProjection(NamedTuple):
    """The projection of a patch on the bounding sub-window of an ERP canvas."""
    image: np.ndarray
    mask: np.ndarray
    top: int
    """The canvas row of the first row of the sub-window."""
    left: int
    """The canvas column of the first column of the sub-window."""

    def on_canvas(self, height: int) -> tuple[np.ndarray, np.ndarray]:
        """Pastes the projection on a black ERP canvas of the given height."""
        image = np.zeros((height, 2 * height, self.image.shape[2]))
        mask = np.zeros((height, 2 * height), dtype=bool)
        rows = slice(self.top, self.top + self.mask.shape[0])
        cols = slice(self.left, self.left + self.mask.shape[1])
        image[rows, cols] = self.image
        mask[rows, cols] = self.mask
        return image, mask


def split_three(img: np.ndarray) -> list[np.ndarray]:
    """Splits an image into three horizontally adjacent sub-images.

    The sub-images have ``width // 3`` columns each, the last one also takes the remainder columns.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Augmentation.TooSmall`` if the image is less than 3 pixels wide.
    """
    width = img.shape[1]
    if width < 3:
        raise Augmentation.TooSmall.with_information(width=width)
    third = width // 3
    return [img[:, :third], img[:, third:2 * third], img[:, 2 * third:]]


def _footprint(spec: ProjectionSpec, canvas: ProjectionSpec) -> tuple[slice, slice]:
    """Bounds the canvas pixels covered by a perspective frame by densely sampling the border of the frame."""
    ex, ey = spec.half_extent
    s = np.linspace(-1, 1, BORDER_SAMPLES)
    ones = np.ones_like(s)
    x = np.concatenate([ex * s, ex * s, -ex * ones, ex * ones, [0.0]])
    y = np.concatenate([ey * ones, -ey * ones, ey * s, ey * s, [0.0]])
    theta, phi, _ = sphere_from_perspective_arrays(x, y, spec)
    col, row = plane_to_pixel(theta, phi, canvas)
    top = max(int(math.floor(row.min())) - 1, 0)
    bottom = min(int(math.ceil(row.max())) + 1, canvas.height)
    left = max(int(math.floor(col.min())) - 1, 0)
    right = min(int(math.ceil(col.max())) + 1, canvas.width)
    return slice(top, bottom), slice(left, right)


def perspective_patch_to_erp(patch: np.ndarray, phi_p: float, cfg: AugmentConfig) -> ErpProjection:
    """Projects a plain patch, seen as a perspective image looking at ``(0, phi_p)``, onto the ERP canvas.

    Args:
        patch:
            The patch image grid.
        phi_p:
            The latitude of the view direction in radians.
        cfg:
            The augmentation configuration, which provides the field of view and the canvas height.

    Returns:
        The projection on the bounding sub-window of the canvas. The mask is true exactly where the canvas pixel lies
        inside the perspective frustum.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Augmentation.PoleOverlap`` if ``|phi_p| + fov / 2 > pi / 2``.
    """
    if abs(phi_p) + cfg.fov / 2 > HALF_PI + POLE_TOLERANCE:
        raise Augmentation.PoleOverlap.with_information(phi_p=phi_p, fov=cfg.fov)

    patch = as_image_grid(patch)
    spec = ProjectionSpec.perspective(patch.shape[0], patch.shape[1], fov=cfg.fov, view=(0.0, phi_p))
    canvas = ProjectionSpec.erp(cfg.erp_canvas)
    rows, cols = _footprint(spec, canvas)

    grid_rows, grid_cols = np.meshgrid(
        np.arange(rows.start, rows.stop), np.arange(cols.start, cols.stop), indexing="ij")
    theta, phi = pixel_to_plane(grid_rows, grid_cols, canvas)
    image, mask = warp_to_sphere_points(patch, spec, theta, phi, FROM_PERSPECTIVE)
    return ErpProjection(image, mask, rows.start, cols.start)
