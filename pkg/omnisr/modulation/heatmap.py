"""The module which renders offset fields as point heatmaps.

Each sampled pixel contributes the sampling positions of its kernel (the pixel centre alone for a ``(2, H, W)`` field,
the nine taps of a 3x3 kernel for an ``(18, H, W)`` one). The rendering is an RGB raster of the field's size:

  - red marks the deformed positions, i.e. each position moved by the offsets of its tap,
  - green marks the reference positions of the regular grid,
  - blue encodes the mean displacement magnitude of the taps of each sampled pixel, normalized by the largest
    displacement, over its block.

Where the offsets vanish the red and green dots coincide.
"""

from typing import NamedTuple

import numpy as np

from omnisr.modulation.blocks import TAPS
from omnisr.modulation.errors import Modulation


class OffsetsHeatmap(NamedTuple):
    """A heatmap together with the point sets it renders.

    The points are ordered by sampled pixel in raster order, then by tap.
    """
    image: np.ndarray
    """The ``(H, W, 3)`` rendering with values in ``[0, 1]``."""
    reference: np.ndarray
    """The ``(N, 2)`` continuous ``(y, x)`` sampling positions without offsets."""
    displaced: np.ndarray
    """The ``(N, 2)`` positions after displacement."""
    magnitude: np.ndarray
    """The ``(N,)`` displacement norms."""


def split_taps(field: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Splits an offset field into its kernel taps.

    Args:
        field:
            A ``(2, H, W)`` field of one ``(dy, dx)`` pair per pixel, or an ``(18, H, W)`` field of one pair per tap
            of a 3x3 kernel, in the row-major order of the taps.

    Returns:
        A tuple ``(taps, displacements)`` of shapes ``(k, 2)`` and ``(k, 2, H, W)`` where ``taps`` holds the
        ``(row, column)`` positions of the taps relative to the pixel.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Modulation.ShapeMismatch`` if the field has another shape.
    """
    field = np.asarray(field, dtype=np.float64)
    if field.ndim != 3 or field.shape[0] not in (2, 2 * len(TAPS)):
        raise Modulation.ShapeMismatch.with_information(field=field.shape)
    taps = np.array(TAPS if field.shape[0] > 2 else [(0, 0)], dtype=np.float64)
    return taps, field.reshape(-1, 2, *field.shape[1:])


def _dots(image: np.ndarray, points: np.ndarray, channel: int) -> None:
    pixels = np.floor(points).astype(int)
    height, width = image.shape[:2]
    inside = (pixels[:, 0] >= 0) & (pixels[:, 0] < height) & (pixels[:, 1] >= 0) & (pixels[:, 1] < width)
    image[pixels[inside, 0], pixels[inside, 1], channel] = 1.0


def offsets_heatmap(field: np.ndarray, stride: int = 8) -> OffsetsHeatmap:
    """Renders an offset field sampled every ``stride`` pixels.

    Args:
        field:
            A ``(2, H, W)`` or ``(18, H, W)`` offset field of ``(dy, dx)`` pairs in pixels, see :func:`split_taps`.
        stride (Optional, default ``8``):
            The spacing of the sampled pixels in both directions.

    Returns:
        An :class:`OffsetsHeatmap`; the sampled pixels are ``(i * stride, j * stride)``.

    Example:
        .. code-block:: python

            heatmap = offsets_heatmap(np.zeros((18, 16, 16)), stride=4)
            np.array_equal(heatmap.reference, heatmap.displaced)  # True
    """
    if stride < 1:
        raise Modulation.ShapeMismatch.with_information(stride=stride)
    taps, displacement = split_taps(field)
    count, _, height, width = displacement.shape

    rows, cols = np.meshgrid(np.arange(0, height, stride), np.arange(0, width, stride), indexing="ij")
    centres = np.stack([rows + 0.5, cols + 0.5], axis=-1).reshape(-1, 1, 2)
    reference = (centres + taps).reshape(-1, 2)
    shifts = displacement[:, :, rows, cols].reshape(count, 2, -1).transpose(2, 0, 1).reshape(-1, 2)
    displaced = reference + shifts
    magnitude = np.hypot(shifts[:, 0], shifts[:, 1])

    image = np.zeros((height, width, 3))
    peak = magnitude.max()
    if peak > 0:
        heat = magnitude.reshape(rows.shape + (count,)).mean(axis=-1) / peak
        blocks = np.repeat(np.repeat(heat, stride, axis=0), stride, axis=1)
        image[..., 2] = blocks[:height, :width]
    _dots(image, displaced, 0)
    _dots(image, reference, 1)
    return OffsetsHeatmap(image, reference, displaced, magnitude)
