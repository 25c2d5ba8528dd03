"""The module which implements the sampling kernels: bilinear and bicubic point samplers and the anti-aliased resizer.

All samplers take *continuous* pixel coordinates in which the centre of pixel ``(m, n)`` lies at
``(x, y) = (n + 0.5, m + 0.5)``. Images are ``(height, width, channels)`` arrays.
"""

from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveInt, validate_call
from scipy.sparse import csr_matrix

from omnisr.resampling.errors import Sampling

BICUBIC_A = -0.5
"""The free parameter of the Keys cubic convolution kernel (Catmull-Rom)."""

BICUBIC_SUPPORT = 2.0
"""The support radius of the cubic kernel at unit scale."""


class Kernel(StrEnum):
    """The interpolation kernels of a warp."""
    BILINEAR = "bilinear"
    BICUBIC_ANTIALIASED = "bicubic"


class OutOfBounds(StrEnum):
    """The policies applied to kernel taps beyond the raster borders."""
    ZERO = "zero"
    CLAMP_EDGE = "clamp"
    WRAP_LONGITUDE = "wrap"
    """Wrap columns around (ERP longitude) and clamp rows."""


class SampleSpec(BaseModel):
    """A model which pairs an interpolation kernel with an out-of-bounds policy."""
    model_config = ConfigDict(frozen=True)

    kernel: Kernel = Kernel.BICUBIC_ANTIALIASED
    out_of_bounds: OutOfBounds = OutOfBounds.ZERO


_AXIS_MODES = {
    OutOfBounds.ZERO: ("zero", "zero"),
    OutOfBounds.CLAMP_EDGE: ("clamp", "clamp"),
    OutOfBounds.WRAP_LONGITUDE: ("clamp", "wrap"),
}
"""The per-axis ``(rows, columns)`` modes of each policy."""


def as_image_grid(img) -> np.ndarray:
    """Converts an array to a ``float64`` image grid of shape ``(height, width, channels)``.

    Two-dimensional arrays are treated as single-channel images.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Sampling.InvalidImage`` if the array is empty, not finite, or does not have 1 to 4 channels.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[..., np.newaxis]
    if img.ndim != 3 or img.size == 0 or not 1 <= img.shape[2] <= 4:
        raise Sampling.InvalidImage.with_information(shape=img.shape)
    if not np.all(np.isfinite(img)):
        raise Sampling.InvalidImage.with_information(reason="non-finite values")
    return img


def _as_feature_grid(img) -> np.ndarray:
    """Same as :func:`as_image_grid` without the limit on the number of channels."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[..., np.newaxis]
    if img.ndim != 3 or img.size == 0:
        raise Sampling.InvalidImage.with_information(shape=img.shape)
    return img


def bilinear_weight(t):
    """The triangle kernel ``max(0, 1 - |t|)``."""
    return np.maximum(0.0, 1.0 - np.abs(t))


def cubic_weight(t, a: float = BICUBIC_A):
    """The Keys cubic convolution kernel with parameter ``a``, vanishing beyond ``|t| = 2``.

    Example:
        .. code-block:: python

            # The following evaluate to True
            cubic_weight(0.0) == 1.0
            cubic_weight(1.0) == 0.0
            cubic_weight(2.0) == 0.0
    """
    t = np.abs(np.asarray(t, dtype=np.float64))
    t2 = t * t
    t3 = t2 * t
    near = (a + 2) * t3 - (a + 3) * t2 + 1
    far = a * (t3 - 5 * t2 + 8 * t - 4)
    return np.where(t <= 1, near, np.where(t < 2, far, 0.0))


def _fold(index: np.ndarray, size: int, mode: str) -> tuple[np.ndarray, np.ndarray | None]:
    """Brings tap indices back into ``[0, size)``; for the ``zero`` mode also returns which taps were inside."""
    if mode == "wrap":
        return np.mod(index, size), None
    inside = (index >= 0) & (index < size) if mode == "zero" else None
    return np.clip(index, 0, size - 1), inside


def _axis_taps(t: np.ndarray, size: int, mode: str, offsets: tuple[int, ...], weight):
    """The folded indices and the weights of the taps along one axis, both of shape ``(points, len(offsets))``."""
    t0 = np.floor(t)
    frac = t - t0
    t0 = t0.astype(np.int64)
    indices, weights = [], []
    for d in offsets:
        index, inside = _fold(t0 + d, size, mode)
        w = weight(frac - d)
        indices.append(index)
        weights.append(w if inside is None else w * inside)
    return np.stack(indices, axis=1), np.stack(weights, axis=1)


def _tap_matrix(
        shape: tuple[int, int],
        x,
        y,
        policy: OutOfBounds,
        offsets: tuple[int, ...],
        weight,
        keep=None) -> csr_matrix:
    """Builds the sparse ``(points, height * width)`` matrix of the kernel ``weight`` over the taps ``offsets``.

    Rows of points where ``keep`` is false are zero.
    """
    height, width = shape
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    points = np.broadcast_shapes(x.shape, y.shape)
    u = np.broadcast_to(x, points).ravel() - 0.5
    v = np.broadcast_to(y, points).ravel() - 0.5
    row_mode, col_mode = _AXIS_MODES[policy]
    cols, wx = _axis_taps(u, width, col_mode, offsets, weight)
    rows, wy = _axis_taps(v, height, row_mode, offsets, weight)

    taps = len(offsets) ** 2
    indices = (rows[:, :, np.newaxis] * width + cols[:, np.newaxis, :]).reshape(u.size, taps)
    weights = (wy[:, :, np.newaxis] * wx[:, np.newaxis, :]).reshape(u.size, taps)
    if keep is not None:
        weights = weights * np.broadcast_to(keep, points).reshape(u.size, 1)
    indptr = np.arange(0, taps * u.size + 1, taps)
    return csr_matrix((weights.ravel(), indices.ravel(), indptr), shape=(u.size, height * width))


def sampling_matrix(shape: tuple[int, int], x, y, sample: SampleSpec, keep=None) -> csr_matrix:
    """Builds the sparse matrix which samples a raster of the given ``(height, width)`` at the points ``(x, y)``.

    The matrix only depends on the geometry; applying it with :func:`apply_sampling` to every raster of the same
    shape gives the output of :func:`sample_image`.

    Args:
        shape:
            The ``(height, width)`` of the sampled rasters.
        x:
            The fractional column(s), scalar or array.
        y:
            The fractional row(s), broadcastable against ``x``.
        sample:
            The kernel and out-of-bounds policy.
        keep (Optional, default ``None``):
            A boolean array broadcastable against the points. Points where it is false sample exactly zero.

    Returns:
        The ``(points, height * width)`` CSR matrix, with the taps of each point in row-major order.
    """
    policy = OutOfBounds(sample.out_of_bounds)
    match sample.kernel:
        case Kernel.BILINEAR:
            return _tap_matrix(shape, x, y, policy, (0, 1), bilinear_weight, keep)
        case Kernel.BICUBIC_ANTIALIASED:
            return _tap_matrix(shape, x, y, policy, (-1, 0, 1, 2), cubic_weight, keep)


def apply_sampling(matrix: csr_matrix, img, points: tuple[int, ...] | None = None) -> np.ndarray:
    """Applies a matrix of :func:`sampling_matrix` to an image, optionally reshaping the samples to ``points``.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Sampling.InvalidImage`` if the raster does not have the size the matrix was built for.
    """
    img = _as_feature_grid(img)
    height, width, channels = img.shape
    if matrix.shape[1] != height * width:
        raise Sampling.InvalidImage.with_information(shape=img.shape, expected_pixels=matrix.shape[1])
    out = matrix @ img.reshape(height * width, channels)
    return out if points is None else out.reshape(tuple(points) + (channels,))


def _sample_taps(img: np.ndarray, x, y, policy: OutOfBounds, offsets: tuple[int, ...], weight) -> np.ndarray:
    """Accumulates the separable kernel ``weight`` over the taps ``offsets`` around each point."""
    points = np.broadcast_shapes(np.shape(x), np.shape(y))
    matrix = _tap_matrix(img.shape[:2], x, y, policy, offsets, weight)
    return apply_sampling(matrix, img, points)


def bilinear_sample(img, x, y, policy: OutOfBounds = OutOfBounds.ZERO) -> np.ndarray:
    """Samples an image with the four-neighbour bilinear kernel.

    Args:
        img:
            A ``(height, width, channels)`` (or ``(height, width)``) array.
        x:
            The fractional column(s), scalar or array.
        y:
            The fractional row(s), broadcastable against ``x``.
        policy (Optional, default ``OutOfBounds.ZERO``):
            The out-of-bounds policy applied to the neighbours beyond the borders.

    Returns:
        The sampled channel vectors, of shape ``broadcast(x, y).shape + (channels,)``.

    Example:
        .. code-block:: python

            img = np.array([[0.0, 1.0]])
            bilinear_sample(img, 1.0, 0.5) == np.array([0.5])
    """
    return _sample_taps(_as_feature_grid(img), x, y, OutOfBounds(policy), (0, 1), bilinear_weight)


def bicubic_sample(img, x, y, policy: OutOfBounds = OutOfBounds.ZERO) -> np.ndarray:
    """Samples an image with the 4x4 Keys cubic kernel (``a = -0.5``), see :func:`bilinear_sample`."""
    return _sample_taps(_as_feature_grid(img), x, y, OutOfBounds(policy), (-1, 0, 1, 2), cubic_weight)


def sample_image(img, x, y, sample: SampleSpec) -> np.ndarray:
    """Dispatches to the point sampler of ``sample.kernel``.

    Note:
        A point sampler cannot anti-alias; warps use the plain bicubic kernel for ``BICUBIC_ANTIALIASED`` whereas
        rescaling goes through :func:`resize_antialiased`.
    """
    match sample.kernel:
        case Kernel.BILINEAR:
            return bilinear_sample(img, x, y, sample.out_of_bounds)
        case Kernel.BICUBIC_ANTIALIASED:
            return bicubic_sample(img, x, y, sample.out_of_bounds)


def resize_matrix(in_size: int, out_size: int) -> csr_matrix:
    """Builds the sparse ``(out_size, in_size)`` matrix of the one-dimensional anti-aliased bicubic resampling.

    The kernel support grows with the downscaling factor and the weights of each output sample are truncated at the
    borders and normalized, as in the Pillow resampler.
    """
    scale = in_size / out_size
    filter_scale = max(scale, 1.0)
    support = BICUBIC_SUPPORT * filter_scale
    centres = (np.arange(out_size) + 0.5) * scale
    low = np.maximum((centres - support + 0.5).astype(np.int64), 0)
    high = np.minimum((centres + support + 0.5).astype(np.int64), in_size)

    taps = low[:, np.newaxis] + np.arange(int((high - low).max()))
    valid = taps < high[:, np.newaxis]
    weights = cubic_weight((taps + 0.5 - centres[:, np.newaxis]) / filter_scale) * valid
    totals = weights.sum(axis=1, keepdims=True)
    weights = weights / np.where(totals == 0, 1.0, totals)

    rows = np.broadcast_to(np.arange(out_size)[:, np.newaxis], taps.shape)
    return csr_matrix((weights[valid], (rows[valid], taps[valid])), shape=(out_size, in_size))


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def resize_antialiased(img: np.ndarray, out_h: PositiveInt, out_w: PositiveInt) -> np.ndarray:
    """Resizes an image with the separable anti-aliased bicubic kernel.

    Args:
        img:
            A ``(height, width, channels)`` (or ``(height, width)``) array.
        out_h:
            The output height, at least ``1``.
        out_w:
            The output width, at least ``1``.

    Returns:
        The resized ``(out_h, out_w, channels)`` image.
    """
    img = _as_feature_grid(img)
    height, width, channels = img.shape
    rows = resize_matrix(height, out_h) @ img.reshape(height, width * channels)
    rows = rows.reshape(out_h, width, channels).transpose(1, 0, 2).reshape(width, out_h * channels)
    out = resize_matrix(width, out_w) @ rows
    return np.ascontiguousarray(out.reshape(out_w, out_h, channels).transpose(1, 0, 2))
