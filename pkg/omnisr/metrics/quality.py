"""The module which implements PSNR, SSIM and their spherically weighted variants WS-PSNR and WS-SSIM.

Images hold values in ``[0, 1]``. Multi-channel images are compared on the mean of their channels, unless
``per_channel`` is set, in which case each channel is compared separately and the scores are averaged.

Note:
    SSIM uses the valid region of the Gaussian filtering only (no padding). WS-SSIM therefore pools the SSIM map with
    the weights of the same interior pixels.
"""

import math

import numpy as np
from scipy.signal import convolve2d

from omnisr.metrics.errors import Metrics
from omnisr.resampling.kernels import as_image_grid

PSNR_CAP = 99.0
"""The PSNR in dB reported for identical images."""

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2


def erp_weights(height: int, width: int) -> np.ndarray:
    """The cos-latitude weight map of an ERP raster, ``cos(((m + 0.5) / M - 0.5) * pi)`` for row ``m``."""
    rows = np.cos(((np.arange(height) + 0.5) / height - 0.5) * np.pi)
    return np.repeat(rows[:, np.newaxis], width, axis=1)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """The normalized two-dimensional Gaussian window of SSIM."""
    y, x = np.mgrid[-(size // 2):size // 2 + 1, -(size // 2):size // 2 + 1]
    g = np.exp(-(x ** 2 + y ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


def _planes(a, b, per_channel: bool) -> list[tuple[np.ndarray, np.ndarray]]:
    """Validates a pair of images and returns the planes on which the metrics are computed."""
    a = as_image_grid(a)
    b = as_image_grid(b)
    if a.shape != b.shape:
        raise Metrics.ShapeMismatch.with_information(a=a.shape, b=b.shape)
    if per_channel:
        return [(a[..., c], b[..., c]) for c in range(a.shape[2])]
    return [(a.mean(axis=2), b.mean(axis=2))]


def _weights_for(plane: np.ndarray, weights: np.ndarray | None) -> np.ndarray:
    if weights is None:
        return erp_weights(*plane.shape)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != plane.shape:
        raise Metrics.ShapeMismatch.with_information(weights=weights.shape, image=plane.shape)
    return weights


def psnr_from_mse(mse: float) -> float:
    """Converts a mean squared error (unit range) to PSNR in dB, capped at :obj:`PSNR_CAP`."""
    if mse <= 0:
        return PSNR_CAP
    return min(PSNR_CAP, 10 * math.log10(1 / mse))


def psnr(a, b, per_channel: bool = False) -> float:
    """The peak signal-to-noise ratio in dB of two images in ``[0, 1]``.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Metrics.ShapeMismatch`` if the shapes differ.
    """
    scores = [psnr_from_mse(float(np.mean((pa - pb) ** 2))) for pa, pb in _planes(a, b, per_channel)]
    return float(np.mean(scores))


def ws_psnr(a, b, weights: np.ndarray | None = None, per_channel: bool = False) -> float:
    """The weighted PSNR, whose mean squared error is ``sum(w * e^2) / sum(w)``.

    Args:
        a:
            The first image.
        b:
            The second image, of the same shape.
        weights (Optional, default ``None``):
            A ``(height, width)`` weight map; ``None`` means the ERP weights of :func:`erp_weights`.
        per_channel (Optional, default ``False``):
            Whether to compare each channel separately.
    """
    scores = []
    for pa, pb in _planes(a, b, per_channel):
        w = _weights_for(pa, weights)
        scores.append(psnr_from_mse(float(np.sum(w * (pa - pb) ** 2) / np.sum(w))))
    return float(np.mean(scores))


def ssim_map(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """The SSIM map of two single-channel images over the valid region of the Gaussian window."""
    if min(a.shape) < SSIM_WINDOW:
        raise Metrics.TooSmall.with_information(shape=a.shape)
    window = gaussian_window()

    mu1 = convolve2d(a, window, "valid")
    mu2 = convolve2d(b, window, "valid")
    mu1_sq = mu1 * mu1
    mu2_sq = mu2 * mu2
    mu1_mu2 = mu1 * mu2
    sigma1_sq = convolve2d(a * a, window, "valid") - mu1_sq
    sigma2_sq = convolve2d(b * b, window, "valid") - mu2_sq
    sigma12 = convolve2d(a * b, window, "valid") - mu1_mu2

    return ((2 * mu1_mu2 + SSIM_C1) * (2 * sigma12 + SSIM_C2)) / (
        (mu1_sq + mu2_sq + SSIM_C1) * (sigma1_sq + sigma2_sq + SSIM_C2))


def ssim(a, b, per_channel: bool = False) -> float:
    """The single-scale structural similarity of two images, mean-pooled.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Metrics.ShapeMismatch`` if the shapes differ.

        :class:`~omnisr.errors.errors.OmniError`:
            ``Metrics.TooSmall`` if the shorter side is smaller than 11 pixels.
    """
    return float(np.mean([np.mean(ssim_map(pa, pb)) for pa, pb in _planes(a, b, per_channel)]))


def ws_ssim(a, b, weights: np.ndarray | None = None, per_channel: bool = False) -> float:
    """The weighted structural similarity; the SSIM map is pooled with the weights of its interior pixels.

    See :func:`ws_psnr` for the arguments.
    """
    margin = SSIM_WINDOW // 2
    scores = []
    for pa, pb in _planes(a, b, per_channel):
        w = _weights_for(pa, weights)[margin:-margin, margin:-margin]
        scores.append(np.sum(ssim_map(pa, pb) * w) / np.sum(w))
    return float(np.mean(scores))
