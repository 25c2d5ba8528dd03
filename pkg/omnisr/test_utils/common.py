"""Common functionalities for testing, shared between tests and other test utility modules.

The oracles below are deliberately written with plain loops over single pixels, so that they do not share code paths
with the vectorized implementations they check.
"""

import math
import re
from pathlib import Path

import numpy as np
import yaml

from omnisr.errors.errors import OmniError
from omnisr.modulation.weights import AttentionWeights, OffsetNetWeights


def error_match(error: OmniError) -> str:
    """The ``match`` pattern of ``pytest.raises`` for an error of the package, with or without extra information."""
    return re.escape(error.message)


def make_test_app_config_as_dict() -> dict:
    """Makes a dictionary of a small application config, with a section for each model."""
    return dict(
        degradation=dict(scale=4),
        augmentation=dict(erp_canvas=64, min_patch=4, z0_set=[0]),
        threads=2,
        deep=True,
    )


def create_config_file(config_path: Path) -> Path:
    """Creates a config file for tests, the content of which is given by :func:`make_test_app_config_as_dict`."""
    config_file = config_path / "config.yaml"
    with open(config_file, "w") as f:
        yaml.safe_dump(make_test_app_config_as_dict(), f)
    return config_file


def smooth_sphere_function(theta, phi, channels: int = 3) -> np.ndarray:
    """A low-order spherical harmonic signal in ``[0, 1]``, continuous across the date line and at the poles.

    Returns:
        An array of shape ``broadcast(theta, phi).shape + (channels,)``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    x, y, z = np.cos(phi) * np.cos(theta), np.cos(phi) * np.sin(theta), np.sin(phi)
    layers = [0.5 + 0.2 * z + (0.15 - 0.05 * c) * x + (0.1 + 0.03 * c) * y for c in range(channels)]
    return np.stack(layers, axis=-1)


def smooth_erp(height: int, channels: int = 3) -> np.ndarray:
    """Renders :func:`smooth_sphere_function` at the pixel centres of an ERP raster of the given height."""
    rows, cols = np.meshgrid(np.arange(height), np.arange(2 * height), indexing="ij")
    theta = (cols + 0.5) / (2 * height) * 2 * np.pi - np.pi
    phi = np.pi / 2 - (rows + 0.5) / height * np.pi
    return smooth_sphere_function(theta, phi, channels)


def blob_mask(height: int, width: int, seed: int) -> np.ndarray:
    """A random boolean mask made of a few overlapping rectangles and noise."""
    rng = np.random.default_rng(seed)
    mask = rng.random((height, width)) < 0.2
    for _ in range(3):
        top, left = rng.integers(0, height), rng.integers(0, width)
        mask[top:top + rng.integers(1, height + 1), left:left + rng.integers(1, width + 1)] = True
    return mask


def bilinear_oracle(img: np.ndarray, x: float, y: float, clamp: bool = False) -> np.ndarray:
    """Samples a single point with the four-neighbour bilinear kernel.

    Neighbours beyond the borders are zero, or repeat the edge pixels when ``clamp`` is set.
    """
    height, width, channels = img.shape
    u, v = x - 0.5, y - 0.5
    j0, i0 = math.floor(u), math.floor(v)
    out = np.zeros(channels)
    for i, wy in ((i0, 1 - (v - i0)), (i0 + 1, v - i0)):
        for j, wx in ((j0, 1 - (u - j0)), (j0 + 1, u - j0)):
            if clamp:
                out += wy * wx * img[min(max(i, 0), height - 1), min(max(j, 0), width - 1)]
            elif 0 <= i < height and 0 <= j < width:
                out += wy * wx * img[i, j]
    return out


def keys_cubic(t: float, a: float = -0.5) -> float:
    """The scalar Keys cubic kernel."""
    t = abs(t)
    if t <= 1:
        return (a + 2) * t ** 3 - (a + 3) * t ** 2 + 1
    if t < 2:
        return a * (t ** 3 - 5 * t ** 2 + 8 * t - 4)
    return 0.0


def dense_resize_oracle(in_size: int, out_size: int) -> np.ndarray:
    """The dense ``(out_size, in_size)`` matrix of the normalized, support-scaled cubic resampling."""
    scale = in_size / out_size
    filter_scale = max(scale, 1.0)
    matrix = np.zeros((out_size, in_size))
    for i in range(out_size):
        centre = (i + 0.5) * scale
        for j in range(in_size):
            distance = (j + 0.5 - centre) / filter_scale
            if abs(distance) < 2:
                matrix[i, j] = keys_cubic(distance)
        matrix[i] /= matrix[i].sum()
    return matrix


def rectangle_oracle(mask: np.ndarray) -> tuple[int, int, int, int]:
    """Finds ``(top, left, height, width)`` of the largest all-true rectangle by checking every rectangle.

    Ties are broken by the topmost, then the leftmost rectangle.
    """
    rows, cols = mask.shape
    best = None
    for top in range(rows):
        for left in range(cols):
            for bottom in range(top, rows):
                for right in range(left, cols):
                    if not mask[top:bottom + 1, left:right + 1].all():
                        continue
                    height, width = bottom - top + 1, right - left + 1
                    key = (-height * width, top, left)
                    if best is None or key < best[0]:
                        best = key, (top, left, height, width)
    return best[1]


def offset_net_oracle(cond: np.ndarray, net: OffsetNetWeights) -> np.ndarray:
    """Evaluates the offset network pixel by pixel."""
    _, height, width = cond.shape
    out = np.zeros((net.out_channels, height, width))
    w1, w2, w3 = (w.astype(np.float64) for w in (net.w1, net.w2, net.w3))
    b1, b2, b3 = (b.astype(np.float64) for b in (net.b1, net.b2, net.b3))
    for m in range(height):
        for n in range(width):
            hidden = np.maximum(w1 @ cond[:, m, n] + b1, 0)
            hidden = np.maximum(w2 @ hidden + b2, 0)
            out[:, m, n] = w3 @ hidden + b3
    return out


def window_attention_oracle(
        queries: np.ndarray,
        keys_values: np.ndarray,
        weights: AttentionWeights,
        window: int,
        heads: int) -> np.ndarray:
    """Runs the window attention with explicit loops over windows, heads and tokens."""
    channels, height, width = queries.shape
    head_dim = channels // heads
    w_q, w_k, w_v = (w.astype(np.float64) for w in (weights.w_q, weights.w_k, weights.w_v))
    out = np.zeros_like(queries, dtype=np.float64)
    for top in range(0, height, window):
        for left in range(0, width, window):
            pixels = [(top + i, left + j) for i in range(window) for j in range(window)]
            q = np.array([queries[:, m, n] @ w_q for m, n in pixels])
            k = np.array([keys_values[:, m, n] @ w_k for m, n in pixels])
            v = np.array([keys_values[:, m, n] @ w_v for m, n in pixels])
            for h in range(heads):
                part = slice(h * head_dim, (h + 1) * head_dim)
                for t, (m, n) in enumerate(pixels):
                    scores = np.array([q[t, part] @ k[s, part] for s in range(len(pixels))]) / math.sqrt(head_dim)
                    scores = np.exp(scores - scores.max())
                    scores /= scores.sum()
                    out[part, m, n] = sum(scores[s] * v[s, part] for s in range(len(pixels)))
    return out


def conv_oracle(features: np.ndarray, filters: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """A direct zero-padded 3x3 cross-correlation."""
    channels, height, width = features.shape
    out = np.zeros((filters.shape[0], height, width))
    for o in range(filters.shape[0]):
        for m in range(height):
            for n in range(width):
                total = float(bias[o])
                for c in range(channels):
                    for ky in (-1, 0, 1):
                        for kx in (-1, 0, 1):
                            if 0 <= m + ky < height and 0 <= n + kx < width:
                                total += filters[o, c, ky + 1, kx + 1] * features[c, m + ky, n + kx]
                out[o, m, n] = total
    return out


def deformable_conv_oracle(features: np.ndarray, offsets: np.ndarray, filters: np.ndarray, bias: np.ndarray):
    """A per-pixel deformable 3x3 convolution built on :func:`bilinear_oracle`."""
    _, height, width = features.shape
    hwc = features.transpose(1, 2, 0)
    out = np.zeros((filters.shape[0], height, width))
    for m in range(height):
        for n in range(width):
            total = bias.astype(np.float64).copy()
            for k, (ky, kx) in enumerate((ky, kx) for ky in (-1, 0, 1) for kx in (-1, 0, 1)):
                dy, dx = offsets[2 * k, m, n], offsets[2 * k + 1, m, n]
                sample = bilinear_oracle(hwc, n + kx + 0.5 + dx, m + ky + 0.5 + dy)
                total += filters[:, :, ky + 1, kx + 1] @ sample
            out[:, m, n] = total
    return out
