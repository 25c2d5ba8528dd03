"""The module which implements the forward pass of the distortion-aware blocks.

Features are ``(C, H, W)`` arrays. Offset fields are ``(K, H, W)`` arrays of ``(dy, dx)`` pairs in pixels, ``K = 2``
for the attention block and ``K = 18`` for the convolution block, whose pairs follow the 3x3 taps in row-major order.

Note:
    The offsets only depend on the condition maps and the weights, never on the features.
"""

from typing import NamedTuple

import numpy as np
from scipy.special import softmax

from omnisr.modulation.conditions import ConditionMaps
from omnisr.modulation.errors import Modulation
from omnisr.modulation.weights import AttentionWeights, BlockWeights, ConvWeights, OffsetNetWeights
from omnisr.resampling.kernels import OutOfBounds, bilinear_sample

TAPS = [(ky, kx) for ky in (-1, 0, 1) for kx in (-1, 0, 1)]
"""The 3x3 kernel taps ``(row, column)``, in row-major order."""


class WindowAttention(NamedTuple):
    """The output of the window attention and its attention weights."""
    output: np.ndarray
    """The ``(C, H, W)`` output features."""
    weights: np.ndarray
    """The ``(windows, heads, w*w, w*w)`` softmax rows."""


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def offset_net_forward(cond: np.ndarray, net: OffsetNetWeights) -> np.ndarray:
    """Evaluates the pointwise three-stage offset network on stacked condition channels.

    Args:
        cond:
            The ``(K_in, H, W)`` condition channels.
        net:
            The weights; ``net.in_channels`` must equal ``K_in``.

    Returns:
        The ``(K, H, W)`` offset field.
    """
    cond = np.asarray(cond, dtype=np.float64)
    if cond.ndim != 3 or cond.shape[0] != net.in_channels:
        raise Modulation.ShapeMismatch.with_information(cond=cond.shape, in_channels=net.in_channels)
    _, height, width = cond.shape
    x = cond.reshape(cond.shape[0], -1)
    x = _relu(net.w1.astype(np.float64) @ x + net.b1[:, np.newaxis])
    x = _relu(net.w2.astype(np.float64) @ x + net.b2[:, np.newaxis])
    x = net.w3.astype(np.float64) @ x + net.b3[:, np.newaxis]
    return x.reshape(-1, height, width)


def partition_windows(x: np.ndarray, window: int) -> np.ndarray:
    """Splits ``(C, H, W)`` features into ``(windows, window * window, C)`` tokens, windows in raster order."""
    c, h, w = x.shape
    x = x.reshape(c, h // window, window, w // window, window)
    return x.transpose(1, 3, 2, 4, 0).reshape(-1, window * window, c)


def merge_windows(tokens: np.ndarray, window: int, height: int, width: int) -> np.ndarray:
    """The inverse of :func:`partition_windows`."""
    c = tokens.shape[-1]
    x = tokens.reshape(height // window, width // window, window, window, c)
    return x.transpose(4, 0, 2, 1, 3).reshape(c, height, width)


def _split_heads(tokens: np.ndarray, heads: int) -> np.ndarray:
    n_windows, n, c = tokens.shape
    return tokens.reshape(n_windows, n, heads, c // heads).transpose(0, 2, 1, 3)


def _check_geometry(features: np.ndarray, window: int, heads: int) -> None:
    c, h, w = features.shape
    if heads < 1 or c % heads:
        raise Modulation.ShapeMismatch.with_information(channels=c, heads=heads)
    if window < 1 or h % window or w % window:
        raise Modulation.IndivisibleWindow.with_information(height=h, width=w, window=window)


def window_attention(
        queries: np.ndarray,
        keys_values: np.ndarray,
        weights: AttentionWeights,
        window: int,
        heads: int) -> WindowAttention:
    """Runs multi-head softmax self-attention within non-overlapping windows.

    Queries are projected from ``queries`` and keys and values from ``keys_values``. The scores are scaled by
    ``1 / sqrt(C / heads)``; there is neither a relative position bias nor an output projection.
    """
    queries = np.asarray(queries, dtype=np.float64)
    keys_values = np.asarray(keys_values, dtype=np.float64)
    if queries.shape != keys_values.shape or queries.shape[0] != weights.w_q.shape[0]:
        raise Modulation.ShapeMismatch.with_information(
            queries=queries.shape, keys_values=keys_values.shape, channels=weights.w_q.shape[0])
    _check_geometry(queries, window, heads)
    c, h, w = queries.shape

    q_tokens = partition_windows(queries, window)
    kv_tokens = partition_windows(keys_values, window)
    q = _split_heads(q_tokens @ weights.w_q.astype(np.float64), heads)
    k = _split_heads(kv_tokens @ weights.w_k.astype(np.float64), heads)
    v = _split_heads(kv_tokens @ weights.w_v.astype(np.float64), heads)

    attention = softmax(q @ k.transpose(0, 1, 3, 2) / np.sqrt(c // heads), axis=-1)
    out = (attention @ v).transpose(0, 2, 1, 3).reshape(q_tokens.shape)
    return WindowAttention(merge_windows(out, window, h, w), attention)


def deform_features(features: np.ndarray, offsets: np.ndarray, policy: OutOfBounds) -> np.ndarray:
    """Bilinearly samples ``(C, H, W)`` features at the pixel positions displaced by a ``(2, H, W)`` field."""
    _, h, w = features.shape
    rows, cols = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    sampled = bilinear_sample(
        features.transpose(1, 2, 0), cols + 0.5 + offsets[1], rows + 0.5 + offsets[0], policy)
    return sampled.transpose(2, 0, 1)


def daab_forward(
        features: np.ndarray,
        cond: ConditionMaps,
        weights: BlockWeights,
        window: int,
        heads: int,
        return_offsets: bool = False) -> np.ndarray | tuple[np.ndarray, np.ndarray]:
    """Runs the distortion-aware attention block.

    The offset field is computed once from ``(C_d, C_w)`` and shared by all heads; the features warped by it provide
    the keys and values, while the queries come from the original features. The warp clamps at the borders.

    Args:
        features:
            The ``(C, H, W)`` features.
        cond:
            The condition maps of the same raster.
        weights:
            The block weights.
        window:
            The attention window side, dividing ``H`` and ``W``.
        heads:
            The number of heads, dividing ``C``.
        return_offsets (Optional, default ``False``):
            Whether to also return the ``(2, H, W)`` offset field.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 3 or features.shape[1:] != cond.c_d.shape[1:]:
        raise Modulation.ShapeMismatch.with_information(features=features.shape, conditions=cond.c_d.shape)
    _check_geometry(features, window, heads)

    offsets = offset_net_forward(cond.stacked, weights.daab_offset)
    warped = deform_features(features, offsets, OutOfBounds.CLAMP_EDGE)
    output = window_attention(features, warped, weights.attention, window, heads).output
    return (output, offsets) if return_offsets else output


def deformable_conv(features: np.ndarray, offsets: np.ndarray, conv: ConvWeights) -> np.ndarray:
    """Applies a 3x3 deformable convolution (cross-correlation) given an ``(18, H, W)`` offset field.

    Tap positions and bilinear samples outside the features read zeros.
    """
    _, h, w = features.shape
    rows, cols = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    hwc = features.transpose(1, 2, 0)
    filters = conv.filters.astype(np.float64)
    out = np.zeros((filters.shape[0], h, w))
    for index, (ky, kx) in enumerate(TAPS):
        sampled = bilinear_sample(
            hwc,
            cols + kx + 0.5 + offsets[2 * index + 1],
            rows + ky + 0.5 + offsets[2 * index],
            OutOfBounds.ZERO,
        )
        out += np.einsum("oc,hwc->ohw", filters[:, :, ky + 1, kx + 1], sampled)
    return out + conv.bias.astype(np.float64)[:, np.newaxis, np.newaxis]


def dacb_forward(
        features: np.ndarray,
        c_d: np.ndarray,
        weights: BlockWeights,
        return_offsets: bool = False) -> np.ndarray | tuple[np.ndarray, np.ndarray]:
    """Runs the distortion-aware convolution block, whose 18 offset channels are computed from ``C_d`` alone.

    Args:
        features:
            The ``(C, H, W)`` features.
        c_d:
            The ``(1, H, W)`` latitude distortion map.
        weights:
            The block weights.
        return_offsets (Optional, default ``False``):
            Whether to also return the ``(18, H, W)`` offset field.

    Returns:
        The ``(C_out, H, W)`` output features.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 3 or features.shape[1:] != np.shape(c_d)[1:] or features.shape[0] != weights.channels:
        raise Modulation.ShapeMismatch.with_information(features=features.shape, c_d=np.shape(c_d))
    offsets = offset_net_forward(c_d, weights.dacb_offset)
    output = deformable_conv(features, offsets, weights.conv)
    return (output, offsets) if return_offsets else output
