"""Tests the :obj:`omnisr.metrics.quality` module."""

import math

import numpy as np
import pytest
from pytest_lazy_fixtures import lf

from omnisr.errors.errors import OmniError
from omnisr.metrics.errors import Metrics
from omnisr.metrics.quality import PSNR_CAP, erp_weights, gaussian_window, psnr, ssim, ws_psnr, ws_ssim
from omnisr.test_utils.common import error_match, smooth_erp


@pytest.mark.parametrize("image", [lf("erp_16"), lf("erp_32")])
def test_identical_images(image):
    """Checks the scores of identical images."""
    assert psnr(image, image) == PSNR_CAP
    assert ws_psnr(image, image) == PSNR_CAP
    assert ssim(image, image) == 1.0
    assert ws_ssim(image, image) == pytest.approx(1.0, abs=1e-12)


def test_uniform_offset(erp_32):
    """Checks the PSNR of a uniform offset, which the spherical weights do not change."""
    shifted = erp_32 + 16 / 255
    assert psnr(erp_32, shifted) == pytest.approx(24.0478, abs=1e-4)
    assert ws_psnr(erp_32, shifted) == pytest.approx(psnr(erp_32, shifted), abs=1e-9)


def test_errors_near_the_poles_weigh_less(erp_32):
    """Checks that an error on the top row costs less in WS-PSNR than in PSNR."""
    damaged = erp_32.copy()
    damaged[0] += 0.2
    assert ws_psnr(erp_32, damaged) > psnr(erp_32, damaged)
    damaged = erp_32.copy()
    damaged[16] += 0.2
    assert ws_psnr(erp_32, damaged) < psnr(erp_32, damaged)


def test_inverted_checkerboard():
    """Checks that anti-correlated structures have a negative SSIM."""
    board = (np.indices((24, 24)).sum(axis=0) % 2).astype(np.float64)
    assert ssim(board, 1 - board) < 0
    assert ws_ssim(board, 1 - board, weights=np.ones((24, 24))) < 0


def test_constant_weights_give_the_plain_metrics(rng):
    """Checks that uniform weights reduce the weighted metrics to the plain ones."""
    a, b = rng.random((20, 30, 3)), rng.random((20, 30, 3))
    ones = np.ones((20, 30))
    assert ws_psnr(a, b, weights=ones) == pytest.approx(psnr(a, b), abs=1e-9)
    assert ws_ssim(a, b, weights=ones) == pytest.approx(ssim(a, b), abs=1e-12)


def test_metrics_are_symmetric(rng):
    """Checks that swapping the images does not change the scores."""
    a, b = rng.random((16, 32, 3)), rng.random((16, 32, 3))
    for metric in (psnr, ssim, ws_psnr, ws_ssim):
        assert metric(a, b) == pytest.approx(metric(b, a), abs=1e-12)


def test_scores_decrease_with_the_noise(rng):
    """Checks that more noise gives lower scores, within the valid ranges."""
    clean = smooth_erp(32)
    noise = rng.normal(0, 1, clean.shape)
    light, heavy = clean + 0.01 * noise, clean + 0.1 * noise
    assert psnr(clean, light) > psnr(clean, heavy)
    assert ws_psnr(clean, light) > ws_psnr(clean, heavy)
    assert 1 >= ssim(clean, light) > ssim(clean, heavy) >= -1
    assert 1 >= ws_ssim(clean, light) > ws_ssim(clean, heavy) >= -1


def test_per_channel():
    """Checks that channel errors cancel out in the mean plane but not channel-wise."""
    a = np.full((16, 16, 2), 0.5)
    b = a.copy()
    b[..., 0] += 0.1
    b[..., 1] -= 0.1
    assert psnr(a, b) == PSNR_CAP
    assert psnr(a, b, per_channel=True) == pytest.approx(20.0)


def test_shape_mismatch():
    """Checks that images (and weights) of different shapes are rejected."""
    with pytest.raises(OmniError, match=error_match(Metrics.ShapeMismatch)):
        psnr(np.zeros((16, 32, 3)), np.zeros((16, 32, 1)))
    with pytest.raises(OmniError, match=error_match(Metrics.ShapeMismatch)):
        ws_psnr(np.zeros((16, 32, 3)), np.zeros((16, 32, 3)), weights=np.ones((32, 16)))


def test_too_small_for_ssim():
    """Checks that SSIM requires images as large as its window."""
    with pytest.raises(OmniError, match=error_match(Metrics.TooSmall)):
        ssim(np.zeros((10, 10)), np.zeros((10, 10)))


def test_erp_weights():
    """Checks the cos-latitude weights."""
    w = erp_weights(4, 8)
    assert w.shape == (4, 8)
    outer, inner = math.cos(3 * math.pi / 8), math.cos(math.pi / 8)
    assert w[:, 0] == pytest.approx([outer, inner, inner, outer])
    assert (w == w[:, :1]).all()


def test_gaussian_window():
    """Checks the normalization and the symmetry of the SSIM window."""
    window = gaussian_window()
    assert window.shape == (11, 11)
    assert window.sum() == pytest.approx(1.0)
    assert np.allclose(window, window.T)
    assert window[5, 5] == window.max()
