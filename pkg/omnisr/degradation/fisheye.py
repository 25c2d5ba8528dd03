"""The module which implements the Fisheye downsampling of ERP images and the plain ERP downsampling it is compared to.

The Fisheye downsampling follows the capture-native format of omnidirectional cameras:

  - the HR ERP is converted to a dual fisheye pair (horizontal splice), each rendered with an aperture larger than a
    hemisphere so that the content around the rim survives the kernel support of the next stages,
  - each fisheye is downsampled with the anti-aliased bicubic kernel,
  - the two LR fisheyes are reconverted to an LR ERP with a hard split at the equator.
"""

from concurrent.futures import ThreadPoolExecutor
from enum import StrEnum
from typing import NamedTuple

import numpy as np
from loguru import logger

from omnisr.config.config import DegradationConfig
from omnisr.degradation.errors import Degradation
from omnisr.geometry.coords import Hemisphere, ProjectionSpec
from omnisr.geometry.projections import pixel_to_plane
from omnisr.resampling.kernels import Kernel, OutOfBounds, SampleSpec, as_image_grid, resize_antialiased
from omnisr.resampling.warp import warp

TO_FISHEYE = SampleSpec(kernel=Kernel.BICUBIC_ANTIALIASED, out_of_bounds=OutOfBounds.WRAP_LONGITUDE)
"""The sampling of the ERP to fisheye conversion."""

TO_ERP = SampleSpec(kernel=Kernel.BICUBIC_ANTIALIASED, out_of_bounds=OutOfBounds.CLAMP_EDGE)
"""The sampling of the fisheye to ERP reconversion."""


class DownsampleMode(StrEnum):
    """The degradations producing an LR ERP."""
    ERP = "erp"
    FISHEYE = "fisheye"


class DualFisheye(NamedTuple):
    """The front (northern) and back (southern) fisheyes of a horizontally spliced pair."""
    front: np.ndarray
    back: np.ndarray


class DegradedPair(NamedTuple):
    """An LR/HR training pair."""
    lr: np.ndarray
    hr: np.ndarray


def dual_fisheye_specs(diameter: int, aperture: float) -> dict[Hemisphere, ProjectionSpec]:
    """Makes the specs of both fisheyes of a horizontally spliced pair."""
    return {
        hemisphere: ProjectionSpec.fisheye(diameter, aperture=aperture, hemisphere=hemisphere)
        for hemisphere in ("front", "back")
    }


def _check_geometry(erp: np.ndarray, cfg: DegradationConfig) -> None:
    height, width = erp.shape[:2]
    diameter = cfg.resolution_for(height)
    if width != 2 * height or height % cfg.scale or diameter % cfg.scale:
        raise Degradation.ConfigError.with_information(
            shape=(height, width), scale=cfg.scale, fisheye_resolution=diameter)


def erp_to_dual_fisheye(erp: np.ndarray, cfg: DegradationConfig, threads: int = 1) -> DualFisheye:
    """Converts an ERP image to the padded dual fisheye pair.

    Each fisheye is rendered with the aperture ``cfg.fisheye_pad_aperture`` over its whole square raster.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Degradation.ConfigError`` if the geometry of ``erp`` is not compatible with ``cfg``.
    """
    erp = as_image_grid(erp)
    _check_geometry(erp, cfg)
    height = erp.shape[0]
    src_spec = ProjectionSpec.erp(height)
    specs = dual_fisheye_specs(cfg.resolution_for(height), cfg.fisheye_pad_aperture)
    front, _ = warp(erp, src_spec, specs["front"], TO_FISHEYE, threads)
    back, _ = warp(erp, src_spec, specs["back"], TO_FISHEYE, threads)
    return DualFisheye(front, back)


def dual_fisheye_to_erp(pair: DualFisheye, aperture: float, height: int, threads: int = 1) -> np.ndarray:
    """Reconverts a dual fisheye pair to an ERP of the given height.

    Rows in the northern hemisphere (including the equator) are taken from the front fisheye, the other ones from
    the back fisheye.
    """
    erp_spec = ProjectionSpec.erp(height)
    _, latitudes = pixel_to_plane(np.arange(height), 0, erp_spec)
    split = int(np.count_nonzero(latitudes >= 0))
    specs = dual_fisheye_specs(pair.front.shape[0], aperture)

    parts = [
        warp(disk, specs[hemisphere], erp_spec, TO_ERP, threads, rows=rows)[0]
        for disk, hemisphere, rows in [(pair.front, "front", (0, split)), (pair.back, "back", (split, height))]
        if rows[0] < rows[1]
    ]
    return np.concatenate(parts, axis=0)


def fisheye_downsample(erp_hr: np.ndarray, cfg: DegradationConfig, threads: int = 1) -> np.ndarray:
    """Degrades an HR ERP image into an LR one through the dual fisheye domain.

    Args:
        erp_hr:
            The HR ERP image grid, whose height is divisible by ``cfg.scale``.
        cfg:
            The degradation configuration.
        threads (Optional, default ``1``):
            The number of worker threads. The output does not depend on it.

    Returns:
        The LR ERP image of shape ``(height / scale, width / scale, channels)``.
    """
    erp_hr = as_image_grid(erp_hr)
    _check_geometry(erp_hr, cfg)
    height = erp_hr.shape[0]
    lr_diameter = cfg.resolution_for(height) // cfg.scale

    logger.info(f"Attempt to fisheye-downsample an ERP of height {height} by x{cfg.scale} ...")
    pair = erp_to_dual_fisheye(erp_hr, cfg, threads)
    with ThreadPoolExecutor(max_workers=min(threads, 2)) as executor:
        front, back = executor.map(lambda disk: resize_antialiased(disk, lr_diameter, lr_diameter), pair)
    lr = dual_fisheye_to_erp(DualFisheye(front, back), cfg.fisheye_pad_aperture, height // cfg.scale, threads)
    logger.info("Fisheye downsampling is successful.")
    return lr


def erp_downsample(erp_hr: np.ndarray, scale: int) -> np.ndarray:
    """Degrades an HR ERP image with the plain anti-aliased bicubic kernel, the common ERP degradation."""
    erp_hr = as_image_grid(erp_hr)
    height, width = erp_hr.shape[:2]
    if height % scale or width % scale:
        raise Degradation.ConfigError.with_information(shape=(height, width), scale=scale)
    return resize_antialiased(erp_hr, height // scale, width // scale)


def mod_crop(erp: np.ndarray, scale: int) -> np.ndarray:
    """Crops the bottom rows of an ERP image so that its height is divisible by ``scale``, keeping ``width = 2h``."""
    height = erp.shape[0] - erp.shape[0] % scale
    return erp[:height, :2 * height]


def make_pair(
        erp_hr: np.ndarray,
        cfg: DegradationConfig,
        mode: DownsampleMode = DownsampleMode.FISHEYE,
        threads: int = 1) -> DegradedPair:
    """Makes an LR/HR training pair out of an ERP image, mod-cropping the HR image to the scale first."""
    hr = mod_crop(as_image_grid(erp_hr), cfg.scale)
    match DownsampleMode(mode):
        case DownsampleMode.FISHEYE:
            lr = fisheye_downsample(hr, cfg, threads)
        case DownsampleMode.ERP:
            lr = erp_downsample(hr, cfg.scale)
    return DegradedPair(lr, hr)
