"""The module which synthesizes a pseudo-ERP patch dataset out of a directory of plain images.

For each source image:
  - the image is split into three sub-images, assigned the latitudes ``phi_h`` from left to right,
  - each sub-image is scanned with sliding windows in raster order,
  - each window gets the next latitude perturbation ``z_0`` of the cycle and is projected at ``Phi_p = phi_h + z_0``,
  - the projection is cropped to its largest valid rectangle and kept when its shorter side reaches ``min_patch``.

The manifest lists one :class:`PatchRecord` per written patch, sorted by source, sub-image and window.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from itertools import count
from pathlib import Path

from loguru import logger
from pydantic import BaseModel, Field, NonNegativeInt, PositiveInt, TypeAdapter
from typing_extensions import Annotated

from omnisr.augmentation.errors import Augmentation
from omnisr.augmentation.pseudo_erp import perspective_patch_to_erp, split_three
from omnisr.augmentation.rectangles import crop_black_border
from omnisr.config.config import AugmentConfig
from omnisr.errors.errors import OmniError
from omnisr.io.rasters import list_rasters, read_image, write_bytes, write_png


class PatchRecord(BaseModel):
    """The manifest entry of an emitted patch."""

    source_id: str
    """The stem of the source file name."""

    sub_image: Annotated[int, Field(ge=0, le=2)]
    """The index of the sub-image, from left to right."""

    window_origin: tuple[NonNegativeInt, NonNegativeInt]
    """The ``(row, column)`` of the top-left corner of the window in the sub-image."""

    phi_p_deg: int
    """The latitude in degrees at which the window was projected, i.e. ``phi_h + z_0``."""

    height: PositiveInt
    width: PositiveInt
    file_name: str


Manifest = TypeAdapter(list[PatchRecord])
"""The validator and serializer of manifests."""


def sliding_windows(height: int, width: int, window: int, stride: int) -> list[tuple[int, int]]:
    """Enumerates the origins ``(row, column)`` of the square windows fitting in an image, in raster order.

    Example:
        .. code-block:: python

            sliding_windows(4, 6, window=2, stride=2) == [(0, 0), (0, 2), (0, 4), (2, 0), (2, 2), (2, 4)]
    """
    return [
        (row, col)
        for row in range(0, height - window + 1, stride)
        for col in range(0, width - window + 1, stride)
    ]


def window_geometry(sub_height: int, sub_width: int, cfg: AugmentConfig) -> tuple[int, int]:
    """The ``(window, stride)`` used for a sub-image; by default the window is as wide as the sub-image."""
    window = cfg.window or min(sub_width, sub_height)
    return window, cfg.stride or window


def synthesize_image(path: Path, cfg: AugmentConfig, out_dir: Path, deep: bool = False) -> list[PatchRecord]:
    """Synthesizes and writes the patches of a single source image.

    Windows which would overlap a pole are skipped with a warning.
    """
    image = read_image(path)
    records = []
    z0_cycle = count()
    for sub_index, sub_image in enumerate(split_three(image)):
        window, stride = window_geometry(*sub_image.shape[:2], cfg)
        for window_index, (row, col) in enumerate(sliding_windows(*sub_image.shape[:2], window, stride)):
            z0 = cfg.z0_set[next(z0_cycle) % len(cfg.z0_set)]
            phi_p_deg = cfg.phi_h_set[sub_index] + z0
            try:
                projection = perspective_patch_to_erp(
                    sub_image[row:row + window, col:col + window], math.radians(phi_p_deg), cfg)
            except OmniError as e:
                e.log_as_warning()
                continue

            patch = crop_black_border(projection.image, projection.mask)
            if min(patch.shape[:2]) < cfg.min_patch:
                logger.debug(f"Discarding the patch of {path.name} at {phi_p_deg} degrees with shape {patch.shape}.")
                continue

            file_name = f"{path.stem}_s{sub_index}_w{window_index:03d}.png"
            write_png(out_dir / file_name, patch, deep)
            records.append(PatchRecord(
                source_id=path.stem,
                sub_image=sub_index,
                window_origin=(row, col),
                phi_p_deg=phi_p_deg,
                height=patch.shape[0],
                width=patch.shape[1],
                file_name=file_name,
            ))
    return records


def write_manifest(records: list[PatchRecord], path: Path) -> Path:
    """Writes the manifest as a UTF-8 JSON array."""
    return write_bytes(path, Manifest.dump_json(records, indent=2))


def read_manifest(path: Path) -> list[PatchRecord]:
    """Reads and validates a manifest."""
    return Manifest.validate_json(Path(path).read_bytes())


def synthesize_dataset(
        source_dir: Path,
        cfg: AugmentConfig,
        out_dir: Path,
        threads: int = 1,
        deep: bool = False) -> list[PatchRecord]:
    """Synthesizes the pseudo-ERP dataset of a directory of plain images and writes ``manifest.json``.

    Args:
        source_dir:
            The directory of the PNG/JPEG source images.
        cfg:
            The augmentation configuration.
        out_dir:
            The output directory of the patches and the manifest.
        threads (Optional, default ``1``):
            The number of worker threads over source images. The output does not depend on it.
        deep (Optional, default ``False``):
            Whether to write 16-bit patches.

    Returns:
        The sorted records of the manifest.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Augmentation.NoPatches`` if there were source images but none of them produced a patch. The (empty)
            manifest is written nevertheless.
    """
    sources = list_rasters(source_dir)
    out_dir = Path(out_dir)
    logger.info(f"Attempt to synthesize pseudo-ERP patches from {len(sources)} images ...")

    def run(path: Path) -> list[PatchRecord]:
        try:
            return synthesize_image(path, cfg, out_dir, deep)
        except OmniError as e:
            e.log_as_warning()
            return []

    with ThreadPoolExecutor(max_workers=threads) as executor:
        records = [record for batch in executor.map(run, sources) for record in batch]
    records.sort(key=lambda r: (r.source_id, r.sub_image, r.file_name))

    write_manifest(records, out_dir / "manifest.json")
    if sources and not records:
        raise Augmentation.NoPatches.with_information(sources=len(sources))
    logger.info(f"Synthesizing {len(records)} patches is successful.")
    return records
