"""The module which reads and writes rasters as image grids of values in ``[0, 1]``.

PNG files (8 or 16 bits per sample) go through `pypng <https://pypng.readthedocs.io/>`_ so that both depths round
trip exactly; JPEG files are only read, through `Pillow <https://pillow.readthedocs.io/>`_.
"""

from pathlib import Path

import numpy as np
import png
from loguru import logger
from PIL import Image

from omnisr.io.errors import Files

PNG_SUFFIXES = (".png",)
JPEG_SUFFIXES = (".jpg", ".jpeg")
RASTER_SUFFIXES = PNG_SUFFIXES + JPEG_SUFFIXES
"""The suffixes of the raster files which can be read."""

DEEP_PILLOW_MODES = ("I;16", "I;16L", "I;16B", "I")
"""The single-channel Pillow modes of 16-bit samples, scaled by ``65535``."""


def _read_png(path: Path) -> np.ndarray:
    width, height, rows, info = png.Reader(filename=str(path)).asDirect()
    data = np.vstack([np.asarray(row, dtype=np.float64) for row in rows])
    return data.reshape(height, width, info["planes"]) / (2 ** info["bitdepth"] - 1)


def _read_pillow(path: Path) -> np.ndarray:
    with Image.open(path) as image:
        if image.mode in DEEP_PILLOW_MODES:
            data = np.asarray(image, dtype=np.float64) / 65535
        else:
            data = np.asarray(image.convert("L" if image.mode in ("1", "L") else "RGB"), dtype=np.float64) / 255
    return data[..., np.newaxis] if data.ndim == 2 else data


def read_image(path: Path | str) -> np.ndarray:
    """Reads a PNG or JPEG raster.

    Args:
        path:
            The path of the raster file.

    Returns:
        A ``(height, width, channels)`` array of ``float64`` values in ``[0, 1]``.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Files.ReadError`` if the file cannot be read or decoded.
    """
    path = Path(path)
    try:
        if path.suffix.lower() in PNG_SUFFIXES:
            image = _read_png(path)
        else:
            image = _read_pillow(path)
    except (OSError, png.Error, ValueError) as e:
        raise Files.ReadError.with_information(path=str(path), reason=str(e)) from e
    logger.debug(f"Read {path} with shape {image.shape}.")
    return image


def ensure_writable(path: Path | str, overwrite: bool) -> Path:
    """Checks that ``path`` can be written, creating its parent directories.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Files.OutputExists`` if the path exists and ``overwrite`` is false.
    """
    path = Path(path)
    if path.exists() and not overwrite:
        raise Files.OutputExists.with_information(path=str(path))
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def quantize(image: np.ndarray, deep: bool = False) -> np.ndarray:
    """Quantizes values in ``[0, 1]`` to 8-bit (or 16-bit when ``deep``) unsigned integers, clipping outliers."""
    max_value = 65535 if deep else 255
    quantized = np.rint(np.clip(image, 0, 1) * max_value)
    return quantized.astype(np.uint16 if deep else np.uint8)


def write_png(path: Path | str, image: np.ndarray, deep: bool = False) -> Path:
    """Writes an image grid as a lossless PNG.

    Args:
        path:
            The output path; parent directories are created.
        image:
            A ``(height, width, channels)`` (or ``(height, width)``) array of values in ``[0, 1]``.
        deep (Optional, default ``False``):
            Whether to write 16 bits per sample instead of 8.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Files.WriteError`` if the file cannot be written.
    """
    path = Path(path)
    image = np.asarray(image)
    if image.ndim == 2:
        image = image[..., np.newaxis]
    height, width, channels = image.shape
    writer = png.Writer(
        width,
        height,
        greyscale=channels <= 2,
        alpha=channels in (2, 4),
        bitdepth=16 if deep else 8,
    )
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            writer.write(f, quantize(image, deep).reshape(height, width * channels))
    except (OSError, png.Error) as e:
        raise Files.WriteError.with_information(path=str(path), reason=str(e)) from e
    logger.debug(f"Wrote {path} with shape {image.shape}.")
    return path


def write_bytes(path: Path | str, data: bytes) -> Path:
    """Writes a (JSON) document, translating failures into ``Files.WriteError``."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as e:
        raise Files.WriteError.with_information(path=str(path), reason=str(e)) from e
    return path


def list_rasters(directory: Path | str) -> list[Path]:
    """Lists the readable rasters of a directory, sorted by name.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Files.ReadError`` if the directory cannot be listed.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise Files.ReadError.with_information(path=str(directory), reason="not a directory")
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in RASTER_SUFFIXES)
