"""Tests the :obj:`omnisr.io.rasters` module."""

import numpy as np
import pytest
from PIL import Image

from omnisr.errors.errors import OmniError
from omnisr.io.errors import Files
from omnisr.io.rasters import ensure_writable, list_rasters, quantize, read_image, write_bytes, write_png
from omnisr.test_utils.common import error_match


@pytest.mark.parametrize(("deep", "levels"), [(False, 255), (True, 65535)])
def test_png_round_trip_is_exact(tmp_path, rng, deep, levels):
    """Checks that quantized values come back exactly for both bit depths."""
    image = rng.integers(0, levels + 1, (5, 7, 3)) / levels
    path = write_png(tmp_path / "image.png", image, deep=deep)
    assert np.array_equal(read_image(path), image)


def test_greyscale_png(tmp_path):
    """Checks that a 2D array is written as a single channel raster."""
    image = np.linspace(0, 1, 12).reshape(3, 4)
    result = read_image(write_png(tmp_path / "grey.png", image))
    assert result.shape == (3, 4, 1)
    assert np.array_equal(result[..., 0], np.rint(image * 255) / 255)


def test_write_png_clips(tmp_path):
    """Checks that values beyond ``[0, 1]`` are clipped when writing."""
    image = np.array([[[-0.5], [1.5]]])
    assert read_image(write_png(tmp_path / "clipped.png", image))[..., 0].tolist() == [[0.0, 1.0]]


def test_write_png_creates_parents(tmp_path):
    """Checks that the missing parent directories are created."""
    path = write_png(tmp_path / "a" / "b" / "image.png", np.zeros((2, 2, 3)))
    assert path.is_file()


def test_quantize():
    """Checks rounding, clipping and the integer types."""
    image = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    assert quantize(image).tolist() == [0, 0, 128, 255, 255]
    assert quantize(image).dtype == np.uint8
    assert quantize(image, deep=True).tolist() == [0, 0, 32768, 65535, 65535]
    assert quantize(image, deep=True).dtype == np.uint16


@pytest.mark.parametrize(("mode", "channels"), [("RGB", 3), ("L", 1)])
def test_read_jpeg(tmp_path, mode, channels):
    """Checks that JPEG files are decoded into values in ``[0, 1]``."""
    path = tmp_path / "image.JPG"
    Image.new(mode, (8, 4), color=200 if mode == "L" else (200, 200, 200)).save(path, format="JPEG", quality=95)
    image = read_image(path)
    assert image.shape == (4, 8, channels)
    assert np.abs(image - 200 / 255).max() < 0.02


def test_read_missing_file(tmp_path):
    """Checks that a missing file is a read error."""
    with pytest.raises(OmniError, match=error_match(Files.ReadError)) as exc:
        read_image(tmp_path / "missing.png")
    assert exc.value.exit_code == 2


@pytest.mark.parametrize("name", ["corrupt.png", "corrupt.jpg"])
def test_read_corrupt_file(tmp_path, name):
    """Checks that an undecodable file is a read error."""
    path = tmp_path / name
    path.write_bytes(b"definitely not an image")
    with pytest.raises(OmniError, match=error_match(Files.ReadError)):
        read_image(path)


def test_ensure_writable(tmp_path):
    """Checks that existing outputs are only replaced on request."""
    path = tmp_path / "sub" / "out.png"
    assert ensure_writable(path, overwrite=False) == path
    assert path.parent.is_dir()

    path.write_bytes(b"")
    with pytest.raises(OmniError, match=error_match(Files.OutputExists)):
        ensure_writable(path, overwrite=False)
    assert ensure_writable(path, overwrite=True) == path


def test_write_bytes(tmp_path):
    """Checks writing a document and the failure when the target is a directory."""
    path = write_bytes(tmp_path / "doc" / "report.json", b"{}")
    assert path.read_bytes() == b"{}"
    with pytest.raises(OmniError, match=error_match(Files.WriteError)):
        write_bytes(tmp_path / "doc", b"{}")


def test_list_rasters(tmp_path):
    """Checks that the rasters are filtered by suffix and sorted by name."""
    for name in ["b.png", "a.JPEG", "c.jpg", "notes.txt", "d.tif"]:
        (tmp_path / name).write_bytes(b"")
    (tmp_path / "folder.png").mkdir()
    assert [p.name for p in list_rasters(tmp_path)] == ["a.JPEG", "b.png", "c.jpg"]


def test_list_rasters_of_a_missing_directory(tmp_path):
    """Checks that listing something which is not a directory is a read error."""
    with pytest.raises(OmniError, match=error_match(Files.ReadError)):
        list_rasters(tmp_path / "missing")


def test_read_deep_greyscale_through_pillow(tmp_path):
    """Checks that 16-bit samples decoded by Pillow keep their low byte."""
    values = np.array([[0, 1, 255, 256], [257, 1000, 65534, 65535]], dtype=np.uint16)
    path = tmp_path / "deep.tif"
    Image.fromarray(values).save(path)
    image = read_image(path)
    assert image.shape == (2, 4, 1)
    assert np.array_equal(image[..., 0], values / 65535)
