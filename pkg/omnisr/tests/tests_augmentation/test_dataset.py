"""Tests the :obj:`omnisr.augmentation.dataset` module."""

import pytest

from omnisr.augmentation.dataset import read_manifest, sliding_windows, synthesize_dataset, window_geometry
from omnisr.augmentation.errors import Augmentation
from omnisr.config.config import AugmentConfig
from omnisr.errors.errors import OmniError
from omnisr.io.rasters import read_image, write_png
from omnisr.test_utils.common import error_match

CFG = AugmentConfig(erp_canvas=64, min_patch=4)


@pytest.fixture
def source_dir(tmp_path, rng):
    """A directory with a single plain image, split into three square sub-images."""
    directory = tmp_path / "sources"
    write_png(directory / "plain.png", rng.random((48, 96, 3)))
    return directory


def test_sliding_windows():
    """Checks the window origins in raster order."""
    assert sliding_windows(4, 6, window=2, stride=2) == [(0, 0), (0, 2), (0, 4), (2, 0), (2, 2), (2, 4)]
    assert sliding_windows(5, 5, window=3, stride=1)[:4] == [(0, 0), (0, 1), (0, 2), (1, 0)]
    assert sliding_windows(2, 2, window=3, stride=1) == []


def test_window_geometry():
    """Checks the default window and stride."""
    assert window_geometry(48, 32, CFG) == (32, 32)
    assert window_geometry(48, 32, CFG.model_copy(update=dict(window=16))) == (16, 16)
    assert window_geometry(48, 32, CFG.model_copy(update=dict(window=16, stride=8))) == (16, 8)


def test_synthesize_dataset(source_dir, tmp_path):
    """Checks the manifest and the patches of a single source image."""
    out_dir = tmp_path / "patches"
    records = synthesize_dataset(source_dir, CFG, out_dir)

    assert [record.phi_p_deg for record in records] == [-45, 0, 45]
    assert [record.sub_image for record in records] == [0, 1, 2]
    assert all(record.source_id == "plain" for record in records)
    assert all(record.window_origin == (0, 0) for record in records)
    assert read_manifest(out_dir / "manifest.json") == records
    for record in records:
        assert read_image(out_dir / record.file_name).shape == (record.height, record.width, 3)
        assert min(record.height, record.width) >= CFG.min_patch


def test_synthesize_dataset_is_deterministic(source_dir, tmp_path):
    """Checks that two runs, serial and threaded, write the same manifest."""
    synthesize_dataset(source_dir, CFG, tmp_path / "first")
    synthesize_dataset(source_dir, CFG, tmp_path / "second", threads=2)
    assert (tmp_path / "first" / "manifest.json").read_bytes() == (tmp_path / "second" / "manifest.json").read_bytes()


def test_empty_source_directory(tmp_path):
    """Checks that an empty directory gives an empty manifest."""
    (tmp_path / "empty").mkdir()
    assert synthesize_dataset(tmp_path / "empty", CFG, tmp_path / "out") == []
    assert read_manifest(tmp_path / "out" / "manifest.json") == []


def test_no_patches(source_dir, tmp_path):
    """Checks that sources which give no patch at all are reported, the empty manifest being written anyway."""
    with pytest.raises(OmniError, match=error_match(Augmentation.NoPatches)):
        synthesize_dataset(source_dir, CFG.model_copy(update=dict(min_patch=1000)), tmp_path / "out")
    assert read_manifest(tmp_path / "out" / "manifest.json") == []


def test_windows_over_a_pole_are_skipped(source_dir, tmp_path, check_log):
    """Checks that the windows which would cross a pole are skipped with a warning."""
    cfg = CFG.model_copy(update=dict(phi_h_set=(-60, 0, 60), z0_set=(0,)))
    records = synthesize_dataset(source_dir, cfg, tmp_path / "out")
    assert [record.phi_p_deg for record in records] == [0]
    assert check_log("WARNING", Augmentation.PoleOverlap.message)
