"""Tests for the command line interface."""

import json

import numpy as np
import pytest

from omnisr.cli import exit_codes_epilog, main
from omnisr.io.rasters import read_image, write_png
from omnisr.test_utils.common import create_config_file


@pytest.fixture
def hr_erp(tmp_path, erp_32):
    """A 32x64 ERP raster on disk."""
    return write_png(tmp_path / "hr.png", erp_32)


def _exit_code(args: list) -> int:
    with pytest.raises(SystemExit) as exc:
        main(args)
    return exc.value.code


@pytest.mark.parametrize("mode", ["fisheye", "erp"])
def test_downsample(tmp_path, hr_erp, mode):
    """Tests that both modes halve the ERP."""
    output = tmp_path / "lr.png"
    assert main(["downsample", hr_erp, output, "--mode", mode, "--scale", 2]) == 0
    assert read_image(output).shape == (16, 32, 3)


def test_downsample_modes_differ(tmp_path, hr_erp):
    """Tests that the Fisheye degradation is not the plain one."""
    main(["downsample", hr_erp, tmp_path / "fisheye.png", "--mode", "fisheye"])
    main(["downsample", hr_erp, tmp_path / "erp.png", "--mode", "erp"])
    assert not np.array_equal(read_image(tmp_path / "fisheye.png"), read_image(tmp_path / "erp.png"))


def test_downsample_scale_from_config(tmp_path, hr_erp):
    """Tests that the scale of the config file applies unless the flag is given."""
    config = create_config_file(tmp_path)
    main(["downsample", hr_erp, tmp_path / "x4.png", "--config", config])
    assert read_image(tmp_path / "x4.png").shape == (8, 16, 3)
    main(["downsample", hr_erp, tmp_path / "x2.png", "--config", config, "--scale", 2])
    assert read_image(tmp_path / "x2.png").shape == (16, 32, 3)


def test_downsample_does_not_depend_on_threads(tmp_path, hr_erp):
    """Tests that the number of threads does not change the output bytes."""
    main(["downsample", hr_erp, tmp_path / "one.png", "--threads", 1])
    main(["downsample", hr_erp, tmp_path / "three.png", "--threads", 3])
    assert (tmp_path / "one.png").read_bytes() == (tmp_path / "three.png").read_bytes()


def test_deep_output(tmp_path, hr_erp):
    """Tests that ``--deep`` writes 16-bit rasters."""
    main(["downsample", hr_erp, tmp_path / "deep.png", "--mode", "erp", "--deep"])
    values = read_image(tmp_path / "deep.png") * 65535
    assert np.allclose(values, np.rint(values))
    assert not np.allclose(values / 257, np.rint(values / 257))


@pytest.mark.parametrize(("scale", "code"), [(3, 1), (32, 1)])
def test_downsample_invalid_scale(tmp_path, hr_erp, scale, code):
    """Tests that an unsupported scale is a validation error."""
    assert _exit_code(["downsample", hr_erp, tmp_path / "lr.png", "--scale", scale]) == code


def test_downsample_not_an_erp(tmp_path):
    """Tests that a raster which is not 2:1 is rejected with the validation exit code."""
    square = write_png(tmp_path / "square.png", np.zeros((16, 16, 3)))
    assert _exit_code(["downsample", square, tmp_path / "lr.png"]) == 1


def test_missing_input(tmp_path):
    """Tests that a missing input exits with the I/O exit code."""
    assert _exit_code(["downsample", tmp_path / "missing.png", tmp_path / "lr.png"]) == 2


def test_existing_output(tmp_path, hr_erp):
    """Tests that an existing output is only replaced with ``--overwrite``."""
    output = tmp_path / "lr.png"
    output.write_bytes(b"")
    assert _exit_code(["downsample", hr_erp, output]) == 2
    assert main(["downsample", hr_erp, output, "--overwrite"]) == 0
    assert read_image(output).shape == (16, 32, 3)


def test_augment_empty_directory(tmp_path):
    """Tests that an empty source directory gives an empty manifest."""
    (tmp_path / "sources").mkdir()
    assert main(["augment", tmp_path / "sources", tmp_path / "dataset"]) == 0
    assert json.loads((tmp_path / "dataset" / "manifest.json").read_text()) == []


def test_metric_of_identical_images(capsys, hr_erp):
    """Tests the JSON report printed for an identical pair."""
    assert main(["metric", hr_erp, hr_erp]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pairs"][0]["psnr"] == 99.0
    assert report["pairs"][0]["ssim"] == 1.0
    assert report["mean"]["ws_ssim"] == pytest.approx(1.0, abs=1e-12)


def test_metric_pairs_file(tmp_path, capsys, hr_erp):
    """Tests reading the pairs from a JSON file and writing the report."""
    pairs = tmp_path / "pairs.json"
    pairs.write_text(json.dumps([[str(hr_erp), str(hr_erp)], [str(hr_erp), str(hr_erp)]]))
    assert main(["metric", "--pairs", pairs, "--output", tmp_path / "report.json"]) == 0
    written = json.loads((tmp_path / "report.json").read_text())
    assert written == json.loads(capsys.readouterr().out)
    assert len(written["pairs"]) == 2


def test_metric_needs_two_images(hr_erp):
    """Tests that a single image is rejected."""
    assert _exit_code(["metric", hr_erp]) == 1


def test_condmap(tmp_path):
    """Tests the rendered latitude distortion map."""
    assert main(["condmap", tmp_path / "cd.png", "--height", 4, "--width", 8]) == 0
    image = read_image(tmp_path / "cd.png")
    assert image.shape == (4, 8, 1)
    assert np.abs(image[:, 0, 0] - [0.38268343, 0.92387953, 0.92387953, 0.38268343]).max() <= 1 / 255
    assert (image == image[:, :1]).all()


def test_project_constant(tmp_path):
    """Tests that a constant ERP projects onto a constant perspective image."""
    source = write_png(tmp_path / "flat.png", np.full((16, 32, 3), 0.4))
    output = tmp_path / "view.png"
    args = ["project", source, output, "--to", "perspective", "--fov", 60, "--theta", 170, "--height", 8, "--width", 12]
    assert main(args) == 0
    image = read_image(output)
    assert image.shape == (8, 12, 3)
    assert (image == 102 / 255).all()


def test_project_to_fisheye(tmp_path, hr_erp):
    """Tests the square fisheye output."""
    assert main(["project", hr_erp, tmp_path / "fisheye.png", "--to", "fisheye", "--height", 16]) == 0
    assert read_image(tmp_path / "fisheye.png").shape == (16, 16, 3)


def test_init_weights_is_deterministic(tmp_path):
    """Tests that the seed determines the written weights."""
    main(["init-weights", tmp_path / "a.bin", "--seed", 3])
    main(["init-weights", tmp_path / "b.bin", "--seed", 3])
    main(["init-weights", tmp_path / "c.bin", "--seed", 4])
    assert (tmp_path / "a.bin").read_bytes() == (tmp_path / "b.bin").read_bytes()
    assert (tmp_path / "a.bin").read_bytes() != (tmp_path / "c.bin").read_bytes()
    assert (tmp_path / "a.bin.json").read_bytes() == (tmp_path / "c.bin.json").read_bytes()


@pytest.mark.parametrize("block", ["daab", "dacb"])
def test_offsets_viz_of_zero_weights(tmp_path, block):
    """Tests that zero weights render coincident points without any displacement."""
    main(["init-weights", tmp_path / "zero.bin", "--zero"])
    output = tmp_path / "heatmap.png"
    assert main(["offsets-viz", tmp_path / "zero.bin", output, "--block", block, "--height", 16, "--width", 32]) == 0
    image = read_image(output)
    assert image.shape == (16, 32, 3)
    assert (image[..., 2] == 0).all()
    assert np.array_equal(image[..., 0], image[..., 1])


def test_offsets_viz_missing_weights(tmp_path):
    """Tests that missing weights are a validation error."""
    assert _exit_code(["offsets-viz", tmp_path / "missing.bin", tmp_path / "heatmap.png"]) == 1


def test_help(capsys):
    """Tests that the help lists the exit codes."""
    assert _exit_code(["--help"]) == 0
    assert "exit codes:" in capsys.readouterr().out


def test_exit_codes_epilog():
    """Tests the exit codes section of the help text."""
    lines = exit_codes_epilog().splitlines()
    assert lines[:2] == ["exit codes:", "  0: Success."]
    assert lines[2].startswith("  1: ")
    assert lines[3].startswith("  2: ")


@pytest.mark.parametrize("args", [["unknown"], ["downsample"], ["condmap", "out.png"], ["downsample", "--mode", "x"]])
def test_usage_errors(args):
    """Tests that usage errors exit with the validation exit code."""
    assert _exit_code(args) == 1


def test_logs(tmp_path, check_log):
    """Tests the logs of a successful run."""
    main(["condmap", tmp_path / "cd.png", "--height", 2, "--width", 4])
    assert check_log("INFO", "Attempt to run `condmap` ...")
    assert check_log("INFO", "Running `condmap` is successful.")
