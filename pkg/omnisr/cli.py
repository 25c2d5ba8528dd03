"""Main interface.

Every subcommand reads its inputs, runs one pipeline of the package and writes lossless PNG (or JSON) artifacts. The
process exits with ``0`` on success, ``1`` on a domain or validation error and ``2`` on an I/O error.
"""

import argparse
import sys
from pathlib import Path
from typing import Callable, NoReturn

from loguru import logger
from pydantic import ValidationError

from omnisr.augmentation.dataset import synthesize_dataset
from omnisr.augmentation.errors import Augmentation
from omnisr.config.config import AppConfig, DegradationConfig, ProjectionOptions, RunConfig, parse_config
from omnisr.degradation.errors import Degradation
from omnisr.degradation.fisheye import DownsampleMode, erp_downsample, fisheye_downsample
from omnisr.errors.errors import EXIT_VALIDATION, OmniError
from omnisr.geometry.coords import ProjectionKind, ProjectionSpec
from omnisr.geometry.errors import Distortion, Projection
from omnisr.io.errors import Files
from omnisr.io.rasters import ensure_writable, read_image, write_bytes, write_png
from omnisr.metrics.errors import Metrics
from omnisr.metrics.report import PairList, evaluate_pairs
from omnisr.modulation.blocks import offset_net_forward
from omnisr.modulation.conditions import build_cd, condition_maps
from omnisr.modulation.errors import Modulation
from omnisr.modulation.heatmap import offsets_heatmap
from omnisr.modulation.weights import BlockWeights, sidecar_path
from omnisr.resampling.errors import Sampling, Warping
from omnisr.resampling.kernels import Kernel, OutOfBounds, SampleSpec
from omnisr.resampling.warp import warp

ERROR_GROUPS = (Files, Projection, Distortion, Sampling, Warping, Degradation, Augmentation, Metrics, Modulation)

_stderr_handler: int | None = None


class _ArgumentParser(argparse.ArgumentParser):
    """An argument parser whose usage errors exit with the validation exit code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        logger.error(message)
        sys.exit(EXIT_VALIDATION)


def configure_logging(level: str) -> None:
    """Routes the logs at ``level`` and above to the standard error, replacing the default handler of loguru."""
    global _stderr_handler
    try:
        logger.remove(0 if _stderr_handler is None else _stderr_handler)
    except ValueError:
        pass
    _stderr_handler = logger.add(sys.stderr, level=level.upper())


def exit_codes_epilog() -> str:
    """Renders the exit codes and their messages for the help text."""
    union = None
    for group in ERROR_GROUPS:
        union = group.union() if union is None else union | group.union()
    lines = ["exit codes:", "  0: Success."]
    lines += [f"  {code}: {msg}" for code, msg in sorted(union.help_descriptor.items())]
    return "\n".join(lines)


def _output(run: RunConfig) -> Path:
    return ensure_writable(run.output, run.overwrite)


def cmd_downsample(run: RunConfig, args: argparse.Namespace) -> int:
    """Degrades an HR ERP into an LR ERP with the plain or the Fisheye downsampling."""
    override = {"scale": args.scale} if args.scale else {}
    cfg = DegradationConfig(**(run.app.degradation.model_dump() | override))
    erp = read_image(run.inputs[0])
    if erp.shape[1] != 2 * erp.shape[0]:
        raise Files.BadGeometry.with_information(shape=erp.shape[:2], expected="width == 2 * height")
    output = _output(run)
    match DownsampleMode(args.mode):
        case DownsampleMode.FISHEYE:
            lr = fisheye_downsample(erp, cfg, run.threads)
        case DownsampleMode.ERP:
            lr = erp_downsample(erp, cfg.scale)
    write_png(output, lr, run.deep)
    logger.info(f"Wrote the LR ERP {lr.shape[:2]} to {output}.")
    return 0


def cmd_augment(run: RunConfig, args: argparse.Namespace) -> int:
    """Synthesizes pseudo-ERP patches and their manifest from a directory of plain images."""
    ensure_writable(run.output / "manifest.json", run.overwrite)
    synthesize_dataset(run.inputs[0], run.app.augmentation, run.output, run.threads, run.deep)
    return 0


def cmd_metric(run: RunConfig, args: argparse.Namespace) -> int:
    """Evaluates PSNR, SSIM, WS-PSNR and WS-SSIM of image pairs and prints the JSON report."""
    if args.pairs:
        try:
            pairs = PairList.validate_json(Path(args.pairs).read_bytes())
        except OSError as e:
            raise Files.ReadError.with_information(path=args.pairs, reason=str(e)) from e
    elif len(run.inputs) == 2:
        pairs = [(run.inputs[0], run.inputs[1])]
    else:
        raise Files.BadGeometry.with_information(reason="expected two images or --pairs")

    report = evaluate_pairs(pairs, args.per_channel, run.threads).model_dump_json(indent=2)
    if run.output:
        write_bytes(_output(run), report.encode())
    sys.stdout.write(report + "\n")
    return 0


def projection_spec(kind: ProjectionKind, height: int, width: int, options: ProjectionOptions) -> ProjectionSpec:
    """Makes the spec of a raster of the given kind and size from the (radian) projection options."""
    match kind:
        case ProjectionKind.ERP:
            if width != 2 * height:
                raise Files.BadGeometry.with_information(shape=(height, width), expected="width == 2 * height")
            return ProjectionSpec.erp(height)
        case ProjectionKind.FISHEYE:
            if width != height:
                raise Files.BadGeometry.with_information(shape=(height, width), expected="a square raster")
            return ProjectionSpec.fisheye(
                height, options.aperture, (options.rot_theta, options.rot_phi), options.hemisphere)
        case ProjectionKind.PERSPECTIVE:
            return ProjectionSpec.perspective(height, width, options.fov, (options.theta, options.phi))


def cmd_project(run: RunConfig, args: argparse.Namespace) -> int:
    """Converts a raster between the ERP, fisheye and perspective projections."""
    src = read_image(run.inputs[0])
    src_kind, dst_kind = ProjectionKind(args.source), ProjectionKind(args.target)
    src_spec = projection_spec(src_kind, src.shape[0], src.shape[1], run.projection)

    height = args.height or src.shape[0]
    match dst_kind:
        case ProjectionKind.ERP:
            width = 2 * height
        case ProjectionKind.FISHEYE:
            width = height
        case ProjectionKind.PERSPECTIVE:
            width = args.width or height
    dst_spec = projection_spec(dst_kind, height, width, run.projection)

    policy = OutOfBounds.WRAP_LONGITUDE if src_kind == ProjectionKind.ERP else OutOfBounds.ZERO
    output = _output(run)
    image, _ = warp(src, src_spec, dst_spec, SampleSpec(kernel=Kernel.BICUBIC_ANTIALIASED, out_of_bounds=policy),
                    run.threads)
    write_png(output, image, run.deep)
    logger.info(f"Wrote the {dst_kind} raster {image.shape[:2]} to {output}.")
    return 0


def cmd_condmap(run: RunConfig, args: argparse.Namespace) -> int:
    """Writes the latitude distortion map ``C_d`` of an ERP raster as a grayscale PNG."""
    output = _output(run)
    write_png(output, build_cd(args.height, args.width)[0], run.deep)
    return 0


def cmd_offsets_viz(run: RunConfig, args: argparse.Namespace) -> int:
    """Renders the offsets of one block of a weights file as a heatmap."""
    weights = BlockWeights.load(run.inputs[0])
    maps = condition_maps(args.height, args.width, args.window)
    match args.block:
        case "daab":
            field = offset_net_forward(maps.stacked, weights.daab_offset)
        case "dacb":
            field = offset_net_forward(maps.c_d, weights.dacb_offset)
    output = _output(run)
    write_png(output, offsets_heatmap(field, args.stride).image, run.deep)
    return 0


def cmd_init_weights(run: RunConfig, args: argparse.Namespace) -> int:
    """Writes seeded random (or zero) block weights with their sidecar."""
    output = _output(run)
    ensure_writable(sidecar_path(output), run.overwrite)
    if args.zero:
        weights = BlockWeights.zeros(args.channels)
    else:
        weights = BlockWeights.random(run.seed, args.channels)
    weights.save(output)
    return 0


COMMANDS: dict[str, Callable[[RunConfig, argparse.Namespace], int]] = {
    "downsample": cmd_downsample,
    "augment": cmd_augment,
    "metric": cmd_metric,
    "project": cmd_project,
    "condmap": cmd_condmap,
    "offsets-viz": cmd_offsets_viz,
    "init-weights": cmd_init_weights,
}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--threads", type=int, default=None,
        help="Number of worker threads; the outputs do not depend on it. Defaults to $OMNISR_THREADS or 1.")
    common.add_argument("--seed", type=int, default=0, help="Seed of every randomized choice.")
    common.add_argument("--config", default=None, help="Path to a YAML configuration file.")
    common.add_argument("--overwrite", action="store_true", help="Replace existing outputs.")
    common.add_argument("--deep", action="store_true", help="Write 16-bit PNG rasters instead of 8-bit ones.")
    common.add_argument("--log-level", default="INFO", help="Minimum level of the logs on the standard error.")
    return common


def _projection_options(parser: argparse.ArgumentParser) -> None:
    kinds = [str(k) for k in ProjectionKind]
    parser.add_argument("--from", dest="source", choices=kinds, default="erp", help="Projection of the input.")
    parser.add_argument("--to", dest="target", choices=kinds, default="perspective", help="Projection of the output.")
    parser.add_argument("--fov", type=float, default=90, help="Perspective field of view in degrees.")
    parser.add_argument("--theta", type=float, default=0, help="Perspective view longitude in degrees.")
    parser.add_argument("--phi", type=float, default=0, help="Perspective view latitude in degrees.")
    parser.add_argument("--aperture", type=float, default=180, help="Fisheye aperture in degrees.")
    parser.add_argument("--rot-theta", type=float, default=0, help="Fisheye longitude shift in degrees.")
    parser.add_argument("--rot-phi", type=float, default=0, help="Fisheye latitude shift in degrees.")
    parser.add_argument("--hemisphere", choices=["front", "back"], default="front", help="Fisheye lens.")
    parser.add_argument("--height", type=int, default=None, help="Output height; defaults to the input height.")
    parser.add_argument("--width", type=int, default=None, help="Perspective output width; defaults to the height.")


def build_parser() -> argparse.ArgumentParser:
    """Builds the parser of all subcommands."""
    common = _common_options()
    parser = _ArgumentParser(
        prog="omnisr",
        description="Omnidirectional image geometry, degradation, augmentation, metrics and distortion modulation.",
        epilog=exit_codes_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("downsample", parents=[common], help=cmd_downsample.__doc__)
    p.add_argument("input", help="HR ERP raster.")
    p.add_argument("output", help="LR ERP PNG.")
    p.add_argument("--mode", choices=[str(m) for m in DownsampleMode], default="fisheye")
    p.add_argument(
        "--scale", type=int, default=None, help="Downsampling factor: 2, 4, 8 or 16. Defaults to the config value.")

    p = sub.add_parser("augment", parents=[common], help=cmd_augment.__doc__)
    p.add_argument("input", help="Directory of PNG/JPEG plain images.")
    p.add_argument("output", help="Directory of the patches and manifest.json.")

    p = sub.add_parser("metric", parents=[common], help=cmd_metric.__doc__)
    p.add_argument("images", nargs="*", help="Reference and candidate images.")
    p.add_argument("--pairs", default=None, help="JSON list of [reference, candidate] paths.")
    p.add_argument("--output", default=None, help="Also write the report to this file.")
    p.add_argument("--per-channel", action="store_true", help="Average per-channel scores instead of using luma.")

    p = sub.add_parser("project", parents=[common], help=cmd_project.__doc__)
    p.add_argument("input", help="Input raster.")
    p.add_argument("output", help="Output PNG.")
    _projection_options(p)

    p = sub.add_parser("condmap", parents=[common], help=cmd_condmap.__doc__)
    p.add_argument("output", help="Output PNG.")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--width", type=int, required=True)

    p = sub.add_parser("offsets-viz", parents=[common], help=cmd_offsets_viz.__doc__)
    p.add_argument("weights", help="Block weights binary; its sidecar is <weights>.json.")
    p.add_argument("output", help="Output PNG.")
    p.add_argument("--block", choices=["daab", "dacb"], default="daab")
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--window", type=int, default=8)
    p.add_argument("--stride", type=int, default=8)

    p = sub.add_parser("init-weights", parents=[common], help=cmd_init_weights.__doc__)
    p.add_argument("output", help="Block weights binary.")
    p.add_argument("--zero", action="store_true", help="Write all-zero weights.")
    p.add_argument("--channels", type=int, default=4)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    """Merges the configuration file and the flags into a single :class:`RunConfig`."""
    app = parse_config(args.config) if args.config else AppConfig()
    match args.subcommand:
        case "metric":
            inputs, output = args.images, args.output
        case "condmap":
            inputs, output = [], args.output
        case "offsets-viz":
            inputs, output = [args.weights], args.output
        case "init-weights":
            inputs, output = [], args.output
        case _:
            inputs, output = [args.input], args.output

    projection = None
    if args.subcommand == "project":
        projection = ProjectionOptions.from_degrees(
            fov=args.fov, theta=args.theta, phi=args.phi, aperture=args.aperture,
            rot_theta=args.rot_theta, rot_phi=args.rot_phi, hemisphere=args.hemisphere)

    return RunConfig(
        subcommand=args.subcommand,
        inputs=inputs,
        output=output,
        seed=args.seed,
        threads=args.threads or app.threads,
        overwrite=args.overwrite,
        deep=args.deep or app.deep,
        app=app,
        projection=projection,
    )


def main(args: list[str] | None = None) -> int:
    """Runs a subcommand given the command-line arguments.

    Returns:
        ``0`` on success. Failures exit the process with the exit code of the error.
    """
    cmd_args = build_parser().parse_args(None if args is None else [str(i) for i in args])
    configure_logging(cmd_args.log_level)
    try:
        run = _run_config(cmd_args)
        logger.info(f"Attempt to run `{run.subcommand}` ...")
        code = COMMANDS[run.subcommand](run, cmd_args)
    except ValidationError as e:
        logger.error(e)
        sys.exit(EXIT_VALIDATION)
    except OmniError as e:
        e.sys_exit_log()
    logger.info(f"Running `{run.subcommand}` is successful.")
    return code


def run_sync() -> None:
    """Runs the interface synchronously."""
    sys.exit(main())
