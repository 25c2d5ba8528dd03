"""The module which handles parsing and validating the config (YAML) file and the run configuration of the CLI.

The validation is performed using `Pydantic <https://docs.pydantic.dev/latest/>`_.

Note:
    Angles are stored in radians. Whenever a model is built from degrees (e.g. from the CLI), the conversion happens
    exactly once, in :func:`ProjectionOptions.from_degrees`.
"""

import math
import os
import sys
from pathlib import Path
from typing import Literal, Self

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt, ValidationError, model_validator
from pydantic.functional_validators import AfterValidator
from typing_extensions import Annotated
from yaml import safe_load

from omnisr.errors.errors import EXIT_VALIDATION
from omnisr.geometry.coords import HALF_PI, Hemisphere

THREADS_ENV_VARIABLE = "OMNISR_THREADS"
"""The environment variable which supplies the default number of worker threads."""


def default_threads() -> int:
    """Reads the default number of worker threads from :obj:`THREADS_ENV_VARIABLE`, falling back to ``1``."""
    value = os.environ.get(THREADS_ENV_VARIABLE, "")
    try:
        return max(1, int(value))
    except ValueError:
        if value:
            logger.warning(f"Ignoring the invalid value {value!r} of {THREADS_ENV_VARIABLE}.")
        return 1


def aperture_must_be_padded(aperture: float) -> float:
    """Checks that a padding fisheye aperture is larger than a hemisphere and smaller than the full sphere."""
    if not math.pi < aperture < 2 * math.pi:
        raise ValueError(f"The padding aperture must be in (pi, 2*pi), got {aperture}.")
    return aperture


def fov_must_be_valid(fov: float) -> float:
    """Checks that a perspective field of view is in ``(0, pi)``."""
    if not 0 < fov < math.pi:
        raise ValueError(f"The field of view must be in (0, pi), got {fov}.")
    return fov


PadAperture = Annotated[float, AfterValidator(aperture_must_be_padded)]
"""The type hint validator for padding fisheye apertures in radians."""

FieldOfView = Annotated[float, AfterValidator(fov_must_be_valid)]
"""The type hint validator for perspective fields of view in radians."""

Scale = Literal[2, 4, 8, 16]
"""The supported downsampling factors."""


class DegradationConfig(BaseModel):
    """A model to hold the configurations of the Fisheye downsampling degradation.

    Note:
        The degenerate scale ``1`` is only reachable through ``DegradationConfig.model_construct(scale=1)`` which skips
        the validation; this is meant for tests.
    """
    model_config = ConfigDict(frozen=True)

    scale: Scale = 2
    """The downsampling factor."""

    fisheye_pad_aperture: PadAperture = 2 * math.pi * 200 / 360
    """The aperture in radians with which each fisheye of the dual pair is rendered, by default 200 degrees."""

    fisheye_resolution: PositiveInt | None = None
    """The disk diameter in pixels. ``None`` means the height of the ERP input."""

    @model_validator(mode="after")
    def _check_divisible(self) -> Self:
        if self.fisheye_resolution is not None and self.fisheye_resolution % self.scale:
            raise ValueError(
                f"The scale {self.scale} must divide the fisheye resolution {self.fisheye_resolution}.")
        return self

    def resolution_for(self, erp_height: int) -> int:
        """The disk diameter used for an ERP input of the given height."""
        return self.fisheye_resolution or erp_height


class AugmentConfig(BaseModel):
    """A model to hold the configurations of the pseudo-ERP augmentation.

    The latitudes are in integer degrees, so that the bookkeeping ``Phi_p = phi_h + z_0`` is exact.
    """
    model_config = ConfigDict(frozen=True)

    fov: FieldOfView = HALF_PI
    """The field of view in radians with which a window is treated as a perspective image."""

    phi_h_set: tuple[int, int, int] = (-30, 0, 30)
    """The latitudes in degrees assigned to the left, middle and right sub-images."""

    z0_set: tuple[int, ...] = Field(default=(-15, 0, 15), min_length=1)
    """The latitude perturbations in degrees, cycled in order over the windows of an image."""

    window: PositiveInt | None = None
    """The sliding window side in source pixels. ``None`` means the width of the sub-image."""

    stride: PositiveInt | None = None
    """The sliding window stride in source pixels. ``None`` means the window side (non-overlapping windows)."""

    min_patch: PositiveInt = 256
    """The minimum side of an emitted patch."""

    erp_canvas: PositiveInt = 1024
    """The height of the ERP canvas on which the windows are projected."""


class AppConfig(BaseModel):
    """A model to hold all the configurations of the application.

    This will be used by Pydantic to validate the parsed YAML file. Every section is optional.
    """
    degradation: DegradationConfig = DegradationConfig()
    augmentation: AugmentConfig = AugmentConfig()
    threads: PositiveInt = Field(default_factory=default_threads)
    deep: bool = False
    """Whether to write 16-bit PNG rasters instead of 8-bit ones."""


class ProjectionOptions(BaseModel):
    """A model to hold the projection parameters of the ``project`` subcommand, in radians."""
    model_config = ConfigDict(frozen=True)

    fov: FieldOfView = HALF_PI
    theta: float = 0.0
    phi: float = Field(default=0.0, ge=-HALF_PI, le=HALF_PI)
    aperture: float = Field(default=math.pi, gt=0, lt=2 * math.pi)
    rot_theta: float = 0.0
    rot_phi: float = 0.0
    hemisphere: Hemisphere = "front"

    @classmethod
    def from_degrees(
            cls,
            fov: float = 90,
            theta: float = 0,
            phi: float = 0,
            aperture: float = 180,
            rot_theta: float = 0,
            rot_phi: float = 0,
            hemisphere: Hemisphere = "front") -> Self:
        """Builds the options from angles in degrees; this is the single place where degrees become radians."""
        return cls(
            fov=math.radians(fov),
            theta=math.radians(theta),
            phi=math.radians(phi),
            aperture=math.radians(aperture),
            rot_theta=math.radians(rot_theta),
            rot_phi=math.radians(rot_phi),
            hemisphere=hemisphere,
        )


class RunConfig(BaseModel):
    """A model to hold the complete configuration of a single CLI invocation."""
    subcommand: str
    inputs: list[Path] = []
    output: Path | None = None
    seed: NonNegativeInt = 0
    threads: PositiveInt = 1
    overwrite: bool = False
    deep: bool = False
    app: AppConfig = AppConfig()
    projection: ProjectionOptions | None = None


@logger.catch(onerror=lambda _: sys.exit(EXIT_VALIDATION))
def parse_config(file) -> AppConfig:
    """Parses and validates the configurations from a YAML file (descriptor).

    Args:
        file:
            A `path-like object <https://docs.python.org/3/glossary.html#term-path-like-object>`_ or an integer file
            descriptor. This will be directly passed to the ``open()`` function. For example, it can be the filename
            (absolute or relative) of a valid YAML file which holds the configurations.

    Returns:
        An instance of :class:`AppConfig`.
    """
    logger.info("Attempt to parse the YAML file ...")
    with open(file, "r") as f:
        config = safe_load(f) or {}
    logger.info("Parsing YAML file is successful.")

    try:
        logger.info("Attempt to validate the parsed YAML file ...")
        config = AppConfig(**config)
    except ValidationError as e:
        logger.error(e)
        sys.exit(EXIT_VALIDATION)

    logger.info("Validation of the parsed YAML file is successful.")
    return config
