"""The module which defines the value types shared by every projection: spherical/plane coordinates and projections.

The validation is performed using `Pydantic <https://docs.pydantic.dev/latest/>`_.

Note:
    All angles are in radians. Degrees only appear at the command line boundary, see :obj:`omnisr.cli`.
"""

import math
from enum import StrEnum
from typing import Literal, NamedTuple, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, model_validator
from pydantic.functional_validators import AfterValidator
from typing_extensions import Annotated

HALF_PI = math.pi / 2
"""Latitude of the north pole."""


def wrap_longitude(theta):
    """Wraps longitudes (scalars or arrays) modulo ``2*pi`` into ``(-pi, pi]``.

    Example:
        .. code-block:: python

            # The following evaluate to True
            wrap_longitude(math.pi) == math.pi
            wrap_longitude(-math.pi) == math.pi
            wrap_longitude(0.0) == 0.0
    """
    return np.pi - np.mod(np.pi - theta, 2 * np.pi)


def _wrap_scalar(theta: float) -> float:
    """The validator flavour of :func:`wrap_longitude` for plain floats."""
    return float(wrap_longitude(theta))


Longitude = Annotated[float, AfterValidator(_wrap_scalar)]
"""The type hint validator for longitudes, which are wrapped into ``(-pi, pi]``."""

Latitude = Annotated[float, Field(ge=-HALF_PI, le=HALF_PI)]
"""The type hint validator for latitudes, which are rejected outside ``[-pi/2, pi/2]``."""


class SphericalCoord(BaseModel):
    """A point on the unit sphere.

    The longitude ``theta`` wraps modulo ``2*pi``, whereas a latitude ``phi`` beyond the poles is rejected.
    """
    model_config = ConfigDict(frozen=True)

    theta: Longitude
    """The longitude in radians, in ``(-pi, pi]``."""

    phi: Latitude
    """The latitude in radians, in ``[-pi/2, pi/2]``; ``+pi/2`` is the north pole."""


class PlaneCoord(NamedTuple):
    """A point on a (dimensionless) projection plane.

    The valid domain depends on the projection: ``(-pi, pi] x [-pi/2, pi/2]`` for ERP, the unit disk for Fisheye and
    ``[-tan(fov/2), tan(fov/2)]^2`` for Perspective.
    """

    x: float
    """The plane abscissa."""

    y: float
    """The plane ordinate, growing upwards (towards the north pole)."""


class ProjectionKind(StrEnum):
    """The projection families."""
    ERP = "erp"
    FISHEYE = "fisheye"
    PERSPECTIVE = "perspective"


Hemisphere = Literal["front", "back"]
"""The fisheye lens of a horizontally spliced pair. The front lens faces the north pole, the back one the south pole."""


class ProjectionSpec(BaseModel):
    """The tagged description of a projection together with the dimensions of its raster.

    Prefer the factories :func:`ProjectionSpec.erp`, :func:`ProjectionSpec.fisheye` and
    :func:`ProjectionSpec.perspective` over the constructor.

    Note:
        The fisheye ``rotation`` ``(d_theta, d_phi)`` is an additive shift of the spherical polar coordinates which
        aligns a general fisheye with the horizontally spliced one. The back lens first applies the rigid half-turn
        ``(theta, phi) -> (-theta, -phi)``.
    """
    model_config = ConfigDict(frozen=True)

    kind: ProjectionKind
    width: PositiveInt
    height: PositiveInt

    aperture: float | None = None
    """The fisheye aperture ``A_F`` in radians, in ``(0, 2*pi)``."""

    rotation: tuple[float, float] = (0.0, 0.0)
    """The fisheye alignment shift ``(d_theta_r, d_phi_r)`` in radians."""

    hemisphere: Hemisphere = "front"

    fov: float | None = None
    """The perspective aperture ``A_P`` in radians, in ``(0, pi)``; it spans the longer side of the raster."""

    view: tuple[float, float] = (0.0, 0.0)
    """The perspective view direction ``(theta_p, phi_p)`` in radians."""

    @model_validator(mode="after")
    def _check_invariants(self) -> Self:
        match self.kind:
            case ProjectionKind.ERP:
                if self.width != 2 * self.height:
                    raise ValueError(f"ERP rasters require width == 2 * height, got {self.width}x{self.height}.")
            case ProjectionKind.FISHEYE:
                if self.aperture is None or not 0 < self.aperture < 2 * math.pi:
                    raise ValueError(f"The fisheye aperture must be in (0, 2*pi), got {self.aperture}.")
                if self.width != self.height:
                    raise ValueError(f"Fisheye rasters must be square, got {self.width}x{self.height}.")
            case ProjectionKind.PERSPECTIVE:
                if self.fov is None or not 0 < self.fov < math.pi:
                    raise ValueError(f"The perspective FOV must be in (0, pi), got {self.fov}.")
                if abs(self.view[1]) > HALF_PI:
                    raise ValueError(f"The view latitude must be in [-pi/2, pi/2], got {self.view[1]}.")
        return self

    @classmethod
    def erp(cls, height: int) -> Self:
        """Makes an ERP spec of the given height (the width is twice the height)."""
        return cls(kind=ProjectionKind.ERP, width=2 * height, height=height)

    @classmethod
    def fisheye(
            cls,
            diameter: int,
            aperture: float = math.pi,
            rotation: tuple[float, float] = (0.0, 0.0),
            hemisphere: Hemisphere = "front") -> Self:
        """Makes a fisheye spec whose disk of the given diameter fills a square raster."""
        return cls(kind=ProjectionKind.FISHEYE, width=diameter, height=diameter, aperture=aperture,
                   rotation=rotation, hemisphere=hemisphere)

    @classmethod
    def perspective(
            cls,
            height: int,
            width: int,
            fov: float = HALF_PI,
            view: tuple[float, float] = (0.0, 0.0)) -> Self:
        """Makes a perspective spec looking at ``view = (theta_p, phi_p)``."""
        return cls(kind=ProjectionKind.PERSPECTIVE, width=width, height=height, fov=fov, view=view)

    @property
    def shape(self) -> tuple[int, int]:
        """The raster shape as ``(height, width)``."""
        return self.height, self.width

    @property
    def half_extent(self) -> tuple[float, float]:
        """The perspective plane half extents ``(x, y)``; the longer side reaches ``tan(fov/2)``."""
        t = math.tan(self.fov / 2)
        longer = max(self.width, self.height)
        return t * self.width / longer, t * self.height / longer

    def with_raster(self, height: int, width: int) -> Self:
        """Returns the same projection on a raster of another size."""
        return self.model_copy(update=dict(height=height, width=width))
