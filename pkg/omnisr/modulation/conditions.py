"""The module which builds the condition maps of the distortion-aware blocks.

  - ``C_d`` is the cosine of the latitude of each pixel centre of an ERP raster, constant along the rows.
  - ``C_w`` is a linear position encoding within each attention window, in ``[-1, 1]``, tiled over the raster.
"""

from typing import NamedTuple

import numpy as np
from pydantic import PositiveInt, validate_call

from omnisr.modulation.errors import Modulation


class ConditionMaps(NamedTuple):
    """The condition maps of a raster."""
    c_d: np.ndarray
    """The ``(1, height, width)`` latitude distortion map."""
    c_w: np.ndarray
    """The ``(2, height, width)`` window position encoding (rows, columns)."""

    @property
    def stacked(self) -> np.ndarray:
        """The ``(3, height, width)`` input of the attention offset network."""
        return np.concatenate([self.c_d, self.c_w], axis=0)


@validate_call
def build_cd(rows: PositiveInt, cols: PositiveInt) -> np.ndarray:
    """Builds the latitude distortion map ``cos((m + 0.5 - M/2) / M * pi)``.

    Example:
        .. code-block:: python

            # The rows of a 2-row map are both sqrt(2)/2
            build_cd(2, 3)[0, :, 0] == [cos(-pi/4), cos(pi/4)]
    """
    column = np.cos((np.arange(rows) + 0.5 - rows / 2) / rows * np.pi)
    return np.broadcast_to(column[np.newaxis, :, np.newaxis], (1, rows, cols)).copy()


def _window_ramp(size: int, window: int) -> np.ndarray:
    position = np.arange(size) % window
    if window == 1:
        return np.zeros(size)
    return (2 * position - (window - 1)) / (window - 1)


@validate_call
def build_cw(height: PositiveInt, width: PositiveInt, window: PositiveInt) -> np.ndarray:
    """Builds the two-channel window position encoding.

    Channel ``0`` maps the row within its window linearly onto ``[-1, 1]``, channel ``1`` does the same for columns.
    A single-pixel window maps to ``0``.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Modulation.IndivisibleWindow`` if ``window`` does not divide ``height`` and ``width``.
    """
    if height % window or width % window:
        raise Modulation.IndivisibleWindow.with_information(height=height, width=width, window=window)
    rows = _window_ramp(height, window)
    cols = _window_ramp(width, window)
    return np.stack([
        np.broadcast_to(rows[:, np.newaxis], (height, width)),
        np.broadcast_to(cols[np.newaxis, :], (height, width)),
    ])


def condition_maps(height: int, width: int, window: int) -> ConditionMaps:
    """Builds both condition maps of a raster."""
    return ConditionMaps(build_cd(height, width), build_cw(height, width, window))
