"""The module which finds the largest axis-aligned rectangle of valid pixels and crops images to it."""

from itertools import chain
from typing import Iterator, NamedTuple

import numpy as np

from omnisr.augmentation.errors import Augmentation


class Rectangle(NamedTuple):
    """An axis-aligned rectangle of pixels."""
    top: int
    left: int
    height: int
    width: int

    @property
    def area(self) -> int:
        """The number of pixels of the rectangle."""
        return self.height * self.width

    @property
    def slices(self) -> tuple[slice, slice]:
        """The ``(rows, columns)`` slices selecting the rectangle."""
        return slice(self.top, self.top + self.height), slice(self.left, self.left + self.width)


def _histogram_rectangles(heights: np.ndarray, bottom: int) -> Iterator[Rectangle]:
    """Yields the rectangles under the histogram ``heights`` whose bottom row is ``bottom``.

    The bars on the stack always have increasing heights. Every maximal rectangle is yielded once it is closed by a
    lower bar, together with a few non-maximal (narrower) ones.
    """
    stack: list[tuple[int, int]] = []
    for j, h in enumerate(chain(heights.tolist(), [0])):
        start = j
        while stack and stack[-1][1] >= h:
            left, height = stack.pop()
            if height:
                yield Rectangle(bottom - height + 1, left, height, j - left)
            start = left
        stack.append((start, h))


def maximal_rectangle(mask: np.ndarray) -> Rectangle:
    """Finds the largest-area rectangle whose every pixel is true in ``mask``.

    Each row is treated as the base of a histogram of the consecutive true pixels above it. Ties are broken by the
    topmost, then the leftmost rectangle.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Augmentation.EmptyMask`` if no pixel of the mask is true.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise Augmentation.EmptyMask

    best = None
    heights = np.zeros(mask.shape[1], dtype=np.int64)
    for bottom, row in enumerate(mask):
        heights = np.where(row, heights + 1, 0)
        for rectangle in _histogram_rectangles(heights, bottom):
            key = (-rectangle.area, rectangle.top, rectangle.left)
            if best is None or key < best[0]:
                best = key, rectangle
    return best[1]


def crop_black_border(img: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Crops an image to the largest rectangle of valid pixels, see :func:`maximal_rectangle`."""
    rows, cols = maximal_rectangle(mask).slices
    return img[rows, cols]
