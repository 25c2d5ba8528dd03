"""The module which defines the errors that might occur while computing quality metrics."""

from typing import ClassVar

from omnisr.errors.errors import EXIT_VALIDATION, ErrorGroup, OmniError


class Metrics(ErrorGroup):
    """Metric errors, e.g. if the compared images are not compatible."""
    ShapeMismatch: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The compared images (and weights) must have identical shapes."
    })

    TooSmall: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "SSIM requires images whose shorter side is at least as large as the Gaussian window (11 pixels)."
    })
