"""The module which defines the errors that might occur while running the distortion-aware blocks."""

from typing import ClassVar

from omnisr.errors.errors import EXIT_VALIDATION, ErrorGroup, OmniError


class Modulation(ErrorGroup):
    """Block errors, e.g. if the features, the conditions and the weights do not fit together."""
    ShapeMismatch: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The shapes of the features, the condition maps and the weights are not consistent."
    })

    IndivisibleWindow: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The window size must divide both the height and the width of the maps."
    })

    WeightsFormat: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The block weights file or its sidecar is malformed."
    })
