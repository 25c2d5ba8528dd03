"""The module which defines the errors that might occur while degrading ERP images."""

from typing import ClassVar

from omnisr.errors.errors import EXIT_VALIDATION, ErrorGroup, OmniError


class Degradation(ErrorGroup):
    """Degradation errors, e.g. if the image geometry is not compatible with the configuration."""
    ConfigError: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The ERP image must have width == 2 * height, and both the height and the fisheye resolution must be "
            "divisible by the scale."
    })
