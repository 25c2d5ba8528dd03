"""The module which defines the errors that might occur while sampling or warping rasters.

Note:
    The errors are grouped into classes, with each class representing the major category (context) in which the
    errors occur. As such, the attributes of the top classes are (expected to be) self-explanatory and require no
    additional documentation.
"""

from typing import ClassVar

from omnisr.errors.errors import EXIT_VALIDATION, ErrorGroup, OmniError


class Sampling(ErrorGroup):
    """Sampling errors, e.g. if the image or the out-of-bounds policy is not acceptable."""
    InvalidImage: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The image must be a non-empty (height, width, channels) array of finite values with 1 to 4 channels."
    })

    InvalidPolicy: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The longitude wrap-around policy is only valid for ERP sources."
    })


class Warping(ErrorGroup):
    """Warping errors, e.g. if the source projection cannot cover the destination raster."""
    IncompatibleSpecs: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The destination requires coverage which the source cannot provide; use the `zero` policy to mask it."
    })

    InvalidRows: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The rows to warp must be a non-empty range within the destination raster."
    })
