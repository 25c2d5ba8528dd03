"""The module which defines the errors that might occur while synthesizing pseudo-ERP patches.

Note:
    The errors are grouped into classes, with each class representing the major category (context) in which the
    errors occur. As such, the attributes of the top classes are (expected to be) self-explanatory and require no
    additional documentation.
"""

from typing import ClassVar

from omnisr.errors.errors import EXIT_VALIDATION, ErrorGroup, OmniError


class Augmentation(ErrorGroup):
    """Augmentation errors, e.g. if an image or a patch placement is not acceptable."""
    TooSmall: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The image must be at least 3 pixels wide to be split into three sub-images."
    })

    PoleOverlap: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The perspective patch would overlap a pole (|phi_p| + fov / 2 > pi / 2)."
    })

    EmptyMask: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The validity mask does not have any valid pixel."
    })

    NoPatches: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "None of the source images produced a patch."
    })
