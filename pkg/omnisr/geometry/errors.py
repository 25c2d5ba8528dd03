"""The module which defines the errors that might occur while transforming coordinates between the sphere and planes.

Note:
    The errors are grouped into classes, with each class representing the major category (context) in which the
    errors occur. As such, the attributes of the top classes are (expected to be) self-explanatory and require no
    additional documentation.
"""

from typing import ClassVar

from omnisr.errors.errors import EXIT_VALIDATION, ErrorGroup, OmniError


class Projection(ErrorGroup):
    """Projection errors, e.g. if a point cannot be represented on the requested projection plane."""
    OutOfHemisphere: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The point lies outside the hemisphere covered by the fisheye; route it to the other fisheye of the pair."
    })

    BehindCamera: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The point lies behind the perspective camera (|theta| >= pi/2 in the camera frame)."
    })

    InvalidProjection: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The projection spec does not describe the projection required by the operation."
    })


class Distortion(ErrorGroup):
    """Distortion (stretching ratio) errors, e.g. if the ratio is evaluated outside its valid domain."""
    DomainError: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The plane coordinate lies outside the valid domain of the projection."
    })

    SingularJacobian: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The Jacobian of the sphere to plane map is singular at the requested point."
    })
