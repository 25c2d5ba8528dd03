"""The module which defines the errors that might occur while reading or writing files."""

from typing import ClassVar

from omnisr.errors.errors import EXIT_IO, EXIT_VALIDATION, ErrorGroup, OmniError


class Files(ErrorGroup):
    """File errors, e.g. if a raster cannot be decoded or an output already exists."""
    ReadError: ClassVar[OmniError] = OmniError({
        EXIT_IO:
            "Could not read the file."
    })

    WriteError: ClassVar[OmniError] = OmniError({
        EXIT_IO:
            "Could not write the file."
    })

    OutputExists: ClassVar[OmniError] = OmniError({
        EXIT_IO:
            "The output already exists; pass `--overwrite` to replace it."
    })

    BadGeometry: ClassVar[OmniError] = OmniError({
        EXIT_VALIDATION:
            "The raster does not have the geometry required by the command."
    })
