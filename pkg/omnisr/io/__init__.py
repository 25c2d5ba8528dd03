"""This package contains the raster and JSON document I/O of omnisr."""
