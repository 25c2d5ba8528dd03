"""This package contains the sampling kernels and the inverse-map warper between projection rasters."""
