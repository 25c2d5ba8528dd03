"""This package provides synthetic rasters and brute-force oracles to test the numerical packages."""
