"""This package contains the closed-form coordinate transforms and stretching ratios between the sphere and planes."""
