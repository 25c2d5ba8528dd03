"""This package contains the Fisheye downsampling degradation which produces LR/HR training pairs of ERP images."""
