"""This package contains the forward reference of the distortion-aware attention and convolution blocks.

The blocks are conditioned on the latitude distortion map ``C_d`` and the window position encoding ``C_w`` through
small pointwise offset networks. There is no training: the weights are either random, zero, or loaded from a file.
"""
