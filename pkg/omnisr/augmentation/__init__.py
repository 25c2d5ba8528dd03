"""This package contains the pseudo-ERP augmentation which synthesizes distorted patches from plain images."""
