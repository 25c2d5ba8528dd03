"""This package provides custom error classes for omnisr."""
