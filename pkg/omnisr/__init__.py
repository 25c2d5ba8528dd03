"""Omnidirectional image geometry, degradation, augmentation and quality metrics for super-resolution."""
