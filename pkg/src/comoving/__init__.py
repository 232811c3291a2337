"""Comoving-frame transform, rotation action and deformation field."""
