"""Momentum map, angular momentum and invariant verification."""
