"""Explicit time stepping with invariant observers."""
