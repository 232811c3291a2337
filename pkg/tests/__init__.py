"""Tests for MLSpin."""
