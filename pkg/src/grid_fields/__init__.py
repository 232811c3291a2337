"""Periodic-box spectral vector calculus on a uniform cubic grid."""
