"""Configuration, simulation driver, checks and output files."""
