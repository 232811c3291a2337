"""MLSpin - Maxwell-Lorentz simulator with a spinning extended charge, plus invariant audits."""

__version__ = "0.1.0"
