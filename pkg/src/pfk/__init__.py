"""Finite-scale pointfree topology: lattices, locales, finite spaces,
subspace lattices over prime fields, quotient vector bundles, and
linearized locales, all verified by exhaustive scans."""

__version__ = "0.1.0"
