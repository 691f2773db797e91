"""Groupoids on subspace lattices of F_p^n and their presheaves on injections."""

__version__ = "0.1.0"
