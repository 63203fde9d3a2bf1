"""Exact verification of off-shell Bethe vectors for U_q(gl_N) spin chains."""

__version__ = "0.1.0"
