"""Kernel-based spatial random graphs: sampling, phase exponents and scaling experiments."""

__version__ = "0.1.0"
