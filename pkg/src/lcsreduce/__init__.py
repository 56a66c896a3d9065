"""Reduction of locally conformal symplectic structures on coordinate charts."""
__version__ = "0.1.0"
