"""A-invariant skew Hadamard difference sets over F_q^3."""

__version__ = "0.1.0"
