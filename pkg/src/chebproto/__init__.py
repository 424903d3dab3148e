"""chebproto - Chebyshev cluster prototypes for groups of signals."""

__version__ = "0.1.0"
