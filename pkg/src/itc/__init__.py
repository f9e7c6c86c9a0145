"""Intertwined toric code: construction, syndrome algebra and single-shot decoding."""

__version__ = "0.1.0"
