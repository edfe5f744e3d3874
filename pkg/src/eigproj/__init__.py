"""Exact decision procedures for tensor-closedness of Gorenstein-projective modules over finite EI category algebras."""

__version__ = "0.1.0"
