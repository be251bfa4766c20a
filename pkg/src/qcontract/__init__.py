"""Exact structure-constant algebras, contractions, K-deformations and Moyal kernels."""

__version__ = "0.1.0"
