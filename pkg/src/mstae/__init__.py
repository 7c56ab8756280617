"""Autoencoders regularized by minimum-spanning-tree distances, for anomaly detection and clustering."""

__version__ = "0.1.0"
