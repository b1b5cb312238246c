"""Stable dual-graph posets, linearly stratified vector spaces, gluing
atlases, and plumbing coordinates."""

__version__ = "0.1.0"
