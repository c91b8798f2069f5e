"""Chromatic Delaunay mosaics, chromatic alpha filtrations, 6-packs and MST-ratios."""
__version__ = "0.1.0"
