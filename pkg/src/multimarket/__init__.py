"""Finite-tree laboratory for segmented markets with one numeraire per submarket."""

__version__ = "0.1.0"
