"""Graph-group word algebra, cohomology feasibility and surface routing."""

from .word import INFINITY, Alphabet, GroupElement

__all__ = ["Alphabet", "GroupElement", "INFINITY"]
__version__ = "0.1.0"
