"""
Exact b-adic combinatorics: words, intervals, grids.
"""

from src.badic.words import (
    BadicInterval,
    Grid,
    Word,
    grid,
    locate,
    word_from_index,
    word_to_interval,
    words,
)

__all__ = [
    "BadicInterval",
    "Grid",
    "Word",
    "grid",
    "locate",
    "word_from_index",
    "word_to_interval",
    "words",
]
