"""Figure renderer for the spin-boson squeezing toolkit's CSV datasets."""

__version__ = "0.1.0"

from .datasets import Dataset, SchemaMismatch, load
from .figures import FIGURE_CLASSES, FigureSpec, render
