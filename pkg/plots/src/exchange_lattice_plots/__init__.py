"""Figure rendering for exchange-lattice output files.

This package is a read-only consumer of the CSV/JSON files written by the
``exchange-lattice`` command line tool.  It never imports the simulator; every
number it draws comes from the input files, and the analytic overlay curves
are recomputed from the footer metadata those files carry.
"""

from .io import SchemaError, Table, read_table
from .figures import FIGURE_KINDS, FigureSpec, render

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "SchemaError",
    "Table",
    "read_table",
    "render",
]
