"""Syntax-guided synthesis toolkit: SyGuS-IF parsing, solution checking,
a reference divide-and-conquer solver, and competition scoring."""

from .sorts import BOOL, INT, STRING, Sort, SortError, bv
from .terms import (
    Apply,
    Candidate,
    FunDef,
    Grammar,
    Let,
    Literal,
    Problem,
    Production,
    SynthFun,
    Term,
    Var,
    substitute,
    term_size,
    well_sorted,
)

__version__ = "0.1.0"
