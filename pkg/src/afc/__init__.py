"""Exact-arithmetic workbench for functor calculus over vector spaces.

Cross effects, polynomial approximations, linearization, directional
derivatives, higher-order chain rules, and machine verification of the
bicomplex retraction identities, all over Q or F_p with no floating point.
"""

from .fields import GF, GF2, QQ, Field, parse_field
from .matrix import Matrix, SplitSummand, block_diag, split_idempotent
from .chain import (
    ChainComplex, ChainHomotopy, ChainMap, HomologyComparison, TruncationWindow,
    Verdict, check_chain_map, check_homotopy, compare_homology, deg0_complex,
    direct_sum, zero_complex,
)

__all__ = [
    "GF", "GF2", "QQ", "Field", "parse_field",
    "Matrix", "SplitSummand", "block_diag", "split_idempotent",
    "ChainComplex", "ChainHomotopy", "ChainMap", "HomologyComparison",
    "TruncationWindow", "Verdict", "check_chain_map", "check_homotopy",
    "compare_homology", "deg0_complex", "direct_sum", "zero_complex",
]

__version__ = "0.1.0"
