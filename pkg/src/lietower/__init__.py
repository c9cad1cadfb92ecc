"""Exact computation for differential graded Lie algebras over the rationals.

The package computes, with exact rational arithmetic throughout:

* free graded Lie algebras inside the tensor algebra (bases, dimensions,
  bracket calculus, the left-normed bracketing certificate);
* differential graded Lie algebra presentations, their word-length
  truncations, degreewise homology and the tower n -> H(L/L^n) with
  stabilization evidence;
* boundary equations d(u) = target in truncations and in the free algebra,
  with bounded-witness certificates;
* pronilpotency audits of finite bracket tables, cross-checked against the
  definitional lower-central-series condition;
* the functor toolkit between commutative algebras, cocommutative
  coalgebras, Lie algebras and Lie coalgebras, at finite windows, with
  dimension and differential duality checks.
"""

from .freelie import (
    GeneratorSet,
    TensorElt,
    ad_power,
    dynkin,
    eval_bracket_expr,
    graded_bracket,
    is_lie_element,
    lie_basis,
    lie_dim,
    parse_element,
    pbw_euler_check,
)
from .linalg import SparseMatrix, Subspace, homology_at, quotient_dims, reduce, solve_affine
from .dgl import (
    DglPresentation,
    Truncation,
    boundary_solve,
    completion_boundary_check,
    exact_homology,
    extend_derivation,
    g_series,
    h0_discrepancy_report,
    h0_table_bounded_window,
    h0_table_from_tower,
    homology_tower,
    lcs_basis,
    lcs_quotient_complex,
    top_length_obstruction,
    validate,
)
from .pronil import (
    FiniteLieData,
    definitional_pronilpotency,
    g_series_vanishing,
    lemma1_audit,
    nilpotency_of_degree_zero,
)
from .functors import (
    Cdgc,
    CdgaTable,
    FiniteDgl,
    SullivanAlgebra,
    bar_lie_coalgebra_E,
    chevalley_chains,
    duality_check,
    dualize_sullivan,
    functor_A,
    lemma2_quasi_iso_check,
    minimality_check,
    neisendorfer_model,
    quillen_L,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
