"""Sparse random matrices over finite fields: the full-rank threshold
functional, exact rank/kernel computations, solution-frequency lattice bases,
and seeded Monte Carlo experiments."""

from ._backend import backend_name
from .degdist import (
    DegreeDist,
    dist_fixed,
    dist_poisson,
    dist_powerlaw,
    dist_table,
    gcd_support,
    pgf,
    pgf_d1,
    pgf_d2,
    sample,
    sample_many,
    size_biased,
)
from .gf import FieldCtx, element_len, field_new, index_f
from .lattice import (
    LatticeBasis,
    basis_general,
    basis_identical,
    freq_vector,
    hnf,
    intersect_divisible,
    module_bruteforce,
    solutions,
    verify_basis,
)
from .linalg import (
    EliminationResult,
    KernelSummary,
    SparseMatrix,
    eliminate,
    kernel,
    nullity,
    rank,
    rational_full_row_rank,
    rho,
    sample_kernel,
)
from .matgen import (
    DegreeSequencePair,
    add_ternary_rows,
    gen_biadjacency,
    gen_pairing,
    gen_simple,
    pin,
    sample_degrees,
)
from .threshold import (
    ConditionReport,
    ModelSpec,
    chi_point,
    chi_uniform,
    condition_check,
    normalized_rank,
    phi,
    phi_max,
    tilde_phi,
    tilde_phi_max,
    xorsat_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "DegreeDist", "dist_fixed", "dist_poisson", "dist_powerlaw", "dist_table",
    "gcd_support", "pgf", "pgf_d1", "pgf_d2", "sample", "sample_many", "size_biased",
    "FieldCtx", "element_len", "field_new", "index_f",
    "LatticeBasis", "basis_general", "basis_identical", "freq_vector", "hnf",
    "intersect_divisible", "module_bruteforce", "solutions", "verify_basis",
    "EliminationResult", "KernelSummary", "SparseMatrix", "eliminate", "kernel",
    "nullity", "rank", "rational_full_row_rank", "rho", "sample_kernel",
    "DegreeSequencePair", "add_ternary_rows", "gen_biadjacency", "gen_pairing",
    "gen_simple", "pin", "sample_degrees",
    "ConditionReport", "ModelSpec", "chi_point", "chi_uniform", "condition_check",
    "normalized_rank", "phi", "phi_max", "tilde_phi", "tilde_phi_max",
    "xorsat_threshold",
]
