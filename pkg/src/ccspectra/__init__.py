"""Spectral descriptors for combinatorial complexes.

CC Laplacians, heat kernels and heat kernel signatures over the rank-0
cells of a combinatorial complex, plus the Hodge Laplacian for contrast.
"""
from .complex import (
    Cell,
    CombinatorialComplex,
    Permutation,
    build_complex,
    dump,
    from_graph,
    from_simplicial,
    load,
    parse,
    relabel,
    serialize,
)
from .kernels import BACKEND
from .operators import (
    CcLaplacian,
    WeightScheme,
    boundary,
    cc_laplacian,
    hodge_laplacian,
    incidence,
    weight_scheme,
)

__version__ = "0.1.0"
