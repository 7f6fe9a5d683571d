"""Penalized nonnegative matrix factorization.

Multiplicative-update NMF with three penalty families (frobenius/"cnmf",
zellner/"znmf", toeplitz/"tnmf"), nonnegative projection of held-out columns,
nearest-neighbor recognition, and a seeded grid-sweep runner. All matrix
arguments and results are 2-D float64 numpy arrays.
"""

from penmf._core import (
    InputDomainError,
    NumericalError,
    ParameterError,
    ParseError,
    ShapeError,
    accuracy,
    classify,
    downsample,
    factorize,
    parse_pgm,
    project,
    run_grid,
    synthetic_parts,
    toeplitz_dense,
    toeplitz_matmul,
    write_pgm,
)

__all__ = [
    "InputDomainError",
    "NumericalError",
    "ParameterError",
    "ParseError",
    "ShapeError",
    "accuracy",
    "classify",
    "downsample",
    "factorize",
    "parse_pgm",
    "project",
    "run_grid",
    "synthetic_parts",
    "toeplitz_dense",
    "toeplitz_matmul",
    "write_pgm",
]

__version__ = "0.1.0"
