"""Spectral determinants, scattering, the quantum dilogarithm and modular-group numerics."""

from ._core import (
    ConvergenceError,
    Dilog,
    DomainError,
    ParseError,
    Scatterer,
    SturmLiouville,
    dedekind_zeta,
    deuring_residual,
    eisenstein_fourier,
    eisenstein_lattice,
    eval_potential,
    free_kernel,
    free_kernel_phi,
    k_of_lambda,
    lambda_of_k,
    linnik_discrepancy,
    m_coefficient,
    mirror_spectrum,
    parse_potential,
    point_pair_u,
    reduce_point,
    reduced_forms,
    resolvent_series,
    run_cli,
)

__all__ = [name for name in dir() if not name.startswith("_")]
