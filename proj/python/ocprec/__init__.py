"""Active-set Newton solver for convection-diffusion optimal control problems."""

from ._core import (
    ActiveSet,
    ConfigError,
    KktPoint,
    KrylovBreakdown,
    NewtonResult,
    Problem,
    SingularMatrixError,
    SpectralError,
    active_sets,
    alpha_min,
    apply_preconditioner,
    bdf_intervals,
    bdf_spectrum,
    eig_table_case,
    forcing_exact,
    forcing_inexact,
    gammas,
    ipf_spectrum,
    kkt_residual,
    lemma_f_property,
    newton_matrix_csr,
    newton_solve,
    pencil_eigs,
    pencil_summary,
    performance_profile,
    preset_problem,
    run_sweep,
    zeta_bounds,
)


def to_scipy(csr_tuple):
    """Turn a (data, indices, indptr, shape) tuple into a scipy.sparse.csr_matrix."""
    import scipy.sparse as sp

    data, indices, indptr, shape = csr_tuple
    return sp.csr_matrix((data, indices, indptr), shape=shape)


__all__ = [name for name in dir() if not name.startswith("_")]
