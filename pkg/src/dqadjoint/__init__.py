"""Eigenvalues and low-rank approximation of dual quaternion Hermitian matrices
through their dual complex adjoint representation."""

__version__ = "0.1.0"

from .adjoint import from_adjoint, swap_map, to_adjoint, vec_from_adjoint, vec_to_adjoint
from .eig import (
    DCEigenDecomposition,
    DualEigenPair,
    PowerConfig,
    PowerResult,
    Spectrum,
    all_eigenpairs,
    all_eigenpairs_deflation,
    all_eigenpairs_power,
    dc_hermitian_eig,
    extract_orthogonal,
    hermitian_eig_complex,
    power_method,
    power_method_adjoint,
)
from .linalg import (
    DCMatrix,
    DCVector,
    DQMatrix,
    DQVector,
    conj_transpose,
    dq_matmul,
    is_hermitian,
    mat_norms,
    vec_normalize,
    vec_norms,
)
from .lowrank import RankKApprox, rank1_approx_F, rank1_approx_Fstar, rank_k_approx_F, rank_k_approx_Fstar
from .scalar import (
    DualComplex,
    DualNumber,
    DualQuaternion,
    Ordering,
    Quaternion,
    approx_eq,
    dual_abs,
    dual_cmp,
    dual_div,
)
