"""Small linear-algebra helpers with explicit failure detection.

All matrices in this package are tiny (a handful of modes), so the helpers
favour robustness and clarity over asymptotic speed.  Inversions go through
symmetric factorizations with an equilibrated condition-number check instead
of silent pseudo-inverses.
"""

import numpy as np

from .exceptions import IllConditioned

# Repo-wide numerical tolerances.
TOL_PSD = 1e-9        # admissibility slack for covariance-type constraints
TOL_PURE = 1e-9       # purity check on sigma Omega sigma^T = Omega
TOL_SYMPLECTIC = 1e-9
TOL_DECOMP = 1e-10    # Bloch-Messiah reconstruction error
TOL_PHASE = 1e-8      # phase-sensitive overlap self-consistency
COND_MAX = 1e12       # condition-number cutoff for matrix solves
EPS_REF = 1e-12       # usable floor for reference overlaps


def _equilibrated_cholesky(mat, label):
    """Diagonal scaling followed by a Cholesky factor and conditioning check.

    Symmetric factorization with explicit failure detection: non-positive
    pivots and condition numbers beyond COND_MAX raise instead of silently
    falling back to a pseudo-inverse.  The equilibration lets benign scale
    disparities (e.g. the finite-z homodyne limit) pass.
    """
    from scipy.linalg import cho_factor

    mat = np.asarray(mat, dtype=float)
    d = np.sqrt(np.clip(np.diag(mat), 1e-300, None))
    scaled = mat / d[:, None] / d[None, :]
    cond = np.linalg.cond(scaled)
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditioned(f"{label} is ill-conditioned (cond={cond:.3g})")
    try:
        factor = cho_factor(scaled, lower=True)
    except np.linalg.LinAlgError as exc:
        raise IllConditioned(f"{label} is not positive definite: {exc}") from exc
    return factor, d


def solve_psd(mat, rhs, label="matrix"):
    """Solve ``mat @ x = rhs`` for symmetric positive-definite ``mat``."""
    from scipy.linalg import cho_solve

    factor, d = _equilibrated_cholesky(mat, label)
    rhs = np.asarray(rhs)
    if rhs.ndim == 1:
        return cho_solve(factor, rhs / d) / d
    return cho_solve(factor, rhs / d[:, None]) / d[:, None]


def inv_psd(mat, label="matrix"):
    """Inverse of a symmetric positive-definite matrix with conditioning check."""
    from scipy.linalg import cho_solve

    factor, d = _equilibrated_cholesky(mat, label)
    inv_scaled = cho_solve(factor, np.eye(d.shape[0]))
    return inv_scaled / d[:, None] / d[None, :]


def solve_complex(mat, rhs, label="matrix"):
    """Solve with a general complex matrix, guarding against near-singularity."""
    mat = np.asarray(mat, dtype=complex)
    cond = np.linalg.cond(mat)
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditioned(f"{label} is ill-conditioned (cond={cond:.3g})")
    return np.linalg.solve(mat, rhs)


def sqrt_det_rhp(mat, label="matrix"):
    """Branch-resolved sqrt(det(mat)) for matrices with eigenvalues in Re > 0.

    The Gaussian integrals behind the overlap kernels converge only when the
    (complex symmetric) quadratic form has positive-definite real part; there
    the analytic continuation of 1/sqrt(det) from the real positive cone is
    the product of principal-branch eigenvalue square roots.
    """
    lam = np.linalg.eigvals(np.asarray(mat, dtype=complex))
    if np.any(lam.real <= 0):
        raise IllConditioned(f"{label} has eigenvalues off the right half-plane")
    return complex(np.prod(np.sqrt(lam)))


def is_symmetric(mat, tol=1e-10):
    mat = np.asarray(mat)
    return np.allclose(mat, mat.T, atol=tol)


def min_eig_hermitian(mat):
    """Smallest eigenvalue of a Hermitian matrix (used by admissibility checks)."""
    return float(np.linalg.eigvalsh(np.asarray(mat)).min())
