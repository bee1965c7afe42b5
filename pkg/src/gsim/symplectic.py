"""Symplectic linear algebra on quadrature space.

Quadratures are ordered (q1, p1, ..., qn, pn) with [q, p] = i, so the
symplectic form is block-diagonal in 2x2 blocks [[0, 1], [-1, 0]].
"""

import numpy as np

from ._linalg import TOL_SYMPLECTIC, TOL_DECOMP


def omega(n: int) -> np.ndarray:
    """Symplectic form for n modes in interleaved ordering."""
    out = np.zeros((2 * n, 2 * n))
    for k in range(n):
        out[2 * k, 2 * k + 1] = 1.0
        out[2 * k + 1, 2 * k] = -1.0
    return out


def is_symplectic(mat: np.ndarray, tol: float = TOL_SYMPLECTIC) -> bool:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
        return False
    om = omega(mat.shape[0] // 2)
    return bool(np.max(np.abs(mat @ om @ mat.T - om)) <= tol)


def require_symplectic(mat, tol: float = TOL_SYMPLECTIC) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if not is_symplectic(mat, tol):
        raise ValueError("matrix is not symplectic within tolerance")
    return mat


def passive_from_unitary(u: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthogonal symplectic matrix realizing the n x n mode unitary ``u``.

    Heisenberg convention: the passive Gaussian unitary with matrix u maps
    a_i -> sum_j u_ij a_j, giving interleaved 2x2 blocks
    [[Re u_ij, -Im u_ij], [Im u_ij, Re u_ij]].
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if u.shape != (n, n) or np.max(np.abs(u @ u.conj().T - np.eye(n))) > tol:
        raise ValueError("input is not unitary within tolerance")
    out = np.zeros((2 * n, 2 * n))
    re, im = u.real, u.imag
    for i in range(n):
        for j in range(n):
            out[2 * i, 2 * j] = re[i, j]
            out[2 * i, 2 * j + 1] = -im[i, j]
            out[2 * i + 1, 2 * j] = im[i, j]
            out[2 * i + 1, 2 * j + 1] = re[i, j]
    return out


def unitary_from_passive(orth: np.ndarray) -> np.ndarray:
    """Inverse of :func:`passive_from_unitary` for orthogonal symplectic input."""
    orth = np.asarray(orth, dtype=float)
    n = orth.shape[0] // 2
    u = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            u[i, j] = orth[2 * i, 2 * j] + 1j * orth[2 * i + 1, 2 * j]
    return u


def bloch_messiah(s: np.ndarray, tol: float = TOL_DECOMP):
    """Euler decomposition S = O1 @ Z @ O2 of a real symplectic matrix.

    O1, O2 are orthogonal symplectic and Z = diag(z1, 1/z1, ..., zn, 1/zn)
    with z_i >= 1.  Uses the polar decomposition S = P O with P symmetric
    positive-definite symplectic; eigenvalues of P come in (z, 1/z) pairs
    whose eigenvectors are exchanged by the symplectic form, so picking the
    z >= 1 eigenvectors v and partners -Omega v builds O1 directly.
    """
    s = require_symplectic(s)
    n = s.shape[0] // 2
    om = omega(n)

    # polar part P = sqrt(S S^T)
    w, q = np.linalg.eigh(s @ s.T)
    w = np.clip(w, 1e-300, None)
    p = (q * np.sqrt(w)) @ q.T

    lam, vec = np.linalg.eigh(p)
    order = np.argsort(lam)[::-1]
    pairs = []
    for k in order:
        if len(pairs) == n or lam[k] < 1.0 - 1e-8:
            break
        v = vec[:, k].copy()
        # Gram-Schmidt against already-chosen planes; removes the -Omega v
        # partners inside (near-)unit eigenvalue clusters.
        for pv, pw, _ in pairs:
            v -= pv * (pv @ v) + pw * (pw @ v)
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            continue
        v /= nv
        pairs.append((v, -om @ v, max(float(lam[k]), 1.0)))
    if len(pairs) != n:
        raise ValueError("failed to pair symplectic eigenvectors")

    o1 = np.empty((2 * n, 2 * n))
    z = np.eye(2 * n)
    for i, (v, w_, zi) in enumerate(pairs):
        o1[:, 2 * i] = v
        o1[:, 2 * i + 1] = w_
        z[2 * i, 2 * i] = zi
        z[2 * i + 1, 2 * i + 1] = 1.0 / zi
    o2 = np.diag(1.0 / np.diag(z)) @ o1.T @ s
    err = np.max(np.abs(o1 @ z @ o2 - s))
    if err > max(tol, 1e-9 * max(1.0, float(np.max(np.abs(s))))):
        raise ValueError(f"Bloch-Messiah reconstruction error {err:.3g} exceeds tolerance")
    return o1, z, o2


def factor_two_mode_unitary(u: np.ndarray):
    """Factor a 2x2 unitary as diag phases x real beamsplitter x diag phases.

    Returns (chi_left, theta, chi_right) with
    u = diag(e^{i chi_left}) @ [[cos t, sin t], [-sin t, cos t]] @ diag(e^{i chi_right}).
    Used by the Fock oracle to apply arbitrary passive 2-mode unitaries with a
    cached real-beamsplitter eigenbasis.
    """
    u = np.asarray(u, dtype=complex)
    ct = min(abs(u[0, 0]), 1.0)
    theta = float(np.arccos(ct))
    st = np.sin(theta)
    if st < 1e-12:
        chi_l = np.array([np.angle(u[0, 0]), np.angle(u[1, 1])])
        chi_r = np.zeros(2)
        return chi_l, 0.0, chi_r
    if ct < 1e-12:
        chi_l = np.array([np.angle(u[0, 1]), np.angle(-u[1, 0])])
        chi_r = np.zeros(2)
        return chi_l, np.pi / 2, chi_r
    p00, p01, p10 = np.angle(u[0, 0]), np.angle(u[0, 1]), np.angle(u[1, 0])
    chi1 = 0.0
    chi3 = p00
    chi4 = p01
    chi2 = p10 + np.pi - chi3
    return np.array([chi1, chi2]), theta, np.array([chi3, chi4])


def haar_unitary(n: int, rng) -> np.ndarray:
    """Haar-random n x n unitary (scipy's sampler rejects n = 1)."""
    if n == 1:
        return np.array([[np.exp(1j * rng.uniform(0, 2 * np.pi))]])
    from scipy.stats import unitary_group

    return unitary_group.rvs(n, random_state=rng)


def random_symplectic(n: int, rng, r_max: float = 1.5) -> np.ndarray:
    """Random symplectic via Haar passives around random single-mode squeezers."""
    u1 = haar_unitary(n, rng)
    u2 = haar_unitary(n, rng)
    z = np.eye(2 * n)
    for k in range(n):
        zk = np.exp(rng.uniform(-r_max, r_max))
        z[2 * k, 2 * k] = zk
        z[2 * k + 1, 2 * k + 1] = 1.0 / zk
    return passive_from_unitary(u1) @ z @ passive_from_unitary(u2)
