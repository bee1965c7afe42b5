"""Holomorphic (Bargmann) backend for phase-exact Gaussian amplitudes.

A pure state is represented by the triple (A, b, c) of its normal-ordered
generating function

    Gamma(g) = c * exp(b^T g + g^T A g / 2),        <g*|psi> = e^{-|g|^2/2} Gamma(g),

with A complex symmetric, spectral radius < 1, and c the vacuum amplitude.
A Gaussian unitary on M modes carries a 2M x 2M triple over (out, in)
variables so that

    <a*|U|b> = exp(-(|a|^2+|b|^2)/2) c_U exp(b_U^T nu + nu^T A_U nu / 2),
    nu = (a, b).

Unitary triples compose exactly (global phase included) through a complex
Gaussian contraction; that composition is the source of truth for phases
along circuits.
"""

from dataclasses import dataclass

import numpy as np

from . import counters
from ._linalg import solve_complex
from .exceptions import DimensionMismatch
from .gates import BeamSplitter, Displace, PhaseShift, Squeeze, beamsplitter_unitary
from .symplectic import bloch_messiah, unitary_from_passive


@dataclass(frozen=True)
class StellarParams:
    """Triple (A, b, c): symmetric matrix, linear vector, scalar amplitude."""

    a: np.ndarray
    b: np.ndarray
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "a", np.array(self.a, dtype=complex))
        object.__setattr__(self, "b", np.array(self.b, dtype=complex))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def modes(self) -> int:
        return self.b.shape[0]


def _complex_basis(n: int) -> np.ndarray:
    """Matrix B with quadrature mean = B @ (alpha, conj(alpha)), interleaved rows."""
    b = np.zeros((2 * n, 2 * n), dtype=complex)
    for k in range(n):
        b[2 * k, k] = 1 / np.sqrt(2)
        b[2 * k, n + k] = 1 / np.sqrt(2)
        b[2 * k + 1, k] = -1j / np.sqrt(2)
        b[2 * k + 1, n + k] = 1j / np.sqrt(2)
    return b


def mixed_state_params(cov, mean) -> StellarParams:
    """Holomorphic parameters of a (possibly mixed) Gaussian density operator.

    Built by complexifying the Husimi quadratic form: with P = (sigma + 1)^{-1},
    the function e^{|a|^2} <a|rho|a> extends to a Gaussian in nu = (a, a*),
    giving A_rho = J - 2 B^T P B, b_rho = 2 B^T P rbar and
    c_rho = 2^n e^{-rbar^T P rbar} / sqrt(det(sigma + 1)).
    For pure rho the blocks reduce to conj(A_psi) (+) A_psi.
    """
    cov = np.asarray(cov, dtype=float)
    mean = np.asarray(mean, dtype=float)
    n = cov.shape[0] // 2
    total = cov + np.eye(2 * n)
    p = np.linalg.inv(total)
    bmat = _complex_basis(n)
    j = np.zeros((2 * n, 2 * n), dtype=complex)
    j[:n, n:] = np.eye(n)
    j[n:, :n] = np.eye(n)
    a_rho = j - 2 * bmat.T @ p @ bmat
    b_rho = 2 * bmat.T @ p @ mean
    c_rho = 2**n * np.exp(-float(mean @ p @ mean)) / np.sqrt(float(np.linalg.det(total)))
    return StellarParams(a_rho, b_rho, c_rho)


def pure_state_params(cov, mean):
    """(A, b, |c|) of the pure state with given covariance and mean.

    The modulus of the vacuum amplitude is fixed by (cov, mean); the phase is
    carried separately (by the state's reference overlap).
    """
    n = np.asarray(cov).shape[0] // 2
    rho = mixed_state_params(cov, mean)
    a = rho.a[n:, n:]
    b = rho.b[n:]
    cross = np.max(np.abs(rho.a[:n, n:])) if n else 0.0
    if cross > 1e-7:
        raise ValueError("state is not pure enough for a holomorphic ket triple")
    cmag = float(np.sqrt(max(rho.c.real, 0.0)))
    return a, b, cmag


def state_params(state) -> StellarParams:
    """Ket triple of a GaussianPure, with phase taken from its ref overlap."""
    return state.bargmann


# ---------------------------------------------------------------------------
# unitary triples


def identity_params(n: int) -> StellarParams:
    a = np.zeros((2 * n, 2 * n), dtype=complex)
    a[:n, n:] = np.eye(n)
    a[n:, :n] = np.eye(n)
    return StellarParams(a, np.zeros(2 * n, dtype=complex), 1.0 + 0.0j)


def passive_params(u: np.ndarray) -> StellarParams:
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    a = np.zeros((2 * n, 2 * n), dtype=complex)
    a[:n, n:] = u
    a[n:, :n] = u.T
    return StellarParams(a, np.zeros(2 * n, dtype=complex), 1.0 + 0.0j)


def displacement_params(delta) -> StellarParams:
    """Unitary triple of D(delta) for a complex displacement vector."""
    delta = np.atleast_1d(np.asarray(delta, dtype=complex))
    n = delta.shape[0]
    base = identity_params(n)
    b = np.concatenate([delta, -np.conj(delta)])
    c = np.exp(-0.5 * float(np.sum(np.abs(delta) ** 2)))
    return StellarParams(base.a, b, c)


def gate_params(gate, n: int) -> StellarParams:
    """Unitary triple of a primitive gate embedded in an n-mode register."""
    from .gates import check_gate_modes

    check_gate_modes(gate, n)
    if isinstance(gate, Displace):
        delta = np.zeros(n, dtype=complex)
        delta[gate.mode] = gate.alpha
        return displacement_params(delta)
    if isinstance(gate, PhaseShift):
        u = np.eye(n, dtype=complex)
        u[gate.mode, gate.mode] = np.exp(1j * gate.theta)
        return passive_params(u)
    if isinstance(gate, BeamSplitter):
        u = np.eye(n, dtype=complex)
        blk = beamsplitter_unitary(gate.theta, gate.phi)
        idx = [gate.mode1, gate.mode2]
        for i in range(2):
            for j in range(2):
                u[idx[i], idx[j]] = blk[i, j]
        return passive_params(u)
    if isinstance(gate, Squeeze):
        base = identity_params(n)
        a = base.a.copy()
        k = gate.mode
        t = np.tanh(gate.r)
        a[k, k] = -t * np.exp(1j * gate.theta)
        a[n + k, n + k] = t * np.exp(-1j * gate.theta)
        a[k, n + k] = 1 / np.cosh(gate.r)
        a[n + k, k] = 1 / np.cosh(gate.r)
        return StellarParams(a, base.b, 1.0 / np.sqrt(np.cosh(gate.r)))
    raise TypeError(f"unknown gate {gate!r}")


def _blocks(t: StellarParams):
    m = t.modes // 2
    return (
        t.a[:m, :m],
        t.a[:m, m:],
        t.a[m:, m:],
        t.b[:m],
        t.b[m:],
    )


def _log_amplitude(c: complex) -> complex:
    """log of a complex amplitude; -inf real part for an exact zero."""
    if c == 0:
        return complex(-np.inf, 0.0)
    return complex(np.log(c))


def _half_log_det_rhp(mat, label: str) -> complex:
    """log sqrt(det(mat)) on the principal branch, eigenvalue by eigenvalue."""
    lam = np.linalg.eigvals(np.asarray(mat, dtype=complex))
    if np.any(lam.real <= 0):
        from .exceptions import GsimError

        raise GsimError(f"{label} has eigenvalues off the right half-plane")
    return complex(0.5 * np.sum(np.log(lam)))


def _exp_or_zero(log_val: complex) -> complex:
    if not np.isfinite(log_val.real):
        return 0.0 + 0.0j
    return complex(np.exp(log_val))


def compose(t1: StellarParams, t2: StellarParams) -> StellarParams:
    """Triple of the operator product U1 @ U2 (U2 acts first), phase-exact.

    Contracting the shared coherent resolution of identity reduces to a
    complex Gaussian integral; with F = D1 (in-in of U1), G = B2 (out-out of
    U2) and Y = 1 - F G, the integral contributes det(Y)^{-1/2} and the
    rational blocks assembled below.
    """
    if t1.modes != t2.modes:
        raise DimensionMismatch("unitary triples act on different mode counts")
    m = t1.modes // 2
    b1, c1, d1, c1v, d1v = _blocks(t1)
    b2, c2, d2, c2v, d2v = _blocks(t2)
    y = np.eye(m) - d1 @ b2
    yi = np.linalg.inv(y)
    yit = np.linalg.inv(y.T)
    a = np.zeros((2 * m, 2 * m), dtype=complex)
    a[:m, :m] = b1 + c1 @ (b2 @ yi) @ c1.T
    a[:m, m:] = c1 @ yit @ c2
    a[m:, :m] = a[:m, m:].T
    a[m:, m:] = d2 + c2.T @ (yi @ d1) @ c2
    b = np.zeros(2 * m, dtype=complex)
    b[:m] = c1v + c1 @ yit @ (c2v + b2 @ d1v)
    b[m:] = d2v + c2.T @ yi @ (d1v + d1 @ c2v)
    # log domain: the true |c| never exceeds 1 for unitaries, but the two
    # factors can individually under/overflow for large displacements
    log_c = (
        _log_amplitude(t1.c)
        + _log_amplitude(t2.c)
        - _half_log_det_rhp(y, "composition kernel")
        + c2v @ yi @ d1v
        + 0.5 * d1v @ (b2 @ yi) @ d1v
        + 0.5 * c2v @ (yi @ d1) @ c2v
    )
    return StellarParams(a, b, _exp_or_zero(log_c))


def program_params(gates, n: int) -> StellarParams:
    """Phase-exact triple of a gate list applied left to right."""
    out = identity_params(n)
    for g in gates:
        out = compose(gate_params(g, n), out)
    return out


def unitary_from_symplectic(s, d) -> StellarParams:
    """Triple of the Gaussian unitary with quadrature action (S, d).

    Goes through the Euler decomposition, so the returned global phase is the
    deterministic one of that factorization (canonical only up to the usual
    two-valuedness); circuits that need exact phase tracking should compose
    primitive triples instead.
    """
    s = np.asarray(s, dtype=float)
    d = np.asarray(d, dtype=float)
    n = s.shape[0] // 2
    o1, z, o2 = bloch_messiah(s)
    u1 = unitary_from_passive(o1)
    u2 = unitary_from_passive(o2)
    out = passive_params(u2)
    for k in range(n):
        # diag(z, 1/z) scales q by z, i.e. squeeze parameter r = -ln z
        r = -np.log(z[2 * k, 2 * k])
        if abs(r) > 1e-14:
            out = compose(gate_params(Squeeze(k, r), n), out)
    out = compose(passive_params(u1), out)
    delta = (d[0::2] + 1j * d[1::2]) / np.sqrt(2)
    if np.any(np.abs(delta) > 0):
        out = compose(displacement_params(delta), out)
    return out


# ---------------------------------------------------------------------------
# evaluation


def sandwich(t: StellarParams, alpha, beta) -> complex:
    """Coherent matrix element <alpha*|U|beta> of a unitary triple."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    beta = np.atleast_1d(np.asarray(beta, dtype=complex))
    if alpha.shape[0] + beta.shape[0] != t.modes:
        raise DimensionMismatch("coherent labels do not match the triple")
    nu = np.concatenate([alpha, beta])
    mag = float(np.sum(np.abs(alpha) ** 2) + np.sum(np.abs(beta) ** 2))
    return _exp_or_zero(_log_amplitude(t.c) - 0.5 * mag + t.b @ nu + 0.5 * nu @ t.a @ nu)


def apply_to_state(t_u: StellarParams, t_state: StellarParams) -> StellarParams:
    """Ket triple of U|psi>, phase-exact."""
    m = t_state.modes
    if t_u.modes != 2 * m:
        raise DimensionMismatch("unitary and state mode counts disagree")
    b_u, c_u, d_u, bu_out, bu_in = _blocks(t_u)
    y = np.eye(m) - d_u @ t_state.a
    yi = solve_complex(y, np.eye(m), "state-application kernel")
    yit = yi.T
    a_new = b_u + c_u @ yit @ t_state.a @ c_u.T
    b_new = bu_out + c_u @ yit @ (t_state.b + t_state.a @ bu_in)
    log_c = (
        _log_amplitude(t_u.c)
        + _log_amplitude(t_state.c)
        - _half_log_det_rhp(y, "state-application kernel")
        + t_state.b @ yi @ bu_in
        + 0.5 * bu_in @ yit @ t_state.a @ bu_in
        + 0.5 * t_state.b @ yi @ d_u @ t_state.b
    )
    return StellarParams(a_new, b_new, _exp_or_zero(log_c))


def state_overlap(t1: StellarParams, t2: StellarParams) -> complex:
    """Phase-sensitive <psi1|psi2> from two ket triples."""
    if t1.modes != t2.modes:
        raise DimensionMismatch("states act on different mode counts")
    m = t1.modes
    f = np.conj(t1.a)
    g = t2.a
    av = np.conj(t1.b)
    bv = t2.b
    y = np.eye(m) - f @ g
    yi = solve_complex(y, np.eye(m), "overlap kernel")
    log_val = (
        _log_amplitude(np.conj(t1.c))
        + _log_amplitude(t2.c)
        - _half_log_det_rhp(y, "overlap kernel")
        + bv @ yi @ av
        + 0.5 * av @ yi.T @ g @ av
        + 0.5 * bv @ yi @ f @ bv
    )
    return _exp_or_zero(log_val)


def state_norm_squared(t: StellarParams) -> float:
    val = state_overlap(t, t)
    return float(max(val.real, 0.0))


def coherent_amplitude(t: StellarParams, xi) -> complex:
    """Heterodyne amplitude <xi|psi> of a ket triple; counted for scaling tests."""
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    if xi.shape[0] != t.modes:
        raise DimensionMismatch("outcome dimension does not match state")
    counters.tally.amplitude_evals += 1
    xb = np.conj(xi)
    log_val = (
        _log_amplitude(t.c)
        - 0.5 * float(np.sum(np.abs(xi) ** 2))
        + t.b @ xb
        + 0.5 * xb @ t.a @ xb
    )
    return _exp_or_zero(log_val)


def coherent_amplitude_batch(t: StellarParams, xis: np.ndarray) -> np.ndarray:
    """<xi|psi> for a stack of outcomes, shape (L, modes); counts L evaluations."""
    xis = np.asarray(xis, dtype=complex)
    if xis.ndim != 2 or xis.shape[1] != t.modes:
        raise DimensionMismatch("outcome stack must have shape (L, modes)")
    counters.tally.amplitude_evals += xis.shape[0]
    xb = np.conj(xis)
    log_vals = (
        _log_amplitude(t.c)
        - 0.5 * np.sum(np.abs(xis) ** 2, axis=1)
        + xb @ t.b
        + 0.5 * np.einsum("li,ij,lj->l", xb, t.a, xb)
    )
    out = np.zeros(xis.shape[0], dtype=complex)
    mask = np.isfinite(log_vals.real)
    out[mask] = np.exp(log_vals[mask])
    return out


def fock_amplitude(t: StellarParams, nphot: int) -> complex:
    """<n|psi> of a single-mode ket triple, from the series of Gamma."""
    if t.modes != 1:
        raise DimensionMismatch("fock_amplitude expects a single-mode triple")
    a = complex(t.a[0, 0])
    b = complex(t.b[0])
    total = 0.0 + 0.0j
    from math import factorial

    for k in range(nphot // 2 + 1):
        j = nphot - 2 * k
        total += (a / 2) ** k * b**j / (factorial(k) * factorial(j))
    return t.c * np.sqrt(float(factorial(nphot))) * total


def fock11_amplitude(t: StellarParams) -> complex:
    """<1,1|psi> of a two-mode ket triple: c (b1 b2 + A12)."""
    if t.modes != 2:
        raise DimensionMismatch("fock11_amplitude expects a two-mode triple")
    return complex(t.c * (t.b[0] * t.b[1] + t.a[0, 1]))


def spectral_radius(t: StellarParams) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(t.a)))) if t.modes else 0.0
