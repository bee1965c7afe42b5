"""Phase-sensitive inner products between pure Gaussian states.

Two interoperable backends:

* the reference-state triple product: Tr(G0 G1 G2) factorizes into the three
  pairwise overlaps, and a closed Gaussian kernel in the covariances and
  means evaluates it with the relative phase intact;
* the holomorphic backend (`stellar`), which composes unitary triples and is
  the source of truth for phases along circuits.

Both are cross-validated against the truncated Fock oracle.
"""

from dataclasses import dataclass

import numpy as np

from . import stellar
from ._linalg import EPS_REF, solve_complex, sqrt_det_rhp
from .exceptions import DimensionMismatch, ReferenceDegenerate
from .gates import Squeeze, program_symplectic
from .gaussian import GaussianPure
from .rng import stream
from .symplectic import bloch_messiah, omega


def triple_kernel(cov1, cov2, mean1, mean2):
    """Kernel (Delta, mu_Delta) of the triple product for fixed G1, G2.

    Delta  = sigma2 - (sigma2 + i Omega) (sigma1 + sigma2)^{-1} (sigma2 - i Omega)
    mu_D   = mu2 + (sigma2 + i Omega) (sigma1 + sigma2)^{-1} (mu1 - mu2)

    Delta has positive-definite real part, which fixes the branch of every
    determinant square root downstream.
    """
    n = cov1.shape[0] // 2
    om = omega(n)
    total = cov1 + cov2
    k_right = cov2 - 1j * om
    k_left = cov2 + 1j * om
    sol = solve_complex(total.astype(complex), np.column_stack([k_right, (mean1 - mean2).astype(complex)]), "sigma1 + sigma2")
    delta = cov2 - k_left @ sol[:, :-1]
    mu_delta = mean2 + k_left @ sol[:, -1]
    return delta, mu_delta


def triple_overlap(g0: GaussianPure, g1: GaussianPure, g2: GaussianPure) -> complex:
    """Phase-sensitive product <G2|G0><G1|G2><G0|G1>.

    Normalization is anchored at T(vac, vac, vac) = 1 (the 4^n prefactor
    below makes that exact) and validated on coherent families and against
    the Fock oracle.
    """
    if not (g0.cov.shape == g1.cov.shape == g2.cov.shape):
        raise DimensionMismatch("triple product requires equal mode counts")
    n = g0.n
    delta, mu_delta = triple_kernel(g1.cov, g2.cov, g1.mean, g2.mean)
    total12 = g1.cov + g2.cov
    kernel0 = g0.cov + delta
    d12 = g1.mean - g2.mean
    d0 = g0.mean - mu_delta
    quad12 = float(d12 @ np.linalg.solve(total12, d12))
    quad0 = complex(d0 @ solve_complex(kernel0, d0, "sigma0 + Delta"))
    pref = 4.0**n / (
        np.sqrt(float(np.linalg.det(total12))) * sqrt_det_rhp(kernel0, "sigma0 + Delta")
    )
    return complex(pref * np.exp(-quad12 - quad0))


def _anchors_match(g1: GaussianPure, g2: GaussianPure) -> bool:
    a1 = getattr(g1, "anchor", None)
    a2 = getattr(g2, "anchor", None)
    if a1 is None and a2 is None:
        return True
    if a1 is None or a2 is None:
        return False
    return np.allclose(a1.cov, a2.cov) and np.allclose(a1.mean, a2.mean)


def _random_reference(states, seed: int) -> GaussianPure:
    """Seeded squeezed-coherent reference for the degeneracy fallback.

    Centered on the midpoint of the states' means so the retry can reach
    pairs that sit far from the vacuum.
    """
    from .gates import Displace

    rng = stream(seed, 0)
    n = states[0].n
    center = np.mean([g.mean for g in states], axis=0)
    gates = []
    for k in range(n):
        gates.append(Squeeze(k, rng.uniform(0.1, 0.6), rng.uniform(0, 2 * np.pi)))
    for k in range(n):
        alpha = (center[2 * k] + 1j * center[2 * k + 1]) / np.sqrt(2)
        jitter = rng.normal(scale=0.3) + 1j * rng.normal(scale=0.3)
        gates.append(Displace(k, alpha + jitter))
    op = GaussianUnitary.from_gates(gates, n)
    return propagate(GaussianPure.vacuum(n), op)


def overlap(g1: GaussianPure, g2: GaussianPure, _retried: bool = False) -> complex:
    """Phase-sensitive <G1|G2> through the shared reference state.

    If either reference overlap is below the usable floor, the pair is
    re-anchored once to a seeded random squeezed-coherent reference; a second
    degeneracy is surfaced as :class:`ReferenceDegenerate`.
    """
    if g1.cov.shape != g2.cov.shape:
        raise DimensionMismatch("states act on different mode counts")
    if not _anchors_match(g1, g2):
        raise ValueError("states are anchored to different references")
    o1, o2 = g1.ref_overlap, g2.ref_overlap
    if min(abs(o1), abs(o2)) < EPS_REF:
        if _retried:
            raise ReferenceDegenerate("state is orthogonal to the retry reference")
        if getattr(g1, "anchor", None) is not None:
            raise ReferenceDegenerate("state overlaps its reference below the floor")
        ref = _random_reference([g1, g2], seed=0x5EED)
        h1, h2 = reanchor([g1, g2], ref)
        return overlap(h1, h2, _retried=True)
    anchor = getattr(g1, "anchor", None)
    g0 = anchor if anchor is not None else GaussianPure.vacuum(g1.n)
    t = triple_overlap(g0, g1, g2)
    return complex(t / (o1 * np.conj(o2)))


def reanchor(states, g0_new: GaussianPure):
    """Re-express reference overlaps against a new pure Gaussian reference.

    Input states must be in the canonical vacuum gauge; the recomputation
    goes through the holomorphic backend, which degrades gracefully when the
    old overlaps are tiny (no division by the old gauge).
    """
    out = []
    t_ref = stellar.state_params(g0_new)
    for g in states:
        if getattr(g, "anchor", None) is not None:
            raise ValueError("reanchor expects vacuum-anchored states")
        o_new = stellar.state_overlap(t_ref, stellar.state_params(g))
        if abs(o_new) < EPS_REF:
            raise ReferenceDegenerate("a state is orthogonal to the new reference")
        out.append(GaussianPure(g.cov, g.mean, o_new, anchor=g0_new))
    return out


def ref_overlap_bloch_messiah(cov, mean) -> complex:
    """Vacuum amplitude <0|G> of the canonical Euler program for (cov, mean).

    The pure state is factored as U (prod_i S(r_i) D(beta_i)) |0> with U
    passive, and the amplitude is the per-mode product
    (1 - t_i^2)^{1/4} exp((t_i beta_i^2 - |beta_i|^2) / 2), t_i = tanh(r_i).
    The +1/4 exponent is pinned by the squeezed-vacuum amplitude
    <0|S(r)|0> = (cosh r)^{-1/2}.
    """
    cov = np.asarray(cov, dtype=float)
    mean = np.asarray(mean, dtype=float)
    n = cov.shape[0] // 2
    o1, z, o2 = bloch_messiah(cov)
    # pure covariance is itself symplectic SPD: cov = O1 Z O1^T
    rs = np.array([-0.5 * np.log(z[2 * k, 2 * k]) for k in range(n)])
    smat = np.eye(2 * n)
    for k in range(n):
        # squeeze symplectic scales q by e^{-r}
        smat[2 * k, 2 * k] = np.exp(-rs[k])
        smat[2 * k + 1, 2 * k + 1] = np.exp(rs[k])
    local_mean = np.linalg.solve(smat, o1.T @ mean)
    beta = (local_mean[0::2] + 1j * local_mean[1::2]) / np.sqrt(2)
    amp = 1.0 + 0.0j
    for k in range(n):
        t = np.tanh(rs[k])
        amp *= (1.0 - t * t) ** 0.25 * np.exp(0.5 * (t * beta[k] ** 2 - abs(beta[k]) ** 2))
    return complex(amp)


@dataclass(frozen=True)
class GaussianUnitary:
    """Gaussian unitary as (symplectic, displacement) plus its phase triple."""

    s: np.ndarray
    d: np.ndarray
    params: stellar.StellarParams

    def __post_init__(self):
        object.__setattr__(self, "s", np.array(self.s, dtype=float))
        object.__setattr__(self, "d", np.array(self.d, dtype=float))

    @property
    def n(self) -> int:
        return self.s.shape[0] // 2

    @classmethod
    def identity(cls, n: int) -> "GaussianUnitary":
        return cls(np.eye(2 * n), np.zeros(2 * n), stellar.identity_params(n))

    @classmethod
    def from_gates(cls, gates, n: int) -> "GaussianUnitary":
        """Phase-exact unitary of a gate list applied left to right."""
        s, d = program_symplectic(gates, n)
        return cls(s, d, stellar.program_params(gates, n))

    @classmethod
    def from_symplectic_displacement(cls, s, d) -> "GaussianUnitary":
        """Unitary with quadrature action (S, d); phase fixed by the Euler route."""
        return cls(s, d, stellar.unitary_from_symplectic(s, d))

    def then(self, other: "GaussianUnitary") -> "GaussianUnitary":
        """This unitary followed by ``other`` (operator product other @ self)."""
        return GaussianUnitary(
            other.s @ self.s,
            other.s @ self.d + other.d,
            stellar.compose(other.params, self.params),
        )


def propagate(g: GaussianPure, op: GaussianUnitary) -> GaussianPure:
    """Apply a Gaussian unitary to a pure state, updating the phase gauge.

    Covariance and mean follow the symplectic action; the reference overlap
    becomes <0|U|G> through the holomorphic backend, so chains of arbitrarily
    many operations keep a consistent global phase.
    """
    if op.s.shape[0] != g.cov.shape[0]:
        raise DimensionMismatch("operation dimension does not match state")
    if getattr(g, "anchor", None) is not None:
        raise ValueError("propagate expects vacuum-anchored states")
    new_cov = op.s @ g.cov @ op.s.T
    new_cov = 0.5 * (new_cov + new_cov.T)
    new_mean = op.s @ g.mean + op.d
    new_triple = stellar.apply_to_state(op.params, stellar.state_params(g))
    return GaussianPure(new_cov, new_mean, new_triple.c)


def backend_overlap_stellar(g1: GaussianPure, g2: GaussianPure) -> complex:
    """<G1|G2> via the holomorphic backend (independent of the triple product)."""
    return stellar.state_overlap(stellar.state_params(g1), stellar.state_params(g2))
