"""Covariance-matrix formalism for Gaussian states, channels and measurements.

Conventions (fixed repo-wide and validated against the Fock oracle):

* quadrature ordering (q1, p1, ..., qn, pn) with [q, p] = i;
* anticommutator covariance, so the vacuum has sigma = identity;
* a coherent state of amplitude a has mean sqrt(2) (Re a, Im a);
* general-dyne outcome densities are over the quadrature outcome vector;
  the coherent-POVM density over d^2n(alpha) used by the Born estimators
  differs by the Jacobian factor 2^n (see `simulator.exact_born`).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import stellar
from ._linalg import TOL_PSD, TOL_PURE, inv_psd, min_eig_hermitian, solve_psd
from .exceptions import DimensionMismatch
from .symplectic import omega, require_symplectic

Z_HOMODYNE = 1e6  # finite-z stand-in for the ideal quadrature measurement


def check_admissible(cov: np.ndarray, tol: float = TOL_PSD) -> None:
    """Raise unless sigma + i Omega >= -tol (uncertainty-relation check)."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    if cov.shape != (2 * n, 2 * n) or not np.allclose(cov, cov.T, atol=1e-8):
        raise ValueError("covariance must be symmetric with even dimension")
    if min_eig_hermitian(cov + 1j * omega(n)) < -tol:
        raise ValueError("covariance violates sigma + i Omega >= 0")


def is_pure_cov(cov: np.ndarray, tol: float = TOL_PURE) -> bool:
    n = np.asarray(cov).shape[0] // 2
    om = omega(n)
    return bool(np.max(np.abs(cov @ om @ cov.T - om)) <= tol)


@dataclass(frozen=True)
class GaussianMixed:
    """Gaussian state given by covariance and mean; may be mixed."""

    cov: np.ndarray
    mean: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cov", np.array(self.cov, dtype=float))
        object.__setattr__(self, "mean", np.array(self.mean, dtype=float))
        if self.cov.shape[0] != self.mean.shape[0]:
            raise DimensionMismatch("covariance and mean sizes disagree")
        check_admissible(self.cov)

    @property
    def n(self) -> int:
        return self.cov.shape[0] // 2

    @classmethod
    def vacuum(cls, n: int) -> "GaussianMixed":
        return cls(np.eye(2 * n), np.zeros(2 * n))

    @classmethod
    def thermal(cls, n_mean: float) -> "GaussianMixed":
        return cls((1.0 + 2.0 * n_mean) * np.eye(2), np.zeros(2))


@dataclass(frozen=True)
class GaussianPure:
    """Pure Gaussian state extended with its reference overlap.

    ``ref_overlap`` is the phase-sensitive amplitude <G0|G> against the fixed
    reference G0 (the vacuum unless ``anchor`` is set); together with
    covariance and mean it pins the global phase of the ket.  Its modulus is
    redundant with (cov, mean, anchor) and is verified at construction.
    """

    cov: np.ndarray
    mean: np.ndarray
    ref_overlap: complex
    anchor: "GaussianPure | None" = None

    def __post_init__(self):
        object.__setattr__(self, "cov", np.array(self.cov, dtype=float))
        object.__setattr__(self, "mean", np.array(self.mean, dtype=float))
        object.__setattr__(self, "ref_overlap", complex(self.ref_overlap))
        check_admissible(self.cov)
        if not is_pure_cov(self.cov):
            raise ValueError("covariance is not pure (sigma Omega sigma^T != Omega)")
        self._check_ref_magnitude()

    def _check_ref_magnitude(self, tol: float = 1e-7):
        n = self.n
        if self.anchor is None:
            ref_cov, ref_mean = np.eye(2 * n), np.zeros(2 * n)
        else:
            ref_cov, ref_mean = self.anchor.cov, self.anchor.mean
        total = self.cov + ref_cov
        d = self.mean - ref_mean
        fid = 2**n * np.exp(-float(d @ np.linalg.solve(total, d))) / np.sqrt(
            float(np.linalg.det(total))
        )
        mag = np.sqrt(max(fid, 0.0))
        if mag > 1e-150 and abs(abs(self.ref_overlap) - mag) > tol * max(mag, 1e-30):
            raise ValueError(
                "ref_overlap modulus disagrees with the closed-form overlap "
                f"({abs(self.ref_overlap):.3e} vs {mag:.3e})"
            )

    @property
    def n(self) -> int:
        return self.cov.shape[0] // 2

    @cached_property
    def bargmann(self):
        """Holomorphic triple (A, b, c) of the ket, with c = ref_overlap."""
        if self.anchor is not None:
            raise ValueError("holomorphic triple requires the vacuum gauge")
        a, b, _ = stellar.pure_state_params(self.cov, self.mean)
        return stellar.StellarParams(a, b, self.ref_overlap)

    @classmethod
    def vacuum(cls, n: int) -> "GaussianPure":
        return cls(np.eye(2 * n), np.zeros(2 * n), 1.0 + 0.0j)

    @classmethod
    def coherent(cls, alpha) -> "GaussianPure":
        """Tensor product of coherent states, one amplitude per mode."""
        alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
        n = alpha.shape[0]
        mean = np.empty(2 * n)
        mean[0::2] = np.sqrt(2) * alpha.real
        mean[1::2] = np.sqrt(2) * alpha.imag
        o = np.exp(-0.5 * float(np.sum(np.abs(alpha) ** 2)))
        return cls(np.eye(2 * n), mean, o)

    def as_mixed(self) -> GaussianMixed:
        return GaussianMixed(self.cov, self.mean)


@dataclass(frozen=True)
class GaussianChannel:
    """Gaussian CPTP map: mean -> X mean + D, cov -> X cov X^T + Y."""

    x: np.ndarray
    y: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.array(self.x, dtype=float))
        object.__setattr__(self, "y", np.array(self.y, dtype=float))
        object.__setattr__(self, "d", np.array(self.d, dtype=float))
        n = self.x.shape[0] // 2
        om = omega(n)
        if min_eig_hermitian(self.y + 1j * om - 1j * self.x @ om @ self.x.T) < -TOL_PSD:
            raise ValueError("channel violates Y + i Omega >= i X Omega X^T")


@dataclass(frozen=True)
class GeneralDyne:
    """General-dyne measurement with POVM seed covariance on selected modes."""

    cov_m: np.ndarray
    modes: tuple

    def __post_init__(self):
        object.__setattr__(self, "cov_m", np.array(self.cov_m, dtype=float))
        object.__setattr__(self, "modes", tuple(self.modes))
        check_admissible(self.cov_m)

    @classmethod
    def heterodyne(cls, modes) -> "GeneralDyne":
        modes = tuple(modes)
        return cls(np.eye(2 * len(modes)), modes)

    @classmethod
    def homodyne_q(cls, modes, z: float = Z_HOMODYNE) -> "GeneralDyne":
        """Finite-z member of the homodyne family (measures q for large z)."""
        modes = tuple(modes)
        blocks = [np.diag([1.0 / z**2, z**2]) for _ in modes]
        from scipy.linalg import block_diag

        return cls(block_diag(*blocks), modes)


def _mode_slices(modes):
    idx = []
    for m in modes:
        idx.extend([2 * m, 2 * m + 1])
    return np.asarray(idx, dtype=int)


def displace(state, shift):
    """Shift the mean by ``shift`` (quadrature units); covariance unchanged.

    For :class:`GaussianPure` the reference overlap is re-derived through the
    phase engine so the global phase stays consistent with a true application
    of the displacement unitary.
    """
    shift = np.asarray(shift, dtype=float)
    if shift.shape[0] != state.cov.shape[0]:
        raise DimensionMismatch("shift dimension does not match state")
    if isinstance(state, GaussianPure):
        from .phase import GaussianUnitary, propagate

        op = GaussianUnitary.from_symplectic_displacement(np.eye(shift.shape[0]), shift)
        return propagate(state, op)
    return GaussianMixed(state.cov, state.mean + shift)


def apply_symplectic(state, s):
    """Apply a symplectic quadrature map; pure states keep a consistent phase."""
    s = require_symplectic(s)
    if s.shape[0] != state.cov.shape[0]:
        raise DimensionMismatch("symplectic dimension does not match state")
    if isinstance(state, GaussianPure):
        from .phase import GaussianUnitary, propagate

        op = GaussianUnitary.from_symplectic_displacement(s, np.zeros(s.shape[0]))
        return propagate(state, op)
    return GaussianMixed(s @ state.cov @ s.T, s @ state.mean)


def tensor(a, b):
    """Direct sum of two Gaussian states (modes of ``b`` appended)."""
    cov = np.block(
        [
            [a.cov, np.zeros((a.cov.shape[0], b.cov.shape[0]))],
            [np.zeros((b.cov.shape[0], a.cov.shape[0])), b.cov],
        ]
    )
    mean = np.concatenate([a.mean, b.mean])
    if isinstance(a, GaussianPure) and isinstance(b, GaussianPure):
        return GaussianPure(cov, mean, a.ref_overlap * b.ref_overlap)
    return GaussianMixed(cov, mean)


def partial_trace(state, keep) -> GaussianMixed:
    """Reduce to the modes in ``keep`` (cross-correlations dropped)."""
    keep = tuple(keep)
    if any(m < 0 or m >= state.cov.shape[0] // 2 for m in keep):
        raise IndexError("mode index out of range")
    idx = _mode_slices(keep)
    return GaussianMixed(state.cov[np.ix_(idx, idx)], state.mean[idx])


def apply_channel(state: GaussianMixed, ch: GaussianChannel) -> GaussianMixed:
    if ch.x.shape[0] != state.cov.shape[0]:
        raise DimensionMismatch("channel dimension does not match state")
    return GaussianMixed(ch.x @ state.cov @ ch.x.T + ch.y, ch.x @ state.mean + ch.d)


def compose_channels(c1: GaussianChannel, c2: GaussianChannel) -> GaussianChannel:
    """Channel equal to applying c1 first, then c2."""
    return GaussianChannel(c2.x @ c1.x, c2.x @ c1.y @ c2.x.T + c2.y, c2.x @ c1.d + c2.d)


def generaldyne_density(state, meas: GeneralDyne, outcome) -> float:
    """Outcome density of a general-dyne measurement on the measured modes.

    Normalized over the quadrature outcome vector r_m:
    exp(-(r_m - rbar)^T (sigma + sigma_m)^{-1} (r_m - rbar))
    / (pi^m sqrt(det(sigma + sigma_m))).
    """
    outcome = np.asarray(outcome, dtype=float)
    idx = _mode_slices(meas.modes)
    if outcome.shape[0] != idx.shape[0]:
        raise DimensionMismatch("outcome dimension does not match measured modes")
    sub_cov = state.cov[np.ix_(idx, idx)]
    sub_mean = state.mean[idx]
    total = sub_cov + meas.cov_m
    diff = outcome - sub_mean
    expo = -float(diff @ solve_psd(total, diff, "sigma + sigma_m"))
    m = len(meas.modes)
    det = float(np.linalg.det(total))
    return float(np.exp(expo) / (np.pi**m * np.sqrt(det)))


def homodyne_density_q(state, mode: int, outcome: float) -> float:
    """Exact ideal-limit density for measuring the q quadrature of one mode."""
    var = state.cov[2 * mode, 2 * mode]
    mu = state.mean[2 * mode]
    return float(np.exp(-((outcome - mu) ** 2) / var) / np.sqrt(np.pi * var))


def condition_on_generaldyne(state, meas: GeneralDyne, outcome):
    """Conditional state of the unmeasured modes after a general-dyne outcome."""
    outcome = np.asarray(outcome, dtype=float)
    n = state.cov.shape[0] // 2
    meas_modes = tuple(meas.modes)
    keep_modes = tuple(m for m in range(n) if m not in meas_modes)
    ia = _mode_slices(keep_modes)
    ib = _mode_slices(meas_modes)
    if outcome.shape[0] != ib.shape[0]:
        raise DimensionMismatch("outcome dimension does not match measured modes")
    cov_a = state.cov[np.ix_(ia, ia)]
    cov_b = state.cov[np.ix_(ib, ib)]
    cov_ab = state.cov[np.ix_(ia, ib)]
    total = cov_b + meas.cov_m
    gain = cov_ab @ inv_psd(total, "sigma_B + sigma_m")
    mean_a = state.mean[ia] - gain @ (outcome - state.mean[ib])
    new_cov = cov_a - gain @ cov_ab.T
    new_cov = 0.5 * (new_cov + new_cov.T)
    return GaussianMixed(new_cov, mean_a)


def fidelity_pure(rho, phi) -> float:
    """Fidelity <phi|rho|phi> between a Gaussian state and a pure Gaussian."""
    if rho.cov.shape != phi.cov.shape:
        raise DimensionMismatch("states act on different mode counts")
    n = rho.cov.shape[0] // 2
    total = rho.cov + phi.cov
    d = rho.mean - phi.mean
    expo = -float(d @ solve_psd(total, d, "sigma_0 + sigma_1"))
    val = 2**n * np.exp(expo) / np.sqrt(float(np.linalg.det(total)))
    return float(min(max(val, 0.0), 1.0 + 1e-12))
