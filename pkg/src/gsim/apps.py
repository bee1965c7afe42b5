"""Application-level routines: fidelity optimizer and the grid-state table.

The two-mode target is the best Gaussian approximation to a pair of single
photons; its parameter vector is (a1, a2, r1, th1, r2, th2, phi, xi) mapping
to U(phi, xi) S(r1 e^{i th1}) (x) S(r2 e^{i th2}) D(a1) (x) D(a2) |00>,
where U(phi, xi) is the beamsplitter with mixing angle xi/2 and phase -phi.
That convention is fixed by requiring the published parameter set to
reproduce its published fidelity 1/4 and is validated against the oracle.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import stellar
from .gates import BeamSplitter, Displace, Squeeze
from .rng import stream
from .states import breeding_lower_bound, naive_grid_extent

# Published reference point for the two-mode Gaussian-vs-two-photons search.
TWO_MODE_REFERENCE_PARAMS = (0.0, 0.0, 0.8814, 0.609, 0.8814, 1.107, -1.322, 1.571)
TWO_MODE_REFERENCE_FIDELITY = 0.25

# Published grid-state extent table: squeezing -> (extent, breeding bound).
GRID_EXTENT_TABLE = {
    0.3: (2.797, 2),
    0.2: (3.969, 2),
    0.1: (7.496, 4),
    0.05: (14.562, 8),
    0.025: (28.701, 15),
    0.01: (71.126, 36),
}

_VACUUM2 = stellar.StellarParams(np.zeros((2, 2)), np.zeros(2), 1.0)
_VACUUM1 = stellar.StellarParams(np.zeros((1, 1)), np.zeros(1), 1.0)


def two_mode_fock11_fidelity(params) -> float:
    """|<1,1|G'(params)>|^2 for the parametrized two-mode Gaussian family."""
    a1, a2, r1, th1, r2, th2, phi, xi = (float(p) for p in params)
    gates = [
        Displace(0, a1),
        Displace(1, a2),
        Squeeze(0, r1, th1),
        Squeeze(1, r2, th2),
        BeamSplitter(0, 1, xi / 2.0, -phi),
    ]
    ket = stellar.apply_to_state(stellar.program_params(gates, 2), _VACUUM2)
    return float(abs(stellar.fock11_amplitude(ket)) ** 2)


def single_mode_fock1_fidelity(params) -> float:
    """|<1|D(a) S(r)|0>|^2 over real displacement and squeezing."""
    a, r = (float(p) for p in params)
    gates = [Squeeze(0, r), Displace(0, a)]
    ket = stellar.apply_to_state(stellar.program_params(gates, 1), _VACUUM1)
    return float(abs(stellar.fock_amplitude(ket, 1)) ** 2)


@dataclass(frozen=True)
class OptimizerConfig:
    bounds: tuple
    restarts: int = 32
    budget: int = 20000
    tolerance: float = 1e-9
    seed: int = 0
    threads: int = 1

    @classmethod
    def two_mode(cls, **kw) -> "OptimizerConfig":
        bounds = (
            (-1.5, 1.5),
            (-1.5, 1.5),
            (0.0, 1.6),
            (-math.pi, math.pi),
            (0.0, 1.6),
            (-math.pi, math.pi),
            (-math.pi, math.pi),
            (0.0, math.pi),
        )
        return cls(bounds=bounds, **kw)

    @classmethod
    def single_mode(cls, **kw) -> "OptimizerConfig":
        return cls(bounds=((0.0, 2.0), (0.0, 1.5)), **kw)


@dataclass(frozen=True)
class OptimizeResult:
    best_params: tuple
    best_fidelity: float
    evaluations: int
    restarts: int


def optimize_fidelity(cfg: OptimizerConfig, objective=two_mode_fock11_fidelity) -> OptimizeResult:
    """Seeded multi-restart Nelder-Mead maximization of a fidelity objective.

    Derivative-free by design (the overlap engine exposes no gradients);
    restarts run concurrently but are reduced in fixed order, so results are
    reproducible for a given seed and independent of the thread schedule.
    """
    lo = np.array([b[0] for b in cfg.bounds])
    hi = np.array([b[1] for b in cfg.bounds])
    per_restart = max(50, cfg.budget // max(cfg.restarts, 1))
    evals = 0

    def run_one(k: int):
        rng = stream(cfg.seed, k)
        x0 = lo + (hi - lo) * rng.random(len(cfg.bounds))
        res = minimize(
            lambda x: -objective(np.clip(x, lo, hi)),
            x0,
            method="Nelder-Mead",
            options={"maxfev": per_restart, "xatol": cfg.tolerance, "fatol": cfg.tolerance},
        )
        x_best = np.clip(res.x, lo, hi)
        return objective(x_best), tuple(float(v) for v in x_best), res.nfev

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(run_one, range(cfg.restarts)))
    else:
        outcomes = [run_one(k) for k in range(cfg.restarts)]

    best_f, best_x = -1.0, None
    for f, x, nfev in outcomes:
        evals += nfev
        if f > best_f:
            best_f, best_x = f, x
    return OptimizeResult(best_x, best_f, evals, cfg.restarts)


@dataclass(frozen=True)
class TableRow:
    delta: float
    naive_extent: float
    published_extent: float | None
    breeding_bound: int | None


def report_table(deltas) -> list:
    """Rows of (delta, naive extent, published extent, breeding bound).

    The naive extent applies (sum c)^2 / sum c^2 to the raw grid envelope;
    the published extents for these states follow an unresolved convention
    roughly half the naive value, so both are emitted without reconciliation.
    The breeding bound ceil(xi / 2) uses the published extent where one
    exists, else the naive one.
    """
    rows = []
    for d in deltas:
        naive = naive_grid_extent(d)
        published = GRID_EXTENT_TABLE.get(d, (None, None))[0]
        xi = published if published is not None else naive
        rows.append(TableRow(d, naive, published, breeding_lower_bound(max(xi, 1.0))))
    return rows
