import numpy as np
import pytest

from gsim import fock
from gsim.exceptions import DimensionMismatch, IllConditioned
from gsim.gates import BeamSplitter, Displace, Squeeze, gate_symplectic, program_symplectic
from gsim.gaussian import (
    GaussianChannel,
    GaussianMixed,
    GaussianPure,
    GeneralDyne,
    apply_channel,
    apply_symplectic,
    check_admissible,
    compose_channels,
    condition_on_generaldyne,
    displace,
    fidelity_pure,
    generaldyne_density,
    homodyne_density_q,
    partial_trace,
    tensor,
)
from gsim.symplectic import random_symplectic

from conftest import engine_state


def two_mode_squeezer(r):
    """Symplectic of the standard two-mode squeezer, built from primitives."""
    gates = [
        BeamSplitter(0, 1, np.pi / 4, 0.0),
        Squeeze(0, r, 0.0),
        Squeeze(1, -r, 0.0),
        BeamSplitter(0, 1, -np.pi / 4, 0.0),
    ]
    s, _ = program_symplectic(gates, 2)
    return s


class TestDisplace:
    def test_zero_shift_identity(self):
        vac = GaussianMixed.vacuum(1)
        out = displace(vac, np.zeros(2))
        assert np.allclose(out.mean, 0) and np.allclose(out.cov, np.eye(2))

    def test_vacuum_to_coherent_with_fock_check(self):
        vac = GaussianPure.vacuum(1)
        out = displace(vac, np.array([np.sqrt(2), 0.0]))
        assert np.allclose(out.mean, [np.sqrt(2), 0.0])
        assert np.allclose(out.cov, np.eye(2))
        # oracle: <1|D(1)|0> = e^{-1/2}
        fv = fock.oracle_state([Displace(0, 1.0)], 1, cutoff=40)
        assert abs(fv.amplitudes[1] - np.exp(-0.5)) < 1e-12
        assert abs(out.ref_overlap - np.exp(-0.5)) < 1e-12

    def test_inverse_displacement(self):
        coh = GaussianPure.coherent([1.0])
        back = displace(coh, np.array([-np.sqrt(2), 0.0]))
        assert np.allclose(back.mean, 0, atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            displace(GaussianMixed.vacuum(1), np.zeros(4))


class TestSymplecticAction:
    def test_identity(self):
        vac = GaussianMixed.vacuum(1)
        out = apply_symplectic(vac, np.eye(2))
        assert np.allclose(out.cov, np.eye(2))

    def test_single_mode_squeeze_cov(self):
        z = np.sqrt(3.0)
        out = apply_symplectic(GaussianMixed.vacuum(1), np.diag([z, 1 / z]))
        assert np.allclose(out.cov, np.diag([3.0, 1 / 3.0]))

    def test_passive_fixes_two_mode_vacuum(self):
        s, _ = gate_symplectic(BeamSplitter(0, 1, np.pi / 4, 0.3), 2)
        out = apply_symplectic(GaussianMixed.vacuum(2), s)
        assert np.allclose(out.cov, np.eye(4), atol=1e-12)

    def test_rejects_nonsymplectic(self):
        with pytest.raises(ValueError):
            apply_symplectic(GaussianMixed.vacuum(1), np.diag([2.0, 1.0]))

    def test_purity_preserved_under_random_symplectics(self, rng):
        from gsim.gaussian import is_pure_cov

        for _ in range(50):
            n = int(rng.integers(1, 4))
            s = random_symplectic(n, rng)
            out = apply_symplectic(GaussianMixed.vacuum(n), s)
            assert is_pure_cov(out.cov)
            check_admissible(out.cov)


class TestTensorPartialTrace:
    def test_vacua(self):
        both = tensor(GaussianMixed.vacuum(1), GaussianMixed.vacuum(1))
        assert both.cov.shape == (4, 4)
        reduced = partial_trace(both, [0])
        assert np.allclose(reduced.cov, np.eye(2))

    def test_two_mode_squeezed_reduction_is_thermal(self):
        r = 0.5
        s = two_mode_squeezer(r)
        state = apply_symplectic(GaussianMixed.vacuum(2), s)
        reduced = partial_trace(state, [0])
        assert np.allclose(reduced.cov, np.cosh(2 * r) * np.eye(2), atol=1e-12)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            partial_trace(GaussianMixed.vacuum(2), [5])


class TestChannels:
    def test_identity_channel(self):
        ch = GaussianChannel(np.eye(2), np.zeros((2, 2)), np.zeros(2))
        out = apply_channel(GaussianMixed.vacuum(1), ch)
        assert np.allclose(out.cov, np.eye(2))

    def test_classical_noise(self):
        nbar = 0.8
        ch = GaussianChannel(np.eye(2), 2 * nbar * np.eye(2), np.zeros(2))
        out = apply_channel(GaussianMixed.vacuum(1), ch)
        assert np.allclose(out.cov, (1 + 2 * nbar) * np.eye(2))

    def test_vacuum_replacement(self):
        ch = GaussianChannel(np.zeros((2, 2)), np.eye(2), np.zeros(2))
        out = apply_channel(GaussianMixed(3 * np.eye(2), np.array([1.0, -2.0])), ch)
        assert np.allclose(out.cov, np.eye(2)) and np.allclose(out.mean, 0)

    def test_inadmissible_channel_rejected(self):
        with pytest.raises(ValueError):
            GaussianChannel(np.eye(2), np.zeros((2, 2)) * 0.0 - 0.1 * np.eye(2), np.zeros(2))

    def test_composition_law(self, rng):
        for _ in range(20):
            x1 = random_symplectic(1, rng) * 0.7
            x2 = random_symplectic(1, rng) * 0.8
            c1 = GaussianChannel(x1, 2.0 * np.eye(2), rng.normal(size=2))
            c2 = GaussianChannel(x2, 1.5 * np.eye(2), rng.normal(size=2))
            rho = GaussianMixed((1 + 2 * 0.3) * np.eye(2), rng.normal(size=2))
            seq = apply_channel(apply_channel(rho, c1), c2)
            combined = apply_channel(rho, compose_channels(c1, c2))
            assert np.max(np.abs(seq.cov - combined.cov)) < 1e-12
            assert np.max(np.abs(seq.mean - combined.mean)) < 1e-12


class TestGeneralDyne:
    def test_vacuum_heterodyne_origin(self):
        p = generaldyne_density(GaussianMixed.vacuum(1), GeneralDyne.heterodyne([0]), np.zeros(2))
        assert abs(p - 1 / (2 * np.pi)) < 1e-14

    def test_density_normalizes_on_grid(self):
        state = GaussianMixed(np.diag([0.5, 2.0]), np.array([0.4, -0.3]))
        meas = GeneralDyne.heterodyne([0])
        xs = np.linspace(-8, 8, 321)
        grid = np.array(
            [[generaldyne_density(state, meas, np.array([x, y])) for y in xs] for x in xs]
        )
        from scipy.integrate import simpson

        total = simpson(simpson(grid, x=xs), x=xs)
        assert abs(total - 1.0) < 1e-6

    def test_max_density_at_mean(self):
        mean = np.array([1.0, 2.0])
        state = GaussianMixed(np.eye(2), mean)
        meas = GeneralDyne.heterodyne([0])
        p0 = generaldyne_density(state, meas, mean)
        assert abs(p0 - 1 / (np.pi * 2.0)) < 1e-14
        assert p0 >= generaldyne_density(state, meas, mean + 0.5)

    def test_gaussian_decay_from_mean(self):
        state = GaussianMixed.vacuum(1)
        meas = GeneralDyne.heterodyne([0])
        r = np.array([1.1, -0.7])
        ratio = generaldyne_density(state, meas, r) / generaldyne_density(state, meas, np.zeros(2))
        assert abs(ratio - np.exp(-(r @ r) / 2)) < 1e-12


class TestConditioning:
    def test_product_state_unchanged(self):
        state = tensor(GaussianMixed(np.diag([0.4, 2.5]), np.array([0.3, 0.1])), GaussianMixed.vacuum(1))
        out = condition_on_generaldyne(state, GeneralDyne.heterodyne([1]), np.array([0.9, -0.4]))
        assert np.allclose(out.cov, np.diag([0.4, 2.5]))
        assert np.allclose(out.mean, [0.3, 0.1])

    def test_zero_innovation_keeps_mean(self):
        r = 0.5
        s = two_mode_squeezer(r)
        state = apply_symplectic(GaussianMixed(np.eye(4), np.array([0.2, 0.0, -0.1, 0.4])), s)
        out = condition_on_generaldyne(state, GeneralDyne.heterodyne([1]), state.mean[2:])
        assert np.allclose(out.mean, state.mean[:2], atol=1e-12)

    def test_two_mode_squeezed_conditioning_vs_oracle(self):
        r = 0.5
        gates = [
            BeamSplitter(0, 1, np.pi / 4, 0.0),
            Squeeze(0, r, 0.0),
            Squeeze(1, -r, 0.0),
            BeamSplitter(0, 1, -np.pi / 4, 0.0),
        ]
        state = apply_symplectic(GaussianMixed.vacuum(2), program_symplectic(gates, 2)[0])
        cond = condition_on_generaldyne(state, GeneralDyne.heterodyne([1]), np.zeros(2))
        # strictly below the thermal reduction
        thermal = np.cosh(2 * r) * np.eye(2)
        assert np.all(np.linalg.eigvalsh(thermal - cond.cov) > 0)
        # oracle conditional state, cutoff 40
        fv = fock.oracle_state(gates, 2, cutoff=40)
        fv_cond = fock.condition_on_coherent(fv, 1, 0.0)
        nsq = fv_cond.norm_squared()
        for alpha in (0.0, 0.4 + 0.2j, -0.6j):
            probe = GaussianPure.coherent([alpha])
            engine_val = fidelity_pure(cond, probe)
            oracle_val = abs(fock.coherent_amplitude(fv_cond, [alpha])) ** 2 / nsq
            assert abs(engine_val - oracle_val) < 1e-8

    def test_singular_measurement_flagged(self):
        # 45-degree-rotated extreme squeezing defeats diagonal equilibration,
        # so the conditioning solve must refuse rather than return garbage
        c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
        rot = np.array([[c, -s], [s, c]])
        cov_m = rot @ np.diag([1e-20, 1e20]) @ rot.T
        with pytest.raises(IllConditioned):
            condition_on_generaldyne(
                GaussianMixed.vacuum(2), GeneralDyne(cov_m, (1,)), np.zeros(2)
            )


class TestHomodyne:
    def test_vacuum_q_density(self):
        state = GaussianMixed.vacuum(1)
        xs = np.linspace(-6, 6, 2001)
        vals = np.array([homodyne_density_q(state, 0, x) for x in xs])
        assert abs(homodyne_density_q(state, 0, 0.0) - 1 / np.sqrt(np.pi)) < 1e-14
        from scipy.integrate import simpson

        assert abs(simpson(vals, x=xs) - 1.0) < 1e-9

    def test_finite_z_limit_matches_ideal(self):
        state = GaussianMixed(np.diag([0.7, 1.9]), np.array([0.3, -0.2]))
        meas = GeneralDyne.homodyne_q([0])
        z = 1e6
        for x in (0.0, 0.5, -1.2):
            two_d = generaldyne_density(state, meas, np.array([x, 0.0]))
            ideal = homodyne_density_q(state, 0, x)
            assert abs(two_d * np.sqrt(np.pi) * z - ideal) < 1e-5 * ideal + 1e-12


class TestFidelity:
    def test_vacuum_self(self):
        assert fidelity_pure(GaussianMixed.vacuum(1), GaussianPure.vacuum(1)) == pytest.approx(1.0)

    def test_vacuum_vs_coherent(self):
        for alpha in (0.5, 1.0, 1.5 - 0.5j):
            coh = GaussianPure.coherent([alpha])
            val = fidelity_pure(GaussianMixed.vacuum(1), coh)
            assert abs(val - np.exp(-abs(alpha) ** 2)) < 1e-12

    def test_optimal_seed_fock_projection(self):
        # |<1|a*, xi*>|^2 from the oracle equals the published optimum
        gates = [Squeeze(0, np.log(np.sqrt(3))), Displace(0, np.sqrt(2 / 3))]
        fv = fock.oracle_state(gates, 1, cutoff=60)
        assert abs(abs(fv.amplitudes[1]) ** 2 - 0.47789) < 1e-4

    def test_magnitude_matches_overlap(self, rng):
        from conftest import random_pure_program
        from gsim.phase import overlap

        for _ in range(20):
            g1 = engine_state(random_pure_program(1, rng), 1)
            g2 = engine_state(random_pure_program(1, rng), 1)
            f = fidelity_pure(g1.as_mixed(), g2)
            assert abs(abs(overlap(g1, g2)) ** 2 - f) < 1e-10


def test_admissibility_rejects_bad_covariance():
    with pytest.raises(ValueError):
        GaussianMixed(0.5 * np.eye(2), np.zeros(2))
    check_admissible(np.eye(2))


def test_pure_state_requires_pure_covariance():
    with pytest.raises(ValueError):
        GaussianPure(2 * np.eye(2), np.zeros(2), 1.0)


def test_ref_overlap_magnitude_validated():
    with pytest.raises(ValueError):
        GaussianPure(np.eye(2), np.zeros(2), 0.5)


def test_gate_mode_bounds_enforced():
    from gsim.gates import gate_symplectic
    from gsim import stellar

    with pytest.raises(ValueError):
        gate_symplectic(Displace(-1, 0.5), 2)
    with pytest.raises(ValueError):
        gate_symplectic(Squeeze(2, 0.3), 2)
    with pytest.raises(ValueError):
        stellar.gate_params(BeamSplitter(0, 0, 0.3), 2)
