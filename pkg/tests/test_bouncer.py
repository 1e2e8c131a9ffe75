"""Quantum bouncer tests: gravitational levels against the Airy-function
oracle, overlap integrals against the virial theorem, shift and reach logic."""

import math

import numpy as np
import pytest
from scipy.special import ai_zeros

from chamneut import (
    BOUNCER_SCALES,
    BouncerPotentialSpec,
    ChameleonParams,
    ReachOutsideWindow,
    coupling_bound,
    find_level,
    overlap,
    perturbative_shift,
    solve_spectrum,
    transition_shift,
)

AIRY_EPS = -ai_zeros(6)[0]  # 2.33811, 4.08795, 5.52056, 6.78671, 7.94413, 9.02265


class TestScales:
    def test_gravitational_length_and_energy(self):
        assert BOUNCER_SCALES.z0_um == pytest.approx(5.87, rel=1e-3)
        assert BOUNCER_SCALES.e0_pev == pytest.approx(0.6016, rel=1e-3)

    def test_first_level_energy(self):
        e1 = AIRY_EPS[0] * BOUNCER_SCALES.e0_pev
        assert e1 == pytest.approx(1.4067, rel=1e-3)


class TestPotentialSpec:
    def test_pure_gravity_is_linear(self):
        pot = BouncerPotentialSpec.pure_gravity()
        assert pot.weight == 0.0
        z = np.array([0.0, 1.0, 2.0])
        v = pot.energy_pev(z)
        assert v[0] == 0.0
        assert v[2] == pytest.approx(2.0 * v[1], rel=1e-12)

    def test_chameleon_exponent(self):
        for n in (1, 2, 3, 4):
            pot = BouncerPotentialSpec.from_params(ChameleonParams(n=n, beta=1e9))
            assert pot.alpha_n == pytest.approx(2.0 / (2.0 + n))
            assert pot.weight > 0.0

    def test_weight_linear_in_beta(self):
        w1 = BouncerPotentialSpec.from_params(ChameleonParams(n=2, beta=1e9)).weight
        w2 = BouncerPotentialSpec.from_params(ChameleonParams(n=2, beta=3e9)).weight
        assert w2 == pytest.approx(3.0 * w1, rel=1e-12)

    def test_rejects_negative_height(self):
        with pytest.raises(ValueError):
            BouncerPotentialSpec.pure_gravity().energy_pev(-1.0)


class TestFindLevel:
    @pytest.mark.parametrize("k", [1, 2, 3, 6])
    def test_gravity_levels_match_airy_zeros(self, k):
        pot = BouncerPotentialSpec.pure_gravity()
        e = find_level(pot, k, tol_pev=1e-7 * BOUNCER_SCALES.e0_pev)
        assert e / BOUNCER_SCALES.e0_pev == pytest.approx(AIRY_EPS[k - 1], rel=1e-5)

    def test_chameleon_raises_levels(self):
        pot = BouncerPotentialSpec.from_params(ChameleonParams(n=2, beta=1e9))
        e_cham = find_level(pot, 1)
        e_grav = find_level(BouncerPotentialSpec.pure_gravity(), 1)
        assert e_cham > e_grav

    def test_rejects_bad_index_and_tolerance(self):
        pot = BouncerPotentialSpec.pure_gravity()
        with pytest.raises(ValueError):
            find_level(pot, 0)
        with pytest.raises(ValueError):
            find_level(pot, 1, tol_pev=-1.0)


class TestOverlap:
    def test_normalization(self):
        # alpha = 0 reduces the matrix element to <psi|psi> / <psi|psi> = 1
        assert overlap(1, 0.0) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_virial_identity(self, k):
        # For the linear potential, <zeta> = 2 eps_k / 3 exactly.
        assert overlap(k, 1.0) == pytest.approx(2.0 * AIRY_EPS[k - 1] / 3.0, rel=5e-4)

    def test_monotone_in_level(self):
        # higher states live farther from the mirror
        vals = [overlap(k, 0.5) for k in (1, 2, 3)]
        assert vals[0] < vals[1] < vals[2]

    def test_rejects_negative_alpha(self):
        with pytest.raises(ValueError):
            overlap(1, -0.5)


class TestShifts:
    def test_perturbative_matches_exact_at_small_coupling(self):
        pot = BouncerPotentialSpec.from_params(ChameleonParams(n=2, beta=1e8))
        d_pert = transition_shift(pot, exact=False)
        d_exact = transition_shift(pot, exact=True)
        assert d_pert == pytest.approx(d_exact, rel=0.02)

    def test_shift_linear_in_beta(self):
        p1 = BouncerPotentialSpec.from_params(ChameleonParams(n=3, beta=1e9))
        p2 = BouncerPotentialSpec.from_params(ChameleonParams(n=3, beta=2e9))
        assert transition_shift(p2) == pytest.approx(2.0 * transition_shift(p1), rel=1e-10)

    def test_gravity_has_no_shift(self):
        assert perturbative_shift(BouncerPotentialSpec.pure_gravity(), 2) == 0.0

    def test_transition_ordering_validation(self):
        pot = BouncerPotentialSpec.pure_gravity()
        with pytest.raises(ValueError):
            transition_shift(pot, k_upper=1, k_lower=3)


class TestCouplingBound:
    def test_bound_inverts_shift(self):
        beta = coupling_bound(2, 0.01)
        pot = BouncerPotentialSpec.from_params(ChameleonParams(n=2, beta=beta))
        assert transition_shift(pot) == pytest.approx(0.01, rel=1e-6)

    def test_bound_scales_inversely_with_sensitivity(self):
        b1 = coupling_bound(1, 0.01)
        b2 = coupling_bound(1, 0.001)
        # perturbative shift is linear in beta
        assert b1 == pytest.approx(10.0 * b2, rel=1e-6)

    def test_window_violations_raise(self):
        with pytest.raises(ReachOutsideWindow) as exc:
            coupling_bound(2, 0.01, beta_window=(1e10, 1e12))
        assert exc.value.beta_lo == 1e10
        with pytest.raises(ReachOutsideWindow):
            coupling_bound(2, 1e6, beta_window=(1e2, 1e4))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            coupling_bound(2, -0.01)
        with pytest.raises(ValueError):
            coupling_bound(2, 0.01, beta_window=(1e9, 1e3))


class TestSpectrum:
    def test_methods_agree_for_pure_gravity(self):
        pot = BouncerPotentialSpec.pure_gravity()
        ex = solve_spectrum(pot, k_max=3, method="exact")
        pe = solve_spectrum(pot, k_max=3, method="perturbative")
        for (k1, e1), (k2, e2) in zip(ex.levels_pev, pe.levels_pev):
            assert k1 == k2
            assert e1 == pytest.approx(e2, rel=1e-5)

    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError):
            solve_spectrum(BouncerPotentialSpec.pure_gravity(), method="variational")
