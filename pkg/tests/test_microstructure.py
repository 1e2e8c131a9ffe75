"""Gas microstructure tests: threshold identities against the in-medium
minimum, regime partition, screened-nucleus geometry and the Coulomb tail."""

import math
import warnings

import numpy as np
import pytest
from scipy.optimize import brentq

from chamneut import (
    HETEROGENEOUS,
    HOMOGENEOUS_PERTURBATIVE,
    STRONGLY_SELF_COUPLED,
    CellGeometry,
    ChameleonParams,
    NucleusSpec,
    classify,
    coulomb_tail,
    min_field,
    phi_D,
    r_star,
    regime_grid,
    rho_pert,
    rho_screen,
    solve_y0,
    universal_profile,
)
from chamneut.microstructure import screening_threshold_field
from chamneut.units import CONSTANTS, helium, length_to_natural

GAS = helium(1.0)
NUC = NucleusSpec.from_gas(GAS)
P_N2 = ChameleonParams(n=2, beta=1e9)


class TestNucleusSpec:
    def test_surface_potential_formula(self):
        phi_n = NUC.newtonian_surface_potential
        expect = GAS.nucleus_mass_ev / (
            8.0 * math.pi * CONSTANTS.planck_mass_ev**2
            * length_to_natural(GAS.nucleus_radius_m)
        )
        assert phi_n == pytest.approx(expect, rel=1e-12)

    def test_rejects_inconsistent_potential(self):
        with pytest.raises(ValueError):
            NucleusSpec(mass_ev=1e9, radius_m=1e-15,
                        newtonian_surface_potential=1.0)

    def test_rejects_nonpositive_geometry(self):
        with pytest.raises(ValueError):
            NucleusSpec.from_mass_radius(0.0, 1e-15)


class TestThresholds:
    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_minimum_equals_lambda_at_rho_pert(self, n):
        p = ChameleonParams(n=n, beta=1e9)
        assert min_field(p, rho_pert(p)) == pytest.approx(p.lambda_ev, rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_minimum_equals_shell_threshold_at_rho_screen(self, n):
        p = ChameleonParams(n=n, beta=1e9)
        thr = screening_threshold_field(p, NUC)
        assert min_field(p, rho_screen(p, NUC)) == pytest.approx(thr, rel=1e-12)

    def test_rho_screen_against_independent_bisection(self):
        # locate the density where the minimum crosses the shell threshold
        # without using the closed form
        thr = screening_threshold_field(P_N2, NUC)
        log_rho = brentq(lambda lr: min_field(P_N2, 10.0**lr) - thr,
                         -20.0, 40.0, xtol=1e-13)
        assert 10.0**log_rho == pytest.approx(rho_screen(P_N2, NUC), rel=1e-10)

    def test_threshold_ordering_for_helium(self):
        # at beta = 1e9, n = 2 the nuclei screen long before the field
        # self-couples: about 6.5e-4 mbar versus 9.5e-2 mbar
        rho1 = GAS.mass_density_ev4
        assert rho_screen(P_N2, NUC) / rho1 == pytest.approx(6.544e-4, rel=1e-3)
        assert rho_pert(P_N2) / rho1 == pytest.approx(9.526e-2, rel=1e-3)

    def test_uncoupled_field_has_no_thresholds(self):
        p0 = ChameleonParams(n=2, beta=0.0)
        assert rho_pert(p0) == math.inf
        assert rho_screen(p0, NUC) == math.inf


class TestClassify:
    def test_partition_across_pressure(self):
        rho1 = GAS.mass_density_ev4
        p_screen = rho_screen(P_N2, NUC) / rho1
        p_pert = rho_pert(P_N2) / rho1
        assert classify(P_N2, GAS.with_pressure(0.5 * p_screen)).regime \
            == HOMOGENEOUS_PERTURBATIVE
        assert classify(P_N2, GAS.with_pressure(2.0 * p_screen)).regime \
            == HETEROGENEOUS
        assert classify(P_N2, GAS.with_pressure(2.0 * p_pert)).regime \
            == STRONGLY_SELF_COUPLED

    def test_report_carries_thresholds(self):
        rep = classify(P_N2, GAS)
        assert rep.rho_ev4 == pytest.approx(GAS.mass_density_ev4)
        assert rep.rho_pert_ev4 == pytest.approx(rho_pert(P_N2))
        assert rep.rho_screen_ev4 == pytest.approx(rho_screen(P_N2, NUC))

    def test_zero_pressure_is_homogeneous(self):
        rep = classify(P_N2, GAS.with_pressure(0.0))
        assert rep.regime == HOMOGENEOUS_PERTURBATIVE
        assert rep.md_product == 0.0

    def test_warns_when_mass_term_not_negligible(self):
        # an extreme coupling pushes the in-medium Compton wavelength below
        # the interatomic spacing while the gas is still heterogeneous
        p = ChameleonParams(n=2, beta=1e19)
        with pytest.warns(UserWarning, match="mass times half spacing"):
            rep = classify(p, GAS.with_pressure(9e-13))
        assert rep.regime == HETEROGENEOUS
        assert rep.md_product >= 1.0

    def test_no_warning_in_normal_conditions(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            rep = classify(P_N2, GAS.with_pressure(0.01))
        assert rep.regime == HETEROGENEOUS
        assert rep.md_product < 1.0


class TestInterNucleusBubble:
    def test_phi_d_matches_vacuum_cell_with_r_equal_d(self):
        d_m = GAS.nucleus_radius_m * 1e6  # any spacing; 1.9e-9 m here
        sol = solve_y0(P_N2, CellGeometry(half_width_m=d_m), 0.0)
        assert phi_D(P_N2, d_m) == pytest.approx(sol.y0 * P_N2.lambda_ev, rel=1e-10)

    def test_phi_d_scaling_with_spacing(self):
        for n in (1, 2, 3):
            p = ChameleonParams(n=n, beta=1e9)
            ratio = phi_D(p, 2e-8) / phi_D(p, 1e-8)
            assert ratio == pytest.approx(2.0 ** (2.0 / (n + 2.0)), rel=1e-12)

    def test_phi_d_rejects_nonpositive_spacing(self):
        with pytest.raises(ValueError):
            phi_D(P_N2, 0.0)

    def test_universal_profile_scaling(self):
        for n in (1, 2, 4):
            p = ChameleonParams(n=n, beta=1e9)
            ratio = universal_profile(p, 2e-9) / universal_profile(p, 1e-9)
            assert ratio == pytest.approx(2.0 ** (2.0 / (n + 2.0)), rel=1e-12)

    def test_universal_profile_is_coupling_independent(self):
        a = universal_profile(ChameleonParams(n=2, beta=1e6), 1e-9)
        b = universal_profile(ChameleonParams(n=2, beta=1e12), 1e-9)
        assert a == b


class TestStarShell:
    def test_internal_consistency(self):
        shell = r_star(P_N2, NUC, 1.7e-8)
        rs_nat = length_to_natural(shell.r_star_m)
        lam = P_N2.lambda_ev
        phid = phi_D(P_N2, 1.7e-8)
        coeff = rs_nat**2 * math.sqrt(2.0 * lam**6 / phid**2)
        assert shell.coefficient == pytest.approx(coeff, rel=1e-10)
        assert shell.phi_star_ev == pytest.approx(
            shell.coefficient / length_to_natural(NUC.radius_m), rel=1e-12
        )

    def test_spacing_power_law(self):
        # R_star ~ D^(n/(2n+1)) at fixed nucleus
        for n in (1, 2, 3):
            p = ChameleonParams(n=n, beta=1e9)
            ratio = r_star(p, NUC, 2e-8).r_star_m / r_star(p, NUC, 1e-8).r_star_m
            assert ratio == pytest.approx(2.0 ** (n / (2.0 * n + 1.0)), rel=1e-12)

    def test_shell_sits_between_nucleus_and_spacing(self):
        shell = r_star(P_N2, NUC, 1.7e-8)
        assert NUC.radius_m < shell.r_star_m < 1.7e-8

    def test_rejects_spacing_inside_nucleus(self):
        with pytest.raises(ValueError):
            r_star(P_N2, NUC, 0.5 * NUC.radius_m)


class TestCoulombTail:
    def test_deficit_identity(self):
        ambient = 1.0  # eV, comfortably above the helium shell threshold
        r_m = 1e-12
        val = coulomb_tail(P_N2, NUC, r_m, ambient)
        deficit = P_N2.beta * NUC.mass_ev / (
            4.0 * math.pi * CONSTANTS.planck_mass_ev * length_to_natural(r_m)
        )
        assert ambient - val == pytest.approx(deficit, rel=1e-12)

    def test_deficit_halves_at_double_radius(self):
        ambient = 1.0
        d1 = ambient - coulomb_tail(P_N2, NUC, 1e-12, ambient)
        d2 = ambient - coulomb_tail(P_N2, NUC, 2e-12, ambient)
        assert d1 == pytest.approx(2.0 * d2, rel=1e-12)

    def test_warns_when_nucleus_screened(self):
        thr = screening_threshold_field(P_N2, NUC)
        with pytest.warns(UserWarning, match="screened"):
            coulomb_tail(P_N2, NUC, 1e-12, 0.5 * thr)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            coulomb_tail(P_N2, NUC, 0.5 * NUC.radius_m, 1.0)
        with pytest.raises(ValueError):
            coulomb_tail(P_N2, NUC, 1e-12, 0.0)


class TestRegimeGrid:
    def test_totality_shape_and_order(self):
        betas = np.logspace(6, 11, 4)
        pressures = np.logspace(-4, 2, 5)
        rows = regime_grid(P_N2, GAS, betas, pressures)
        assert len(rows) == len(betas) * len(pressures)
        labels = {HOMOGENEOUS_PERTURBATIVE, HETEROGENEOUS, STRONGLY_SELF_COUPLED}
        for i, (beta, pres, regime) in enumerate(rows):
            assert regime in labels
            assert beta == pytest.approx(betas[i // len(pressures)])
            assert pres == pytest.approx(pressures[i % len(pressures)])

    def test_monotone_in_beta(self):
        # stronger coupling can only move a state away from homogeneity
        codes = {HOMOGENEOUS_PERTURBATIVE: 0, HETEROGENEOUS: 1,
                 STRONGLY_SELF_COUPLED: 2}
        betas = np.logspace(4, 14, 21)
        rows = regime_grid(P_N2, GAS, betas, [1.0])
        seq = [codes[r[2]] for r in rows]
        assert all(a <= b for a, b in zip(seq, seq[1:]))
