"""Preset construction and their documented structural properties."""

import math

import numpy as np
import pytest

import ringflow as rf
from ringflow.errors import PenetrationOutOfRange
from ringflow.model import Boundary, Coupling, validate_model
from ringflow.scenarios import PERTURBATION, PRESETS, build_preset


class TestOvertaking:
    def test_parameters(self):
        sc = rf.preset_overtaking()
        assert sc.dx == 5e-3 and sc.T == 30.0
        fast, slow = sc.model.classes
        assert fast.speed.v_max == 0.04 and slow.speed.v_max == 0.015
        assert fast.tau == slow.tau == 2.5
        assert isinstance(fast.saturation, rf.ExponentialSaturation)
        assert fast.saturation.steepness == 50.0
        assert sc.model.boundary is Boundary.PERIODIC

    def test_no_saturation_variant(self):
        sc = rf.preset_overtaking(with_saturation=False)
        assert all(isinstance(c.saturation, rf.NoSaturation) for c in sc.model.classes)

    def test_variants_share_initial_data_bitwise(self, paper_grid):
        a = rf.preset_overtaking(with_saturation=True)
        b = rf.preset_overtaking(with_saturation=False)
        rho_a = validate_model(a.model, a.initial, paper_grid)
        rho_b = validate_model(b.model, b.initial, paper_grid)
        assert np.array_equal(rho_a, rho_b)


class TestInvariantDomain:
    def test_couplings_share_initial_data(self, paper_grid):
        pc = rf.preset_invariant_domain(Coupling.PER_CLASS)
        td = rf.preset_invariant_domain(Coupling.TOTAL_DENSITY)
        assert pc.model.coupling is Coupling.PER_CLASS
        assert td.model.coupling is Coupling.TOTAL_DENSITY
        assert np.array_equal(
            validate_model(pc.model, pc.initial, paper_grid),
            validate_model(td.model, td.initial, paper_grid),
        )


class TestDelayConvergence:
    def test_split_is_half_total(self, paper_grid):
        sc = rf.preset_delay_convergence(2.5)
        rho0 = validate_model(sc.model, sc.initial, paper_grid)
        assert np.array_equal(rho0[0], rho0[1])
        hump = rf.Gaussian(8.0 / 9.0, 0.25, 100.0).cell_averages(paper_grid.edges)
        assert np.allclose(rho0.sum(axis=0), hump, rtol=0, atol=1e-16)

    def test_differs_from_overtaking_config(self):
        delay = rf.preset_delay_convergence(2.5)
        over = rf.preset_overtaking()
        assert delay.model.classes[0].tau == over.model.classes[0].tau == 2.5
        assert delay.initial != over.initial
        assert delay.model.classes[1].tau == 0.0

    def test_speeds_equal(self):
        sc = rf.preset_delay_convergence(1.0)
        assert all(c.speed.v_max == 0.04 for c in sc.model.classes)


class TestAvPenetration:
    def test_structure(self):
        sc = rf.preset_av_penetration(0.5, "triangular", 2.5)
        hv, av = sc.model.classes
        assert isinstance(hv.kernel, rf.LinearDecreasingKernel) and hv.kernel.length == 0.1
        assert isinstance(av.kernel, rf.ConstantKernel) and av.kernel.length == 0.2
        assert hv.tau == 2.5 and av.tau == 0.0
        assert hv.speed.rho_c == 0.4 and av.speed.rho_c == 0.6

    def test_greenshields_family(self):
        sc = rf.preset_av_penetration(0.5, "greenshields", 2.0)
        assert all(isinstance(c.speed, rf.Greenshields) for c in sc.model.classes)
        assert sc.model.classes[0].tau == 2.0

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            rf.preset_av_penetration(0.5, "quadratic", 2.5)

    @pytest.mark.parametrize("p", [-0.1, 1.0001])
    def test_out_of_range(self, p):
        with pytest.raises(PenetrationOutOfRange):
            rf.preset_av_penetration(p)

    @pytest.mark.parametrize("p", [0.0, 0.3, 0.5, 0.8, 1.0])
    def test_shares_sum_to_base_exactly(self, p, paper_grid):
        sc = rf.preset_av_penetration(p, "triangular", 2.5)
        rho0 = validate_model(sc.model, sc.initial, paper_grid)
        hump = rf.Gaussian(8.0 / 9.0, 0.25, 100.0).cell_averages(paper_grid.edges)
        assert np.array_equal(rho0.sum(axis=0), hump)

    def test_pure_fleets(self, paper_grid):
        all_av = rf.preset_av_penetration(1.0)
        rho0 = validate_model(all_av.model, all_av.initial, paper_grid)
        assert np.all(rho0[0] == 0.0)
        all_hv = rf.preset_av_penetration(0.0)
        rho0 = validate_model(all_hv.model, all_hv.initial, paper_grid)
        assert np.all(rho0[1] == 0.0)


class TestPerturbation:
    def test_theta_definition(self):
        # direct evaluation of the bump at an interior point
        x = 0.25
        u = 4.0 / 3.0 * x - 0.5
        expected = (math.cos(20.0 * u) - math.cos(10.0 * u)) / 30.0
        assert PERTURBATION.evaluate(x) == pytest.approx(expected, rel=1e-14)
        lo, hi = PERTURBATION.support
        assert lo == pytest.approx(0.15)
        assert hi == pytest.approx((3.0 * math.pi + 1.0) / 20.0)
        assert PERTURBATION.evaluate(lo - 1e-9) == 0.0
        assert PERTURBATION.evaluate(hi + 1e-9) == 0.0

    def test_total_density_constant(self, paper_grid):
        for p in (0.2, 0.5, 0.8):
            sc = rf.preset_perturbation(p)
            rho0 = validate_model(sc.model, sc.initial, paper_grid)
            assert np.array_equal(rho0.sum(axis=0), np.full(400, 0.85))

    def test_perturbation_actually_moves_mass(self, paper_grid):
        sc = rf.preset_perturbation(0.4)
        rho0 = validate_model(sc.model, sc.initial, paper_grid)
        assert rho0[1].max() > 0.4 * 0.85 + 1e-3
        assert rho0[1].min() < 0.4 * 0.85 - 1e-3

    def test_delay_and_speeds(self):
        sc = rf.preset_perturbation(0.4)
        assert sc.model.classes[0].tau == 2.0
        assert isinstance(sc.model.classes[0].speed, rf.Triangular)

    @pytest.mark.parametrize("p", [0.03, 0.95, -0.2, 1.2])
    def test_share_must_stay_admissible(self, p):
        # theta spans about [-0.0375, +0.0667], so shares leave [0, 1] for
        # p below ~0.0375 or above ~0.9333
        with pytest.raises(PenetrationOutOfRange):
            rf.preset_perturbation(p)

    def test_admissible_edge_rates_accepted(self):
        rf.preset_perturbation(0.05)
        rf.preset_perturbation(0.9)


class TestRegistry:
    def test_every_preset_validates(self, paper_grid):
        built = [
            rf.preset_overtaking(),
            rf.preset_overtaking(with_saturation=False),
            rf.preset_invariant_domain(Coupling.PER_CLASS),
            rf.preset_invariant_domain(Coupling.TOTAL_DENSITY),
            rf.preset_delay_convergence(5.0),
            rf.preset_delay_convergence(0.0),
            rf.preset_av_penetration(0.5, "greenshields", 2.0),
            rf.preset_av_penetration(0.5, "triangular", 2.5),
            rf.preset_perturbation(0.4),
        ]
        for sc in built:
            rho0 = validate_model(sc.model, sc.initial, paper_grid)
            assert np.all(rho0 >= 0.0)

    def test_referential_transparency(self):
        assert rf.preset_overtaking() == rf.preset_overtaking()
        assert rf.preset_av_penetration(0.3) == rf.preset_av_penetration(0.3)

    def test_build_by_name(self):
        sc = build_preset("delay-convergence", tau1=3.0, dx=0.02)
        assert sc.model.classes[0].tau == 3.0
        with pytest.raises(KeyError):
            build_preset("nonexistent")
        with pytest.raises(TypeError):
            build_preset("overtaking", tau1=3.0)

    def test_registry_lists_all(self):
        assert set(PRESETS) == {
            "overtaking",
            "invariant-domain",
            "delay-convergence",
            "av-penetration",
            "perturbation",
        }
