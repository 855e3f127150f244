"""Initial-data profiles: exact cell averages against quadrature oracles."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

import ringflow as rf
from ringflow.scenarios import PERTURBATION


def _oracle_averages(fn, edges, breakpoints=()):
    """Adaptive-quadrature cell averages, independent of the antiderivatives."""
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        inner = [p for p in breakpoints if a < p < b]
        val, _ = quad(fn, a, b, limit=200, points=inner or None)
        out.append(val / (b - a))
    return np.asarray(out)


class TestGaussian:
    def test_cell_averages_match_quadrature(self):
        g = rf.Gaussian(amplitude=8.0 / 9.0, center=0.25, rate=100.0)
        edges = np.linspace(0.0, 1.0, 51)
        exact = g.cell_averages(edges)
        oracle = _oracle_averages(lambda x: g.evaluate(float(x)), edges)
        assert np.allclose(exact, oracle, atol=1e-12, rtol=0)

    def test_total_mass_equals_closed_form(self):
        # dx * sum(cell averages) telescopes to the integral over the domain
        g = rf.Gaussian(amplitude=8.0 / 9.0, center=0.25, rate=100.0)
        edges = np.linspace(0.0, 2.0, 401)
        dx = edges[1] - edges[0]
        mass = dx * g.cell_averages(edges).sum()
        closed = (
            0.5
            * (8.0 / 9.0)
            * math.sqrt(math.pi / 100.0)
            * (math.erf(10.0 * (2.0 - 0.25)) - math.erf(10.0 * (0.0 - 0.25)))
        )
        assert mass == pytest.approx(closed, abs=1e-15)


class TestCosineBump:
    def test_pointwise_definition(self):
        # direct evaluation of the cosine difference inside the support
        x = 0.3
        u = 4.0 / 3.0 * x - 0.5
        expected = (math.cos(20.0 * u) - math.cos(10.0 * u)) / 30.0
        assert PERTURBATION.evaluate(x) == pytest.approx(expected, rel=1e-14)

    def test_zero_outside_support(self):
        lo, hi = PERTURBATION.support
        assert PERTURBATION.evaluate(lo - 1e-9) == 0.0
        assert PERTURBATION.evaluate(hi + 1e-9) == 0.0
        # the cut is a jump: the cosine difference itself is nonzero at the cut
        assert abs(PERTURBATION.evaluate(lo + 1e-12)) > 1e-3

    def test_cell_averages_match_quadrature_including_partial_cells(self):
        edges = np.linspace(0.0, 0.8, 41)  # support cuts fall inside cells
        exact = PERTURBATION.cell_averages(edges)
        oracle = _oracle_averages(
            lambda x: float(PERTURBATION.evaluate(x)), edges, breakpoints=PERTURBATION.support
        )
        assert np.allclose(exact, oracle, atol=1e-12, rtol=0)


class TestAlgebra:
    def test_scaled_and_summed(self):
        g = rf.Gaussian(amplitude=0.5, center=0.3, rate=50.0)
        edges = np.linspace(0, 1, 21)
        assert np.array_equal(rf.Scaled(0.5, g).cell_averages(edges), 0.5 * g.cell_averages(edges))
        s = rf.Summed(terms=(g, rf.Constant(0.1)))
        assert np.allclose(
            s.cell_averages(edges), g.cell_averages(edges) + 0.1, rtol=0, atol=1e-16
        )

    def test_samples_requires_matching_grid(self):
        p = rf.Samples(values=(0.1, 0.2, 0.3))
        assert np.array_equal(p.cell_averages(np.linspace(0, 1, 4)), [0.1, 0.2, 0.3])
        with pytest.raises(ValueError):
            p.cell_averages(np.linspace(0, 1, 5))

    def test_from_function_midpoint(self):
        p = rf.FromFunction(lambda x: x**2)
        edges = np.array([0.0, 1.0, 2.0])
        assert np.array_equal(p.cell_averages(edges), np.array([0.25, 2.25]))


class TestSplitShare:
    @pytest.mark.parametrize("p", [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0])
    def test_shares_sum_back_exactly(self, p):
        base = rf.Gaussian(amplitude=8.0 / 9.0, center=0.25, rate=100.0)
        frac = rf.Constant(p)
        edges = np.linspace(0.0, 2.0, 401)
        a = rf.SplitShare(base, frac, "fraction").cell_averages(edges)
        h = rf.SplitShare(base, frac, "complement").cell_averages(edges)
        assert np.array_equal(a + h, base.cell_averages(edges))

    def test_varying_fraction_constant_base(self):
        base = rf.Constant(0.85)
        frac = rf.Summed(terms=(rf.Constant(0.4), PERTURBATION))
        edges = np.linspace(0.0, 2.0, 101)
        a = rf.SplitShare(base, frac, "fraction").cell_averages(edges)
        h = rf.SplitShare(base, frac, "complement").cell_averages(edges)
        assert np.array_equal(a + h, np.full(100, 0.85))
        # fraction share approximates fraction * base
        m = frac.cell_averages(edges)
        assert np.allclose(a, m * 0.85, rtol=1e-12, atol=1e-15)

    def test_two_varying_factors_rejected(self):
        g = rf.Gaussian(amplitude=0.5, center=0.3, rate=50.0)
        with pytest.raises(ValueError):
            rf.SplitShare(base=g, fraction=g, share="fraction")
