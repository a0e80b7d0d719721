import math
import warnings

import numpy as np
import pytest

from planarlearn import (
    FitConfig,
    Graph,
    IsingModel,
    clamp_targets,
    enum_distribution,
    entropy,
    fit_ml,
    moments,
    objective,
    straight_line_embed,
)

from util import random_connected_planar_graph


class TestFitConfig:
    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            FitConfig(gradient_tolerance=0.0)

    def test_rejects_bad_shrink(self):
        with pytest.raises(ValueError):
            FitConfig(backtrack_shrink=1.0)


class TestClampTargets:
    def test_interior_untouched(self):
        mu = np.array([0.3, -0.9])
        assert np.array_equal(clamp_targets(mu), mu)

    def test_boundary_clamped_with_warning(self):
        with pytest.warns(UserWarning):
            out = clamp_targets(np.array([1.0, -1.0, 0.0]))
        assert out[0] == pytest.approx(1 - 1e-6)
        assert out[1] == pytest.approx(-(1 - 1e-6))
        assert out[2] == 0.0


class TestScalarCase:
    def test_single_edge_is_atanh(self):
        g = Graph.make(2, [(0, 1)])
        for mu in (0.9, -0.5, 0.0, 0.3):
            rep = fit_ml(g, np.array([mu]))
            assert rep.converged
            assert rep.theta[0] == pytest.approx(math.atanh(mu), abs=1e-8)

    def test_zero_targets_converge_immediately(self):
        g = Graph.make(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        rep = fit_ml(g, np.zeros(4))
        assert rep.converged
        assert rep.iterations == 0
        assert np.all(rep.theta == 0)


class TestRoundTrip:
    def test_recovers_known_couplings(self):
        rng = np.random.default_rng(101)
        for _ in range(10):
            n = int(rng.integers(3, 13))
            g = random_connected_planar_graph(n, rng)
            theta_star = rng.uniform(-1.5, 1.5, size=len(g.edges))
            target = moments(IsingModel(g, theta_star))
            rep = fit_ml(g, target)
            assert rep.converged, rep.message
            assert rep.iterations <= 50
            assert np.max(np.abs(rep.theta - theta_star)) <= 1e-6

    def test_warm_start(self):
        rng = np.random.default_rng(103)
        g = random_connected_planar_graph(8, rng)
        theta_star = rng.uniform(-1, 1, size=len(g.edges))
        target = moments(IsingModel(g, theta_star))
        cold = fit_ml(g, target)
        warm = fit_ml(g, target, init_theta=theta_star + 0.01)
        assert warm.iterations <= cold.iterations
        assert np.max(np.abs(warm.theta - theta_star)) <= 1e-6


class TestObjective:
    def test_monotone_ascent(self):
        rng = np.random.default_rng(107)
        g = random_connected_planar_graph(9, rng)
        emb = straight_line_embed(g)
        theta_star = rng.uniform(-1.2, 1.2, size=len(g.edges))
        target = moments(IsingModel(g, theta_star), emb)
        rep = fit_ml(g, target)
        # The objective at the solution dominates the starting point, and at
        # the optimum it equals n log 2 minus the entropy of the target
        # distribution (the objective is mu.theta - Phi + n log 2).
        f0 = objective(np.zeros(len(g.edges)), target, g, emb)
        f_opt = objective(rep.theta, target, g, emb)
        assert f_opt >= f0
        dist = enum_distribution(IsingModel(g, theta_star))
        assert f_opt == pytest.approx(g.n * math.log(2) - entropy(dist), abs=1e-8)

    def test_value_at_zero(self):
        g = Graph.make(3, [(0, 1), (1, 2)])
        target = np.array([0.4, -0.2])
        assert objective(np.zeros(2), target, g, straight_line_embed(g)) == (
            pytest.approx(0.0, abs=1e-12)
        )

    def test_log_likelihood_reported(self):
        g = Graph.make(2, [(0, 1)])
        rep = fit_ml(g, np.array([0.6]))
        t = math.atanh(0.6)
        expected = 0.6 * t - math.log(math.cosh(t))
        assert rep.log_likelihood == pytest.approx(expected, abs=1e-9)


class TestBoundaryTargets:
    def test_near_boundary_targets_fit(self):
        g = Graph.make(2, [(0, 1)])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = fit_ml(g, clamp_targets(np.array([1.0])))
        assert rep.converged
        # Convergence is on moments, so check tanh(theta) rather than theta:
        # near the boundary a tiny moment residual maps to a large theta gap.
        assert math.tanh(rep.theta[0]) == pytest.approx(1 - 1e-6, abs=1e-8)
