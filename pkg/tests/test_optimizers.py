import math

import numpy as np
import pytest

from src.benchgen.bounds import default_init
from src.benchgen.fidelity import FidelitySpec
from src.errors import ConfigError
from src.harness.evaluator import Evaluator
from src.optimizers.base import run_ask_tell
from src.optimizers.cmaes import EIG_FLOOR, CmaConfig, CmaEs, cmaes
from src.optimizers.hyperband import HyperbandPlan, fidelity_from_resource, hyperband, promote
from src.optimizers.random_search import RandomSearch, random_search

TARGET = 0.05 * np.where(np.arange(20) % 2 == 0, 1.0, -1.0)


def sphere(points):
    return np.sum((np.atleast_2d(points) - TARGET) ** 2, axis=1)


# --- Random search ---


def test_random_search_spends_budget(tiny_bench):
    """It should record exactly `budget` points inside [-1, 1]^d."""
    records = random_search(tiny_bench, budget=25, seed=1)
    assert len(records) == 25
    assert all(len(r.z) == tiny_bench.d and all(-1.0 <= v <= 1.0 for v in r.z) for r in records)
    assert all(r.method == "random_search" and r.seed == 1 for r in records)


def test_random_search_seeded(tiny_bench):
    """It should be reproducible for a seed and differ across seeds."""
    a = random_search(tiny_bench, budget=5, seed=3)
    b = random_search(tiny_bench, budget=5, seed=3)
    c = random_search(tiny_bench, budget=5, seed=4)
    assert [r.z for r in a] == [r.z for r in b]
    assert [r.loss for r in a] == [r.loss for r in b]
    assert [r.z for r in a] != [r.z for r in c]


def test_random_search_at_fidelity(tiny_bench):
    """It should evaluate at the requested fidelity."""
    records = random_search(tiny_bench, budget=3, fidelity=FidelitySpec(discrete=0))
    assert all(r.tol == 0.2 and r.fidelity.discrete == 0 for r in records)


def test_ask_tell_rejects_empty_budget(tiny_bench):
    """It should refuse a budget below one."""
    with pytest.raises(ConfigError):
        run_ask_tell(RandomSearch(tiny_bench.d), Evaluator(tiny_bench), budget=0)


# --- CMA-ES ---


def test_cmaes_strategy_parameters():
    """It should use positive normalized weights over the best half of the population."""
    es = CmaEs(np.zeros(20))
    assert es.mu == 10
    assert es.weights.sum() == pytest.approx(1.0)
    assert np.all(np.diff(es.weights) < 0)
    assert 1 < es.mueff < es.mu


def test_cmaes_solves_shifted_sphere():
    """It should drive a 20-dimensional sphere below 1e-6, where random search cannot get near."""
    es = CmaEs(np.zeros(20), CmaConfig(population=20, sigma0=0.1), seed=0)
    best = math.inf
    for _ in range(200):
        points = es.ask()
        losses = sphere(points)
        best = min(best, float(losses.min()))
        es.tell(points, losses)
    assert best <= 1e-6

    rs = RandomSearch(20, seed=0)
    rs_best = min(float(sphere(rs.ask()).min()) for _ in range(4000))
    assert rs_best >= 1e-2


def test_cmaes_equal_losses_keep_ask_order():
    """It should recombine the first mu points when every loss ties."""
    es = CmaEs(np.zeros(5), CmaConfig(population=8), seed=2)
    points = es.ask()
    es.tell(points, np.ones(8))
    np.testing.assert_array_equal(es.mean, es.weights @ points[:4])


def test_cmaes_covariance_stays_positive():
    """It should keep the sampling eigenvalues at or above the floor."""
    es = CmaEs(np.zeros(4), CmaConfig(population=6, sigma0=0.5), seed=1)
    for _ in range(60):
        points = es.ask()
        es.tell(points, np.abs(points[:, 0]))
        assert es.eigenvalues.min() >= EIG_FLOOR


def test_cmaes_resamples_into_bounds():
    """It should prefer in-bounds candidates near the boundary."""
    es = CmaEs(np.full(3, 0.95), CmaConfig(population=10, sigma0=0.05, max_resamples=10), seed=0)
    points = es.ask()
    inside = np.all(np.abs(points) <= 1.0, axis=1)
    assert inside.mean() > 0.9


def test_cmaes_tell_shape_checked():
    """It should refuse a tell that does not match the asked batch."""
    es = CmaEs(np.zeros(3), CmaConfig(population=4))
    with pytest.raises(ConfigError):
        es.tell(np.zeros((3, 3)), np.zeros(3))


def test_cmaes_on_benchmark(tiny_bench):
    """It should start from the default configuration and spend the budget exactly."""
    records = cmaes(tiny_bench, budget=45, cfg=CmaConfig(population=20), seed=0)
    assert len(records) == 45
    assert all(all(-1.0 <= v <= 1.0 for v in r.z) for r in records)
    first = np.array(records[0].z)
    assert np.linalg.norm(first - default_init(tiny_bench)) < 1.0


def test_cmaes_budget_below_population(tiny_bench):
    """It should refuse a budget smaller than one generation."""
    with pytest.raises(ConfigError):
        cmaes(tiny_bench, budget=10)


# --- Hyperband ---


def test_bracket_layout():
    """It should lay out brackets (27, 1), (12, 3), (6, 9), (4, 27) for eta 3 and R 27."""
    plan = HyperbandPlan(eta=3, R=27)
    brackets = plan.brackets()
    assert plan.s_max == 3
    assert [(b.n_configs, b.resource) for b in brackets] == [(27, 1.0), (12, 3.0), (6, 9.0), (4, 27.0)]
    assert brackets[0].rungs == ((27, 1.0), (9, 3.0), (3, 9.0), (1, 27.0))
    assert sum(n for b in brackets for n, _ in b.rungs) == 69


def test_s_max_integer_loop():
    """It should find the largest s with eta**s <= R without float logs."""
    assert HyperbandPlan(eta=3, R=26).s_max == 2
    assert HyperbandPlan(eta=2, R=8).s_max == 3


def test_degenerate_plan():
    """It should refuse R < eta."""
    with pytest.raises(ValueError):
        HyperbandPlan(eta=3, R=2)


def test_resource_to_fidelity():
    """It should map r = 1 to the loosest and r = R to the tightest tolerance."""
    plan = HyperbandPlan()
    assert plan.fidelity(1.0).tolerance == pytest.approx(0.2)
    assert plan.fidelity(27.0).tolerance == pytest.approx(1e-4)
    assert plan.fidelity(3.0).continuous == pytest.approx(1.0 / 3.0)
    assert fidelity_from_resource(plan.fidelity(9.0).continuous, continuous=True) == pytest.approx(
        plan.fidelity(9.0).tolerance
    )


def test_promote_stable_ties():
    """It should keep the lowest losses and break ties by insertion order."""
    assert promote([1.0, 0.0, 1.0, 0.0], 2).tolist() == [1, 3]
    assert promote([3.0, 2.0, 1.0], 0).tolist() == []


def test_hyperband_one_sweep(tiny_bench):
    """It should make 69 evaluations in one sweep, starting from the default configuration."""
    records = hyperband(tiny_bench, seed=0)
    assert len(records) == 69
    np.testing.assert_allclose(records[0].z, default_init(tiny_bench))
    assert records[0].tol == pytest.approx(0.2)
    assert records[-1].tol == pytest.approx(1e-4)


def test_hyperband_promotes_best(tiny_bench):
    """It should evaluate the best third of a rung again at the next resource."""
    records = hyperband(tiny_bench, seed=1)
    first_rung = records[:27]
    second_rung = records[27:36]
    order = np.argsort([r.loss for r in first_rung], kind="stable")[:9]
    assert [r.z for r in second_rung] == [first_rung[i].z for i in order]
    assert all(r.tol < first_rung[0].tol for r in second_rung)


def test_hyperband_budget(tiny_bench):
    """It should stop after exactly `budget` evaluations, continuing into further sweeps when needed."""
    assert len(hyperband(tiny_bench, seed=0, budget=30)) == 30
    assert len(hyperband(tiny_bench, HyperbandPlan(eta=3, R=9), seed=0, budget=40)) == 40


def test_hyperband_reproducible(tiny_bench):
    """It should repeat itself for a seed."""
    a = hyperband(tiny_bench, seed=5, budget=20)
    b = hyperband(tiny_bench, seed=5, budget=20)
    assert [r.model_dump_json() for r in a] == [r.model_dump_json() for r in b]
