"""Search driver: randomness contracts, replications, and run reports."""

import math

import numpy as np
import pytest

from fsspack.engine import (
    EngineError,
    FssConfig,
    run,
    run_replication,
    random_assignment,
    random_initial_layout,
    replication_rng,
)
from fsspack.geometry import (
    CartesianPoint,
    Instance,
    ProhibitedCircle,
    radius_upper_bound,
    verify_layout,
)
from fsspack.instances import builtin_instance
from fsspack.solver import SolverOptions

EMPTY = Instance("empty", [])

FAST = SolverOptions(max_outer_iterations=20, max_inner_iterations=200)


class StubRng:
    """Feeds a fixed sequence to the assignment coin."""

    def __init__(self, draws):
        self.draws = list(draws)

    def random(self, n):
        out = np.array(self.draws[:n], dtype=float)
        del self.draws[:n]
        return out


def test_replication_rng_streams_are_stable_and_disjoint():
    a = replication_rng(42, 0).random(8)
    b = replication_rng(42, 0).random(8)
    c = replication_rng(42, 1).random(8)
    d = replication_rng(7, 0).random(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_initial_layout_radial_law():
    lay = random_initial_layout(replication_rng(0, 0), 1000)
    norms = np.hypot(lay.centers[:, 0], lay.centers[:, 1])
    assert (norms <= 1.0).all()
    assert lay.radius == 0.0
    # Distance is uniform on [0, 1], so the mean norm concentrates at 1/2.
    big = random_initial_layout(replication_rng(0, 1), 100_000)
    mean = np.hypot(big.centers[:, 0], big.centers[:, 1]).mean()
    assert mean == pytest.approx(0.5, abs=0.01)


def test_initial_layout_draw_order():
    # Distances first, then angles, from the same stream.
    rng = replication_rng(5, 0)
    lay = random_initial_layout(rng, 3)
    rng2 = replication_rng(5, 0)
    dist = rng2.random(3)
    angle = rng2.random(3) * (2.0 * math.pi)
    want = np.column_stack((dist * np.cos(angle), dist * np.sin(angle)))
    assert np.array_equal(lay.centers, want)


def test_assignment_boundary_is_cartesian():
    a = random_assignment(StubRng([0.5, 0.5000000001, 0.0, 0.7]), 4)
    assert a.cart == (0, 2)
    assert a.polar == (1, 3)


def test_assignment_is_roughly_balanced():
    rng = replication_rng(1, 0)
    counts = [len(random_assignment(rng, 20).cart) for _ in range(500)]
    assert 8.5 <= np.mean(counts) <= 11.5


def test_fss_config_validates():
    with pytest.raises(ValueError):
        FssConfig(n=0)
    with pytest.raises(ValueError):
        FssConfig(n=1, iterations=0)
    with pytest.raises(ValueError):
        FssConfig(n=1, replications=0)
    with pytest.raises(ValueError):
        FssConfig(n=1, delta_factor=0.0)


def test_replication_is_deterministic():
    inst = builtin_instance(2)
    cfg = FssConfig(n=3, iterations=4, replications=1, seed=9, solver=FAST)
    lay1, tr1 = run_replication(inst, cfg, replication_rng(9, 0))
    lay2, tr2 = run_replication(inst, cfg, replication_rng(9, 0))
    assert np.array_equal(lay1.centers, lay2.centers)
    assert lay1.radius == lay2.radius
    assert [t.r_star for t in tr1] == [t.r_star for t in tr2]


def test_replication_traces_are_coherent():
    inst = builtin_instance(2)
    cfg = FssConfig(n=3, iterations=5, replications=1, seed=2, solver=FAST)
    r_cap = radius_upper_bound(inst, 3)
    lay, traces = run_replication(inst, cfg, replication_rng(2, 0))
    assert len(traces) == 5
    assert [t.iteration for t in traces] == list(range(5))
    best_so_far = 0.0
    for t in traces:
        best_so_far = max(best_so_far, t.r_star)
        assert t.r_best == best_so_far
        assert t.r_star <= r_cap + 1e-12
        assert 0 <= t.cart_count <= 3
        assert t.elapsed >= 0.0
    # The first trace records the starting box half-width; later ones
    # shrink it from the previous corrected radius.
    assert traces[0].delta == pytest.approx(cfg.delta_factor * r_cap)
    assert traces[1].delta == pytest.approx(cfg.delta_factor * traces[0].r_star)
    assert lay.radius == traces[-1].r_best


def test_run_report_and_feasibility():
    inst = builtin_instance(2)
    cfg = FssConfig(n=2, iterations=3, replications=3, seed=4, solver=FAST)
    report = run(inst, cfg)
    assert report.nlp_solves == 9
    assert len(report.traces) == 3
    assert report.best_radius == report.best_layout.radius
    assert report.best_radius > 0.0
    assert verify_layout(report.best_layout, inst, 0.0).feasible
    per_rep = [max(t.r_best for t in tr) for tr in report.traces]
    assert report.best_radius == max(per_rep)
    assert report.replication_of_best == int(np.argmax(per_rep))


def test_run_is_deterministic_across_calls():
    inst = builtin_instance(3)
    cfg = FssConfig(n=2, iterations=2, replications=2, seed=11, solver=FAST)
    a = run(inst, cfg)
    b = run(inst, cfg)
    assert a.best_radius == b.best_radius
    assert np.array_equal(a.best_layout.centers, b.best_layout.centers)
    assert a.replication_of_best == b.replication_of_best


def test_parallel_workers_match_serial():
    inst = builtin_instance(2)
    cfg = FssConfig(n=2, iterations=2, replications=2, seed=3, solver=FAST)
    serial = run(inst, cfg, workers=1)
    parallel = run(inst, cfg, workers=2)
    assert serial.best_radius == parallel.best_radius
    assert np.array_equal(serial.best_layout.centers, parallel.best_layout.centers)
    assert serial.replication_of_best == parallel.replication_of_best


def test_minimal_budget_still_works():
    inst = builtin_instance(6)
    cfg = FssConfig(n=1, iterations=1, replications=1, seed=0, solver=FAST)
    report = run(inst, cfg)
    assert report.nlp_solves == 1
    assert report.best_radius > 0.0


def test_fallback_layout_on_hopeless_geometry():
    # A prohibited disk nearly as large as the container leaves almost
    # nothing; even when every solve collapses, the run must still hand
    # back a verified layout.
    inst = Instance("tight", [ProhibitedCircle(CartesianPoint(0.0, 0.0), 0.995)])
    cfg = FssConfig(n=2, iterations=1, replications=1, seed=0, solver=FAST)
    report = run(inst, cfg)
    assert verify_layout(report.best_layout, inst, 0.0).feasible
