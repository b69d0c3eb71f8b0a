"""Augmented Lagrangian solver on problems with known optima."""

import numpy as np
import pytest

from fsspack.formulation import Assignment, PairSets, build_nlp
from fsspack.geometry import (
    CartesianPoint,
    Instance,
    Layout,
    ProhibitedCircle,
    correct_radius,
    radius_upper_bound,
)
from fsspack.solver import (
    CONVERGED,
    ITERATION_LIMIT,
    NUMERICAL_FAILURE,
    SolverOptions,
    gradient_check,
    solve,
)

EMPTY = Instance("empty", [])


def annulus_oracle(hole: float) -> float:
    # Best single-circle radius with a central prohibited disk.  The
    # radius at centre distance d is min(1 - d, d - hole); maximise it
    # by dense scan plus ternary refinement around the peak.
    def margin(d):
        return min(1.0 - d, d - hole)

    grid = np.linspace(hole, 1.0, 100001)
    best = grid[np.argmax([margin(d) for d in grid])]
    lo, hi = best - 1e-5, best + 1e-5
    for _ in range(200):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if margin(m1) < margin(m2):
            lo = m1
        else:
            hi = m2
    return margin((lo + hi) / 2)


def build_for(centers, assignment, instance=EMPTY, delta=2.0, r_cap=None, pairs=None):
    centers = np.asarray(centers, dtype=float)
    n, _ = centers.shape
    if r_cap is None:
        r_cap = radius_upper_bound(instance, n)
    if pairs is None:
        circle = [(i, j) for i in range(n) for j in range(i + 1, n)]
        prohibited = [(i, f) for i in range(n) for f in range(instance.f_count)]
        pairs = PairSets(circle, prohibited)
    return build_nlp(instance, assignment, Layout(centers, 0.0), delta, pairs, r_cap)


def test_single_circle_fills_container():
    p = build_for([(0.3, 0.2)], Assignment((0,), ()))
    res = solve(p, p.pack_start(np.array([[0.3, 0.2]]), 0.1), check_monotone=True)
    assert res.status == CONVERGED
    assert res.objective == pytest.approx(1.0, abs=1e-6)
    assert res.max_constraint_violation <= 1e-8


def test_two_circles_split_the_diameter():
    centers = np.array([[0.4, 0.1], [-0.3, -0.2]])
    p = build_for(centers, Assignment((0,), (1,)))
    res = solve(p, p.pack_start(centers, 0.1), check_monotone=True)
    assert res.status in (CONVERGED, ITERATION_LIMIT)
    corrected = correct_radius(p.extract_centers(res.point), EMPTY)
    assert corrected == pytest.approx(0.5, abs=1e-6)


def test_annular_single_circle_matches_scan_oracle():
    hole = 0.2
    inst = Instance("hole", [ProhibitedCircle(CartesianPoint(0.0, 0.0), hole)])
    want = annulus_oracle(hole)
    assert want == pytest.approx((1.0 - hole) / 2.0, abs=1e-9)
    centers = np.array([[0.55, 0.1]])
    p = build_for(centers, Assignment((0,), ()), inst)
    res = solve(p, p.pack_start(centers, 0.05), check_monotone=True)
    corrected = correct_radius(p.extract_centers(res.point), inst)
    assert corrected == pytest.approx(want, abs=1e-7)


def test_polar_formulation_reaches_the_same_optimum():
    hole = 0.2
    inst = Instance("hole", [ProhibitedCircle(CartesianPoint(0.0, 0.0), hole)])
    centers = np.array([[0.55, 0.1]])
    p = build_for(centers, Assignment((), (0,)), inst)
    res = solve(p, p.pack_start(centers, 0.05), check_monotone=True)
    corrected = correct_radius(p.extract_centers(res.point), inst)
    assert corrected == pytest.approx((1.0 - hole) / 2.0, abs=1e-7)


def test_solver_is_deterministic():
    rng = np.random.default_rng(13)
    centers = rng.uniform(-0.5, 0.5, size=(6, 2))
    inst = Instance("d", [ProhibitedCircle(CartesianPoint(0.1, -0.2), 0.15)])
    p = build_for(centers, Assignment((0, 2, 4), (1, 3, 5)), inst, delta=0.3)
    start = p.pack_start(centers, 0.1)
    first = solve(p, start)
    second = solve(p, start)
    assert np.array_equal(first.point, second.point)
    assert first.status == second.status
    assert first.outer_iterations == second.outer_iterations


def test_converged_objective_agrees_with_correction():
    # On a clean convergence the NLP radius and the exact corrected
    # radius of the final centres must agree to within the tolerance.
    p = build_for([(0.3, 0.2)], Assignment((0,), ()))
    res = solve(p, p.pack_start(np.array([[0.3, 0.2]]), 0.1))
    assert res.status == CONVERGED
    corrected = correct_radius(p.extract_centers(res.point), EMPTY)
    assert abs(corrected - res.objective) <= 1e-8 + 1e-9


def test_infeasible_start_recovers():
    # Nearly coincident centres at a fat radius guess massively violate
    # separation; the solver must still reach the two-circle optimum.
    centers = np.array([[0.2, 0.2], [0.21, 0.2]])
    p = build_for(centers, Assignment((0, 1), ()))
    res = solve(p, p.pack_start(centers, 0.4))
    assert res.status in (CONVERGED, ITERATION_LIMIT)
    assert res.max_constraint_violation <= 1e-8
    corrected = correct_radius(p.extract_centers(res.point), EMPTY)
    assert corrected == pytest.approx(0.5, abs=1e-6)


def test_coincident_start_degrades_gracefully():
    # Exactly coincident centres sit on a symmetric saddle: the pair
    # constraint has zero gradient there, so the solver cannot split
    # them.  It must report honestly rather than crash.
    centers = np.array([[0.2, 0.2], [0.2, 0.2]])
    p = build_for(centers, Assignment((0, 1), ()))
    res = solve(p, p.pack_start(centers, 0.4))
    assert res.status in (CONVERGED, ITERATION_LIMIT, NUMERICAL_FAILURE)
    assert np.all(np.isfinite(res.point))


def test_gradient_check_interior_and_bounds():
    rng = np.random.default_rng(29)
    inst = Instance("d", [ProhibitedCircle(CartesianPoint(0.25, -0.1), 0.12)])
    centers = rng.uniform(-0.5, 0.5, size=(4, 2))
    p = build_for(centers, Assignment((0, 2), (1, 3)), inst, delta=0.5)
    interior = p.pack_start(centers, 0.2)
    assert gradient_check(p, interior) < 1e-8
    # Clamp a point onto the bounds; one-sided differences are coarser.
    at_bounds = np.clip(interior, p.lower, p.lower)
    assert gradient_check(p, at_bounds) < 1e-5


def test_stall_exit_spares_the_outer_budget():
    # Warm restarts at a degenerate optimum stop early instead of
    # burning all outer rounds on an unreachable stationarity target.
    centers = np.array([[0.5, 0.0], [-0.5, 0.0]])
    p = build_for(centers, Assignment((0, 1), ()))
    res = solve(p, p.pack_start(centers, 0.5))
    assert res.outer_iterations < 50
    assert res.max_constraint_violation <= 1e-8
    corrected = correct_radius(p.extract_centers(res.point), EMPTY)
    assert corrected == pytest.approx(0.5, abs=1e-8)


def test_numerical_failure_is_reported_not_raised():
    p = build_for([(0.3, 0.2)], Assignment((0,), ()))

    real = p.augmented_lagrangian

    def poisoned(z, multipliers, penalty):
        value, grad = real(z, multipliers, penalty)
        return float("nan"), grad

    p.augmented_lagrangian = poisoned
    res = solve(p, p.pack_start(np.array([[0.3, 0.2]]), 0.1))
    assert res.status == NUMERICAL_FAILURE
    assert np.all(np.isfinite(res.point))


def test_solver_options_validate():
    with pytest.raises(ValueError):
        SolverOptions(max_outer_iterations=0)
    with pytest.raises(ValueError):
        SolverOptions(kkt_tolerance=0.0)
    with pytest.raises(ValueError):
        SolverOptions(feasibility_tolerance=-1e-9)
    with pytest.raises(ValueError):
        SolverOptions(initial_penalty=0.0)
    with pytest.raises(ValueError):
        SolverOptions(penalty_growth=1.0)


def test_solve_rejects_bad_start_shape():
    p = build_for([(0.3, 0.2)], Assignment((0,), ()))
    with pytest.raises(ValueError):
        solve(p, np.zeros(7))
