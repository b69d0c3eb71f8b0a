"""Formulation space search driver.

Every iteration re-poses the problem before solving it again: each circle
is randomly flipped between Cartesian and polar coordinates, and the
Cartesian centres are only allowed to move inside a box whose half-width
shrinks with the best corrected radius.  The solver's point is adopted
whether or not it improved, so the search keeps drifting through
formulation space; the corrected radius decides what counts as the best
layout seen.

Replications are independent restarts.  Each draws its randomness from a
counter-based stream keyed by (seed, replication index), so any subset of
replications can be reproduced, serially or in parallel.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .formulation import Assignment, build_nlp, prune_pairs
from .geometry import Instance, Layout, TWO_PI, correct_radius, radius_upper_bound, verify_layout
from .solver import NUMERICAL_FAILURE, SolverOptions, solve

_MASK64 = (1 << 64) - 1


class EngineError(RuntimeError):
    """Raised when a run cannot produce a feasible layout at all."""


@dataclass
class FssConfig:
    """Search budget and randomness for one problem size."""

    n: int
    iterations: int = 80
    replications: int = 25
    seed: int = 0
    delta_factor: float = 2.0 / 3.0
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one circle, got n={self.n}")
        if self.iterations < 1 or self.replications < 1:
            raise ValueError("iterations and replications must be at least 1")
        if not (self.delta_factor > 0.0):
            raise ValueError(f"delta factor must be positive, got {self.delta_factor}")


@dataclass
class IterationTrace:
    iteration: int
    r_star: float
    r_best: float
    delta: float
    cart_count: int
    status: str
    elapsed: float


@dataclass
class RunReport:
    best_layout: Layout
    best_radius: float
    replication_of_best: int
    traces: list[list[IterationTrace]]
    total_elapsed: float
    nlp_solves: int


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    """Independent stream per replication.

    The 128-bit key of a counter-based generator is (seed, replication),
    so streams never overlap and need no serial warm-up.
    """
    key = np.array([seed & _MASK64, replication & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def random_initial_layout(rng: np.random.Generator, n: int) -> Layout:
    """n centres drawn radially: distance uniform on [0, 1], angle uniform.

    The draw order is fixed: all distances first, then all angles.
    """
    if n < 1:
        raise ValueError(f"need at least one circle, got n={n}")
    dist = rng.random(n)
    angle = rng.random(n) * TWO_PI
    centers = np.column_stack((dist * np.cos(angle), dist * np.sin(angle)))
    return Layout(centers, 0.0)


def random_assignment(rng: np.random.Generator, n: int) -> Assignment:
    """Independent coin per circle: draws of 0.5 or less go Cartesian."""
    draws = rng.random(n)
    cart = tuple(i for i in range(n) if draws[i] <= 0.5)
    polar = tuple(i for i in range(n) if draws[i] > 0.5)
    return Assignment(cart, polar)


def run_replication(
    instance: Instance, config: FssConfig, rng: np.random.Generator
) -> tuple[Layout, list[IterationTrace]]:
    """One restart: the full iteration loop from a fresh random layout."""
    n = config.n
    r_cap = radius_upper_bound(instance, n)
    current = random_initial_layout(rng, n)
    assignment = random_assignment(rng, n)
    delta = config.delta_factor * r_cap

    best_radius = 0.0
    best_centers = current.centers.copy()
    previous_r_star = 0.0
    traces: list[IterationTrace] = []

    for t in range(config.iterations):
        tic = time.perf_counter()
        pairs = prune_pairs(current, assignment, delta, r_cap, instance)
        problem = build_nlp(instance, assignment, current, delta, pairs, r_cap)
        start = problem.pack_start(current.centers, min(max(previous_r_star, 0.0), r_cap))
        result = solve(problem, start, config.solver)

        if result.status == NUMERICAL_FAILURE:
            new_centers = current.centers
        else:
            new_centers = problem.extract_centers(result.point)

        r_star = correct_radius(new_centers, instance)
        if r_star > best_radius:
            best_radius = r_star
            best_centers = new_centers.copy()
        traces.append(
            IterationTrace(
                iteration=t,
                r_star=r_star,
                r_best=best_radius,
                delta=delta,
                cart_count=len(assignment.cart),
                status=result.status,
                elapsed=time.perf_counter() - tic,
            )
        )

        delta = config.delta_factor * r_star
        previous_r_star = r_star
        current = Layout(new_centers, r_star)
        assignment = random_assignment(rng, n)

    return Layout(best_centers.copy(), best_radius), traces


def _replication_job(
    instance: Instance, config: FssConfig, replication: int
) -> tuple[int, Layout, list[IterationTrace]]:
    layout, traces = run_replication(instance, config, replication_rng(config.seed, replication))
    return replication, layout, traces


def _fallback_layout(instance: Instance, n: int) -> Layout:
    """n coincident centres at some point feasible for radius zero."""
    fc = instance.prohibited_centers()
    fr = instance.prohibited_radii()

    def clear(x: float, y: float) -> bool:
        if math.hypot(x, y) > 1.0 - 1e-9:
            return False
        if fc.shape[0] == 0:
            return True
        d = np.hypot(fc[:, 0] - x, fc[:, 1] - y)
        return bool(np.all(d >= fr + 1e-12))

    candidates = [
        (0.999999 * math.cos(a), 0.999999 * math.sin(a))
        for a in np.linspace(0.0, TWO_PI, 720, endpoint=False)
    ]
    for step in np.linspace(-0.9, 0.9, 19):
        for other in np.linspace(-0.9, 0.9, 19):
            candidates.append((float(step), float(other)))
    for x, y in candidates:
        if clear(x, y):
            return Layout(np.tile([x, y], (n, 1)), 0.0)
    raise EngineError("no feasible point exists for a zero-radius layout")


def run(instance: Instance, config: FssConfig, workers: int = 1) -> RunReport:
    """All replications; the best corrected layout over every restart wins.

    Ties on radius go to the lowest replication index, so the outcome is
    independent of worker scheduling.
    """
    started = time.perf_counter()
    outcomes: dict[int, tuple[Layout, list[IterationTrace]]] = {}
    if workers <= 1:
        for rep in range(config.replications):
            rng = replication_rng(config.seed, rep)
            outcomes[rep] = run_replication(instance, config, rng)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_replication_job, instance, config, rep)
                for rep in range(config.replications)
            ]
            for future in futures:
                rep, layout, traces = future.result()
                outcomes[rep] = (layout, traces)

    best_rep = 0
    best_layout = outcomes[0][0]
    for rep in range(1, config.replications):
        layout = outcomes[rep][0]
        if layout.radius > best_layout.radius:
            best_rep, best_layout = rep, layout

    if best_layout.radius <= 0.0:
        best_layout = _fallback_layout(instance, config.n)

    report = verify_layout(best_layout, instance, 0.0)
    if not report.feasible:
        raise EngineError(
            f"best layout failed verification at tolerance zero: worst "
            f"{report.worst()} in {report.describe_worst()}"
        )

    return RunReport(
        best_layout=best_layout,
        best_radius=best_layout.radius,
        replication_of_best=best_rep,
        traces=[outcomes[rep][1] for rep in range(config.replications)],
        total_elapsed=time.perf_counter() - started,
        nlp_solves=config.iterations * config.replications,
    )
