"""Local maximiser for the packing program.

An augmented Lagrangian outer loop turns the inequality-constrained
program into a sequence of smooth bound-constrained problems, each
minimised with L-BFGS-B.  Only first derivatives are used.  Multipliers
follow the classic max(0, lambda - rho*g) update; the penalty grows
whenever feasibility stalls, following the usual two-track tolerance
schedule.  Infeasible starts are fine: the merit function is defined
everywhere and the first outer rounds simply buy feasibility.

The solver is deterministic: identical problem, start and options give a
bit-identical result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, minimize

from .formulation import EvaluationError, NlpProblem, evaluate

CONVERGED = "converged"
ITERATION_LIMIT = "iteration_limit"
NUMERICAL_FAILURE = "numerical_failure"

# Penalty values past this point only add rounding noise.
_PENALTY_CAP = 1e14


@dataclass
class SolverOptions:
    max_outer_iterations: int = 50
    max_inner_iterations: int = 500
    kkt_tolerance: float = 1e-8
    feasibility_tolerance: float = 1e-8
    initial_penalty: float = 10.0
    penalty_growth: float = 10.0

    def __post_init__(self) -> None:
        if self.max_outer_iterations < 1 or self.max_inner_iterations < 1:
            raise ValueError("iteration limits must be at least 1")
        if self.kkt_tolerance <= 0.0 or self.feasibility_tolerance <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.initial_penalty <= 0.0:
            raise ValueError("initial penalty must be positive")
        if self.penalty_growth <= 1.0:
            raise ValueError("penalty growth must exceed 1")


@dataclass
class SolverResult:
    point: np.ndarray
    objective: float
    status: str
    max_constraint_violation: float
    outer_iterations: int


class _NonFiniteMerit(RuntimeError):
    pass


def _projected_gradient_norm(
    z: np.ndarray, grad: np.ndarray, lower: np.ndarray, upper: np.ndarray
) -> float:
    return float(np.max(np.abs(z - np.clip(z - grad, lower, upper)), initial=0.0))


def solve(
    problem: NlpProblem,
    start: np.ndarray,
    options: SolverOptions | None = None,
    check_monotone: bool = False,
) -> SolverResult:
    """Maximise the common radius from the given start point.

    Parameters
    ----------
    problem : NlpProblem
        Program to solve; bounds and constraint families come from it.
    start : array
        Start vector, clamped into the variable bounds.
    options : SolverOptions, optional
        Tolerances and iteration limits.
    check_monotone : bool, optional
        Assert that no inner minimisation increases its own merit value.
        Meant for tests; off by default.

    Returns
    -------
    SolverResult
        Final point, objective (the radius), status, worst constraint
        violation in distance units, and outer iterations used.

    Notes
    -----
    Status ``iteration_limit`` also covers points that are feasible but
    stalled at the arithmetic floor: when the objective stops moving the
    loop exits early rather than burning the remaining outer rounds.
    """
    opts = options or SolverOptions()
    lower, upper = problem.lower, problem.upper
    z = np.clip(np.asarray(start, dtype=float), lower, upper)
    if z.shape != (problem.nv,):
        raise ValueError(f"start must have shape ({problem.nv},), got {z.shape}")

    multipliers = np.zeros(problem.m, dtype=float)
    penalty = opts.initial_penalty
    feas_target = penalty**-0.1
    stat_target = 1.0 / penalty
    bounds = Bounds(lower, upper)

    def merit(point: np.ndarray) -> tuple[float, np.ndarray]:
        value, grad = problem.augmented_lagrangian(point, multipliers, penalty)
        if not np.isfinite(value) or not np.all(np.isfinite(grad)):
            raise _NonFiniteMerit
        return value, grad

    status = ITERATION_LIMIT
    violation = float("inf")
    outer_used = opts.max_outer_iterations
    previous_objective = float("inf")
    stalled_rounds = 0

    for outer in range(1, opts.max_outer_iterations + 1):
        inner_gtol = max(stat_target, 0.1 * opts.kkt_tolerance)
        try:
            merit_before = merit(z)[0] if check_monotone else None
            result = minimize(
                merit,
                z,
                jac=True,
                method="L-BFGS-B",
                bounds=bounds,
                options={
                    "maxiter": opts.max_inner_iterations,
                    "maxfun": 10 * opts.max_inner_iterations,
                    "ftol": 1e-14,
                    "gtol": inner_gtol,
                    "maxcor": 12,
                },
            )
            candidate = np.clip(result.x, lower, upper)
            if not np.all(np.isfinite(candidate)):
                raise _NonFiniteMerit
            if check_monotone:
                merit_after = merit(candidate)[0]
                slack = 1e-9 * (1.0 + abs(merit_before))
                assert merit_after <= merit_before + slack, (
                    f"inner minimisation increased the merit: "
                    f"{merit_before} -> {merit_after}"
                )
        except (_NonFiniteMerit, EvaluationError, FloatingPointError, np.linalg.LinAlgError):
            status = NUMERICAL_FAILURE
            outer_used = outer
            break

        z = candidate
        g = problem.constraint_values(z)
        violation = float(np.max(problem.linear_violations(z), initial=0.0))

        candidate_multipliers = np.maximum(0.0, multipliers - penalty * g)
        grad_lag = problem.lagrangian_gradient(z, candidate_multipliers)
        stationarity = _projected_gradient_norm(z, grad_lag, lower, upper)

        if violation <= max(feas_target, opts.feasibility_tolerance):
            multipliers = candidate_multipliers
            if violation <= opts.feasibility_tolerance and stationarity <= opts.kkt_tolerance:
                status = CONVERGED
                outer_used = outer
                break
            feas_target = max(feas_target / penalty**0.9, 0.1 * opts.feasibility_tolerance)
            stat_target = max(stat_target / penalty, 0.1 * opts.kkt_tolerance)
        else:
            penalty = min(penalty * opts.penalty_growth, _PENALTY_CAP)
            feas_target = max(penalty**-0.1, 0.1 * opts.feasibility_tolerance)
            stat_target = max(1.0 / penalty, 0.1 * opts.kkt_tolerance)

        # Degenerate active sets make the multiplier iteration cycle, so
        # the stationarity target can be unreachable in double precision.
        # Once feasible with a frozen objective, further rounds are noise:
        # boost the penalty once to squeeze the residual violation, then
        # stop after the next round instead of burning the full budget.
        if (
            violation <= opts.feasibility_tolerance
            and abs(z[0] - previous_objective) <= 1e-8 * (1.0 + abs(z[0]))
        ):
            stalled_rounds += 1
        else:
            stalled_rounds = 0
        previous_objective = z[0]
        if stalled_rounds == 2:
            penalty = min(penalty * 1.0e3, _PENALTY_CAP)
            feas_target = max(penalty**-0.1, 0.1 * opts.feasibility_tolerance)
            stat_target = max(1.0 / penalty, 0.1 * opts.kkt_tolerance)
        elif stalled_rounds >= 3:
            outer_used = outer
            break
    else:
        outer_used = opts.max_outer_iterations

    if violation == float("inf"):
        # No inner round completed; report the start point's violation.
        violation = float(np.max(problem.linear_violations(z), initial=0.0))

    return SolverResult(
        point=z,
        objective=float(z[0]),
        status=status,
        max_constraint_violation=violation,
        outer_iterations=outer_used,
    )


def gradient_check(problem: NlpProblem, point: np.ndarray, step: float = 1e-6) -> float:
    """Worst relative error of the analytic derivatives at a point.

    Central differences where the bounds allow, one-sided otherwise.
    Covers the objective and every constraint; the error is relative to
    max(1, |analytic|, |numeric|) per entry.
    """
    z = np.asarray(point, dtype=float)
    _, _, grad_obj, jac = evaluate(problem, z)
    worst = 0.0
    for j in range(problem.nv):
        up_ok = z[j] + step <= problem.upper[j]
        down_ok = z[j] - step >= problem.lower[j]
        zp = z.copy()
        zm = z.copy()
        if up_ok and down_ok:
            zp[j] += step
            zm[j] -= step
            span = 2.0 * step
        elif up_ok:
            zp[j] += step
            span = step
        else:
            zm[j] -= step
            span = step
        cons_diff = (problem.constraint_values(zp) - problem.constraint_values(zm)) / span
        obj_diff = (zp[0] - zm[0]) / span
        numeric = np.concatenate(([obj_diff], cons_diff))
        analytic = np.concatenate(([grad_obj[j]], jac[:, j]))
        scale = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
        worst = max(worst, float(np.max(np.abs(analytic - numeric) / scale, initial=0.0)))
    return worst
