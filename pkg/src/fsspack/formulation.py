"""Assembly and evaluation of the per-iteration packing program.

One search iteration fixes which circles use Cartesian coordinates and
which use polar, limits how far each Cartesian centre may move, prunes
pairs that provably cannot collide, and hands the solver a smooth
inequality program in the canonical orientation g(z) >= 0.

Variable layout: the common radius first, then (x, y) per Cartesian
circle in index order, then (r, theta) per polar circle in index order.
Movement limits fold into the variable bounds, so the nonlinear
constraints are exactly the containment, separation and clearance
families.  Constraint families are evaluated as blocks of numpy index
arrays; the analytic derivatives share one code path with the values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Instance, Layout, TWO_PI

ROOT2 = math.sqrt(2.0)

# Constraint family ids, used in tags and diagnostics.
FAMILY_CONTAINMENT_CART = 2
FAMILY_CONTAINMENT_POLAR = 3
FAMILY_PAIR_CART_CART = 4
FAMILY_PAIR_CART_POLAR = 5
FAMILY_PAIR_POLAR_POLAR = 6
FAMILY_PROHIBITED_CART = 7
FAMILY_PROHIBITED_POLAR = 8


class EvaluationError(RuntimeError):
    """Raised when a constraint evaluates to a non-finite value."""


@dataclass(frozen=True)
class Assignment:
    """Partition of circle indices into Cartesian and polar sets."""

    cart: tuple[int, ...]
    polar: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cart", tuple(sorted(self.cart)))
        object.__setattr__(self, "polar", tuple(sorted(self.polar)))
        n = len(self.cart) + len(self.polar)
        combined = set(self.cart) | set(self.polar)
        if len(combined) != n or combined != set(range(n)):
            raise ValueError("cart and polar must partition 0..n-1")

    @property
    def n(self) -> int:
        return len(self.cart) + len(self.polar)


@dataclass
class PairSets:
    """Pairs kept after pruning: circle/circle and (circle, prohibited)."""

    circle_pairs: list[tuple[int, int]]
    prohibited_pairs: list[tuple[int, int]]


def prune_pairs(
    current: Layout,
    assignment: Assignment,
    delta: float,
    r_cap: float,
    instance: Instance,
) -> PairSets:
    """Drop pairs that cannot collide under the movement limits.

    A Cartesian centre moves at most sqrt(2)*delta from its box centre,
    so a Cartesian pair further apart than 2*r_cap + 2*sqrt(2)*delta can
    never touch, and a Cartesian circle further than r_cap + R_f +
    sqrt(2)*delta from a prohibited disk can never reach it.  Polar
    circles are unboxed, so every pair touching one is kept.
    """
    if delta < 0.0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    n = assignment.n
    pts = current.centers
    if pts.shape[0] != n:
        raise ValueError(f"layout holds {pts.shape[0]} centres, assignment expects {n}")
    in_cart = np.zeros(n, dtype=bool)
    in_cart[list(assignment.cart)] = True

    circle_pairs: list[tuple[int, int]] = []
    if n >= 2:
        iu, ju = np.triu_indices(n, k=1)
        dist = np.hypot(pts[iu, 0] - pts[ju, 0], pts[iu, 1] - pts[ju, 1])
        prunable = in_cart[iu] & in_cart[ju] & (dist - 2.0 * ROOT2 * delta >= 2.0 * r_cap)
        circle_pairs = [(int(i), int(j)) for i, j in zip(iu[~prunable], ju[~prunable])]

    prohibited_pairs: list[tuple[int, int]] = []
    fc = instance.prohibited_centers()
    fr = instance.prohibited_radii()
    if fc.shape[0]:
        d = np.hypot(pts[:, None, 0] - fc[None, :, 0], pts[:, None, 1] - fc[None, :, 1])
        prunable = in_cart[:, None] & (d - ROOT2 * delta >= r_cap + fr[None, :])
        keep_i, keep_f = np.nonzero(~prunable)
        prohibited_pairs = [(int(i), int(f)) for i, f in zip(keep_i, keep_f)]

    return PairSets(circle_pairs, prohibited_pairs)


class NlpProblem:
    """One smooth inequality program: maximise the common radius.

    Built by build_nlp; evaluation methods are vectorised per constraint
    family.  Public data: n, nv, m, lower, upper, tags, cart, polar,
    var_a, var_b (first and second variable slot per circle), r_cap.
    """

    def __init__(
        self,
        n: int,
        cart: np.ndarray,
        polar: np.ndarray,
        var_a: np.ndarray,
        var_b: np.ndarray,
        lower: np.ndarray,
        upper: np.ndarray,
        tags: list[tuple[int, tuple[int, ...]]],
        r_cap: float,
        blocks: dict,
    ) -> None:
        self.n = n
        self.cart = cart
        self.polar = polar
        self.var_a = var_a
        self.var_b = var_b
        self.lower = lower
        self.upper = upper
        self.tags = tags
        self.r_cap = r_cap
        self.nv = 2 * n + 1
        self.m = len(tags)
        self._b2 = blocks["eq2"]
        self._b3 = blocks["eq3"]
        self._cc = blocks["cc"]
        self._cp = blocks["cp"]
        self._pp = blocks["pp"]
        self._cf = blocks["cf"]
        self._pf = blocks["pf"]
        self._build_entries()

    # -- jacobian entry bookkeeping ------------------------------------

    def _build_entries(self) -> None:
        # Flat (row, col) arrays for every nonzero jacobian entry, in a
        # fixed family order; _fill_derivs writes the matching values.
        rows = []
        cols = []
        views = []
        start = 0

        def add(pos: np.ndarray, col_stack: list[np.ndarray]) -> None:
            nonlocal start
            width = len(col_stack)
            q = len(pos)
            if q == 0:
                views.append(None)
                return
            rows.append(np.repeat(pos, width))
            cols.append(np.column_stack(col_stack).ravel())
            views.append((start, q, width))
            start += q * width

        zeros = lambda q: np.zeros(q, dtype=np.intp)
        pos2, cx2, cy2 = self._b2
        add(pos2, [zeros(len(pos2)), cx2, cy2])
        pos3, cr3 = self._b3
        add(pos3, [zeros(len(pos3)), cr3])
        poscc, ix, iy, jx, jy = self._cc
        add(poscc, [zeros(len(poscc)), ix, iy, jx, jy])
        poscp, cx, cy, pr, pt = self._cp
        add(poscp, [zeros(len(poscp)), cx, cy, pr, pt])
        pospp, ir, it, jr, jt = self._pp
        add(pospp, [zeros(len(pospp)), ir, it, jr, jt])
        poscf, fix, fiy, _, _, _ = self._cf
        add(poscf, [zeros(len(poscf)), fix, fiy])
        pospf, pir, pit, _, _, _ = self._pf
        add(pospf, [zeros(len(pospf)), pir, pit])

        if rows:
            self._entry_rows = np.concatenate(rows)
            self._entry_cols = np.concatenate(cols)
        else:
            self._entry_rows = np.empty(0, dtype=np.intp)
            self._entry_cols = np.empty(0, dtype=np.intp)
        self._entry_vals = np.zeros(start, dtype=float)
        self._views = [
            None if v is None else self._entry_vals[v[0] : v[0] + v[1] * v[2]].reshape(v[1], v[2])
            for v in views
        ]

    # -- evaluation -----------------------------------------------------

    def constraint_values(self, z: np.ndarray, derivs: bool = False) -> np.ndarray:
        """All constraint values g(z) in canonical order.

        With derivs=True the jacobian entry buffer is refreshed as a side
        effect; values and derivatives share the intermediate quantities.
        """
        radius = z[0]
        vals = np.empty(self.m, dtype=float)
        v2, v3, vcc, vcp, vpp, vcf, vpf = self._views
        four_r2 = 4.0 * radius * radius

        pos, colx, coly = self._b2
        if len(pos):
            x = z[colx]
            y = z[coly]
            vals[pos] = (1.0 - radius) ** 2 - x * x - y * y
            if derivs:
                v2[:, 0] = -2.0 * (1.0 - radius)
                v2[:, 1] = -2.0 * x
                v2[:, 2] = -2.0 * y

        pos, colr = self._b3
        if len(pos):
            vals[pos] = (1.0 - radius) - z[colr]
            if derivs:
                v3[:, 0] = -1.0
                v3[:, 1] = -1.0

        pos, ix, iy, jx, jy = self._cc
        if len(pos):
            dx = z[ix] - z[jx]
            dy = z[iy] - z[jy]
            vals[pos] = dx * dx + dy * dy - four_r2
            if derivs:
                vcc[:, 0] = -8.0 * radius
                vcc[:, 1] = 2.0 * dx
                vcc[:, 2] = 2.0 * dy
                vcc[:, 3] = -2.0 * dx
                vcc[:, 4] = -2.0 * dy

        pos, cx, cy, pr, pt = self._cp
        if len(pos):
            r = z[pr]
            cos_t = np.cos(z[pt])
            sin_t = np.sin(z[pt])
            u = z[cx] - r * cos_t
            v = z[cy] - r * sin_t
            vals[pos] = u * u + v * v - four_r2
            if derivs:
                vcp[:, 0] = -8.0 * radius
                vcp[:, 1] = 2.0 * u
                vcp[:, 2] = 2.0 * v
                vcp[:, 3] = -2.0 * (u * cos_t + v * sin_t)
                vcp[:, 4] = 2.0 * r * (u * sin_t - v * cos_t)

        pos, ir, it, jr, jt = self._pp
        if len(pos):
            ri = z[ir]
            rj = z[jr]
            dt = z[it] - z[jt]
            cos_dt = np.cos(dt)
            sin_dt = np.sin(dt)
            vals[pos] = ri * ri + rj * rj - 2.0 * ri * rj * cos_dt - four_r2
            if derivs:
                vpp[:, 0] = -8.0 * radius
                vpp[:, 1] = 2.0 * ri - 2.0 * rj * cos_dt
                vpp[:, 2] = 2.0 * ri * rj * sin_dt
                vpp[:, 3] = 2.0 * rj - 2.0 * ri * cos_dt
                vpp[:, 4] = -2.0 * ri * rj * sin_dt

        pos, ix, iy, fx, fy, fr = self._cf
        if len(pos):
            u = z[ix] - fx
            v = z[iy] - fy
            rr = radius + fr
            vals[pos] = u * u + v * v - rr * rr
            if derivs:
                vcf[:, 0] = -2.0 * rr
                vcf[:, 1] = 2.0 * u
                vcf[:, 2] = 2.0 * v

        pos, ir, it, fdist, ftheta, fr = self._pf
        if len(pos):
            ri = z[ir]
            dt = z[it] - ftheta
            cos_dt = np.cos(dt)
            sin_dt = np.sin(dt)
            rr = radius + fr
            vals[pos] = ri * ri + fdist * fdist - 2.0 * ri * fdist * cos_dt - rr * rr
            if derivs:
                vpf[:, 0] = -2.0 * rr
                vpf[:, 1] = 2.0 * ri - 2.0 * fdist * cos_dt
                vpf[:, 2] = 2.0 * ri * fdist * sin_dt

        if not np.all(np.isfinite(vals)):
            bad = int(np.argmin(np.isfinite(vals)))
            family, who = self.tags[bad]
            raise EvaluationError(
                f"non-finite value in family-{family} constraint for indices {who}"
            )
        return vals

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        """Dense constraint jacobian, rows in canonical order."""
        self.constraint_values(z, derivs=True)
        if not np.all(np.isfinite(self._entry_vals)):
            bad = int(self._entry_rows[np.argmin(np.isfinite(self._entry_vals))])
            family, who = self.tags[bad]
            raise EvaluationError(
                f"non-finite derivative in family-{family} constraint for indices {who}"
            )
        out = np.zeros((self.m, self.nv), dtype=float)
        out[self._entry_rows, self._entry_cols] = self._entry_vals
        return out

    def weighted_constraint_gradient(self, weights: np.ndarray) -> np.ndarray:
        """J(z)^T @ weights using the entry buffer from the last derivs pass."""
        contrib = self._entry_vals * weights[self._entry_rows]
        return np.bincount(self._entry_cols, weights=contrib, minlength=self.nv)

    def augmented_lagrangian(
        self, z: np.ndarray, multipliers: np.ndarray, penalty: float
    ) -> tuple[float, np.ndarray]:
        """Value and gradient of the bound-constrained merit function.

        Minimising -R subject to g >= 0 turns into
        -R + (||max(0, lambda - rho*g)||^2 - ||lambda||^2) / (2*rho).
        """
        g = self.constraint_values(z, derivs=True)
        w = multipliers - penalty * g
        np.maximum(w, 0.0, out=w)
        value = -z[0] + (w @ w - multipliers @ multipliers) / (2.0 * penalty)
        grad = -self.weighted_constraint_gradient(w)
        grad[0] -= 1.0
        return float(value), grad

    def lagrangian_gradient(self, z: np.ndarray, multipliers: np.ndarray) -> np.ndarray:
        """Gradient of -R - multipliers @ g at z."""
        self.constraint_values(z, derivs=True)
        grad = -self.weighted_constraint_gradient(multipliers)
        grad[0] -= 1.0
        return grad

    def linear_violations(self, z: np.ndarray) -> np.ndarray:
        """Signed violations in distance units, canonical order.

        Positive means violated; this matches the verifier's semantics,
        unlike the raw squared constraint values.
        """
        radius = z[0]
        out = np.empty(self.m, dtype=float)

        pos, colx, coly = self._b2
        if len(pos):
            out[pos] = np.hypot(z[colx], z[coly]) + radius - 1.0
        pos, colr = self._b3
        if len(pos):
            out[pos] = z[colr] + radius - 1.0
        pos, ix, iy, jx, jy = self._cc
        if len(pos):
            out[pos] = 2.0 * radius - np.hypot(z[ix] - z[jx], z[iy] - z[jy])
        pos, cx, cy, pr, pt = self._cp
        if len(pos):
            u = z[cx] - z[pr] * np.cos(z[pt])
            v = z[cy] - z[pr] * np.sin(z[pt])
            out[pos] = 2.0 * radius - np.hypot(u, v)
        pos, ir, it, jr, jt = self._pp
        if len(pos):
            d2 = (
                z[ir] ** 2
                + z[jr] ** 2
                - 2.0 * z[ir] * z[jr] * np.cos(z[it] - z[jt])
            )
            out[pos] = 2.0 * radius - np.sqrt(np.maximum(d2, 0.0))
        pos, ix, iy, fx, fy, fr = self._cf
        if len(pos):
            out[pos] = radius + fr - np.hypot(z[ix] - fx, z[iy] - fy)
        pos, ir, it, fdist, ftheta, fr = self._pf
        if len(pos):
            d2 = z[ir] ** 2 + fdist**2 - 2.0 * z[ir] * fdist * np.cos(z[it] - ftheta)
            out[pos] = radius + fr - np.sqrt(np.maximum(d2, 0.0))
        return out

    # -- layout glue ----------------------------------------------------

    def pack_start(self, centers: np.ndarray, radius: float) -> np.ndarray:
        """Start vector from Cartesian centres plus a radius guess."""
        z = np.empty(self.nv, dtype=float)
        z[0] = radius
        if len(self.cart):
            z[self.var_a[self.cart]] = centers[self.cart, 0]
            z[self.var_b[self.cart]] = centers[self.cart, 1]
        if len(self.polar):
            x = centers[self.polar, 0]
            y = centers[self.polar, 1]
            z[self.var_a[self.polar]] = np.hypot(x, y)
            theta = np.arctan2(y, x)
            theta[theta < 0.0] += TWO_PI
            z[self.var_b[self.polar]] = theta
        return z

    def extract_centers(self, z: np.ndarray) -> np.ndarray:
        """Cartesian centres of all circles at the point z."""
        out = np.empty((self.n, 2), dtype=float)
        if len(self.cart):
            out[self.cart, 0] = z[self.var_a[self.cart]]
            out[self.cart, 1] = z[self.var_b[self.cart]]
        if len(self.polar):
            r = z[self.var_a[self.polar]]
            theta = z[self.var_b[self.polar]]
            out[self.polar, 0] = r * np.cos(theta)
            out[self.polar, 1] = r * np.sin(theta)
        return out


def build_nlp(
    instance: Instance,
    assignment: Assignment,
    current: Layout,
    delta: float,
    pairs: PairSets,
    r_cap: float,
) -> NlpProblem:
    """Assemble the program for one solve.

    Movement limits apply to Cartesian circles only and are intersected
    with the container box [-1, 1]; polar circles get the full (r, theta)
    box.  The retained pairs decide which separation and clearance
    constraints appear.
    """
    n = assignment.n
    if current.centers.shape[0] != n:
        raise ValueError(
            f"layout holds {current.centers.shape[0]} centres, assignment expects {n}"
        )
    if delta < 0.0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if r_cap < 0.0:
        raise ValueError(f"r_cap must be nonnegative, got {r_cap}")

    cart = np.array(assignment.cart, dtype=np.intp)
    polar = np.array(assignment.polar, dtype=np.intp)
    in_cart = np.zeros(n, dtype=bool)
    in_cart[cart] = True

    var_a = np.full(n, -1, dtype=np.intp)
    var_b = np.full(n, -1, dtype=np.intp)
    slot = 1
    for i in assignment.cart:
        var_a[i], var_b[i] = slot, slot + 1
        slot += 2
    for i in assignment.polar:
        var_a[i], var_b[i] = slot, slot + 1
        slot += 2

    nv = 2 * n + 1
    lower = np.empty(nv, dtype=float)
    upper = np.empty(nv, dtype=float)
    lower[0], upper[0] = 0.0, r_cap
    if len(cart):
        cx = current.centers[cart, 0]
        cy = current.centers[cart, 1]
        lower[var_a[cart]] = np.maximum(-1.0, cx - delta)
        upper[var_a[cart]] = np.minimum(1.0, cx + delta)
        lower[var_b[cart]] = np.maximum(-1.0, cy - delta)
        upper[var_b[cart]] = np.minimum(1.0, cy + delta)
    if len(polar):
        lower[var_a[polar]] = 0.0
        upper[var_a[polar]] = 1.0
        lower[var_b[polar]] = 0.0
        upper[var_b[polar]] = TWO_PI

    fc = instance.prohibited_centers()
    fr = instance.prohibited_radii()
    fdist, ftheta = instance.prohibited_polar()
    k = fc.shape[0]

    tags: list[tuple[int, tuple[int, ...]]] = []
    row = 0
    pos2 = np.arange(len(cart), dtype=np.intp)
    for i in assignment.cart:
        tags.append((FAMILY_CONTAINMENT_CART, (i,)))
    row += len(cart)
    pos3 = np.arange(row, row + len(polar), dtype=np.intp)
    for i in assignment.polar:
        tags.append((FAMILY_CONTAINMENT_POLAR, (i,)))
    row += len(polar)

    cc_rows: list[tuple[int, int, int]] = []
    cp_rows: list[tuple[int, int, int]] = []
    pp_rows: list[tuple[int, int, int]] = []
    for i, j in pairs.circle_pairs:
        if not (0 <= i < n and 0 <= j < n and i != j):
            raise ValueError(f"pair ({i}, {j}) references circles outside the assignment")
        if in_cart[i] and in_cart[j]:
            cc_rows.append((row, i, j))
            tags.append((FAMILY_PAIR_CART_CART, (i, j)))
        elif in_cart[i]:
            cp_rows.append((row, i, j))
            tags.append((FAMILY_PAIR_CART_POLAR, (i, j)))
        elif in_cart[j]:
            cp_rows.append((row, j, i))
            tags.append((FAMILY_PAIR_CART_POLAR, (i, j)))
        else:
            pp_rows.append((row, i, j))
            tags.append((FAMILY_PAIR_POLAR_POLAR, (i, j)))
        row += 1

    cf_rows: list[tuple[int, int, int]] = []
    pf_rows: list[tuple[int, int, int]] = []
    for i, f in pairs.prohibited_pairs:
        if not (0 <= i < n and 0 <= f < k):
            raise ValueError(f"pair ({i}, {f}) references an unknown circle or disk")
        if in_cart[i]:
            cf_rows.append((row, i, f))
            tags.append((FAMILY_PROHIBITED_CART, (i, f)))
        else:
            pf_rows.append((row, i, f))
            tags.append((FAMILY_PROHIBITED_POLAR, (i, f)))
        row += 1

    def ids(rows_list: list[tuple[int, int, int]]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        arr = np.array(rows_list, dtype=np.intp).reshape(-1, 3)
        return arr[:, 0], arr[:, 1], arr[:, 2]

    blocks = {}
    blocks["eq2"] = (pos2, var_a[cart], var_b[cart])
    blocks["eq3"] = (pos3, var_a[polar])
    p, i_, j_ = ids(cc_rows)
    blocks["cc"] = (p, var_a[i_], var_b[i_], var_a[j_], var_b[j_])
    p, i_, j_ = ids(cp_rows)
    blocks["cp"] = (p, var_a[i_], var_b[i_], var_a[j_], var_b[j_])
    p, i_, j_ = ids(pp_rows)
    blocks["pp"] = (p, var_a[i_], var_b[i_], var_a[j_], var_b[j_])
    p, i_, f_ = ids(cf_rows)
    blocks["cf"] = (p, var_a[i_], var_b[i_], fc[f_, 0], fc[f_, 1], fr[f_])
    p, i_, f_ = ids(pf_rows)
    blocks["pf"] = (p, var_a[i_], var_b[i_], fdist[f_], ftheta[f_], fr[f_])

    return NlpProblem(n, cart, polar, var_a, var_b, lower, upper, tags, r_cap, blocks)


def evaluate(
    problem: NlpProblem, point: Sequence[float]
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Objective, constraint values, and their analytic gradients.

    Returns (objective, constraints, objective_gradient, jacobian) with
    the objective being the common radius (to maximise) and constraints
    in the canonical g >= 0 orientation.
    """
    z = np.asarray(point, dtype=float)
    if z.shape != (problem.nv,):
        raise ValueError(f"point must have shape ({problem.nv},), got {z.shape}")
    values = problem.constraint_values(z)
    jac = problem.jacobian(z)
    grad_obj = np.zeros(problem.nv, dtype=float)
    grad_obj[0] = 1.0
    return float(z[0]), values, grad_obj, jac
