"""Solve and certify capacity linear programs.

Two engines sit behind :func:`solve`:

* ``simplex``: a dense two-phase tableau simplex. Dantzig pricing, switching to
  Bland's rule after ``3 * rows`` pivots without objective progress.
* ``highs``: SciPy's HiGHS interface, used for the larger instances.

``method="auto"`` picks the dense simplex when the tableau is small.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .lp import LinearProgram

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"
NUMERICAL = "numerical-error"

# rows * columns of the dense tableau handled by the in-house simplex
DENSE_LIMIT = 400_000


@dataclass
class Solution:
    status: str
    values: dict[str, float] = field(default_factory=dict)
    objective: float = float("nan")
    iterations: int = 0
    basis_size: int = 0
    method: str = ""

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Dense simplex tableau for ``max c.x  s.t.  rows, x >= 0`` with ``b >= 0``."""

    def __init__(self, t, tol, max_iter):
        self.t = t  # m x (ncols + 1); last column is the rhs
        self.tol = tol
        self.max_iter = max_iter
        self.iterations = 0

    def run(self, cost: np.ndarray, basis: list[int], allowed: np.ndarray) -> str:
        """Maximize ``cost`` over the current basis. Returns a status string."""
        t = self.t
        m = t.shape[0]
        # reduced costs r_j = cost_j - cost_B . column_j
        red = cost - cost[basis] @ t[:, :-1] if m else cost.copy()
        red[~allowed] = 0.0
        obj = float(cost[basis] @ t[:, -1]) if m else 0.0
        stall = 0
        bland = False
        while True:
            if self.iterations >= self.max_iter:
                return ITERATION_LIMIT
            cand = np.flatnonzero((red > self.tol) & allowed)
            if cand.size == 0:
                return OPTIMAL
            enter = int(cand[0]) if bland else int(cand[np.argmax(red[cand])])
            col = t[:, enter]
            pos = np.flatnonzero(col > self.tol)
            if pos.size == 0:
                return UNBOUNDED
            ratios = t[pos, -1] / col[pos]
            best = ratios.min()
            ties = pos[ratios <= best + self.tol * max(1.0, abs(best))]
            leave = int(min(ties, key=lambda i: basis[i]))
            self._pivot(leave, enter)
            basis[leave] = enter
            red = red - red[enter] * t[leave, :-1]
            red[enter] = 0.0
            self.iterations += 1
            new_obj = float(cost[basis] @ t[:, -1])
            if new_obj > obj + self.tol:
                obj = new_obj
                stall = 0
                bland = False
            else:
                stall += 1
                if stall >= 3 * max(m, 1):
                    if not bland:
                        logger.debug("degenerate stall after %d pivots, switching to Bland", self.iterations)
                    bland = True

    def _pivot(self, r: int, c: int) -> None:
        t = self.t
        t[r] /= t[r, c]
        col = t[:, c].copy()
        col[r] = 0.0
        nz = np.flatnonzero(np.abs(col) > 0)
        if nz.size:
            t[nz] -= np.outer(col[nz], t[r])
        t[r, c] = 1.0
        t[nz, c] = 0.0


def _simplex(lp: LinearProgram, tol: float, max_iter: int) -> Solution:
    c, a_ub, b_ub, a_eq, b_eq = lp.matrices()
    n = len(lp.variables)
    a = np.vstack([a_ub.toarray(), a_eq.toarray()]) if n else np.zeros((len(b_ub) + len(b_eq), 0))
    b = np.concatenate([b_ub, b_eq])
    kind = np.array([0] * len(b_ub) + [2] * len(b_eq))  # 0: <=, 1: >=, 2: =
    neg = b < 0
    a[neg] *= -1
    b[neg] *= -1
    kind[neg & (kind == 0)] = 1
    m = len(b)
    slack_rows = np.flatnonzero(kind != 2)
    art_rows = np.flatnonzero(kind != 0)
    n_slack, n_art = len(slack_rows), len(art_rows)
    ncols = n + n_slack + n_art
    t = np.zeros((m, ncols + 1))
    t[:, :n] = a
    for k, i in enumerate(slack_rows):
        t[i, n + k] = 1.0 if kind[i] == 0 else -1.0
    basis = [-1] * m
    for k, i in enumerate(slack_rows):
        if kind[i] == 0:
            basis[i] = n + k
    for k, i in enumerate(art_rows):
        t[i, n + n_slack + k] = 1.0
        basis[i] = n + n_slack + k
    t[:, -1] = b
    tab = _Tableau(t, tol, max_iter)
    art = np.zeros(ncols, dtype=bool)
    art[n + n_slack :] = True

    if n_art:
        cost1 = np.zeros(ncols)
        cost1[art] = -1.0
        status = tab.run(cost1, basis, np.ones(ncols, dtype=bool))
        if status == ITERATION_LIMIT:
            return Solution(ITERATION_LIMIT, iterations=tab.iterations, basis_size=m, method="simplex")
        infeas = -float(cost1[basis] @ tab.t[:, -1])
        if infeas > tol * max(1.0, float(np.abs(b).max(initial=0.0))):
            return Solution(INFEASIBLE, iterations=tab.iterations, basis_size=m, method="simplex")
        # drive remaining artificials out of the basis, dropping redundant rows
        keep = []
        for i in range(m):
            if not art[basis[i]]:
                keep.append(i)
                continue
            row = np.abs(tab.t[i, : n + n_slack])
            j = int(np.argmax(row)) if row.size else -1
            if j >= 0 and row[j] > tol:
                tab._pivot(i, j)
                basis[i] = j
                keep.append(i)
        if len(keep) < m:
            tab.t = tab.t[keep]
            basis = [basis[i] for i in keep]
            m = len(keep)
    cost2 = np.zeros(ncols)
    cost2[:n] = c
    status = tab.run(cost2, basis, ~art)
    x = np.zeros(ncols)
    x[basis] = tab.t[:, -1]
    values = dict(zip(lp.variables, x[:n].tolist()))
    sol = Solution(status, values, float(c @ x[:n]), tab.iterations, m, "simplex")
    if status != OPTIMAL:
        sol.objective = float("nan") if status != ITERATION_LIMIT else sol.objective
    return sol


def _highs(lp: LinearProgram, tol: float, max_iter: int) -> Solution:
    c, a_ub, b_ub, a_eq, b_eq = lp.matrices()
    if not lp.variables:
        return Solution(OPTIMAL, {}, 0.0, 0, 0, "highs")
    res = linprog(
        -c,
        A_ub=a_ub if a_ub.shape[0] else None,
        b_ub=b_ub if a_ub.shape[0] else None,
        A_eq=a_eq if a_eq.shape[0] else None,
        b_eq=b_eq if a_eq.shape[0] else None,
        bounds=(0, None),
        method="highs-ds",
        options={
            "primal_feasibility_tolerance": max(tol * 1e-1, 1e-10),
            "dual_feasibility_tolerance": max(tol * 1e-1, 1e-10),
            "maxiter": max_iter,
            "presolve": True,
        },
    )
    status = {0: OPTIMAL, 1: ITERATION_LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}.get(res.status, NUMERICAL)
    iterations = int(getattr(res, "nit", 0) or 0)
    rows = a_ub.shape[0] + a_eq.shape[0]
    if res.x is None:
        return Solution(status, iterations=iterations, basis_size=rows, method="highs")
    x = np.where(np.abs(res.x) < 1e-13, 0.0, res.x)
    values = dict(zip(lp.variables, x.tolist()))
    return Solution(status, values, float(c @ x), iterations, rows, "highs")


def solve(lp: LinearProgram, tol: float = 1e-9, method: str = "auto", max_iter: int = 100_000) -> Solution:
    """Maximize ``lp``. Infeasible or unbounded problems are reported in ``status``."""
    if method == "auto":
        m = len(lp.constraints)
        width = len(lp.variables) + 2 * m + 1
        method = "simplex" if m * width <= DENSE_LIMIT else "highs"
    if method == "simplex":
        sol = _simplex(lp, tol, max_iter)
    elif method == "highs":
        sol = _highs(lp, tol, max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")
    logger.debug("%s: %s after %d iterations, basis size %d", sol.method, sol.status, sol.iterations, sol.basis_size)
    return sol


# -- certification -------------------------------------------------------------


class CertificationError(RuntimeError):
    def __init__(self, message: str, certificate: "Certificate"):
        super().__init__(message)
        self.certificate = certificate


@dataclass
class Certificate:
    max_violation: float
    worst: str | None
    violated: list[tuple[str, float]]
    objective: float
    objective_error: float

    @property
    def ok(self) -> bool:
        return not self.violated


def verify(lp: LinearProgram, sol: Solution, tol: float = 1e-9, strict: bool = True) -> Certificate:
    """Recheck every row and the objective from the raw values.

    Violations are scaled by ``max(1, |rhs|)``. Negative variables count as
    violations of their implicit ``>= 0`` bound, reported as ``nonneg:<var>``.
    """
    if sol.status != OPTIMAL:
        raise ValueError(f"cannot certify a {sol.status} solution")
    values = sol.values
    violated = []
    worst, worst_name = 0.0, None
    for c in lp.constraints:
        v = c.violation(values) / max(1.0, abs(c.rhs))
        if v > worst:
            worst, worst_name = v, c.name
        if v > tol:
            violated.append((c.name, v))
    for var in lp.variables:
        v = -values.get(var, 0.0)
        if v > worst:
            worst, worst_name = v, f"nonneg:{var}"
        if v > tol:
            violated.append((f"nonneg:{var}", v))
    obj = lp.objective_value(values)
    cert = Certificate(worst, worst_name, violated, obj, abs(obj - sol.objective))
    if strict and violated:
        names = ", ".join(name for name, _ in violated[:10])
        raise CertificationError(f"{len(violated)} violated rows (max {worst:.3g}): {names}", cert)
    return cert
