"""Capacity linear programs for the four resource-sharing models.

Variables (all non-negative, bandwidth normalized to 1):

* ``f_<id>``: throughput of route ``id``;
* ``T_<u>_<v>``: traffic on directed link ``(u, v)``, only for links some route uses;
* ``N_<u>``: the medium share of node ``u``, at least its data plus control load;
* ``z``: the guaranteed per-flow rate under the max-min objective.

Row names encode their origin: ``flow_u_v``, ``load_u``, ``pnode_c<c>_u<u>``,
``split_u_v``, ``opt_c<c>_u_v``, ``pedge_e<u>_<v>_f<x>_<y>``, ``maxmin_<id>``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .interference import DEFAULT_ROUNDS, FreqTable, freq_table
from .lp import LinearProgram
from .routing import RouteSet
from .solver import OPTIMAL, Certificate, Solution, solve, verify
from .topology import Link, Topology, k_neighborhood, link_two_neighborhood

BW = 1.0
BOUNDS = ("pessimistic", "optimistic")
FAIRNESS = ("node", "link")
OBJECTIVES = ("max-sum", "max-min")


class CapacityModelError(ValueError):
    pass


def flow_var(route_id: int) -> str:
    return f"f_{route_id}"


def link_var(link: Link) -> str:
    return f"T_{link[0]}_{link[1]}"


def node_var(u: int) -> str:
    return f"N_{u}"


def link_usage(rs: RouteSet) -> dict[Link, list[int]]:
    """Route ids crossing each directed link, links sorted."""
    use: dict[Link, list[int]] = defaultdict(list)
    for r in rs.routes:
        for l in r.links():
            use[l].append(r.id)
    return dict(sorted(use.items()))


def new_program(t: Topology, rs: RouteSet) -> LinearProgram:
    lp = LinearProgram()
    for r in rs.routes:
        lp.add_variable(flow_var(r.id))
    for l in link_usage(rs):
        lp.add_variable(link_var(l))
    for u in t.nodes:
        lp.add_variable(node_var(u))
    return lp


def traffic_coupling(t: Topology, rs: RouteSet, lp: LinearProgram) -> None:
    """Link traffic is the sum of the routes crossing it; node share covers its load.

    ``N_u`` is a share, not the load itself: ``N_u >= sum_v T(u,v) + T_c(u)``.
    """
    usage = link_usage(rs)
    for (u, v), ids in usage.items():
        coeffs = {link_var((u, v)): 1.0}
        for i in ids:
            coeffs[flow_var(i)] = coeffs.get(flow_var(i), 0.0) - 1.0
        lp.add(f"flow_{u}_{v}", coeffs, "=", 0.0)
    out: dict[int, list[Link]] = defaultdict(list)
    for l in usage:
        out[l[0]].append(l)
    for u in t.nodes:
        coeffs = {node_var(u): 1.0}
        for l in out[u]:
            coeffs[link_var(l)] = -1.0
        lp.add(f"load_{u}", coeffs, ">=", rs.control_of(u))


def _split(t: Topology, rs: RouteSet, lp: LinearProgram) -> None:
    # T(u,v) <= (N_u - T_c(u)) / (Delta(u) - 1), written as deg * T(u,v) - N_u <= -T_c(u)
    for u, v in link_usage(rs):
        deg = t.degree(u)
        if deg == 0:
            raise CapacityModelError(f"isolated node {u} carries traffic")
        lp.add(f"split_{u}_{v}", {link_var((u, v)): float(deg), node_var(u): -1.0}, "<=", -rs.control_of(u))


def build_pessimistic_node(t: Topology, rs: RouteSet, lp: LinearProgram) -> None:
    """Every node of a 2-neighborhood gets an equal share; each node splits its share evenly per neighbor."""
    for c in t.nodes:
        area = k_neighborhood(t, c, 2)
        share = BW / len(area)
        for u in sorted(area):
            lp.add(f"pnode_c{c}_u{u}", {node_var(u): 1.0}, "<=", share)
    _split(t, rs, lp)


def build_pessimistic_edge(t: Topology, rs: RouteSet, lp: LinearProgram) -> None:
    """Every link of a link's 2-neighborhood in the linegraph gets an equal share."""
    used = link_usage(rs)
    for e in t.links():
        area = link_two_neighborhood(t, e)
        budget = BW - sum(rs.control_of(u) for u, _ in area)
        share = budget / len(area)
        for f in sorted(area):
            if f in used:
                lp.add(f"pedge_e{e[0]}_{e[1]}_f{f[0]}_{f[1]}", {link_var(f): 1.0}, "<=", share)
    _split(t, rs, lp)


def build_optimistic(t: Topology, rs: RouteSet, ft: FreqTable, lp: LinearProgram) -> None:
    """``T(u,v) <= (BW - T(c) - control of c's neighbors) * freq_c(u,v)`` for every center ``c``."""
    used = link_usage(rs)
    covered: set[Link] = set()
    for c in ft.centers():
        ctl = sum(rs.control_of(x) for x in t.adj[c])
        for (u, v), freq in sorted(ft[c].items()):
            if (u, v) not in used:
                continue
            covered.add((u, v))
            coeffs = {link_var((u, v)): 1.0}
            if freq:
                coeffs[node_var(c)] = freq
            lp.add(f"opt_c{c}_{u}_{v}", coeffs, "<=", freq * (BW - ctl))
    missing = [l for l in used if l not in covered]
    if missing:
        raise CapacityModelError(f"no frequency for used link {missing[0]} ({len(missing)} uncovered)")


def add_objective(rs: RouteSet, lp: LinearProgram, kind: str) -> None:
    if kind == "max-sum":
        lp.objective = {flow_var(r.id): 1.0 for r in rs.routes}
    elif kind == "max-min":
        if not rs.routes:
            raise CapacityModelError("max-min needs at least one route")
        lp.add_variable("z")
        for r in rs.routes:
            lp.add(f"maxmin_{r.id}", {flow_var(r.id): 1.0, "z": -1.0}, ">=", 0.0)
        lp.objective = {"z": 1.0}
    else:
        raise CapacityModelError(f"unknown objective {kind!r}")


def build_lp(
    t: Topology,
    rs: RouteSet,
    bound: str = "pessimistic",
    fairness: str = "node",
    objective: str = "max-sum",
    ft: FreqTable | None = None,
) -> LinearProgram:
    """Assemble the full program. The optimistic bound needs ``ft``."""
    if bound not in BOUNDS or fairness not in FAIRNESS:
        raise CapacityModelError(f"unknown model {bound}/{fairness}")
    lp = new_program(t, rs)
    lp.name = f"{bound}-{fairness}-{objective}"
    traffic_coupling(t, rs, lp)
    if bound == "pessimistic" and fairness == "node":
        build_pessimistic_node(t, rs, lp)
    elif bound == "pessimistic":
        build_pessimistic_edge(t, rs, lp)
    else:
        if ft is None:
            raise CapacityModelError("the optimistic bound needs a frequency table")
        build_optimistic(t, rs, ft, lp)
    add_objective(rs, lp, objective)
    return lp


@dataclass
class CapacityReport:
    objective_value: float
    per_flow: dict[int, float]
    per_link: dict[Link, float]
    model: dict[str, str]
    status: str
    lp: LinearProgram = field(repr=False)
    solution: Solution = field(repr=False)
    certificate: Certificate | None = field(default=None, repr=False)

    def recomputed_objective(self) -> float:
        if not self.per_flow:
            return 0.0
        if self.model["objective"] == "max-min":
            return min(self.per_flow.values())
        return sum(self.per_flow.values())


def evaluate(
    t: Topology,
    rs: RouteSet,
    bound: str = "pessimistic",
    fairness: str = "node",
    objective: str = "max-sum",
    *,
    ft: FreqTable | None = None,
    rounds: int = DEFAULT_ROUNDS,
    seed: int | None = 0,
    exact: str | bool = "auto",
    method: str = "auto",
    tol: float = 1e-9,
) -> CapacityReport:
    """Build, solve and certify one capacity program."""
    if bound == "optimistic" and ft is None:
        ft = freq_table(t, fairness, rounds=rounds, seed=seed, exact=exact)
    if objective == "max-min" and not rs.routes:
        raise CapacityModelError("max-min needs at least one route")
    lp = build_lp(t, rs, bound, fairness, objective, ft)
    sol = solve(lp, tol=tol, method=method)
    model = {"bound": bound, "fairness": fairness, "objective": objective}
    if sol.status != OPTIMAL:
        return CapacityReport(float("nan"), {}, {}, model, sol.status, lp, sol)
    cert = verify(lp, sol, tol=tol)
    per_flow = {r.id: sol.values[flow_var(r.id)] for r in rs.routes}
    per_link = {l: sol.values[link_var(l)] for l in link_usage(rs)}
    return CapacityReport(sol.objective, per_flow, per_link, model, sol.status, lp, sol, cert)
