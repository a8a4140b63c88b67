"""Reference computations kept independent of the code under test."""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import numpy as np

from manetcap.lp import LinearProgram


def choice_tree_freq(links, conflicts, mode):
    """Exact probability that each link ends up selected by the randomized builder.

    Expands the full decision tree of the node-fair or link-fair algorithm with
    rational arithmetic. ``conflicts`` maps a link to the links it blocks.
    """
    links = tuple(sorted(links))

    @lru_cache(maxsize=None)
    def expand(avail: frozenset) -> dict:
        if not avail:
            return {}
        branches = []
        if mode == "link-fair":
            for l in sorted(avail):
                branches.append((Fraction(1, len(avail)), l))
        else:
            nodes = sorted({l[0] for l in avail})
            for u in nodes:
                mine = sorted(l for l in avail if l[0] == u)
                for l in mine:
                    branches.append((Fraction(1, len(nodes) * len(mine)), l))
        out: dict = {}
        for p, l in branches:
            rest = avail - {l} - set(conflicts[l])
            out[l] = out.get(l, 0) + p
            for k, q in expand(frozenset(rest)).items():
                out[k] = out.get(k, 0) + p * q
        return out

    probs = expand(frozenset(links))
    return {l: probs.get(l, Fraction(0)) for l in links}


def all_maximal_independent_sets(links, conflicts):
    """Brute force over all subsets."""
    links = sorted(links)
    found = []
    for k in range(len(links) + 1):
        for combo in itertools.combinations(links, k):
            s = set(combo)
            if any(b in conflicts[a] for a in combo for b in combo if a != b):
                continue
            if all(l in s or (set(conflicts[l]) & s) for l in links):
                found.append(frozenset(combo))
    return found


def bfs_hops(adj, src):
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return dist


def vertex_enumeration_max(c, a_ub, b_ub, a_eq=None, b_eq=None, tol=1e-9):
    """Maximize ``c.x`` over ``a_ub x <= b_ub, a_eq x = b_eq, x >= 0`` by visiting every basic solution.

    Returns ``None`` when no basic feasible solution exists. The caller must
    make sure the problem is bounded.
    """
    n = len(c)
    a_eq = np.zeros((0, n)) if a_eq is None else np.asarray(a_eq, float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, float)
    # equalities become pairs of opposite inequalities so redundant ones are harmless
    rows = np.vstack([np.asarray(a_ub, float).reshape(-1, n), a_eq, -a_eq, -np.eye(n)])
    rhs = np.concatenate([np.asarray(b_ub, float), b_eq, -b_eq, np.zeros(n)])
    best = None
    for active in itertools.combinations(range(len(rhs)), n):
        m = rows[list(active)]
        if abs(np.linalg.det(m)) < 1e-12:
            continue
        x = np.linalg.solve(m, rhs[list(active)])
        if np.all(rows @ x <= rhs + tol * np.maximum(1.0, np.abs(rhs))):
            val = float(c @ x)
            if best is None or val > best:
                best = val
    return best


def random_lp(rng, n):
    """Feasible and bounded by construction: rows are built around a known point."""
    x0 = rng.random(n)
    lp = LinearProgram([f"x{j}" for j in range(n)])
    for i in range(rng.integers(1, 7)):
        a = rng.uniform(-1, 1, n)
        a[rng.random(n) < 0.3] = 0.0
        coeffs = {f"x{j}": float(a[j]) for j in range(n) if a[j]}
        if not coeffs:
            continue
        sense = rng.choice(["<=", ">=", "="], p=[0.6, 0.3, 0.1])
        act = float(a @ x0)
        rhs = act + rng.random() if sense == "<=" else act - rng.random() if sense == ">=" else act
        lp.add(f"r{i}", coeffs, str(sense), rhs)
    lp.add("box", {v: 1.0 for v in lp.variables}, "<=", float(n + 2))
    lp.objective = {v: float(c) for v, c in zip(lp.variables, rng.uniform(-1, 1, n))}
    return lp
