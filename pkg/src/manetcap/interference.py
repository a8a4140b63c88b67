"""Activation frequencies of directed links around each center node.

For a center ``c`` the local universe is every directed link of the subgraph
induced by the 2-neighborhood of ``c``, minus the links touching ``c``.
Frequencies come either from Monte Carlo runs of a randomized
maximal-independent-set builder (node-fair or link-fair) or from exact
enumeration of all maximal independent sets, each counted once.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .topology import ConflictGraph, InterferenceModel, Link, Topology, conflict_graph, k_neighborhood, transmitter_receiver

NODE_FAIR = "node-fair"
LINK_FAIR = "link-fair"
EXACT = "exact-equiprobable"
MODES = (NODE_FAIR, LINK_FAIR, EXACT)

# enumeration of maximal independent sets is exponential
MAX_EXACT_LINKS = 24
DEFAULT_ROUNDS = 10_000


class NeighborhoodTooLarge(ValueError):
    pass


def local_conflict_graph(t: Topology, c: int, model: InterferenceModel = transmitter_receiver) -> ConflictGraph:
    """Conflict graph of the 2-neighborhood of ``c`` without the links incident to ``c``."""
    return conflict_graph(t, k_neighborhood(t, c, 2), model).without_nodes([c])


def center_rng(seed: int | None, center: int) -> np.random.Generator:
    """Independent stream per center, derived from ``seed``."""
    entropy = [center] if seed is None else [seed, center]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def sample_batch(cg: ConflictGraph, mode: str, rounds: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``rounds`` maximal independent sets at once.

    Returns a ``(rounds, len(cg))`` boolean matrix whose rows are the sampled
    sets in ``cg.links`` order.

    ``node-fair``: repeatedly pick a node uniformly among those that still
    have an available outgoing link, then one of its available links
    uniformly. ``link-fair``: pick an available link uniformly. After every
    activation the chosen link and everything conflicting with it become
    unavailable. Picking a node with no available link only marks it blocked
    without changing anything else, so restricting the draw to productive
    nodes yields the same distribution.
    """
    return _run(cg, mode, rounds, rng)[0]


def _run(cg: ConflictGraph, mode: str, rounds: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Sampled sets plus, per link, the summed probability of being picked at each visited state."""
    if mode not in (NODE_FAIR, LINK_FAIR):
        raise ValueError(f"unknown sampling mode {mode!r}")
    n_links = len(cg)
    chosen = np.zeros((rounds, n_links), dtype=bool)
    acc = np.zeros(n_links)
    if n_links == 0 or rounds == 0:
        return chosen, acc
    blocks = cg.matrix()
    np.fill_diagonal(blocks, True)
    avail = np.ones((rounds, n_links), dtype=bool)
    if mode == NODE_FAIR:
        sources = sorted({l[0] for l in cg.links})
        col = {u: j for j, u in enumerate(sources)}
        src = np.array([col[l[0]] for l in cg.links])
        outgoing = np.zeros((n_links, len(sources)), dtype=np.int32)
        outgoing[np.arange(n_links), src] = 1
        owned = outgoing.T.astype(bool)
    rows = np.arange(rounds)
    while rows.size:
        a = avail[rows]
        if mode == LINK_FAIR:
            acc += (a / a.sum(axis=1, keepdims=True)).sum(axis=0)
            keys = rng.random(a.shape)
            keys[~a] = -1.0
        else:
            out_count = a.astype(np.int32) @ outgoing
            productive = out_count > 0
            per_link = np.maximum(out_count[:, src], 1) * productive.sum(axis=1, keepdims=True)
            acc += (a / per_link).sum(axis=0)
            nkeys = rng.random(productive.shape)
            nkeys[~productive] = -1.0
            node = nkeys.argmax(axis=1)
            keys = rng.random(a.shape)
            keys[~(a & owned[node])] = -1.0
        pick = keys.argmax(axis=1)
        chosen[rows, pick] = True
        avail[rows] = a & ~blocks[pick]
        rows = rows[avail[rows].any(axis=1)]
    return chosen, acc


def _to_set(cg: ConflictGraph, row: np.ndarray) -> frozenset[Link]:
    return frozenset(cg.links[i] for i in np.flatnonzero(row))


def sample_mis_node_fair(cg: ConflictGraph, seed=None) -> frozenset[Link]:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _to_set(cg, sample_batch(cg, NODE_FAIR, 1, rng)[0])


def sample_mis_link_fair(cg: ConflictGraph, seed=None) -> frozenset[Link]:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _to_set(cg, sample_batch(cg, LINK_FAIR, 1, rng)[0])


def maximal_independent_sets(cg: ConflictGraph, limit: int = MAX_EXACT_LINKS) -> list[frozenset[Link]]:
    """All inclusion-maximal independent sets (Bron-Kerbosch with pivoting)."""
    n = len(cg)
    if n > limit:
        raise NeighborhoodTooLarge(f"neighborhood too large: {n} links > {limit}")
    if n == 0:
        return [frozenset()]
    m = cg.matrix()
    full = (1 << n) - 1
    compat = [full & ~(1 << i) & ~sum(1 << int(j) for j in np.flatnonzero(m[i])) for i in range(n)]
    found: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if not p:
            if not x:
                found.append(r)
            return
        pivot = max(_bits(p | x), key=lambda u: (p & compat[u]).bit_count())
        for v in _bits(p & ~compat[pivot]):
            expand(r | 1 << v, p & compat[v], x & compat[v])
            p &= ~(1 << v)
            x |= 1 << v

    expand(0, full, 0)
    sets = [frozenset(cg.links[i] for i in _bits(r)) for r in found]
    return sorted(sets, key=sorted)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def exact_freq(t: Topology, c: int, model: InterferenceModel = transmitter_receiver) -> dict[Link, float]:
    """Share of maximal independent sets that contain each link."""
    cg = local_conflict_graph(t, c, model)
    sets = maximal_independent_sets(cg)
    counts = dict.fromkeys(cg.links, 0)
    for s in sets:
        for l in s:
            counts[l] += 1
    return {l: k / len(sets) for l, k in counts.items()}


def estimate_freq(
    t: Topology,
    c: int,
    mode: str,
    rounds: int = DEFAULT_ROUNDS,
    seed: int | None = None,
    model: InterferenceModel = transmitter_receiver,
    estimator: str = "count",
) -> dict[Link, float]:
    """Monte Carlo activation frequency of each link in the universe of ``c``.

    ``estimator="count"`` is the share of sampled sets containing the link.
    ``estimator="conditional"`` averages, over the same sampled runs, the
    exact probability that the link is picked at each visited state. Both
    have the same expectation; the conditional one has lower variance and
    never falls below the exact first-pick probability. It is clipped to 1.
    """
    if mode == EXACT:
        return exact_freq(t, c, model)
    return sample_freq(local_conflict_graph(t, c, model), mode, rounds, center_rng(seed, c), estimator)


def sample_freq(
    cg: ConflictGraph,
    mode: str,
    rounds: int,
    rng: np.random.Generator,
    estimator: str = "count",
) -> dict[Link, float]:
    """Monte Carlo link frequencies on an arbitrary conflict graph."""
    if rounds < 1:
        raise ValueError("need at least one round")
    if estimator not in ("count", "conditional"):
        raise ValueError(f"unknown estimator {estimator!r}")
    samples, acc = _run(cg, mode, rounds, rng)
    if estimator == "count":
        est = samples.sum(axis=0) / rounds
    else:
        est = np.minimum(acc / rounds, 1.0)
    return {l: float(f) for l, f in zip(cg.links, est)}


@dataclass
class FreqTable:
    """Per-center link frequencies.

    ``modes`` records how each center was computed; ``rounds`` is the Monte
    Carlo sample count (unused by exact centers).
    """

    entries: dict[int, dict[Link, float]] = field(default_factory=dict)
    modes: dict[int, str] = field(default_factory=dict)
    rounds: int = DEFAULT_ROUNDS

    @property
    def mode(self) -> str:
        kinds = set(self.modes.values())
        return kinds.pop() if len(kinds) == 1 else "mixed"

    def __getitem__(self, c: int) -> dict[Link, float]:
        return self.entries[c]

    def centers(self) -> list[int]:
        return sorted(self.entries)

    def relabel(self, perm) -> "FreqTable":
        return FreqTable(
            {perm[c]: {(perm[u], perm[v]): f for (u, v), f in e.items()} for c, e in self.entries.items()},
            {perm[c]: m for c, m in self.modes.items()},
            self.rounds,
        )


def freq_table(
    t: Topology,
    fairness: str = "node",
    *,
    rounds: int = DEFAULT_ROUNDS,
    seed: int | None = 0,
    exact: str | bool = "auto",
    centers: Iterable[int] | None = None,
    model: InterferenceModel = transmitter_receiver,
    estimator: str = "conditional",
) -> FreqTable:
    """Frequencies for every center.

    ``exact="auto"`` enumerates centers whose universe has at most
    ``MAX_EXACT_LINKS`` links and samples the rest; ``True`` always
    enumerates (and raises on large neighborhoods); ``False`` always samples.
    """
    sampler = {"node": NODE_FAIR, "link": LINK_FAIR}[fairness]
    ft = FreqTable(rounds=rounds)
    for c in t.nodes if centers is None else centers:
        cg = local_conflict_graph(t, c, model)
        use_exact = exact is True or (exact == "auto" and len(cg) <= MAX_EXACT_LINKS)
        if use_exact:
            ft.entries[c] = exact_freq(t, c, model)
            ft.modes[c] = EXACT
        else:
            ft.entries[c] = estimate_freq(t, c, sampler, rounds, seed, model, estimator)
            ft.modes[c] = sampler
    return ft


def write_freq_csv(ft: FreqTable, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["center", "src", "dst", "freq", "mode", "rounds"])
        for c in ft.centers():
            mode = ft.modes.get(c, "")
            rounds = 0 if mode == EXACT else ft.rounds
            for (u, v), f in sorted(ft.entries[c].items()):
                w.writerow([c, u, v, repr(f), mode, rounds])


def read_freq_csv(path: str | Path) -> FreqTable:
    ft = FreqTable()
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            c = int(row["center"])
            ft.entries.setdefault(c, {})[(int(row["src"]), int(row["dst"]))] = float(row["freq"])
            ft.modes[c] = row["mode"]
            if int(row["rounds"]):
                ft.rounds = int(row["rounds"])
    return ft
