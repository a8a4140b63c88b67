"""Radio topologies, neighborhoods, linegraphs and conflict graphs.

Node identifiers are dense integers ``0..n-1``. Neighborhoods are closed:
``k_neighborhood(t, u, k)`` always contains ``u``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

Link = tuple[int, int]


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Topology:
    """Undirected radio graph.

    ``positions`` and ``radio_range`` are ``None`` for hand-built graphs
    given by an explicit edge list.
    """

    adj: tuple[frozenset[int], ...]
    positions: np.ndarray | None = field(default=None, compare=False)
    radio_range: float | None = None
    ap: int | None = None

    def __post_init__(self):
        n = len(self.adj)
        for u, nbrs in enumerate(self.adj):
            if u in nbrs:
                raise TopologyError(f"self-loop on node {u}")
            for v in nbrs:
                if not 0 <= v < n:
                    raise TopologyError(f"unknown node {v}")
                if u not in self.adj[v]:
                    raise TopologyError(f"asymmetric edge {u}-{v}")
        if self.ap is not None and not 0 <= self.ap < n:
            raise TopologyError(f"access point {self.ap} is not a node")

    @classmethod
    def from_positions(cls, positions, radio_range: float, ap: int | None = None) -> "Topology":
        pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
        if radio_range <= 0:
            raise TopologyError("radio range must be positive")
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=-1))
        within = dist <= radio_range
        np.fill_diagonal(within, False)
        adj = tuple(frozenset(np.flatnonzero(row).tolist()) for row in within)
        return cls(adj=adj, positions=pos, radio_range=float(radio_range), ap=ap)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], ap: int | None = None) -> "Topology":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise TopologyError(f"edge {u}-{v} references an unknown node")
            if u == v:
                raise TopologyError(f"self-loop on node {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(adj=tuple(frozenset(s) for s in nbrs), ap=ap)

    @property
    def n(self) -> int:
        return len(self.adj)

    @property
    def nodes(self) -> range:
        return range(len(self.adj))

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as ``(u, v)`` with ``u < v``, sorted."""
        return sorted((u, v) for u in self.nodes for v in self.adj[u] if u < v)

    def links(self) -> list[Link]:
        """Both orientations of every edge, sorted."""
        return sorted((u, v) for u in self.nodes for v in self.adj[u])

    def average_degree(self) -> float:
        return 2 * len(self.edges()) / self.n if self.n else 0.0

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return len(k_neighborhood(self, 0, self.n)) == self.n

    def closed_neighbors(self, u: int) -> frozenset[int]:
        return self.adj[u] | {u}

    def with_ap(self, ap: int | None) -> "Topology":
        return Topology(adj=self.adj, positions=self.positions, radio_range=self.radio_range, ap=ap)

    def relabel(self, perm: Sequence[int]) -> "Topology":
        """Return the isomorphic topology where node ``u`` becomes ``perm[u]``."""
        n = self.n
        if sorted(perm) != list(range(n)):
            raise TopologyError("relabeling must be a permutation of the node ids")
        adj: list[frozenset[int]] = [frozenset()] * n
        for u in self.nodes:
            adj[perm[u]] = frozenset(perm[v] for v in self.adj[u])
        pos = None
        if self.positions is not None:
            pos = np.empty_like(self.positions)
            pos[list(perm)] = self.positions
        ap = None if self.ap is None else perm[self.ap]
        return Topology(adj=tuple(adj), positions=pos, radio_range=self.radio_range, ap=ap)


def _check_node(t: Topology, u: int) -> None:
    if not isinstance(u, (int, np.integer)) or not 0 <= u < t.n:
        raise TopologyError(f"unknown node {u!r}")


def k_neighborhood(t: Topology, u: int, k: int) -> frozenset[int]:
    """Nodes at most ``k`` hops from ``u``, ``u`` included."""
    _check_node(t, u)
    if k < 0:
        raise ValueError("hop count must be non-negative")
    seen = {u}
    frontier = [u]
    for _ in range(k):
        nxt = []
        for x in frontier:
            for y in t.adj[x]:
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if not nxt:
            break
        frontier = nxt
    return frozenset(seen)


def hop_distances(t: Topology, src: int) -> list[int]:
    """BFS hop counts from ``src``; unreachable nodes get -1."""
    dist = [-1] * t.n
    dist[src] = 0
    queue = deque([src])
    while queue:
        x = queue.popleft()
        for y in t.adj[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def unit_square_degree_range(n: int, target_degree: float) -> float:
    """Radio range giving expected degree ``target_degree`` for ``n`` uniform points in [0,1]^2.

    Uses the exact probability that two uniform points in the unit square lie
    within distance r (valid for r <= 1): pi r^2 - 8 r^3 / 3 + r^4 / 2.
    """
    if n < 2:
        return math.sqrt(2.0)
    target = target_degree / (n - 1)
    if target >= 1.0:
        return math.sqrt(2.0)
    # reaches 0.9749... at r=1; beyond that fall back to the diagonal
    p1 = math.pi - 8 / 3 + 0.5
    if target >= p1:
        return math.sqrt(2.0)
    return brentq(lambda r: math.pi * r * r - 8 * r**3 / 3 + r**4 / 2 - target, 0.0, 1.0, xtol=1e-14)


def generate_unit_disk(
    n: int,
    target_degree: float,
    seed: int | None = None,
    *,
    radio_range: float | None = None,
    ap: int | None = None,
    max_tries: int = 1000,
) -> Topology:
    """Connected random unit-disk graph with ``n`` nodes in the unit square.

    A target degree of ``n - 1`` or more yields the complete graph.

    The whole placement is redrawn until connected, at most ``max_tries`` times.
    """
    if n < 1:
        raise ValueError("need at least one node")
    if not target_degree > 0:
        raise ValueError("target degree must be positive")
    r = unit_square_degree_range(n, target_degree) if radio_range is None else radio_range
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        t = Topology.from_positions(rng.random((n, 2)), r, ap=ap)
        if t.is_connected():
            return t
    raise TopologyError(f"cannot achieve connectivity after {max_tries} placements (n={n}, range={r:.4g})")


def line_topology(n: int) -> Topology:
    """AP (node 0) followed by ``n`` nodes in a chain: 0-1-2-...-n."""
    return Topology.from_edges(n + 1, [(i, i + 1) for i in range(n)], ap=0)


# -- conflict graphs -----------------------------------------------------------

InterferenceModel = Callable[[Topology, Link, Link], bool]


def transmitter_receiver(t: Topology, a: Link, b: Link) -> bool:
    """Two links interfere when they share a node or any endpoints are neighbors."""
    u, v = a
    x, y = b
    if {u, v} & {x, y}:
        return True
    au, av = t.adj[u], t.adj[v]
    return x in au or y in au or x in av or y in av


@dataclass(frozen=True)
class ConflictGraph:
    """Directed links and a symmetric conflict relation between them."""

    links: tuple[Link, ...]
    conflicts: dict[Link, frozenset[Link]]

    def __len__(self) -> int:
        return len(self.links)

    def __contains__(self, link) -> bool:
        return link in self.conflicts

    def conflict(self, a: Link, b: Link) -> bool:
        return b in self.conflicts[a]

    def index(self) -> dict[Link, int]:
        return {l: i for i, l in enumerate(self.links)}

    def matrix(self) -> np.ndarray:
        """Boolean conflict matrix in ``links`` order."""
        idx = self.index()
        m = np.zeros((len(self.links), len(self.links)), dtype=bool)
        for a, others in self.conflicts.items():
            i = idx[a]
            for b in others:
                m[i, idx[b]] = True
        return m

    def is_independent(self, members: Iterable[Link]) -> bool:
        members = list(members)
        return not any(self.conflict(a, b) for i, a in enumerate(members) for b in members[i + 1 :])

    def is_maximal_independent(self, members: Iterable[Link]) -> bool:
        chosen = set(members)
        if not self.is_independent(chosen):
            return False
        return all(l in chosen or self.conflicts[l] & chosen for l in self.links)

    def without_nodes(self, nodes: Iterable[int]) -> "ConflictGraph":
        """Drop every link touching one of ``nodes``."""
        drop = set(nodes)
        keep = tuple(l for l in self.links if l[0] not in drop and l[1] not in drop)
        kept = set(keep)
        return ConflictGraph(keep, {l: self.conflicts[l] & kept for l in keep})


def _induced_links(t: Topology, subset: Iterable[int]) -> list[Link]:
    s = set(subset)
    for u in s:
        _check_node(t, u)
    return sorted((u, v) for u in s for v in t.adj[u] if v in s)


def linegraph(t: Topology, subset: Iterable[int] | None = None) -> ConflictGraph:
    """Directed linegraph of the subgraph induced by ``subset``: links adjacent iff they share a node."""
    links = _induced_links(t, t.nodes if subset is None else subset)
    by_node: dict[int, set[Link]] = {}
    for l in links:
        by_node.setdefault(l[0], set()).add(l)
        by_node.setdefault(l[1], set()).add(l)
    conflicts = {l: frozenset((by_node[l[0]] | by_node[l[1]]) - {l}) for l in links}
    return ConflictGraph(tuple(links), conflicts)


def conflict_graph(
    t: Topology,
    subset: Iterable[int] | None = None,
    model: InterferenceModel = transmitter_receiver,
) -> ConflictGraph:
    """Conflict graph over the directed links induced by ``subset``.

    With the default transmitter-receiver model this is the 2-closure of the
    linegraph. Any symmetric predicate ``model(t, a, b)`` can be supplied.
    """
    links = _induced_links(t, t.nodes if subset is None else subset)
    conflicts: dict[Link, set[Link]] = {l: set() for l in links}
    for i, a in enumerate(links):
        for b in links[i + 1 :]:
            if model(t, a, b):
                conflicts[a].add(b)
                conflicts[b].add(a)
    return ConflictGraph(tuple(links), {l: frozenset(s) for l, s in conflicts.items()})


def link_two_neighborhood(t: Topology, e: Link) -> frozenset[Link]:
    """Links within two hops of ``e`` in the linegraph of ``t``, ``e`` included.

    Equivalent to every link with an endpoint in the closed neighborhood of
    either end of ``e``.
    """
    u, v = e
    if v not in t.adj[u]:
        raise TopologyError(f"{e} is not a link")
    area = t.closed_neighbors(u) | t.closed_neighbors(v)
    out = set()
    for x in area:
        for y in t.adj[x]:
            out.add((x, y))
            out.add((y, x))
    return frozenset(out)


# -- file format ---------------------------------------------------------------


def _parse_error(path, lineno: int, msg: str) -> TopologyError:
    return TopologyError(f"{path}:{lineno}: {msg}")


def read_topology(path: str | Path) -> Topology:
    """Parse the line-oriented topology format.

    Header ``nodes <n> [range <r>] [ap <id>]`` followed by either
    ``node <id> <x> <y>`` lines (edges derived from the range) or
    ``edge <u> <v>`` lines. ``#`` starts a comment.
    """
    path = Path(path)
    n = None
    radio_range = None
    ap = None
    coords: dict[int, tuple[float, float]] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "nodes":
                if n is not None:
                    raise _parse_error(path, lineno, "duplicate header")
                n = int(tok[1])
                rest = tok[2:]
                if len(rest) % 2:
                    raise _parse_error(path, lineno, "malformed header")
                for key, val in zip(rest[::2], rest[1::2]):
                    if key == "range":
                        radio_range = float(val)
                    elif key == "ap":
                        ap = int(val)
                    else:
                        raise _parse_error(path, lineno, f"unknown header field {key!r}")
            elif n is None:
                raise _parse_error(path, lineno, "missing 'nodes' header")
            elif tok[0] == "node" and len(tok) == 4:
                coords[int(tok[1])] = (float(tok[2]), float(tok[3]))
            elif tok[0] == "edge" and len(tok) == 3:
                edges.append((int(tok[1]), int(tok[2])))
            else:
                raise _parse_error(path, lineno, f"cannot parse {line!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, TopologyError):
                raise
            raise _parse_error(path, lineno, f"cannot parse {line!r}") from exc
    if n is None:
        raise TopologyError(f"{path}: empty topology file")
    if coords and edges:
        raise TopologyError(f"{path}: mixes node coordinates and explicit edges")
    if coords:
        if radio_range is None:
            raise TopologyError(f"{path}: coordinates need a 'range' in the header")
        if sorted(coords) != list(range(n)):
            raise TopologyError(f"{path}: expected coordinates for nodes 0..{n - 1}")
        return Topology.from_positions([coords[i] for i in range(n)], radio_range, ap=ap)
    return Topology.from_edges(n, edges, ap=ap)


def write_topology(t: Topology, path: str | Path) -> None:
    head = f"nodes {t.n}"
    if t.positions is not None:
        head += f" range {t.radio_range!r}"
    if t.ap is not None:
        head += f" ap {t.ap}"
    lines = [head]
    if t.positions is not None:
        lines += [f"node {i} {x!r} {y!r}" for i, (x, y) in enumerate(t.positions.tolist())]
    else:
        lines += [f"edge {u} {v}" for u, v in t.edges()]
    Path(path).write_text("\n".join(lines) + "\n")
