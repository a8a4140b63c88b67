"""Route sets and per-node control traffic.

Three traffic patterns are supported:

* ``adhoc``: one route per ordered pair of distinct nodes.
* ``hybrid``: one route to and one route from the access point per other node.
* ``uplink``: only the routes toward the access point.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .topology import Topology, TopologyError, hop_distances

PATTERNS = ("adhoc", "hybrid", "uplink")


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class Route:
    id: int
    path: tuple[int, ...]

    @property
    def src(self) -> int:
        return self.path[0]

    @property
    def dst(self) -> int:
        return self.path[-1]

    @property
    def hops(self) -> int:
        return len(self.path) - 1

    def links(self) -> list[tuple[int, int]]:
        return list(zip(self.path, self.path[1:]))


@dataclass(frozen=True)
class RouteSet:
    routes: tuple[Route, ...]
    control: Mapping[int, float] = field(default_factory=dict)
    pattern: str = "adhoc"

    def __len__(self) -> int:
        return len(self.routes)

    def __iter__(self):
        return iter(self.routes)

    def control_of(self, u: int) -> float:
        return self.control.get(u, 0.0)

    def with_control(self, control: Mapping[int, float]) -> "RouteSet":
        return RouteSet(self.routes, dict(control), self.pattern)

    def validate(self, t: Topology) -> None:
        for r in self.routes:
            check_path(t, r.path, where=f"route {r.id}")
        for u, c in self.control.items():
            if not 0 <= u < t.n:
                raise RoutingError(f"control traffic for unknown node {u}")
            if not 0 <= c < 1:
                raise RoutingError(f"control traffic of node {u} must lie in [0, 1), got {c}")

    def relabel(self, perm) -> "RouteSet":
        routes = tuple(Route(r.id, tuple(perm[u] for u in r.path)) for r in self.routes)
        return RouteSet(routes, {perm[u]: c for u, c in self.control.items()}, self.pattern)


def check_path(t: Topology, path, where: str = "route") -> None:
    if len(path) < 2:
        raise RoutingError(f"{where}: needs at least two nodes")
    if len(set(path)) != len(path):
        raise RoutingError(f"{where}: repeats a node")
    for u in path:
        if not 0 <= u < t.n:
            raise RoutingError(f"{where}: unknown node {u}")
    for u, v in zip(path, path[1:]):
        if v not in t.adj[u]:
            raise RoutingError(f"{where}: {u} and {v} are not neighbors")


def make_route_set(t: Topology, paths: Iterable[Iterable[int]], pattern: str = "adhoc",
                   control: Mapping[int, float] | None = None) -> RouteSet:
    rs = RouteSet(tuple(Route(i, tuple(p)) for i, p in enumerate(paths)), dict(control or {}), pattern)
    rs.validate(t)
    return rs


def _pairs(t: Topology, pattern: str) -> list[tuple[int, int]]:
    if pattern == "adhoc":
        return [(s, d) for s in t.nodes for d in t.nodes if s != d]
    if pattern not in PATTERNS:
        raise RoutingError(f"unknown pattern {pattern!r}")
    if t.ap is None:
        raise RoutingError(f"pattern {pattern!r} needs an access point")
    pairs = []
    for k in t.nodes:
        if k == t.ap:
            continue
        pairs.append((k, t.ap))
        if pattern == "hybrid":
            pairs.append((t.ap, k))
    return pairs


def _bfs_tree(t: Topology, src: int, allowed: frozenset[int] | None = None) -> list[int]:
    """Predecessor array; ties between equal-hop predecessors go to the lowest id."""
    dist = [-1] * t.n
    dist[src] = 0
    queue = deque([src])
    while queue:
        x = queue.popleft()
        for y in t.adj[x]:
            if dist[y] < 0 and (allowed is None or y in allowed):
                dist[y] = dist[x] + 1
                queue.append(y)
    pred = [-1] * t.n
    for y in t.nodes:
        if dist[y] > 0:
            pred[y] = min(x for x in t.adj[y] if dist[x] == dist[y] - 1)
    return pred


def _walk_back(pred: list[int], src: int, dst: int) -> tuple[int, ...]:
    path = [dst]
    while path[-1] != src:
        p = pred[path[-1]]
        if p < 0:
            raise RoutingError(f"no route from {src} to {dst}")
        path.append(p)
    return tuple(reversed(path))


def shortest_path(t: Topology, src: int, dst: int) -> tuple[int, ...]:
    return _walk_back(_bfs_tree(t, src), src, dst)


def shortest_routes(t: Topology, pattern: str = "adhoc") -> RouteSet:
    """Minimum-hop routes for every pair the pattern requires."""
    pairs = _pairs(t, pattern)
    trees: dict[int, list[int]] = {}
    paths = []
    for s, d in pairs:
        if s not in trees:
            trees[s] = _bfs_tree(t, s)
        paths.append(_walk_back(trees[s], s, d))
    return RouteSet(tuple(Route(i, p) for i, p in enumerate(paths)), {}, pattern)


# -- Wu & Li backbone ----------------------------------------------------------


@dataclass(frozen=True)
class Backbone:
    dominators: frozenset[int]

    def edges(self, t: Topology) -> list[tuple[int, int]]:
        return [(u, v) for u, v in t.edges() if u in self.dominators and v in self.dominators]


def _components(t: Topology, nodes: set[int]) -> list[set[int]]:
    comps = []
    left = set(nodes)
    while left:
        root = left.pop()
        comp = {root}
        stack = [root]
        while stack:
            x = stack.pop()
            for y in t.adj[x] & left:
                left.discard(y)
                comp.add(y)
                stack.append(y)
        comps.append(comp)
    return comps


def is_dominatee(t: Topology, u: int, weight=None) -> bool:
    """True when some connected set of higher-weight neighbors dominates all neighbors of ``u``.

    A connected dominating subset exists iff a whole connected component of the
    higher-weight neighbors dominates, so checking components is exact.
    """
    w = weight or (lambda x: x)
    higher = {v for v in t.adj[u] if w(v) > w(u)}
    if not higher:
        return False
    for comp in _components(t, higher):
        covered = set(comp)
        for x in comp:
            covered |= t.adj[x]
        if t.adj[u] <= covered:
            return True
    return False


def wu_li_backbone(t: Topology, weight=None) -> Backbone:
    """Connected dominating set by the Wu & Li pruning rule, node id as weight.

    The access point, if any, is always a dominator.
    """
    dom = {u for u in t.nodes if not is_dominatee(t, u, weight)}
    if t.ap is not None:
        dom.add(t.ap)
    return Backbone(frozenset(dom))


def is_connected_dominating_set(t: Topology, nodes: Iterable[int]) -> bool:
    s = set(nodes)
    if not s:
        return t.n == 0
    if any(not (t.adj[u] & s) for u in t.nodes if u not in s):
        return False
    return len(_components(t, s)) == 1


def backbone_routes(t: Topology, b: Backbone, pattern: str = "adhoc") -> RouteSet:
    """Routes that enter the backbone at the nearest dominator and stay on it.

    Each route is ``s -> nearest dominator of s -> (backbone path) -> nearest
    dominator of d -> d``; attachment hops vanish for dominator endpoints.
    """
    dom = b.dominators
    if not dom:
        raise RoutingError("empty backbone")
    nearest: dict[int, int] = {}
    for u in t.nodes:
        if u in dom:
            nearest[u] = u
            continue
        dist = hop_distances(t, u)
        reach = [(dist[x], x) for x in dom if dist[x] >= 0]
        if not reach:
            raise RoutingError(f"node {u} cannot reach the backbone")
        nearest[u] = min(reach)[1]
    full_trees: dict[int, list[int]] = {}
    bb_trees: dict[int, list[int]] = {}

    def attach(a: int, z: int) -> tuple[int, ...]:
        if a not in full_trees:
            full_trees[a] = _bfs_tree(t, a)
        return _walk_back(full_trees[a], a, z)

    paths = []
    for s, d in _pairs(t, pattern):
        ds, dd = nearest[s], nearest[d]
        if ds not in bb_trees:
            bb_trees[ds] = _bfs_tree(t, ds, allowed=dom)
        middle = _walk_back(bb_trees[ds], ds, dd)
        head = attach(s, ds)
        tail = tuple(reversed(attach(d, dd)))
        paths.append(_simplify(head + middle + tail))
    return RouteSet(tuple(Route(i, p) for i, p in enumerate(paths)), {}, pattern)


def _simplify(path: tuple[int, ...]) -> tuple[int, ...]:
    """Drop immediate repeats, then cut any loop back to the first visit."""
    out: list[int] = []
    for u in path:
        if out and out[-1] == u:
            continue
        if u in out:
            del out[out.index(u) + 1 :]
            continue
        out.append(u)
    return tuple(out)


# -- files ---------------------------------------------------------------------


def load_routes(path: str | Path, t: Topology, pattern: str = "file") -> RouteSet:
    """One route per line as space-separated node ids; ``#`` starts a comment."""
    path = Path(path)
    paths = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            p = tuple(int(tok) for tok in line.split())
        except ValueError as exc:
            raise RoutingError(f"{path}:{lineno}: malformed route {line!r}") from exc
        try:
            check_path(t, p, where=f"{path}:{lineno}")
        except TopologyError as exc:
            raise RoutingError(str(exc)) from exc
        paths.append(p)
    return RouteSet(tuple(Route(i, p) for i, p in enumerate(paths)), {}, pattern)


def write_routes(rs: RouteSet, path: str | Path) -> None:
    Path(path).write_text("".join(" ".join(map(str, r.path)) + "\n" for r in rs.routes))


def load_overhead(path: str | Path, t: Topology) -> dict[int, float]:
    """``overhead <id> <fraction>`` lines."""
    path = Path(path)
    out: dict[int, float] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] != "overhead" or len(tok) != 3:
                raise ValueError
            u, c = int(tok[1]), float(tok[2])
        except (ValueError, IndexError) as exc:
            raise RoutingError(f"{path}:{lineno}: malformed overhead line {line!r}") from exc
        if not 0 <= u < t.n:
            raise RoutingError(f"{path}:{lineno}: unknown node {u}")
        if not 0 <= c < 1:
            raise RoutingError(f"{path}:{lineno}: overhead must lie in [0, 1)")
        out[u] = c
    return out


def overhead_model(kind: str, t: Topology) -> dict[int, float]:
    """Control traffic per node from ``none``, ``const:<c>`` or ``file:<path>``."""
    if kind == "none":
        return {}
    if kind.startswith("const:"):
        c = float(kind.split(":", 1)[1])
        if not 0 <= c < 1:
            raise RoutingError("constant overhead must lie in [0, 1)")
        return {u: c for u in t.nodes}
    if kind.startswith("file:"):
        return load_overhead(kind.split(":", 1)[1], t)
    raise RoutingError(f"unknown overhead model {kind!r}")
