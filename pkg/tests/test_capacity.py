import numpy as np
import pytest

from manetcap.capacity import CapacityModelError, build_lp, evaluate, link_usage
from manetcap.interference import FreqTable, freq_table, local_conflict_graph
from manetcap.routing import make_route_set, shortest_routes
from manetcap.solver import solve
from manetcap.topology import Topology, generate_unit_disk, line_topology

MODELS = [("pessimistic", "node"), ("pessimistic", "link"), ("optimistic", "node"), ("optimistic", "link")]


def sparse_instance(seed=0):
    """Small enough that every center's universe can be enumerated."""
    for s in range(seed, seed + 100):
        t = generate_unit_disk(10, 3, seed=s, ap=0)
        if all(len(local_conflict_graph(t, c)) <= 24 for c in t.nodes):
            return t
    raise RuntimeError("no sparse instance found")


def run(t, rs, bound, fairness, objective, **kw):
    kw.setdefault("exact", True)
    return evaluate(t, rs, bound, fairness, objective, **kw)


@pytest.mark.parametrize("n", [5, 8])
def test_line_values(n):
    t = line_topology(n)
    rs = shortest_routes(t, "uplink")
    expect = {"pessimistic": (0.1, 1 / (10 * n)), "optimistic": (0.5, 1 / (3 * n - 1))}
    for bound, fairness in MODELS:
        total = run(t, rs, bound, fairness, "max-sum").objective_value
        fair = run(t, rs, bound, fairness, "max-min").objective_value
        assert total == pytest.approx(expect[bound][0], abs=1e-9)
        assert fair == pytest.approx(expect[bound][1], abs=1e-9)


def test_single_link_route_gets_half():
    # path a-b-c with one flow a -> b; the far end c sees the link half of the time
    t = Topology.from_edges(3, [(0, 1), (1, 2)])
    rs = make_route_set(t, [(0, 1)])
    ft = freq_table(t, "node", exact=True)
    assert ft[2] == {(0, 1): 0.5, (1, 0): 0.5}
    rep = evaluate(t, rs, "optimistic", "node", "max-sum", ft=ft)
    assert rep.per_flow[0] == pytest.approx(0.5)


@pytest.mark.parametrize("fairness", ["node", "link"])
def test_two_nodes_single_route(fairness):
    t = Topology.from_edges(2, [(0, 1)])
    rs = make_route_set(t, [(0, 1)])
    assert evaluate(t, rs, "pessimistic", fairness, "max-sum").objective_value == pytest.approx(0.5)


def test_row_names_record_origin():
    t = line_topology(3)
    rs = shortest_routes(t, "uplink")
    names = [c.name for c in build_lp(t, rs, "pessimistic", "node", "max-min").constraints]
    assert "flow_1_0" in names and "load_2" in names
    assert "pnode_c2_u0" in names and "split_2_1" in names and "maxmin_0" in names
    names = [c.name for c in build_lp(t, rs, "pessimistic", "link", "max-sum").constraints]
    assert "pedge_e2_3_f1_0" in names
    ft = freq_table(t, "link", exact=True)
    names = [c.name for c in build_lp(t, rs, "optimistic", "link", "max-sum", ft).constraints]
    assert "opt_c2_1_0" in names and "opt_c3_2_1" in names


def test_pessimistic_node_row_bound():
    t = line_topology(5)
    lp = build_lp(t, shortest_routes(t, "uplink"), "pessimistic", "node")
    row = lp.constraint("pnode_c2_u4")
    assert row.rhs == pytest.approx(1 / 5)


def test_optimistic_needs_frequencies():
    t = line_topology(3)
    rs = shortest_routes(t, "uplink")
    with pytest.raises(CapacityModelError, match="frequency table"):
        build_lp(t, rs, "optimistic", "node")
    with pytest.raises(CapacityModelError, match="no frequency"):
        build_lp(t, rs, "optimistic", "node", ft=FreqTable())
    with pytest.raises(CapacityModelError):
        build_lp(t, rs, "middle", "node")
    with pytest.raises(CapacityModelError):
        build_lp(t, rs, "pessimistic", "node", "max-median")


def test_reported_values_are_consistent():
    t = sparse_instance()
    rs = shortest_routes(t, "hybrid")
    for bound, fairness in MODELS:
        rep = run(t, rs, bound, fairness, "max-min")
        assert rep.certificate.ok
        assert rep.recomputed_objective() == pytest.approx(rep.objective_value, abs=1e-9)
        usage = link_usage(rs)
        for l, ids in usage.items():
            assert rep.per_link[l] == pytest.approx(sum(rep.per_flow[i] for i in ids), abs=1e-9)


@pytest.mark.parametrize("bound, fairness", MODELS)
def test_max_min_times_flows_below_max_sum(bound, fairness):
    t = sparse_instance(3)
    rs = shortest_routes(t, "adhoc")
    fair = run(t, rs, bound, fairness, "max-min").objective_value
    total = run(t, rs, bound, fairness, "max-sum").objective_value
    assert fair * len(rs) <= total + 1e-9


@pytest.mark.parametrize("bound, fairness", MODELS)
def test_control_traffic_never_helps(bound, fairness):
    t = sparse_instance(5)
    rs = shortest_routes(t, "hybrid")
    prev = None
    # the edge model subtracts control once per link of the area, so keep rates small
    for c in (0.0, 0.001, 0.002, 0.004):
        cap = run(t, rs.with_control({u: c for u in t.nodes}), bound, fairness, "max-min").objective_value
        if prev is not None:
            assert cap <= prev + 1e-12
        prev = cap


@pytest.mark.parametrize("bound, fairness", MODELS)
def test_relabeling_nodes_keeps_capacity(bound, fairness):
    t = sparse_instance(7)
    rs = shortest_routes(t, "adhoc")
    perm = [int(x) for x in np.random.default_rng(2).permutation(t.n)]
    a = run(t, rs, bound, fairness, "max-min").objective_value
    b = run(t.relabel(perm), rs.relabel(perm), bound, fairness, "max-min").objective_value
    assert b == pytest.approx(a, abs=1e-9)


def test_sampled_tables_relabel_too():
    t = generate_unit_disk(14, 6, seed=2)
    rs = shortest_routes(t)
    ft = freq_table(t, "link", rounds=300, seed=4, exact=False)
    perm = list(range(t.n))[::-1]
    a = evaluate(t, rs, "optimistic", "link", "max-sum", ft=ft).objective_value
    b = evaluate(t.relabel(perm), rs.relabel(perm), "optimistic", "link", "max-sum", ft=ft.relabel(perm))
    assert b.objective_value == pytest.approx(a, abs=1e-9)


def test_scaling_objective():
    t = sparse_instance()
    rs = shortest_routes(t, "hybrid")
    lp = build_lp(t, rs, "pessimistic", "link", "max-sum")
    base = solve(lp).objective
    assert solve(lp.scaled_objective(7.0)).objective == pytest.approx(7 * base, rel=1e-9)


def test_evaluation_is_deterministic():
    t = generate_unit_disk(16, 6, seed=9)
    rs = shortest_routes(t)
    a = evaluate(t, rs, "optimistic", "node", "max-min", rounds=500, seed=1)
    b = evaluate(t, rs, "optimistic", "node", "max-min", rounds=500, seed=1)
    assert a.objective_value == b.objective_value
    assert a.per_flow == b.per_flow


def test_engines_agree_on_capacity():
    # small enough for the dense tableau; auto mode hands larger programs to HiGHS
    t = generate_unit_disk(10, 4, seed=4)
    rs = shortest_routes(t)
    for bound, fairness in MODELS[:2]:
        a = evaluate(t, rs, bound, fairness, "max-min", method="simplex").objective_value
        b = evaluate(t, rs, bound, fairness, "max-min", method="highs").objective_value
        assert a == pytest.approx(b, abs=1e-9)


def test_max_min_rejects_empty_route_set():
    t = line_topology(2)
    with pytest.raises(CapacityModelError):
        evaluate(t, make_route_set(t, []), "pessimistic", "node", "max-min")
    rep = evaluate(t, make_route_set(t, []), "pessimistic", "node", "max-sum")
    assert rep.objective_value == 0.0
