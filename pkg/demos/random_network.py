"""
Bounds on one random network
============================

Twenty nodes are dropped in the unit square with a radio range chosen for
an average degree of eight. We compare the two bounds and the two fairness
notions, first with every node talking to every other node and then with
all traffic going through an access point.
"""

import time

from manetcap import backbone_routes, evaluate, freq_table, generate_unit_disk, shortest_routes, wu_li_backbone
from manetcap.interference import MAX_EXACT_LINKS, local_conflict_graph

t = generate_unit_disk(20, 8, seed=7, ap=0)
print(f"average degree {t.average_degree():.2f}, radio range {t.radio_range:.3f}")

###############################################################################
# Local universes grow quickly with density. Only those with at most 24 links
# are enumerated exactly; at degree eight every center is sampled instead.

sizes = sorted(len(local_conflict_graph(t, c)) for c in t.nodes)
print("links per local universe:", sizes)
print("enumerated exactly:", sum(s <= MAX_EXACT_LINKS for s in sizes))

###############################################################################
# Frequency tables do not depend on the routes, so compute them once per
# fairness notion and reuse them.

tables = {f: freq_table(t, f, rounds=10_000, seed=7) for f in ("node", "link")}

print(f"{'pattern':8s} {'model':18s} {'max-min':>10s} {'max-sum':>10s}")
for pattern in ("adhoc", "hybrid"):
    routes = shortest_routes(t, pattern)
    for bound in ("pessimistic", "optimistic"):
        for fairness in ("node", "link"):
            ft = tables[fairness] if bound == "optimistic" else None
            fair = evaluate(t, routes, bound, fairness, "max-min", ft=ft)
            total = evaluate(t, routes, bound, fairness, "max-sum", ft=ft)
            print(f"{pattern:8s} {bound + '/' + fairness:18s} {fair.objective_value:10.2e} {total.objective_value:10.3f}")

###############################################################################
# A backbone built with the Wu & Li rule funnels every route through the
# dominators. Routes get longer and the dominators become a bottleneck.

backbone = wu_li_backbone(t)
print(f"{len(backbone.dominators)} dominators out of {t.n} nodes")
flat = shortest_routes(t)
wuli = backbone_routes(t, backbone)
mean = lambda rs: sum(r.hops for r in rs) / len(rs)
print(f"mean hops: flat {mean(flat):.2f}, backbone {mean(wuli):.2f}")
for name, routes in (("flat", flat), ("wuli", wuli)):
    start = time.perf_counter()
    rep = evaluate(t, routes, "pessimistic", "link", "max-min")
    print(f"{name}: max-min {rep.objective_value:.2e} ({(time.perf_counter() - start) * 1e3:.0f} ms, {rep.solution.method})")

###############################################################################
# Control traffic eats into every share. A constant 0.2% per node is enough
# to show the effect.

routes = shortest_routes(t, "hybrid")
for c in (0.0, 0.002):
    rep = evaluate(t, routes.with_control({u: c for u in t.nodes}), "pessimistic", "node", "max-min")
    print(f"control {c:.3f}: hybrid max-min {rep.objective_value:.3e}")
