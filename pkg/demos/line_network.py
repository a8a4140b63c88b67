"""
Capacity of a line of relays
============================

A chain of ``n`` relays hangs off an access point. Every relay sends one
flow toward the access point along the chain. This is the one topology
where the four bounds have closed forms, so it doubles as a sanity check.
"""

from manetcap import evaluate, freq_table, line_topology, shortest_routes
from manetcap.topology import link_two_neighborhood

###############################################################################
# Build the chain and the uplink routes. Node 0 is the access point.

n = 10
t = line_topology(n)
routes = shortest_routes(t, "uplink")
print(f"{t.n} nodes, {len(routes)} routes, longest route {max(r.hops for r in routes)} hops")

###############################################################################
# The pessimistic node model gives every node of a 2-hop area the same share.
# Node 1 sits in a five-node area and splits its share over two neighbors, so
# the link into the access point carries at most 1/10.

for objective in ("max-sum", "max-min"):
    rep = evaluate(t, routes, "pessimistic", "node", objective)
    print(f"pessimistic/node {objective:8s} {rep.objective_value:.6f}")
print(f"expected          1/10 = 0.1 and 1/(10n) = {1 / (10 * n):.6f}")

###############################################################################
# The link model counts links instead of nodes. Around the link (2,3) there
# are exactly ten directed links, which leads to the same optimum.

print("links around (2,3):", len(link_two_neighborhood(t, (2, 3))))
rep = evaluate(t, routes, "pessimistic", "link", "max-min")
print(f"pessimistic/link max-min {rep.objective_value:.6f}")

###############################################################################
# The optimistic bound needs activation frequencies. On a chain every local
# universe holds two opposite pairs of links, so each link is active in half
# of the maximal independent sets.

ft = freq_table(t, "node", exact=True)
print("frequencies seen from node 2:", ft[2])
for objective in ("max-sum", "max-min"):
    rep = evaluate(t, routes, "optimistic", "node", objective, ft=ft)
    print(f"optimistic/node  {objective:8s} {rep.objective_value:.6f}")
print(f"expected          1/2 and 1/(3n-1) = {1 / (3 * n - 1):.6f}")

###############################################################################
# Under max-min every flow gets the same rate. The flows listed below are the
# ones whose rate the optimizer left at the floor.

rep = evaluate(t, routes, "optimistic", "node", "max-min", ft=ft)
tight = [r.id for r in routes if abs(rep.per_flow[r.id] - rep.objective_value) < 1e-12]
print("flows at the max-min rate:", tight)
