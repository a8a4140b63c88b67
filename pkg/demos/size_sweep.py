"""
Capacity as the network grows
=============================

The per-flow max-min capacity of an ad hoc network shrinks as nodes are
added: there are more flows and they cross the same central relays. This
sweep produces the plot-ready CSV that the command line tool also writes.

Equivalent command::

    manetcap sweep --n-values 20 30 40 --seeds 0-4 --routing flat,wuli --fairness link --out sweep.csv
"""

import sys

from manetcap.cli import ExperimentConfig, sweep, write_rows

template = ExperimentConfig(degree=8, bound="pessimistic", fairness="link", objective="max-min")
variants = [{"routing": "flat"}, {"routing": "wuli"}]
result = sweep(template, n_values=[20, 30, 40], seeds=range(5), variants=variants, workers=2)

###############################################################################
# One row per (n, seed, routing). Medians smooth out the placement noise.

write_rows(result.medians(), None, ["routing", "n", "median", "count"])

flat = {r["n"]: r["median"] for r in result.medians() if r["routing"] == "flat"}
values = [flat[n] for n in sorted(flat)]
print("flat medians decrease with n:", all(a > b for a, b in zip(values, values[1:])), file=sys.stderr)
