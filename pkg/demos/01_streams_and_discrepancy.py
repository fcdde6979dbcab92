"""How uniform are the driving sequences?

A full-period congruential generator run over its whole cycle is far more even than an
equally long stretch of pseudo-random numbers, and that holds for consecutive pairs and
triples too.  This script measures it with the exact star discrepancy.

Run with ``python3 demos/01_streams_and_discrepancy.py`` (about ten seconds).
"""

import numpy as np

from cudmcmc import StreamSpec, cud_diagnostic, make_stream, star_discrepancy
from cudmcmc.discrepancy import iid_reference
from cudmcmc.streams import LCG_TABLE

# %% The smallest shipped generator, x <- 394 x mod 1031, read over its full period.
params = LCG_TABLE[0]
spec = StreamSpec(kind="cud_lcg", params=params)
n = params.period
print(f"generator: x <- {params.multiplier} x mod {params.modulus}, period {n}")

# %% One dimension: the cycle visits every residue once, so the gap is exactly 1/m.
u = make_stream(spec).take(n)
print(f"1-d star discrepancy {star_discrepancy(u).star:.3e}  (1/m = {1 / params.modulus:.3e})")

# %% Pairs and triples, overlapping windows, against 20 pseudo-random sequences.
for row in cud_diagnostic(spec, [n], [2, 3], budget=2e9):
    if row.window_kind != "overlapping":
        continue
    ref = np.median(iid_reference(n, row.d, reps=20, seed=row.d))
    print(f"d={row.d}: CUD {row.report.star:.4f}   IID median {ref:.4f}"
          f"   ratio {ref / row.report.star:.1f}x")

# %% A random shift keeps the evenness while making each run an unbiased estimate.
shifted = make_stream(StreamSpec(kind="cud_lcg", params=params, shift=(0.37,))).take(n)
print(f"shifted 1-d discrepancy {star_discrepancy(shifted).star:.3e}")
