"""Recompute the shipped generator tables in cudmcmc.streams.

Usage: python3 tools/build_generator_table.py

Prints the best candidates per size; copy the winners into LCG_TABLE / LFSR_TABLE.
Takes several minutes for the largest sizes.
"""

import time

from cudmcmc.search import search_lcg, search_lfsr

LCG_MODULI = (1031, 4099, 16411, 65537)
LFSR_DEGREES = (10, 12, 14)


def main():
    for m in LCG_MODULI:
        t0 = time.time()
        ranked = search_lcg(m)
        print(f"LCG m={m}: best {ranked[:3]}  ({time.time() - t0:.0f}s)", flush=True)
    for k in LFSR_DEGREES:
        t0 = time.time()
        ranked = search_lfsr(k)
        print(f"LFSR k={k}: best {[(s, hex(t)) for s, t in ranked[:3]]}  "
              f"({time.time() - t0:.0f}s)", flush=True)


if __name__ == "__main__":
    main()
