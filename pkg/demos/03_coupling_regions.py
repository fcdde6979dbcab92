"""Coupling regions: innovations that make every chain land in the same place.

For an independence sampler whose importance weight is bounded, any innovation pair
with the proposal uniform inside a box and the acceptance uniform low enough forces
acceptance from every state.  Two chains that share their innovations are then equal
from that step on.

Run with ``python3 demos/03_coupling_regions.py`` (a few seconds).
"""

import numpy as np

from cudmcmc import StreamSpec, coupling_probe, make_stream, mis_coupling_region
from cudmcmc.coupling import mis_weight_bounds
from cudmcmc.models import normal_mis_t

# %% N(0, 1) target, scaled t(3) proposal; weight bounds over the box [0.2, 0.8].
sampler = normal_mis_t()
kappa, eta = mis_weight_bounds(sampler.weight, sampler.proposal_ppf, [0.2], [0.8])
region = mis_coupling_region(kappa, eta, [0.2], [0.8])
print(f"sup weight {kappa:.4f}, inf on box {eta:.4f}, region volume {region.volume:.4f}")

# %% Start two chains far apart and drive them with one IID stream.
merges = []
for seed in range(500):
    stream = make_stream(StreamSpec(kind="iid", seed=seed))
    rep = coupling_probe(sampler, [-4.0], [5.0], stream, 100, [region])
    assert rep.region_sound["mis"] and rep.post_merge_equal
    merges.append(rep.merge_step)
merges = np.array(merges)
print(f"mean merge step {merges.mean():.2f}; a region hit alone would give "
      f"{1 / region.volume:.2f} (merges can come earlier by chance)")
