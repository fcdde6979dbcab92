"""Contraction of the probit data-augmentation Gibbs sampler.

The latent-variable step shrinks differences in the linear predictor by factors in
[0, 1), and the regression step is a projection, so two chains sharing innovations
draw together geometrically.  This script measures the per-step Lipschitz ratios.

Run with ``python3 demos/04_probit_contraction.py`` (a few seconds).
"""

import numpy as np

from cudmcmc import StreamSpec, contraction_probe, make_stream
from cudmcmc.models import ProbitGibbs, ProbitModel

# %% The shipped synthetic problem: 20 observations, intercept plus two covariates.
model = ProbitModel.synthetic()
sampler = ProbitGibbs(model)
start = np.r_[np.zeros(model.p), np.where(model.y, 0.5, -0.5)]
other = start + np.r_[np.ones(model.p), np.zeros(model.n)]
print(f"n={model.n}, p={model.p}; distance between starts {model.distance(start, other):.3f}")

# %% Worst-case expansion over a pool of states, for 200 innovation blocks.
stream = make_stream(StreamSpec(kind="iid", seed=3))
report = contraction_probe(sampler, model.distance, start, other, stream, m=6, reps=200)
print(f"mean log Lipschitz ratio {report.mean_log:.3f} +/- {report.mean_log_se:.3f}")
print(f"largest ratio seen {report.ratios.max():.3f}; contracting: {report.contracts}")

# %% How often are the two chains still farther apart than gamma^m after m steps?
print(f"gamma = {report.gamma:.3f}")
for m, (rate, se) in enumerate(zip(report.bm_rates, report.bm_se), start=1):
    print(f"  m={m}: {rate:.3f} (se {se:.3f})")
