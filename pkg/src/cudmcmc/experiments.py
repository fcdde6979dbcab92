"""Config-driven batch experiments, one per CLI subcommand, all written as CSV.

Every random choice is derived from the master seed through
``SeedSequence(seed, spawn_key=...)`` keyed by position, so a run is bitwise
reproducible and independent of execution order.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .coupling import (contraction_probe, coupling_probe, euclidean, mis_coupling_region,
                       mis_weight_bounds, slice_coupling_check)
from .discrepancy import cud_diagnostic, iid_reference
from .errors import ConfigError, CudMcmcError, InvalidState
from .models import (ProbitGibbs, ProbitModel, PumpGibbs, PumpModel, bivariate_normal_gibbs,
                     normal_mis_exact, normal_mis_t, normal_rwm)
from .samplers import InversiveSliceSampler, run_batch, run_chain
from .streams import StreamSpec, make_stream, randomize

MODELS = ("pump", "bivariate_normal", "probit", "normal_mis", "normal_mis_t", "normal_rwm",
          "slice_linear")

# Published reference points, printed as a comment footer; not reproduced here.
REFERENCE_VRF = {
    "pump": "pumps: n=2^10 min 286 max 1543; n=2^12 min 304 max 5003; "
            "n=2^14 min 1186 max 16089",
    "probit": "vasorestriction: n=2^10 min 14 max 15; n=2^12 min 56 max 76; "
              "n=2^14 min 108 max 124",
}

VRF_COLUMNS = ["function", "n", "R", "mean_iid", "mean_treatment", "variance_iid",
               "variance_treatment", "vrf"]
DISCREPANCY_COLUMNS = ["stream", "kind", "n", "d", "window", "star", "method",
                       "iid_median", "iid_reps"]
COUPLING_COLUMNS = ["probe_id", "quantity", "m", "estimate", "std_error"]


@dataclass
class ExperimentConfig:
    model: str = "pump"
    data: str | None = None
    model_params: dict = field(default_factory=dict)
    start: list | None = None
    baseline: dict = field(default_factory=lambda: {"kind": "iid"})
    treatment: dict = field(default_factory=lambda: {"kind": "cud_lcg"})
    randomize: bool = True
    n_list: list = field(default_factory=lambda: [2 ** 10, 2 ** 12, 2 ** 14])
    replicates: int = 25
    functions: str = "component_means"
    seed: int = 0
    out: str | None = None
    # discrepancy report
    streams: list = field(default_factory=list)
    d_list: list = field(default_factory=lambda: [1, 2, 3])
    iid_reps: int = 100
    exact_budget: float = 1e8
    iid_budget: float = 1e8
    # coupling report
    probes: list | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.replicates < 2:
            raise ConfigError("replicates must be at least 2 to estimate a variance")
        if self.functions != "component_means":
            raise ConfigError("only 'component_means' test functions are supported")
        if not self.n_list or any(int(n) < 0 for n in self.n_list):
            raise ConfigError("n_list must hold non-negative integers")
        self.n_list = [int(n) for n in self.n_list]
        for arm in ("baseline", "treatment"):
            _stream_spec(getattr(self, arm))
        for s in self.streams:
            _stream_spec(s)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> ExperimentConfig:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)


def _stream_spec(d: dict) -> StreamSpec:
    if not isinstance(d, dict):
        raise ConfigError("stream specs must be JSON objects")
    try:
        return StreamSpec.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad stream spec {d}: {exc}") from exc


def derived_seed(master: int, *key: int) -> int:
    """Deterministic 63-bit seed for position ``key`` under the master seed."""
    ss = np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


# ---------------------------------------------------------------------------
# models


@dataclass
class Built:
    update: object
    start: np.ndarray
    names: list


def _slice_linear(lower=0.5, upper=1.0):
    norm = 0.5 * (upper ** 2 - lower ** 2)

    def density(x):
        return float(x[0]) / norm

    def level_set(j, x, y):
        return [(max(lower, y * norm), upper)] if y * norm <= upper else []

    return InversiveSliceSampler(density, [lower], [upper], level_set=level_set)


def build_model(config: ExperimentConfig) -> Built:
    p = dict(config.model_params)
    try:
        if config.model == "pump":
            model = PumpModel.from_csv(config.data, **p)
            upd, x0, names = PumpGibbs(model), model.initial_state(), list(model.names)
        elif config.model == "bivariate_normal":
            upd, x0, names = bivariate_normal_gibbs(p.get("rho", 0.5)), np.zeros(2), ["x1", "x2"]
        elif config.model == "probit":
            model = ProbitModel.from_csv(config.data)
            upd = ProbitGibbs(model)
            x0 = np.r_[np.zeros(model.p), np.where(model.y, 0.5, -0.5)]
            names = [f"beta{j}" for j in range(model.p)] + [f"z{i}" for i in range(model.n)]
        elif config.model == "normal_mis":
            upd, x0, names = normal_mis_exact(), np.zeros(1), ["x"]
        elif config.model == "normal_mis_t":
            upd, x0, names = normal_mis_t(**p), np.zeros(1), ["x"]
        elif config.model == "normal_rwm":
            upd, x0, names = normal_rwm(**p), np.zeros(1), ["x"]
        else:
            upd = _slice_linear(**p)
            x0, names = np.array([0.0, 0.75]), ["y", "x"]
    except (OSError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot build model {config.model!r}: {exc}") from exc
    if config.start is not None:
        x0 = np.asarray(config.start, dtype=np.float64)
        if x0.shape != (upd.state_dim,):
            raise ConfigError(f"start must have {upd.state_dim} entries")
    return Built(upd, x0, names)


# ---------------------------------------------------------------------------
# variance reduction


@dataclass(frozen=True)
class VrfRow:
    function: str
    n: int
    R: int
    mean_iid: float
    mean_treatment: float
    variance_iid: float
    variance_treatment: float

    @property
    def vrf(self) -> float:
        return self.variance_iid / self.variance_treatment

    def as_list(self):
        return [self.function, self.n, self.R, repr(self.mean_iid), repr(self.mean_treatment),
                repr(self.variance_iid), repr(self.variance_treatment), repr(self.vrf)]


def replicate_specs(config: ExperimentConfig, arm: int, n_index: int, d: int):
    """Stream specs of the ``R`` replicates of one arm (0 baseline, 1 treatment).

    A CUD arm that names neither a generator nor a period target gets, for each run
    length, the smallest shipped generator whose period covers it.
    """
    base = _stream_spec(config.treatment if arm else config.baseline)
    if base.is_cud and base.params is None and base.period_target is None:
        base = replace(base, period_target=max(config.n_list[n_index], 1))
    out = []
    for r in range(config.replicates):
        seed = derived_seed(config.seed, n_index, r, arm)
        if base.is_cud:
            spec = replace(base, tuple_dim=d)
            out.append(randomize(spec, seed) if config.randomize else spec)
        else:
            out.append(replace(base, seed=seed))
    return out


def replicate_estimates(built: Built, specs, n: int) -> np.ndarray:
    """Component means of one chain per spec, shape ``(R, s)``."""
    upd, d = built.update, built.update.innovation_dim
    if n == 0:
        return np.full((len(specs), upd.state_dim), np.nan)
    if upd.vectorized:
        blocks = np.stack([make_stream(s).blocks(n, d) for s in specs])
        try:
            return run_batch(upd, built.start, blocks)
        except (InvalidState, CudMcmcError, ValueError):
            pass  # rerun one by one to report the failing replicate
    out = []
    for r, spec in enumerate(specs):
        try:
            out.append(run_chain(upd, built.start, make_stream(spec), n).estimates["mean"])
        except InvalidState as exc:
            raise InvalidState(f"replicate {r}: {exc}") from exc
    return np.array(out)


def run_vrf_experiment(config: ExperimentConfig) -> list[VrfRow]:
    built = build_model(config)
    d = built.update.innovation_dim
    rows = []
    for i, n in enumerate(config.n_list):
        base = replicate_estimates(built, replicate_specs(config, 0, i, d), n)
        trt = replicate_estimates(built, replicate_specs(config, 1, i, d), n)
        vb, vt = base.var(axis=0, ddof=1), trt.var(axis=0, ddof=1)
        mb, mt = base.mean(axis=0), trt.mean(axis=0)
        for j, name in enumerate(built.names):
            rows.append(VrfRow(name, n, config.replicates, float(mb[j]), float(mt[j]),
                               float(vb[j]), float(vt[j])))
    return rows


def write_vrf_csv(path, rows, model: str | None = None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(VRF_COLUMNS)
        for row in rows:
            w.writerow(row.as_list())
        if model in REFERENCE_VRF:
            fh.write(f"# published reference (different generators): {REFERENCE_VRF[model]}\n")


# ---------------------------------------------------------------------------
# discrepancy


def run_discrepancy_report(config: ExperimentConfig) -> list[list]:
    """One row per stream setting and window kind, with the IID median alongside."""
    streams = config.streams or [{"kind": "cud_lcg", "period_target": 1024},
                                 {"kind": "iid", "seed": 0}]
    kw = {"budget": config.exact_budget}
    ref = {}
    rows = []
    for k, sd in enumerate(streams):
        spec = _stream_spec(sd)
        for r in cud_diagnostic(spec, config.n_list, config.d_list, **kw):
            key = (r.n, r.d)
            if key not in ref:
                ref[key] = float(np.median(iid_reference(
                    r.n, r.d, config.iid_reps, seed=derived_seed(config.seed, r.n, r.d),
                    budget=config.iid_budget)))
            rows.append([k, spec.kind, r.n, r.d, r.window_kind, repr(r.report.star),
                         r.report.method, repr(ref[key]), config.iid_reps])
    return rows


def write_rows_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# ---------------------------------------------------------------------------
# coupling

DEFAULT_PROBES = [
    {"id": "mis_exact", "model": "normal_mis", "type": "coupling", "n": 50, "reps": 200,
     "starts": [[-2.0], [3.0]]},
    {"id": "mis_t3", "model": "normal_mis_t", "type": "coupling", "n": 200, "reps": 200,
     "starts": [[-2.0], [3.0]], "box": [0.2, 0.8]},
    {"id": "slice_linear", "model": "slice_linear", "type": "coupling", "n": 200,
     "reps": 200, "starts": [[0.0, 0.55], [0.0, 0.95]]},
    {"id": "probit_contraction", "model": "probit", "type": "contraction", "m": 8,
     "reps": 100},
]


def _probe_regions(probe, built):
    upd = built.update
    if probe["model"] == "normal_mis":
        return [mis_coupling_region(1.0, 1.0, [0.0], [1.0])]
    if probe["model"] == "normal_mis_t":
        a, b = probe.get("box", [0.2, 0.8])
        kappa, eta = mis_weight_bounds(upd.weight, upd.proposal_ppf, [a], [b])
        return [mis_coupling_region(kappa, eta, [a], [b])]
    if probe["model"] == "slice_linear":
        return [slice_coupling_check(upd.density, upd.lower, upd.upper)]
    return []


def _coupling_rows(pid, probe, built, stream_base, seed, index):
    n, reps = int(probe.get("n", 100)), int(probe.get("reps", 100))
    starts = probe.get("starts")
    a = np.asarray(starts[0] if starts else built.start, dtype=np.float64)
    b = np.asarray(starts[1] if starts else built.start + 1.0, dtype=np.float64)
    regions = _probe_regions(probe, built)
    merges, hits, sound = [], [], []
    for r in range(reps):
        spec = replace(stream_base, seed=derived_seed(seed, index, r))
        rep = coupling_probe(built.update, a, b, make_stream(spec), n, regions)
        merges.append(rep.merge_step if rep.merged and rep.post_merge_equal else np.nan)
        for reg in regions:
            hits.append(rep.hit_rates[reg.kind])
            ok = rep.region_sound[reg.kind]
            if ok is not None:
                sound.append(ok)
    merges = np.array(merges, dtype=float)
    done = merges[~np.isnan(merges)]
    rows = [(pid, "merged_fraction", n, done.size / reps,
             np.sqrt(max(done.size / reps * (1 - done.size / reps), 0) / reps))]
    if done.size:
        se = done.std(ddof=1) / np.sqrt(done.size) if done.size > 1 else np.nan
        rows.append((pid, "first_merge_mean", n, done.mean(), se))
    for reg in regions:
        hr = np.mean(hits)
        rows.append((pid, f"{reg.kind}_region_volume", n, reg.volume, 0.0))
        rows.append((pid, f"{reg.kind}_hit_rate", n, hr, np.sqrt(reg.volume * (1 - reg.volume)
                                                                   / (n * reps))))
        rows.append((pid, f"{reg.kind}_expected_first_merge", n,
                     reg.lag - 1 + 1.0 / reg.volume, 0.0))
        if sound:
            rows.append((pid, f"{reg.kind}_sound_fraction", n, float(np.mean(sound)), 0.0))
    return rows


def run_coupling_report(config: ExperimentConfig) -> list[tuple]:
    """Rows of ``(probe id, quantity, m, estimate, standard error)``."""
    probes = DEFAULT_PROBES if config.probes is None else config.probes
    stream_base = _stream_spec(config.baseline)
    rows = []
    for k, probe in enumerate(probes):
        if not isinstance(probe, dict) or "model" not in probe:
            raise ConfigError("each probe needs at least a 'model'")
        pid = probe.get("id", f"probe{k}")
        sub = replace(config, model=probe["model"],
                      model_params=probe.get("model_params", {}), start=None)
        built = build_model(sub)
        kind = probe.get("type", "coupling")
        if kind == "coupling":
            rows.extend(_coupling_rows(pid, probe, built, stream_base, config.seed, k))
        elif kind == "contraction":
            upd = built.update
            model = getattr(upd, "model", None)
            metric = getattr(model, "distance", euclidean)
            m, reps = int(probe.get("m", 8)), int(probe.get("reps", 100))
            x = built.start
            if isinstance(model, ProbitModel):
                xhat = x + np.r_[np.ones(model.p), np.zeros(model.n)]
            else:
                xhat = x + 1.0
            spec = replace(stream_base, seed=derived_seed(config.seed, k, 0))
            rep = contraction_probe(upd, metric, x, xhat, make_stream(spec), m, reps,
                                    seed=derived_seed(config.seed, k, 1))
            rows.extend(rep.rows(pid))
        else:
            raise ConfigError(f"unknown probe type {kind!r}")
    return rows
