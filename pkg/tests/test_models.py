import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import normal_quantile_mp
from scipy import stats

from cudmcmc.errors import DimensionMismatch, DomainError, InvalidState
from cudmcmc.models import (PumpGibbs, PumpModel, ProbitGibbs, ProbitModel, load_pump_data,
                            probit_beta_update, probit_lambda, probit_metrics,
                            probit_z_update, pump_gibbs_update)
from cudmcmc.samplers import run_batch, run_chain
from cudmcmc.streams import CUD_LCG, IID, StreamSpec, make_stream

Q75 = normal_quantile_mp(0.75)


@pytest.fixture(scope="module")
def probit():
    return ProbitModel.synthetic()


def random_states(model, count, rng, scale=1.0):
    beta = rng.normal(size=(count, model.p)) * scale
    u = rng.uniform(1e-12, 1 - 1e-12, size=(count, model.n))
    return beta, model.z_update(beta, u), u


def posterior_states(model, count, rng):
    """Valid states whose beta parts come from a Gibbs run, with fresh uniforms."""
    x0 = np.r_[np.zeros(model.p), np.where(model.y, 0.5, -0.5)]
    run = run_chain(ProbitGibbs(model), x0, make_stream(StreamSpec(kind=IID, seed=99)),
                    count, thin=1)
    beta = model.split(run.trajectory)[0]
    u = rng.uniform(1e-12, 1 - 1e-12, size=(count, model.n))
    return beta, model.z_update(beta, u), u


# -- probit model -------------------------------------------------------------

def test_probit_model_validation():
    with pytest.raises(DomainError):
        ProbitModel(np.ones((3, 2)), [0, 1, 1])  # rank 1
    with pytest.raises(DimensionMismatch):
        ProbitModel(np.eye(2), [0, 1, 1])
    with pytest.raises(DomainError):
        ProbitModel(np.eye(2), [0, 2])


def test_cached_factors(probit):
    assert np.allclose(np.linalg.inv(probit.xtx_inv), probit.X.T @ probit.X, atol=1e-10)
    assert np.allclose(probit.root_inv @ probit.xtx @ probit.root_inv, np.eye(probit.p),
                       atol=1e-10)
    assert np.allclose(probit.root_inv, probit.root_inv.T, atol=0)
    assert np.allclose(probit.hat @ probit.X, np.eye(probit.p), atol=1e-10)


def test_synthetic_dataset_shape(probit):
    assert (probit.n, probit.p) == (20, 3)
    assert np.all(probit.X[:, 0] == 1.0)
    assert 0 < probit.y.sum() < probit.n


def test_z_update_examples():
    model = ProbitModel(np.ones((2, 1)), [1, 0])
    z = probit_z_update(model, np.zeros(1), [0.5, 0.5])
    assert z[0] == pytest.approx(Q75, abs=1e-12)
    assert z[1] == pytest.approx(-Q75, abs=1e-12)
    assert z[0] == pytest.approx(0.674490, abs=1e-6)
    with pytest.raises(DimensionMismatch):
        model.z_update(np.zeros(1), [0.5])


def test_z_update_recovers_uniforms(probit):
    beta, z, u = random_states(probit, 2000, np.random.default_rng(0))
    assert np.all(np.abs(probit.recover_u(beta, z) - u) < 1e-10)


def test_z_update_sign_constraint(probit):
    beta, z, _ = random_states(probit, 2000, np.random.default_rng(1), scale=3.0)
    assert all(probit.sign_consistent(row) for row in z)


def test_beta_update_examples():
    ones = ProbitModel(np.ones((2, 1)), [1, 1])
    assert probit_beta_update(ones, np.array([1.0, 3.0]), [0.5])[0] == pytest.approx(2.0,
                                                                                     abs=1e-15)
    eye = ProbitModel(np.eye(3), [1, 0, 1])
    z = np.array([0.4, -1.2, 2.5])
    assert np.allclose(eye.beta_update(z, np.full(3, 0.5)), z, atol=1e-15)
    with pytest.raises(DimensionMismatch):
        eye.beta_update(z, [0.5])


def test_beta_update_covariance(probit):
    rng = np.random.default_rng(2)
    z = probit.z_update(np.zeros(probit.p), rng.random(probit.n))
    draws = probit.beta_update(np.tile(z, (10 ** 4, 1)), rng.random((10 ** 4, probit.p)))
    cov = np.cov(draws.T)
    target = probit.xtx_inv
    scale = np.sqrt(np.outer(np.diag(target), np.diag(target)))
    assert np.all(np.abs(cov - target) <= 0.05 * scale)
    assert np.allclose(draws.mean(axis=0), probit.hat @ z,
                       atol=4 * np.sqrt(np.diag(target).max() / 10 ** 4))


def test_lambda_example():
    model = ProbitModel(np.ones((1, 1)), [1])
    lam = probit_lambda(model, np.zeros(1), np.array([Q75]), np.array([0.5]))
    expected = 1 - 0.5 * stats.norm.pdf(0) / stats.norm.pdf(Q75)
    assert lam[0] == pytest.approx(expected, abs=1e-14)
    assert lam[0] == pytest.approx(0.3723, abs=1e-4)


def test_lambda_limit_towards_one():
    model = ProbitModel(np.ones((1, 1)), [1])
    lams = []
    for u in (0.5, 0.9, 1 - 1e-6, 1 - 1e-12):
        z = model.z_update(np.zeros(1), [u])
        lams.append(model.lam(np.zeros(1), z, [u])[0])
    assert np.all(np.diff(lams) > 0) and lams[-1] < 1.0
    # 1 - lambda = tau(0) / tau(-z) decays like 1 / z
    z = model.z_update(np.zeros(1), [1 - 1e-12])[0]
    tau0 = np.sqrt(2 / np.pi)
    assert 1 - lams[-1] == pytest.approx(tau0 / z, rel=0.05)


def test_lambda_bound_and_mills_form(probit):
    beta, z, u = posterior_states(probit, 10 ** 4, np.random.default_rng(3))
    lam = probit.lam(beta, z, u)
    assert lam.min() >= 0.0 and lam.max() <= 1 - 1e-12
    assert np.max(np.abs(lam - probit.lam_mills(beta, z))) < 1e-10


def test_lambda_closed_bound_far_from_posterior(probit):
    # with |x'beta| near 10, 1 - lambda drops below double precision and rounds to 0
    beta, z, u = random_states(probit, 10 ** 4, np.random.default_rng(3))
    lam = probit.lam(beta, z, u)
    assert lam.min() >= 0.0 and lam.max() <= 1.0
    assert np.max(np.abs(lam - probit.lam_mills(beta, z))) < 1e-10


def test_metric_examples():
    model = ProbitModel(np.diag([2.0, 3.0]), [1, 0])
    d1, d2 = probit_metrics(model)
    assert d1(np.zeros(2), np.ones(2)) == pytest.approx(np.sqrt(13), abs=1e-15)
    assert d1(np.array([0.3, 0.1]), np.array([0.3, 0.1])) == 0.0
    q, _ = np.linalg.qr(np.random.default_rng(4).normal(size=(6, 3)))
    ortho = ProbitModel(q, [1, 0, 1, 0, 1, 1])
    a, b = np.array([0.1, -2.0, 0.7]), np.array([1.0, 0.5, -0.2])
    assert ortho.d1(a, b) == pytest.approx(np.linalg.norm(a - b), rel=1e-12)
    assert d2(np.array([0.0, 3.0]), np.array([4.0, 0.0])) == 5.0
    state = np.r_[a, np.ones(6)]
    assert ortho.distance(state, state) == 0.0


def test_one_step_contraction(probit):
    rng = np.random.default_rng(5)
    g = ProbitGibbs(probit)
    worst = 0.0
    for _ in range(10 ** 3):
        ba, za, _ = random_states(probit, 1, rng)
        bb, zb, _ = random_states(probit, 1, rng)
        a, b = np.r_[ba[0], za[0]], np.r_[bb[0], zb[0]]
        u = rng.random(g.innovation_dim)
        na, nb = g(a, u), g(b, u)
        before = probit.d1(ba[0], bb[0])
        nba, nza = probit.split(na)
        nbb, nzb = probit.split(nb)
        ratio = max(probit.d1(nba, nbb), probit.d2(nza, nzb)) / before
        worst = max(worst, ratio)
    assert worst <= 1 - 1e-12


def test_probit_gibbs_consumes_n_plus_p(probit):
    g = ProbitGibbs(probit)
    stream = make_stream(StreamSpec(kind=CUD_LCG, period_target=2 ** 12,
                                    tuple_dim=g.innovation_dim))
    x0 = np.r_[np.zeros(probit.p), np.where(probit.y, 0.5, -0.5)]
    run_chain(g, x0, stream, 37)
    assert stream.consumed == 37 * (probit.n + probit.p)


def test_probit_gibbs_keeps_sign_constraint(probit):
    g = ProbitGibbs(probit)
    x0 = np.r_[np.zeros(probit.p), np.where(probit.y, 0.5, -0.5)]
    run = run_chain(g, x0, make_stream(StreamSpec(kind=IID, seed=6)), 500, thin=1)
    assert all(probit.sign_consistent(probit.split(s)[1]) for s in run.trajectory)


@given(st.floats(-4, 4), st.floats(1e-9, 1 - 1e-9))
def test_z_update_monotone_in_u(mean, u):
    model = ProbitModel(np.ones((2, 1)), [1, 0])
    lo = model.z_update(np.array([mean]), [u, u])
    hi = model.z_update(np.array([mean]), [min(u + 1e-3, 1 - 1e-12)] * 2)
    assert np.all(hi >= lo)


# -- pump model ---------------------------------------------------------------

def test_pump_data(pump_model):
    s, t, hyper = load_pump_data()
    assert s.size == t.size == 10 and np.all(s >= 0) and np.all(t > 0)
    assert hyper == {"alpha": 1.802, "gamma": 0.01, "delta": 1.0}
    assert pump_model.dim == 11 and pump_model.names[-1] == "beta"
    assert PumpModel.from_csv(alpha=2.0).alpha == 2.0
    with pytest.raises(DomainError):
        PumpModel(np.array([1.0, -1.0]), np.array([1.0, 1.0]))
    with pytest.raises(DomainError):
        PumpModel(np.array([1.0]), np.array([0.0]))


def test_pump_median_map(pump_model):
    m = pump_model
    x = m.initial_state()
    out = pump_gibbs_update(m, x, np.full(11, 0.5))
    rates = stats.gamma.median(m.counts + m.alpha, scale=1 / (m.times + x[-1]))
    beta = stats.gamma.median(m.gamma + 10 * m.alpha, scale=1 / (m.delta + rates.sum()))
    assert np.allclose(out[:-1], rates, rtol=1e-10)
    assert out[-1] == pytest.approx(beta, rel=1e-10)


def test_pump_rejects_bad_state(pump_model):
    with pytest.raises(InvalidState):
        PumpGibbs(pump_model)(np.r_[np.ones(10), -1.0], np.full(11, 0.5))


def test_pump_means_match_oracle(pump_model, pump_oracle):
    g = PumpGibbs(pump_model)
    chains, steps = 200, 5000
    stream = make_stream(StreamSpec(kind=IID, seed=21))
    blocks = stream.blocks(chains * steps, 11).reshape(chains, steps, 11)
    means = run_batch(g, pump_oracle["mean"], blocks)
    est = means.mean(axis=0)
    se = np.hypot(means.std(axis=0, ddof=1) / np.sqrt(chains),
                  pump_oracle["sd"] / np.sqrt(pump_oracle["steps"]))
    assert np.all(np.abs(est - pump_oracle["mean"]) <= 3 * se)


def test_pump_stays_in_bulk(pump_model, pump_oracle):
    run = run_chain(PumpGibbs(pump_model), pump_oracle["mean"],
                    make_stream(StreamSpec(kind=IID, seed=22)), 10 ** 4, thin=1)
    traj = run.trajectory
    assert np.all(traj > 0)
    outside = (traj < pump_oracle["lo"]) | (traj > pump_oracle["hi"])
    assert np.all(outside.mean(axis=0) <= 0.02)
