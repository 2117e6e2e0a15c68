"""Seeded protocol simulation: reproducibility, estimator calibration,
abort statistics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import qdistill.montecarlo as mc
import qdistill.noise_models as nm


def make_config(**kw):
    base = dict(n_pairs=4096, beta=0.98,
                noise=nm.SingleQubitWhiteNoise(0.99), rounds=2,
                f_min=0.7, seed=20240817, trials=100)
    base.update(kw)
    return mc.ProtocolConfig(**base)


# ------------------------------------------------------------------ config

def test_config_validation():
    with pytest.raises(ValueError):
        make_config(n_pairs=2)               # too few pairs to estimate
    with pytest.raises(ValueError):
        make_config(beta=1.2)
    with pytest.raises(ValueError):
        make_config(rounds=0)
    with pytest.raises(ValueError):
        make_config(f_min=1.5)
    with pytest.raises(ValueError):
        make_config(seed=2 ** 64)
    with pytest.raises(ValueError):
        make_config(trials=0)
    with pytest.raises(ValueError):
        make_config(delta=0.0)               # abort margin must be positive
    with pytest.raises(ValueError):
        make_config(f_min=0.999, delta=0.01)  # threshold above 1


def test_delta_default_clamps_to_positive():
    # the proof margin (3 beta - 4 f_min - 1)/4 is negative here; the
    # default must still give a usable positive abort margin
    cfg = make_config(beta=0.95, f_min=0.52, delta=None)
    assert cfg.resolved_delta == pytest.approx(0.01)
    wide = make_config(beta=1.0, f_min=0.25, delta=None)
    assert wide.resolved_delta == pytest.approx((3 - 2) / 4 + 0.01)


def test_config_hash_is_stable_and_sensitive():
    a = make_config()
    b = make_config()
    assert mc.config_hash(a) == mc.config_hash(b)
    assert len(mc.config_hash(a)) == 64          # sha256 hex
    c = make_config(beta=0.981)
    assert mc.config_hash(c) != mc.config_hash(a)
    d = make_config(noise=nm.SingleQubitWhiteNoise(0.991))
    assert mc.config_hash(d) != mc.config_hash(a)


def test_config_as_dict_roundtrips_noise():
    cfg = make_config()
    d = cfg.as_dict()
    assert d["noise"] == {"kind": "white", "parameter": 0.99}
    assert d["n_pairs"] == 4096
    assert d["delta"] == cfg.resolved_delta


def test_channel_state_is_isotropic_mix():
    cfg = make_config(beta=0.9)
    p = cfg.channel_state().p
    assert p[0] == pytest.approx(0.9 + 0.1 / 4, abs=1e-15)
    assert np.allclose(p[1:], 0.025, atol=1e-15)


# ----------------------------------------------------------- reproducibility

def test_same_seed_same_outcome():
    cfg = make_config()
    a = mc.simulate_run(cfg, mc.trial_rng(cfg.seed, 3), trial=3)
    b = mc.simulate_run(cfg, mc.trial_rng(cfg.seed, 3), trial=3)
    assert a.flag == b.flag
    assert a.pair_counts == b.pair_counts
    assert a.fidelity_estimate == b.fidelity_estimate


def test_different_trials_decorrelate():
    cfg = make_config()
    outs = {mc.simulate_run(cfg, mc.trial_rng(cfg.seed, t)).fidelity_estimate
            for t in range(8)}
    assert len(outs) > 1


def test_trial_rng_is_spawn_keyed():
    a = mc.trial_rng(123, 0).integers(0, 2 ** 32, 4)
    b = mc.trial_rng(123, 1).integers(0, 2 ** 32, 4)
    c = mc.trial_rng(123, 0).integers(0, 2 ** 32, 4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, c)


# ------------------------------------------------------------------- physics

def test_fidelity_estimator_is_calibrated():
    # estimator (3 sqrt(mean) - 1)/2 inverts the double-win probability of
    # correlation checks on isotropic pairs: mean -> ((1 + beta)/2)^2
    beta = 0.98
    cfg = make_config(n_pairs=2 ** 16, beta=beta, f_min=0.5, trials=400)
    ests = []
    for t in range(400):
        out = mc.simulate_run(cfg, mc.trial_rng(cfg.seed, t))
        assert out.flag == "ok"
        ests.append(out.fidelity_estimate)
    target = (3 * beta + 1) / 4
    mean = float(np.mean(ests))
    se = float(np.std(ests, ddof=1)) / math.sqrt(len(ests))
    assert abs(mean - target) < 4 * se + 1e-4


def test_pair_counts_halve_each_round():
    cfg = make_config(rounds=3)
    out = mc.simulate_run(cfg, mc.trial_rng(cfg.seed, 0))
    counts = out.pair_counts
    assert counts[0] == cfg.n_pairs - math.isqrt(cfg.n_pairs)
    for before, after in zip(counts, counts[1:]):
        assert 0 <= after <= before // 2


def test_perfect_protocol_never_aborts_and_halves_exactly():
    cfg = mc.ProtocolConfig(n_pairs=4096, beta=1.0,
                            noise=nm.SingleQubitWhiteNoise(1.0), rounds=2,
                            f_min=0.9, seed=7, trials=100)
    out = mc.simulate_run(cfg)
    assert out.ok
    assert out.pair_counts == (4032, 2016, 1008)
    assert out.fidelity_estimate == 1.0
    assert np.allclose(out.final_state, [1, 0, 0, 0], atol=1e-12)


def test_low_beta_always_aborts_in_estimation():
    # F = 0.625 sits ~6 standard errors below the 0.91 threshold at this
    # estimation sample size, so every trial aborts before distilling
    cfg = make_config(n_pairs=2 ** 16, beta=0.5, f_min=0.9, trials=100)
    for t in range(50):
        out = mc.simulate_run(cfg, mc.trial_rng(cfg.seed, t))
        assert out.flag == "fail"
        assert out.abort_stage == "parameter_estimation"
        assert out.rounds_completed == 0


def test_tiny_ensembles_abort_in_distillation():
    cfg = mc.ProtocolConfig(n_pairs=4, beta=1.0,
                            noise=nm.SingleQubitWhiteNoise(1.0), rounds=2,
                            f_min=0.9, seed=7, trials=100)
    out = mc.simulate_run(cfg)
    assert out.flag == "fail"
    assert out.abort_stage == "round 2"      # 2 pairs -> 1 pair -> starved
    assert out.rounds_completed == 1


# ---------------------------------------------------------------- aggregates

def test_estimate_abort_probability_requires_enough_trials():
    with pytest.raises(ValueError):
        mc.estimate_abort_probability(make_config(trials=50))


def test_abort_estimate_wilson_interval():
    cfg = make_config(n_pairs=2 ** 16, beta=0.5, f_min=0.9, trials=120)
    est = mc.estimate_abort_probability(cfg)
    assert est.trials == 120
    assert est.aborts == 120
    assert est.rate == 1.0
    lo, hi = est.ci
    assert lo <= est.rate <= hi + 1e-12
    assert hi == pytest.approx(1.0, abs=1e-12)
    assert 0.9 < lo < 1.0


def test_abort_estimate_zero_rate_interval():
    cfg = mc.ProtocolConfig(n_pairs=4096, beta=1.0,
                            noise=nm.SingleQubitWhiteNoise(1.0), rounds=2,
                            f_min=0.9, seed=7, trials=150)
    est = mc.estimate_abort_probability(cfg)
    assert est.rate == 0.0
    assert est.ci_low < 1e-12
    assert 0 < est.ci_high < 0.06


# ---------------------------------------------------------------- trajectory

def test_fidelity_trajectory_tracks_deterministic_marginals():
    # beta = 2/3 gives the F = 3/4 isotropic state; one ideal round must
    # reproduce the exact rational one-round output
    cfg = mc.ProtocolConfig(n_pairs=2 ** 14, beta=2 / 3,
                            noise=nm.SingleQubitWhiteNoise(1.0), rounds=3,
                            f_min=0.5, seed=11, trials=100)
    rows = mc.fidelity_trajectory(cfg)
    assert rows[0].round_index == 0
    assert rows[0].success_probability is None
    assert np.allclose(rows[0].marginal, [0.75, 1 / 12, 1 / 12, 1 / 12],
                       atol=1e-12)
    assert np.allclose(rows[1].marginal, [41 / 52, 1 / 52, 1 / 52, 9 / 52],
                       atol=1e-12)
    assert rows[1].success_probability == pytest.approx(13 / 18, abs=1e-12)
    # fidelity climbs toward the fixed point, distances shrink
    dists = [r.distance_to_fixed_point for r in rows]
    assert all(d2 < d1 for d1, d2 in zip(dists, dists[1:]))
    fids = [r.marginal[0] for r in rows]
    assert all(f2 > f1 for f1, f2 in zip(fids, fids[1:]))
    # pair counts come from an actual seeded run
    assert rows[0].pairs == cfg.n_pairs - math.isqrt(cfg.n_pairs)
    for before, after in zip(rows, rows[1:]):
        assert after.pairs <= before.pairs // 2
