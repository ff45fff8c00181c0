"""Smoke tests for the Python bindings: every exposed operation is exercised
once against known values; heavy numerical validation lives in the C++ suite.
"""

import math

import pytest

import qbsg


ETA_TOT = 0.039011199055203117
EPS_SUM_HEADLINE = 0.31598816080445388
HONEST_CLICK = 9.204622371694059e-4


def test_channel_defaults():
    ch = qbsg.ChannelModel()
    assert ch.alpha2 == 0.03
    assert abs(ch.eta_tot() - ETA_TOT) < 1e-15
    assert abs(ch.site_attenuation() - 3e-8) < 1e-20
    ch.validate()
    ch.eta = 1.5
    with pytest.raises(ValueError):
        ch.validate()


def test_bounds_headline_report():
    ch = qbsg.ChannelModel()
    kappa = qbsg.honest_click_prob(ch)
    assert abs(kappa - HONEST_CLICK) < 1e-15
    cfg = qbsg.ProtocolConfig(n=10**6, kappa=kappa, channel=ch, seed=1)
    rep = qbsg.build_report(cfg)
    assert abs(rep.eps_sum - EPS_SUM_HEADLINE) < 1e-12
    assert 0.28 <= rep.eps_sum <= 0.36
    assert not rep.advantage
    assert "eps_sum=0.315988" in qbsg.report_key_values(rep)

    big = qbsg.ProtocolConfig(n=2 * 10**9, kappa=qbsg.default_kappa(ch), channel=ch, seed=1)
    assert qbsg.build_report(big).advantage


def test_bound_functions():
    assert qbsg.epsilon_b_bound(0.0) == 0.0
    assert abs(qbsg.epsilon_b_bound(0.03) - 0.16813652435063186) < 1e-13
    assert qbsg.cheat_function_F(0.0, 0.03) == 0.0
    assert qbsg.cheat_function_F(0.5, 0.03) == 0.5
    ch = qbsg.ChannelModel()
    assert qbsg.epsilon_a_bound(ch.dark, ch) == 0.0
    assert qbsg.delta_n_bound(10**6, 2e-3, ch) == pytest.approx(0.09721759525515069, rel=1e-9)
    assert qbsg.classical_floor(0.0) == 0.5
    assert abs(qbsg.helstrom_success(qbsg.overlap_angle(0.03)) - 0.66813652435063186) < 1e-13


def test_run_protocol_and_determinism():
    ch = qbsg.ChannelModel()
    cfg = qbsg.ProtocolConfig(n=2000, kappa=2e-3, channel=ch, seed=9)
    out = qbsg.run_protocol(cfg, return_records=True)
    assert not out["aborted"]
    assert out["bits"].shape == (2000,)
    assert out["records"].shape == (2000, 4)
    mean = float(out["bits"].mean())
    assert abs(mean - 0.5) < 0.05
    # a,b,k,x columns: x = a xor b
    rec = out["records"]
    assert ((rec[:, 0] ^ rec[:, 1]) == rec[:, 3]).all()

    again = qbsg.run_protocol(cfg, return_records=True)
    assert (again["bits"] == out["bits"]).all()
    assert (again["records"] == out["records"]).all()


def test_adversaries():
    ch = qbsg.ChannelModel()
    cfg = qbsg.ProtocolConfig(n=20000, kappa=2e-3, channel=ch, seed=3)
    est = qbsg.measure_bias(cfg, adversary="bob_early", trials=1)
    assert 0.13 < est.mean_bias < 0.21
    assert est.abort_freq == 0.0

    caught = qbsg.measure_bias(
        qbsg.ProtocolConfig(n=50000, kappa=2e-3, channel=ch, seed=4),
        adversary="alice_straddle",
        trials=5,
    )
    assert caught.abort_freq == 1.0

    with pytest.raises(ValueError):
        qbsg.measure_bias(cfg, adversary="mallory")


def test_optics_helpers():
    ch = qbsg.ChannelModel()
    assert qbsg.no_click_prob_fock([1.0, 0.0], ch) == pytest.approx(1.0, abs=1e-14)
    assert qbsg.no_click_prob_fock([0.0, 1.0], ch) == pytest.approx(1.0 - ETA_TOT, rel=1e-13)
    assert qbsg.fidelity_floor_from_clicks(ch.dark, ch) == pytest.approx(1.0, abs=1e-14)

    sq = qbsg.GaussianState.squeezed(0.5)
    assert not qbsg.p_function_positive(sq)
    assert qbsg.p_function_positive(qbsg.attenuate_gaussian(sq, 1e-3, 1e-3))
    assert qbsg.GaussianState.vacuum().det_cov() == pytest.approx(0.25, rel=1e-14)


def test_consistency_test():
    ch = qbsg.ChannelModel()
    expected = ch.att_bob_to_alice * ch.n0  # 1e6 photons at the monitor
    sigma = 0.05 * expected
    # Alternating +/- sigma: exact mean, variance n/(n-1) * sigma^2 -> passes.
    readings = [expected + (sigma if i % 2 == 0 else -sigma) for i in range(200)]
    res = qbsg.gaussian_consistency_test(readings, sigma, expected)
    assert res.passed
    assert res.p_mean > 0.9
    assert res.alpha2_estimate == pytest.approx(ch.alpha2, rel=1e-9)

    flat = qbsg.gaussian_consistency_test([expected] * 200, sigma, expected)
    assert not flat.passed


def test_systematics_envelope():
    ch = qbsg.ChannelModel()
    cfg = qbsg.ProtocolConfig(n=10**6, kappa=qbsg.honest_click_prob(ch), channel=ch, seed=1)
    rep = qbsg.build_report(cfg)
    env = qbsg.propagate_systematics(rep, rel_eta=0.10, rel_alpha2=0.10)
    assert env.lo == pytest.approx(0.30454816419590497, rel=1e-9)
    assert env.hi == pytest.approx(0.33242021687888845, rel=1e-9)
    assert env.contains(rep.eps_sum)


def test_run_config(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        "[protocol]\n"
        "n = 1000\n"
        "kappa = auto\n"
        "seed = 2\n"
        "[sweep]\n"
        "param = alpha2\n"
        "start = 0.01\n"
        "stop = 0.05\n"
        "steps = 3\n"
        "scale = linear\n"
    )
    rows = qbsg.run_config(str(cfg))
    assert len(rows) == 3
    assert [r["value"] for r in rows] == pytest.approx([0.01, 0.03, 0.05])
    for r in rows:
        assert r["status"] == "ok"
        assert r["eps_sum"] > 0.0
        assert math.isnan(r["mc_bias"])  # Monte-Carlo off

    with pytest.raises(RuntimeError):
        qbsg.run_config(str(tmp_path / "missing.ini"))
