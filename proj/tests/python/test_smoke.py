import json
import math
import subprocess
import os

import pytest

try:
    from ldpest import _ldpest as core
except ImportError:
    core = pytest.importorskip("_ldpest")


def test_binary_channel_basics():
    level = core.PrivacyLevel(math.log(3.0))
    ell = core.Representer(lambda x: x, sup_norm=1.0, lo=-1.0, hi=1.0)
    channel = core.make_binary_channel(ell, level)
    assert channel.z0 == pytest.approx(2.0)
    assert channel.success_probability(0.0) == pytest.approx(0.5)
    assert channel.success_probability(1.0) == pytest.approx(0.75)

    audited = core.audit_privacy(channel.restrict_to_values([-1.0, 0.0, 1.0]))
    assert audited == pytest.approx(math.log(3.0), abs=1e-12)


def test_privatize_is_seeded_and_unbiased():
    level = core.PrivacyLevel(math.log(3.0))
    ell = core.Representer(lambda x: x, sup_norm=1.0, lo=-1.0, hi=1.0)
    channel = core.make_binary_channel(ell, level)

    rng = core.RandomStream.root(7).derive(0)
    again = core.RandomStream.root(7).derive(0)
    draws = [channel.privatize(0.5, rng) for _ in range(2000)]
    assert draws == [channel.privatize(0.5, again) for _ in range(2000)]
    assert abs(sum(draws) / len(draws) - 0.5) < 0.2


def test_distances():
    p = core.DiscreteDist([0.0, 1.0], [0.25, 0.75])
    q = core.DiscreteDist([0.0, 1.0], [0.75, 0.25])
    assert core.tv_distance(p, q) == pytest.approx(0.5)
    assert core.hellinger_affinity(p, q) == pytest.approx(math.sqrt(3.0) / 2.0)
    d = core.hellinger_distance(p, q)
    assert d * d == pytest.approx(2.0 * (1.0 - math.sqrt(3.0) / 2.0))


def test_kernel_and_bandwidth():
    k = core.build_kernel(0, 0)
    assert k(0.0) == pytest.approx(0.75)
    assert k.moment(0) == pytest.approx(1.0)

    fam = core.derivative_kernel_family(0, 1.0, 1.0, 0.0)
    assert fam.rate_exponent == pytest.approx(0.5)
    bw = core.select_bandwidth(fam, 10000, core.PrivacyLevel(math.log(3.0)))
    assert bw.h[0] == pytest.approx(math.sqrt(0.02))
    assert not bw.clamped


def test_binary_search_and_surrogate():
    assert core.critical_value_G(0.25, 0.75) == pytest.approx(0.5)
    plan = core.build_plan(
        0.2, core.ThetaRange(0.0, 1.0), core.ThetaProbMap.linear_zero_bias(4.0)
    )
    assert plan.n_steps == 6
    assert len(plan.critical_values) == 4
    z = [4.0] * 10
    assert core.binary_search_estimate(z, plan) == pytest.approx(1.0)

    g = core.affine_surrogate(plan)
    assert g.bound == pytest.approx(0.4)
    assert abs(g(4.0) - 1.0) <= g.bound + 1e-12


def test_moduli():
    curve = core.analytic_modulus_curve("moment_heavy", "tv", kappa=2.0)
    assert curve.exponent == pytest.approx(0.5)
    assert curve(0.04) == pytest.approx(0.2)

    family = core.FiniteFamily()
    family.add(core.DiscreteDist([0.0, 1.0], [0.5, 0.5]), 0.0)
    family.add(core.DiscreteDist([0.0, 1.0], [0.1, 0.9]), 1.0)
    assert core.brute_force_modulus(family, 1.0, "tv") == pytest.approx(1.0)
    assert core.brute_force_modulus(family, 0.01, "tv") == pytest.approx(0.0)


def test_run_experiment_smoke():
    config = {
        "model": {"kind": "uniform_endpoint", "theta": 1.0, "M": 1.0},
        "family": {"kind": "uniform_endpoint", "M": 1.0},
        "estimator": "sample_mean",
        "loss": {"kind": "power", "gamma": 2.0},
        "alphas": [math.log(3.0)],
        "ns": [500, 1000],
        "replicates": 400,
        "seed": 11,
        "threads": 2,
    }
    report = core.run_experiment_json(json.dumps(config))
    cells = report["cells"]
    assert len(cells) == 2
    for cell in cells:
        assert abs(cell["risk"] - 15.0 / cell["n"]) < 6.0 * cell["se"]

    slope, _, _ = core.fit_rate_points([(1000, 15.0 / 1000), (2000, 15.0 / 2000),
                                        (4000, 15.0 / 4000), (8000, 15.0 / 8000)])
    assert slope == pytest.approx(-1.0)


def test_loss_and_checks():
    sq = core.loss("power", 2.0)
    assert sq(3.0) == pytest.approx(9.0)
    assert sq.doubling_a == pytest.approx(2.25)

    results = core.run_all_checks(seed=5)
    assert all(r["failures"] == 0 for r in results)


def test_cli_audit_roundtrip(tmp_path):
    cli = os.environ.get("LDPEST_CLI")
    if not cli:
        pytest.skip("LDPEST_CLI not set")
    descriptor = tmp_path / "channel.json"
    descriptor.write_text(
        json.dumps({"type": "binary", "sup_norm": 1.0,
                    "ell_values": [-1.0, 0.0, 1.0]})
    )
    out = subprocess.run(
        [cli, "audit", "--alpha", str(math.log(3.0)), "--channel", str(descriptor)],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert "PASS" in out.stdout


def test_cli_error_paths(tmp_path):
    cli = os.environ.get("LDPEST_CLI")
    if not cli:
        pytest.skip("LDPEST_CLI not set")

    leaky = subprocess.run(
        [cli, "audit", "--alpha", "0.1",
         "--channel", '{"type": "discrete", "matrix": [[1.0, 0.0], [0.0, 1.0]]}'],
        capture_output=True, text=True,
    )
    assert leaky.returncode == 1
    assert "FAIL" in leaky.stdout

    bad = tmp_path / "bad.json"
    bad.write_text("{\n  broken\n}")
    out = subprocess.run(
        [cli, "simulate", "--config", str(bad), "--output", str(tmp_path / "x")],
        capture_output=True, text=True,
    )
    assert out.returncode == 2
    assert "line" in out.stderr

    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps({"model": {"kind": "uniform_endpoint"}}))
    out = subprocess.run(
        [cli, "simulate", "--config", str(invalid), "--output", str(tmp_path / "y")],
        capture_output=True, text=True,
    )
    assert out.returncode == 2
    assert "config." in out.stderr
