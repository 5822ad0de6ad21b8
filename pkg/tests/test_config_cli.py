import json
import os
import subprocess
import sys
from math import e

import numpy as np
import pytest

from bbgky_lab.cli import main
from bbgky_lab.config import (CORRELATION_NORM_CAP, chaos_sequence,
                              config_from_dict, default_config_dict,
                              genuine_state_sequence, load_config,
                              random_sequence)
from bbgky_lab.operators import trace_norm
from bbgky_lab.report import format_float


def write_config(tmp_path, overrides=None, **kwargs):
    data = default_config_dict(**kwargs)
    data.update(overrides or {})
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path


def test_minimal_config_accepted(tmp_path):
    path = write_config(tmp_path, overrides={
        "d": 2, "n_max": 2, "hbar": 1.0,
        "kinetic": [[1.0, 0.0], [0.0, -1.0]],
        "potential": np.diag([0.3, -0.1, -0.1, 0.2]).tolist(),
        "times": [0.5], "seed": 42,
    })
    cfg = load_config(path)
    assert cfg.d == 2 and cfg.n_max == 2 and cfg.seed == 42


def test_complex_entries_as_pairs(tmp_path):
    kin = [[[0.5, 0.0], [0.0, -0.25]], [[0.0, 0.25], [-0.5, 0.0]]]
    path = write_config(tmp_path, overrides={"kinetic": kin})
    cfg = load_config(path)
    assert cfg.kinetic[0, 1] == pytest.approx(-0.25j)
    assert cfg.kinetic[1, 0] == pytest.approx(0.25j)


def test_non_hermitian_kinetic_rejected(tmp_path):
    path = write_config(tmp_path, overrides={"kinetic": [[0.0, 1.0], [0.0, 0.0]]})
    with pytest.raises(ValueError, match="kinetic"):
        load_config(path)


def test_swap_asymmetric_potential_rejected(tmp_path):
    bad = np.zeros((4, 4))
    bad[1, 1] = 1.0  # |01><01| alone breaks the factor swap
    path = write_config(tmp_path, overrides={"potential": bad.tolist()})
    with pytest.raises(ValueError, match="swap|symmetric"):
        load_config(path)


def test_other_validation_errors(tmp_path):
    with pytest.raises(ValueError, match="'seed'"):
        config_from_dict({k: v for k, v in default_config_dict().items()
                          if k != "seed"})
    with pytest.raises(ValueError, match="n_max"):
        config_from_dict({**default_config_dict(), "n_max": 9})
    with pytest.raises(ValueError, match="scenario"):
        config_from_dict({**default_config_dict(), "scenario": "nope"})
    with pytest.raises(ValueError, match="epsilons"):
        config_from_dict({**default_config_dict(), "epsilons": [0.5, 1.0]})
    with pytest.raises(ValueError, match="not valid JSON"):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        load_config(path)


def test_random_sequences_deterministic(config3):
    a = random_sequence(config3, "correlation")
    b = random_sequence(config3, "correlation")
    for s in range(1, config3.n_max + 1):
        assert np.array_equal(a.component(s).mat, b.component(s).mat)


def test_state_kind_positive_trace_one(config3):
    seq = random_sequence(config3, "state")
    for s in range(1, config3.n_max + 1):
        comp = seq.component(s)
        assert np.linalg.eigvalsh(comp.mat).min() > -1e-12
        assert abs(comp.trace() - 1.0) < 1e-12


def test_correlation_kind_below_convergence_threshold(config3):
    assert CORRELATION_NORM_CAP == pytest.approx(1 / (2 * e ** 3))
    assert CORRELATION_NORM_CAP == pytest.approx(0.0249, abs=2e-4)
    seq = random_sequence(config3, "correlation")
    for norm in seq.norms():
        assert norm < CORRELATION_NORM_CAP


def test_genuine_state_only_top_component(config3):
    seq = genuine_state_sequence(config3)
    for s in range(1, config3.n_max):
        assert np.max(np.abs(seq.component(s).mat)) == 0.0
    top = seq.component(config3.n_max)
    assert abs(top.trace() - 1.0) < 1e-12
    assert np.linalg.eigvalsh(top.mat).min() > -1e-12


def test_chaos_sequence_shape(config3):
    seq = chaos_sequence(config3)
    assert trace_norm(seq.component(1)) == pytest.approx(0.02)
    for s in range(2, config3.n_max + 1):
        assert np.max(np.abs(seq.component(s).mat)) == 0.0


def test_format_float_round_trips():
    for x in (0.1, 1 / 3, 2e-17, 123456.789, 1e300):
        assert float(format_float(x)) == x


def run_cli(args):
    return main(args)


def test_cli_run_and_determinism(tmp_path):
    cfg = write_config(tmp_path, scenario="evolve")
    out1 = tmp_path / "out1"
    out2 = tmp_path / "out2"
    assert run_cli(["run", "--config", str(cfg), "--out", str(out1)]) == 0
    assert run_cli(["run", "--config", str(cfg), "--out", str(out2)]) == 0
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    header = (out1 / "results.csv").read_text().splitlines()[0]
    assert header == "t,s,trace_norm_correlation,trace_norm_density"
    report = json.loads((out1 / "report.json").read_text())
    assert report["scenario"] == "evolve"
    assert report["rng_algorithm"] == "numpy-PCG64"
    assert report["passed"] is True


def test_cli_meanfield(tmp_path):
    cfg = write_config(tmp_path, scenario="meanfield",
                       overrides={"times": [0.5]})
    out = tmp_path / "mf"
    assert run_cli(["meanfield", "--config", str(cfg), "--out", str(out)]) == 0
    rows = (out / "results.csv").read_text().splitlines()
    assert rows[0] == "epsilon,t,s,value"
    assert len(rows) > 1


def test_cli_observables_scenario(tmp_path):
    cfg = write_config(tmp_path, scenario="observables",
                       overrides={"times": [0.5], "n_max": 2})
    assert run_cli(["run", "--config", str(cfg)]) == 0


def test_cli_bad_config_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({**default_config_dict(),
                                "kinetic": [[0.0, 1.0], [0.0, 0.0]]}))
    assert run_cli(["run", "--config", str(path)]) == 2
    assert run_cli(["run", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_failure_exit_code(tmp_path, monkeypatch):
    # force a failing row by shrinking a tolerance far below rounding
    cfg = write_config(tmp_path, overrides={
        "scenario": "verify",
        "times": [0.5],
        "tolerances": {"dual_route": 1e-30}})
    code = run_cli(["run", "--config", str(cfg)])
    assert code == 1


def test_cli_entrypoint_subprocess(tmp_path):
    cfg = write_config(tmp_path, scenario="evolve")
    env = dict(os.environ, BBGKY_LAB_THREADS="2")
    proc = subprocess.run(
        [sys.executable, "-m", "bbgky_lab.cli", "run", "--config", str(cfg)],
        capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    assert "checks passed" in proc.stdout


def test_thread_env_validation(monkeypatch):
    from bbgky_lab._parallel import parallel_map, thread_count
    monkeypatch.setenv("BBGKY_LAB_THREADS", "3")
    assert thread_count() == 3
    assert parallel_map(lambda x: x * x, range(5)) == [0, 1, 4, 9, 16]
    monkeypatch.setenv("BBGKY_LAB_THREADS", "zzz")
    with pytest.raises(ValueError):
        thread_count()
