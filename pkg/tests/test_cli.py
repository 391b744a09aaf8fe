import csv
import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from weakwave.cli import RunConfig, load_config, main
from weakwave.errors import ConfigError
from weakwave.metrology import sweep_theta
from weakwave.qcore import STOKES, PolarizationConfig, make_postselection, make_preselection
from weakwave.weakval import weak_value

from oracles import worked_post, worked_pre, stokes_weak_value_2x2

FIXTURES = Path(__file__).parent / "fixtures"


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_fig3_shape_and_headers(tmp_path):
    assert _run(tmp_path, "fig3") == 0
    head_a, rows_a = _read_csv(tmp_path / "fig3a.csv")
    head_b, rows_b = _read_csv(tmp_path / "fig3b.csv")
    assert head_a == ["x", "unperturbed_density", "perturbed_density_eps=0.1", "perturbed_density_eps=0.5",
                      "perturbed_density_eps=1", "perturbed_density_eps=2"]
    assert head_b[0] == "x" and head_b[1] == "exact_ratio_eps=0.1" and head_b[-1] == "first_order_ratio_eps=2"
    assert len(rows_a) == len(rows_b) == 4097
    raw = (tmp_path / "fig3a.csv").read_bytes()
    assert raw.endswith(b"\n") and b"\r" not in raw


@pytest.mark.parametrize("name", ["fig3a", "fig3b"])
def test_fig3_matches_golden(tmp_path, name):
    assert _run(tmp_path, "fig3") == 0
    head, rows = _read_csv(tmp_path / f"{name}.csv")
    gold_head, gold = _read_csv(FIXTURES / f"{name}_golden.csv")
    assert head == gold_head
    ours = np.array(rows, dtype=float)[::64]
    ref = np.array(gold, dtype=float)
    assert ours.shape == ref.shape
    assert np.allclose(ours, ref, rtol=1e-9, atol=1e-15)


def test_fig3_zero_epsilon_column(tmp_path):
    assert _run(tmp_path, "fig3", "--epsilons", "0,0.5") == 0
    _, rows = _read_csv(tmp_path / "fig3a.csv")
    arr = np.array(rows, dtype=float)
    assert np.array_equal(arr[:, 1], arr[:, 2])


def test_fig3_fourier_plane(tmp_path):
    assert _run(tmp_path, "fig3", "--plane", "fourier", "--epsilons", "0.1") == 0
    head, rows = _read_csv(tmp_path / "fig3b.csv")
    assert head[0] == "p"
    arr = np.array(rows, dtype=float)
    s_w = weak_value(STOKES, make_preselection(PolarizationConfig()), make_postselection(PolarizationConfig())).value
    assert np.allclose(arr[:, 2], 1 + 2 * 0.1 * arr[:, 0] * s_w.imag, atol=1e-12)


def test_fig4(tmp_path):
    assert _run(tmp_path, "fig4") == 0
    head, rows = _read_csv(tmp_path / "fig4.csv")
    assert head == ["theta", "re_sw", "im_sw", "postselect_prob"]
    arr = np.array([[float(v) if v else np.nan for v in r] for r in rows])
    assert len(arr) == 2001 and np.all(np.diff(arr[:, 0]) > 0) and arr[-1, 0] < 2 * math.pi
    ok = ~np.isnan(arr[:, 1])
    mag = np.hypot(arr[ok, 1], arr[ok, 2])
    assert arr[ok, 0][np.argmax(mag)] == arr[np.argmin(arr[:, 3]), 0]
    ref = sweep_theta(0.1, (0.0, 2 * math.pi, 2001), endpoint=False)
    assert np.allclose(arr[:, 1], ref.re_wv, atol=1e-12, equal_nan=True)


def test_fig4_rows_match_oracle(tmp_path):
    assert _run(tmp_path, "fig4", "--steps", "360") == 0
    _, rows = _read_csv(tmp_path / "fig4.csv")
    pre = worked_pre()
    for r in rows[::17]:
        theta = float(r[0])
        w = stokes_weak_value_2x2(pre, worked_post(theta))
        assert complex(float(r[1]), float(r[2])) == pytest.approx(w, abs=1e-12)


def test_fig4_dark_port_fields_empty(tmp_path):
    assert _run(tmp_path, "fig4", "--phi", "0", "--steps", "4") == 0
    _, rows = _read_csv(tmp_path / "fig4.csv")
    # theta = pi / 2 is exactly orthogonal for phi = 0.
    assert rows[1][1] == "" and rows[1][2] == ""
    assert float(rows[1][3]) < 1e-30


def test_fig5(tmp_path):
    assert _run(tmp_path, "fig5", "--steps", "101") == 0
    head, rows = _read_csv(tmp_path / "fig5.csv")
    assert head == ["theta", "eps", "cond_avg", "re_sw", "classical"]
    assert len(rows) == 101 * 5
    classical = np.array([float(r[4]) for r in rows if r[4]])
    assert np.all(np.abs(classical) <= 1 + 1e-12)
    small = np.array([float(r[2]) for r in rows if r[1] == "0.10000000000000001" and r[2]])
    assert np.max(np.abs(small)) > 1


def test_estimate_recovers_epsilon(tmp_path):
    assert _run(tmp_path, "estimate", "--epsilon", "1e-3", "--photons", "1000000", "--trials", "16", "--seed", "5") == 0
    rep = json.loads((tmp_path / "estimate.json").read_text())
    assert set(rep) >= {"epsilon_true", "epsilon_hat_mean", "epsilon_hat_stderr", "n_detected_mean"}
    assert abs(rep["epsilon_hat_mean"] - 1e-3) < 3 * rep["epsilon_hat_stderr"]
    assert rep["n_detected_mean"] == pytest.approx(0.0124e6, rel=0.05)


def test_estimate_zero_epsilon(tmp_path):
    assert _run(tmp_path, "estimate", "--epsilon", "0", "--photons", "200000", "--trials", "8") == 0
    rep = json.loads((tmp_path / "estimate.json").read_text())
    assert abs(rep["epsilon_hat_mean"]) < 3 * rep["epsilon_hat_stderr"]


def test_tomo(tmp_path):
    assert _run(tmp_path, "tomo") == 0
    rep = json.loads((tmp_path / "tomo.json").read_text())
    assert set(rep) >= {"true_state", "reconstructed", "fidelity", "epsilon"}
    assert rep["fidelity"] >= 1 - 1e-4
    assert _run(tmp_path, "tomo", "--epsilon", "0") == 2


def test_bohm_profiles(tmp_path):
    assert _run(tmp_path, "bohm", "--profile", "gaussian") == 0
    head, rows = _read_csv(tmp_path / "bohm.csv")
    assert head == ["x", "p_B", "density"]
    assert all(float(r[1]) == 0 for r in rows)

    assert _run(tmp_path, "bohm", "--profile", "gaussian", "--p0", "0.7") == 0
    _, rows = _read_csv(tmp_path / "bohm.csv")
    assert np.allclose([float(r[1]) for r in rows], 0.7, atol=1e-12)

    assert _run(tmp_path, "bohm", "--streamlines", "5", "--z-max", "1") == 0
    _, rows = _read_csv(tmp_path / "bohm.csv")
    p_b = np.array([float(r[1]) for r in rows])
    assert np.allclose(p_b, -p_b[::-1], atol=1e-12)
    head, lines = _read_csv(tmp_path / "bohm_streamlines.csv")
    assert head == ["z", "x0", "x1", "x2", "x3", "x4"] and len(lines) == 101


def test_json_format(tmp_path):
    assert _run(tmp_path, "fig4", "--steps", "8", "--format", "json") == 0
    data = json.loads((tmp_path / "fig4.json").read_text())
    assert data["columns"] == ["theta", "re_sw", "im_sw", "postselect_prob"]
    assert len(data["rows"]) == 8


def test_exit_codes(tmp_path):
    assert _run(tmp_path, "fig3", "--grid-points", "100") == 2
    assert _run(tmp_path, "fig3", "--half-width", "3") == 2
    assert _run(tmp_path, "fig3", "--sigma", "-1") == 2
    assert _run(tmp_path, "fig3", "--phi", "nan") == 2
    assert _run(tmp_path, "fig4", "--steps", "1") == 2
    assert _run(tmp_path, "fig5", "--epsilons", "0,1") == 2
    # Dark port: phi = 0 with the polarizer at pi / 2.
    assert _run(tmp_path, "fig3", "--phi", "0", "--theta", str(math.pi / 2)) == 3
    assert _run(tmp_path, "estimate", "--phi", "0", "--theta", str(math.pi / 2), "--epsilon", "0",
                "--photons", "100", "--trials", "2") == 3


def test_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"phi": 0.2, "seed": 9, "grid_points": 1025}))
    loaded = load_config(str(cfg), {"seed": 3})
    assert loaded.phi == 0.2 and loaded.seed == 3 and loaded.grid_points == 1025
    assert main(["fig4", "--steps", "4", "--config", str(cfg), "--out", str(tmp_path)]) == 0

    cfg.write_text(json.dumps({"phi": 0.2, "colour": "red"}))
    with pytest.raises(ConfigError):
        load_config(str(cfg), {})
    assert main(["fig4", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert main(["fig4", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2


def test_run_config_validation():
    assert RunConfig().validate().phi == 0.1
    with pytest.raises(ConfigError):
        RunConfig(plane="sideways").validate()
    with pytest.raises(ConfigError):
        RunConfig(seed=-1).validate()


def _cli(out, env_threads, *argv):
    env = dict(os.environ, WEAKWAVE_THREADS=str(env_threads))
    res = subprocess.run([sys.executable, "-m", "weakwave", *argv, "--out", str(out)],
                         env=env, capture_output=True, text=True, timeout=300)
    assert res.returncode == 0, res.stderr
    return res.stdout


DETERMINISM_RUNS = {
    "estimate": ["estimate", "--photons", "300000", "--trials", "4", "--seed", "17"],
    "fig3": ["fig3", "--epsilons", "0.2,1"],
    "fig5": ["fig5", "--steps", "51"],
}


@pytest.mark.parametrize("name", sorted(DETERMINISM_RUNS))
def test_byte_identical_outputs(tmp_path, name):
    argv = DETERMINISM_RUNS[name]
    outputs = {}
    for label, threads in (("a", 1), ("b", 1), ("c", 4)):
        out = tmp_path / label
        _cli(out, threads, *argv)
        outputs[label] = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    assert outputs["a"] == outputs["b"] == outputs["c"]
