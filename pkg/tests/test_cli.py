import json
import math
from pathlib import Path

import numpy as np
import pytest

from compactlab.cli import main
from compactlab.norms import NormParams, norm_report
from compactlab.spectral import Grid, load_field, save_field
from compactlab.states import X0, BreatherSpec, compacton


def write_config(tmp_path, payload, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


TINY_X = {
    "schema_version": 1, "coordinates": "x", "N": 64, "T": 2e-4,
    "dt": 1e-5, "snapshot_stride": 10, "diag_stride": 2, "mu": 1,
    "data": {"omega": 1.0, "theta": 0.0},
}


def test_invalid_config_exits_2_without_artifact(tmp_path, capsys):
    bad = dict(TINY_X)
    bad["unknown_key"] = 1
    cfg = write_config(tmp_path, bad)
    out = tmp_path / "art"
    rc = main(["--config", cfg, "--out", str(out), "simulate"])
    assert rc == 2
    assert not out.exists()


def test_missing_config_exits_3(tmp_path):
    rc = main(["--config", str(tmp_path / "nope.json"),
               "--out", str(tmp_path / "a"), "simulate"])
    assert rc == 3


def test_blowup_exits_4(tmp_path):
    cfg = dict(TINY_X)
    cfg["dt"] = 0.05
    cfg["T"] = 0.5
    rc = main(["--config", write_config(tmp_path, cfg),
               "--out", str(tmp_path / "boom"), "simulate"])
    assert rc == 4


def test_simulate_deterministic_diagnostics(tmp_path):
    cfg = write_config(tmp_path, TINY_X)
    rc1 = main(["--config", cfg, "--out", str(tmp_path / "a"), "simulate"])
    rc2 = main(["--config", cfg, "--out", str(tmp_path / "b"), "simulate"])
    assert rc1 == rc2 == 0
    a = (tmp_path / "a" / "diagnostics.csv").read_bytes()
    b = (tmp_path / "b" / "diagnostics.csv").read_bytes()
    assert a == b


def test_norms_command_matches_library(tmp_path, capsys):
    g = Grid(1.5 * X0, 256)
    phi = compacton(BreatherSpec(), g)
    save_field(tmp_path / "phi", phi, t=0.0)
    cfg = write_config(tmp_path, {
        "schema_version": 1, "input": str(tmp_path / "phi"),
        "s": 0.5, "tau": 0.1,
    })
    rc = main(["--config", cfg, "--out", str(tmp_path / "rep"), "norms"])
    assert rc == 0
    payload = json.loads((tmp_path / "rep" / "norms.json").read_text())
    direct = norm_report(phi, NormParams(0.5, 0.1), t=0.0)
    # identical code path: values agree bit for bit
    for key in ("h_s", "z_s", "ah_s_tau", "az_s_tau", "l_inf"):
        assert payload[key] == getattr(direct, key)


def test_transform_roundtrip_via_files(tmp_path):
    g = Grid(1.5 * X0, 512)
    phi = compacton(BreatherSpec(), g)
    save_field(tmp_path / "u0", phi, t=0.0)
    fwd_cfg = write_config(tmp_path, {
        "schema_version": 1, "direction": "forward",
        "input": str(tmp_path / "u0"), "N": 512, "L": 20.0,
    }, "fwd.json")
    rc = main(["--config", fwd_cfg, "--out", str(tmp_path / "flat"),
               "transform"])
    assert rc == 0
    U0, _ = load_field(tmp_path / "flat" / "U0")
    assert U0.grid.n_points == 512
    inv_cfg = write_config(tmp_path, {
        "schema_version": 1, "direction": "inverse",
        "input": str(tmp_path / "flat" / "U0"), "N": 512,
        "L": 1.5 * X0, "c": 0.0,
    }, "inv.json")
    rc = main(["--config", inv_cfg, "--out", str(tmp_path / "back"),
               "transform"])
    assert rc == 0
    u, _ = load_field(tmp_path / "back" / "u")
    assert np.max(np.abs(u.samples - phi.samples)) < 1e-6


def test_stability_command(tmp_path):
    cfg = write_config(tmp_path, TINY_X)
    assert main(["--config", cfg, "--out", str(tmp_path / "run"),
                 "simulate"]) == 0
    assert main(["stability", str(tmp_path / "run")]) == 0
    table = (tmp_path / "run" / "stability.csv").read_text().splitlines()
    assert table[0] == "t,distance,theta_star,h_star,boundary_flag"
    assert len(table) >= 3


def test_verify_estimates_single_case(tmp_path, capsys):
    cfg = write_config(tmp_path, {"schema_version": 1, "size": 4, "N": 256})
    rc = main(["--config", cfg, "--out", str(tmp_path / "est"),
               "verify-estimates", "--case", "ProductRule"])
    assert rc == 0
    report = json.loads((tmp_path / "est" / "estimates.json").read_text())
    assert report[0]["name"] == "ProductRule"
    assert report[0]["residual"] < 1e-10
    out = capsys.readouterr().out
    assert "ProductRule" in out


def test_figure1_preset_config():
    from compactlab.cli import figure1_config, validate_config

    cfg = figure1_config()
    validate_config(cfg, "simulate")
    assert cfg["N"] == 2**8
    assert cfg["T"] == 0.5
    assert cfg["data"]["perturbation"] == {"a": 0.1, "w": 20.0}
    assert cfg["mu"] == 1
    # five snapshot slices: stride covers T in four equal legs
    steps = round(cfg["T"] / cfg["dt"])
    assert steps % cfg["snapshot_stride"] == 0
    assert steps // cfg["snapshot_stride"] == 4
