import csv
import json

import numpy as np
import pytest

from qwalkrot import cli


def _run(tmp_path, command, config=None, *extra):
    args = [command, "--out", str(tmp_path)]
    if config is not None:
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        args += ["--config", str(path)]
    return cli.main(args + list(extra))


def _result(tmp_path):
    return json.loads((tmp_path / "result.json").read_text())


def test_walk_command(tmp_path):
    assert _run(tmp_path, "walk", {"theta": 2 * np.pi / 3, "N": 3}) == 0
    rec = _result(tmp_path)
    assert rec["results"]["revival_residual"] == pytest.approx(0.25)
    assert rec["version"] and "wall_clock_s" in rec and "units" in rec
    assert rec["config"]["N"] == 3


def test_cqed_rwa_command(tmp_path):
    assert _run(tmp_path, "cqed-rwa", {"preset": "table2-homogeneous", "N_values": [3]}) == 0
    assert _result(tmp_path)["results"]["rows"][0]["F"] == pytest.approx(0.9804, abs=5e-4)
    rows = list(csv.reader(open(tmp_path / "fidelity.csv", encoding="utf-8")))
    assert rows[0] == ["N", "F", "phi"]


def test_fsbsw_command(tmp_path):
    assert _run(tmp_path, "fsbsw", {"n": 4}) == 0
    res = _result(tmp_path)["results"]
    assert res["duration_pi_over_g"] == 5
    assert res["phase_flip_verified"] is True
    assert (tmp_path / "cost.csv").exists()


@pytest.mark.parametrize("command", ["embed", "qsp", "ion", "rydberg"])
def test_default_commands_succeed(tmp_path, command):
    assert _run(tmp_path, command) == 0
    assert "results" in _result(tmp_path)


def test_partition_from_file(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text("[1, 2, 3]")
    assert _run(tmp_path, "ion", {"partition_file": str(inst)}) == 0
    assert _result(tmp_path)["results"]["balanced_states"] == ["110", "001"]


def test_validation_error_lists_fields(tmp_path, capsys):
    assert _run(tmp_path, "walk", {"bogus": 1, "N": 4, "theta": "x"}) == 2
    err = json.loads(capsys.readouterr().err)
    assert set(err["fields"]) == {"bogus", "N", "theta"}


def test_malformed_config_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert cli.main(["walk", "--config", str(path), "--out", str(tmp_path)]) == 2


def test_simulation_error_exit_code(tmp_path, capsys):
    # an odd number of ions has no balanced subspace
    assert _run(tmp_path, "ion", {"n_ions": 3}) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "simulation" and err["command"] == "ion"


def test_fsbsw_range_is_validated(tmp_path):
    assert _run(tmp_path, "fsbsw", {"n": 9}) == 2


def _payload(path):
    rec = json.loads((path / "result.json").read_text())
    rec.pop("wall_clock_s")
    return rec


@pytest.mark.parametrize("command,config", [("embed", {}), ("cqed-rwa", {"random_couplings": {"n": 3}})])
def test_same_seed_same_payload(tmp_path, command, config):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for out, seed in ((a, 5), (b, 5), (c, 6)):
        out.mkdir()
        assert _run(out, command, config, "--seed", str(seed)) == 0
    assert _payload(a) == _payload(b)
    assert _payload(a)["results"] != _payload(c)["results"]


def test_tol_flag_is_recorded_and_restored(tmp_path):
    from qwalkrot.linalg import settings

    before = settings.tol
    assert _run(tmp_path, "walk", None, "--tol", "1e-6") == 0
    assert _result(tmp_path)["tol"] == 1e-6
    assert settings.tol == before


def test_sweep_fig6(tmp_path):
    assert _run(tmp_path, "sweep", {"kind": "fig6", "points": 13, "workers": 2}) == 0
    rows = list(csv.reader(open(tmp_path / "sweep.csv", encoding="utf-8")))
    assert rows[0] == ["k", "F_closed_form", "F_sequence"]
    assert len(rows) == 14
    assert len(list((tmp_path / "points").glob("*.json"))) == 13
    assert not list((tmp_path / "points").glob("*.tmp"))
    data = np.array(rows[1:], dtype=float)
    assert np.allclose(data[:, 1], data[:, 2], atol=1e-10)


def test_sweep_fig7(tmp_path):
    assert _run(tmp_path, "sweep", {"kind": "fig7", "x_points": 21}) == 0
    rows = list(csv.reader(open(tmp_path / "sweep.csv", encoding="utf-8")))
    assert rows[0] == ["x", "walk_polynomial", "two_node_target"]
    data = np.array(rows[1:], dtype=float)
    assert np.allclose(data[[0, -1], 1:], 1)


def test_sweep_table4_grid(tmp_path):
    assert _run(tmp_path, "sweep", {"kind": "table4", "g_mhz": [9.0, 3.0], "N_values": [3]}) == 0
    rows = list(csv.reader(open(tmp_path / "sweep.csv", encoding="utf-8")))
    assert rows[0] == ["g_mhz", "N", "F", "phi_star"]
    assert len(rows) == 3


def test_cqed_full_with_probe(tmp_path):
    cfg = {"g_mhz": [9.0], "N_values": [3], "probe": True, "probe_samples": 11}
    assert _run(tmp_path, "cqed-full", cfg) == 0
    from qwalkrot import cqed

    spec = cqed.lattice_from_preset(cqed.load_preset("table4"), 9.0)
    direct = cqed.simulate_full_sequence(spec, 3, cqed.gate_time_ns(9.0)).F
    assert _result(tmp_path)["results"]["rows"][0]["F"] == pytest.approx(direct, abs=1e-12)
    rows = list(csv.reader(open(tmp_path / "traces.csv", encoding="utf-8")))
    assert rows[0] == ["time_ns", "state_label", "population"]
    assert len(rows) == 1 + 5 * 11
