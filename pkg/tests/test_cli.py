import json

import pytest

from szego.cli import main
from szego.manifest import ConfigError, ExperimentManifest, apply_overrides, build_dataclass, load_config
from szego.verify import VerifyConfig

SMALL_SIM = ["--override", "simulation.L=64.0", "--override", "simulation.N=512",
             "--override", "simulation.dt=0.01", "--override", "simulation.T=0.5",
             "--override", "simulation.stride=25"]
QUICK_VERIFY = ["--override", "symbols=[]", "--override", "fields=[]", "--override", "circles=[]",
                "--override", "gn_random=0", "--override", "size=1024",
                "--override", 'solitons=[{"C": [1, 0], "p": [0, -1]}]']


def run(tmp_path, name, *args):
    out = tmp_path / name
    return main([name, "--out", str(out), *args]), out


def test_simulate_writes_stamped_outputs(tmp_path):
    code, out = run(tmp_path, "simulate", *SMALL_SIM, "--override", "simulation.reference=true")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "ok" and summary["drift_Q"] < 1e-10
    header = (out / "conservation.csv").read_text().splitlines()[0]
    assert header.startswith(f"# manifest={summary['manifest_hash']}")
    assert len(list((out / "fields").iterdir())) == 3


def test_simulate_is_deterministic(tmp_path):
    _, a = run(tmp_path, "simulate", *SMALL_SIM)
    main(["simulate", "--out", str(tmp_path / "b"), *SMALL_SIM])
    b = tmp_path / "b"
    for name in ("summary.json", "conservation.csv", "snapshots.csv", "drift_Q.dat"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_output_directory_does_not_change_the_manifest():
    a = ExperimentManifest("verify", {"L": 1.0}, 0, None, "x")
    b = ExperimentManifest("verify", {"L": 1.0}, 0, None, "y")
    assert a.hash == b.hash != ExperimentManifest("verify", {"L": 1.0}, 1).hash


def test_unknown_key_is_a_usage_error(tmp_path, capsys):
    code, _ = run(tmp_path, "simulate", "--override", "simulation.colour=1")
    assert code == 2 and "simulation.colour" in capsys.readouterr().err


def test_guard_is_a_numerical_failure(tmp_path, capsys):
    code, out = run(tmp_path, "simulate", "--override", "simulation.dt=1.0", "--override", "simulation.T=2.0")
    assert code == 3 and "blow-up guard" in capsys.readouterr().err
    assert json.loads((out / "summary.json").read_text())["status"] == "numerical failure"


def test_bad_schema_version(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schema_version": 9}))
    assert run(tmp_path, "spectrum", "--config", str(cfg))[0] == 2


def test_missing_config_file(tmp_path):
    assert run(tmp_path, "spectrum", "--config", str(tmp_path / "none.json"))[0] == 2


def test_bad_arguments():
    assert main(["frobnicate"]) == 2
    assert main(["verify", "--workers", "0"]) == 2


def test_verify_passes_on_one_soliton(tmp_path):
    code, out = run(tmp_path, "verify", *QUICK_VERIFY, "--override", "cutoff=20")
    report = json.loads((out / "verify.json").read_text())
    assert code == 0 and report["status"] == "pass"


def test_verify_flags_a_wrong_phase_rate(tmp_path):
    bad = 'solitons=[{"C": [1, 0], "p": [0, -1], "omega": 0.5}]'
    code, out = run(tmp_path, "verify", *QUICK_VERIFY, "--override", bad, "--override", "cutoff=20")
    assert code == 1
    failed = {c["name"].split("[")[0] for c in json.loads((out / "verify.json").read_text())["checks"]
              if not c["passed"]}
    assert failed == {"traveling_wave_residual", "traveling_wave_identity"}


def test_verify_with_nothing_to_check(tmp_path, capsys):
    code, _ = run(tmp_path, "verify", *QUICK_VERIFY, "--override", "solitons=[]")
    assert code == 1 and "no checks run" in capsys.readouterr().err


def test_spectrum_outputs(tmp_path):
    code, out = run(tmp_path, "spectrum", "--override", "size=256")
    data = json.loads((out / "spectrum.json").read_text())
    assert code == 0 and data["negative_count"] == 1
    assert data["lowest_eigenvalue"] == pytest.approx(-0.5, abs=0.02)


def test_minimize_command(tmp_path):
    code, out = run(tmp_path, "minimize", "--override", "n_init=1", "--override", "L=256.0",
                    "--override", "N=2048", "--override", "max_iter=20", "--override", "distance_tol=10")
    summary = json.loads((out / "minimize_summary.json").read_text())
    assert summary["runs"][0]["iterations"] == 20
    assert code == (0 if summary["all_within_tolerance"] else 1)


def test_stability_command_in_parallel(tmp_path):
    code, out = run(tmp_path, "stability", "--workers", "2", "--override", "deltas=[0.0, 0.01]",
                    "--override", "T=0.5", "--override", "L=64.0", "--override", "N=512",
                    "--override", "dt=0.01", "--override", "snapshot_every=0.25")
    assert code == 0
    assert sorted(p.name for p in out.iterdir() if p.suffix == ".dat")


class TestConfigHelpers:
    def test_overrides_parse_json_and_create_parents(self):
        cfg = apply_overrides({}, ["a.b=3", "c=[1, 2]", "d=text"])
        assert cfg == {"a": {"b": 3}, "c": [1, 2], "d": "text"}

    def test_override_needs_equals(self):
        with pytest.raises(ConfigError):
            load_config(None, ["nonsense"])

    def test_dataclass_rejects_unknown_keys(self):
        with pytest.raises(ConfigError, match="'x.bogus'"):
            build_dataclass(VerifyConfig, {"bogus": 1}, "x.")
