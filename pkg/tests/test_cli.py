import json

import pytest

from swarmcover.cli import main


@pytest.fixture
def electro_scenario(tmp_path):
    doc = {
        "region": {"min": [0, 0], "max": [1, 1]},
        "agents": {"mode": "point", "count": 20},
        "sensing_range": 0.25,
        "law": {"kind": "electrostatic"},
        "targets": [{"position": [0.3, 0.3], "demand": 4},
                    {"position": [0.7, 0.75], "demand": 3}],
        "targets_disappear": True,
        "seed": 13,
    }
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    return path


class TestValidate:
    def test_valid_scenario_exits_zero(self, electro_scenario, capsys):
        assert main(["validate", "--scenario", str(electro_scenario)]) == 0
        assert "ok" in capsys.readouterr().out

    def test_malformed_scenario_names_the_key(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "region": {"min": [0, 0], "max": [1, 1]},
            "agents": {"mode": "point", "count": 3},
            "sensing_range": 0.2,
            "law": {"kind": "electrostatic"},
            "sped": 3,
        }))
        assert main(["validate", "--scenario", str(bad)]) == 1
        assert "'sped'" in capsys.readouterr().err

    def test_constraint_violation_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "region": {"min": [0, 0], "max": [1, 1]},
            "agents": {"mode": "point", "count": 3},
            "sensing_range": 0.2,
            "delta": 0.1, "Delta": 0.05,
            "law": {"kind": "electrostatic"},
        }))
        assert main(["validate", "--scenario", str(bad)]) == 1
        assert "delta <= Delta" in capsys.readouterr().err


class TestRun:
    def test_zero_steps_emits_initial_metrics_only(self, electro_scenario, tmp_path):
        out = tmp_path / "out"
        code = main(["run", "--scenario", str(electro_scenario),
                     "--steps", "0", "--out", str(out)])
        assert code == 0
        lines = (out / "metrics.csv").read_text().strip().splitlines()
        assert lines[0] == "step,G"
        assert len(lines) == 2
        assert lines[1].startswith("0,")
        summary = json.loads((out / "summary.json").read_text())
        assert summary["final_step"] == 0

    def test_outputs_are_byte_identical_across_reruns(self, electro_scenario,
                                                      tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            code = main(["run", "--scenario", str(electro_scenario),
                         "--steps", "400", "--seed", "5", "--out", str(out),
                         "--metrics-every", "50"])
            assert code == 0
        for name in ("trajectory.csv", "metrics.csv", "events.csv",
                     "summary.json", "scenario.resolved.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_resolved_scenario_reproduces_the_run(self, electro_scenario,
                                                  tmp_path):
        out1 = tmp_path / "a"
        main(["run", "--scenario", str(electro_scenario), "--steps", "200",
              "--seed", "5", "--out", str(out1)])
        out2 = tmp_path / "b"
        main(["run", "--scenario", str(out1 / "scenario.resolved.json"),
              "--steps", "200", "--out", str(out2)])
        assert (out1 / "trajectory.csv").read_bytes() == \
            (out2 / "trajectory.csv").read_bytes()

    def test_frames_are_ppm(self, electro_scenario, tmp_path):
        out = tmp_path / "out"
        main(["run", "--scenario", str(electro_scenario), "--steps", "20",
              "--out", str(out), "--frames-every", "10",
              "--frame-size", "96x96"])
        frames = sorted((out / "frames").glob("*.ppm"))
        assert len(frames) == 3
        assert frames[0].read_bytes().startswith(b"P6\n96 96\n255\n")

    def test_missing_scenario_file_is_a_runtime_error(self, tmp_path):
        assert main(["run", "--scenario", str(tmp_path / "nope.json"),
                     "--steps", "1", "--out", str(tmp_path / "o")]) == 2


class TestDeriveKernel:
    def test_writes_a_loadable_cache(self, tmp_path, capsys):
        from swarmcover import KernelTable, gaussian_kernel_closed_form
        path = tmp_path / "kernel.csv"
        code = main(["derive-kernel", "--lambda", "1.0", "--truncation", "6.0",
                     "--grid-step", "0.05", "--quad-resolution", "128",
                     "--out", str(path)])
        assert code == 0
        table = KernelTable.load(path)
        ref = float(gaussian_kernel_closed_form(1.0, 1.0))
        assert abs(float(table(1.0)) - ref) / ref < 1e-3

    def test_uncut_without_truncation_is_a_config_error(self, tmp_path):
        assert main(["derive-kernel", "--lambda", "1.0",
                     "--out", str(tmp_path / "k.csv")]) == 1


class TestValidateNumerics:
    def test_self_checks_pass(self, capsys):
        assert main(["validate-numerics"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out
