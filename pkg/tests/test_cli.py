import json

import numpy as np
import pytest

from dualarm import (
    DEFAULT_MODEL_PATH,
    SAMPLE_TRAJECTORY_PATH,
    SpaceId,
    encode_state,
    forward_kinematics,
    joint_config,
    load_default_model,
    read_trajectory,
)
from dualarm.cli import main

MODEL = str(DEFAULT_MODEL_PATH)
SAMPLE = str(SAMPLE_TRAJECTORY_PATH)
ZEROS = ["0"] * 17


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidateModel:
    def test_default_model_ok(self, capsys):
        code, out, _ = run(capsys, ["validate-model", MODEL])
        assert code == 0
        assert "dof: 17" in out

    def test_truncated_file_fails(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"name": "x", "joints": [')
        code, _, err = run(capsys, ["validate-model", str(bad)])
        assert code == 1
        assert "error:" in err

    def test_cycle_named_in_error(self, capsys, tmp_path):
        doc = {
            "name": "cyclic",
            "joints": [
                {"name": "a", "kind": "revolute", "axis": [0, 0, 1],
                 "origin_translation": [0, 0, 0], "origin_rotation": [0, 0, 0],
                 "limit_min": -1, "limit_max": 1, "parent": "b"},
                {"name": "b", "kind": "revolute", "axis": [0, 0, 1],
                 "origin_translation": [0, 0, 0], "origin_rotation": [0, 0, 0],
                 "limit_min": -1, "limit_max": 1, "parent": "a"},
            ],
            "manipulation_chain": ["a"],
            "viewpoint_chain": [],
            "gripper_joint": None,
        }
        bad = tmp_path / "cycle.json"
        bad.write_text(json.dumps(doc))
        code, _, err = run(capsys, ["validate-model", str(bad)])
        assert code == 1
        assert "cycle" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, ["validate-model", str(tmp_path / "none.json")])
        assert code == 1


class TestFk:
    def test_zero_config_matches_library_formatting(self, capsys):
        code, out, _ = run(capsys, ["fk", MODEL] + ZEROS)
        assert code == 0
        model = load_default_model()
        pose = forward_kinematics(model, joint_config(model, np.zeros(17)))
        p = pose.manipulation.position
        line = out.splitlines()[0]
        assert line == (
            "manipulation position "
            + " ".join(format(v, ".17g") for v in p)
        )

    def test_out_of_limit_fails(self, capsys):
        values = ["0"] * 17
        values[0] = "0.9"  # rail limit 0.5
        code, _, err = run(capsys, ["fk", MODEL] + values)
        assert code == 1
        assert "rail_m" in err

    def test_byte_deterministic(self, capsys):
        argv = ["fk", MODEL] + ["0.1"] * 17
        argv[2 + 8] = "0.05"  # keep gripper inside [0, 0.08]
        _, first, _ = run(capsys, argv)
        _, second, _ = run(capsys, argv)
        assert first == second


class TestIk:
    def test_reachable_target_converges(self, capsys):
        model = load_default_model()
        cfg = joint_config(model, np.zeros(17))
        vec = encode_state(model, cfg, SpaceId.E_Q)
        target = ",".join(format(v, ".17g") for v in vec.values)
        code, out, _ = run(
            capsys,
            ["ik", MODEL, "--space", "E_Q", "--target", target,
             "--seed-config", ",".join(["0.01"] * 8 + ["0.0"] + ["0.01"] * 8)],
        )
        assert code == 0
        assert "converged: true" in out

    def test_wrong_width_rejected(self, capsys):
        code, _, err = run(capsys, ["ik", MODEL, "--space", "E_Q", "--target", "1,0,0"])
        assert code == 1
        assert "15" in err


class TestRetarget:
    def test_c_to_c_identity(self, capsys, tmp_path):
        out_path = tmp_path / "out.json"
        code, out, _ = run(
            capsys, ["retarget", MODEL, SAMPLE, "C", "--out", str(out_path)]
        )
        assert code == 0
        original = read_trajectory(SAMPLE)
        produced = read_trajectory(out_path)
        for fa, fb in zip(original.frames, produced.frames):
            np.testing.assert_array_equal(fa.values, fb.values)
        diag = json.loads((tmp_path / "out.json.diag.json").read_text())
        assert diag == {"frames": []}

    def test_c_to_lookat_euler_width(self, capsys, tmp_path):
        out_path = tmp_path / "le.json"
        code, _, _ = run(
            capsys, ["retarget", MODEL, SAMPLE, "L_E", "--out", str(out_path)]
        )
        assert code == 0
        traj = read_trajectory(out_path)
        assert traj.space is SpaceId.L_E
        assert all(f.values.shape == (10,) for f in traj.frames)
        assert len(traj) == 60

    def test_unreachable_trajectory_exits_2_with_sidecar(self, capsys, tmp_path):
        vec = np.zeros(13)
        vec[0] = 1000.0
        doc = {
            "space": "E_E",
            "dt": 0.1,
            "frames": [vec.tolist()] * 3,
        }
        src = tmp_path / "far.json"
        src.write_text(json.dumps(doc))
        out_path = tmp_path / "far_c.json"
        code, _, err = run(
            capsys, ["retarget", MODEL, str(src), "C", "--out", str(out_path)]
        )
        assert code == 2
        assert out_path.exists()
        diag = json.loads((tmp_path / "far_c.json.diag.json").read_text())
        assert len(diag["frames"]) == 3
        assert all(not f["converged"] for f in diag["frames"])

    def test_byte_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, ["retarget", MODEL, SAMPLE, "E_Q", "--out", str(a)])
        run(capsys, ["retarget", MODEL, SAMPLE, "E_Q", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_missing_input_fails(self, capsys, tmp_path):
        code, _, err = run(
            capsys,
            ["retarget", MODEL, str(tmp_path / "none.json"), "C",
             "--out", str(tmp_path / "o.json")],
        )
        assert code == 1
        assert not (tmp_path / "o.json").exists()


class TestAnalyzeFreq:
    def constant_trajectory(self, tmp_path, name="const.json"):
        doc = {"space": "C", "dt": 0.1, "frames": [[1.0] * 17] * 16}
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return path

    def test_constant_is_dc_only(self, capsys, tmp_path):
        src = self.constant_trajectory(tmp_path)
        out = tmp_path / "heat.csv"
        code, stdout, _ = run(
            capsys, ["analyze-freq", str(src), "--out", str(out), "--no-figure"]
        )
        assert code == 0
        assert "C hfc_ratio 0" in stdout
        rows = out.read_text().strip().split("\n")
        values = [float(v) for v in rows[1].split(",")[1:]]
        assert values[0] > 0
        assert all(abs(v) < 1e-9 for v in values[1:])

    def test_seven_spaces_make_seven_rows(self, capsys, tmp_path):
        from dualarm import clamp_to_limits, encode_trajectory, write_trajectory

        model = load_default_model()
        base = read_trajectory(SAMPLE)
        configs = [joint_config(model, f.values) for f in base.frames]
        paths = []
        for space in SpaceId:
            traj = encode_trajectory(model, configs, space, dt=base.dt)
            p = tmp_path / f"{space.value}.json"
            write_trajectory(traj, p)
            paths.append(str(p))
        out = tmp_path / "heat.csv"
        code, stdout, _ = run(capsys, ["analyze-freq", *paths, "--out", str(out)])
        assert code == 0
        rows = out.read_text().strip().split("\n")
        assert len(rows) == 8  # header + 7 spaces
        assert [r.split(",")[0] for r in rows[1:]] == [s.value for s in SpaceId]
        assert (tmp_path / "heat.png").exists()

    def test_missing_file_fails(self, capsys, tmp_path):
        code, _, err = run(
            capsys,
            ["analyze-freq", str(tmp_path / "none.json"), "--out", str(tmp_path / "h.csv")],
        )
        assert code == 1
        assert not (tmp_path / "h.csv").exists()

    def test_csv_and_figure_bytes_deterministic(self, capsys, tmp_path):
        src = self.constant_trajectory(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, ["analyze-freq", str(src), "--out", str(a)])
        run(capsys, ["analyze-freq", str(src), "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()

    def test_bad_cutoff_rejected(self, capsys, tmp_path):
        src = self.constant_trajectory(tmp_path)
        code, _, err = run(
            capsys,
            ["analyze-freq", str(src), "--out", str(tmp_path / "h.csv"), "--cutoff", "1.5"],
        )
        assert code == 1


class TestDenoiseDemo:
    def test_deterministic_output(self, capsys):
        argv = ["denoise-demo", "--dim", "3", "--steps", "5", "--seed", "42"]
        _, first, _ = run(capsys, argv)
        _, second, _ = run(capsys, argv)
        assert first == second
        assert first.startswith("action: ")

    def test_identity_predictor_changes_result(self, capsys):
        base = ["denoise-demo", "--dim", "3", "--steps", "5", "--seed", "42"]
        _, zero_out, _ = run(capsys, base)
        _, ident_out, _ = run(capsys, base + ["--predictor", "identity"])
        assert zero_out != ident_out
