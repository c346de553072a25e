import math

import numpy as np
import pytest

from dualarm import (
    DualArmTarget,
    JointConfig,
    LookAtTarget,
    SolveOptions,
    SpaceId,
    SpaceVector,
    Trajectory,
    clamp_to_limits,
    decode_target,
    encode_state,
    encode_trajectory,
    forward_kinematics,
    geodesic_angle,
    joint_config,
    read_trajectory,
    retarget_trajectory,
    space_dim,
    trajectory_from_json,
    trajectory_to_json,
    write_trajectory,
)

from oracles import fk_homogeneous, matrix_to_axis_angle, matrix_to_quat_shepperd

DIMS = {"C": 17, "E_E": 13, "E_Q": 15, "E_AA": 15, "L_E": 10, "L_Q": 11, "L_AA": 11}


def smooth_configs(model, n, amplitude=0.25, seed=3000):
    """Deterministic smooth in-limit joint trajectory."""
    rng = np.random.default_rng(seed)
    lo, hi = model.limits_lower, model.limits_upper
    center = (lo + hi) / 2.0
    span = hi - lo
    phases = rng.uniform(0.0, 2.0 * np.pi, model.dof)
    rates = rng.uniform(0.5, 1.5, model.dof)
    out = []
    for i in range(n):
        t = i / n
        vals = center + amplitude * span * 0.5 * np.sin(2.0 * np.pi * rates * t + phases)
        out.append(clamp_to_limits(model, vals))
    return out


def test_dimension_table():
    for name, dim in DIMS.items():
        assert space_dim(SpaceId(name)) == dim


class TestEncode:
    def test_c_space_is_identity(self, model, random_config):
        rng = np.random.default_rng(300)
        cfg = random_config(rng)
        vec = encode_state(model, cfg, SpaceId.C)
        np.testing.assert_array_equal(vec.values, cfg.values)

    def test_zero_config_quaternion_layout(self, model):
        vec = encode_state(model, joint_config(model, np.zeros(17)), SpaceId.E_Q)
        np.testing.assert_allclose(vec.values[0:3], [0.0, -0.35, 1.05], atol=1e-15)
        np.testing.assert_array_equal(vec.values[3:7], [1.0, 0.0, 0.0, 0.0])
        np.testing.assert_allclose(vec.values[7:10], [0.0, 0.35, 1.05], atol=1e-15)
        np.testing.assert_array_equal(vec.values[10:14], [1.0, 0.0, 0.0, 0.0])
        assert vec.values[14] == 0.0

    def test_gripper_value_is_last(self, model):
        values = np.zeros(17)
        values[model.joint_index("gripper")] = 0.05
        for space in (SpaceId.E_E, SpaceId.E_Q, SpaceId.E_AA, SpaceId.L_E, SpaceId.L_Q, SpaceId.L_AA):
            vec = encode_state(model, joint_config(model, values), space)
            assert vec.values[-1] == 0.05

    def test_lookat_axisangle_matches_oracle(self, model, model_doc, random_config):
        rng = np.random.default_rng(301)
        for _ in range(25):
            cfg = random_config(rng)
            vec = encode_state(model, cfg, SpaceId.L_AA)
            by_name = {j.name: cfg.values[model.joint_index(j.name)] for j in model.joints}
            p_m, rot_m = fk_homogeneous(model_doc, list(model.manipulation_chain), by_name)
            p_v, _ = fk_homogeneous(model_doc, list(model.viewpoint_chain), by_name)
            axis, angle = matrix_to_axis_angle(rot_m)
            np.testing.assert_allclose(vec.values[0:3], p_m, atol=1e-12)
            np.testing.assert_allclose(vec.values[3:6], axis, atol=1e-12)
            assert vec.values[6] == pytest.approx(angle, abs=1e-12)
            np.testing.assert_allclose(vec.values[7:10], p_v, atol=1e-12)
            assert vec.values[10] == cfg.values[model.joint_index("gripper")]

    def test_lookat_is_subvector_of_end_effector(self, model, random_config):
        rng = np.random.default_rng(302)
        cfg = random_config(rng)
        pairs = [(SpaceId.E_E, SpaceId.L_E, 3), (SpaceId.E_Q, SpaceId.L_Q, 4), (SpaceId.E_AA, SpaceId.L_AA, 4)]
        for e_space, l_space, width in pairs:
            e = encode_state(model, cfg, e_space).values
            l = encode_state(model, cfg, l_space).values
            shared = 3 + width + 3
            np.testing.assert_array_equal(l[:shared], e[:shared])
            assert l[-1] == e[-1]


class TestDecode:
    def test_round_trip_end_effector(self, model, random_config):
        rng = np.random.default_rng(303)
        for space in (SpaceId.E_E, SpaceId.E_Q, SpaceId.E_AA):
            cfg = random_config(rng)
            pose = forward_kinematics(model, cfg)
            target, gripper = decode_target(encode_state(model, cfg, space))
            assert isinstance(target, DualArmTarget)
            np.testing.assert_allclose(
                target.manipulation_position, pose.manipulation.position, atol=1e-9
            )
            assert geodesic_angle(
                target.manipulation_orientation, pose.manipulation.orientation
            ) < 1e-9
            np.testing.assert_allclose(
                target.viewpoint_position, pose.viewpoint.position, atol=1e-9
            )
            assert geodesic_angle(
                target.viewpoint_orientation, pose.viewpoint.orientation
            ) < 1e-9
            assert gripper == cfg.values[model.joint_index("gripper")]

    def test_lookat_target_has_no_viewpoint_rotation(self, model, random_config):
        rng = np.random.default_rng(304)
        cfg = random_config(rng)
        target, _ = decode_target(encode_state(model, cfg, SpaceId.L_Q))
        assert isinstance(target, LookAtTarget)
        assert not hasattr(target, "viewpoint_orientation")

    def test_c_space_needs_model(self, model, random_config):
        rng = np.random.default_rng(305)
        cfg = random_config(rng)
        vec = encode_state(model, cfg, SpaceId.C)
        with pytest.raises(ValueError):
            decode_target(vec)
        config, gripper = decode_target(vec, model)
        assert isinstance(config, JointConfig)
        np.testing.assert_array_equal(config.values, cfg.values)
        assert gripper == cfg.values[model.joint_index("gripper")]

    def test_short_axis_rejected(self):
        values = np.zeros(15)
        values[3:7] = [0.9, 0.0, 0.0, 1.0]  # axis norm 0.9
        values[10:14] = [0.0, 0.0, 1.0, 0.0]
        with pytest.raises(ValueError):
            SpaceVector(SpaceId.E_AA, values)


class TestContinuity:
    def test_sign_flip_removed_by_default(self, model):
        # Two configurations whose end-effector rotations are identical
        # but whose raw quaternion products are antipodal (total spin 0
        # versus 2*pi about z).
        a = np.zeros(17)
        b = np.zeros(17)
        b[model.joint_index("m_shoulder_pan")] = math.pi
        b[model.joint_index("m_upperarm_roll")] = math.pi
        configs = [joint_config(model, a), joint_config(model, b)]
        cont = encode_trajectory(model, configs, SpaceId.E_Q, dt=0.1)
        raw = encode_trajectory(model, configs, SpaceId.E_Q, dt=0.1, quat_continuity=False)
        assert raw.frames[1].values[3] < 0.0  # antipodal without the fix
        assert cont.frames[1].values[3] > 0.0
        assert float(cont.frames[0].values[3:7] @ cont.frames[1].values[3:7]) >= 0.0


class TestRetarget:
    def test_c_to_c_identity(self, model):
        configs = smooth_configs(model, 10)
        traj = encode_trajectory(model, configs, SpaceId.C, dt=0.05)
        out, diags = retarget_trajectory(model, traj, SpaceId.C)
        assert diags == []
        assert out.dt == traj.dt
        assert len(out) == len(traj)
        for fa, fb in zip(traj.frames, out.frames):
            np.testing.assert_array_equal(fa.values, fb.values)

    def test_c_to_lookat_euler_width(self, model):
        configs = smooth_configs(model, 10)
        traj = encode_trajectory(model, configs, SpaceId.C, dt=0.05)
        out, diags = retarget_trajectory(model, traj, SpaceId.L_E)
        assert diags == []
        assert all(f.values.shape == (10,) for f in out.frames)
        assert len(out) == 10 and out.dt == 0.05

    def test_round_trip_through_end_effector_space(self, model):
        configs = smooth_configs(model, 30)
        traj_c = encode_trajectory(model, configs, SpaceId.C, dt=0.1)
        traj_e, _ = retarget_trajectory(model, traj_c, SpaceId.E_E)
        options = SolveOptions(seed_config=configs[0])
        back, diags = retarget_trajectory(model, traj_e, SpaceId.C, options=options)
        assert len(back) == 30 and back.dt == 0.1
        assert all(d.objective_value < 1e-6 for d in diags)
        for cfg, frame in zip(configs, back.frames):
            want = forward_kinematics(model, cfg)
            got = forward_kinematics(model, joint_config(model, frame.values))
            for a, b in (
                (want.manipulation, got.manipulation),
                (want.viewpoint, got.viewpoint),
            ):
                assert np.linalg.norm(a.position - b.position) < 1e-3
                assert geodesic_angle(a.orientation, b.orientation) < math.radians(0.5)

    def test_gripper_survives_round_trip(self, model):
        values = np.zeros(17)
        values[model.joint_index("gripper")] = 0.07
        traj = encode_trajectory(
            model, [joint_config(model, values)] * 3, SpaceId.E_Q, dt=0.1
        )
        back, _ = retarget_trajectory(model, traj, SpaceId.C)
        g = model.joint_index("gripper")
        assert all(f.values[g] == 0.07 for f in back.frames)

    def test_unreachable_frames_reported(self, model):
        vec = np.zeros(13)
        vec[0:3] = [1000.0, 0.0, 0.0]  # a kilometer outside the workspace
        vec[7] = 1.0  # keep the viewpoint reachable-ish
        frames = tuple(SpaceVector(SpaceId.E_E, vec) for _ in range(3))
        traj = Trajectory(SpaceId.E_E, 0.1, frames)
        out, diags = retarget_trajectory(model, traj, SpaceId.C)
        assert len(out) == 3
        assert all(not d.converged for d in diags)


class TestTrajectoryIO:
    def test_round_trip_exact(self, model, tmp_path):
        configs = smooth_configs(model, 8)
        traj = encode_trajectory(model, configs, SpaceId.E_Q, dt=0.02)
        path = tmp_path / "traj.json"
        write_trajectory(traj, path)
        loaded = read_trajectory(path)
        assert loaded.space is traj.space
        assert loaded.dt == traj.dt
        for fa, fb in zip(traj.frames, loaded.frames):
            np.testing.assert_array_equal(fa.values, fb.values)

    def test_byte_deterministic(self, model):
        configs = smooth_configs(model, 5)
        traj = encode_trajectory(model, configs, SpaceId.L_AA, dt=0.125)
        text = trajectory_to_json(traj)
        assert text == trajectory_to_json(traj)
        reparsed = trajectory_from_json(text)
        assert trajectory_to_json(reparsed) == text

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ('{"space": "E_E", "dt": 0.1}', "frames"),
            ('{"space": "NOPE", "dt": 0.1, "frames": [[0]]}', "unknown space"),
            ('{"space": "C", "dt": -1, "frames": [[0]]}', "dt"),
            ('{"space": "C", "dt": 0.1, "frames": []}', "non-empty"),
            ("{", "1:2"),
        ],
    )
    def test_malformed_documents(self, text, fragment):
        with pytest.raises(ValueError) as err:
            traj = trajectory_from_json(text)
            Trajectory(traj.space, traj.dt, traj.frames)
        assert fragment in str(err.value)

    def test_homogeneous_space_enforced(self):
        a = SpaceVector(SpaceId.L_E, np.zeros(10))
        b = SpaceVector(SpaceId.L_Q, np.array([0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0.0]))
        with pytest.raises(ValueError):
            Trajectory(SpaceId.L_E, 0.1, (a, b))
