"""Dual-arm kinematics toolkit.

Provides rotation conversions, a loadable dual-chain robot model with a
bundled 17-DOF default, forward kinematics, dual-arm and look-at inverse
kinematics, seven state-action space encodings with trajectory
retargeting, frequency-domain analysis of trajectory datasets, and a
deterministic denoising recurrence runtime.
"""

from .denoise import ActionSample, DenoiseParams, NoisePredictor, denoise_step, run_denoising
from .frequency import (
    FrequencyProfile,
    HeatmapTable,
    dataset_heatmap,
    frequency_profile,
    hfc_energy_ratio,
)
from .ik import (
    DualArmTarget,
    IKResult,
    LookAtParams,
    LookAtTarget,
    SolveOptions,
    clamped_projection,
    dual_arm_objective,
    line_segment_projection,
    lookat_objective,
    single_arm_objective,
    solve_dual_arm_ik,
    solve_lookat_ik,
    solve_trajectory,
    viewpoint_orientation_loss,
    viewpoint_stability_loss,
)
from .kinematics import DualArmPose, Pose, ViewFrame, forward_kinematics, view_frame
from .robot_model import (
    DEFAULT_MODEL_PATH,
    JointConfig,
    JointSpec,
    ModelError,
    ModelParseError,
    ModelValidationError,
    RobotModel,
    clamp_to_limits,
    joint_config,
    load_default_model,
    load_robot_model,
    parse_robot_model,
)
from .rotations import (
    AxisAngle,
    EulerAngles,
    UnitQuaternion,
    axisangle_to_quat,
    euler_to_quat,
    geodesic_angle,
    matrix_to_quat,
    quat_displacement_distance,
    quat_log,
    quat_to_axisangle,
    quat_to_euler,
    quat_to_matrix,
)
from .spaces import (
    SAMPLE_TRAJECTORY_PATH,
    SpaceId,
    SpaceVector,
    Trajectory,
    decode_target,
    encode_state,
    encode_trajectory,
    read_trajectory,
    retarget_trajectory,
    space_dim,
    trajectory_from_json,
    trajectory_to_json,
    write_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "ActionSample",
    "AxisAngle",
    "DEFAULT_MODEL_PATH",
    "DenoiseParams",
    "DualArmPose",
    "DualArmTarget",
    "EulerAngles",
    "FrequencyProfile",
    "HeatmapTable",
    "IKResult",
    "JointConfig",
    "JointSpec",
    "LookAtParams",
    "LookAtTarget",
    "ModelError",
    "ModelParseError",
    "ModelValidationError",
    "NoisePredictor",
    "Pose",
    "RobotModel",
    "SAMPLE_TRAJECTORY_PATH",
    "SolveOptions",
    "SpaceId",
    "SpaceVector",
    "Trajectory",
    "UnitQuaternion",
    "ViewFrame",
    "axisangle_to_quat",
    "clamp_to_limits",
    "clamped_projection",
    "dataset_heatmap",
    "decode_target",
    "denoise_step",
    "dual_arm_objective",
    "encode_state",
    "encode_trajectory",
    "euler_to_quat",
    "forward_kinematics",
    "frequency_profile",
    "geodesic_angle",
    "hfc_energy_ratio",
    "joint_config",
    "line_segment_projection",
    "load_default_model",
    "load_robot_model",
    "lookat_objective",
    "matrix_to_quat",
    "parse_robot_model",
    "quat_displacement_distance",
    "quat_log",
    "quat_to_axisangle",
    "quat_to_euler",
    "quat_to_matrix",
    "read_trajectory",
    "retarget_trajectory",
    "run_denoising",
    "single_arm_objective",
    "solve_dual_arm_ik",
    "solve_lookat_ik",
    "solve_trajectory",
    "space_dim",
    "trajectory_from_json",
    "trajectory_to_json",
    "view_frame",
    "viewpoint_orientation_loss",
    "viewpoint_stability_loss",
    "write_trajectory",
]
