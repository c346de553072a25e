"""Command-line interface.

Subcommands: ``validate-model``, ``fk``, ``ik``, ``retarget``,
``analyze-freq``, ``denoise-demo``. Exit codes: 0 on success, 1 for
parse/validation failures, 2 when solver non-convergence exceeds the
failure threshold. All emitted files use fixed 17-significant-digit
floats and are written to a temporary file and renamed on success, so a
failing command never leaves partial output behind.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._fmt import f17
from .denoise import DenoiseParams, run_denoising
from .frequency import dataset_heatmap, frequency_profile, hfc_energy_ratio
from .ik import (
    LookAtParams,
    LookAtTarget,
    SolveOptions,
    solve_dual_arm_ik,
    solve_lookat_ik,
)
from .kinematics import forward_kinematics
from .plotting import render_heatmap
from .robot_model import (
    DEFAULT_MODEL_PATH,
    ModelError,
    joint_config,
    load_robot_model,
)
from .spaces import (
    SpaceId,
    SpaceVector,
    Trajectory,
    decode_target,
    read_trajectory,
    retarget_trajectory,
    space_dim,
    trajectory_to_json,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_UNCONVERGED = 2

_DEMO_PREDICTORS = ("zero", "identity")


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


def _parse_floats(text: str, expected: int, what: str) -> np.ndarray:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        values = np.array([float(p) for p in parts])
    except ValueError:
        raise ValueError(f"{what}: expected numbers, got {text!r}") from None
    if values.shape[0] != expected:
        raise ValueError(f"{what}: expected {expected} values, got {values.shape[0]}")
    return values


def _solve_options(args, model) -> SolveOptions:
    seed = None
    if getattr(args, "seed_config", None):
        seed = joint_config(
            model, _parse_floats(args.seed_config, model.dof, "--seed-config")
        )
    return SolveOptions(
        objective_tolerance=args.tolerance,
        max_iterations=args.max_iters,
        finite_difference_step=1e-6,
        seed_config=seed,
    )


def _lookat_params(args) -> LookAtParams:
    offset = _parse_floats(args.target_offset, 3, "--target-offset")
    return LookAtParams(delta=args.delta, target_offset=offset)


def _pose_lines(label: str, pose) -> list[str]:
    p = pose.position
    q = pose.orientation
    return [
        f"{label} position {f17(p[0])} {f17(p[1])} {f17(p[2])}",
        f"{label} quaternion {f17(q.q0)} {f17(q.q1)} {f17(q.q2)} {f17(q.q3)}",
    ]


def _cmd_validate_model(args) -> int:
    model = load_robot_model(args.model)
    print(f"model: {model.name}")
    print(f"dof: {model.dof}")
    print(
        f"manipulation chain ({len(model.manipulation_chain)}): "
        + " -> ".join(model.manipulation_chain)
    )
    print(
        f"viewpoint chain ({len(model.viewpoint_chain)}): "
        + (" -> ".join(model.viewpoint_chain) if model.viewpoint_chain else "(none)")
    )
    print(f"gripper joint: {model.gripper_joint or '(none)'}")
    return EXIT_OK


def _cmd_fk(args) -> int:
    model = load_robot_model(args.model)
    config = joint_config(model, np.array(args.values))
    pose = forward_kinematics(model, config)
    for line in _pose_lines("manipulation", pose.manipulation):
        print(line)
    for line in _pose_lines("viewpoint", pose.viewpoint):
        print(line)
    return EXIT_OK


def _cmd_ik(args) -> int:
    model = load_robot_model(args.model)
    space = SpaceId(args.space)
    vector = SpaceVector(space, _parse_floats(args.target, space_dim(space), "--target"))
    return _run_ik(model, vector, args)


def _run_ik(model, vector, args) -> int:
    target, _gripper = decode_target(vector, model)
    options = _solve_options(args, model)
    if isinstance(target, LookAtTarget):
        result = solve_lookat_ik(model, target, _lookat_params(args), options)
    else:
        result = solve_dual_arm_ik(model, target, options)
    print(f"objective: {f17(result.objective_value)}")
    print(f"iterations: {result.iterations}")
    print(f"converged: {'true' if result.converged else 'false'}")
    print("config: " + " ".join(f17(v) for v in result.config.values))
    return EXIT_OK if result.converged else EXIT_UNCONVERGED


def _cmd_retarget(args) -> int:
    model = load_robot_model(args.model)
    traj = read_trajectory(args.trajectory)
    to = SpaceId(args.to_space)
    options = _solve_options(args, model)
    params = _lookat_params(args)
    out_traj, diagnostics = retarget_trajectory(model, traj, to, params, options)

    out_path = Path(args.out)
    _write_atomic(out_path, trajectory_to_json(out_traj))
    diag_path = Path(args.diagnostics) if args.diagnostics else out_path.with_name(
        out_path.name + ".diag.json"
    )
    diag_rows = [
        {
            "objective": float(r.objective_value),
            "iterations": r.iterations,
            "converged": r.converged,
        }
        for r in diagnostics
    ]
    _write_atomic(diag_path, json.dumps({"frames": diag_rows}, indent=2) + "\n")

    failures = sum(1 for r in diagnostics if not r.converged)
    total = len(diagnostics)
    print(
        f"retargeted {len(out_traj)} frames {traj.space.value} -> {to.value}; "
        f"ik frames: {total}; failures: {failures}"
    )
    print(f"wrote {out_path} and {diag_path}")
    if total and failures / total > args.fail_threshold:
        print(
            f"error: {failures}/{total} frames failed to converge "
            f"(threshold {args.fail_threshold})",
            file=sys.stderr,
        )
        return EXIT_UNCONVERGED
    return EXIT_OK


def _cmd_analyze_freq(args) -> int:
    if not (0.0 < args.cutoff < 1.0):
        raise ValueError("--cutoff must be in (0, 1)")
    datasets: dict[SpaceId, list[Trajectory]] = {}
    for path in args.trajectories:
        traj = read_trajectory(path)
        datasets.setdefault(traj.space, []).append(traj)

    table = dataset_heatmap(datasets)
    out_path = Path(args.out)
    _write_atomic(out_path, table.to_csv())
    written = [str(out_path)]
    if args.figure:
        figure_path = out_path.with_suffix(".png")
        render_heatmap(table, figure_path)
        written.append(str(figure_path))

    for space in SpaceId:
        if space not in datasets:
            continue
        trajectories = datasets[space]
        frames = tuple(f for t in trajectories for f in t.frames)
        combined = Trajectory(space, trajectories[0].dt, frames)
        ratio = hfc_energy_ratio(frequency_profile(combined), args.cutoff)
        print(f"{space.value} hfc_ratio {f17(ratio)}")
    print("wrote " + " and ".join(written))
    return EXIT_OK


def _cmd_denoise_demo(args) -> int:
    params = DenoiseParams(
        alpha=args.alpha,
        gamma=args.gamma,
        sigma=args.sigma,
        steps=args.steps,
        rng_seed=args.seed,
    )
    if args.predictor == "zero":
        predictor = lambda obs, action, step: np.zeros_like(action)  # noqa: E731
    else:
        predictor = lambda obs, action, step: action  # noqa: E731
    sample = run_denoising(np.zeros(1), predictor, params, args.dim)
    print("action: " + " ".join(f17(v) for v in sample.values))
    return EXIT_OK


def _add_solver_flags(parser) -> None:
    parser.add_argument("--delta", type=float, default=999.0,
                        help="camera-axis ray length in meters (default 999)")
    parser.add_argument("--target-offset", default="0,0,0.15",
                        help="visual target offset from the manipulation "
                             "end-effector, meters (default 0,0,0.15)")
    parser.add_argument("--tolerance", type=float, default=1e-8,
                        help="objective tolerance for convergence (default 1e-8)")
    parser.add_argument("--max-iters", type=int, default=200,
                        help="iteration cap per solve (default 200)")
    parser.add_argument("--seed-config", default=None,
                        help="starting joint values, comma separated "
                             "(default: zeros clamped into limits)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualarm",
        description="Dual-arm kinematics, IK, state-space retargeting and "
                    "trajectory frequency analysis.",
        epilog=f"Bundled 17-DOF model: {DEFAULT_MODEL_PATH}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-model", help="load a model document and report its structure")
    p.add_argument("model", help="path to a model JSON document")
    p.set_defaults(func=_cmd_validate_model)

    p = sub.add_parser("fk", help="print both end-effector poses for a configuration")
    p.add_argument("model")
    p.add_argument("values", nargs="+", type=float, help="joint values in model order")
    p.set_defaults(func=_cmd_fk)

    p = sub.add_parser("ik", help="solve a single space-vector target to a configuration")
    p.add_argument("model")
    p.add_argument("--space", required=True,
                   choices=[s.value for s in SpaceId if s is not SpaceId.C])
    p.add_argument("--target", required=True,
                   help="space vector, comma separated (gripper value last)")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_ik)

    p = sub.add_parser("retarget", help="re-express a trajectory in another space")
    p.add_argument("model")
    p.add_argument("trajectory", help="input trajectory JSON document")
    p.add_argument("to_space", choices=[s.value for s in SpaceId])
    p.add_argument("--out", required=True, help="output trajectory path")
    p.add_argument("--diagnostics", default=None,
                   help="diagnostics sidecar path (default: <out>.diag.json)")
    p.add_argument("--fail-threshold", type=float, default=0.05,
                   help="tolerated fraction of non-converged frames (default 0.05)")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_retarget)

    p = sub.add_parser("analyze-freq", help="frequency heatmap of trajectory datasets")
    p.add_argument("trajectories", nargs="+", help="trajectory JSON documents")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--cutoff", type=float, default=0.5,
                   help="high-frequency cutoff fraction in (0, 1) (default 0.5)")
    p.add_argument("--figure", default=True, action=argparse.BooleanOptionalAction,
                   help="also render the heatmap as a PNG next to the CSV")
    p.set_defaults(func=_cmd_analyze_freq)

    p = sub.add_parser("denoise-demo", help="run the denoising recurrence with a fixture predictor")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--predictor", choices=_DEMO_PREDICTORS, default="zero")
    p.set_defaults(func=_cmd_denoise_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
