"""Frequency-domain analysis of trajectory datasets.

The core metric is a one-sided spectrum profile: per element, the DFT
magnitude over time; then ``log(1 + magnitude)`` (natural log); then the
mean over all elements at each frequency index. No windowing or
detrending is applied. Heatmap tables stack one profile row per space,
concatenating each space's trajectories along time first.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._fmt import f17
from .spaces import SpaceId, Trajectory

_SPACE_ORDER = list(SpaceId)


@dataclass(frozen=True)
class FrequencyProfile:
    """Mean log-magnitude spectrum of a trajectory.

    ``values[k]`` is the profile at frequency index k for
    k = 0 .. floor(n_frames / 2); every entry is non-negative.
    """

    space: SpaceId
    n_frames: int
    dim: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.n_frames // 2 + 1,):
            raise ValueError(
                f"profile length {values.shape} inconsistent with {self.n_frames} frames"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def _profile_values(matrix: np.ndarray) -> np.ndarray:
    """One-sided mean log1p DFT magnitude of an (N, M) signal matrix."""
    magnitude = np.abs(np.fft.rfft(matrix, axis=0))
    return np.log1p(magnitude).mean(axis=1)


def frequency_profile(traj: Trajectory) -> FrequencyProfile:
    """Profile of a single trajectory; needs at least two frames."""
    matrix = traj.matrix()
    n = matrix.shape[0]
    if n < 2:
        raise ValueError("frequency profile needs at least 2 frames")
    return FrequencyProfile(
        space=traj.space,
        n_frames=n,
        dim=matrix.shape[1],
        values=_profile_values(matrix),
    )


def hfc_energy_ratio(profile: FrequencyProfile, cutoff_fraction: float) -> float:
    """Share of non-DC profile mass at or above ``cutoff_fraction * k_max``.

    Returns 0.0 when the profile has no non-DC mass at all.
    """
    if not (0.0 < cutoff_fraction < 1.0):
        raise ValueError("cutoff_fraction must be in (0, 1)")
    x = profile.values
    k_max = x.shape[0] - 1
    k = np.arange(x.shape[0])
    numerator = float(x[k >= cutoff_fraction * k_max].sum())
    denominator = float(x[1:].sum())
    if denominator == 0.0:
        return 0.0
    return numerator / denominator


@dataclass(frozen=True)
class HeatmapTable:
    """One profile row per space, aligned to a common column count."""

    spaces: tuple[SpaceId, ...]
    values: np.ndarray  # (len(spaces), columns)

    def to_csv(self) -> str:
        header = "space," + ",".join(str(k) for k in range(self.values.shape[1]))
        lines = [header]
        for space, row in zip(self.spaces, self.values):
            lines.append(space.value + "," + ",".join(f17(x) for x in row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())


def _bin_average(row: np.ndarray, columns: int) -> np.ndarray:
    """Downsample by averaging nearly-equal contiguous index bins."""
    n = row.shape[0]
    if n == columns:
        return row.copy()
    edges = [(n * j) // columns for j in range(columns + 1)]
    return np.array([row[a:b].mean() for a, b in zip(edges, edges[1:])])


def dataset_heatmap(datasets) -> HeatmapTable:
    """Build heatmap rows from a mapping of space -> list of trajectories.

    Each space's trajectories are concatenated along time into a single
    signal before profiling. Rows are ordered by space; when spaces
    differ in length, rows are bin-averaged down to the shortest row.
    """
    if not datasets:
        raise ValueError("empty dataset")
    rows: list[tuple[SpaceId, np.ndarray]] = []
    for space in _SPACE_ORDER:
        if space not in datasets:
            continue
        trajectories = list(datasets[space])
        if not trajectories:
            raise ValueError(f"no trajectories for space {space.value}")
        mats = [t.matrix() for t in trajectories]
        width = mats[0].shape[1]
        for m in mats:
            if m.shape[1] != width:
                raise ValueError(
                    f"space {space.value}: trajectories disagree on dimensionality"
                )
        matrix = np.concatenate(mats, axis=0)
        if matrix.shape[0] < 2:
            raise ValueError(f"space {space.value}: needs at least 2 frames")
        rows.append((space, _profile_values(matrix)))
    if not rows:
        raise ValueError("empty dataset")
    columns = min(r.shape[0] for _, r in rows)
    values = np.stack([_bin_average(r, columns) for _, r in rows])
    return HeatmapTable(spaces=tuple(s for s, _ in rows), values=values)
