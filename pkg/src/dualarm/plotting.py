"""Figure rendering for frequency heatmap tables."""

from __future__ import annotations

import io
from pathlib import Path

from .frequency import HeatmapTable


def render_heatmap(table: HeatmapTable, path, dpi: int = 150) -> None:
    """Render a heatmap table to an image file next to its CSV.

    Uses a plain Figure (no pyplot state), so rendering is deterministic
    and safe to call from library code. The file is written atomically.
    """
    # Imported here so commands that never plot do not pay for matplotlib.
    from matplotlib.figure import Figure

    n_spaces, n_cols = table.values.shape
    fig = Figure(figsize=(8.0, 0.6 * n_spaces + 1.6))
    ax = fig.add_subplot()
    image = ax.imshow(
        table.values,
        aspect="auto",
        origin="upper",
        interpolation="nearest",
        cmap="viridis",
    )
    ax.set_yticks(range(n_spaces), [s.value for s in table.spaces])
    ax.set_xlabel("frequency index")
    ax.set_ylabel("space")
    fig.colorbar(image, ax=ax, label="mean log(1 + |DFT|)")
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=dpi, metadata={"Software": None})
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_bytes(buf.getvalue())
    tmp.replace(target)
