"""
scatter.svg rendering of the first two embedding dimensions
"""
import logging
from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .models import AlignmentResult  # noqa: E402

logger = logging.getLogger(__name__)

# fixed ids and no timestamp, so reruns produce identical files
SVG_HASH_SALT = "manifold-bridge"
MARKERS = ("o", "^")


def _first_two(coords: np.ndarray) -> np.ndarray:
    out = np.zeros((len(coords), 2))
    width = min(2, coords.shape[1])
    out[:, :width] = coords[:, :width]
    return out


def plot_alignment(
    result: AlignmentResult,
    path: Union[str, Path],
    labels_x: Optional[np.ndarray] = None,
    labels_y: Optional[np.ndarray] = None,
    title: Optional[str] = None,
) -> Path:
    """
    Scatter both domains (circles for X, triangles for Y), color by label when
    known, outline anchors and join each anchor pair with a line

    Args:
        result: Alignment to draw
        path: Destination .svg
        labels_x, labels_y: Optional label ids for coloring
        title: Plot title (defaults to the method name)

    Returns:
        The written path
    """
    path = Path(path)
    x = _first_two(result.x_coords)
    y = _first_two(result.y_coords)

    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 5))
        try:
            for points, labels, marker, name in ((x, labels_x, MARKERS[0], "X"), (y, labels_y, MARKERS[1], "Y")):
                colors = None if labels is None else np.asarray(labels)
                ax.scatter(
                    points[:, 0],
                    points[:, 1],
                    c=colors,
                    cmap="tab10" if colors is not None else None,
                    vmin=0 if colors is not None else None,
                    vmax=9 if colors is not None else None,
                    marker=marker,
                    s=18,
                    alpha=0.75,
                    label=f"domain {name}",
                )

            anchors = result.anchors
            if len(anchors):
                ax.scatter(x[anchors[:, 0], 0], x[anchors[:, 0], 1], facecolors="none", edgecolors="black",
                           marker=MARKERS[0], s=48, linewidths=0.8)
                ax.scatter(y[anchors[:, 1], 0], y[anchors[:, 1], 1], facecolors="none", edgecolors="black",
                           marker=MARKERS[1], s=48, linewidths=0.8)
                for i, j in anchors:
                    ax.plot([x[i, 0], y[j, 0]], [x[i, 1], y[j, 1]], color="gray", linewidth=0.5, alpha=0.6)

            ax.set_xlabel("c0")
            ax.set_ylabel("c1")
            ax.set_title(title or result.method)
            ax.legend(loc="best", fontsize="small")
            fig.tight_layout()
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)

    logger.debug(f"Wrote scatter plot to {path}")
    return path
