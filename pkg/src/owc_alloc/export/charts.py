"""SVG bar charts of per-user bandwidth and SINR, grouped by receiver system."""

from pathlib import Path
from typing import Dict, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import structlog  # noqa: E402

logger = structlog.get_logger(__name__)

# fixed ids and no timestamp so reruns write identical files
plt.rcParams["svg.hashsalt"] = "owc-alloc"


def grouped_bar_chart(
    path: Path,
    groups: Dict[str, Sequence[float]],
    *,
    title: str,
    ylabel: str,
    threshold: Optional[float] = None,
    threshold_label: str = "",
) -> Path:
    """One bar group per user, one bar per series in ``groups``."""
    names = list(groups)
    n_users = max((len(values) for values in groups.values()), default=0)
    x = np.arange(n_users)
    width = 0.8 / max(len(names), 1)

    fig, ax = plt.subplots(figsize=(8, 4))
    for i, name in enumerate(names):
        values = np.asarray(groups[name], dtype=float)
        ax.bar(x[: values.size] + (i - (len(names) - 1) / 2) * width, values, width, label=name)
    if threshold is not None:
        ax.axhline(threshold, color="black", linestyle="--", linewidth=1, label=threshold_label)
    ax.set_xticks(x)
    ax.set_xticklabels([f"User {u + 1}" for u in range(n_users)])
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    ax.grid(axis="y", linestyle=":", linewidth=0.5)
    fig.tight_layout()

    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug("chart_written", path=str(path), series=len(names))
    return path
