"""CSV point clouds and PNG figures for the report command.

matplotlib is imported lazily with the Agg backend so the library itself
does not depend on a display.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import numpy as np

from .norms import LayeredSupNorm

COLORS = {"ceiling": "tab:red", "floor": "tab:blue", "wall": "tab:gray",
          "ceiling-seam": "tab:orange", "floor-seam": "tab:cyan"}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def sphere_labels(norm: LayeredSupNorm, X: np.ndarray, seam_band: float = 0.02) -> list[str]:
    """Region label per sphere sample for a two-layer norm; points whose two
    layer radii differ by less than ``seam_band`` count as seam points."""
    if norm.step != 2:
        raise ValueError("region labels are defined for two-layer norms")
    r1 = float(norm.lambdas[0]) * norm.layers[0].batch(X[:, norm._index[0]])
    r2 = np.sqrt(float(norm.lambdas[1]) * norm.layers[1].batch(X[:, norm._index[1]]))
    top = X[:, norm._index[1][0]]
    labels = []
    for a, b, z in zip(r1, r2, top):
        vertical = "ceiling" if z > 0 else "floor"
        if abs(a - b) < seam_band:
            labels.append(vertical + "-seam")
        else:
            labels.append(vertical if b > a else "wall")
    return labels


def write_sphere_csv(path: Path, X: np.ndarray, labels: Sequence[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i + 1}" for i in range(X.shape[1])] + ["region"])
        for row, lab in zip(X, labels):
            w.writerow([f"{c:.12g}" for c in row] + [lab])


def plot_sphere(path: Path, X: np.ndarray, labels: Sequence[str], title: str = "") -> None:
    """3-D scatter of H_3 sphere samples coloured by region."""
    plt = _pyplot()
    fig = plt.figure(figsize=(5, 5))
    ax = fig.add_subplot(projection="3d")
    labels = np.asarray(labels)
    for lab, color in COLORS.items():
        mask = labels == lab
        if mask.any():
            ax.scatter(X[mask, 0], X[mask, 1], X[mask, 2], s=2, c=color, label=lab)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper left", fontsize=7, markerscale=4)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_table_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def plot_dimensions(path: Path, ns: Sequence[int], dims: Sequence[int]) -> None:
    """Boundary dimension against n with the full-dimensional line n - 1."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ns = list(ns)
    ax.plot(ns, [n - 1 for n in ns], "--", color="0.6", label="n - 1")
    ax.plot(ns, dims, "o-", color="k", label="boundary dimension")
    ax.set_xlabel("n")
    ax.set_ylabel("dimension")
    ax.set_xticks(ns)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
