"""
2-D cluster maps of method embeddings
=====================================

Project high-dimensional embeddings onto their top two principal directions
(power iteration with deflation, deterministic) and write the coordinates,
with one star-marker centroid row per method, to a CSV ready for plotting.
"""

from pathlib import Path

import numpy as np

from advkit import ClusterSpec, generate, project_2d
from advkit.simulate import save_projection_csv

spec = ClusterSpec(
    n_methods=6,
    samples_per_method=120,
    dim=24,
    separation=2.5,
    intra_std=0.3,
    seed=4,
    bonafide_separation=4.0,
)
records, embeddings = generate(spec)
points = project_2d(embeddings, records)

out_dir = Path(__file__).resolve().parent / "output"
out_dir.mkdir(exist_ok=True)
csv_path = out_dir / "projection.csv"
save_projection_csv(points, csv_path)
print(f"wrote {len(points)} points (+ centroid rows) to {csv_path}")

# quick textual look at the layout: per-label spread vs. global spread
coords = {}
for p in points:
    coords.setdefault(p.label, []).append((p.x, p.y))
print(f"\n{'label':<10} {'center x':>9} {'center y':>9} {'radius':>8}")
for label in sorted(coords):
    xy = np.array(coords[label])
    center = xy.mean(axis=0)
    radius = float(np.linalg.norm(xy - center, axis=1).mean())
    print(f"{label:<10} {center[0]:>9.3f} {center[1]:>9.3f} {radius:>8.3f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 6))
    for label in sorted(coords):
        xy = np.array(coords[label])
        ax.scatter(xy[:, 0], xy[:, 1], s=8, alpha=0.6, label=label)
        ax.scatter(*xy.mean(axis=0), marker="*", s=220, edgecolor="black", zorder=3)
    ax.legend(fontsize=8)
    ax.set_title("method embedding clusters (top-2 principal components)")
    png_path = out_dir / "projection.png"
    fig.savefig(png_path, dpi=120, bbox_inches="tight")
    print(f"\nscatter plot saved to {png_path}")
except ImportError:
    print("\nmatplotlib not available; skipped the scatter plot")
