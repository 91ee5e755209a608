"""
CSV tables and SVG figures written by the command line front-end
"""
from pathlib import Path
from typing import Dict, List, Optional, Sequence

# Non-interactive backend for batch runs
import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from leafmap.errors import UnboundedInChart
from leafmap.foliation import NormalizedLeaf
from leafmap.frenet import FlagTable
from leafmap.projlin import affine_chart
from leafmap.regularity import ModelFit, ModellingReport
from leafmap.spectra import ConeSampleSet, SpectrumRecord

FLOAT_FORMAT = "%.17g"

plt.rcParams.update({
    "svg.hashsalt": "leafmap",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.2,
})


def write_csv(frame: pd.DataFrame, path: Path, config_hash: str) -> Path:
    """Header comment with the config hash, then the table."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        f.write(f"# config_hash: {config_hash}\n")
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def _save_svg(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


# ---------------------------------------------------------------------------
# tables

def flag_table_frame(table: FlagTable) -> pd.DataFrame:
    rows = []
    for b, flag in table:
        row = {"angle": b.angle, "word": str(b.word) if b.word is not None else ""}
        row.update({f"xi1_{i}": v for i, v in enumerate(flag.p1.coords)})
        row.update({f"xi2_{i}": v for i, v in enumerate(flag.p2.basis.ravel())})
        row.update({f"xi3_{i}": v for i, v in enumerate(flag.p3.coeffs)})
        rows.append(row)
    return pd.DataFrame(rows)


def leaf_frame(nl: NormalizedLeaf) -> pd.DataFrame:
    """Boundary samples of one normalized leaf: label angle, leaf-plane point and chart point."""
    pts = nl.plane_points()
    return pd.DataFrame({
        "y_angle": nl.source.angles(),
        "px": pts[:, 0], "py": pts[:, 1], "pz": pts[:, 2],
        "chart_x": nl.chart_polygon[:, 0],
        "chart_y": nl.chart_polygon[:, 1],
    })


def distance_matrix_frame(angles: Sequence[float], matrix: np.ndarray) -> pd.DataFrame:
    labels = [f"{a:.6f}" for a in angles]
    frame = pd.DataFrame(np.asarray(matrix), columns=labels)
    frame.insert(0, "angle", labels)
    return frame


def spectra_frame(records: Sequence[SpectrumRecord]) -> pd.DataFrame:
    return pd.DataFrame([{
        "word": str(r.word),
        "l1": r.lambda_vec[0], "l2": r.lambda_vec[1], "l3": r.lambda_vec[2], "l4": r.lambda_vec[3],
        "eq1_residual": r.eq1_residual,
        "eq1_normalized": r.eq1_normalized,
        "ratio1": r.ellipse_ratios[0],
        "ratio2": r.ellipse_ratios[1],
        "witness": r.witness,
        "inverse_residual": r.inverse_residual,
    } for r in records], columns=["word", "l1", "l2", "l3", "l4", "eq1_residual", "eq1_normalized",
                                  "ratio1", "ratio2", "witness", "inverse_residual"])


def cone_frame(cs: ConeSampleSet) -> pd.DataFrame:
    d = cs.directions.reshape(-1, 4)
    return pd.DataFrame({"word": [str(w) for w in cs.source_words],
                         "d1": d[:, 0], "d2": d[:, 1], "d3": d[:, 2], "d4": d[:, 3]})


def model_fit_frame(word: str, fits: Sequence[ModelFit]) -> pd.DataFrame:
    return pd.DataFrame([{
        "word": word,
        "point_type": fit.point_type,
        "alpha_exact": fit.alpha_exact,
        "alpha_hat": fit.alpha_hat,
        "r2": fit.r_squared,
        "window_r": fit.fit_window[1],
        "window_n": fit.fit_window[0],
        "asymmetry": fit.asymmetry,
    } for fit in fits])


def mismatch_frame(reports: Sequence[ModellingReport]) -> pd.DataFrame:
    return pd.DataFrame([{
        "word": r.word,
        "alpha_plus": r.alpha_plus,
        "alpha_minus": r.alpha_minus,
        "mismatch": r.mismatch,
    } for r in reports], columns=["word", "alpha_plus", "alpha_minus", "mismatch"])


def benzecri_frame(distances: Sequence[float]) -> pd.DataFrame:
    return pd.DataFrame({"k": np.arange(len(distances)), "hausdorff": np.asarray(distances)})


def leaf_summary_frame(rows: List[Dict]) -> pd.DataFrame:
    return pd.DataFrame(rows)


# ---------------------------------------------------------------------------
# figures

def _closed(polygon: np.ndarray) -> np.ndarray:
    return np.vstack([polygon, polygon[:1]])


def plot_leaf(nl: NormalizedLeaf, path: Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    poly = _closed(nl.chart_polygon)
    ax.plot(poly[:, 0], poly[:, 1], color="#000000", linewidth=0.8)
    try:
        frame_xy = affine_chart(nl.frame_images, nl.chart)
        ax.scatter(frame_xy[:, 0], frame_xy[:, 1], s=12, color="#c44536", zorder=3)
    except UnboundedInChart:
        pass
    ax.set_aspect("equal")
    ax.set_title(title)
    return _save_svg(fig, path)


def plot_cone(points: np.ndarray, path: Path, title: str = "Weyl chamber directions") -> Path:
    """Simplex chart of the cone directions."""
    fig, ax = plt.subplots(figsize=(5, 4.5))
    corners = _closed(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]]))
    ax.plot(corners[:, 0], corners[:, 1], color="#666666", linewidth=0.6)
    if len(points):
        ax.scatter(points[:, 0], points[:, 1], s=6, color="#4a90d9")
    ax.set_aspect("equal")
    ax.set_title(title)
    return _save_svg(fig, path)


def plot_benzecri(iterates: Sequence[np.ndarray], target: np.ndarray, path: Path,
                  distances: Optional[Sequence[float]] = None) -> Path:
    """Chart polygons of the iterates over the target ellipse, with the distance sequence."""
    fig, axes = plt.subplots(1, 2 if distances is not None else 1, figsize=(9, 4.5), squeeze=False)
    ax = axes[0, 0]
    t = _closed(target)
    ax.plot(t[:, 0], t[:, 1], color="#000000", linewidth=1.0)
    for k, poly in enumerate(iterates):
        p = _closed(poly)
        ax.plot(p[:, 0], p[:, 1], linewidth=0.5, alpha=0.3 + 0.7 * k / max(1, len(iterates) - 1))
    ax.set_aspect("equal")
    ax.set_title("iterates")
    if distances is not None:
        ax = axes[0, 1]
        ax.semilogy(np.arange(len(distances)), np.maximum(np.asarray(distances), 1e-17), marker="o",
                    markersize=3, color="#2d8a4e")
        ax.set_xlabel("k")
        ax.set_ylabel("Hausdorff distance")
    return _save_svg(fig, path)
