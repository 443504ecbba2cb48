"""Writers for figure datasets: CSV, JSON, and optional SVG rendering.

CSV layout is pinned for reproducibility: line 1 is
``# schema: <schema_id> v1``, line 2 the comma-separated column names,
then one row per line with 17 significant digits.  Identical inputs
produce byte-identical files.  Auxiliary tables go to sibling files
(``out.csv`` -> ``out.seam.csv``).  JSON mirrors the same columns in one
document with the metadata and aux tables inlined.  SVG is decoration
over the datasets and makes no reproducibility promise.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DomainError
from .figures import TRIANGLE_VERTICES, FigureDataset

__all__ = [
    "format_csv",
    "write_csv",
    "dataset_to_json_dict",
    "format_json",
    "write_json",
    "write_svg",
    "write_dataset",
]


def format_csv(ds: FigureDataset) -> str:
    lines = [f"# schema: {ds.schema_id} v1", ",".join(ds.columns)]
    for row in ds.rows:
        lines.append(",".join("%.17g" % v for v in row))
    return "\n".join(lines) + "\n"


def _aux_path(path: Path, name: str) -> Path:
    return path.with_name(f"{path.stem}.{name}{path.suffix}")


def write_csv(ds: FigureDataset, path: str | Path) -> list[Path]:
    """Write the main table to ``path`` and each aux table alongside it."""
    path = Path(path)
    written = []
    path.write_text(format_csv(ds), encoding="ascii", newline="\n")
    written.append(path)
    for name, sub in ds.aux.items():
        p = _aux_path(path, name)
        p.write_text(format_csv(sub), encoding="ascii", newline="\n")
        written.append(p)
    return written


def dataset_to_json_dict(ds: FigureDataset, with_aux: bool = True) -> dict:
    out = {
        "schema": f"{ds.schema_id} v1",
        "columns": list(ds.columns),
        "metadata": ds.metadata,
        "rows": [[float(v) for v in row] for row in ds.rows],
    }
    if with_aux and ds.aux:
        out["aux"] = {
            name: dataset_to_json_dict(sub, with_aux=False)
            for name, sub in ds.aux.items()
        }
    return out


def format_json(ds: FigureDataset) -> str:
    return json.dumps(dataset_to_json_dict(ds), indent=2) + "\n"


def write_json(ds: FigureDataset, path: str | Path) -> list[Path]:
    path = Path(path)
    path.write_text(format_json(ds), encoding="ascii", newline="\n")
    return [path]


# ---------------------------------------------------------------------------
# SVG rendering (matplotlib, loaded lazily)
# ---------------------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def _render_two_class(ds: FigureDataset, path: Path) -> None:
    plt = _pyplot()
    res = ds.metadata["parameters"]["resolution"]
    d_lo, d_hi = ds.metadata["parameters"]["delta_range"]
    p_lo, p_hi = ds.metadata["parameters"]["p_range"]
    gap = ds.column("gap").reshape(res[0], res[1])

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    im = ax.imshow(
        gap.T,
        origin="lower",
        extent=(d_lo, d_hi, p_lo, p_hi),
        aspect="auto",
        cmap="viridis",
    )
    fig.colorbar(im, ax=ax, label="gap (nats)")
    if "seam" in ds.aux:
        seam = ds.aux["seam"]
        ax.plot(seam.column("delta"), seam.column("p"), "w-", lw=2.5)
    ax.set_xlabel("delta")
    ax.set_ylabel("p")
    fig.savefig(path, format="svg")
    plt.close(fig)


def _render_three_class(ds: FigureDataset, path: Path) -> None:
    plt = _pyplot()
    res = ds.metadata["parameters"]["resolution"]
    bx = ds.column("bary_x").reshape(res[0], res[1])
    by = ds.column("bary_y").reshape(res[0], res[1])

    fig, ax = plt.subplots(figsize=(5.6, 5.2))
    tri = list(TRIANGLE_VERTICES) + [TRIANGLE_VERTICES[0]]
    ax.plot([v[0] for v in tri], [v[1] for v in tri], "k-", lw=1.0)
    for i in range(res[0]):
        ax.plot(bx[i], by[i], "-", color="tab:blue", lw=0.6)
    for j in range(res[1]):
        ax.plot(bx[:, j], by[:, j], "-", color="tab:orange", lw=0.6)
    ax.set_aspect("equal")
    ax.set_axis_off()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _render_flow_trace(ds: FigureDataset, path: Path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    if "bary_x" in ds.columns:
        tri = list(TRIANGLE_VERTICES) + [TRIANGLE_VERTICES[0]]
        ax.plot([v[0] for v in tri], [v[1] for v in tri], "k-", lw=1.0)
        ax.plot(ds.column("bary_x"), ds.column("bary_y"), "-", color="tab:blue")
        ax.plot(ds.column("bary_x")[-1:], ds.column("bary_y")[-1:], "o",
                color="tab:red")
        ax.set_aspect("equal")
        ax.set_axis_off()
    else:
        ax.semilogy(ds.column("t"), np.maximum(ds.column("gap"), 1e-300))
        ax.set_xlabel("t")
        ax.set_ylabel("gap (nats)")
    fig.savefig(path, format="svg")
    plt.close(fig)


_RENDERERS = {
    "two_class_gap": _render_two_class,
    "three_class_map": _render_three_class,
    "flow_trace": _render_flow_trace,
}


def write_svg(ds: FigureDataset, path: str | Path) -> list[Path]:
    try:
        renderer = _RENDERERS[ds.schema_id]
    except KeyError:
        raise DomainError(f"no SVG renderer for schema {ds.schema_id!r}") from None
    path = Path(path)
    renderer(ds, path)
    return [path]


def write_dataset(ds: FigureDataset, path: str | Path, fmt: str) -> list[Path]:
    if fmt == "csv":
        return write_csv(ds, path)
    if fmt == "json":
        return write_json(ds, path)
    if fmt == "svg":
        return write_svg(ds, path)
    raise DomainError(f"unknown format {fmt!r}; use csv, json, or svg")
