"""Grid datasets behind the figure and flow subcommands.

Datasets, not rendered images, are the contract: every figure is a table
of reals with a pinned schema, and the SVG layer in
:mod:`~softseam.io_formats` is optional decoration on top.

Schemas (all ``v1``):

* ``two_class_gap``: columns (delta, p, gap, on_seam) over a (Delta, p)
  grid, row-major with delta outermost; gap is the binary KL distance to
  the seam, on_seam is 1.0 where gap <= the seam tolerance.  Carries an
  auxiliary ``seam`` table (delta, p) sampling p = sigma(Delta).
* ``two_class_seam``: the auxiliary seam curve.
* ``three_class_map``: columns (a, b, y1, y2, y3, bary_x, bary_y) where
  (a, b) are centered-logit coordinates (z1-z3, z2-z3), y is the softmax
  image, and (bary_x, bary_y) embed it in the triangle with vertices
  (0,0), (1,0), (1/2, sqrt(3)/2).
* ``flow_trace``: columns (t, y_1..y_d, gap[, bary_x, bary_y]).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import __version__ as _tool_version
from .dual_core import SEAM_TOL_DEFAULT, kl_gap_array, sigmoid_array, softmax_array
from .errors import DomainError
from .flows import FlowTrace

__all__ = [
    "AxisSpec",
    "GridSpec",
    "FigureDataset",
    "TRIANGLE_VERTICES",
    "barycentric_xy",
    "two_class_grid",
    "three_class_grid",
    "flow_trace_dataset",
]

#: Planar triangle used for three-class plots; vertex k is where y_k = 1.
TRIANGLE_VERTICES = ((0.0, 0.0), (1.0, 0.0), (0.5, np.sqrt(3.0) / 2.0))


@dataclass(frozen=True)
class AxisSpec:
    """One grid axis: closed range [lo, hi] sampled at ``resolution`` points."""

    lo: float
    hi: float
    resolution: int = 201

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.lo >= self.hi:
            raise DomainError(f"axis needs finite lo < hi, got [{self.lo}, {self.hi}]")
        if self.resolution < 2:
            raise DomainError(f"resolution must be >= 2, got {self.resolution}")

    def linspace(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.resolution)


@dataclass(frozen=True)
class GridSpec:
    axes: tuple[AxisSpec, ...]

    def __post_init__(self):
        if len(self.axes) == 0:
            raise DomainError("grid needs at least one axis")

    @property
    def n_rows(self) -> int:
        return int(np.prod([a.resolution for a in self.axes]))


@dataclass
class FigureDataset:
    """A named table of reals plus reproducibility metadata.

    ``aux`` holds secondary tables emitted alongside the main one (the
    seam curve of the two-class figure).  Grid-built datasets have
    exactly ``prod(resolutions)`` rows; traces have one row per recorded
    state.
    """

    schema_id: str
    columns: tuple[str, ...]
    rows: np.ndarray
    metadata: dict
    aux: dict[str, "FigureDataset"] = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise DomainError(
                f"rows must be (n, {len(self.columns)}), got {self.rows.shape}"
            )
        if not np.all(np.isfinite(self.rows)):
            raise DomainError(f"dataset {self.schema_id} contains non-finite values")

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


def _metadata(command: str, parameters: dict, seed: int | None) -> dict:
    return {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "tool_version": _tool_version,
    }


def two_class_grid(
    grid: GridSpec | None = None,
    seam_tol: float = SEAM_TOL_DEFAULT,
    seed: int | None = None,
) -> FigureDataset:
    """Fenchel-Young gap over a (Delta, p) grid, plus the seam curve.

    The gap at (Delta, p) is the binary KL divergence of (p, 1-p) from
    (sigma(Delta), 1-sigma(Delta)); it vanishes exactly on the seam
    p = sigma(Delta).  The p axis must stay strictly inside (0, 1).
    """
    if grid is None:
        grid = GridSpec((AxisSpec(-6.0, 6.0, 201), AxisSpec(0.001, 0.999, 201)))
    if len(grid.axes) != 2:
        raise DomainError(f"two-class grid needs 2 axes, got {len(grid.axes)}")
    d_axis, p_axis = grid.axes
    if p_axis.lo <= 0.0 or p_axis.hi >= 1.0:
        raise DomainError(
            f"p range must stay strictly inside (0, 1), got [{p_axis.lo}, {p_axis.hi}]"
        )

    deltas = d_axis.linspace()
    ps = p_axis.linspace()
    dd, pp = (a.ravel() for a in np.meshgrid(deltas, ps, indexing="ij"))
    z = np.column_stack([dd / 2.0, -dd / 2.0])
    y = np.column_stack([pp, 1.0 - pp])
    gap = np.maximum(kl_gap_array(z, y), 0.0)
    on_seam = (gap <= seam_tol).astype(float)

    rows = np.column_stack([dd, pp, gap, on_seam])
    params = {
        "delta_range": [d_axis.lo, d_axis.hi],
        "p_range": [p_axis.lo, p_axis.hi],
        "resolution": [d_axis.resolution, p_axis.resolution],
        "seam_tol": seam_tol,
    }
    ds = FigureDataset(
        schema_id="two_class_gap",
        columns=("delta", "p", "gap", "on_seam"),
        rows=rows,
        metadata=_metadata("figure two-class", params, seed),
    )
    assert ds.rows.shape[0] == grid.n_rows
    seam_rows = np.column_stack([deltas, sigmoid_array(deltas)])
    ds.aux["seam"] = FigureDataset(
        schema_id="two_class_seam",
        columns=("delta", "p"),
        rows=seam_rows,
        metadata=_metadata("figure two-class", params, seed),
    )
    return ds


def barycentric_xy(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Planar embedding sum_k y_k * vertex_k of simplex points (..., 3)."""
    y = np.asarray(y, dtype=float)
    vx = np.array([v[0] for v in TRIANGLE_VERTICES])
    vy = np.array([v[1] for v in TRIANGLE_VERTICES])
    return y @ vx, y @ vy


def three_class_grid(
    grid: GridSpec | None = None,
    shift: float = 0.0,
    seed: int | None = None,
) -> FigureDataset:
    """Softmax image of a rectangular grid in centered-logit coordinates.

    Grid coordinates are (a, b) = (z1 - z3, z2 - z3); the raw logits fed
    to softmax are (a + shift, b + shift, shift), so ``shift`` exercises
    bias-shift invariance without changing what the screen sees.
    """
    if grid is None:
        grid = GridSpec((AxisSpec(-4.0, 4.0, 41), AxisSpec(-4.0, 4.0, 41)))
    if len(grid.axes) != 2:
        raise DomainError(f"three-class grid needs 2 axes, got {len(grid.axes)}")
    a_axis, b_axis = grid.axes

    aa, bb = (
        m.ravel()
        for m in np.meshgrid(a_axis.linspace(), b_axis.linspace(), indexing="ij")
    )
    raw = np.column_stack([aa + shift, bb + shift, np.full_like(aa, shift)])
    y = softmax_array(raw)
    bx, by = barycentric_xy(y)

    rows = np.column_stack([aa, bb, y, bx, by])
    params = {
        "a_range": [a_axis.lo, a_axis.hi],
        "b_range": [b_axis.lo, b_axis.hi],
        "resolution": [a_axis.resolution, b_axis.resolution],
        "shift": shift,
    }
    ds = FigureDataset(
        schema_id="three_class_map",
        columns=("a", "b", "y1", "y2", "y3", "bary_x", "bary_y"),
        rows=rows,
        metadata=_metadata("figure three-class", params, seed),
    )
    assert ds.rows.shape[0] == grid.n_rows
    return ds


def flow_trace_dataset(
    trace: FlowTrace,
    seed: int | None = None,
    parameters: dict | None = None,
) -> FigureDataset:
    """Tabulate a replicator trace: (t, y_1..y_d, gap) per recorded state.

    For d = 3 the barycentric plot coordinates are appended so the
    trajectory can be drawn inside the triangle.
    """
    d = trace.target.d
    t = np.array([s.t for s in trace.states])
    ys = np.array([s.y.values for s in trace.states])
    gaps = trace.gaps()
    cols = ["t"] + [f"y_{i + 1}" for i in range(d)] + ["gap"]
    blocks = [t[:, None], ys, gaps[:, None]]
    if d == 3:
        bx, by = barycentric_xy(ys)
        cols += ["bary_x", "bary_y"]
        blocks += [bx[:, None], by[:, None]]
    meta = _metadata("flow", dict(parameters or {}), seed)
    meta["target"] = trace.target.values.tolist()
    meta["converged"] = trace.converged
    meta["steps_taken"] = trace.steps_taken
    meta["final_gap"] = trace.final_gap
    return FigureDataset(
        schema_id="flow_trace",
        columns=tuple(cols),
        rows=np.hstack(blocks),
        metadata=meta,
    )
