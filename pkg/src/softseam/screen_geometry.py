"""Pointwise evaluation of the screen 1-form and collar 2-form.

On the thickened collar R_r x IntSimplex x R^d the forms are

    alpha   = sum_i z_i dy_i                (well-defined: sum_i dy_i = 0)
    omega_q = dr ^ alpha + r^2 d(alpha)

with d(alpha)(v, w) = sum_i [dz_i(v) dy_i(w) - dz_i(w) dy_i(v)], a
constant-coefficient form.  The fold is the hypersurface r = 0; the seam
is the subset of the fold where y = softmax(z).

Everything here is a plain float computation at a given point and given
tangents; no symbolic calculus.  Matrix assembly uses the coordinate
basis (d/dr; simplex tangents e_i - e_d for i < d; d/dz_1 .. d/dz_d) so
the low-dimensional coordinate formulas are reproduced literally.  Rank
is determined from singular values; the bias-shift direction
(dy=0, dz=1, dr=0) is checked to lie in the kernel at every point.

A note on normalization: the bias-shift direction pairs to 0 under alpha
and annihilates d(alpha), which is the computed content behind treating
it as the distinguished screen direction.  The conventional Reeb
normalization alpha(R) = 1 does not hold for it; this module asserts
only what it computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dual_core import (
    Logits,
    Probabilities,
    VectorLike,
    _coerce_logits,
    _coerce_probabilities,
    fenchel_young_gap,
    grad_potential,
    softmax,
)
from .errors import DimensionError, DomainError, SoftseamError

__all__ = [
    "CollarPoint",
    "CollarTangent",
    "RankReport",
    "SeamDiagnostics",
    "alpha_pair",
    "dalpha_pair",
    "omega_q_pair",
    "omega_q_matrix",
    "collar_basis",
    "softmax_jacobian",
    "validate_dalpha_by_finite_differences",
    "seam_diagnostics",
    "lagrangian_graph_point",
]

_TANGENT_SUM_TOL = 1e-12
_INTERIOR_FLOOR = 1e-12
_RANK_RTOL_DEFAULT = 1e-12
_KERNEL_RESIDUAL_RTOL = 1e-8


class CollarTangent:
    """An infinitesimal displacement (dr, dy, dz) with sum(dy) = 0."""

    __slots__ = ("dr", "dy", "dz")

    def __init__(self, dr: float, dy: VectorLike, dz: VectorLike):
        dr = float(dr)
        dy = np.asarray(dy, dtype=float)
        dz = np.asarray(dz, dtype=float)
        if dy.ndim != 1 or dz.ndim != 1 or dy.size != dz.size or dy.size < 2:
            raise DimensionError(
                f"dy and dz must be 1-D vectors of equal length >= 2, "
                f"got shapes {dy.shape} and {dz.shape}"
            )
        if not (math.isfinite(dr) and np.all(np.isfinite(dy)) and np.all(np.isfinite(dz))):
            raise DomainError("tangent components must be finite")
        if abs(float(dy.sum())) > _TANGENT_SUM_TOL:
            raise DomainError(
                f"simplex tangent requires sum(dy) = 0 within 1e-12, got {dy.sum()!r}"
            )
        dy = dy.copy()
        dz = dz.copy()
        dy.flags.writeable = False
        dz.flags.writeable = False
        self.dr = dr
        self.dy = dy
        self.dz = dz

    @classmethod
    def bias_shift(cls, d: int) -> "CollarTangent":
        """The distinguished direction dy = 0, dz = 1, dr = 0."""
        return cls(0.0, np.zeros(d), np.ones(d))

    @property
    def d(self) -> int:
        return self.dy.size

    def __repr__(self) -> str:
        return f"CollarTangent(dr={self.dr!r}, dy={self.dy.tolist()!r}, dz={self.dz.tolist()!r})"


class CollarPoint:
    """A point (r, y, z) of the thickened collar."""

    __slots__ = ("r", "y", "z")

    def __init__(self, r: float, y: Probabilities | VectorLike, z: Logits | VectorLike):
        r = float(r)
        if not math.isfinite(r):
            raise DomainError(f"collar coordinate r must be finite, got {r!r}")
        y = _coerce_probabilities(y)
        z = _coerce_logits(z)
        if y.d != z.d:
            raise DimensionError(f"y has d={y.d} but z has d={z.d}")
        self.r = r
        self.y = y
        self.z = z

    @property
    def d(self) -> int:
        return self.y.d

    def __repr__(self) -> str:
        return f"CollarPoint(r={self.r!r}, y={self.y!r}, z={self.z!r})"


@dataclass(frozen=True)
class RankReport:
    """Assembled matrix of a 2-form at a point plus rank/kernel diagnostics.

    ``mode`` is "full" for the 2d-dimensional coordinate basis and
    "shift_quotient" for the (2d-1)-dimensional basis with dz restricted
    to zero-mean combinations (the bias shift quotiented away).
    """

    matrix: np.ndarray
    rank: int
    kernel_basis: list[CollarTangent]
    tolerance_used: float
    mode: str = "full"

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel_basis)


@dataclass(frozen=True)
class SeamDiagnostics:
    """Numbers attached to a fold point and a logit perturbation.

    ``alpha_on_tangent`` is the literal pairing of alpha with the induced
    seam tangent; ``jet_pairing`` is the pairing of the 1-jet-space form
    dt - sum_i z_i dy_i with the lifted tangent, where t tracks the value
    of negative entropy along the seam.  The first is generally nonzero
    even on the seam (in two classes it equals 2*Delta*sigma'(Delta) for
    the direction (1,-1)); the second vanishes on the seam.  Both are
    reported, neither is suppressed.
    """

    gap: float
    alpha_on_tangent: float
    jet_pairing: float


def _check_form_point(point: CollarPoint) -> None:
    # The gauge log y blows up toward the boundary; reject points too close.
    if float(point.y.values.min()) < _INTERIOR_FLOOR:
        raise DomainError(
            f"form evaluation requires min(y) >= {_INTERIOR_FLOOR:g}; "
            f"got {point.y.values.min():g}"
        )


def _check_same_d(*objs) -> int:
    ds = {o.d for o in objs}
    if len(ds) != 1:
        raise DimensionError(f"mixed dimensions {sorted(ds)}")
    return ds.pop()


def alpha_pair(point: CollarPoint, v: CollarTangent) -> float:
    """Pair the screen 1-form alpha = sum_i z_i dy_i with a tangent.

    Depends only on the dy components of ``v`` and, because sum(dy) = 0,
    only on the logit class of the point (any representative gives the
    same value up to rounding).
    """
    _check_same_d(point, v)
    _check_form_point(point)
    return float(np.dot(point.z.values, v.dy))


def dalpha_pair(v: CollarTangent, w: CollarTangent) -> float:
    """Pair d(alpha) = sum_i dz_i ^ dy_i with two tangents.

    Constant coefficients, so no point argument: the value is
    sum_i [dz_i(v) dy_i(w) - dz_i(w) dy_i(v)], antisymmetric in (v, w).
    """
    _check_same_d(v, w)
    return float(np.dot(v.dz, w.dy) - np.dot(w.dz, v.dy))


def omega_q_pair(point: CollarPoint, v: CollarTangent, w: CollarTangent) -> float:
    """Pair the collar 2-form omega_q = dr ^ alpha + r^2 d(alpha)."""
    _check_same_d(point, v, w)
    _check_form_point(point)
    a_v = float(np.dot(point.z.values, v.dy))
    a_w = float(np.dot(point.z.values, w.dy))
    return v.dr * a_w - w.dr * a_v + point.r**2 * dalpha_pair(v, w)


def collar_basis(d: int, quotient_shift: bool = False) -> list[CollarTangent]:
    """Coordinate basis used for matrix assembly.

    Full mode: (d/dr; e_i - e_d simplex tangents for i < d; d/dz_1 ..
    d/dz_d), total 2d.  Quotient mode replaces the dz block with the
    zero-mean combinations e_j - e_d for j < d, total 2d - 1.
    """
    if d < 2:
        raise DimensionError(f"need d >= 2, got {d}")
    basis = [CollarTangent(1.0, np.zeros(d), np.zeros(d))]
    for i in range(d - 1):
        dy = np.zeros(d)
        dy[i] = 1.0
        dy[d - 1] = -1.0
        basis.append(CollarTangent(0.0, dy, np.zeros(d)))
    if quotient_shift:
        for j in range(d - 1):
            dz = np.zeros(d)
            dz[j] = 1.0
            dz[d - 1] = -1.0
            basis.append(CollarTangent(0.0, np.zeros(d), dz))
    else:
        for j in range(d):
            dz = np.zeros(d)
            dz[j] = 1.0
            basis.append(CollarTangent(0.0, np.zeros(d), dz))
    return basis


def _coords_to_tangent(coords: np.ndarray, d: int, quotient_shift: bool) -> CollarTangent:
    dy = np.zeros(d)
    dy[: d - 1] = coords[1:d]
    dy[d - 1] = -float(coords[1:d].sum())
    if quotient_shift:
        dz = np.zeros(d)
        dz[: d - 1] = coords[d : 2 * d - 1]
        dz[d - 1] = -float(coords[d : 2 * d - 1].sum())
    else:
        dz = np.asarray(coords[d : 2 * d], dtype=float)
    return CollarTangent(float(coords[0]), dy, dz)


def omega_q_matrix(
    point: CollarPoint,
    quotient_shift: bool = False,
    rank_rtol: float = _RANK_RTOL_DEFAULT,
) -> RankReport:
    """Assemble omega_q in the coordinate basis and diagnose its rank.

    The matrix is filled on the upper triangle and mirrored, so it is
    antisymmetric to the last bit.  Numerical rank counts singular values
    above ``n * smax * rank_rtol``; the right-singular vectors below the
    threshold form the kernel basis, returned as tangents.

    In full mode the bias-shift tangent is verified to lie in the kernel
    (residual at most 1e-8 times the largest matrix entry); a violation
    would mean the assembly itself is broken and raises.
    """
    _check_form_point(point)
    d = point.d
    basis = collar_basis(d, quotient_shift=quotient_shift)
    n = len(basis)
    m = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            val = omega_q_pair(point, basis[a], basis[b])
            m[a, b] = val
            m[b, a] = -val

    if not np.any(m):
        rank = 0
        tol = 0.0
        kernel_coords = np.eye(n)
    else:
        _, s, vt = np.linalg.svd(m)
        tol = n * float(s[0]) * rank_rtol
        rank = int(np.sum(s > tol))
        kernel_coords = vt[rank:]

    kernel = [_coords_to_tangent(row, d, quotient_shift) for row in kernel_coords]

    if not quotient_shift:
        shift_coords = np.concatenate([np.zeros(d), np.ones(d)])
        residual = float(np.max(np.abs(m @ shift_coords)))
        scale = float(np.max(np.abs(m)))
        if residual > _KERNEL_RESIDUAL_RTOL * scale and scale > 0.0:
            raise SoftseamError(
                f"bias-shift tangent escaped the kernel (residual {residual:g}, "
                f"scale {scale:g}): matrix assembly is inconsistent"
            )

    mode = "shift_quotient" if quotient_shift else "full"
    m.flags.writeable = False
    return RankReport(matrix=m, rank=rank, kernel_basis=kernel,
                      tolerance_used=tol, mode=mode)


def softmax_jacobian(y: Probabilities | VectorLike) -> np.ndarray:
    """Closed-form Jacobian of softmax at its output: J_ij = y_i (delta_ij - y_j)."""
    yv = _coerce_probabilities(y).values
    return np.diag(yv) - np.outer(yv, yv)


def _displace(point: CollarPoint, v: CollarTangent, h: float) -> CollarPoint:
    return CollarPoint(
        point.r + h * v.dr,
        point.y.values + h * v.dy,
        point.z.values + h * v.dz,
    )


def validate_dalpha_by_finite_differences(
    point: CollarPoint, v: CollarTangent, w: CollarTangent, h: float = 1e-5
) -> float:
    """|d(alpha)(v, w) - FD| with FD the finite-difference exterior derivative.

    The tangents are extended as constant coordinate fields, so the
    bracket term vanishes and FD = v(alpha(w)) - w(alpha(v)) with central
    differences of step ``h``.  Contract: at most 1e-6 for unit tangents
    and h = 1e-5.  The displaced points must stay inside the simplex;
    pick interior base points.
    """
    if not (1e-7 <= h <= 1e-3):
        raise DomainError(f"step must lie in [1e-7, 1e-3], got {h!r}")
    _check_same_d(point, v, w)
    _check_form_point(point)
    d_along_v = (
        alpha_pair(_displace(point, v, h), w) - alpha_pair(_displace(point, v, -h), w)
    ) / (2 * h)
    d_along_w = (
        alpha_pair(_displace(point, w, h), v) - alpha_pair(_displace(point, w, -h), v)
    ) / (2 * h)
    return abs(dalpha_pair(v, w) - (d_along_v - d_along_w))


def seam_diagnostics(point: CollarPoint, zdot: VectorLike) -> SeamDiagnostics:
    """Evaluate the seam pairings at a fold point for a logit perturbation.

    The induced tangent is v = (dr=0, dy=J zdot, dz=zdot) with J the
    softmax Jacobian at softmax(z); a perturbation of the logits drags
    the seam's probability coordinate along.  Reports the Fenchel-Young
    gap of the point (zero exactly on the seam, strictly positive off
    it), the literal pairing alpha(v), and the jet-space pairing
    <log y - z, dy> which vanishes on the seam for every perturbation.
    """
    if point.r != 0.0:
        raise DomainError(f"seam diagnostics require the fold r = 0, got r={point.r!r}")
    _check_form_point(point)
    zd = np.asarray(zdot, dtype=float)
    if zd.shape != (point.d,):
        raise DimensionError(
            f"perturbation must have shape ({point.d},), got {zd.shape}"
        )
    if not np.all(np.isfinite(zd)):
        raise DomainError("perturbation must be finite")

    gap = fenchel_young_gap(point.z, point.y).gap
    jac = softmax_jacobian(softmax(point.z))
    dy = jac @ zd
    tangent = CollarTangent(0.0, dy, zd)
    a_tan = alpha_pair(point, tangent)
    jet = float(np.dot(np.log(point.y.values) - point.z.values, dy))
    return SeamDiagnostics(gap=gap, alpha_on_tangent=a_tan, jet_pairing=jet)


def lagrangian_graph_point(
    side: str,
    r: float,
    seed: Logits | Probabilities | VectorLike,
) -> CollarPoint:
    """A point on one of the two potential-generated graphs.

    ``side="plus"`` needs r > 0 and a logit seed, giving (r, softmax(z), z);
    ``side="minus"`` needs r < 0 and a probability seed, giving
    (r, y, Pi(y)) with the zero-mean gauge as the logit representative.
    Either way the returned point sits on the on-seam fiber: its
    Fenchel-Young gap is zero, so the graphs close onto the seam as
    r -> 0 from both sides.
    """
    r = float(r)
    if not math.isfinite(r):
        raise DomainError(f"r must be finite, got {r!r}")
    if side == "plus":
        if r <= 0.0:
            raise DomainError(f"side='plus' requires r > 0, got {r!r}")
        z = seed if isinstance(seed, Logits) else Logits(np.asarray(seed, dtype=float))
        return CollarPoint(r, softmax(z), z)
    if side == "minus":
        if r >= 0.0:
            raise DomainError(f"side='minus' requires r < 0, got {r!r}")
        y = _coerce_probabilities(seed)
        return CollarPoint(r, y, grad_potential(y).z0)
    raise DomainError(f"side must be 'plus' or 'minus', got {side!r}")
