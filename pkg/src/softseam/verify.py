"""Property suites behind the ``verify`` subcommand.

Each property here corresponds one-to-one to a documented invariant of
:mod:`~softseam.dual_core`, :mod:`~softseam.screen_geometry`, or
:mod:`~softseam.flows`; the emitted report names the module and the
invariant.  Suites draw their samples from a seeded generator so a run
is reproducible from the command line alone, and a failing sample is
serialized into the report for replay.

The rank checks deliberately run two independent procedures: the
production path (singular values, in ``screen_geometry``) and the
pivoted Gaussian elimination implemented here.  Neither is allowed to
stand in for the other.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from . import dual_core as dc
from . import flows as fl
from . import screen_geometry as sg

__all__ = [
    "PropertyResult",
    "VerifyReport",
    "pivoted_elimination_rank",
    "duality_properties",
    "geometry_properties",
    "flow_properties",
    "run_verify",
    "SUITES",
]


def _json_safe(obj):
    """Recursively convert numpy scalars so json.dumps accepts the report."""
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def pivoted_elimination_rank(matrix: np.ndarray, rel_tol: float = 1e-12) -> int:
    """Numerical rank by Gaussian elimination with full pivoting.

    Independent of the SVD route used for :class:`RankReport`: pivots are
    chosen as the largest remaining entry and elimination stops when the
    best pivot drops below ``max(n, m) * max|A| * rel_tol``.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"need a 2-D matrix, got shape {a.shape}")
    n, m = a.shape
    scale = float(np.abs(a).max(initial=0.0))
    if scale == 0.0:
        return 0
    tol = max(n, m) * scale * rel_tol
    k = 0
    while k < min(n, m):
        sub = np.abs(a[k:, k:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        if sub[i, j] <= tol:
            break
        a[[k, k + i]] = a[[k + i, k]]
        a[:, [k, k + j]] = a[:, [k + j, k]]
        a[k + 1 :] -= np.outer(a[k + 1 :, k] / a[k, k], a[k])
        k += 1
    return k


@dataclass
class PropertyResult:
    """Outcome of one verified invariant."""

    suite: str
    module: str
    name: str
    detail: str
    samples: int
    max_violation: float
    tolerance: float
    passed: bool
    failing_case: dict | None = None

    def format_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.module} :: {self.name} :: "
            f"max_violation={self.max_violation:.3e} tol={self.tolerance:.1e} "
            f"n={self.samples}"
        )


@dataclass
class VerifyReport:
    suite: str
    seed: int
    samples: int
    results: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def format_lines(self) -> list[str]:
        lines = [r.format_line() for r in self.results]
        n_fail = sum(not r.passed for r in self.results)
        verdict = "all properties hold" if n_fail == 0 else f"{n_fail} properties FAILED"
        lines.append(
            f"suite={self.suite} seed={self.seed} samples={self.samples}: {verdict}"
        )
        return lines

    def to_json_dict(self) -> dict:
        return _json_safe({
            "suite": self.suite,
            "seed": self.seed,
            "samples": self.samples,
            "passed": self.passed,
            "properties": [
                {
                    "suite": r.suite,
                    "module": r.module,
                    "name": r.name,
                    "detail": r.detail,
                    "samples": r.samples,
                    "max_violation": r.max_violation,
                    "tolerance": r.tolerance,
                    "passed": r.passed,
                    "failing_case": r.failing_case,
                }
                for r in self.results
            ],
        })


def _random_simplex(rng: np.random.Generator, n: int, d: int, floor: float) -> np.ndarray:
    """Dirichlet points pushed away from the boundary: min entry >= floor."""
    return rng.dirichlet(np.ones(d), size=n) * (1.0 - d * floor) + floor


def _random_tangent(rng: np.random.Generator, d: int) -> sg.CollarTangent:
    dy = rng.standard_normal(d)
    dy -= dy.mean()
    return sg.CollarTangent(rng.standard_normal(), dy, rng.standard_normal(d))


def _random_point(rng: np.random.Generator, d: int, r: float | None = None) -> sg.CollarPoint:
    rr = rng.uniform(-2.0, 2.0) if r is None else r
    y = _random_simplex(rng, 1, d, 1e-3)[0]
    z = rng.uniform(-5.0, 5.0, size=d)
    return sg.CollarPoint(rr, y, z)


def _tol(overrides: Mapping[str, float] | None, name: str, default: float) -> float:
    if overrides and name in overrides:
        return float(overrides[name])
    return default


# ---------------------------------------------------------------------------
# duality suite (dual_core invariants)
# ---------------------------------------------------------------------------


def duality_properties(
    samples: int = 1000,
    seed: int = 0,
    tol_overrides: Mapping[str, float] | None = None,
) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    results: list[PropertyResult] = []
    dims = (2, 3, 5, 10)
    per_dim = max(1, samples // len(dims))

    # softmax lands on the simplex
    tol = _tol(tol_overrides, "softmax-simplex", 1e-12)
    worst = 0.0
    bad = None
    for d in dims:
        Z = rng.uniform(-10, 10, size=(per_dim, d))
        Y = dc.softmax_array(Z)
        v = max(
            float(np.max(np.abs(Y.sum(axis=-1) - 1.0))),
            float(max(0.0, -Y.min())),
        )
        if v > worst:
            worst = v
            if v > tol:
                bad = {"z": Z[int(np.argmax(np.abs(Y.sum(axis=-1) - 1.0)))].tolist()}
    results.append(
        PropertyResult(
            "duality", "dual_core", "softmax-simplex",
            "softmax outputs are positive and sum to 1 within 1e-12",
            per_dim * len(dims), worst, tol, worst <= tol, bad,
        )
    )

    # bias-shift invariance
    tol = _tol(tol_overrides, "bias-shift-invariance", 1e-12)
    worst, bad = 0.0, None
    for d in dims:
        Z = rng.uniform(-10, 10, size=(per_dim, d))
        c = rng.uniform(-100, 100, size=(per_dim, 1))
        diff = np.abs(dc.softmax_array(Z + c) - dc.softmax_array(Z))
        v = float(diff.max())
        if v > worst:
            worst = v
            if v > tol:
                i = int(np.argmax(diff.max(axis=-1)))
                bad = {"z": Z[i].tolist(), "c": float(c[i, 0])}
    results.append(
        PropertyResult(
            "duality", "dual_core", "bias-shift-invariance",
            "softmax(z + c*1) = softmax(z) entrywise within 1e-12 for |c| <= 100",
            per_dim * len(dims), worst, tol, worst <= tol, bad,
        )
    )

    # gradient check A: FD of LSE equals softmax
    tol = _tol(tol_overrides, "gradient-lse", 1e-6)
    h = 1e-5
    worst, bad = 0.0, None
    for d in dims:
        Z = rng.uniform(-5, 5, size=(per_dim, d))
        eye = np.eye(d)
        fd = (
            dc.log_sum_exp_array(Z[:, None, :] + h * eye[None])
            - dc.log_sum_exp_array(Z[:, None, :] - h * eye[None])
        ) / (2 * h)
        diff = np.abs(fd - dc.softmax_array(Z))
        v = float(diff.max())
        if v > worst:
            worst = v
            if v > tol:
                bad = {"z": Z[int(np.argmax(diff.max(axis=-1)))].tolist(), "h": h}
    results.append(
        PropertyResult(
            "duality", "dual_core", "gradient-lse",
            "central differences of log_sum_exp match softmax within 1e-6 per entry",
            per_dim * len(dims), worst, tol, worst <= tol, bad,
        )
    )

    # gradient check B: directional derivative of neg-entropy equals <Pi(y), v>
    tol = _tol(tol_overrides, "gradient-gauge", 1e-6)
    worst, bad = 0.0, None
    for d in dims:
        Y = _random_simplex(rng, per_dim, d, 0.01)
        V = rng.standard_normal((per_dim, d))
        V -= V.mean(axis=-1, keepdims=True)
        V /= np.linalg.norm(V, axis=-1, keepdims=True)
        fd = (
            dc.neg_entropy_array(Y + h * V) - dc.neg_entropy_array(Y - h * V)
        ) / (2 * h)
        gauge = dc.zero_mean_array(np.log(Y))
        diff = np.abs(fd - np.sum(gauge * V, axis=-1))
        v = float(diff.max())
        if v > worst:
            worst = v
            if v > tol:
                i = int(np.argmax(diff))
                bad = {"y": Y[i].tolist(), "v": V[i].tolist(), "h": h}
    results.append(
        PropertyResult(
            "duality", "dual_core", "gradient-gauge",
            "directional differences of negative entropy match <Pi(y), v> within 1e-6",
            per_dim * len(dims), worst, tol, worst <= tol, bad,
        )
    )

    # gap nonnegativity and the equality case
    tol = _tol(tol_overrides, "gap-nonnegativity", 1e-12)
    worst, bad = 0.0, None
    n_pairs = 0
    for d in dims:
        Z = rng.uniform(-10, 10, size=(per_dim, d))
        Y = _random_simplex(rng, per_dim, d, 1e-4)
        # every tenth pair is placed exactly on the seam
        on = slice(0, per_dim, 10)
        Y[on] = dc.softmax_array(Z[on])
        raw = dc.kl_gap_array(Z, Y)
        n_pairs += per_dim
        v = float(max(0.0, -raw.min()))
        near = np.max(np.abs(Y - dc.softmax_array(Z)), axis=-1) <= 1e-9
        zero = raw <= 1e-12
        if np.any(near != zero):
            v = max(v, 1.0)
            i = int(np.argmax(near != zero))
            bad = {"z": Z[i].tolist(), "y": Y[i].tolist(), "gap": float(raw[i])}
        if v > worst:
            worst = v
            if v > tol and bad is None:
                i = int(np.argmin(raw))
                bad = {"z": Z[i].tolist(), "y": Y[i].tolist(), "gap": float(raw[i])}
    results.append(
        PropertyResult(
            "duality", "dual_core", "gap-nonnegativity",
            "gap >= 0 with equality (<=1e-12) exactly when y is softmax(z) to 1e-9",
            n_pairs, worst, tol, worst <= tol, bad,
        )
    )

    # two expressions for the gap agree
    tol = _tol(tol_overrides, "gap-two-expressions", 1e-10)
    worst, bad = 0.0, None
    for d in dims:
        Z = rng.uniform(-20, 20, size=(per_dim, d))
        Y = _random_simplex(rng, per_dim, d, 1e-6)
        kl = dc.kl_gap_array(Z, Y)
        three = (
            dc.neg_entropy_array(Y)
            + dc.log_sum_exp_array(Z)
            - np.sum(Z * Y, axis=-1)
        )
        diff = np.abs(kl - three)
        v = float(diff.max())
        if v > worst:
            worst = v
            if v > tol:
                i = int(np.argmax(diff))
                bad = {"z": Z[i].tolist(), "y": Y[i].tolist()}
    results.append(
        PropertyResult(
            "duality", "dual_core", "gap-two-expressions",
            "KL form and phi(y) + phi*(z) - <z,y> agree within 1e-10",
            per_dim * len(dims), worst, tol, worst <= tol, bad,
        )
    )

    # gauge round trips; each leg has its own bound, so the reported
    # violation is normalized to its leg's tolerance (pass iff <= 1)
    tol = _tol(tol_overrides, "gauge-round-trips", 1.0)
    worst, bad = 0.0, None
    for d in dims:
        Y = _random_simplex(rng, per_dim, d, 1e-4)
        back = dc.softmax_array(dc.zero_mean_array(np.log(Y)))
        v1 = float(np.max(np.abs(back - Y)))
        Z = rng.uniform(-10, 10, size=(per_dim, d))
        rep = dc.zero_mean_array(np.log(dc.softmax_array(Z)))
        v2 = float(np.max(np.abs(rep - dc.zero_mean_array(Z))))
        v = max(v1 / 1e-12, v2 / 1e-9)
        if v > worst:
            worst = v
            if v > tol:
                if v1 / 1e-12 >= v2 / 1e-9:
                    i = int(np.argmax(np.max(np.abs(back - Y), axis=-1)))
                    bad = {"y": Y[i].tolist()}
                else:
                    i = int(np.argmax(np.max(np.abs(rep - dc.zero_mean_array(Z)), axis=-1)))
                    bad = {"z": Z[i].tolist()}
    results.append(
        PropertyResult(
            "duality", "dual_core", "gauge-round-trips",
            "softmax(Pi(y)) = y within 1e-12 and Pi(softmax(z)) = centered z "
            "within 1e-9 (violation normalized to each leg's bound)",
            per_dim * len(dims), worst, tol, worst <= tol, bad,
        )
    )

    return results


# ---------------------------------------------------------------------------
# geometry suite (screen_geometry invariants)
# ---------------------------------------------------------------------------


def geometry_properties(
    samples: int = 1000,
    seed: int = 1,
    tol_overrides: Mapping[str, float] | None = None,
) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    results: list[PropertyResult] = []
    dims = (2, 3, 5)
    n_each = max(1, samples // len(dims))

    # alpha: linear in the tangent, invariant under representative shifts
    tol = _tol(tol_overrides, "alpha-linearity-invariance", 1e-12)
    worst, bad = 0.0, None
    for d in dims:
        for _ in range(min(n_each, 200)):
            p = _random_point(rng, d)
            v, w = _random_tangent(rng, d), _random_tangent(rng, d)
            a, b = rng.uniform(-2, 2, size=2)
            combo = sg.CollarTangent(
                a * v.dr + b * w.dr, a * v.dy + b * w.dy, a * v.dz + b * w.dz
            )
            lin = abs(
                sg.alpha_pair(p, combo)
                - (a * sg.alpha_pair(p, v) + b * sg.alpha_pair(p, w))
            )
            c = rng.uniform(-5, 5)
            shifted = sg.CollarPoint(p.r, p.y, p.z.values + c)
            inv = abs(sg.alpha_pair(shifted, v) - sg.alpha_pair(p, v))
            v_max = max(lin, inv)
            if v_max > worst:
                worst = v_max
                if v_max > tol:
                    bad = {"z": p.z.values.tolist(), "dy": v.dy.tolist(), "c": float(c)}
    results.append(
        PropertyResult(
            "geometry", "screen_geometry", "alpha-linearity-invariance",
            "alpha is linear in the tangent and unchanged by z -> z + c*1",
            min(n_each, 200) * len(dims), worst, tol, worst <= tol, bad,
        )
    )

    # bilinearity/antisymmetry of the 2-forms, matrix antisymmetry
    tol = _tol(tol_overrides, "forms-antisymmetry", 1e-14)
    worst, bad = 0.0, None
    checked = 0
    for d in dims:
        for _ in range(min(n_each, 100)):
            p = _random_point(rng, d)
            v, w = _random_tangent(rng, d), _random_tangent(rng, d)
            anti = max(
                abs(sg.dalpha_pair(v, w) + sg.dalpha_pair(w, v)),
                abs(sg.omega_q_pair(p, v, w) + sg.omega_q_pair(p, w, v)),
                abs(sg.dalpha_pair(v, v)),
            )
            m = sg.omega_q_matrix(p).matrix
            anti = max(anti, float(np.max(np.abs(m + m.T))))
            checked += 1
            if anti > worst:
                worst = anti
                if anti > tol:
                    bad = {"r": p.r, "z": p.z.values.tolist()}
    results.append(
        PropertyResult(
            "geometry", "screen_geometry", "forms-antisymmetry",
            "d(alpha) and omega_q are antisymmetric; assembled matrix to 1e-14",
            checked, worst, tol, worst <= tol, bad,
        )
    )

    # bias-shift tangent in every kernel
    tol = _tol(tol_overrides, "bias-shift-kernel", 1e-12)
    worst, bad = 0.0, None
    checked = 0
    for d in dims:
        shift = sg.CollarTangent.bias_shift(d)
        for _ in range(min(n_each, 100)):
            p = _random_point(rng, d)
            w = _random_tangent(rng, d)
            rep = sg.omega_q_matrix(p)
            coords = np.concatenate([np.zeros(d), np.ones(d)])
            v_max = max(
                abs(sg.alpha_pair(p, shift)),
                abs(sg.dalpha_pair(shift, w)),
                float(np.max(np.abs(rep.matrix @ coords))),
            )
            checked += 1
            if v_max > worst:
                worst = v_max
                if v_max > tol:
                    bad = {"r": p.r, "z": p.z.values.tolist()}
    results.append(
        PropertyResult(
            "geometry", "screen_geometry", "bias-shift-kernel",
            "the shift tangent pairs to 0 under alpha, d(alpha), and the matrix",
            checked, worst, tol, worst <= tol, bad,
        )
    )

    # two-class rank table against the elimination oracle
    tol = _tol(tol_overrides, "rank-table-d2", 0.0)
    worst, bad = 0.0, None
    table = []
    for r in (0.0, 0.5, -0.5, 1.0, -1.0):
        for delta in (0.0, 0.5, -0.5, 1.0, -1.0):
            p = sg.CollarPoint(r, [0.5, 0.5], [delta / 2, -delta / 2])
            rep = sg.omega_q_matrix(p)
            oracle = pivoted_elimination_rank(rep.matrix)
            expected = 0 if (r == 0.0 and delta == 0.0) else 2
            table.append((r, delta, rep.rank, oracle))
            v = float(max(abs(rep.rank - oracle), abs(rep.rank - expected)))
            if v > worst:
                worst = v
                bad = {"r": r, "delta": delta, "svd_rank": rep.rank, "oracle": oracle}
    results.append(
        PropertyResult(
            "geometry", "screen_geometry", "rank-table-d2",
            "4x4 omega_q ranks over (r, Delta) in {0, +-0.5, +-1}^2 match "
            "pivoted elimination (2 everywhere except 0 at the origin)",
            len(table), worst, tol, worst <= tol, bad,
        )
    )

    # quotient-space ranks: same machinery, shift direction removed
    tol = _tol(tol_overrides, "rank-quotient-consistency", 0.0)
    worst, bad = 0.0, None
    checked = 0
    for d in dims:
        for _ in range(10):
            p = _random_point(rng, d)
            full = sg.omega_q_matrix(p)
            quot = sg.omega_q_matrix(p, quotient_shift=True)
            v = float(
                max(
                    abs(full.rank - pivoted_elimination_rank(full.matrix)),
                    abs(quot.rank - pivoted_elimination_rank(quot.matrix)),
                )
            )
            checked += 1
            if v > worst:
                worst = v
                bad = {"r": p.r, "d": d, "full": full.rank, "quotient": quot.rank}
    results.append(
        PropertyResult(
            "geometry", "screen_geometry", "rank-quotient-consistency",
            "SVD ranks agree with elimination on both the full space and the "
            "shift quotient at random points",
            checked, worst, tol, worst <= tol, bad,
        )
    )

    # jet pairing vanishes on the seam
    tol = _tol(tol_overrides, "jet-pairing-on-seam", 1e-10)
    worst, bad = 0.0, None
    checked = 0
    for d in dims:
        for _ in range(min(n_each, 200)):
            z = rng.uniform(-5, 5, size=d)
            point = sg.CollarPoint(0.0, dc.softmax(z), z)
            diag = sg.seam_diagnostics(point, rng.standard_normal(d))
            checked += 1
            v = abs(diag.jet_pairing)
            if v > worst:
                worst = v
                if v > tol:
                    bad = {"z": z.tolist()}
    results.append(
        PropertyResult(
            "geometry", "screen_geometry", "jet-pairing-on-seam",
            "the 1-jet pairing vanishes (<=1e-10) at on-seam points for all "
            "logit perturbations",
            checked, worst, tol, worst <= tol, bad,
        )
    )

    # d(alpha) against its finite-difference exterior derivative
    tol = _tol(tol_overrides, "dalpha-finite-difference", 1e-6)
    worst, bad = 0.0, None
    checked = 0
    for _ in range(samples):
        d = int(rng.choice(dims))
        p = _random_point(rng, d)
        v, w = _random_tangent(rng, d), _random_tangent(rng, d)
        disc = sg.validate_dalpha_by_finite_differences(p, v, w, h=1e-5)
        checked += 1
        if disc > worst:
            worst = disc
            if disc > tol:
                bad = {"r": p.r, "z": p.z.values.tolist(), "d": d}
    results.append(
        PropertyResult(
            "geometry", "screen_geometry", "dalpha-finite-difference",
            "closed-form d(alpha) matches the finite-difference exterior "
            "derivative of alpha within 1e-6",
            checked, worst, tol, worst <= tol, bad,
        )
    )

    # lagrangian graph fibers stay on the seam
    tol = _tol(tol_overrides, "graph-fibers-on-seam", 1e-12)
    worst, bad = 0.0, None
    checked = 0
    for d in dims:
        for _ in range(min(n_each, 100)):
            r = float(rng.uniform(0.01, 3.0))
            z = rng.uniform(-5, 5, size=d)
            y = _random_simplex(rng, 1, d, 1e-3)[0]
            plus = sg.lagrangian_graph_point("plus", r, z)
            minus = sg.lagrangian_graph_point("minus", -r, y)
            v = max(
                dc.fenchel_young_gap(plus.z, plus.y).gap,
                dc.fenchel_young_gap(minus.z, minus.y).gap,
            )
            checked += 2
            if v > worst:
                worst = v
                if v > tol:
                    bad = {"r": r, "z": z.tolist(), "y": y.tolist()}
    results.append(
        PropertyResult(
            "geometry", "screen_geometry", "graph-fibers-on-seam",
            "points generated on either potential graph have gap 0 for every "
            "r of the correct sign",
            checked, worst, tol, worst <= tol, bad,
        )
    )

    return results


# ---------------------------------------------------------------------------
# flows suite (flows invariants)
# ---------------------------------------------------------------------------


def flow_properties(
    samples: int = 100,
    seed: int = 2,
    tol_overrides: Mapping[str, float] | None = None,
) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    results: list[PropertyResult] = []
    n_traj = min(samples, 200)

    problems = []
    for _ in range(n_traj):
        d = int(rng.integers(2, 6))
        z = rng.uniform(-3, 3, size=d)
        y0 = _random_simplex(rng, 1, d, 1e-3)[0]
        problems.append((z, y0))

    traces = [
        fl.flow_to_equilibrium(y0, z, tol=1e-8, max_steps=1_000_000)
        for z, y0 in problems
    ]

    # simplex preservation at every recorded state
    tol = _tol(tol_overrides, "simplex-preservation", 1e-12)
    worst, bad = 0.0, None
    for (z, y0), tr in zip(problems, traces):
        for s in tr.states:
            v = max(
                float(abs(s.y.values.sum() - 1.0)),
                float(max(0.0, -s.y.values.min())),
            )
            if v > worst:
                worst = v
                if v > tol:
                    bad = {"z": z.tolist(), "y0": y0.tolist(), "t": s.t}
    results.append(
        PropertyResult(
            "flows", "flows", "simplex-preservation",
            "every accepted state is positive and sums to 1 within 1e-12",
            sum(len(t.states) for t in traces), worst, tol, worst <= tol, bad,
        )
    )

    # Lyapunov monotonicity plus convergence of every run
    tol = _tol(tol_overrides, "lyapunov-monotone", 1e-12)
    worst, bad = 0.0, None
    for (z, y0), tr in zip(problems, traces):
        gaps = tr.gaps()
        v = float(max(0.0, np.max(np.diff(gaps), initial=0.0)))
        if not tr.converged:
            v = max(v, 1.0)
        if v > worst:
            worst = v
            if v > tol:
                bad = {"z": z.tolist(), "y0": y0.tolist()}
    results.append(
        PropertyResult(
            "flows", "flows", "lyapunov-monotone",
            "KL(y(t) || softmax(z)) is nonincreasing along recorded states "
            "and every run converges",
            n_traj, worst, tol, worst <= tol, bad,
        )
    )

    # the field vanishes at the softmax equilibrium
    tol = _tol(tol_overrides, "equilibrium-field", 1e-14)
    worst, bad = 0.0, None
    for z, _ in problems:
        eq = dc.softmax(z).values
        v = float(np.max(np.abs(fl.replicator_field(eq, z))))
        if v > worst:
            worst = v
            if v > tol:
                bad = {"z": z.tolist()}
    results.append(
        PropertyResult(
            "flows", "flows", "equilibrium-field",
            "the replicator field at y = softmax(z) has sup norm <= 1e-14",
            n_traj, worst, tol, worst <= tol, bad,
        )
    )

    # full-trace invariance under bias shifts
    tol = _tol(tol_overrides, "bias-shift-equivariance", 1e-12)
    worst, bad = 0.0, None
    for (z, y0), t0 in zip(problems[: min(20, n_traj)], traces):
        t1 = fl.flow_to_equilibrium(y0, z + 7.0, tol=1e-8, max_steps=1_000_000)
        if len(t0.states) != len(t1.states):
            v = 1.0
            bad = {"z": z.tolist(), "y0": y0.tolist(), "len0": len(t0.states), "len1": len(t1.states)}
        else:
            v = max(
                float(np.max(np.abs(a.y.values - b.y.values)))
                for a, b in zip(t0.states, t1.states)
            )
        if v > worst:
            worst = v
            if v > tol and bad is None:
                bad = {"z": z.tolist(), "y0": y0.tolist()}
    results.append(
        PropertyResult(
            "flows", "flows", "bias-shift-equivariance",
            "traces for z and z + c*1 agree state by state within 1e-12",
            min(20, n_traj), worst, tol, worst <= tol, bad,
        )
    )

    # two-class coordinate reduction of the field
    tol = _tol(tol_overrides, "two-class-reduction", 1e-14)
    worst, bad = 0.0, None
    n_red = min(samples, 500)
    for _ in range(n_red):
        delta = float(rng.uniform(-5, 5))
        p = float(rng.uniform(0.01, 0.99))
        y = np.array([p, 1.0 - p])
        z = np.array([delta / 2, -delta / 2])
        general = fl.replicator_field(y, z)[0]
        reduced = p * (1.0 - p) * (delta - np.log(p / (1.0 - p)))
        v = abs(general - reduced)
        if v > worst:
            worst = v
            if v > tol:
                bad = {"delta": delta, "p": p}
    results.append(
        PropertyResult(
            "flows", "flows", "two-class-reduction",
            "the d=2 field reduces to p(1-p)(Delta - log(p/(1-p))) within 1e-14",
            n_red, worst, tol, worst <= tol, bad,
        )
    )

    return results


SUITES = {
    "duality": duality_properties,
    "geometry": geometry_properties,
    "flows": flow_properties,
}


def run_verify(
    suite: str = "all",
    samples: int = 1000,
    seed: int = 0,
    tol_overrides: Mapping[str, float] | None = None,
) -> VerifyReport:
    """Run one named suite (or all of them) and collect the report."""
    if suite not in SUITES and suite != "all":
        raise ValueError(f"unknown suite {suite!r}; pick one of "
                         f"{sorted(SUITES)} or 'all'")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    names = list(SUITES) if suite == "all" else [suite]
    report = VerifyReport(suite=suite, seed=seed, samples=samples)
    for offset, name in enumerate(names):
        report.results.extend(
            SUITES[name](samples=samples, seed=seed + offset, tol_overrides=tol_overrides)
        )
    return report
