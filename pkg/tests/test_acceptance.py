"""Acceptance gate: one test per criterion, at full sample counts.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion.  Tolerances are pinned here and nowhere else; no
criterion is allowed to loosen them at runtime.
"""

import time

import numpy as np
import pytest

from softseam.cli import main as cli_main
from softseam.dual_core import (
    grad_potential,
    kl_gap_array,
    log_sum_exp_array,
    neg_entropy_array,
    sigmoid_array,
    softmax,
    softmax_array,
    two_class_sigmoid,
    zero_mean_array,
)
from softseam.figures import three_class_grid, two_class_grid
from softseam.flows import flow_to_equilibrium
from softseam.screen_geometry import (
    CollarPoint,
    CollarTangent,
    alpha_pair,
    dalpha_pair,
    omega_q_matrix,
    omega_q_pair,
    seam_diagnostics,
    validate_dalpha_by_finite_differences,
)
from softseam.verify import pivoted_elimination_rank

DIMS = (2, 3, 5, 10)


def _verdict(criterion, description, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" :: {detail}" if detail else ""
    print(f"\n[criterion {criterion}] {status} {description}{suffix}")
    assert ok, f"criterion {criterion} failed: {description} {detail}"


def _simplex(rng, n, d, floor):
    return rng.dirichlet(np.ones(d), size=n) * (1.0 - d * floor) + floor


def test_criterion_1_duality_suite():
    """10^5 random pairs: gap >= 0, zero on the seam, expressions agree."""
    rng = np.random.default_rng(2024)
    per_dim = 100_000 // len(DIMS)
    t0 = time.perf_counter()
    min_raw = np.inf
    max_seam_gap = 0.0
    max_expr_diff = 0.0
    for d in DIMS:
        Z = rng.uniform(-10, 10, size=(per_dim, d))
        Y = _simplex(rng, per_dim, d, 1e-4)
        raw = kl_gap_array(Z, Y)
        min_raw = min(min_raw, float(raw.min()))
        seam_raw = kl_gap_array(Z, softmax_array(Z))
        max_seam_gap = max(max_seam_gap, float(np.abs(seam_raw).max()))
        three = (
            neg_entropy_array(Y) + log_sum_exp_array(Z) - np.sum(Z * Y, axis=-1)
        )
        max_expr_diff = max(max_expr_diff, float(np.abs(raw - three).max()))
    elapsed = time.perf_counter() - t0
    ok = (
        min_raw >= -1e-12
        and max_seam_gap <= 1e-12
        and max_expr_diff <= 1e-10
        and elapsed < 10.0
    )
    _verdict(
        1,
        "duality suite over 10^5 pairs",
        ok,
        f"min_gap={min_raw:.2e}, seam_gap<={max_seam_gap:.2e}, "
        f"expr_diff<={max_expr_diff:.2e}, runtime={elapsed:.2f}s",
    )


def test_criterion_2_gradient_suite():
    """Finite differences of both potentials at 10^4 samples, step 1e-5."""
    rng = np.random.default_rng(2025)
    h = 1e-5
    per_dim = 10_000 // len(DIMS)
    worst_lse = 0.0
    worst_gauge = 0.0
    for d in DIMS:
        Z = rng.uniform(-5, 5, size=(per_dim, d))
        eye = np.eye(d)
        fd = (
            log_sum_exp_array(Z[:, None, :] + h * eye[None])
            - log_sum_exp_array(Z[:, None, :] - h * eye[None])
        ) / (2 * h)
        worst_lse = max(worst_lse, float(np.abs(fd - softmax_array(Z)).max()))

        Y = _simplex(rng, per_dim, d, 0.01)
        V = rng.standard_normal((per_dim, d))
        V -= V.mean(axis=-1, keepdims=True)
        V /= np.linalg.norm(V, axis=-1, keepdims=True)
        fd_dir = (
            neg_entropy_array(Y + h * V) - neg_entropy_array(Y - h * V)
        ) / (2 * h)
        pairing = np.sum(zero_mean_array(np.log(Y)) * V, axis=-1)
        worst_gauge = max(worst_gauge, float(np.abs(fd_dir - pairing).max()))
    ok = worst_lse <= 1e-6 and worst_gauge <= 1e-6
    _verdict(
        2,
        "gradient suite at 10^4 samples",
        ok,
        f"lse_fd<={worst_lse:.2e}, gauge_fd<={worst_gauge:.2e} (tol 1e-6)",
    )


def test_criterion_3_gauge_suite():
    """Round trips of the zero-mean gauge plus the d=2 closed form."""
    rng = np.random.default_rng(2026)
    worst_fwd = 0.0
    worst_bwd = 0.0
    for d in DIMS:
        Y = _simplex(rng, 2500, d, 1e-4)
        back = softmax_array(zero_mean_array(np.log(Y)))
        worst_fwd = max(worst_fwd, float(np.abs(back - Y).max()))
        Z = rng.uniform(-10, 10, size=(2500, d))
        rep = zero_mean_array(np.log(softmax_array(Z)))
        worst_bwd = max(worst_bwd, float(np.abs(rep - zero_mean_array(Z)).max()))

    worst_d2 = 0.0
    for p in np.concatenate([[0.1, 0.3, 0.5, 0.7, 0.9], rng.uniform(0.05, 0.95, 200)]):
        half = 0.5 * np.log(p / (1.0 - p))
        got = grad_potential([p, 1.0 - p]).z0
        worst_d2 = max(worst_d2, float(np.abs(got - [half, -half]).max()))

    ok = worst_fwd <= 1e-12 and worst_bwd <= 1e-9 and worst_d2 <= 1e-15
    _verdict(
        3,
        "gauge suite: softmax o Pi = id, Pi o softmax = centered z, d=2 closed form",
        ok,
        f"fwd<={worst_fwd:.2e} (1e-12), bwd<={worst_bwd:.2e} (1e-9), "
        f"d2<={worst_d2:.2e} (1e-15)",
    )


def _random_tangent(rng, d):
    dy = rng.standard_normal(d)
    dy -= dy.mean()
    return CollarTangent(rng.standard_normal(), dy, rng.standard_normal(d))


def test_criterion_4_form_suite():
    """Coordinate-formula oracles for alpha, d(alpha), omega_q at 100 points."""
    rng = np.random.default_rng(2027)
    worst_coord = 0.0
    worst_fd = 0.0
    worst_shift = 0.0
    for k in range(100):
        d = 2 if k % 2 == 0 else 3
        r = float(rng.uniform(-2, 2))
        y = _simplex(rng, 1, d, 1e-3)[0]
        z = rng.uniform(-5, 5, size=d)
        point = CollarPoint(r, y, z)
        v, w = _random_tangent(rng, d), _random_tangent(rng, d)

        if d == 2:
            delta = z[0] - z[1]
            alpha_oracle = delta * v.dy[0]
            omega_oracle = (
                v.dr * delta * w.dy[0]
                - w.dr * delta * v.dy[0]
                + r * r * ((v.dz[0] - v.dz[1]) * w.dy[0] - (w.dz[0] - w.dz[1]) * v.dy[0])
            )
            worst_coord = max(
                worst_coord,
                abs(alpha_pair(point, v) - alpha_oracle),
                abs(omega_q_pair(point, v, w) - omega_oracle),
            )
        else:
            du, dv_ = v.dy[0], v.dy[1]
            alpha_oracle = (z[0] - z[2]) * du + (z[1] - z[2]) * dv_
            worst_coord = max(worst_coord, abs(alpha_pair(point, v) - alpha_oracle))

        worst_fd = max(
            worst_fd, validate_dalpha_by_finite_differences(point, v, w, h=1e-5)
        )

        shift = CollarTangent.bias_shift(d)
        rep = omega_q_matrix(point)
        coords = np.concatenate([np.zeros(d), np.ones(d)])
        scale = max(float(np.abs(rep.matrix).max()), 1.0)
        worst_shift = max(
            worst_shift,
            abs(alpha_pair(point, shift)),
            abs(dalpha_pair(shift, w)),
            float(np.max(np.abs(rep.matrix @ coords))) / scale,
        )

    ok = worst_coord <= 1e-12 and worst_fd <= 1e-6 and worst_shift <= 1e-12
    _verdict(
        4,
        "form suite: coordinate formulas, FD exterior derivative, shift kernel",
        ok,
        f"coord<={worst_coord:.2e} (1e-12), fd<={worst_fd:.2e} (1e-6), "
        f"shift<={worst_shift:.2e}",
    )


def test_criterion_5_rank_table():
    """d=2 ranks across (r, Delta) in {0, +-0.5, +-1}^2, two procedures."""
    mismatches = []
    for r in (0.0, 0.5, -0.5, 1.0, -1.0):
        for delta in (0.0, 0.5, -0.5, 1.0, -1.0):
            point = CollarPoint(r, [0.5, 0.5], [delta / 2, -delta / 2])
            rep = omega_q_matrix(point)
            oracle = pivoted_elimination_rank(rep.matrix)
            expected = 0 if (r == 0.0 and delta == 0.0) else 2
            if not (rep.rank == oracle == expected):
                mismatches.append((r, delta, rep.rank, oracle, expected))
    _verdict(
        5,
        "d=2 rank table matches the elimination oracle exactly",
        not mismatches,
        f"mismatches={mismatches}" if mismatches else "25/25 agree",
    )


def test_criterion_6_seam_diagnostics():
    """Jet pairing on the seam, two-class closed form, off-seam positivity."""
    rng = np.random.default_rng(2028)

    worst_jet = 0.0
    for _ in range(1000):
        d = int(rng.choice((2, 3, 5)))
        z = rng.uniform(-5, 5, size=d)
        point = CollarPoint(0.0, softmax(z), z)
        diag = seam_diagnostics(point, rng.standard_normal(d))
        worst_jet = max(worst_jet, abs(diag.jet_pairing))

    worst_closed = 0.0
    for delta in np.concatenate([[0.0, 1.0, -1.0], rng.uniform(-6, 6, 200)]):
        z = np.array([delta / 2, -delta / 2])
        point = CollarPoint(0.0, softmax(z), z)
        diag = seam_diagnostics(point, [1.0, -1.0])
        s = two_class_sigmoid(float(delta))
        worst_closed = max(worst_closed, abs(diag.alpha_on_tangent - 2 * delta * s * (1 - s)))

    min_off_gap = np.inf
    n_off = 0
    while n_off < 1000:
        d = int(rng.choice((2, 3, 5)))
        z = rng.uniform(-5, 5, size=d)
        y = _simplex(rng, 1, d, 1e-3)[0]
        if np.max(np.abs(y - softmax(z).values)) < 1e-3:
            continue
        diag = seam_diagnostics(CollarPoint(0.0, y, z), rng.standard_normal(d))
        min_off_gap = min(min_off_gap, diag.gap)
        n_off += 1

    ok = worst_jet <= 1e-10 and worst_closed <= 1e-12 and min_off_gap > 0.0
    _verdict(
        6,
        "seam diagnostics: jet pairing, 2*Delta*sigma'(Delta), off-seam gap > 0",
        ok,
        f"jet<={worst_jet:.2e} (1e-10), closed<={worst_closed:.2e} (1e-12), "
        f"off_gap>={min_off_gap:.2e}",
    )


def test_criterion_7_flow_suite():
    """100 seeded problems: convergence, monotone gap, shift invariance."""
    rng = np.random.default_rng(2029)
    all_converged = True
    worst_increase = 0.0
    worst_shift = 0.0
    for _ in range(100):
        d = int(rng.integers(2, 6))
        z = rng.uniform(-4, 4, size=d)
        y0 = _simplex(rng, 1, d, 1e-3)[0]
        trace = flow_to_equilibrium(y0, z, tol=1e-8, max_steps=1_000_000)
        all_converged &= trace.converged and trace.final_gap <= 1e-8
        gaps = trace.gaps()
        worst_increase = max(
            worst_increase, float(np.max(np.diff(gaps), initial=-np.inf))
        )
        shifted = flow_to_equilibrium(y0, z + 3.5, tol=1e-8, max_steps=1_000_000)
        if len(shifted.states) != len(trace.states):
            worst_shift = np.inf
        else:
            worst_shift = max(
                worst_shift,
                max(
                    float(np.max(np.abs(a.y.values - b.y.values)))
                    for a, b in zip(trace.states, shifted.states)
                ),
            )
    ok = all_converged and worst_increase <= 1e-12 and worst_shift <= 1e-12
    _verdict(
        7,
        "flow suite over 100 problems (tol 1e-8, max 10^6 steps)",
        ok,
        f"converged={all_converged}, max_gap_increase={worst_increase:.2e}, "
        f"shift_drift<={worst_shift:.2e}",
    )


def test_criterion_8_figure_reproduction():
    """Fig 1 zero level tracks the seam; Fig 2 sees only logit differences."""
    ds = two_class_grid()  # default resolution 201
    res = ds.metadata["parameters"]["resolution"]
    gap = ds.column("gap").reshape(res)
    deltas = ds.column("delta").reshape(res)[:, 0]
    ps = ds.column("p").reshape(res)[0, :]
    cell = ps[1] - ps[0]
    dev = np.max(np.abs(ps[np.argmin(gap, axis=1)] - sigmoid_array(deltas)))

    base = three_class_grid()
    shifted = three_class_grid(shift=9.0)
    shift_dev = float(np.abs(shifted.rows - base.rows).max())
    y = base.rows[:, 2:5]
    inside = bool(np.all(y > 0.0) and np.all(y < 1.0))

    ok = dev <= cell and shift_dev <= 1e-12 and inside
    _verdict(
        8,
        "figure reproduction: seam tracking and bias-shift invariance",
        ok,
        f"seam_dev={dev:.4f} (cell {cell:.4f}), shift_dev={shift_dev:.2e}, "
        f"strictly_inside={inside}",
    )


def test_criterion_9_cli_determinism(tmp_path):
    """Identical command lines with fixed seeds give byte-identical CSV."""
    commands = [
        ["figure", "two-class", "--seed", "5"],
        ["figure", "three-class", "--seed", "5"],
        ["flow", "--dim", "4", "--seed", "5"],
    ]
    all_same = True
    for i, cmd in enumerate(commands):
        paths = [tmp_path / f"run{i}_{j}.csv" for j in range(2)]
        for p in paths:
            code = cli_main([*cmd, "--out", str(p)])
            assert code == 0
        all_same &= paths[0].read_bytes() == paths[1].read_bytes()
    _verdict(
        9,
        "repeated CLI runs with fixed seed are byte-identical",
        all_same,
        f"{len(commands)} commands x 2 runs",
    )
