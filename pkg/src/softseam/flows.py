"""Time evolution on the screen.

Two flows: the bias shift z -> z + c*1, which moves logit representatives
without changing anything softmax can see, and the replicator flow

    dy_i/dt = y_i (f_i - <y, f>),      f_i = z_i - log y_i,

whose unique interior equilibrium is softmax(z).  This fitness makes the
Fenchel-Young gap KL(y || softmax(z)) an exact Lyapunov function:
d/dt KL = -Var_y(log(y/softmax(z))) <= 0, strict off the equilibrium.
Constants added to z cancel in f_i - <y, f>, so the whole flow is
invariant under bias shifts, not just its endpoint.

Integration is explicit RK4 with exact renormalization after each step.
A step whose stages or result leave the open simplex raises
:class:`~softseam.errors.StepRejection` carrying a halved step size; the
driver also rejects steps that fail to decrease the gap, so recorded
traces are monotone by construction.
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
    softmax,
)
from .errors import DomainError, StepRejection

__all__ = [
    "DT_CAP_DEFAULT",
    "FlowState",
    "FlowTrace",
    "bias_shift_flow",
    "replicator_field",
    "replicator_step",
    "flow_to_equilibrium",
]

DT_CAP_DEFAULT = 0.1
_DT_INITIAL = 0.01
_DT_FLOOR = 1e-14
_TRACE_BUFFER_MAX = 2000
_TRACE_MAX_STATES = 1000


@dataclass(frozen=True)
class FlowState:
    """A snapshot (t, y) of the flow."""

    t: float
    y: Probabilities


@dataclass(frozen=True)
class FlowTrace:
    """Recorded trajectory of a replicator run.

    ``states`` holds at most 1000 evenly thinned snapshots, always
    including the first and last.  ``final_gap`` is KL(y(T) || target) in
    nats.  ``converged`` is False when the step budget ran out first; the
    trace then still carries the last state reached.
    """

    states: list[FlowState]
    target: Probabilities
    final_gap: float
    converged: bool = True
    steps_taken: int = 0

    def gaps(self) -> np.ndarray:
        """KL(y || target) at each recorded state."""
        t_log = np.log(self.target.values)
        return np.array(
            [
                float(np.sum(s.y.values * (np.log(s.y.values) - t_log)))
                for s in self.states
            ]
        )


def bias_shift_flow(z: Logits | VectorLike, c: float) -> Logits:
    """Flow along the distinguished screen direction: z + c*1.

    softmax and the logit class are unchanged; composing flows adds the
    shift constants.
    """
    c = float(c)
    if not math.isfinite(c):
        raise DomainError(f"shift must be finite, got {c!r}")
    return Logits(_coerce_logits(z).values + c)


def replicator_field(y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Right-hand side y_i (f_i - <y, f>) with fitness f = z - log y."""
    f = z - np.log(y)
    return y * (f - float(np.dot(y, f)))


def _rk4_raw(y: np.ndarray, z: np.ndarray, dt: float) -> np.ndarray:
    """One RK4 step on raw arrays; raises StepRejection if any stage or
    the result leaves the open simplex."""

    def stage(yk: np.ndarray) -> np.ndarray:
        if np.any(yk <= 0.0):
            raise StepRejection(
                f"stage left the open simplex at dt={dt:g}", suggested_dt=dt / 2
            )
        return replicator_field(yk, z)

    k1 = stage(y)
    k2 = stage(y + 0.5 * dt * k1)
    k3 = stage(y + 0.5 * dt * k2)
    k4 = stage(y + dt * k3)
    y_new = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if np.any(y_new <= 0.0):
        raise StepRejection(
            f"step left the open simplex at dt={dt:g}", suggested_dt=dt / 2
        )
    return y_new / y_new.sum()


def replicator_step(
    y: Probabilities | VectorLike,
    z: Logits | VectorLike,
    dt: float,
    dt_cap: float = DT_CAP_DEFAULT,
) -> Probabilities:
    """One RK4 step of the replicator flow, exactly renormalized.

    ``dt`` must be positive and at most ``dt_cap``.  At y = softmax(z)
    the field vanishes, so the point is fixed up to rounding.
    """
    dt = float(dt)
    if not math.isfinite(dt) or dt <= 0.0:
        raise DomainError(f"dt must be positive and finite, got {dt!r}")
    if dt > dt_cap:
        raise DomainError(f"dt={dt!r} exceeds the cap {dt_cap!r}")
    y = _coerce_probabilities(y)
    z = _coerce_logits(z)
    if y.d != z.d:
        raise DomainError(f"y has d={y.d} but z has d={z.d}")
    return Probabilities(_rk4_raw(y.values, z.values, dt))


def _kl_to_target(y: np.ndarray, target_log: np.ndarray) -> float:
    # measured against the recorded target's own floats, so a state equal
    # to the target reports exactly 0 and matches FlowTrace.gaps()
    return max(float(np.sum(y * (np.log(y) - target_log))), 0.0)


def flow_to_equilibrium(
    y0: Probabilities | VectorLike,
    z: Logits | VectorLike,
    tol: float = 1e-8,
    max_steps: int = 1_000_000,
    dt_cap: float = DT_CAP_DEFAULT,
) -> FlowTrace:
    """Integrate the replicator flow until KL(y || softmax(z)) <= tol.

    Adaptive stepping: halve on rejection (a stage leaving the simplex or
    a step that fails to decrease the gap), grow 1.2x on success up to
    ``dt_cap``.  Every attempted step counts against ``max_steps``.
    Exhausting the budget is not an error: the trace comes back with
    ``converged=False`` and the last state reached.
    """
    if tol < 1e-12:
        raise DomainError(f"tol must be at least 1e-12, got {tol!r}")
    if max_steps < 0:
        raise DomainError(f"max_steps must be nonnegative, got {max_steps!r}")
    y0 = _coerce_probabilities(y0)
    z = _coerce_logits(z)
    if y0.d != z.d:
        raise DomainError(f"y0 has d={y0.d} but z has d={z.d}")

    target = softmax(z)
    target_log = np.log(target.values)
    zv = z.values
    yv = y0.values
    gap = _kl_to_target(yv, target_log)
    t = 0.0

    buffer: list[tuple[float, np.ndarray]] = [(t, yv)]
    stride = 1
    accepted = 0

    if gap <= tol:
        return FlowTrace(
            states=[FlowState(t=0.0, y=y0)],
            target=target,
            final_gap=gap,
            converged=True,
            steps_taken=0,
        )

    dt = min(_DT_INITIAL, dt_cap)
    converged = False
    steps = 0
    while steps < max_steps:
        steps += 1
        try:
            y_new = _rk4_raw(yv, zv, dt)
        except StepRejection as rej:
            dt = rej.suggested_dt
            if dt < _DT_FLOOR:
                break
            continue
        gap_new = _kl_to_target(y_new, target_log)
        if gap_new > gap:
            # RK4 overshot: treat as a rejection so the recorded gap
            # column stays nonincreasing.
            dt /= 2
            if dt < _DT_FLOOR:
                break
            continue
        yv = y_new
        t += dt
        gap = gap_new
        accepted += 1
        if accepted % stride == 0:
            buffer.append((t, yv))
            if len(buffer) >= _TRACE_BUFFER_MAX:
                buffer = buffer[::2]
                stride *= 2
        dt = min(dt * 1.2, dt_cap)
        if gap <= tol:
            converged = True
            break

    if buffer[-1][0] != t:
        buffer.append((t, yv))
    if len(buffer) > _TRACE_MAX_STATES:
        idx = np.unique(
            np.round(np.linspace(0, len(buffer) - 1, _TRACE_MAX_STATES)).astype(int)
        )
        buffer = [buffer[i] for i in idx]

    states = [FlowState(t=ti, y=Probabilities(yi)) for ti, yi in buffer]
    return FlowTrace(
        states=states,
        target=target,
        final_gap=gap,
        converged=converged,
        steps_taken=steps,
    )
