"""Dual potentials on the probability simplex and the gap between them.

The two potentials are negative entropy ``phi(y) = sum_i y_i log y_i`` on
the open simplex and its convex conjugate log-sum-exp
``phi*(z) = log sum_i exp(z_i)`` on logit space.  Their gradients invert
each other up to the constant-shift (gauge) freedom of logits:

    y = grad phi*(z) = softmax(z)
    z = grad phi(y)  = log y + c*1      (any c in R)

The Fenchel-Young gap ``phi(y) + phi*(z) - <z, y>`` equals
``KL(y || softmax(z))`` and is the quantitative distance to the seam, the
locus where the two descriptions agree.  Everything downstream (form
evaluation, rank diagnostics, replicator flows, figures) is built on the
functions here.

Value types (:class:`Probabilities`, :class:`Logits`, :class:`LogitClass`)
validate their invariants at construction and are immutable; the pointwise
operations accept either the value type or a plain sequence.  Batched
variants operating on ``(..., d)`` arrays carry an ``_array`` suffix and
are what the grid/verification layers use.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "SEAM_TOL_DEFAULT",
    "Probabilities",
    "Logits",
    "LogitClass",
    "GapReport",
    "log_sum_exp",
    "neg_entropy",
    "softmax",
    "grad_potential",
    "fenchel_young_gap",
    "temperature_softmax",
    "two_class_delta",
    "two_class_sigmoid",
    "log_sum_exp_array",
    "log_softmax_array",
    "softmax_array",
    "neg_entropy_array",
    "zero_mean_array",
    "sigmoid_array",
    "kl_gap_array",
]

#: Default tolerance (nats) below which a Fenchel-Young gap counts as "on
#: the seam".  Equality is exact in real arithmetic; in float64 this sits
#: far above rounding noise for d up to a few hundred.
SEAM_TOL_DEFAULT = 1e-9

_SUM_TOL = 1e-12
_MEAN_TOL = 1e-12
_GAP_CLAMP = -1e-12
_UNDERFLOW_FLOOR = 1e-300

VectorLike = Sequence[float] | np.ndarray


def _as_vector(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"{what} must be a 1-D vector, got shape {arr.shape}")
    if arr.size < 2:
        raise DimensionError(f"{what} needs d >= 2 entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} must be finite everywhere")
    return arr


class Probabilities:
    """A point in the open simplex: strictly positive entries summing to 1.

    Construction rejects nonpositive entries outright (no clamping: a
    silently clamped entry would corrupt every distance-to-seam number
    computed from it), requires the raw sum to be within 1e-12 of 1, and
    then renormalizes exactly by dividing by the float sum.
    """

    __slots__ = ("values",)

    values: np.ndarray

    def __init__(self, values: VectorLike):
        v = _as_vector(values, "probabilities")
        if np.any(v <= 0.0):
            raise DomainError(
                "probabilities must be strictly positive (open simplex); "
                f"min entry {v.min():g}"
            )
        s = float(v.sum())
        if abs(s - 1.0) > _SUM_TOL:
            raise DomainError(f"probabilities must sum to 1 within 1e-12, got {s!r}")
        v = v / s
        v.flags.writeable = False
        self.values = v

    @property
    def d(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"Probabilities({self.values.tolist()!r})"


class Logits:
    """A raw logit vector: any finite point in R^d, d >= 2.

    The gauge freedom z -> z + c*1 is deliberately left visible here;
    :class:`LogitClass` holds the canonical zero-mean representative.
    """

    __slots__ = ("values",)

    values: np.ndarray

    def __init__(self, values: VectorLike):
        v = _as_vector(values, "logits")
        v = v.copy()
        v.flags.writeable = False
        self.values = v

    @property
    def d(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"Logits({self.values.tolist()!r})"


class LogitClass:
    """The zero-mean representative of a logit class [z] = z mod c*1.

    Two raw logit vectors differing by a constant shift map to the same
    class; comparisons between classes go through the representative.
    """

    __slots__ = ("z0",)

    z0: np.ndarray

    def __init__(self, values: VectorLike):
        v = _as_vector(values, "logit class representative")
        m = float(v.mean())
        if abs(m) > _MEAN_TOL:
            raise DomainError(
                f"representative must have zero mean within 1e-12, got mean {m!r}; "
                "use LogitClass.from_logits to center a raw vector"
            )
        v = v - v.mean()
        v.flags.writeable = False
        self.z0 = v

    @classmethod
    def from_logits(cls, z: Logits | VectorLike) -> "LogitClass":
        v = _coerce_logits(z).values
        return cls(v - v.mean())

    @property
    def d(self) -> int:
        return self.z0.size

    def isclose(self, other: "LogitClass", tol: float = 1e-9) -> bool:
        """Entrywise agreement of the representatives within ``tol``."""
        if other.d != self.d:
            return False
        return bool(np.max(np.abs(self.z0 - other.z0)) <= tol)

    def __repr__(self) -> str:
        return f"LogitClass({self.z0.tolist()!r})"


@dataclass(frozen=True)
class GapReport:
    """Fenchel-Young gap in nats plus the seam-membership verdict."""

    gap: float
    on_seam: bool


def _coerce_logits(z: Logits | VectorLike) -> Logits:
    return z if isinstance(z, Logits) else Logits(z)


def _coerce_probabilities(y: Probabilities | VectorLike) -> Probabilities:
    return y if isinstance(y, Probabilities) else Probabilities(y)


# ---------------------------------------------------------------------------
# Batched kernels on (..., d) arrays.  The typed operations below delegate
# to these, so there is exactly one implementation of each formula.
# ---------------------------------------------------------------------------


def log_sum_exp_array(z: np.ndarray, axis: int = -1) -> np.ndarray:
    """log sum_i exp(z_i) along ``axis``, with max-subtraction.

    Safe for entries up to +-1e6: the shifted exponents never overflow
    and the subtracted maximum is added back outside the log.
    """
    z = np.asarray(z, dtype=float)
    m = np.max(z, axis=axis, keepdims=True)
    out = np.log(np.sum(np.exp(z - m), axis=axis)) + np.squeeze(m, axis=axis)
    return out


def log_softmax_array(z: np.ndarray, axis: int = -1) -> np.ndarray:
    """z - LSE(z), computed without exponentiating and re-logging."""
    z = np.asarray(z, dtype=float)
    return z - np.expand_dims(log_sum_exp_array(z, axis=axis), axis)


def softmax_array(z: np.ndarray, axis: int = -1) -> np.ndarray:
    """exp(z_i - max) / sum_j exp(z_j - max).

    The max-subtracted form keeps constant shifts exact when the shifted
    entries are exactly representable (z and z + c*1 then produce the
    same floats), which exp(z - LSE(z)) does not.
    """
    z = np.asarray(z, dtype=float)
    e = np.exp(z - np.max(z, axis=axis, keepdims=True))
    return e / np.sum(e, axis=axis, keepdims=True)


def neg_entropy_array(y: np.ndarray, axis: int = -1) -> np.ndarray:
    """sum_i y_i log y_i; requires strictly positive input."""
    y = np.asarray(y, dtype=float)
    return np.sum(y * np.log(y), axis=axis)


def zero_mean_array(z: np.ndarray, axis: int = -1) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return z - np.mean(z, axis=axis, keepdims=True)


def sigmoid_array(delta: np.ndarray) -> np.ndarray:
    """Elementwise stable sigmoid; the two-class seam curve p = sigma(Delta)."""
    delta = np.asarray(delta, dtype=float)
    out = np.empty_like(delta)
    pos = delta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-delta[pos]))
    e = np.exp(delta[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def kl_gap_array(z: np.ndarray, y: np.ndarray, axis: int = -1) -> np.ndarray:
    """KL(y || softmax(z)) = sum_i y_i (log y_i - log_softmax(z)_i).

    This is the numerically safer of the two equal expressions for the
    Fenchel-Young gap: the three-term form cancels catastrophically for
    extreme logits, the KL form never re-exponentiates.  No clamping is
    applied here; scalar callers clamp rounding-level negatives.
    """
    y = np.asarray(y, dtype=float)
    return np.sum(y * (np.log(y) - log_softmax_array(z, axis=axis)), axis=axis)


# ---------------------------------------------------------------------------
# Pointwise operations
# ---------------------------------------------------------------------------


def log_sum_exp(z: Logits | VectorLike) -> float:
    """The convex potential phi*(z) = log sum_i exp(z_i), in nats."""
    return float(log_sum_exp_array(_coerce_logits(z).values))


def neg_entropy(y: Probabilities | VectorLike) -> float:
    """The convex potential phi(y) = sum_i y_i log y_i, in [-log d, 0)."""
    return float(neg_entropy_array(_coerce_probabilities(y).values))


def softmax(z: Logits | VectorLike) -> Probabilities:
    """grad phi*(z): exp(z_i - LSE(z)) entrywise.

    Invariant under z -> z + c*1 and always lands in the open simplex.
    """
    return Probabilities(softmax_array(_coerce_logits(z).values))


def grad_potential(y: Probabilities | VectorLike) -> LogitClass:
    """The zero-mean gauge Pi(y) = log y - mean(log y) * 1.

    This is the canonical inverse of softmax modulo constant shifts:
    softmax(Pi(y)) = y to within rounding.  Entries below 1e-300 are
    rejected (the logs would be meaningless at that magnitude).
    """
    y = _coerce_probabilities(y)
    if float(y.values.min()) < _UNDERFLOW_FLOOR:
        raise DomainError(
            f"probability entry below {_UNDERFLOW_FLOOR:g}: log underflows"
        )
    return LogitClass(zero_mean_array(np.log(y.values)))


def fenchel_young_gap(
    z: Logits | VectorLike,
    y: Probabilities | VectorLike,
    seam_tol: float = SEAM_TOL_DEFAULT,
) -> GapReport:
    """Distance to the seam: phi(y) + phi*(z) - <z, y> = KL(y || softmax(z)).

    Computed in the KL form with log_softmax = z - LSE(z).  The result is
    nonnegative in exact arithmetic; rounding-level negatives (above
    -1e-12) are clamped to 0, anything below that indicates a bug and
    raises.  ``on_seam`` is True when the gap is at most ``seam_tol``.
    """
    z = _coerce_logits(z)
    y = _coerce_probabilities(y)
    if z.d != y.d:
        raise DimensionError(f"logits have d={z.d} but probabilities have d={y.d}")
    gap = float(kl_gap_array(z.values, y.values))
    if gap < 0.0:
        if gap < _GAP_CLAMP:
            raise DomainError(
                f"gap {gap!r} is negative beyond rounding tolerance; "
                "inputs violate the type invariants"
            )
        gap = 0.0
    return GapReport(gap=gap, on_seam=gap <= seam_tol)


def temperature_softmax(z: Logits | VectorLike, r: float) -> Probabilities:
    """softmax(z / r) for temperature r > 0; r = 1 is plain softmax.

    The fold r = 0 is not a valid temperature and raises.
    """
    if not (isinstance(r, (int, float)) and math.isfinite(r)) or r <= 0.0:
        raise DomainError(f"temperature must be a positive finite real, got {r!r}")
    return Probabilities(softmax_array(_coerce_logits(z).values / float(r)))


def two_class_delta(z: Logits | VectorLike) -> float:
    """The single coordinate Delta = z_1 - z_2 of a two-class problem."""
    z = _coerce_logits(z)
    if z.d != 2:
        raise DimensionError(f"two-class reduction requires d=2, got d={z.d}")
    return float(z.values[0] - z.values[1])


def two_class_sigmoid(delta: float) -> float:
    """sigma(Delta) = 1 / (1 + exp(-Delta)), evaluated without overflow."""
    delta = float(delta)
    if not math.isfinite(delta):
        raise DomainError(f"delta must be finite, got {delta!r}")
    if delta >= 0.0:
        return 1.0 / (1.0 + math.exp(-delta))
    e = math.exp(delta)
    return e / (1.0 + e)
