"""Nonlinear bidimensional integrate-and-fire models.

The family covered here is

    dv/dt = F(v) - w + I(t)
    dw/dt = a (b v - w)

with a spike emitted when ``v`` reaches a cutoff and the reset
``v <- c, w <- w + d``. ``F`` is strictly convex and grows super-linearly,
so ``v`` blows up in finite time on spiking orbits.

This module holds the model and input-current descriptions, the analytic
nonlinearities, the fixed-point analysis of the autonomous system, the
invariant spiking zone and a coarse a-priori bound on thresholded orbits.
Everything is pure; instances are immutable.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import cached_property

from .exceptions import AnalysisError, ModelRangeError

EXP_OVERFLOW_GUARD = 700.0

MODEL_KINDS = (
    "quadratic-izhikevich",
    "canonical-quadratic",
    "quartic",
    "exponential",
    "pure-exponential",
)

# number of coefficients expected per kind
_N_COEFFS = {
    "quadratic-izhikevich": 3,
    "canonical-quadratic": 0,
    "quartic": 1,
    "exponential": 0,
    "pure-exponential": 0,
}

_GROWTH = {
    "quadratic-izhikevich": 2.0,
    "canonical-quadratic": 2.0,
    "quartic": 4.0,
    "exponential": "exponential",
    "pure-exponential": "exponential",
}


@dataclass(frozen=True)
class ModelSpec:
    """A member of the model family.

    Parameters
    ----------
    kind : str
        One of :data:`MODEL_KINDS`. ``quadratic-izhikevich`` uses
        ``F(v) = p2 v**2 + p1 v + p0`` with ``coefficients = (p2, p1, p0)``;
        ``canonical-quadratic`` is ``v**2``; ``quartic`` is ``v**4 + alpha v``
        with ``coefficients = (alpha,)``; ``exponential`` is ``exp(v) - v``.
        ``pure-exponential`` (``exp(v)``) exists for the one-dimensional
        blow-up reductions and is not a neuron model in its own right.
    a, b : float
        Adaptation rate and coupling, both non-negative.
    c, d : float
        Reset potential and spike-triggered adaptation increment.
    """

    kind: str
    coefficients: tuple = ()
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 1.0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}")
        coeffs = tuple(float(x) for x in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) != _N_COEFFS[self.kind]:
            raise ValueError(
                f"{self.kind} takes {_N_COEFFS[self.kind]} coefficients, got {len(coeffs)}"
            )
        if self.kind == "quadratic-izhikevich" and not coeffs[0] > 0:
            raise ValueError("quadratic coefficient p2 must be positive for convexity")
        for name in ("a", "b", "c", "d"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
        if self.a < 0 or self.b < 0:
            raise ValueError("a and b must be non-negative")
        if self.d < 0:
            raise ValueError("d must be non-negative")

    @classmethod
    def izhikevich(cls, a=0.02, b=0.19, c=-59.9, d=1.15, p2=0.04, p1=5.0, p0=140.0):
        """Quadratic model with Izhikevich's polynomial; defaults are the bursting set."""
        return cls("quadratic-izhikevich", (p2, p1, p0), a=a, b=b, c=c, d=d)

    @property
    def growth_exponent(self):
        """Power of the dominant term of F, or ``"exponential"``."""
        return _GROWTH[self.kind]

    @property
    def is_exponential(self):
        return self.growth_exponent == "exponential"

    # The three closures below are what the integrators call in their inner
    # loops; building them once avoids a kind dispatch per evaluation.

    @cached_property
    def F(self):
        kind = self.kind
        if kind == "quadratic-izhikevich":
            p2, p1, p0 = self.coefficients
            return lambda v: (p2 * v + p1) * v + p0
        if kind == "canonical-quadratic":
            return lambda v: v * v
        if kind == "quartic":
            (alpha,) = self.coefficients
            return lambda v: v * v * v * v + alpha * v
        if kind == "exponential":
            return lambda v: _guarded_exp(v) - v
        return _guarded_exp

    @cached_property
    def dF(self):
        kind = self.kind
        if kind == "quadratic-izhikevich":
            p2, p1, _ = self.coefficients
            return lambda v: 2.0 * p2 * v + p1
        if kind == "canonical-quadratic":
            return lambda v: 2.0 * v
        if kind == "quartic":
            (alpha,) = self.coefficients
            return lambda v: 4.0 * v * v * v + alpha
        if kind == "exponential":
            return lambda v: _guarded_exp(v) - 1.0
        return _guarded_exp

    @cached_property
    def d2F(self):
        kind = self.kind
        if kind == "quadratic-izhikevich":
            p2 = self.coefficients[0]
            return lambda v: 2.0 * p2
        if kind == "canonical-quadratic":
            return lambda v: 2.0
        if kind == "quartic":
            return lambda v: 12.0 * v * v
        return _guarded_exp

    def argmin_shifted(self, slope):
        """Minimiser of ``F(v) - slope * v``, i.e. the solution of ``F'(v) = slope``."""
        kind = self.kind
        if kind == "quadratic-izhikevich":
            p2, p1, _ = self.coefficients
            return (slope - p1) / (2.0 * p2)
        if kind == "canonical-quadratic":
            return slope / 2.0
        if kind == "quartic":
            (alpha,) = self.coefficients
            x = (slope - alpha) / 4.0
            return math.copysign(abs(x) ** (1.0 / 3.0), x)
        if kind == "exponential":
            return math.log1p(slope)
        if slope <= 0:
            raise AnalysisError(
                f"F(v) - {slope:g} v has no minimiser for the pure exponential (unbounded argmin)"
            )
        return math.log(slope)


def _guarded_exp(v):
    if v > EXP_OVERFLOW_GUARD:
        raise ModelRangeError(f"exp({v:g}) exceeds the overflow guard v <= {EXP_OVERFLOW_GUARD:g}")
    return math.exp(v)


def eval_F(model, v):
    """Evaluate the model nonlinearity at ``v``."""
    if not math.isfinite(v):
        raise ModelRangeError(f"v must be finite, got {v!r}")
    return model.F(v)


def eval_F_derivatives(model, v):
    """Return ``(F'(v), F''(v))``."""
    if not math.isfinite(v):
        raise ModelRangeError(f"v must be finite, got {v!r}")
    return model.dF(v), model.d2F(v)


# -- input currents ----------------------------------------------------------


@dataclass(frozen=True)
class InputCurrent:
    """Piecewise-constant drive ``I(t)``.

    ``values[k]`` holds on ``[jumps[k-1], jumps[k])`` with ``values[0]`` in
    force before the first jump; the current is right-continuous. The time
    derivative is zero away from the jumps and undefined at them, which is why
    integrators never let a step straddle a jump.
    """

    kind: str = "constant"
    jumps: tuple = ()
    values: tuple = (0.0,)

    def __post_init__(self):
        if self.kind not in ("constant", "piecewise-constant", "sum-of-steps"):
            raise ValueError(f"unknown current kind {self.kind!r}")
        jumps = tuple(float(t) for t in self.jumps)
        values = tuple(float(x) for x in self.values)
        if len(values) != len(jumps) + 1:
            raise ValueError("need exactly one more value than jump times")
        if any(t1 <= t0 for t0, t1 in zip(jumps, jumps[1:])):
            raise ValueError("jump times must be strictly increasing")
        if not all(math.isfinite(x) for x in values + jumps):
            raise ValueError("current values and jump times must be finite")
        if self.kind == "constant" and jumps:
            raise ValueError("a constant current has no jumps")
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value):
        return cls("constant", (), (value,))

    @classmethod
    def piecewise(cls, jumps, values):
        return cls("piecewise-constant", tuple(jumps), tuple(values))

    @classmethod
    def steps(cls, base, onsets, amplitudes):
        """``base + sum_k amplitudes[k] * H(t - onsets[k])``."""
        if len(onsets) != len(amplitudes):
            raise ValueError("onsets and amplitudes must have equal length")
        pairs = sorted(zip(onsets, amplitudes))
        jumps, values, level = [], [float(base)], float(base)
        for t, amp in pairs:
            level += amp
            if jumps and t == jumps[-1]:
                values[-1] = level
            else:
                jumps.append(t)
                values.append(level)
        return cls("sum-of-steps", tuple(jumps), tuple(values))

    @property
    def is_constant(self):
        return not self.jumps

    def value(self, t):
        if not self.jumps:
            return self.values[0]
        return self.values[bisect.bisect_right(self.jumps, t)]

    def derivative(self, t):
        return 0.0

    def next_jump(self, t):
        """First jump time strictly after ``t`` (``inf`` if none)."""
        k = bisect.bisect_right(self.jumps, t)
        return self.jumps[k] if k < len(self.jumps) else math.inf

    def lower_bound(self, t0=-math.inf, t1=math.inf):
        """Infimum ``I*`` of the current over ``[t0, t1]``."""
        if t1 < t0:
            raise ValueError("empty window")
        k0 = bisect.bisect_right(self.jumps, t0)
        k1 = bisect.bisect_right(self.jumps, t1)
        return min(self.values[k0 : k1 + 1])


# -- phase-plane analysis ----------------------------------------------------

NO_FIXED_POINT = "no-fixed-point"
UNIQUE_NONHYPERBOLIC = "unique-nonhyperbolic"
TWO_FIXED_POINTS = "two-fixed-points"


@dataclass(frozen=True)
class FixedPointAnalysis:
    """Fixed points of the autonomous system at constant current ``I``.

    ``v_plus`` is ``-inf`` when no fixed point exists so that the spiking
    zone test ``v >= v_plus`` degenerates correctly.
    """

    I: float
    m_b: float
    v_star_b: float
    regime: str
    v_minus: float | None = None
    v_plus: float = -math.inf
    v_minus_stability: str | None = None
    I_s: float | None = None

    @property
    def n_fixed_points(self):
        return {NO_FIXED_POINT: 0, UNIQUE_NONHYPERBOLIC: 1, TWO_FIXED_POINTS: 2}[self.regime]


def _bracket_root(g, v_from, direction, max_doublings=1100):
    """Expand ``[v_from, v_from + direction * 2**k]`` until ``g`` changes sign.

    ``g(v_from)`` must be negative.
    """
    step = 1.0
    for _ in range(max_doublings):
        v_to = v_from + direction * step
        try:
            if g(v_to) > 0:
                return (v_from, v_to) if direction > 0 else (v_to, v_from)
        except ModelRangeError:
            pass
        step *= 2.0
        if not math.isfinite(v_from + direction * step):
            break
    return None


def _solve_bracketed(g, dg, lo, hi, rtol=1e-12):
    """Bisection down to a tight bracket, then a few guarded Newton steps."""
    g_lo = g(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-6 * max(1.0, abs(mid)):
            break
        g_mid = g(mid)
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)
    for _ in range(200):
        slope = dg(v)
        v_new = v - g(v) / slope if slope != 0 else math.nan
        newton = lo <= v_new <= hi
        if not newton:
            v_new = 0.5 * (lo + hi)
        g_new = g(v_new)
        if g_new == 0:
            return v_new
        # keep the bracket consistent while polishing
        if (g_new > 0) == (g_lo > 0):
            lo = v_new
        else:
            hi = v_new
        scale = rtol * max(1.0, abs(v_new))
        converged = (newton and abs(v_new - v) <= scale) or hi - lo <= scale
        v = v_new
        if converged:
            break
    return v


def _stability_of_v_minus(model, I):
    a, b = model.a, model.b
    I_s = None
    try:
        v_star_a = model.argmin_shifted(a)
        I_s = b * v_star_a - model.F(v_star_a)
    except (AnalysisError, ModelRangeError):
        pass
    if b <= a:
        return "attractive", I_s
    if I_s is None:
        raise AnalysisError("stability boundary undefined for this model")
    return ("attractive" if I < I_s else "repulsive"), I_s


def analyze_fixed_points(model, I):
    """Classify the fixed points of the model under constant current ``I``.

    ``m_b`` is the minimum of ``F(v) - b v``. There is no fixed point when
    ``I > -m_b``, a single non-hyperbolic one when ``I == -m_b`` and two
    otherwise: ``v_minus`` (node or focus; stability decided by ``b`` versus
    ``a`` and by ``I`` against ``I_s = b v*(a) - F(v*(a))``) and the saddle
    ``v_plus``.
    """
    if not math.isfinite(I):
        raise AnalysisError("I must be finite")
    b = model.b
    v_star = model.argmin_shifted(b)
    m_b = model.F(v_star) - b * v_star
    gap = I + m_b
    tol = 1e-12 * max(1.0, abs(m_b), abs(I))
    if gap > tol:
        return FixedPointAnalysis(I=I, m_b=m_b, v_star_b=v_star, regime=NO_FIXED_POINT)
    if gap >= -tol:
        return FixedPointAnalysis(
            I=I,
            m_b=m_b,
            v_star_b=v_star,
            regime=UNIQUE_NONHYPERBOLIC,
            v_minus=v_star,
            v_plus=v_star,
        )

    F, dF = model.F, model.dF

    def g(v):
        return F(v) - b * v + I

    def dg(v):
        return dF(v) - b

    right = _bracket_root(g, v_star, +1)
    if right is None:
        raise AnalysisError("could not bracket the saddle fixed point")
    v_plus = _solve_bracketed(g, dg, *right)
    left = _bracket_root(g, v_star, -1)
    v_minus = _solve_bracketed(g, dg, *left) if left is not None else None
    stability, I_s = (None, None)
    if v_minus is not None:
        stability, I_s = _stability_of_v_minus(model, I)
    return FixedPointAnalysis(
        I=I,
        m_b=m_b,
        v_star_b=v_star,
        regime=TWO_FIXED_POINTS,
        v_minus=v_minus,
        v_plus=v_plus,
        v_minus_stability=stability,
        I_s=I_s,
    )


def in_spiking_zone(model, I_star, state, analysis=None):
    """Membership of ``state`` in the invariant spiking zone for ``I >= I_star``.

    The zone is ``{w <= b v}`` intersected with ``{v >= v_plus(I_star, b)}``
    when that saddle exists. A precomputed ``analysis`` can be passed to skip
    the root finding when testing many states.
    """
    if analysis is None:
        analysis = analyze_fixed_points(model, I_star)
    return state.w <= model.b * state.v and state.v >= analysis.v_plus


# -- a-priori bounds on thresholded orbits -----------------------------------


@dataclass(frozen=True)
class TrajectoryBounds:
    v_low: float
    v_high: float
    w_low: float
    w_high: float
    theta_independent: bool

    def contains(self, v, w, slack=0.0):
        return (
            self.v_low - slack <= v <= self.v_high + slack
            and self.w_low - slack <= w <= self.w_high + slack
        )


def _leftmost_level_crossing(model, level):
    """Smallest ``v`` with ``F(v) = level``, or ``None`` if F stays above it."""
    F = model.F
    if model.kind == "pure-exponential":
        return math.log(level) if level > 0 else None
    v_min = model.argmin_shifted(0.0)
    if F(v_min) >= level:
        return None

    def g(v):
        return F(v) - level

    bracket = _bracket_root(g, v_min, -1)
    if bracket is None:
        raise AnalysisError(f"could not bracket F(v) = {level:g} to the left")
    return _solve_bracketed(g, lambda v: model.dF(v), *bracket)


def estimate_trajectory_bounds(model, current, init_box, theta, window=(-math.inf, math.inf)):
    """Box containing every thresholded orbit started in ``init_box``.

    ``init_box = (v_m, v_M, w_m, w_M)``. The upper adaptation bound is
    ``max(w_M, b theta) + d``; the lower potential bound is the leftmost
    solution of ``F(v) = w_high - I*`` (or ``c``/``v_m`` when lower), and
    ``w_low = min(b v_low, w_m)``.
    """
    v_m, v_M, w_m, w_M = (float(x) for x in init_box)
    if not (v_m <= v_M and w_m <= w_M):
        raise AnalysisError("initial box is empty")
    if not theta > v_M:
        raise AnalysisError("cutoff must exceed the initial box")
    I_star = current.lower_bound(*window)
    w_high = max(w_M, model.b * theta) + model.d
    crossing = _leftmost_level_crossing(model, w_high - I_star)
    v_low = min(model.c, v_m)
    if crossing is not None:
        v_low = min(v_low, crossing)
    w_low = min(model.b * v_low, w_m)
    growth = model.growth_exponent
    theta_independent = growth == "exponential" or growth > 2.0
    return TrajectoryBounds(
        v_low=v_low, v_high=float(theta), w_low=w_low, w_high=w_high,
        theta_independent=theta_independent,
    )


__all__ = [
    "EXP_OVERFLOW_GUARD",
    "MODEL_KINDS",
    "ModelSpec",
    "InputCurrent",
    "FixedPointAnalysis",
    "TrajectoryBounds",
    "NO_FIXED_POINT",
    "UNIQUE_NONHYPERBOLIC",
    "TWO_FIXED_POINTS",
    "eval_F",
    "eval_F_derivatives",
    "analyze_fixed_points",
    "in_spiking_zone",
    "estimate_trajectory_bounds",
]
