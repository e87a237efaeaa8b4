"""Stepping schemes for thresholded blow-up neuron models.

Four schemes share one output format:

``euler``
    Fixed time step explicit Euler with first-exceedance spike detection.
``hybrid-fixed``
    Euler in time where ``|dv/dt| < M``; elsewhere Euler on the orbit
    equations with ``v`` as the independent variable,

        dT/dv = 1 / (F(v) - W + I(T)),   dW/dv = a (b v - W) / (F(v) - W + I(T)),

    using a fixed potential step. Upward phase-plane steps land exactly on
    the cutoff.
``hybrid-adaptive``
    Same branch structure with steps chosen from the local curvature so that
    each step's error is about ``epsilon``.
``oracle``
    Same branch structure, classical RK4 in each branch with step-doubling
    error control. Used as ground truth.

A run never lets a step straddle a jump of the input current or the
horizon ``t_end``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import (
    DivergenceError,
    InvertibilityError,
    OracleError,
    StepSizeError,
)
from .models import EXP_OVERFLOW_GUARD

SCHEMES = ("euler", "hybrid-fixed", "hybrid-adaptive", "oracle")
SPIKE_INTERP = ("first-exceedance", "linear")

TIME, PHASE = "time", "phase"
BRANCH_CODES = {"init": 0, TIME: 1, PHASE: 2, "reset": 3}
BRANCH_NAMES = {code: name for name, code in BRANCH_CODES.items()}

# A step shorter than this fraction of the nominal one is merged into the
# previous step instead of being taken on its own.
_SNAP = 1e-9


@dataclass(frozen=True)
class SimState:
    t: float
    v: float
    w: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.v) and math.isfinite(self.w)):
            raise DivergenceError(f"non-finite state {self!r}")


@dataclass(frozen=True)
class SolverConfig:
    """Scheme selector and its numerical parameters.

    Only the fields relevant to ``scheme`` are read. ``M`` is the
    vector-field magnitude above which the hybrid schemes integrate in the
    phase plane.
    """

    scheme: str = "hybrid-adaptive"
    theta: float = 30.0
    t_end: float = 1000.0
    M: float = 1.0
    dt: float = 0.01
    dv: float = 0.1
    epsilon: float = 0.01
    DT: float = 1.0
    DV: float = 1.0
    oracle_tol: float = 1e-10
    spike_interp: str = "first-exceedance"
    record_every: int = 0
    max_events: int = 1_000_000
    dt_min: float = 1e-12
    dv_min: float = 1e-12
    max_floored_steps: int = 10_000_000

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.spike_interp not in SPIKE_INTERP:
            raise ValueError(f"spike_interp must be one of {SPIKE_INTERP}")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        if not self.t_end >= 0:
            raise ValueError("t_end must be non-negative")
        for name in ("dt", "dv", "epsilon", "DT", "DV", "oracle_tol", "dt_min", "dv_min"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive")
        if not self.M > 0:
            raise ValueError("M must be positive")
        if self.record_every < 0 or self.max_events < 1 or self.max_floored_steps < 1:
            raise ValueError("record_every >= 0, max_events >= 1, max_floored_steps >= 1")

    def replace(self, **changes):
        values = asdict(self)
        values.update(changes)
        return SolverConfig(**values)

    def check_model(self, model):
        """Raise ``ValueError`` when the config is incompatible with ``model``."""
        if not model.c < self.theta:
            raise ValueError("reset potential c must lie below the cutoff theta")
        if self.scheme == "euler" and model.a > 0 and not self.dt * model.a < 1:
            raise ValueError(
                f"euler requires dt * a < 1 for monotone iterates in the spiking zone "
                f"(dt * a = {self.dt * model.a:g})"
            )


@dataclass
class SpikeTrain:
    """Spike events ``(spike_time, w_at_spike)`` plus run statistics."""

    events: list = field(default_factory=list)
    step_count: int = 0
    terminated_by: str = "horizon"
    final_state: SimState = None

    def __len__(self):
        return len(self.events)

    @property
    def times(self):
        return np.array([e[0] for e in self.events], dtype=float)

    @property
    def w_values(self):
        return np.array([e[1] for e in self.events], dtype=float)

    def first(self):
        return self.events[0] if self.events else None


@dataclass
class Trajectory:
    """Decimated samples ``(t, v, w, branch)``; branch codes in :data:`BRANCH_CODES`."""

    t: np.ndarray
    v: np.ndarray
    w: np.ndarray
    branch: np.ndarray

    def __len__(self):
        return len(self.t)

    def rows(self):
        for t, v, w, code in zip(self.t, self.v, self.w, self.branch):
            yield float(t), float(v), float(w), BRANCH_NAMES[int(code)]


class _Recorder:
    def __init__(self, every, init):
        self.every = every
        self.rows = []
        self._count = 0
        if every:
            self.rows.append((init.t, init.v, init.w, BRANCH_CODES["init"]))

    def step(self, t, v, w, branch):
        if self.every:
            self._count += 1
            if self._count % self.every == 0:
                self.rows.append((t, v, w, BRANCH_CODES[branch]))

    def reset(self, t, v, w):
        if self.every:
            self.rows.append((t, v, w, BRANCH_CODES["reset"]))

    def trajectory(self):
        if not self.rows:
            empty = np.empty(0)
            return Trajectory(empty, empty.copy(), empty.copy(), np.empty(0, dtype=np.int8))
        arr = np.array(self.rows, dtype=float)
        return Trajectory(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3].astype(np.int8))


# -- elementary steps --------------------------------------------------------


def euler_step(model, current, state, tau):
    """One explicit Euler step of length ``tau`` from ``state``."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if tau == 0:
        return state
    t, v, w = state.t, state.v, state.w
    a, b = model.a, model.b
    G = model.F(v) - w + current.value(t)
    v_new = v + tau * G
    w_new = w + tau * a * (b * v - w)
    if not (math.isfinite(v_new) and math.isfinite(w_new)):
        raise DivergenceError(f"euler step from {state!r} produced a non-finite state")
    return SimState(t + tau, v_new, w_new)


def phase_step(model, current, state, dv_signed):
    """One Euler step of the orbit equations with potential increment ``dv_signed``.

    The increment must have the sign of ``dv/dt`` so that time advances.
    """
    if dv_signed == 0:
        return state
    t, v, w = state.t, state.v, state.w
    G = model.F(v) - w + current.value(t)
    if G == 0:
        raise InvertibilityError(f"dv/dt vanishes at {state!r}")
    if (G > 0) != (dv_signed > 0):
        raise ValueError("dv_signed must have the sign of dv/dt so that time advances")
    dt = dv_signed / G
    w_new = w + dv_signed * model.a * (model.b * v - w) / G
    return SimState(t + dt, v + dv_signed, w_new)


def apply_reset(model, state):
    """Spike reset: ``v <- c``, ``w <- w + d``, time unchanged."""
    return SimState(state.t, model.c, state.w + model.d)


def second_derivatives_time(model, current, state):
    """``(v'', w'')`` along the exact flow at ``state`` (time as variable)."""
    v, w = state.v, state.w
    a, b = model.a, model.b
    G = model.F(v) - state.w + current.value(state.t)
    relax = a * (b * v - w)
    vpp = model.dF(v) * G - relax + current.derivative(state.t)
    wpp = a * (b * G - relax)
    return vpp, wpp


def second_derivatives_phase(model, current, state):
    """``(W'', T'')`` with respect to ``v`` along the orbit through ``state``."""
    v, W = state.v, state.w
    a, b = model.a, model.b
    G = model.F(v) - W + current.value(state.t)
    if G == 0:
        raise InvertibilityError(f"dv/dt vanishes at {state!r}")
    N = a * (b * v - W)
    dI = current.derivative(state.t)
    dF = model.dF(v)
    G2 = G * G
    G3 = G2 * G
    Wpp = a * b / G - a * N / G2 - N * dF / G2 + N * N / G3 - N * dI / G3
    Tpp = -(dF * G - N + dI) / G3
    return Wpp, Tpp


def adaptive_step(model, current, state, config):
    """Branch and step length of the fixed-precision hybrid scheme.

    Returns ``("time", dt)`` with ``dt = min(eps / max(|v''|, |w''|), DT)``
    when ``|dv/dt| < M`` and ``("phase", dv)`` with
    ``dv = min(eps / max(|W''|, |T''|), DV)`` otherwise. Zero curvature gives
    the cap; the result is floored at ``dt_min``/``dv_min``.
    """
    G = model.F(state.v) - state.w + current.value(state.t)
    if abs(G) < config.M:
        x, y = second_derivatives_time(model, current, state)
        branch, cap, floor = TIME, config.DT, config.dt_min
    else:
        x, y = second_derivatives_phase(model, current, state)
        branch, cap, floor = PHASE, config.DV, config.dv_min
    curvature = max(abs(x), abs(y))
    if not math.isfinite(curvature):
        raise StepSizeError(f"non-finite curvature at {state!r}")
    step = cap if curvature == 0 else min(config.epsilon / curvature, cap)
    return branch, max(step, floor)


# -- drivers -----------------------------------------------------------------


def _check_finite(t, v, w):
    if not (math.isfinite(v) and math.isfinite(w) and math.isfinite(t)):
        raise DivergenceError(f"solver produced a non-finite state at t={t!r}")
    if v > 1e300:
        raise DivergenceError(f"v={v:g} diverged without crossing the cutoff")


def _run_euler_family(model, current, init, config, adaptive):
    """Shared loop of the Euler, hybrid-fixed and hybrid-adaptive schemes."""
    config.check_model(model)
    F = model.F
    a, b, c, d = model.a, model.b, model.c, model.d
    theta, t_end = config.theta, config.t_end
    M = math.inf if config.scheme == "euler" else config.M
    linear = config.spike_interp == "linear"
    exp_guard = EXP_OVERFLOW_GUARD if model.is_exponential else math.inf

    t, v, w = init.t, init.v, init.w
    train = SpikeTrain()
    rec = _Recorder(config.record_every, init)
    next_jump = current.next_jump(t)
    I = current.value(t)
    floored = 0

    while t < t_end:
        limit = min(t_end, next_jump)
        if v >= theta:
            # only reachable from an initial condition above the cutoff
            train.events.append((t, w))
            v, w = c, w + d
            rec.reset(t, v, w)
            if len(train.events) >= config.max_events:
                train.terminated_by = "event-limit"
                break
            continue
        G = F(v) - w + I
        if adaptive:
            branch, step = adaptive_step(model, current, SimState(t, v, w), config)
            if step <= (config.dt_min if branch == TIME else config.dv_min):
                floored += 1
                if floored > config.max_floored_steps:
                    raise StepSizeError(f"step floor reached {floored} consecutive times at t={t:g}")
            else:
                floored = 0
        else:
            branch = TIME if abs(G) < M else PHASE
            step = config.dt if branch == TIME else config.dv

        if branch == TIME:
            h = step
            if t + h >= limit - _SNAP * h:
                h = limit - t
                t_new = limit
            else:
                t_new = t + h
            v_new = v + h * G
            w_new = w + h * a * (b * v - w)
        else:
            if G == 0:
                raise InvertibilityError(f"dv/dt vanishes at t={t:g}, v={v:g}")
            landing = False
            if G > 0:
                dvs = step
                if v + dvs >= theta:
                    dvs = theta - v
                    landing = True
            else:
                dvs = -step
            dt_phase = dvs / G
            if t + dt_phase >= limit - _SNAP * dt_phase:
                dvs = (limit - t) * G
                t_new = limit
                landing = False
            else:
                t_new = t + dt_phase
            v_new = theta if landing else v + dvs
            w_new = w + dvs * a * (b * v - w) / G

        train.step_count += 1
        # an overshoot past theta is reset before F is evaluated there again
        if exp_guard < v_new < theta:
            raise DivergenceError(f"v={v_new:g} passed the exponential overflow guard")
        _check_finite(t_new, v_new, w_new)

        if v_new >= theta:
            if linear and branch == TIME and v_new > v:
                frac = (theta - v) / (v_new - v)
                event = (t + frac * (t_new - t), w + frac * (w_new - w))
            else:
                event = (t_new, w_new)
            rec.step(t_new, v_new, w_new, branch)
            train.events.append(event)
            t, v, w = t_new, c, w_new + d
            rec.reset(t, v, w)
            if len(train.events) >= config.max_events:
                train.terminated_by = "event-limit"
                break
        else:
            t, v, w = t_new, v_new, w_new
            rec.step(t, v, w, branch)

        if t >= next_jump:
            next_jump = current.next_jump(t)
            I = current.value(t)

    train.final_state = SimState(t, v, w)
    return rec.trajectory(), train


def simulate_euler(model, current, init, config):
    """Fixed-step Euler with threshold, first-exceedance detection and reset."""
    if config.scheme != "euler":
        raise ValueError("simulate_euler needs scheme='euler'")
    return _run_euler_family(model, current, init, config, adaptive=False)


def simulate_hybrid_fixed(model, current, init, config):
    """Fixed-step hybrid time / phase-plane scheme."""
    if config.scheme != "hybrid-fixed":
        raise ValueError("simulate_hybrid_fixed needs scheme='hybrid-fixed'")
    return _run_euler_family(model, current, init, config, adaptive=False)


def simulate_hybrid_adaptive(model, current, init, config):
    """Fixed-precision hybrid scheme with curvature-based step selection."""
    if config.scheme != "hybrid-adaptive":
        raise ValueError("simulate_hybrid_adaptive needs scheme='hybrid-adaptive'")
    return _run_euler_family(model, current, init, config, adaptive=True)


# -- reference solver ----------------------------------------------------------


def _rk4(f, x, y0, y1, h):
    k1a, k1b = f(x, y0, y1)
    hh = 0.5 * h
    k2a, k2b = f(x + hh, y0 + hh * k1a, y1 + hh * k1b)
    k3a, k3b = f(x + hh, y0 + hh * k2a, y1 + hh * k2b)
    k4a, k4b = f(x + h, y0 + h * k3a, y1 + h * k3b)
    s = h / 6.0
    return (
        y0 + s * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
        y1 + s * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
    )


def _doubled(f, x, y0, y1, h, scale0, scale1):
    """RK4 full step vs two half steps. Returns extrapolated state and error ratio."""
    try:
        full0, full1 = _rk4(f, x, y0, y1, h)
        m0, m1 = _rk4(f, x, y0, y1, 0.5 * h)
        half0, half1 = _rk4(f, x + 0.5 * h, m0, m1, 0.5 * h)
    except (ZeroDivisionError, OverflowError, ArithmeticError, ValueError):
        return None, None, math.inf
    e0 = (half0 - full0) / 15.0
    e1 = (half1 - full1) / 15.0
    err = max(abs(e0) / scale0(half0), abs(e1) / scale1(half1))
    if not math.isfinite(err):
        return None, None, math.inf
    return half0 + e0, half1 + e1, err


def _grow(h, err):
    if err == 0:
        return 5.0 * h
    return h * min(5.0, max(0.2, 0.9 * err ** -0.2))


def reference_solve(model, current, init, config):
    """High-accuracy hybrid solver (RK4 with step doubling in each branch).

    Where ``|dv/dt| >= M`` the orbit equations are integrated with ``v`` as
    the independent variable, so spike time and adaptation value are resolved
    exactly at ``v = theta``. Time-branch steps that would cross the cutoff are
    replaced by a phase-plane step, and phase-plane steps that would overshoot
    a current jump or ``t_end`` fall back to time steps.
    """
    if config.scheme != "oracle":
        raise ValueError("reference_solve needs scheme='oracle'")
    config.check_model(model)
    F = model.F
    a, b, c, d = model.a, model.b, model.c, model.d
    theta, t_end, M, tol = config.theta, config.t_end, config.M, config.oracle_tol
    floor = config.dt_min

    def absolute(_):
        return tol

    def mixed(y):
        return tol * max(1.0, abs(y))

    t, v, w = init.t, init.v, init.w
    train = SpikeTrain()
    rec = _Recorder(config.record_every, init)
    next_jump = current.next_jump(t)
    I = current.value(t)

    def f_time(_, v_, w_):
        return F(v_) - w_ + I, a * (b * v_ - w_)

    def f_phase(v_, T_, W_):
        G_ = F(v_) - W_ + I
        return 1.0 / G_, a * (b * v_ - W_) / G_

    h_t = min(1e-3, max(t_end - t, floor))
    h_v = 1e-3
    force_time = False  # a phase step overshot a jump or t_end
    cross_pending = False  # a time step tried to jump over the cutoff
    attempts = 0
    while t < t_end:
        attempts += 1
        if attempts > 50_000_000:
            raise OracleError("too many step attempts")
        limit = min(t_end, next_jump)
        if v >= theta:
            train.events.append((t, w))
            v, w = c, w + d
            rec.reset(t, v, w)
            if len(train.events) >= config.max_events:
                train.terminated_by = "event-limit"
                break
            continue
        G = F(v) - w + I

        if not force_time and (abs(G) >= M or (cross_pending and G > 0)):
            # phase-plane step: v independent, y = (T, W)
            direction = 1.0 if G > 0 else -1.0
            h = h_v
            landing = False
            if direction > 0 and v + h >= theta:
                h = theta - v
                landing = True
            T_new, W_new, err = _doubled(f_phase, v, t, w, direction * h, absolute, mixed)
            if err > 1.0:
                if h <= floor * max(1.0, abs(v)):
                    raise OracleError(f"phase step floor reached at v={v:g}")
                h_v = h * max(0.2, 0.9 * err ** -0.2) if math.isfinite(err) else 0.25 * h
                continue
            if T_new > limit:
                force_time = True
                continue
            if T_new <= t:
                raise OracleError(f"time did not advance in a phase step at v={v:g}")
            v_new = theta if landing else v + direction * h
            if not landing:
                h_v = _grow(h, err)
            cross_pending = False
            train.step_count += 1
            _check_finite(T_new, v_new, W_new)
            if landing:
                rec.step(T_new, v_new, W_new, PHASE)
                train.events.append((T_new, W_new))
                t, v, w = T_new, c, W_new + d
                rec.reset(t, v, w)
                if len(train.events) >= config.max_events:
                    train.terminated_by = "event-limit"
                    break
            else:
                t, v, w = T_new, v_new, W_new
                rec.step(t, v, w, PHASE)
        else:
            h = h_t
            if t + h >= limit - _SNAP * h:
                h = limit - t
            v_new, w_new, err = _doubled(f_time, t, v, w, h, mixed, mixed)
            if err <= 1.0 and v_new >= theta:
                if G > 0 and not force_time:
                    cross_pending = True
                    continue
                err = 2.0
            if err > 1.0:
                if h <= floor * max(1.0, abs(t)):
                    raise OracleError(f"time step floor reached at t={t:g}")
                h_t = h * max(0.2, 0.9 * err ** -0.2) if math.isfinite(err) else 0.25 * h
                continue
            t_new = limit if h == limit - t else t + h
            train.step_count += 1
            _check_finite(t_new, v_new, w_new)
            t, v, w = t_new, v_new, w_new
            rec.step(t, v, w, TIME)
            if h == h_t:
                h_t = _grow(h, err)
            force_time = False

        if t >= next_jump:
            next_jump = current.next_jump(t)
            I = current.value(t)

    train.final_state = SimState(t, v, w)
    return rec.trajectory(), train


_DISPATCH = {
    "euler": simulate_euler,
    "hybrid-fixed": simulate_hybrid_fixed,
    "hybrid-adaptive": simulate_hybrid_adaptive,
    "oracle": reference_solve,
}


def simulate(model, current, init, config):
    """Run whichever scheme ``config.scheme`` names."""
    return _DISPATCH[config.scheme](model, current, init, config)


__all__ = [
    "SCHEMES",
    "SimState",
    "SolverConfig",
    "SpikeTrain",
    "Trajectory",
    "euler_step",
    "phase_step",
    "apply_reset",
    "adaptive_step",
    "second_derivatives_time",
    "second_derivatives_phase",
    "simulate_euler",
    "simulate_hybrid_fixed",
    "simulate_hybrid_adaptive",
    "reference_solve",
    "simulate",
]
