"""First-order error of the thresholded Euler scheme and empirical error measurement.

The closed forms here describe the large-``v`` regime where the membrane
equation behaves like ``y' = F(y)`` with ``F`` either a power ``y**m`` or an
exponential. ``A(v)`` and ``B(v)`` are the first-order (in the time step)
error coefficients on ``v`` and ``w`` expressed along the orbit, so the
Euler estimate of ``w`` at the cutoff is off by about ``tau * B(theta)``.
"""

import math
import re
from dataclasses import dataclass

from .exceptions import BlowUpError, MeasurementError, ModelRangeError, QuadratureError
from .integrators import SimState, simulate

QUAD_ATOL = 1e-10
QUAD_MAX_DEPTH = 60
# stands in for "no cutoff" when a solver must run to a fixed time
_NO_CUTOFF = 1e300


@dataclass(frozen=True)
class ErrorClass:
    """Growth class of the nonlinearity: ``power`` with exponent ``m``, or ``exponential``."""

    kind: str
    m: float = None

    def __post_init__(self):
        if self.kind == "power":
            if self.m is None or not math.isfinite(self.m) or not self.m > 1:
                raise ValueError("power class needs a finite exponent m > 1")
        elif self.kind == "exponential":
            if self.m is not None:
                raise ValueError("exponential class takes no exponent")
        else:
            raise ValueError(f"unknown error class {self.kind!r}")

    @classmethod
    def power(cls, m):
        return cls("power", float(m))

    @classmethod
    def exponential(cls):
        return cls("exponential")

    @classmethod
    def parse(cls, spec):
        """Accept an :class:`ErrorClass`, ``"exponential"`` or ``"power(m)"``."""
        if isinstance(spec, cls):
            return spec
        if not isinstance(spec, str):
            raise ValueError(f"cannot interpret {spec!r} as an error class")
        text = spec.strip().lower()
        if text in ("exponential", "exp"):
            return cls.exponential()
        match = re.fullmatch(r"power\s*[(:]\s*([^)\s]+)\s*\)?", text)
        if match:
            return cls.power(float(match.group(1)))
        raise ValueError(f"cannot interpret {spec!r} as an error class")

    def __str__(self):
        return "exponential" if self.kind == "exponential" else f"power({self.m:g})"

    def check_domain(self, v, v0):
        if not (math.isfinite(v) and math.isfinite(v0)):
            raise ValueError("v and v0 must be finite")
        if v < v0:
            raise ValueError("v must not lie below v0")
        if self.kind == "power" and not v0 > 0:
            raise ValueError("power class needs v0 > 0")

    def log_F(self, v):
        return self.m * math.log(v) if self.kind == "power" else v

    def F(self, v):
        try:
            return v**self.m if self.kind == "power" else math.exp(v)
        except OverflowError:
            raise ModelRangeError(f"F({v:g}) overflows") from None

    def dF(self, v):
        try:
            return self.m * v ** (self.m - 1) if self.kind == "power" else math.exp(v)
        except OverflowError:
            raise ModelRangeError(f"F'({v:g}) overflows") from None

    def decay_exponent(self, u, v, a):
        """``-integral_u^v a / F``, computed without cancellation."""
        if self.kind == "power":
            k = self.m - 1.0
            return a * (v**-k - u**-k) / k
        return a * (math.exp(-v) - math.exp(-u))


def _as_class(model_class):
    try:
        return ErrorClass.parse(model_class)
    except ValueError as exc:
        raise ValueError(f"invalid error class: {exc}") from None


def adaptive_simpson(f, lo, hi, atol=QUAD_ATOL, max_depth=QUAD_MAX_DEPTH):
    """Integrate ``f`` over ``[lo, hi]`` by adaptive Simpson with Richardson correction."""
    if hi == lo:
        return 0.0
    mid = 0.5 * (lo + hi)
    flo, fmid, fhi = f(lo), f(mid), f(hi)
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    stack = [(lo, hi, flo, fmid, fhi, whole, atol, 0)]
    total = 0.0
    while stack:
        x0, x1, f0, fm, f1, whole, tol, depth = stack.pop()
        xm = 0.5 * (x0 + x1)
        xl, xr = 0.5 * (x0 + xm), 0.5 * (xm + x1)
        fl, fr = f(xl), f(xr)
        left = (xm - x0) / 6.0 * (f0 + 4.0 * fl + fm)
        right = (x1 - xm) / 6.0 * (fm + 4.0 * fr + f1)
        delta = left + right - whole
        if not math.isfinite(delta):
            raise QuadratureError(f"non-finite integrand near {xm:g}")
        if abs(delta) <= 15.0 * tol:
            total += left + right + delta / 15.0
        elif depth >= max_depth or not x0 < xl < xm < xr < x1:
            raise QuadratureError(f"adaptive Simpson did not converge near {xm:g}")
        else:
            stack.append((x0, xm, f0, fl, fm, left, 0.5 * tol, depth + 1))
            stack.append((xm, x1, fm, fr, f1, right, 0.5 * tol, depth + 1))
    return total


def error_A(model_class, v, v0):
    """First-order error coefficient on ``v`` along the orbit, ``A(v)``.

    Power: ``-(m/2) v**m ln(v/v0)``. Exponential: ``-(v - v0) e**v / 2``.
    """
    cls = _as_class(model_class)
    cls.check_domain(v, v0)
    if v == v0:
        return 0.0
    if cls.kind == "power":
        return -0.5 * cls.m * cls.F(v) * math.log(v / v0)
    return -0.5 * (v - v0) * cls.F(v)


def error_B(model_class, v, v0, a, b, *, constant_forcing=True):
    """First-order error coefficient on ``w`` along the orbit, ``B(v)``.

    Solves ``dB/dv = (a/F)(b A - B) - a b / 2`` with ``B(v0) = 0`` as

        B(v) = -(a b / 2) * int_v0^v exp(-int_u^v a/F) (ln F(u) - ln F(v0) + 1) du

    by adaptive Simpson quadrature. ``constant_forcing=False`` drops the
    ``+1`` (the ``-a b / 2`` source term) and returns the shorter integral
    that ignores it; that variant no longer solves the reduced error system.
    """
    cls = _as_class(model_class)
    cls.check_domain(v, v0)
    if a < 0 or b < 0:
        raise ValueError("a and b must be non-negative")
    if v == v0 or a == 0 or b == 0:
        return 0.0
    shift = 1.0 if constant_forcing else 0.0
    log_F0 = cls.log_F(v0)

    def integrand(u):
        return math.exp(cls.decay_exponent(u, v, a)) * (cls.log_F(u) - log_F0 + shift)

    return -0.5 * a * b * adaptive_simpson(integrand, v0, v)


def reduced_error_rhs(model_class, a, b):
    """Right-hand side ``(dA/dv, dB/dv)`` of the reduced error system, for direct integration."""
    cls = _as_class(model_class)

    def rhs(v, A, B):
        F = cls.F(v)
        return cls.dF(v) / F * A - 0.5 * cls.dF(v), a / F * (b * A - B) - 0.5 * a * b

    return rhs


def spike_time_delay(model_class, theta, y0, tau):
    """Predicted lag of the Euler cutoff crossing behind the exact one, in time units.

    The crossing is the linearly interpolated Euler trajectory reaching
    ``theta``. Power ``y' = y**m``: ``tau (m/2) ln(theta/y0)``.
    Exponential ``y' = e**y``: ``tau (theta - y0) / 2``. First-exceedance
    detection adds between zero and one extra step on top of this.
    """
    cls = _as_class(model_class)
    if not tau > 0:
        raise ValueError("tau must be positive")
    if theta < y0:
        raise ValueError("theta must not lie below y0")
    if cls.kind == "power":
        if not y0 > 0:
            raise ValueError("power class needs y0 > 0")
        return tau * 0.5 * cls.m * math.log(theta / y0)
    return tau * 0.5 * (theta - y0)


def blowup_time(kind, y0):
    """Finite time at which the 1-D solution from ``y0`` diverges."""
    cls = _as_class(kind)
    if cls.kind == "power":
        if not y0 > 0:
            raise ValueError("power class needs y0 > 0")
        return y0 ** (1.0 - cls.m) / (cls.m - 1.0)
    return math.exp(-y0)


def onedim_blowup_solution(kind, y0, t):
    """Exact solution of ``y' = y**m`` or ``y' = e**y`` with ``y(0) = y0``."""
    cls = _as_class(kind)
    t_star = blowup_time(cls, y0)
    if t >= t_star:
        raise BlowUpError(f"t={t:g} is at or past the blow-up time {t_star:g}")
    if cls.kind == "power":
        return (y0 ** (1.0 - cls.m) - (cls.m - 1.0) * t) ** (1.0 / (1.0 - cls.m))
    return y0 - math.log1p(-t * math.exp(y0))


@dataclass(frozen=True)
class ErrorCurvePoint:
    v: float
    A: float
    B: float


def error_vs_cutoff_curve(model_class, v0, a, b, theta_list):
    """Tabulate ``(theta, A(theta), B(theta))`` over an increasing list of cutoffs."""
    cls = _as_class(model_class)
    thetas = [float(x) for x in theta_list]
    if any(y <= x for x, y in zip(thetas, thetas[1:])):
        raise ValueError("theta_list must be strictly increasing")
    if thetas and thetas[0] < v0:
        raise ValueError("cutoffs must not lie below v0")
    return [ErrorCurvePoint(th, error_A(cls, th, v0), error_B(cls, th, v0, a, b)) for th in thetas]


@dataclass(frozen=True)
class ErrorReport:
    """First-spike errors of a scheme against the reference solver.

    ``w_at_spike_error`` compares both solutions at the same instant, the
    earlier of the two spike times: the solver that has not yet spiked is
    read off at that time. ``w_event_error`` instead differences the values
    each solver records at its own spike.
    """

    spike_time_error: float
    w_at_spike_error: float
    theta: float
    tau_or_eps: float
    scheme: str = ""
    spike_time: float = math.nan
    w_at_spike: float = math.nan
    oracle_spike_time: float = math.nan
    oracle_w_at_spike: float = math.nan
    w_event_error: float = math.nan
    comparison_time: float = math.nan

    def __post_init__(self):
        for name in ("spike_time_error", "w_at_spike_error", "theta", "tau_or_eps"):
            if not math.isfinite(getattr(self, name)):
                raise MeasurementError(f"{name} is not finite")


def _step_parameter(config):
    return {
        "euler": config.dt,
        "hybrid-fixed": config.dt,
        "hybrid-adaptive": config.epsilon,
        "oracle": config.oracle_tol,
    }[config.scheme]


def _first_event(model, current, init, config, label):
    _, train = simulate(model, current, init, config.replace(max_events=1, record_every=0))
    if not train.events:
        raise MeasurementError(f"{label} produced no spike before t_end={config.t_end:g}")
    return train.events[0]


def _w_at(model, current, init, config, t):
    if t <= init.t:
        return init.w
    cfg = config.replace(t_end=t, theta=_NO_CUTOFF, max_events=1, record_every=0)
    _, train = simulate(model, current, init, cfg)
    return train.final_state.w


def measure_empirical_error(model, current, init, scheme_config, oracle_tol=1e-10):
    """Run ``scheme_config`` and the reference solver from ``init`` and compare first spikes."""
    if not isinstance(init, SimState):
        init = SimState(*init)
    oracle_cfg = scheme_config.replace(scheme="oracle", oracle_tol=oracle_tol)
    t_s, w_s = _first_event(model, current, init, scheme_config, scheme_config.scheme)
    t_o, w_o = _first_event(model, current, init, oracle_cfg, "oracle")
    if t_s <= t_o:
        t_c = t_s
        w_scheme, w_oracle = w_s, _w_at(model, current, init, oracle_cfg, t_s)
    else:
        t_c = t_o
        w_scheme, w_oracle = _w_at(model, current, init, scheme_config, t_o), w_o
    return ErrorReport(
        spike_time_error=t_s - t_o,
        w_at_spike_error=w_scheme - w_oracle,
        theta=scheme_config.theta,
        tau_or_eps=_step_parameter(scheme_config),
        scheme=scheme_config.scheme,
        spike_time=t_s,
        w_at_spike=w_s,
        oracle_spike_time=t_o,
        oracle_w_at_spike=w_o,
        w_event_error=w_s - w_o,
        comparison_time=t_c,
    )


__all__ = [
    "ErrorClass",
    "ErrorCurvePoint",
    "ErrorReport",
    "adaptive_simpson",
    "blowup_time",
    "error_A",
    "error_B",
    "error_vs_cutoff_curve",
    "measure_empirical_error",
    "onedim_blowup_solution",
    "reduced_error_rhs",
    "spike_time_delay",
]
