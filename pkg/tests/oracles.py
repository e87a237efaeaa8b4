"""Independent references used to freeze expected values.

These rely on scipy's Dormand-Prince integrator rather than on anything in
the package, so agreement is a genuine cross-check.
"""

import numpy as np
from scipy.integrate import solve_ivp

# first spike of the bursting set from (c, b c), DOP853 at rtol 1e-13
BURST_FIRST_SPIKE_T = 3.5678775064894652
BURST_FIRST_SPIKE_W = -11.193310576337824
# period-2 attractor of the same system (reset values before the +d jump)
BURST_CYCLE_W = (-8.947670678853452, -9.282941069619282)


def dop853_first_crossing(F, a, b, I, v0, w0, theta, t_max=1e4, rtol=1e-13):
    """``(t, w)`` at which ``v`` first reaches ``theta``."""

    def rhs(_, y):
        return [F(y[0]) - y[1] + I, a * (b * y[0] - y[1])]

    def hit(_, y):
        return y[0] - theta

    hit.terminal = True
    hit.direction = 1
    sol = solve_ivp(rhs, (0.0, t_max), [v0, w0], method="DOP853", rtol=rtol, atol=1e-12, events=hit)
    return float(sol.t_events[0][0]), float(sol.y_events[0][0][1])


def reduced_error_direct(F, dF, a, b, v0, v):
    """Integrate ``dA/dv = F'/F A - F'/2``, ``dB/dv = a/F (b A - B) - a b/2`` from zero."""

    def rhs(x, y):
        f = F(x)
        return [dF(x) / f * y[0] - 0.5 * dF(x), a / f * (b * y[0] - y[1]) - 0.5 * a * b]

    sol = solve_ivp(rhs, (v0, v), [0.0, 0.0], method="DOP853", rtol=1e-12, atol=1e-14)
    return float(sol.y[0, -1]), float(sol.y[1, -1])


def power_class(m):
    return (lambda x: x**m), (lambda x: m * x ** (m - 1))


def exp_class():
    return np.exp, np.exp
