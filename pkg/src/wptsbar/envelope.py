"""Amplitude (envelope) simulation of the link.

The carrier is eliminated analytically: with i1 = I1 sin(omega t) and
i2 = I2 cos(omega t) the amplitudes obey the slow linear system of
model.envelope_matrices.  Integration is classical fixed-step fourth-order
Runge-Kutta with the command frozen over each step (zero-order hold at the
step's left edge) — fixed step keeps runs bit-deterministic and makes the
integrator directly comparable against the closed-form propagator below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, ValidationError
from .model import DerivedParams, steady_state
from .series import TimeSeries, command_channel

# Hard bound used to catch blow-ups early; any physical amplitude for this
# class of hardware is orders of magnitude below it.
_AMP_LIMIT = 1e9

# Required resolution of the amplitude oscillation (steps per 2*pi/omega_n).
_MIN_STEPS_PER_PERIOD = 50.0


@dataclass
class EnvelopeState:
    """Current amplitudes at an instant: i1 = I1 sin(wt), i2 = I2 cos(wt)."""

    I1: float
    I2: float
    t: float = 0.0


def envelope_rhs(s: EnvelopeState, V1: float, V2: float, d: DerivedParams) -> tuple[float, float]:
    """Amplitude derivatives; V1 drives the primary, V2 opposes the secondary."""
    p = d.circuit
    wlm = d.omega * p.Lm
    dI1 = (V1 - p.R1 * s.I1 - wlm * s.I2) / (2.0 * p.L1)
    dI2 = (-V2 - p.R2 * s.I2 + wlm * s.I1) / (2.0 * p.L2)
    return dI1, dI2


def max_stable_dt(d: DerivedParams) -> float:
    """Largest sample interval that still resolves the amplitude oscillation."""
    return 2.0 * math.pi / d.omega_n / _MIN_STEPS_PER_PERIOD


def simulate_envelope(
    d: DerivedParams,
    v2_cmd: TimeSeries,
    I0: EnvelopeState,
    dt: float,
    t_end: float,
) -> TimeSeries:
    """Integrate the amplitude system under a sampled V2 command.

    v2_cmd is applied by zero-order hold on its own grid and must cover
    [0, t_end).  Output channels: "I1_env", "I2_env", "V2_cmd" (the command
    resampled onto the output grid).  Reruns are bit-identical.
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise ValidationError(f"dt and t_end must be positive, got {dt}, {t_end}")
    if dt > max_stable_dt(d):
        raise ValidationError(
            f"dt={dt:.3e}s under-resolves the amplitude oscillation; "
            f"need dt <= {max_stable_dt(d):.3e}s "
            f"({_MIN_STEPS_PER_PERIOD:.0f} steps per 2pi/omega_n)"
        )
    cmd = np.asarray(command_channel(v2_cmd, "V2_star", "V2_ref", "V2_cmd"), float)
    n_steps = int(round(t_end / dt))
    if len(cmd) * v2_cmd.dt < n_steps * dt - 1e-12:
        raise ValidationError(
            f"command covers {len(cmd) * v2_cmd.dt:.6g}s "
            f"but the run needs {n_steps * dt:.6g}s"
        )

    p = d.circuit
    wlm = d.omega * p.Lm
    c11 = -p.R1 / (2.0 * p.L1)
    c12 = -wlm / (2.0 * p.L1)
    c21 = wlm / (2.0 * p.L2)
    c22 = -p.R2 / (2.0 * p.L2)
    u1 = d.V1_amp / (2.0 * p.L1)
    h2 = -1.0 / (2.0 * p.L2)

    ratio = dt / v2_cmd.dt
    last = len(cmd) - 1
    x1 = float(I0.I1)
    x2 = float(I0.I2)
    out1 = np.empty(n_steps + 1)
    out2 = np.empty(n_steps + 1)
    outv = np.empty(n_steps + 1)
    out1[0] = x1
    out2[0] = x2
    outv[0] = cmd[0]
    for i in range(n_steps):
        # command frozen at the step's left edge; +1e-9 guards the float
        # floor against i*ratio landing a hair below an exact integer
        k = int(i * ratio + 1e-9)
        u2 = cmd[k if k < last else last] * h2
        k11 = c11 * x1 + c12 * x2 + u1
        k12 = c21 * x1 + c22 * x2 + u2
        a = x1 + 0.5 * dt * k11
        b = x2 + 0.5 * dt * k12
        k21 = c11 * a + c12 * b + u1
        k22 = c21 * a + c22 * b + u2
        a = x1 + 0.5 * dt * k21
        b = x2 + 0.5 * dt * k22
        k31 = c11 * a + c12 * b + u1
        k32 = c21 * a + c22 * b + u2
        a = x1 + dt * k31
        b = x2 + dt * k32
        k41 = c11 * a + c12 * b + u1
        k42 = c21 * a + c22 * b + u2
        x1 += dt / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
        x2 += dt / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
        out1[i + 1] = x1
        out2[i + 1] = x2
        kn = int((i + 1) * ratio + 1e-9)
        outv[i + 1] = cmd[kn if kn < last else last]
    if not (math.isfinite(x1) and math.isfinite(x2)) or max(abs(x1), abs(x2)) > _AMP_LIMIT:
        raise DivergenceError(f"amplitude state left the finite range: ({x1}, {x2})")
    return TimeSeries(dt, {"I1_env": out1, "I2_env": out2, "V2_cmd": outv})


def analytic_envelope(
    d: DerivedParams, V1: float, V2: float, I0: EnvelopeState, t: float
) -> EnvelopeState:
    """Exact propagation under constant drive: x(t) = x_ss + e^{A dt}(x0 - x_ss).

    The 2x2 exponential is closed-form (split A = mu I + N, N traceless;
    rotation / hyperbolic / defective branch on sign(det N)), so this is an
    independent oracle for the integrator rather than another ODE solve.
    """
    dt = t - I0.t
    if dt < 0.0:
        raise ValidationError(f"target time {t} precedes state time {I0.t}")
    p = d.circuit
    a11 = -p.R1 / (2.0 * p.L1)
    a12 = -d.omega * p.Lm / (2.0 * p.L1)
    a21 = d.omega * p.Lm / (2.0 * p.L2)
    a22 = -p.R2 / (2.0 * p.L2)
    s1, s2 = steady_state(d, V1, V2)
    y1 = I0.I1 - s1
    y2 = I0.I2 - s2

    mu = 0.5 * (a11 + a22)
    n11 = a11 - mu  # = -(a22 - mu)
    disc = n11 * n11 + a12 * a21
    if disc < 0.0:
        w = math.sqrt(-disc)
        e = math.exp(mu * dt)
        ec = e * math.cos(w * dt)
        ef = e * math.sin(w * dt) / w
    elif disc > 0.0 and math.sqrt(disc) * dt >= 1e-8:
        # products of exp and cosh/sinh overflow for stiff overdamped
        # parameter sets; the per-eigenvalue exponentials never do
        w = math.sqrt(disc)
        ep = math.exp((mu + w) * dt)
        em = math.exp((mu - w) * dt)
        ec = 0.5 * (ep + em)
        ef = (ep - em) / (2.0 * w)
    else:
        # defective (or numerically indistinguishable from it)
        e = math.exp(mu * dt)
        ec = e
        ef = e * dt
    z1 = (ec + ef * n11) * y1 + ef * a12 * y2
    z2 = ef * a21 * y1 + (ec - ef * n11) * y2
    return EnvelopeState(I1=s1 + z1, I2=s2 + z2, t=t)


def analytic_chain(
    d: DerivedParams, v2_cmd: TimeSeries, I0: EnvelopeState, dt: float, t_end: float
) -> TimeSeries:
    """Exact trajectory under a sampled command, on the same grid as
    simulate_envelope: the closed-form propagator chained across the
    zero-order-hold segments.  Used for integrator-equivalence tests."""
    cmd = np.asarray(command_channel(v2_cmd, "V2_star", "V2_ref", "V2_cmd"), float)
    n_steps = int(round(t_end / dt))
    ratio = dt / v2_cmd.dt
    last = len(cmd) - 1
    out1 = np.empty(n_steps + 1)
    out2 = np.empty(n_steps + 1)
    outv = np.empty(n_steps + 1)
    state = EnvelopeState(I0.I1, I0.I2, 0.0)
    out1[0], out2[0], outv[0] = state.I1, state.I2, cmd[0]
    V1 = d.V1_amp
    for i in range(n_steps):
        k = int(i * ratio + 1e-9)
        v2 = cmd[k if k < last else last]
        nxt = analytic_envelope(d, V1, v2, state, state.t + dt)
        # keep the chain's time arithmetic exact on the grid
        nxt.t = (i + 1) * dt
        state = nxt
        out1[i + 1], out2[i + 1] = state.I1, state.I2
        kn = int((i + 1) * ratio + 1e-9)
        outv[i + 1] = cmd[kn if kn < last else last]
    return TimeSeries(dt, {"I1_env": out1, "I2_env": out2, "V2_cmd": outv})
