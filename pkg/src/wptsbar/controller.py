"""Rectifier duty command generation.

The SBAR shorts the secondary for a fraction d_short of every half carrier
period; seen from the fundamental component that scales the reflected load
voltage through f_duty.  The overshoot-suppressing command is built by
model inversion: a first-order-filtered amplitude reference is pushed
through the exact inverse of the V2->I2 amplitude transfer function,

    C(s) = -(s^2 + 2 zeta omega_n s + omega_n^2) / ((alpha2 s + beta2)(tau s + 1)),

discretized by the bilinear transform at dt_ctrl.  The filter makes the
cascade biproper (2 states).  The compensator runs in deviation form around
the rectification-mode operating point: driving it with absolute setpoints
would scale the huge DC bias through the chain and saturate the command, so
the state is zero-initialized, the input is the reference minus the
operating-point current, and the operating-point voltage is added back on
the way out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.signal

from .errors import ValidationError
from .model import DerivedParams, steady_state
from .series import TimeSeries

_REF_KINDS = ("step", "ramp", "proposed")


@dataclass(frozen=True)
class ControllerConfig:
    """lpf_tau: reference filter time constant; ramp_duration defaults to
    lpf_tau (full descent over one filter time constant); t_switch: instant
    of the rectification->short transition; dt_ctrl: command sample
    interval."""

    lpf_tau: float = 2e-3
    ref_kind: str = "proposed"
    ramp_duration: float | None = None
    t_switch: float = 4e-3
    dt_ctrl: float = 10e-6

    def __post_init__(self):
        if self.ref_kind not in _REF_KINDS:
            raise ValidationError(
                f"ref_kind must be one of {_REF_KINDS}, got {self.ref_kind!r}"
            )
        for name in ("lpf_tau", "dt_ctrl"):
            if getattr(self, name) <= 0.0:
                raise ValidationError(f"{name} must be positive")
        if self.t_switch < 0.0:
            raise ValidationError("t_switch must be non-negative")
        if self.ramp_duration is not None and self.ramp_duration <= 0.0:
            raise ValidationError("ramp_duration must be positive")

    @property
    def ramp_len(self) -> float:
        return self.lpf_tau if self.ramp_duration is None else self.ramp_duration


def f_duty(d_short: float, Vl: float) -> float:
    """Fundamental reflected-voltage amplitude for a given short duty.

    Shorting a window of width d_short*T centered on each secondary-current
    peak removes the strongest part of the rectified fundamental:
    V2 = (4/pi) Vl (1 - sin(pi d/2)).  Monotone decreasing, f(0) = (4/pi)Vl,
    f(1) = 0.
    """
    if not 0.0 <= d_short <= 1.0:
        raise ValidationError(f"d_short must lie in [0, 1], got {d_short}")
    return 4.0 / math.pi * Vl * (1.0 - math.sin(math.pi * d_short / 2.0))


def f_inv(V2: float, Vl: float) -> float:
    """Duty that realizes a requested V2; inverse of f_duty.

    V2 is clamped to the realizable range [0, (4/pi) Vl] first, so any real
    input yields a valid duty in [0, 1].
    """
    vmax = 4.0 / math.pi * Vl
    v = min(max(V2, 0.0), vmax)
    arg = 1.0 - math.pi / 4.0 * v / Vl
    arg = min(max(arg, -1.0), 1.0)
    return 2.0 / math.pi * math.asin(arg)


@dataclass
class FilterState:
    """Direct-form-II-transposed state of the discretized cascade."""

    w1: float = 0.0
    w2: float = 0.0


@lru_cache(maxsize=32)
def _cascade(cfg: ControllerConfig, d: DerivedParams):
    """Bilinear discretization of C(s) plus the operating-point biases."""
    num = [-1.0, -2.0 * d.zeta * d.omega_n, -(d.omega_n**2)]
    den = [
        d.alpha2 * cfg.lpf_tau,
        d.alpha2 + d.beta2 * cfg.lpf_tau,
        d.beta2,
    ]
    b, a = scipy.signal.bilinear(num, den, fs=1.0 / cfg.dt_ctrl)
    v2_op = f_duty(0.0, d.circuit.Vl)
    i2_op = steady_state(d, d.V1_amp, v2_op)[1]
    vmax = 4.0 / math.pi * d.circuit.Vl
    return tuple(b), tuple(a), i2_op, v2_op, vmax


def inverse_plant_step(
    state: FilterState, i2_ref: float, cfg: ControllerConfig, d: DerivedParams
) -> tuple[FilterState, float]:
    """One controller-period update; returns the raw (unclamped) V2 command."""
    b, a, i2_op, v2_op, _ = _cascade(cfg, d)
    u = i2_ref - i2_op
    y = b[0] * u + state.w1
    w1 = b[1] * u - a[1] * y + state.w2
    w2 = b[2] * u - a[2] * y
    return FilterState(w1, w2), v2_op + y


def make_reference(cfg: ControllerConfig, d: DerivedParams, t_end: float) -> TimeSeries:
    """V2 reference trajectory on the dt_ctrl grid, channel "V2_ref".

    step:     full drive f_duty(0) -> 0 at t_switch
    ramp:     linear descent over ramp_len starting at t_switch
    proposed: inverse-compensated trajectory — the amplitude setpoint steps
              from the rectification-mode to the short-mode steady state,
              is low-pass filtered, and runs through the plant inverse
    """
    n = int(round(t_end / cfg.dt_ctrl)) + 1
    t = np.arange(n) * cfg.dt_ctrl
    v0 = f_duty(0.0, d.circuit.Vl)
    if cfg.ref_kind == "step":
        ref = np.where(t < cfg.t_switch, v0, 0.0)
    elif cfg.ref_kind == "ramp":
        frac = np.clip((t - cfg.t_switch) / cfg.ramp_len, 0.0, 1.0)
        ref = np.where(t < cfg.t_switch, v0, v0 * (1.0 - frac))
    else:
        _, _, i2_op, _, _ = _cascade(cfg, d)
        i2_tgt = steady_state(d, d.V1_amp, 0.0)[1]
        st = FilterState()
        ref = np.empty(n)
        # sample 0 is the pre-update output: exactly the operating point
        st, ref[0] = inverse_plant_step(st, i2_op, cfg, d)
        for k in range(1, n):
            setpoint = i2_op if t[k] < cfg.t_switch else i2_tgt
            st, ref[k] = inverse_plant_step(st, setpoint, cfg, d)
    return TimeSeries(cfg.dt_ctrl, {"V2_ref": ref})


def command_chain(
    cfg: ControllerConfig, d: DerivedParams, t_end: float
) -> tuple[TimeSeries, int]:
    """Clamped command trajectory plus the count of clamp interventions.

    Channels "V2_star" (reference clamped to the realizable range) and
    "d_short_star" = f_inv(V2_star), always in [0, 1].  A clamp event is a
    raw reference sample strictly outside [0, (4/pi) Vl] beyond float slack
    (samples sitting exactly on a bound do not count).
    """
    _, _, _, _, vmax = _cascade(cfg, d)
    raw = make_reference(cfg, d, t_end)["V2_ref"]
    n_clamped = int(np.count_nonzero((raw < -1e-9) | (raw > vmax + 1e-9)))
    v2 = np.clip(raw, 0.0, vmax)
    duty = np.array([f_inv(v, d.circuit.Vl) for v in v2])
    ts = TimeSeries(cfg.dt_ctrl, {"V2_star": v2, "d_short_star": duty})
    return ts, n_clamped


def lowpass_reference(cfg: ControllerConfig, d: DerivedParams, t: np.ndarray) -> np.ndarray:
    """Continuous-time filtered amplitude setpoint the proposed command is
    designed to track: first-order response from the rectification-mode to
    the short-mode steady-state current."""
    _, _, i2_op, _, _ = _cascade(cfg, d)
    i2_tgt = steady_state(d, d.V1_amp, 0.0)[1]
    out = np.full(len(t), i2_op)
    m = t >= cfg.t_switch
    out[m] = i2_op + (i2_tgt - i2_op) * (1.0 - np.exp(-(t[m] - cfg.t_switch) / cfg.lpf_tau))
    return out


def config_with(cfg: ControllerConfig, **kw) -> ControllerConfig:
    """Frozen-dataclass update helper (suits sweep loops)."""
    return replace(cfg, **kw)
