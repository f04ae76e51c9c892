"""Switched (carrier-resolved) simulation of the link.

Four states: coil currents i1, i2 and tuning-capacitor charges q1, q2.
The inverter applies a +/-Vdc square wave at f_res; the SBAR either
rectifies (v2 = sign(i2) * Vl, load current |i2|) or shorts the secondary
(v2 = 0, no load current) for a commanded fraction of every half carrier
period.  This engine is the ground truth the envelope model is checked
against.

The short window is centered on each half-period boundary — the crest of
|i2| under resonant operation — which is the alignment for which the
realized fundamental equals controller.f_duty; a window starting at the
boundary ("leading") is available for waveform studies.  phase_offset
shifts the window by phase_offset/pi half-periods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DivergenceError, ValidationError
from .model import CircuitParams, derive_params, steady_state
from .series import TimeSeries

_ALIGNMENTS = ("centered", "leading")

# Default carrier resolution: steps per half period.  1/(1000 f_res) gives
# RK4 amplitude errors far below every tolerance in the test suite.
DEFAULT_STEPS_PER_HALF_PERIOD = 500

# Contract floor: at least 200 samples per carrier period (n >= 100).
_MIN_STEPS_PER_HALF_PERIOD = 100


@dataclass
class SwitchedState:
    """Instantaneous circuit state."""

    i1: float
    i2: float
    q1: float
    q2: float
    t: float = 0.0


@dataclass
class GateSchedule:
    """Sampled duty command plus gate geometry.

    d_short: duty sequence in [0, 1], zero-order hold at dt_cmd.
    phase_offset: window shift in radians of carrier phase (pi = one half
    period).  alignment: "centered" (window centered on the half-period
    boundary, matches f_duty) or "leading" (window starts at the boundary).
    """

    d_short: np.ndarray
    dt_cmd: float
    phase_offset: float = 0.0
    alignment: str = "centered"

    def __post_init__(self):
        self.d_short = np.asarray(self.d_short, float)
        if self.dt_cmd <= 0.0:
            raise ValidationError("dt_cmd must be positive")
        if self.d_short.ndim != 1 or len(self.d_short) == 0:
            raise ValidationError("d_short must be a non-empty 1-D sequence")
        if np.any((self.d_short < 0.0) | (self.d_short > 1.0)):
            raise ValidationError("d_short values must lie in [0, 1]")
        if self.alignment not in _ALIGNMENTS:
            raise ValidationError(
                f"alignment must be one of {_ALIGNMENTS}, got {self.alignment!r}"
            )


def converged_state(p: CircuitParams) -> SwitchedState:
    """Rectification-mode periodic steady state at a half-period boundary.

    At t = 0 the carrier phase puts i2 at its crest and i1 at a zero
    crossing: i1 = I1 sin(wt), i2 = I2 cos(wt), q1 = -I1/w cos(wt),
    q2 = I2/w sin(wt), with amplitudes from the envelope steady state under
    full rectification.
    """
    d = derive_params(p)
    I1, I2 = steady_state(d, d.V1_amp, 4.0 / math.pi * p.Vl)
    return SwitchedState(i1=0.0, i2=I2, q1=-I1 / d.omega, q2=0.0)


def simulate_switched(
    p: CircuitParams,
    g: GateSchedule,
    dt: float,
    t_end: float,
    x0: SwitchedState | None = None,
    record_stride: int = 1,
) -> TimeSeries:
    """Integrate the switched circuit; channels "i1", "i2", "v2", "i_load".

    dt is snapped to an integer division of the half carrier period and
    t_end to a whole number of half periods, so the gate logic works on
    integer step counts and runs are bit-deterministic.  x0 = None starts
    from the rectification-mode periodic steady state.  record_stride
    decimates the stored record (the integration step is unaffected).
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise ValidationError(f"dt and t_end must be positive, got {dt}, {t_end}")
    if record_stride < 1:
        raise ValidationError("record_stride must be >= 1")
    T_half = 1.0 / (2.0 * p.f_res)
    n = int(round(T_half / dt))
    if n < _MIN_STEPS_PER_HALF_PERIOD:
        raise ValidationError(
            f"dt={dt:.3e}s gives {2 * n} samples per carrier period; need >= "
            f"{2 * _MIN_STEPS_PER_HALF_PERIOD}"
        )
    dt_snap = T_half / n
    n_half = int(round(t_end / T_half))
    if n_half < 4:
        raise ValidationError("t_end must span at least 2 carrier periods")
    if len(g.d_short) * g.dt_cmd < n_half * T_half - 1e-12:
        raise ValidationError(
            f"duty command covers {len(g.d_short) * g.dt_cmd:.6g}s "
            f"but the run needs {n_half * T_half:.6g}s"
        )
    if x0 is None:
        x0 = converged_state(p)

    d = derive_params(p)
    y0 = np.array([x0.i1, x0.i2, x0.q1, x0.q2], float)
    s2_0 = 1.0 if x0.i2 >= 0.0 else -1.0
    k_off = int(round(g.phase_offset / math.pi * n)) % n
    centered = 1 if g.alignment == "centered" else 0
    DD = p.L1 * p.L2 - p.Lm * p.Lm
    rec = _kernels.kernel(
        y0,
        s2_0,
        np.ascontiguousarray(g.d_short),
        g.dt_cmd,
        n_half,
        n,
        dt_snap,
        k_off,
        centered,
        record_stride,
        p.L1,
        p.L2,
        p.Lm,
        p.R1,
        p.R2,
        d.C1,
        d.C2,
        p.Vdc,
        p.Vl,
        DD,
    )
    if not np.all(np.isfinite(rec[-1, :2])) or np.max(np.abs(rec[-1, :2])) > 1e9:
        raise DivergenceError("switched state left the finite range")
    return TimeSeries(
        dt_snap * record_stride,
        {
            "i1": np.ascontiguousarray(rec[:, 0]),
            "i2": np.ascontiguousarray(rec[:, 1]),
            "v2": np.ascontiguousarray(rec[:, 2]),
            "i_load": np.ascontiguousarray(rec[:, 3]),
        },
    )


def extract_envelope(ts: TimeSeries, f_res: float) -> TimeSeries:
    """Per-half-carrier-period maximum of |i2|, zero-order held back onto
    the input grid (channel "I2_env")."""
    i2 = ts["i2"]
    T_half = 1.0 / (2.0 * f_res)
    per = int(round(T_half / ts.dt))
    if per < 2:
        raise ValidationError(
            f"record grid ({ts.dt:.3e}s) too coarse to resolve half periods "
            f"({T_half:.3e}s)"
        )
    if len(i2) < 4 * per:
        raise ValidationError("record must span at least 2 carrier periods")
    m = len(i2) // per
    buckets = np.abs(i2[: m * per]).reshape(m, per).max(axis=1)
    env = np.repeat(buckets, per)
    if len(env) < len(i2):  # ragged tail extends the last full bucket
        env = np.concatenate([env, np.full(len(i2) - len(env), buckets[-1])])
    return TimeSeries(ts.dt, {"I2_env": env})


def envelope_buckets(ts: TimeSeries, f_res: float) -> tuple[np.ndarray, np.ndarray]:
    """Undecimated form of extract_envelope: (half-period start times,
    per-half-period max of |i2|).  Convenient for cross-model comparisons."""
    i2 = ts["i2"]
    T_half = 1.0 / (2.0 * f_res)
    per = int(round(T_half / ts.dt))
    m = len(i2) // per
    buckets = np.abs(i2[: m * per]).reshape(m, per).max(axis=1)
    return np.arange(m) * T_half, buckets
