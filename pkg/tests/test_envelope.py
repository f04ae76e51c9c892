import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

import wptsbar.envelope
from wptsbar.envelope import (
    EnvelopeState,
    analytic_chain,
    analytic_envelope,
    envelope_rhs,
    max_stable_dt,
    simulate_envelope,
)
from wptsbar.errors import DivergenceError, ValidationError
from wptsbar.model import CircuitParams, derive_params, envelope_matrices, steady_state
from wptsbar.series import TimeSeries


def hold(v, t_span):
    """Constant command covering t_span."""
    return TimeSeries(t_span, {"V2_cmd": np.array([v, v])})


def test_rhs_vanishes_at_steady_state(derived):
    V2 = 12.0
    I1, I2 = steady_state(derived, derived.V1_amp, V2)
    dI1, dI2 = envelope_rhs(EnvelopeState(I1, I2), derived.V1_amp, V2, derived)
    assert abs(dI1) < 1e-9 and abs(dI2) < 1e-9


def test_max_stable_dt_frozen(derived):
    assert max_stable_dt(derived) == pytest.approx(5.027818077057549e-06, rel=1e-12)


def _expm_reference(d, V1, V2, x0, t):
    A, _ = envelope_matrices(d)
    ss = np.array(steady_state(d, V1, V2))
    return ss + scipy.linalg.expm(A * t) @ (np.array(x0) - ss)


@st.composite
def circuits(draw):
    L1 = draw(st.floats(1e-6, 1e-3))
    L2 = draw(st.floats(1e-6, 1e-3))
    k = draw(st.floats(0.02, 0.9))
    return CircuitParams(
        L1=L1,
        L2=L2,
        Lm=k * math.sqrt(L1 * L2),
        R1=draw(st.floats(1e-3, 1.0)),
        R2=draw(st.floats(1e-3, 1.0)),
        Vdc=draw(st.floats(5.0, 400.0)),
        Vl=draw(st.floats(5.0, 400.0)),
        f_res=draw(st.floats(2e4, 2e5)),
    )


@given(
    circuits(),
    st.floats(-50.0, 50.0),
    st.floats(-50.0, 50.0),
    st.floats(0.0, 500.0),
    st.floats(1e-7, 5e-3),
)
def test_analytic_matches_matrix_exponential(p, I1_0, I2_0, V2, t):
    """The closed-form propagator agrees with scipy's expm on random links
    (exercises both the oscillatory and the overdamped branch)."""
    d = derive_params(p)
    got = analytic_envelope(d, d.V1_amp, V2, EnvelopeState(I1_0, I2_0), t)
    ref = _expm_reference(d, d.V1_amp, V2, (I1_0, I2_0), t)
    scale = max(1.0, abs(I1_0), abs(I2_0), np.max(np.abs(ref)))
    assert abs(got.I1 - ref[0]) < 1e-9 * scale
    assert abs(got.I2 - ref[1]) < 1e-9 * scale
    assert got.t == pytest.approx(t)


def test_analytic_overdamped_long_horizon():
    """Heavy damping and weak coupling make the amplitude system overdamped;
    the propagator must stay finite and exact out to horizons where naive
    exp*cosh products overflow."""
    p = CircuitParams(
        L1=1e-6, L2=1e-6, Lm=0.02e-6, R1=1.0, R2=0.9, Vdc=30.0, Vl=30.0, f_res=85e3
    )
    d = derive_params(p)
    x0 = EnvelopeState(3.0, -2.0)
    for t in (1e-6, 1e-4, 0.5):
        got = analytic_envelope(d, d.V1_amp, 10.0, x0, t)
        ref = _expm_reference(d, d.V1_amp, 10.0, (3.0, -2.0), t)
        assert got.I1 == pytest.approx(ref[0], rel=1e-9, abs=1e-12)
        assert got.I2 == pytest.approx(ref[1], rel=1e-9, abs=1e-12)


def test_simulate_hold_at_steady_state_is_exact(derived):
    """Starting on the fixed point, RK4 and the exact propagator both stay
    there bit for bit."""
    V2 = derived.V1_amp
    I1, I2 = steady_state(derived, derived.V1_amp, V2)
    cmd = hold(V2, 2e-3)
    sim = simulate_envelope(derived, cmd, EnvelopeState(I1, I2), 1e-6, 2e-3)
    ref = analytic_chain(derived, cmd, EnvelopeState(I1, I2), 1e-6, 2e-3)
    assert np.array_equal(sim["I1_env"], ref["I1_env"])
    assert np.array_equal(sim["I2_env"], ref["I2_env"])


def test_simulate_fourth_order_convergence(derived):
    """Halving dt shrinks the error against the exact trajectory ~16x."""
    cmd = TimeSeries(1e-3, {"V2_cmd": np.array([derived.V1_amp, 0.0])})
    I1, I2 = steady_state(derived, derived.V1_amp, derived.V1_amp)
    x0 = EnvelopeState(I1, I2)
    dts = np.array([4e-6, 2e-6, 1e-6, 0.5e-6])
    errs = []
    for dt in dts:
        sim = simulate_envelope(derived, cmd, x0, dt, 2e-3)
        ref = analytic_chain(derived, cmd, x0, dt, 2e-3)
        errs.append(np.max(np.abs(sim["I2_env"] - ref["I2_env"])))
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert 3.8 < slope < 4.2


def test_zero_init_trajectory_frozen(derived):
    """Cold start under full rectification drive: ring-up overshoots the
    converged level by ~19% at 4 ms and settles by 20 ms."""
    cmd = hold(derived.V1_amp, 20e-3)
    ts = simulate_envelope(derived, cmd, EnvelopeState(0.0, 0.0), 1e-6, 20e-3)
    i2 = ts["I2_env"]
    assert i2[4000] == pytest.approx(12.546902505074568, abs=1e-4)
    assert i2[-1] == pytest.approx(11.069977971981466, abs=1e-4)


def test_command_zoh_resampling(derived):
    """The command is frozen over each of its own sample intervals; the
    resampled V2_cmd channel flips exactly at the command grid points."""
    cmd = TimeSeries(10e-6, {"V2_cmd": np.array([30.0, 5.0, 20.0])})
    I1, I2 = steady_state(derived, derived.V1_amp, 30.0)
    ts = simulate_envelope(derived, cmd, EnvelopeState(I1, I2), 1e-6, 25e-6)
    v = ts["V2_cmd"]
    assert np.all(v[:10] == 30.0)
    assert np.all(v[10:20] == 5.0)
    assert np.all(v[20:] == 20.0)


def test_determinism(derived):
    cmd = TimeSeries(1e-3, {"V2_cmd": np.array([derived.V1_amp, 3.0])})
    a = simulate_envelope(derived, cmd, EnvelopeState(0.0, 0.0), 1e-6, 2e-3)
    b = simulate_envelope(derived, cmd, EnvelopeState(0.0, 0.0), 1e-6, 2e-3)
    for ch in a.channels:
        assert np.array_equal(a[ch], b[ch])


def test_rejects_underresolved_dt(derived):
    with pytest.raises(ValidationError, match="under-resolves"):
        simulate_envelope(derived, hold(0.0, 1e-3), EnvelopeState(0, 0), 6e-6, 1e-3)


def test_rejects_short_command(derived):
    cmd = TimeSeries(0.5e-3, {"V2_cmd": np.array([0.0, 0.0])})  # covers 1 ms
    with pytest.raises(ValidationError, match="covers"):
        simulate_envelope(derived, cmd, EnvelopeState(0, 0), 1e-6, 2e-3)


def test_rejects_nonpositive_dt(derived):
    with pytest.raises(ValidationError):
        simulate_envelope(derived, hold(0.0, 1e-3), EnvelopeState(0, 0), -1e-6, 1e-3)


def test_divergence_guard(derived, monkeypatch):
    monkeypatch.setattr(wptsbar.envelope, "_AMP_LIMIT", 1e-3)
    with pytest.raises(DivergenceError):
        simulate_envelope(derived, hold(0.0, 1e-3), EnvelopeState(0, 0), 1e-6, 1e-3)
