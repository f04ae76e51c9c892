"""Inner integration loop of the switched-circuit engine.

One source of truth: the plain-Python function below is what runs when
numba is unavailable, and the JIT-compiled `kernel` is the same body.  The
loop must stay scalar and allocation-free — it executes ~10^6 steps per
simulated run.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


def _kernel_impl(
    y0,
    s2_0,
    d_cmd,
    dtc,
    n_half,
    n,
    dt,
    k_off,
    centered,
    stride,
    L1,
    L2,
    Lm,
    R1,
    R2,
    C1,
    C2,
    Vdc,
    Vl,
    DD,
):
    """Fixed-step RK4 over n_half half carrier periods of n steps each.

    Records [i1, i2, v2, i_load] every `stride` steps (state at step start,
    mode of that step); one tail row holds the final state.  The gate
    shorts a window of round(d*n) steps per half period; `centered` selects
    a window centered on the half-period boundary (matching f_duty) versus
    one starting at it.  k_off shifts the window in steps.  v2 keeps the
    previous current sign while i2 == 0 exactly (one-step hysteresis).
    """
    N = n_half * n
    M = (N + stride - 1) // stride + 1
    rec = np.empty((M, 4))
    i1 = y0[0]
    i2 = y0[1]
    q1 = y0[2]
    q2 = y0[3]
    s2 = s2_0
    m = len(d_cmd)
    j = 0
    n_sh = 0
    start = 0
    for step in range(N):
        h = step // n
        jj = step - h * n
        if jj == 0:
            # command latched once per half period from its start time
            kc = int((h * n * dt) / dtc + 1e-9)
            if kc >= m:
                kc = m - 1
            n_sh = int(round(d_cmd[kc] * n))
            if centered == 1:
                start = (k_off - n_sh // 2) % n
            else:
                start = k_off % n
        v1 = Vdc if (h & 1) == 0 else -Vdc
        pos = jj - start
        if pos < 0:
            pos += n
        short = pos < n_sh
        if i2 > 0.0:
            s2 = 1.0
        elif i2 < 0.0:
            s2 = -1.0
        v2 = 0.0 if short else s2 * Vl
        if step % stride == 0:
            rec[j, 0] = i1
            rec[j, 1] = i2
            rec[j, 2] = v2
            rec[j, 3] = 0.0 if short else abs(i2)
            j += 1
        e1 = v1 - R1 * i1 - q1 / C1
        e2 = v2 + R2 * i2 + q2 / C2
        k11 = (L2 * e1 - Lm * e2) / DD
        k12 = (Lm * e1 - L1 * e2) / DD
        k13 = i1
        k14 = i2
        a = i1 + 0.5 * dt * k11
        b = i2 + 0.5 * dt * k12
        c = q1 + 0.5 * dt * k13
        d_ = q2 + 0.5 * dt * k14
        e1 = v1 - R1 * a - c / C1
        e2 = v2 + R2 * b + d_ / C2
        k21 = (L2 * e1 - Lm * e2) / DD
        k22 = (Lm * e1 - L1 * e2) / DD
        k23 = a
        k24 = b
        a = i1 + 0.5 * dt * k21
        b = i2 + 0.5 * dt * k22
        c = q1 + 0.5 * dt * k23
        d_ = q2 + 0.5 * dt * k24
        e1 = v1 - R1 * a - c / C1
        e2 = v2 + R2 * b + d_ / C2
        k31 = (L2 * e1 - Lm * e2) / DD
        k32 = (Lm * e1 - L1 * e2) / DD
        k33 = a
        k34 = b
        a = i1 + dt * k31
        b = i2 + dt * k32
        c = q1 + dt * k33
        d_ = q2 + dt * k34
        e1 = v1 - R1 * a - c / C1
        e2 = v2 + R2 * b + d_ / C2
        k41 = (L2 * e1 - Lm * e2) / DD
        k42 = (Lm * e1 - L1 * e2) / DD
        k43 = a
        k44 = b
        i1 += dt / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
        i2 += dt / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
        q1 += dt / 6.0 * (k13 + 2.0 * k23 + 2.0 * k33 + k43)
        q2 += dt / 6.0 * (k14 + 2.0 * k24 + 2.0 * k34 + k44)
    # tail row: final state, last step's drive held
    rec[j, 0] = i1
    rec[j, 1] = i2
    rec[j, 2] = rec[j - 1, 2] if j > 0 else 0.0
    rec[j, 3] = rec[j - 1, 3] if j > 0 else 0.0
    return rec


kernel_py = _kernel_impl
kernel = njit(cache=True)(_kernel_impl) if njit is not None else _kernel_impl
