"""Circuit model of a series-series compensated inductive power link.

Both coils carry a series tuning capacitor resonant at the operating
frequency (C_i = 1/(omega^2 L_i)).  The primary is fed by a full-bridge
inverter switching at the resonant frequency, the secondary feeds a
battery-like constant-voltage load through a semi-bridgeless active
rectifier (SBAR).  For the fundamental-component (envelope) description the
drive amplitudes are

    v1 -> V1 = (4/pi) Vdc          (inverter square wave),
    v2 -> V2 = (4/pi) Vl * (1 - sin(pi d/2))   (rectifier, see controller.f_duty)

and the current amplitudes I1, I2 obey a linear 2x2 system: V1 drives the
primary, the reflected load voltage V2 opposes the secondary, so raising V2
lowers I2 (the amplitude transfer function V2 -> I2 has negative DC gain
-beta2/omega_n^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class CircuitParams:
    """Electrical constants of the link.

    L1, L2   coil self-inductances [H]
    Lm       mutual inductance [H]
    R1, R2   series loss resistances [ohm]
    Vdc      inverter DC bus voltage [V]
    Vl       load (battery) voltage [V]
    f_res    operating = resonant frequency [Hz]
    """

    L1: float
    L2: float
    Lm: float
    R1: float
    R2: float
    Vdc: float
    Vl: float
    f_res: float

    def __post_init__(self):
        for name in ("L1", "L2", "Lm", "R1", "R2", "Vdc", "Vl", "f_res"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0.0:
                raise ValidationError(f"{name} must be finite and positive, got {v}")
        if self.Lm * self.Lm >= self.L1 * self.L2:
            raise ValidationError(
                f"coupling must be below unity: Lm^2={self.Lm**2:.3e} "
                f">= L1*L2={self.L1 * self.L2:.3e}"
            )


# 85 kHz / 30 V bench link used by the reproduction scenarios and the tests.
DEFAULT_PARAMS = CircuitParams(
    L1=236e-6,
    L2=18.9e-6,
    Lm=6.25e-6,
    R1=108e-3,
    R2=32.5e-3,
    Vdc=30.0,
    Vl=30.0,
    f_res=85e3,
)


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived from CircuitParams under the resonance condition.

    omega     angular operating frequency [rad/s]
    C1, C2    series tuning capacitances [F]
    zeta      damping ratio of the amplitude dynamics
    omega_n   natural frequency of the amplitude dynamics [rad/s]
    alpha1, beta1, alpha2, beta2, gamma
              amplitude transfer-function coefficients:
                 I1 = [ (alpha1 s + beta1) V1 + gamma V2 ] / D(s)
                 I2 = [ gamma V1 - (alpha2 s + beta2) V2 ] / D(s)
              with D(s) = s^2 + 2 zeta omega_n s + omega_n^2
    V1_amp    inverter fundamental amplitude (4/pi) Vdc [V]
    """

    omega: float
    C1: float
    C2: float
    zeta: float
    omega_n: float
    alpha1: float
    beta1: float
    alpha2: float
    beta2: float
    gamma: float
    V1_amp: float
    circuit: CircuitParams


def derive_params(p: CircuitParams) -> DerivedParams:
    omega = 2.0 * math.pi * p.f_res
    denom = 4.0 * p.L1 * p.L2
    omega_n = math.sqrt((p.R1 * p.R2 + (omega * p.Lm) ** 2) / denom)
    zeta = (p.R1 / (2.0 * p.L1) + p.R2 / (2.0 * p.L2)) / (2.0 * omega_n)
    return DerivedParams(
        omega=omega,
        C1=1.0 / (omega**2 * p.L1),
        C2=1.0 / (omega**2 * p.L2),
        zeta=zeta,
        omega_n=omega_n,
        alpha1=1.0 / (2.0 * p.L1),
        beta1=p.R2 / denom,
        alpha2=1.0 / (2.0 * p.L2),
        beta2=p.R1 / denom,
        gamma=omega * p.Lm / denom,
        V1_amp=4.0 / math.pi * p.Vdc,
        circuit=p,
    )


def envelope_matrices(d: DerivedParams) -> tuple[np.ndarray, np.ndarray]:
    """State-space form of the amplitude dynamics.

    d[I1 I2]/dt = A [I1 I2] + B [V1 V2].  Note the -1/(2 L2) entry: the
    rectified load voltage opposes the secondary current.
    """
    p = d.circuit
    wlm = d.omega * p.Lm
    A = np.array(
        [
            [-p.R1 / (2.0 * p.L1), -wlm / (2.0 * p.L1)],
            [wlm / (2.0 * p.L2), -p.R2 / (2.0 * p.L2)],
        ]
    )
    B = np.array([[1.0 / (2.0 * p.L1), 0.0], [0.0, -1.0 / (2.0 * p.L2)]])
    return A, B


def steady_state(d: DerivedParams, V1: float, V2: float) -> tuple[float, float]:
    """Converged amplitudes for constant drive: the unique solution of

        R1 I1 + omega Lm I2 = V1
        omega Lm I1 - R2 I2 = V2

    (equivalently the s->0 limit of the amplitude transfer functions).
    """
    p = d.circuit
    wlm = d.omega * p.Lm
    det = p.R1 * p.R2 + wlm * wlm
    I1 = (p.R2 * V1 + wlm * V2) / det
    I2 = (wlm * V1 - p.R1 * V2) / det
    return I1, I2


@dataclass(frozen=True)
class TransferFn2x1:
    """sign * (num[0] s + num[1]) / (den[0] s^2 + den[1] s + den[2])."""

    num: tuple[float, float]
    den: tuple[float, float, float]
    sign: int

    def dc_gain(self) -> float:
        return self.sign * self.num[1] / self.den[2]

    def as_polynomials(self) -> tuple[np.ndarray, np.ndarray]:
        return self.sign * np.asarray(self.num, float), np.asarray(self.den, float)


def g22(d: DerivedParams) -> TransferFn2x1:
    """Amplitude transfer function V2 -> I2: -(alpha2 s + beta2)/D(s).

    DC gain is -beta2/omega_n^2 < 0; this is the plant the inverse
    compensator cancels.
    """
    return TransferFn2x1(
        num=(d.alpha2, d.beta2),
        den=(1.0, 2.0 * d.zeta * d.omega_n, d.omega_n**2),
        sign=-1,
    )
