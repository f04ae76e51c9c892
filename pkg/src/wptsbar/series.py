"""Uniformly sampled multi-channel records.

Every engine in this package emits a TimeSeries: a fixed sample interval
plus a dict of equal-length channels.  Time is implicit (sample k sits at
t = k*dt) so a record never stores a redundant time axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass
class TimeSeries:
    dt: float
    channels: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValidationError(f"sample interval must be positive, got {self.dt}")
        lengths = {k: len(v) for k, v in self.channels.items()}
        if len(set(lengths.values())) > 1:
            raise ValidationError(f"channel lengths differ: {lengths}")

    def __len__(self) -> int:
        if not self.channels:
            return 0
        return len(next(iter(self.channels.values())))

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.channels[name]
        except KeyError:
            raise ValidationError(
                f"no channel {name!r}; have {sorted(self.channels)}"
            ) from None

    def sample_zoh(self, name: str, t: float) -> float:
        """Zero-order-hold lookup: value governing the interval containing t."""
        idx = min(int(t / self.dt), len(self) - 1)
        return float(self.channels[name][max(idx, 0)])


def command_channel(ts: TimeSeries, *preferred: str) -> np.ndarray:
    """Pick the command channel out of a record.

    A single-channel record is unambiguous; otherwise the first match from
    `preferred` wins.
    """
    if len(ts.channels) == 1:
        return next(iter(ts.channels.values()))
    for name in preferred:
        if name in ts.channels:
            return ts.channels[name]
    raise ValidationError(
        f"ambiguous command record: channels {sorted(ts.channels)}, "
        f"none of {preferred} present"
    )
