"""Distance/frequency power-law propagation kernel."""

from __future__ import annotations

import math
from dataclasses import dataclass

from rfpollution.exceptions import ConfigurationError
from rfpollution.units import Meters, Watts, db_to_linear


@dataclass(frozen=True)
class PropagationParams:
    """Path-loss exponent, frequency [GHz], frequency exponent and fixed term [dB].

    With ``c_db=32.4`` and ``eta=2``, ``gamma=2`` reproduces free-space loss
    for frequencies in GHz and distances in meters.
    """

    gamma: float
    f_ghz: float
    eta: float = 2.0
    c_db: float = 32.4

    def __post_init__(self):
        if not 2.0 <= self.gamma <= 4.0:
            raise ConfigurationError(f"gamma must lie in [2, 4], got {self.gamma}")
        if not self.f_ghz > 0:
            raise ConfigurationError(f"frequency must be positive, got {self.f_ghz}")
        if not self.eta >= 0:
            raise ConfigurationError(f"eta must be non-negative, got {self.eta}")
        if not math.isfinite(self.c_db):
            raise ConfigurationError(f"c_db must be finite, got {self.c_db}")

    @property
    def c_linear(self) -> float:
        return db_to_linear(self.c_db)

    @property
    def frequency_loss(self) -> float:
        """Distance-independent part of the loss, f^eta * c."""
        return self.f_ghz**self.eta * self.c_linear


def path_gain(d: Meters, params: PropagationParams) -> float:
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    return 1.0 / (d**params.gamma * params.frequency_loss)


def received_power(pe: Watts, d: Meters, params: PropagationParams) -> Watts:
    if pe < 0:
        raise ValueError(f"emitted power must be non-negative, got {pe}")
    return pe * path_gain(d, params)
