"""dB / linear conversions.

Model arithmetic is done in linear watts and meters; these helpers are only
used where logarithmic inputs (dB, dBm) enter or leave the package.
"""

import math

# Semantic aliases; values are plain floats.
Watts = float
Dbm = float
Db = float
Meters = float


def db_to_linear(g: Db) -> float:
    if not math.isfinite(g):
        raise ValueError(f"gain must be finite, got {g!r}")
    return 10.0 ** (g / 10.0)


def linear_to_db(x: float) -> Db:
    if not x > 0:
        raise ValueError(f"linear ratio must be positive, got {x!r}")
    return 10.0 * math.log10(x)


def dbm_to_watts(p: Dbm) -> Watts:
    if not math.isfinite(p):
        raise ValueError(f"power must be finite, got {p!r}")
    return 10.0 ** ((p - 30.0) / 10.0)


def watts_to_dbm(p: Watts) -> Dbm:
    if not (p > 0 and math.isfinite(p)):
        raise ValueError(f"power must be positive and finite to express in dBm, got {p!r}")
    return 10.0 * math.log10(p) + 30.0
