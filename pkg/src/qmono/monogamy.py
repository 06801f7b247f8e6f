"""Monogamy scores and the smallest integer power restoring monogamy.

For scores x = Q(A:BC), y = Q(AB), z = Q(AC) with 0 <= y, z < x the predicate
x^m >= y^m + z^m is monotone in m, so the least such m is found by bracketing
and bisection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIGN_TOL = 1e-9
DEFAULT_CAP = 10**6

MONOGAMOUS = "monogamous"
STRICTLY_MONOGAMOUS = "strictly_monogamous"
NON_MONOGAMOUS = "non_monogamous"
NO_FINITE_POWER = "no_finite_power"


class NoFinitePower(ValueError):
    """y >= x or z >= x with y, z > 0: no power of the measure is monogamous."""


class CapExceeded(ValueError):
    """The minimal power is larger than the search cap."""


@dataclass(frozen=True)
class ScoreTriple:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"score {name} must be finite and nonnegative, got {v!r}")
            object.__setattr__(self, name, v)

    def premise_holds(self) -> bool:
        """True when neither pair carries as much correlation as the whole."""
        return self.y <= self.x and self.z <= self.x


def delta_score(t: ScoreTriple, m: int = 1) -> float:
    if m < 1:
        raise ValueError(f"power must be a positive integer, got {m}")
    return t.x**m - t.y**m - t.z**m


def classify(delta: float, tol: float = SIGN_TOL) -> str:
    if delta > tol:
        return STRICTLY_MONOGAMOUS
    if delta >= -tol:
        return MONOGAMOUS
    return NON_MONOGAMOUS


def is_monogamous(t: ScoreTriple, m: int = 1, tol: float = SIGN_TOL) -> bool:
    return delta_score(t, m) >= -tol


def _holds(ry, rz, m):
    return ry**m + rz**m <= 1.0


def min_monogamy_power(t: ScoreTriple, cap: int = DEFAULT_CAP) -> int:
    """Smallest m >= 1 with x^m >= y^m + z^m.

    Raises NoFinitePower when a pair score reaches the joint score (with the
    other pair nonzero), CapExceeded when the answer is above `cap`.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    x, y, z = t.x, t.y, t.z
    if x >= y + z:
        return 1
    if x <= 0 or y >= x or z >= x:
        raise NoFinitePower(f"no power is monogamous for {t}")
    ry, rz = y / x, z / x
    if cap == 1:
        raise CapExceeded("minimal power exceeds cap 1")

    lo, hi = 1, 2  # predicate false at lo
    while not _holds(ry, rz, hi):
        if hi >= cap:
            raise CapExceeded(f"minimal power exceeds cap {cap}")
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _holds(ry, rz, mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class MonogamyRecord:
    triple: ScoreTriple
    delta: float
    min_power: int | None
    status: str
    power: int = 1

    def as_dict(self):
        return {
            "x": self.triple.x,
            "y": self.triple.y,
            "z": self.triple.z,
            "power": self.power,
            "delta": self.delta,
            "min_power": self.min_power,
            "status": self.status,
        }


def monogamy_record(t: ScoreTriple, power: int = 1, cap: int = DEFAULT_CAP,
                    tol: float = SIGN_TOL) -> MonogamyRecord:
    """Score at `power`, its classification, and the minimal restoring power.

    Status is ``no_finite_power`` only when the state is non-monogamous at
    `power` and no power can fix it.
    """
    delta = delta_score(t, power)
    status = classify(delta, tol)
    try:
        mp = 1 if delta_score(t, 1) >= -tol else min_monogamy_power(t, cap)
    except NoFinitePower:
        mp = None
        if status == NON_MONOGAMOUS:
            status = NO_FINITE_POWER
    except CapExceeded:
        mp = None
    return MonogamyRecord(t, delta, mp, status, power)
