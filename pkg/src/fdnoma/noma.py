"""Power-domain NOMA primitives: allocation coefficients, auditable SINR
breakdowns, the Shannon rate map, and the superposition/SIC decode chain
shared by every scenario evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "PowerAllocation",
    "SinrBreakdown",
    "SicMessage",
    "RateOutcome",
    "sinr",
    "rate_from_sinr",
    "sic_chain",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class PowerAllocation:
    """NOMA coefficients; the weak user always gets the larger share."""

    a1: float = 0.05
    a2: float = 0.95

    def __post_init__(self):
        if not (0.0 < self.a1 < 0.5):
            raise ValueError(f"a1 must lie in (0, 0.5), got {self.a1}")
        if not (0.5 < self.a2 < 1.0):
            raise ValueError(f"a2 must lie in (0.5, 1), got {self.a2}")
        if abs(self.a1 + self.a2 - 1.0) > 1e-12:
            raise ValueError(f"a1 + a2 must equal 1, got {self.a1 + self.a2}")


@dataclass(frozen=True)
class SinrBreakdown:
    """SINR with its constituent powers retained for auditing.

    value is always recomputable as signal / (sum of interference + noise).
    """

    signal: float
    interference: tuple[tuple[str, float], ...]
    noise: float
    value: float = field(init=False)

    def __post_init__(self):
        if not math.isfinite(self.signal) or self.signal < 0:
            raise ValueError(f"signal power must be finite and >= 0, got {self.signal}")
        if not math.isfinite(self.noise) or self.noise <= 0:
            raise ValueError(f"noise power must be finite and > 0, got {self.noise}")
        for name, power in self.interference:
            if not math.isfinite(power) or power < 0:
                raise ValueError(f"interference {name!r} must be finite and >= 0, got {power}")
        object.__setattr__(self, "value", self.signal / (self.total_interference + self.noise))

    @property
    def total_interference(self) -> float:
        return sum(p for _, p in self.interference)


def sinr(signal: float, interference, noise: float) -> SinrBreakdown:
    """Build an auditable SINR from named power terms."""
    return SinrBreakdown(signal=signal, interference=tuple(interference), noise=noise)


def rate_from_sinr(s: float) -> float:
    """Shannon rate log2(1 + s) in bits/s/Hz."""
    if s < 0:
        raise ValueError(f"SINR must be >= 0, got {s}")
    return math.log1p(s) / LN2


@dataclass(frozen=True)
class SicMessage:
    """One message in a SIC decode chain.

    decoders maps node label -> SinrBreakdown at that node. primary is the
    message's intended receiver; the remaining decoders are nodes that must
    also decode it (to cancel it, or to forward it). Decoders listed in
    optional are dropped from the rate-limiting minimum when the chain runs
    with the decodability rule off.
    """

    label: str
    primary: str
    decoders: dict[str, SinrBreakdown]
    optional: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.decoders:
            raise ValueError(f"message {self.label!r} has an empty decoder list")
        if self.primary not in self.decoders:
            raise ValueError(f"message {self.label!r}: primary {self.primary!r} not among decoders")
        if self.primary in self.optional:
            raise ValueError(f"message {self.label!r}: primary decoder cannot be optional")


@dataclass
class RateOutcome:
    """Per-message achievable rates plus the SINR evidence behind them."""

    rates: dict[str, float]
    breakdowns: dict[str, dict[str, SinrBreakdown]]
    sic_feasible: dict[str, bool]

    def sum_rate(self) -> float:
        return math.fsum(self.rates.values())


def sic_chain(messages: list[SicMessage], enforce_decodability: bool = True) -> RateOutcome:
    """Rates of a superposition-coded message set under successive cancellation.

    Messages are listed in decode order, higher-power first. With the
    decodability rule on (the default), a message's rate is limited by the
    worst SINR among every node that must decode it; with it off, decoders
    marked optional stop limiting the rate and their margins are reported only
    through the sic_feasible flags.
    """
    rates: dict[str, float] = {}
    breakdowns: dict[str, dict[str, SinrBreakdown]] = {}
    feasible: dict[str, bool] = {}
    for msg in messages:
        own = msg.decoders[msg.primary].value
        worst = min(b.value for b in msg.decoders.values())
        if enforce_decodability:
            limiting = worst
        else:
            limiting = min(b.value for name, b in msg.decoders.items()
                           if name not in msg.optional)
        rates[msg.label] = rate_from_sinr(limiting)
        breakdowns[msg.label] = dict(msg.decoders)
        feasible[msg.label] = worst >= own - 1e-15 * max(own, 1.0)
    return RateOutcome(rates=rates, breakdowns=breakdowns, sic_feasible=feasible)
