"""Proper time along piecewise worldlines and the four experiment builders.

Units are c = 1: velocities are fractions of c, potentials are Phi/c^2, and
proper accelerations are in c per unit coordinate time.  Every segment
reports its proper time as ``duration + offset``; differences between
worldlines are formed from these parts in one exactly-rounded sum so that
shared segments cancel exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .clock import ClockSpec, accumulated_phase, adaptive_simpson
from .errors import ConfigError, ContractError, DomainError

WEAK_FIELD_LIMIT = 1e-2
RATE_SLACK = 1e-2
_RATE_CHECK_POINTS = 257


@dataclass(frozen=True)
class Inertial:
    velocity: float
    duration: float

    def validate(self):
        _positive_duration(self)
        if not abs(self.velocity) < 1.0:
            raise DomainError(f"inertial segment needs |v| < 1, got v={self.velocity}")

    def offset(self) -> float:
        # sqrt(1 - v^2) - 1 rewritten to avoid cancellation at small v
        v2 = self.velocity * self.velocity
        return -self.duration * v2 / (1.0 + math.sqrt(1.0 - v2))


@dataclass(frozen=True)
class ProperAcceleration:
    """Constant proper acceleration starting (or, time-reversed, ending) at rest."""

    acceleration: float
    duration: float

    def validate(self):
        _positive_duration(self)
        if not math.isfinite(self.acceleration):
            raise DomainError(f"acceleration must be finite, got {self.acceleration}")

    def offset(self) -> float:
        a, t = self.acceleration, self.duration
        if a == 0.0:
            return 0.0
        x = abs(a) * t
        if x < 1e-4:
            # series of asinh(x)/x - 1
            return t * (-x * x / 6.0 + 3.0 * x ** 4 / 40.0)
        return math.asinh(x) / abs(a) - t

    def final_velocity(self) -> float:
        at = self.acceleration * self.duration
        return at / math.sqrt(1.0 + at * at)


@dataclass(frozen=True)
class StaticPotential:
    phi: float
    duration: float

    def validate(self):
        _positive_duration(self)
        if not abs(self.phi) < WEAK_FIELD_LIMIT:
            raise DomainError(f"static potential needs |phi| < {WEAK_FIELD_LIMIT}, got {self.phi}")

    def offset(self) -> float:
        return self.duration * self.phi


@dataclass(frozen=True)
class PrescribedRate:
    """Dilation rate ``dtau/dt = 1 + deviation(t)``, t measured from the segment start.

    The deviation is stored rather than the rate itself so that tiny
    dilations keep full relative precision through quadrature.
    """

    deviation: Callable[[float], float]
    duration: float

    def rate(self, t: float) -> float:
        return 1.0 + self.deviation(t)

    def validate(self):
        _positive_duration(self)
        ts = np.linspace(0.0, self.duration, _RATE_CHECK_POINTS)
        rates = np.array([self.rate(float(t)) for t in ts])
        if not np.all(np.isfinite(rates)):
            raise DomainError("prescribed rate is not finite on the segment")
        if rates.min() <= 0.0 or rates.max() > 1.0 + RATE_SLACK:
            raise DomainError(
                f"prescribed rate must lie in (0, {1 + RATE_SLACK}], "
                f"got range [{rates.min():.6g}, {rates.max():.6g}]"
            )

    def offset(self) -> float:
        scale = max(abs(self.deviation(float(t))) for t in np.linspace(0.0, self.duration, 17))
        tol = max(scale * self.duration * 1e-13, 1e-300)
        return adaptive_simpson(self.deviation, 0.0, self.duration, tol=tol)


Segment = Union[Inertial, ProperAcceleration, StaticPotential, PrescribedRate]


def _positive_duration(seg):
    if not (math.isfinite(seg.duration) and seg.duration > 0.0):
        raise DomainError(f"{type(seg).__name__} duration must be positive, got {seg.duration}")


@dataclass(frozen=True)
class Worldline:
    segments: tuple[Segment, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise DomainError(f"worldline {self.label!r} has no segments")
        for seg in self.segments:
            seg.validate()

    @property
    def coordinate_duration(self) -> float:
        return math.fsum(s.duration for s in self.segments)

    def segment_proper_times(self) -> list[float]:
        return [s.duration + s.offset() for s in self.segments]

    def windows(self, kind: type) -> list[tuple[float, float]]:
        """Proper-time intervals occupied by segments of the given kind."""
        out = []
        parts: list[float] = []
        for seg in self.segments:
            start = math.fsum(parts)
            parts += [seg.duration, seg.offset()]
            if isinstance(seg, kind):
                out.append((start, math.fsum(parts)))
        return out


def _parts(w: Worldline) -> list[float]:
    out = []
    for s in w.segments:
        out += [s.duration, s.offset()]
    return out


def proper_time(w: Worldline) -> float:
    return math.fsum(_parts(w))


def proper_time_difference(a: Worldline, b: Worldline) -> float:
    """``proper_time(a) - proper_time(b)`` with shared segments cancelling exactly."""
    return math.fsum(_parts(a) + [-x for x in _parts(b)])


# -- scenario builders ------------------------------------------------------

def acceleration_to(velocity: float, acceleration: float) -> ProperAcceleration:
    """Segment that brings a clock from rest to ``velocity`` at proper acceleration ``a``."""
    if not abs(velocity) < 1.0:
        raise ConfigError(f"velocity must satisfy |v| < 1, got {velocity}")
    if not acceleration > 0.0:
        raise ConfigError(f"acceleration must be positive, got {acceleration}")
    gamma = 1.0 / math.sqrt(1.0 - velocity * velocity)
    return ProperAcceleration(acceleration, abs(velocity) * gamma / acceleration)


def build_twin_scenario(
    velocity: float,
    leg_duration: float,
    accel_profile: ProperAcceleration | None = None,
    matched: bool = True,
) -> tuple[Worldline, Worldline]:
    """Stay-home clock A and traveller B.

    B accelerates, coasts at ``+v``, turns around (two acceleration segments),
    coasts at ``-v`` and decelerates.  With ``matched`` A executes the same four
    acceleration segments back to back and rests for the remaining coordinate
    time; otherwise A rests throughout.  ``accel_profile=None`` is the
    instantaneous-turnaround limit.
    """
    if not abs(velocity) < 1.0:
        raise ConfigError(f"velocity must satisfy |v| < 1, got {velocity}")
    if not leg_duration > 0.0:
        raise ConfigError(f"leg duration must be positive, got {leg_duration}")
    v = abs(velocity)
    if v == 0.0:
        rest = StaticPotential(0.0, 2.0 * leg_duration)
        return Worldline((rest,), "A"), Worldline((rest,), "B")

    accel: list[Segment] = []
    if accel_profile is not None:
        accel_profile.validate()
        reached = abs(accel_profile.final_velocity())
        if not math.isclose(reached, v, rel_tol=1e-9):
            raise ConfigError(
                f"acceleration profile reaches |v|={reached:.12g}, expected {v:.12g}"
            )
        accel = [accel_profile] * 4

    out_leg = Inertial(v, leg_duration)
    back_leg = Inertial(-v, leg_duration)
    if accel:
        traveller = [accel[0], out_leg, accel[1], accel[2], back_leg, accel[3]]
    else:
        traveller = [out_leg, back_leg]
    rest = StaticPotential(0.0, 2.0 * leg_duration)
    home = accel + [rest] if matched else [StaticPotential(0.0, _total(traveller))]
    return Worldline(tuple(home), "A"), Worldline(tuple(traveller), "B")


def _total(segs):
    return math.fsum(s.duration for s in segs)


def build_gravity_lift_scenario(
    g: float, h: float, wait: float, transport: PrescribedRate
) -> tuple[Worldline, Worldline]:
    """Both clocks ride the same transport up; A comes straight down, B waits at ``g*h``.

    The descent replays ``transport`` unchanged for both clocks, so transport
    segments cancel exactly in the proper-time difference.
    """
    phi = g * h
    if not abs(phi) < WEAK_FIELD_LIMIT:
        raise DomainError(f"weak-field guard violated: g*h = {phi}")
    if wait < 0.0:
        raise DomainError(f"wait must be non-negative, got {wait}")
    transport.validate()
    if wait == 0.0:
        segs = (transport, transport)
        return Worldline(segs, "A"), Worldline(segs, "B")
    a = (transport, transport, StaticPotential(0.0, wait))
    b = (transport, StaticPotential(phi, wait), transport)
    return Worldline(a, "A"), Worldline(b, "B")


def build_gw_disk_scenario(
    amplitude: float, omega: float, duration: float, phase_offset: float = 0.0
) -> tuple[Worldline, Worldline]:
    """Two clocks on a resonantly rotating disk, modelled as antisymmetric dilation rates."""
    if not abs(amplitude) < WEAK_FIELD_LIMIT:
        raise DomainError(f"amplitude must be below {WEAK_FIELD_LIMIT}, got {amplitude}")
    a_ = float(amplitude)
    w_ = float(omega)
    p_ = float(phase_offset)
    rate_a = PrescribedRate(lambda t: a_ * math.sin(w_ * t + p_), duration)
    rate_b = PrescribedRate(lambda t: -a_ * math.sin(w_ * t + p_), duration)
    return Worldline((rate_a,), "A"), Worldline((rate_b,), "B")


def acceleration_effect(
    measured_phase: float, sr_worldlines: tuple[Worldline, Worldline], clock: ClockSpec
) -> float:
    """Residual of a measured relative phase after removing the kinematic prediction."""
    gap = clock.constant_gap
    if gap is None:
        raise ContractError("acceleration_effect needs a constant-gap clock")
    wa, wb = sr_worldlines
    return measured_phase - gap * proper_time_difference(wa, wb)


def perturbed_phase(
    worldlines: tuple[Worldline, Worldline],
    clock: ClockSpec,
    epsilon: float,
    targets: Sequence[str] = ("A", "B"),
    kind: type = ProperAcceleration,
) -> float:
    """Relative phase when the gap is shifted by ``epsilon`` inside ``kind`` segments."""
    wa, wb = worldlines
    ca = ClockSpec(label="A", baseline=clock.baseline)
    cb = ClockSpec(label="B", baseline=clock.baseline)
    if "A" in targets:
        ca = ca.perturbed(wa.windows(kind), epsilon)
    if "B" in targets:
        cb = cb.perturbed(wb.windows(kind), epsilon)
    return accumulated_phase(ca, proper_time(wa), cb, proper_time(wb))
