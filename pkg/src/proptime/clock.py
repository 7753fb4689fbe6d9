"""Two-level clock algebra: free and pair evolution, Bell decomposition, phase integrals."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ContractError, DomainError, SubspaceError
from .qstate import SINGLET, TRIPLET0, StateVector

GapValue = Union[float, Callable[[float], float]]


@dataclass(frozen=True)
class GapPiece:
    """Gap override on the proper-time interval ``[start, end)``."""

    start: float
    end: float
    value: GapValue

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)) or self.end <= self.start:
            raise DomainError(f"bad gap piece interval [{self.start}, {self.end})")
        if not callable(self.value):
            if not math.isfinite(self.value) or self.value < 0:
                raise DomainError(f"gap value {self.value} must be finite and non-negative")

    def at(self, tau: float) -> float:
        return float(self.value(tau)) if callable(self.value) else float(self.value)


@dataclass(frozen=True)
class ClockSpec:
    """Energy gap E(tau) of one clock as a function of its own proper time.

    ``baseline`` applies wherever no piece is active; pieces may not overlap.
    A clock with no pieces has a constant gap and period ``pi / E``.
    """

    label: str = "A"
    baseline: float = 1.0
    pieces: tuple[GapPiece, ...] = ()

    def __post_init__(self):
        if not math.isfinite(self.baseline) or self.baseline < 0:
            raise DomainError(f"baseline gap {self.baseline} must be finite and non-negative")
        ordered = tuple(sorted(self.pieces, key=lambda p: p.start))
        for a, b in zip(ordered, ordered[1:]):
            if b.start < a.end:
                raise DomainError(f"gap pieces overlap at tau={b.start}")
        object.__setattr__(self, "pieces", ordered)

    @classmethod
    def constant(cls, gap: float, label: str = "A") -> "ClockSpec":
        return cls(label=label, baseline=float(gap))

    @property
    def constant_gap(self) -> float | None:
        return self.baseline if not self.pieces else None

    @property
    def period(self) -> float:
        if self.constant_gap is None:
            raise ContractError("period is only defined for a constant gap")
        if self.baseline == 0.0:
            return math.inf
        return math.pi / self.baseline

    def gap(self, tau: float) -> float:
        for p in self.pieces:
            if p.start <= tau < p.end:
                e = p.at(tau)
                if not math.isfinite(e) or e < 0:
                    raise DomainError(f"gap {e} at tau={tau} is not a finite non-negative value")
                return e
        return self.baseline

    def with_pieces(self, pieces: Sequence[GapPiece]) -> "ClockSpec":
        return replace(self, pieces=tuple(self.pieces) + tuple(pieces))

    def perturbed(self, windows: Sequence[tuple[float, float]], epsilon: float) -> "ClockSpec":
        """Add ``epsilon`` to the baseline gap inside each proper-time window."""
        if self.pieces:
            raise ContractError("perturbation windows require a clock without pieces")
        pieces = [GapPiece(a, b, self.baseline + epsilon) for a, b in windows if b > a]
        return replace(self, pieces=tuple(pieces))


# -- quadrature -------------------------------------------------------------

def _simpson(f, a, fa, m, fm, b, fb):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-12, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature with Richardson correction."""
    if b == a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(f, a, fa, m, fm, b, fb)
    # explicit stack keeps deep refinement off the Python recursion limit
    total = []
    stack = [(a, fa, m, fm, b, fb, whole, tol, max_depth)]
    while stack:
        a_, fa_, m_, fm_, b_, fb_, whole_, tol_, depth = stack.pop()
        lm, rm = 0.5 * (a_ + m_), 0.5 * (m_ + b_)
        flm, frm = f(lm), f(rm)
        left = _simpson(f, a_, fa_, lm, flm, m_, fm_)
        right = _simpson(f, m_, fm_, rm, frm, b_, fb_)
        delta = left + right - whole_
        if depth <= 0 or abs(delta) <= 15.0 * tol_:
            total.append(left + right + delta / 15.0)
        else:
            stack.append((a_, fa_, lm, flm, m_, fm_, left, 0.5 * tol_, depth - 1))
            stack.append((m_, fm_, rm, frm, b_, fb_, right, 0.5 * tol_, depth - 1))
    if not all(math.isfinite(x) for x in total):
        raise DomainError(f"integrand is not finite on [{a}, {b}]")
    return math.fsum(total)


def _phase_terms(clock: ClockSpec, tau: float) -> list[float]:
    """Contributions to the integral of E over [0, tau], one per constant or smooth stretch."""
    if tau < 0:
        raise DomainError(f"proper time {tau} is negative")
    terms = []
    cursor = 0.0
    for p in clock.pieces:
        if p.start >= tau:
            break
        lo, hi = max(p.start, 0.0), min(p.end, tau)
        if lo > cursor:
            terms.append(clock.baseline * (lo - cursor))
        if hi > lo:
            if callable(p.value):
                terms.append(adaptive_simpson(lambda s, p=p: _checked(p, s), lo, hi, tol=1e-13))
            else:
                terms.append(float(p.value) * (hi - lo))
        cursor = max(cursor, hi)
    if tau > cursor:
        terms.append(clock.baseline * (tau - cursor))
    return terms


def _checked(piece: GapPiece, tau: float) -> float:
    e = piece.at(tau)
    if not math.isfinite(e) or e < 0:
        raise DomainError(f"gap {e} at tau={tau} is undefined or negative")
    return e


def integrated_phase(clock: ClockSpec, tau: float) -> float:
    """Integral of the gap over the clock's proper time ``[0, tau]``."""
    return math.fsum(_phase_terms(clock, tau))


def accumulated_phase(clock_a: ClockSpec, tau_a: float, clock_b: ClockSpec, tau_b: float) -> float:
    """Relative phase ``int_0^tau_a E_A - int_0^tau_b E_B``.

    Terms are summed in one exactly-rounded pass so identical contributions on
    both sides cancel exactly.
    """
    return math.fsum(_phase_terms(clock_a, tau_a) + [-x for x in _phase_terms(clock_b, tau_b)])


# -- evolution --------------------------------------------------------------

def _rotate(amps: np.ndarray, phase: float) -> np.ndarray:
    return amps * np.array([np.exp(1j * phase), np.exp(-1j * phase)])


def free_evolve(s: StateVector, clock: ClockSpec, tau: float) -> StateVector:
    """Free evolution over proper time ``tau``: |0> gains exp(+i Phi), |1> exp(-i Phi)."""
    if s.dim != 2:
        raise ContractError(f"free_evolve acts on a single clock, got dim {s.dim}")
    return StateVector(_rotate(s.amplitudes, integrated_phase(clock, tau)))


def pair_evolve(pair: StateVector, clock_a: ClockSpec, tau_a: float,
                clock_b: ClockSpec, tau_b: float) -> StateVector:
    if pair.dim != 4:
        raise ContractError(f"pair_evolve needs a two-clock state, got dim {pair.dim}")
    phi_a = integrated_phase(clock_a, tau_a)
    phi_b = integrated_phase(clock_b, tau_b)
    ua = np.array([np.exp(1j * phi_a), np.exp(-1j * phi_a)])
    ub = np.array([np.exp(1j * phi_b), np.exp(-1j * phi_b)])
    return StateVector(np.kron(ua, ub) * pair.amplitudes)


@dataclass(frozen=True)
class BellDecomposition:
    c_minus: complex
    c_plus: complex

    @property
    def singlet_probability(self) -> float:
        return abs(self.c_minus) ** 2

    @property
    def triplet_probability(self) -> float:
        return abs(self.c_plus) ** 2


def bell_decompose(pair: StateVector, atol: float = 1e-9) -> BellDecomposition:
    """Coefficients of ``pair`` on the singlet and the m=0 triplet."""
    if pair.dim != 4:
        raise ContractError(f"bell_decompose needs dim 4, got {pair.dim}")
    c_minus = SINGLET.inner(pair)
    c_plus = TRIPLET0.inner(pair)
    leak = pair.norm ** 2 - abs(c_minus) ** 2 - abs(c_plus) ** 2
    if leak >= atol:
        raise SubspaceError(f"state has weight {leak:.3e} outside span{{singlet, triplet}}")
    return BellDecomposition(c_minus, c_plus)


def triplet_probability(e_delta_t: float) -> float:
    return math.sin(e_delta_t) ** 2
