"""Finite-width pointer measurements of one clock or of a clock pair.

The system is coupled to one ancilla qubit (initially |0>) through
``g(t) * O (x) sigma_x`` where ``g`` is a truncated Gaussian envelope of
standard deviation ``delta_t`` and total area ``theta``.  The full
system + ancilla Schrodinger equation is integrated across the window
``t_m +/- k*delta_t`` and only the ancilla is read out.

* separate scheme: ``O = sigma_x`` on a single clock.  With ``theta = pi/4``
  the two sigma_x eigenstates steer the ancilla to orthogonal sigma_y
  eigenstates, read out as the |0bar> / |1bar> outcomes.
* entangled scheme: ``O`` is the total spin squared of the pair.  With
  ``theta = pi/16`` the eigenvalue 8 rotates the ancilla to |1> while the
  singlet leaves it at |0>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import erf

from .clock import ClockSpec, bell_decompose
from .errors import ContractError
from .qstate import (
    IDENTITY2,
    KET0,
    SIGMA_X,
    SIGMA_Z,
    StateVector,
    integrate,
    tensor,
    total_spin_squared,
)


class Observable(str, Enum):
    SIGMA_X_SINGLE = "sigma_x_single"
    TOTAL_SPIN_SQUARED_PAIR = "total_spin_squared_pair"


class Readout(str, Enum):
    SIGMA_Y = "sigma_y"
    COMPUTATIONAL = "computational"


DEFAULT_AREA = {
    Observable.SIGMA_X_SINGLE: math.pi / 4,
    Observable.TOTAL_SPIN_SQUARED_PAIR: math.pi / 16,
}
DEFAULT_READOUT = {
    Observable.SIGMA_X_SINGLE: Readout.SIGMA_Y,
    Observable.TOTAL_SPIN_SQUARED_PAIR: Readout.COMPUTATIONAL,
}


@dataclass(frozen=True)
class MeasurementConfig:
    observable: Observable
    pulse_halfwidth: float
    pulse_center: float = 0.0
    pulse_area: float | None = None
    readout_basis: Readout | None = None
    truncation: float = 5.0
    tol: float = 1e-9

    def __post_init__(self):
        obs = Observable(self.observable)
        object.__setattr__(self, "observable", obs)
        if self.pulse_area is None:
            object.__setattr__(self, "pulse_area", DEFAULT_AREA[obs])
        if self.readout_basis is None:
            object.__setattr__(self, "readout_basis", DEFAULT_READOUT[obs])
        object.__setattr__(self, "readout_basis", Readout(self.readout_basis))
        if not (math.isfinite(self.pulse_halfwidth) and self.pulse_halfwidth > 0):
            raise ContractError(f"pulse half-width must be positive, got {self.pulse_halfwidth}")
        if not 0.0 < self.pulse_area <= math.pi:
            raise ContractError(f"pulse area must lie in (0, pi], got {self.pulse_area}")
        if not self.truncation > 0:
            raise ContractError("truncation must be positive")

    @classmethod
    def separate(cls, pulse_halfwidth: float, **kw) -> "MeasurementConfig":
        return cls(Observable.SIGMA_X_SINGLE, pulse_halfwidth, **kw)

    @classmethod
    def entangled(cls, pulse_halfwidth: float, **kw) -> "MeasurementConfig":
        return cls(Observable.TOTAL_SPIN_SQUARED_PAIR, pulse_halfwidth, **kw)

    @property
    def window(self) -> tuple[float, float]:
        half = self.truncation * self.pulse_halfwidth
        return self.pulse_center - half, self.pulse_center + half

    def envelope(self, t: float) -> float:
        """Gaussian envelope, renormalized so its integral over the window is the pulse area."""
        lo, hi = self.window
        if t < lo or t > hi:
            return 0.0
        s = self.pulse_halfwidth
        norm = erf(self.truncation / math.sqrt(2.0))
        return (self.pulse_area / (s * math.sqrt(2.0 * math.pi) * norm)
                * math.exp(-0.5 * ((t - self.pulse_center) / s) ** 2))


@dataclass(frozen=True)
class MeasurementOutcome:
    labels: tuple[str, ...]
    probabilities: tuple[float, ...]
    visibility: float | None = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if len(p) != len(self.labels):
            raise ContractError("labels and probabilities differ in length")
        if np.any(p < -1e-12) or np.any(p > 1 + 1e-12) or abs(p.sum() - 1.0) > 1e-9:
            raise ContractError(f"invalid probability vector {p}")
        object.__setattr__(self, "probabilities", tuple(float(x) for x in np.clip(p, 0.0, 1.0)))

    def probability(self, label: str) -> float:
        return self.probabilities[self.labels.index(label)]


SEPARATE_LABELS = ("0bar", "1bar")
ENTANGLED_LABELS = ("singlet", "triplet")

# ancilla vector selecting the first outcome label of each readout
_READOUT_VECTOR = {
    Readout.SIGMA_Y: np.array([1.0, -1.0j]) / math.sqrt(2.0),
    Readout.COMPUTATIONAL: np.array([1.0, 0.0], dtype=complex),
}


def _ancilla_probabilities(psi: np.ndarray, readout: Readout) -> tuple[float, float]:
    """Two-outcome ancilla statistics for a state whose last factor is the ancilla."""
    m = psi.reshape(-1, 2)  # rows: system index, columns: ancilla
    v = _READOUT_VECTOR[readout]
    amp = m @ v.conj()
    p0 = float(np.vdot(amp, amp).real)
    total = float(np.vdot(psi, psi).real)
    p0 = min(max(p0 / total, 0.0), 1.0)
    return p0, 1.0 - p0


def _max_step(cfg: MeasurementConfig) -> float:
    # keeps the adaptive stepper from striding over the envelope peak
    return 0.25 * cfg.pulse_halfwidth


# -- separate scheme --------------------------------------------------------

@lru_cache(maxsize=256)
def _separate_response(gap: float, cfg: MeasurementConfig) -> np.ndarray:
    """Final system (x) ancilla states for system inputs |0> and |1> (columns)."""
    h_free = gap * tensor(SIGMA_Z, IDENTITY2).matrix
    h_int = tensor(SIGMA_X, SIGMA_X).matrix

    def hamiltonian(t):
        return h_free + cfg.envelope(t) * h_int

    t0, t1 = cfg.window
    cols = []
    for basis in (np.array([1, 0, 0, 0], complex), np.array([0, 0, 1, 0], complex)):
        psi, _ = integrate(basis, hamiltonian, t0, t1, tol=cfg.tol,
                           max_step=_max_step(cfg))
        cols.append(psi)
    out = np.stack(cols, axis=1)
    out.setflags(write=False)
    return out


def separate_measurement(
    s: StateVector,
    clock: ClockSpec,
    cfg: MeasurementConfig,
    prepared_at: float | None = None,
) -> MeasurementOutcome:
    """|0bar> / |1bar> statistics of a single clock read through the pointer.

    ``s`` is the clock state at the start of the window unless ``prepared_at``
    names another time, in which case ``s`` is moved there by free evolution.
    """
    if cfg.observable is not Observable.SIGMA_X_SINGLE:
        raise ContractError(f"separate_measurement needs sigma_x_single, got {cfg.observable.value}")
    if s.dim != 2:
        raise ContractError(f"separate_measurement acts on one clock, got dim {s.dim}")
    gap = clock.constant_gap
    if gap is None:
        raise ContractError("separate_measurement needs a constant-gap clock")
    amps = s.amplitudes
    if prepared_at is not None:
        shift = prepared_at - cfg.window[0]
        amps = amps * np.array([np.exp(-1j * gap * shift), np.exp(1j * gap * shift)])
    # linear in the input, so two propagations serve every preparation
    psi = _separate_response(float(gap), cfg) @ amps
    p0, p1 = _ancilla_probabilities(psi, cfg.readout_basis)
    return MeasurementOutcome(SEPARATE_LABELS, (p0, p1))


def fringe_preparation(phase: float) -> StateVector:
    """``(exp(i phase)|0> + exp(-i phase)|1>)/sqrt(2)``; P(0bar) = cos^2(phase) ideally."""
    return StateVector([np.exp(1j * phase), np.exp(-1j * phase)])


def fringe(clock: ClockSpec, cfg: MeasurementConfig, phase_grid: Sequence[float]) -> np.ndarray:
    """P(0bar) for each preparation phase, phases quoted at the pulse centre."""
    return np.array([
        separate_measurement(fringe_preparation(p), clock, cfg, prepared_at=cfg.pulse_center)
        .probabilities[0]
        for p in phase_grid
    ])


def fringe_visibility(clock: ClockSpec, cfg: MeasurementConfig,
                      phase_grid: Sequence[float] | None = None) -> float:
    """Fringe contrast (max - min of P(0bar)) relative to the same pointer with the clock stopped.

    For the default pi/4 pointer the stopped-clock contrast is exactly one, so
    this is the raw contrast.  A weaker pointer has a smaller intrinsic
    contrast, which is divided out.
    """
    if cfg.observable is not Observable.SIGMA_X_SINGLE:
        raise ContractError("fringe_visibility needs the sigma_x_single observable")
    if phase_grid is None:
        phase_grid = np.linspace(0.0, math.pi, 32, endpoint=False)
    grid = np.asarray(phase_grid, dtype=float)
    # P(0bar) has period pi in the preparation phase
    if grid.size < 16 or np.ptp(grid) < math.pi * (1.0 - 1.0 / grid.size) - 1e-12:
        raise ContractError("phase grid must cover a full fringe period with at least 16 points")
    p = fringe(clock, cfg, grid)
    p_ref = fringe(ClockSpec.constant(0.0, clock.label), cfg, grid)
    return float(np.ptp(p) / np.ptp(p_ref))


def visibility_oracle(gap: float, cfg: MeasurementConfig) -> float:
    """``|int g_hat(t) exp(2iEt) dt|`` for the unit-area envelope, by quadrature."""
    lo, hi = cfg.window

    def unit(t):
        return cfg.envelope(t) / cfg.pulse_area

    re = sp_integrate.quad(lambda t: unit(t) * math.cos(2 * gap * t), lo, hi,
                           limit=2000, epsabs=1e-14, epsrel=1e-12)[0]
    im = sp_integrate.quad(lambda t: unit(t) * math.sin(2 * gap * t), lo, hi,
                           limit=2000, epsabs=1e-14, epsrel=1e-12)[0]
    return math.hypot(re, im)


# -- entangled scheme -------------------------------------------------------

def entangled_measurement(
    pair: StateVector, clock_a: ClockSpec, clock_b: ClockSpec, cfg: MeasurementConfig
) -> MeasurementOutcome:
    """Singlet / triplet statistics of the pair read through the total-spin pointer."""
    if cfg.observable is not Observable.TOTAL_SPIN_SQUARED_PAIR:
        raise ContractError(
            f"entangled_measurement needs total_spin_squared_pair, got {cfg.observable.value}"
        )
    if pair.dim != 4:
        raise ContractError(f"entangled_measurement acts on a pair, got dim {pair.dim}")
    bell_decompose(pair)  # raises SubspaceError outside span{singlet, triplet}
    ea, eb = clock_a.constant_gap, clock_b.constant_gap
    if ea is None or eb is None:
        raise ContractError("entangled_measurement needs constant-gap clocks")

    h_free = (ea * tensor(SIGMA_Z, IDENTITY2, IDENTITY2).matrix
              + eb * tensor(IDENTITY2, SIGMA_Z, IDENTITY2).matrix)
    h_int = np.kron(total_spin_squared().matrix, SIGMA_X.matrix)

    def hamiltonian(t):
        return h_free + cfg.envelope(t) * h_int

    psi0 = np.kron(pair.amplitudes, KET0.amplitudes)
    t0, t1 = cfg.window
    psi, _ = integrate(psi0, hamiltonian, t0, t1, tol=cfg.tol,
                       max_step=_max_step(cfg))
    p0, p1 = _ancilla_probabilities(psi, cfg.readout_basis)
    return MeasurementOutcome(ENTANGLED_LABELS, (p0, p1))
