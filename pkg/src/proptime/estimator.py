"""Monte Carlo trials and phase estimation for both readout schemes.

Phases live on the principal branch [0, pi/2]; a relative phase of
``E * dt`` is therefore only recoverable for ``dt`` in ``[0, T/2]`` with
``T = pi / E``.  Winding beyond the branch is not resolved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .clock import ClockSpec, pair_evolve
from .errors import ContractError, DegenerateClockError
from .qstate import SINGLET, SeededRng, sample_categorical
from .vonneumann import (
    MeasurementConfig,
    MeasurementOutcome,
    entangled_measurement,
    fringe_preparation,
    separate_measurement,
    visibility_oracle,
)

HALF_PI = 0.5 * math.pi
NO_INFORMATION_VISIBILITY = 0.05


@dataclass(frozen=True)
class ExperimentRecord:
    scheme: str
    counts: tuple[int, ...]
    n_samples: int
    seed: int
    phase_estimate: float
    phase_std: float
    delta_t_estimate: float = math.nan
    visibility: float = math.nan
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if sum(self.counts) != self.n_samples:
            raise ContractError(f"counts {self.counts} do not sum to {self.n_samples}")
        if not math.isnan(self.phase_estimate) and not 0.0 <= self.phase_estimate <= HALF_PI:
            raise ContractError(f"phase estimate {self.phase_estimate} outside [0, pi/2]")


def run_trials(outcome: MeasurementOutcome, n: int, rng: SeededRng) -> np.ndarray:
    """``n`` categorical draws from the outcome distribution, as per-label counts."""
    return sample_categorical(outcome.probabilities, n, rng)


def mle_phase(counts: Sequence[int]) -> tuple[float, float]:
    """Invert ``P(triplet) = sin^2(phase)`` from (singlet, triplet) counts.

    Returns the estimate on [0, pi/2] and the Cramer-Rao standard deviation
    ``1/(2 sqrt(N))``, which does not depend on the phase.
    """
    if len(counts) != 2:
        raise ContractError("mle_phase expects (singlet, triplet) counts")
    k_singlet, k_triplet = (int(c) for c in counts)
    n = k_singlet + k_triplet
    if n <= 0 or k_singlet < 0 or k_triplet < 0:
        raise ContractError(f"need non-negative counts with N >= 1, got {counts}")
    theta = math.asin(math.sqrt(k_triplet / n))
    return theta, 0.5 / math.sqrt(n)


def separate_phase(counts: Sequence[int], visibility: float) -> tuple[float, float]:
    """Invert ``P(0bar) = (1 + V cos 2 phase)/2`` for one clock.

    Returns NaN for both values when the visibility carries no information.
    """
    k0, k1 = (int(c) for c in counts)
    n = k0 + k1
    if n <= 0:
        raise ContractError("separate_phase needs N >= 1")
    if visibility < NO_INFORMATION_VISIBILITY:
        return math.nan, math.nan
    c = min(1.0, max(-1.0, (2.0 * k0 / n - 1.0) / visibility))
    # Fisher information per shot is 4 V^2 sin^2(2 phi) / (1 - V^2 cos^2(2 phi))
    phase = 0.5 * math.acos(c)
    s2 = math.sin(2 * phase) ** 2
    info = 4 * visibility ** 2 * s2 / max(1e-300, 1 - visibility ** 2 * (1 - s2))
    std = math.inf if info == 0 else 1.0 / math.sqrt(n * info)
    return phase, std


def estimate_delta_t(record: ExperimentRecord, clock: ClockSpec) -> float:
    """Proper-time difference ``phase / E``; only defined modulo ``pi / E``."""
    gap = clock.constant_gap
    if gap is None:
        raise ContractError("estimate_delta_t needs a constant-gap clock")
    if gap == 0.0:
        raise DegenerateClockError("a clock with zero gap carries no time information")
    return record.phase_estimate / gap


def entangled_record(
    outcome: MeasurementOutcome, n: int, rng: SeededRng, clock: ClockSpec | None = None
) -> ExperimentRecord:
    counts = run_trials(outcome, n, rng)
    theta, std = mle_phase(counts)
    flags = []
    if counts[1] == 0:
        flags.append("no_signal")
    elif counts[0] == 0:
        flags.append("branch_endpoint")
    rec = ExperimentRecord("entangled", tuple(int(c) for c in counts), int(n), rng.seed,
                           theta, std, flags=tuple(flags))
    if clock is not None:
        rec = _with_delta_t(rec, clock)
    return rec


def _with_delta_t(rec: ExperimentRecord, clock: ClockSpec) -> ExperimentRecord:
    dt = math.nan if math.isnan(rec.phase_estimate) else estimate_delta_t(rec, clock)
    return ExperimentRecord(rec.scheme, rec.counts, rec.n_samples, rec.seed, rec.phase_estimate,
                            rec.phase_std, dt, rec.visibility, rec.flags)


# -- scheme comparison ------------------------------------------------------

def reference_phases(e_delta_t: float) -> tuple[float, float]:
    """Absolute phases of two separately read clocks whose difference is ``e_delta_t``.

    They are placed symmetrically about pi/4 so both stay inside [0, pi/2].
    """
    if not 0.0 <= e_delta_t <= HALF_PI:
        raise ContractError(f"relative phase {e_delta_t} outside the principal branch")
    return math.pi / 4 + 0.5 * e_delta_t, math.pi / 4 - 0.5 * e_delta_t


def separate_outcomes(e_delta_t: float, clock: ClockSpec, cfg: MeasurementConfig):
    phase_a, phase_b = reference_phases(e_delta_t)
    at = cfg.pulse_center
    return (separate_measurement(fringe_preparation(phase_a), clock, cfg, prepared_at=at),
            separate_measurement(fringe_preparation(phase_b), clock, cfg, prepared_at=at))


def separate_record(
    outcomes: tuple[MeasurementOutcome, MeasurementOutcome],
    visibility: float,
    n: int,
    rng: SeededRng,
) -> ExperimentRecord:
    """Two clocks, ``n`` shots each, differenced; counts are (0bar, 1bar) summed over both."""
    ca = run_trials(outcomes[0], n, rng.split(0))
    cb = run_trials(outcomes[1], n, rng.split(1))
    pa, sa = separate_phase(ca, visibility)
    pb, sb = separate_phase(cb, visibility)
    counts = tuple(int(x) for x in ca + cb)
    if math.isnan(pa) or math.isnan(pb):
        return ExperimentRecord("separate", counts, 2 * n, rng.seed, math.nan, math.nan,
                                visibility=visibility, flags=("no_information",))
    est = min(HALF_PI, max(0.0, pa - pb))
    return ExperimentRecord("separate", counts, 2 * n, rng.seed, est, math.hypot(sa, sb),
                            visibility=visibility)


@dataclass(frozen=True)
class ComparisonRow:
    scheme: str
    pulse_halfwidth: float
    rmse: float
    mean_estimate: float
    repetitions: int
    n_samples: int
    visibility: float
    no_information: bool = False
    records: tuple[ExperimentRecord, ...] = field(default=(), repr=False)


def null_model_rmse(true_phase: float) -> float:
    """RMSE of an estimate uniformly distributed over [0, pi/2]."""
    a = HALF_PI
    return math.sqrt(((a - true_phase) ** 3 + true_phase ** 3) / (3 * a))


def compare_schemes(
    e_delta_t: float,
    clock: ClockSpec,
    delta_t_grid: Sequence[float],
    n: int,
    rng: SeededRng,
    repetitions: int = 200,
    separate_tol: float = 1e-6,
) -> list[ComparisonRow]:
    """Phase RMSE of both schemes at each pulse half-width.

    Every repetition draws ``n`` shots per clock (separate) or per pair
    (entangled).  When the separate scheme's visibility falls below the
    no-information threshold its estimate is uniform over the branch.
    """
    if n < 1000:
        raise ContractError(f"compare_schemes needs n >= 1000, got {n}")
    if any(not d > 0 for d in delta_t_grid):
        raise ContractError("pulse half-widths must be positive")
    gap = clock.constant_gap
    if gap is None or gap <= 0:
        raise ContractError("compare_schemes needs a positive constant gap")

    pair = pair_evolve(SINGLET, clock, e_delta_t / gap, clock, 0.0)
    rows = []
    # repetition streams do not depend on the grid point (common random numbers)
    for dt in delta_t_grid:
        ent_cfg = MeasurementConfig.entangled(dt)
        sep_cfg = MeasurementConfig.separate(dt, tol=separate_tol)
        ent_outcome = entangled_measurement(pair, clock, clock, ent_cfg)
        sep_pair = separate_outcomes(e_delta_t, clock, sep_cfg)
        vis = visibility_oracle(gap, sep_cfg)

        ent_recs, sep_recs = [], []
        sep_est = np.empty(repetitions)
        ent_est = np.empty(repetitions)
        for r in range(repetitions):
            rep_rng = rng.split(r)
            e_rec = entangled_record(ent_outcome, n, rep_rng.split(0))
            s_rec = separate_record(sep_pair, vis, n, rep_rng.split(1))
            ent_recs.append(e_rec)
            sep_recs.append(s_rec)
            ent_est[r] = e_rec.phase_estimate
            if math.isnan(s_rec.phase_estimate):
                sep_est[r] = rep_rng.split(2).generator().uniform(0.0, HALF_PI)
            else:
                sep_est[r] = s_rec.phase_estimate
        no_info = vis < NO_INFORMATION_VISIBILITY
        rows.append(ComparisonRow("entangled", dt, _rmse(ent_est, e_delta_t), float(ent_est.mean()),
                                  repetitions, n, 1.0, False, tuple(ent_recs)))
        rows.append(ComparisonRow("separate", dt, _rmse(sep_est, e_delta_t), float(sep_est.mean()),
                                  repetitions, n, vis, no_info, tuple(sep_recs)))
    return rows


def _rmse(est: np.ndarray, truth: float) -> float:
    return float(np.sqrt(np.mean((est - truth) ** 2)))
