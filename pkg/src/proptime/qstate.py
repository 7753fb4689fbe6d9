"""Dense complex state-vector kernel for systems of at most three qubits.

Basis convention: ``sigma_z |0> = -|0>`` and ``sigma_z |1> = +|1>``, and the
propagator solves ``i dpsi/dt = H(t) psi`` (hbar = 1).  With ``H = E sigma_z``
this gives ``U(t)|0> = exp(+iEt)|0>`` and ``U(t)|1> = exp(-iEt)|1>``.
Kronecker products put the left operand on the slower-varying index, so in
``|ab>`` the first label is the most significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ContractError, ShapeError, SizeError, StiffnessError

SUPPORTED_DIMS = (2, 4, 8)
MAX_DIM = 8

_NORM_TOL = 1e-9
_HERMITIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitude vector; normalized on construction unless ``normalize=False``."""

    amplitudes: np.ndarray
    normalize: bool = field(default=True, repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size not in SUPPORTED_DIMS:
            raise SizeError(f"state dimension {amps.size} not in {SUPPORTED_DIMS}")
        if self.normalize:
            norm = np.linalg.norm(amps)
            if norm == 0.0:
                raise ContractError("cannot normalize the zero vector")
            amps = amps / norm
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.amplitudes)

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        _check_dims(self.dim, other.dim)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True, eq=False)
class Operator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"operator must be square, got shape {m.shape}")
        if m.shape[0] not in SUPPORTED_DIMS:
            raise SizeError(f"operator dimension {m.shape[0]} not in {SUPPORTED_DIMS}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_hermitian(self, atol: float = _HERMITIAN_TOL) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=atol))

    def __matmul__(self, other: "Operator") -> "Operator":
        _check_dims(self.dim, other.dim)
        return Operator(self.matrix @ other.matrix)

    def __add__(self, other: "Operator") -> "Operator":
        _check_dims(self.dim, other.dim)
        return Operator(self.matrix + other.matrix)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.matrix * scalar)

    __rmul__ = __mul__

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def _check_dims(a: int, b: int):
    if a != b:
        raise ShapeError(f"dimension mismatch: {a} vs {b}")


# -- standard states and operators ------------------------------------------

KET0 = StateVector([1, 0])
KET1 = StateVector([0, 1])
KET0_BAR = StateVector([1, 1])    # sigma_x = +1
KET1_BAR = StateVector([1, -1])   # sigma_x = -1
SINGLET = StateVector([0, 1, -1, 0])   # |01> - |10>
TRIPLET0 = StateVector([0, 1, 1, 0])   # |01> + |10>

IDENTITY2 = Operator(np.eye(2))
SIGMA_X = Operator([[0, 1], [1, 0]])
# sign chosen so that sigma_x sigma_y = i sigma_z holds with sigma_z = diag(-1, 1)
SIGMA_Y = Operator([[0, 1j], [-1j, 0]])
SIGMA_Z = Operator([[-1, 0], [0, 1]])


def total_spin_squared() -> Operator:
    """``(sigma (x) I + I (x) sigma)^2`` summed over x, y, z; eigenvalue 0 on the singlet, 8 on the triplet."""
    total = np.zeros((4, 4), dtype=complex)
    for s in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        comp = np.kron(s.matrix, IDENTITY2.matrix) + np.kron(IDENTITY2.matrix, s.matrix)
        total += comp @ comp
    return Operator(total)


def projector(s: StateVector) -> Operator:
    v = s.amplitudes
    return Operator(np.outer(v, v.conj()))


# -- operations -------------------------------------------------------------

Kind = Union[StateVector, Operator]


def tensor(a: Kind, b: Kind, *rest: Kind) -> Kind:
    """Kronecker product; the left operand is the slower-varying index."""
    if rest:
        return tensor(tensor(a, b), *rest)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        if a.dim * b.dim > MAX_DIM:
            raise SizeError(f"product dimension {a.dim * b.dim} exceeds {MAX_DIM}")
        return StateVector(np.kron(a.amplitudes, b.amplitudes), normalize=False)
    if isinstance(a, Operator) and isinstance(b, Operator):
        if a.dim * b.dim > MAX_DIM:
            raise SizeError(f"product dimension {a.dim * b.dim} exceeds {MAX_DIM}")
        return Operator(np.kron(a.matrix, b.matrix))
    raise ContractError("tensor operands must both be states or both be operators")


def apply(op: Operator, s: StateVector) -> StateVector:
    """Matrix-vector product.  The result is *not* renormalized."""
    _check_dims(op.dim, s.dim)
    return StateVector(op.matrix @ s.amplitudes, normalize=False)


def expectation(op: Operator, s: StateVector) -> float:
    _check_dims(op.dim, s.dim)
    if not op.is_hermitian(1e-10):
        raise ContractError("expectation requires a Hermitian operator")
    val = np.vdot(s.amplitudes, op.matrix @ s.amplitudes)
    if abs(val.imag) >= 1e-10:
        raise ContractError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


# -- time evolution ---------------------------------------------------------

@dataclass(frozen=True)
class PropagationStats:
    steps: int
    rejected: int
    final_norm: float      # before renormalization
    max_step_drift: float  # largest single-step change of the norm


def _as_matrix_fn(hamiltonian) -> Callable[[float], np.ndarray]:
    if isinstance(hamiltonian, Operator):
        m = hamiltonian.matrix
        return lambda t: m
    if isinstance(hamiltonian, np.ndarray):
        m = np.asarray(hamiltonian, dtype=complex)
        return lambda t: m

    def fn(t):
        h = hamiltonian(t)
        return h.matrix if isinstance(h, Operator) else h

    return fn


def _rk4(psi, h, ha, hm, hb):
    k1 = -1j * (ha @ psi)
    k2 = -1j * (hm @ (psi + (0.5 * h) * k1))
    k3 = -1j * (hm @ (psi + (0.5 * h) * k2))
    k4 = -1j * (hb @ (psi + h * k3))
    return psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    psi0,
    hamiltonian,
    t0: float,
    t1: float,
    tol: float = 1e-9,
    max_step: float | None = None,
    first_step: float | None = None,
) -> tuple[np.ndarray, PropagationStats]:
    """Integrate ``i dpsi/dt = H(t) psi`` from ``t0`` to ``t1`` without renormalizing.

    Classical RK4 with step doubling.  A step of size ``h`` is accepted when
    the doubling error estimate is below ``tol * h / (t1 - t0)``, so the
    accumulated error over the whole interval stays below ``tol``; accepted
    steps keep the Richardson-extrapolated value.
    """
    psi = np.array(psi0, dtype=complex).reshape(-1)
    if t1 < t0:
        raise ContractError(f"t1={t1} precedes t0={t0}")
    if tol <= 0:
        raise ContractError("tol must be positive")
    span = t1 - t0
    norm0 = float(np.linalg.norm(psi))
    if span == 0.0:
        return psi, PropagationStats(0, 0, norm0, 0.0)

    hfn = _as_matrix_fn(hamiltonian)
    ha = np.asarray(hfn(t0), dtype=complex)
    if ha.shape != (psi.size, psi.size):
        raise ShapeError(f"hamiltonian shape {ha.shape} does not match state dim {psi.size}")
    if not np.allclose(ha, ha.conj().T, rtol=0.0, atol=_HERMITIAN_TOL):
        raise ContractError("hamiltonian is not Hermitian at t0")

    hmax = span if max_step is None else min(max_step, span)
    h = first_step if first_step is not None else hmax / 8.0
    h = min(h, hmax)
    min_step = 1e-15 * span
    t = t0
    steps = rejected = 0
    max_drift = 0.0
    norm_prev = norm0

    while t < t1:
        last = t + h >= t1
        if last:
            h = t1 - t
        hq = hfn(t + 0.25 * h)
        hm = hfn(t + 0.5 * h)
        h3 = hfn(t + 0.75 * h)
        hb = hfn(t1 if last else t + h)
        big = _rk4(psi, h, ha, hm, hb)
        half = _rk4(psi, 0.5 * h, ha, hq, hm)
        two = _rk4(half, 0.5 * h, hm, h3, hb)
        diff = two - big
        err = float(np.linalg.norm(diff)) / 15.0
        allowed = tol * h / span
        if err <= allowed:
            psi = two + diff / 15.0
            t = t1 if last else t + h
            ha = hb
            steps += 1
            norm_now = float(np.linalg.norm(psi))
            max_drift = max(max_drift, abs(norm_now - norm_prev))
            norm_prev = norm_now
            factor = 4.0 if err == 0.0 else min(4.0, 0.9 * (allowed / err) ** 0.25)
            if not last:
                h = min(hmax, h * factor)
        else:
            rejected += 1
            h *= max(0.2, 0.9 * (allowed / err) ** 0.25)
            if h < min_step:
                raise StiffnessError(f"step size {h:.3e} underflowed at t={t:.6g}")

    return psi, PropagationStats(steps, rejected, norm_prev, max_drift)


def propagate(
    s: StateVector,
    hamiltonian,
    t0: float,
    t1: float,
    tol: float = 1e-9,
    max_step: float | None = None,
) -> StateVector:
    """Evolve ``s`` from ``t0`` to ``t1``; the result is renormalized once at the end.

    ``hamiltonian`` is an :class:`Operator`, a matrix, or a callable ``t -> H(t)``.
    """
    psi, _ = integrate(s.amplitudes, hamiltonian, t0, t1, tol=tol, max_step=max_step)
    return StateVector(psi)


# -- sampling ---------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class SeededRng:
    """Counter-based stream keyed by ``(seed, stream_id)``.

    Each call to :meth:`generator` restarts the stream from counter zero, so a
    given ``SeededRng`` always yields the same draws.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not (0 <= int(v) <= _MASK64):
                raise ContractError(f"{name} must be an unsigned 64-bit integer, got {v}")

    def generator(self) -> np.random.Generator:
        key = int(self.seed) | (int(self.stream_id) << 64)
        return np.random.Generator(np.random.Philox(key=key))

    def split(self, index: int) -> "SeededRng":
        """Independent child stream, derived deterministically from ``index``."""
        return SeededRng(self.seed, _splitmix64(_splitmix64(self.stream_id) ^ int(index)))


def outcome_probabilities(s: StateVector, projectors: Sequence[Operator]) -> np.ndarray:
    if not projectors:
        raise ContractError("empty projector set")
    total = np.zeros((s.dim, s.dim), dtype=complex)
    for p in projectors:
        _check_dims(p.dim, s.dim)
        total += p.matrix
    if not np.allclose(total, np.eye(s.dim), rtol=0.0, atol=1e-10):
        raise ContractError("projectors do not sum to the identity")
    for i, a in enumerate(projectors):
        for b in projectors[i + 1:]:
            if not np.allclose(a.matrix @ b.matrix, 0.0, atol=1e-10):
                raise ContractError("projectors are not mutually orthogonal")
    probs = np.array([np.vdot(s.amplitudes, p.matrix @ s.amplitudes).real for p in projectors])
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def sample_categorical(probabilities, n: int, rng: SeededRng) -> np.ndarray:
    if n < 1:
        raise ContractError("n must be at least 1")
    p = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    p = p / p.sum()
    return rng.generator().multinomial(int(n), p)


def sample_projective(
    s: StateVector, projectors: Sequence[Operator], rng: SeededRng, n: int
) -> np.ndarray:
    """Counts of ``n`` i.i.d. projective measurements of ``s``."""
    return sample_categorical(outcome_probabilities(s, projectors), n, rng)
