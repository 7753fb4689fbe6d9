import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proptime.errors import ContractError, ShapeError, SizeError, StiffnessError
from proptime.qstate import (
    IDENTITY2,
    KET0,
    KET0_BAR,
    KET1,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    SINGLET,
    TRIPLET0,
    Operator,
    SeededRng,
    StateVector,
    apply,
    expectation,
    integrate,
    outcome_probabilities,
    projector,
    propagate,
    sample_projective,
    tensor,
    total_spin_squared,
)


def _explicit_total_spin():
    # built from raw Pauli matrices, independent of the module constants
    sx = np.array([[0, 1], [1, 0]], complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]], complex)
    i2 = np.eye(2)
    out = np.zeros((4, 4), complex)
    for s in (sx, sy, sz):
        c = np.kron(s, i2) + np.kron(i2, s)
        out += c @ c
    return out


def test_tensor_basis_index():
    s = tensor(KET0, KET1)
    assert s.dim == 4
    np.testing.assert_array_equal(s.amplitudes, [0, 1, 0, 0])


def test_tensor_identity():
    np.testing.assert_array_equal(tensor(IDENTITY2, IDENTITY2).matrix, np.eye(4))


def test_sigma_z_on_singlet_is_orthogonal_to_singlet():
    op = tensor(SIGMA_Z, IDENTITY2)
    v = SINGLET.amplitudes
    assert abs(np.vdot(v, op.matrix @ v)) < 1e-15


def test_tensor_size_limit():
    with pytest.raises(SizeError):
        tensor(tensor(KET0, KET0), tensor(KET0, KET0))
    with pytest.raises(SizeError):
        tensor(tensor(IDENTITY2, IDENTITY2), tensor(IDENTITY2, IDENTITY2))


def test_tensor_mixed_kinds_rejected():
    with pytest.raises(ContractError):
        tensor(KET0, IDENTITY2)


def test_apply_basics():
    np.testing.assert_array_equal(apply(SIGMA_X, KET0).amplitudes, KET1.amplitudes)
    s = StateVector([0.6, 0.8j])
    np.testing.assert_array_equal(apply(IDENTITY2, s).amplitudes, s.amplitudes)


def test_apply_shape_error():
    with pytest.raises(ShapeError):
        apply(SIGMA_X, SINGLET)


def test_total_spin_on_triplet_is_eight():
    out = apply(total_spin_squared(), TRIPLET0)
    np.testing.assert_allclose(out.amplitudes, 8 * TRIPLET0.amplitudes, atol=1e-14)
    assert out.norm == pytest.approx(8.0)


def test_total_spin_matches_explicit_construction():
    # the sign convention of sigma_y/sigma_z must not change the operator
    np.testing.assert_allclose(total_spin_squared().matrix, _explicit_total_spin(), atol=1e-14)
    w, v = np.linalg.eigh(_explicit_total_spin())
    np.testing.assert_allclose(sorted(np.round(w, 12)), [0, 8, 8, 8])
    singlet_col = v[:, np.argmin(w)]
    assert abs(abs(np.vdot(singlet_col, SINGLET.amplitudes)) - 1) < 1e-12


def test_pauli_algebra():
    np.testing.assert_allclose(SIGMA_X.matrix @ SIGMA_Y.matrix, 1j * SIGMA_Z.matrix)
    assert (SIGMA_Z.matrix @ KET0.amplitudes == -KET0.amplitudes).all()


def test_expectation_examples():
    assert expectation(SIGMA_Z, KET0) == -1.0
    assert expectation(total_spin_squared(), SINGLET) == pytest.approx(0.0, abs=1e-14)
    assert expectation(SIGMA_X, KET0_BAR) == pytest.approx(1.0)


def test_expectation_rejects_non_hermitian():
    with pytest.raises(ContractError):
        expectation(Operator([[0, 1], [0, 0]]), KET0)


def test_state_normalized_on_construction():
    s = StateVector([3, 4j])
    assert s.norm == pytest.approx(1.0, abs=1e-15)


# -- propagation ------------------------------------------------------------

def test_propagate_sigma_z_quarter_period():
    out = propagate(KET0, SIGMA_Z, 0.0, math.pi / 2)
    np.testing.assert_allclose(out.amplitudes, [1j, 0], atol=1e-9)


def test_propagate_zero_hamiltonian():
    s = StateVector([0.6, 0.8j])
    out = propagate(s, np.zeros((2, 2)), 0.0, 7.0)
    np.testing.assert_allclose(out.amplitudes, s.amplitudes, atol=1e-15)


def test_propagate_commuting_time_dependence():
    f = lambda t: 1.0 + 0.5 * math.sin(3 * t)
    big_f = lambda t: t - (math.cos(3 * t) - 1.0) / 6.0   # antiderivative, F(0) = 0
    s = StateVector([1, 1j])
    tol = 1e-9
    out = propagate(s, lambda t: f(t) * SIGMA_Z.matrix, 0.0, 4.0, tol=tol)
    phi = big_f(4.0)
    expected = s.amplitudes * np.array([np.exp(1j * phi), np.exp(-1j * phi)])
    assert np.linalg.norm(out.amplitudes - expected) < tol


def test_propagate_rejects_reversed_interval():
    with pytest.raises(ContractError):
        propagate(KET0, SIGMA_Z, 1.0, 0.0)


def test_propagate_rejects_non_hermitian():
    with pytest.raises(ContractError):
        propagate(KET0, np.array([[0, 1], [0, 0]], complex), 0.0, 1.0)


def test_step_underflow_raises_stiffness():
    # a pulse far narrower than the interval makes the required step vanish
    huge = lambda t: 1e30 * SIGMA_X.matrix
    with pytest.raises(StiffnessError):
        integrate(KET0.amplitudes, huge, 0.0, 1.0, tol=1e-9)


def _random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.sampled_from([2, 4, 8]),
       span=st.floats(0.1, 20.0))
def test_unitarity_short_intervals(seed, dim, span):
    rng = np.random.default_rng(seed)
    h0, h1 = _random_hermitian(rng, dim), _random_hermitian(rng, dim)
    h0 /= np.linalg.norm(h0, 2)
    h1 /= np.linalg.norm(h1, 2)
    psi0 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi0 /= np.linalg.norm(psi0)
    _, stats = integrate(psi0, lambda t: h0 + math.cos(t) * h1, 0.0, span, tol=1e-9)
    assert abs(stats.final_norm - 1.0) < 1e-9
    assert stats.max_step_drift < 1e-9


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t1=st.floats(0.5, 5.0), t2=st.floats(5.5, 10.0))
def test_propagator_composition(seed, t1, t2):
    rng = np.random.default_rng(seed)
    h0, h1 = _random_hermitian(rng, 4), _random_hermitian(rng, 4)
    ham = lambda t: h0 + math.sin(2 * t) * h1
    s = StateVector(rng.normal(size=4) + 1j * rng.normal(size=4))
    tol = 1e-9
    two = propagate(propagate(s, ham, 0.0, t1, tol), ham, t1, t2, tol)
    one = propagate(s, ham, 0.0, t2, tol)
    assert np.linalg.norm(two.amplitudes - one.amplitudes) < 10 * tol


def test_propagate_matches_matrix_exponential():
    from scipy.linalg import expm
    rng = np.random.default_rng(5)
    h = _random_hermitian(rng, 8)
    s = StateVector(rng.normal(size=8) + 0j)
    out = propagate(s, h, 0.0, 3.0, tol=1e-10)
    np.testing.assert_allclose(out.amplitudes, expm(-1j * 3.0 * h) @ s.amplitudes, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=2).filter(lambda v: sum(abs(x) for x in v) > 1e-3),
       st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=2).filter(lambda v: sum(abs(x) for x in v) > 1e-3),
       st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=2).filter(lambda v: sum(abs(x) for x in v) > 1e-3))
def test_kronecker_associativity(a, b, c):
    a, b, c = StateVector(a), StateVector(b), StateVector(c)
    left = tensor(tensor(a, b), c).amplitudes
    right = tensor(a, tensor(b, c)).amplitudes
    # complex products round differently depending on grouping
    np.testing.assert_allclose(left, right, rtol=0, atol=4e-16)


def test_kronecker_associativity_exact_for_dyadic_amplitudes():
    a, b, c = (StateVector(v, normalize=False) for v in ([0.5, 0.25], [1.0, -0.5], [0.75, 0.125]))
    np.testing.assert_array_equal(tensor(tensor(a, b), c).amplitudes,
                                  tensor(a, tensor(b, c)).amplitudes)


# -- sampling ---------------------------------------------------------------

def _z_projectors():
    return [projector(KET0), projector(KET1)]


def test_sample_certain_outcome():
    counts = sample_projective(KET0, _z_projectors(), SeededRng(1), 100)
    assert list(counts) == [100, 0]


def test_sample_deterministic():
    a = sample_projective(KET0_BAR, _z_projectors(), SeededRng(42, 3), 1000)
    b = sample_projective(KET0_BAR, _z_projectors(), SeededRng(42, 3), 1000)
    c = sample_projective(KET0_BAR, _z_projectors(), SeededRng(42, 4), 1000)
    assert list(a) == list(b)
    assert list(a) != list(c)


def test_sample_fair_coin_three_sigma():
    counts = sample_projective(KET0_BAR, _z_projectors(), SeededRng(7), 100_000)
    assert abs(counts[0] - 50_000) <= 3 * math.sqrt(25_000)


def test_sample_incomplete_projectors():
    with pytest.raises(ContractError):
        sample_projective(KET0, [projector(KET0)], SeededRng(0), 10)


def test_sample_non_orthogonal_projectors():
    with pytest.raises(ContractError):
        outcome_probabilities(KET0, [projector(KET0), projector(KET0_BAR),
                                     Operator(np.eye(2) - projector(KET0).matrix
                                              - projector(KET0_BAR).matrix)])


def test_sampling_law_across_seeds():
    s = StateVector([math.sqrt(0.3), math.sqrt(0.7)])
    n = 100_000
    sigma = math.sqrt(n * 0.3 * 0.7)
    excursions = sum(
        abs(sample_projective(s, _z_projectors(), SeededRng(seed), n)[0] - 0.3 * n) > 4 * sigma
        for seed in range(100)
    )
    assert excursions <= 1


def test_rng_split_is_deterministic_and_distinct():
    r = SeededRng(9, 1)
    assert r.split(3) == r.split(3)
    assert r.split(3) != r.split(4)
    with pytest.raises(ContractError):
        SeededRng(-1)
