import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toricdiscord.quantum import (
    MeasurementBasis,
    binary_entropy,
    check_density_matrix,
    classical_correlation,
    classical_correlation_grid,
    conditional_entropy_after_measurement,
    discord_details,
    grid_discord,
    measurement_unitary,
    mutual_information,
    partial_trace_A,
    partial_trace_B,
    quantum_discord,
    shannon_entropy,
    swap_subsystems,
    von_neumann_entropy,
)

SEPARABLE_DISCORD_ORACLE = 0.14417696278010206  # 512x512 grid, scripts/pin_oracles.py


def ket(*amps):
    v = np.asarray(amps, dtype=complex)
    return v / np.linalg.norm(v)


def proj(v):
    return np.outer(v, v.conj())


BELL = proj(ket(1, 0, 0, 1))
PLUS = ket(1, 1)


def separable_example():
    zero = np.array([1, 0], dtype=complex)
    return 0.5 * proj(np.kron(zero, zero)) + 0.5 * proj(np.kron(PLUS, PLUS))


def random_state(rng, rank=4):
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_qubit_state(rng):
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


# ---------------------------------------------------------------- entropy


def test_entropy_examples():
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0, abs=1e-14)
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0
    assert von_neumann_entropy(np.diag([0.8536, 0.1464])) == pytest.approx(0.6009, abs=1e-3)
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0, abs=1e-14)
    assert von_neumann_entropy(BELL) == pytest.approx(0.0, abs=1e-12)


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0
    assert binary_entropy((2 + math.sqrt(2)) / 4) == pytest.approx(0.6008760366928562, abs=1e-14)
    with pytest.raises(ValueError):
        binary_entropy(1.2)
    with pytest.raises(ValueError):
        shannon_entropy([0.5, -0.1])


@settings(max_examples=50)
@given(p=st.floats(0.0, 1.0))
def test_binary_entropy_symmetric_bounded(p):
    h = binary_entropy(p)
    assert 0.0 <= h <= 1.0
    assert h == pytest.approx(binary_entropy(1 - p), abs=1e-12)


def test_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        check_density_matrix(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        check_density_matrix(np.eye(2))
    with pytest.raises(ValueError, match="negative"):
        check_density_matrix(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        check_density_matrix(np.eye(3) / 3)
    with pytest.raises(ValueError):
        mutual_information(np.eye(2) / 2)


# --------------------------------------------------------- mutual information


def test_mutual_information_examples():
    a = random_qubit_state(np.random.default_rng(1))
    b = random_qubit_state(np.random.default_rng(2))
    assert mutual_information(np.kron(a, b)) == pytest.approx(0.0, abs=1e-12)
    assert mutual_information(BELL) == pytest.approx(2.0, abs=1e-12)
    assert mutual_information(np.diag([0.5, 0, 0, 0.5])) == pytest.approx(1.0, abs=1e-14)


def test_partial_traces():
    a = random_qubit_state(np.random.default_rng(3))
    b = random_qubit_state(np.random.default_rng(4))
    rho = np.kron(a, b)
    assert np.allclose(partial_trace_B(rho), a)
    assert np.allclose(partial_trace_A(rho), b)
    assert np.allclose(swap_subsystems(rho), np.kron(b, a))


# ------------------------------------------------------ conditional entropy


def test_measurement_unitary_is_unitary():
    for theta, phi in [(0.0, 0.0), (0.7, 1.3), (math.pi, 5.0), (2.1, 0.2)]:
        U = measurement_unitary(theta, phi)
        assert np.allclose(U.conj().T @ U, np.eye(2), atol=1e-15)


def test_classical_state_computational_basis():
    p = np.array([0.4, 0.1, 0.2, 0.3])
    rho = np.diag(p)
    pb = np.array([p[0] + p[2], p[1] + p[3]])
    expected = sum(pb[k] * shannon_entropy([p[k] / pb[k], p[2 + k] / pb[k]]) for k in range(2))
    assert conditional_entropy_after_measurement(rho, MeasurementBasis(0, 0)) == pytest.approx(expected, abs=1e-14)


def test_conditional_states_of_schmidt_state():
    # measuring the local spin of a|X0> + b|Y1> leaves the rest in a pure state
    a_sq = 0.8
    a, b = math.sqrt(a_sq), math.sqrt(1 - a_sq)
    rho = proj(np.array([a, 0, 0, b], dtype=complex))
    for theta, phi in [(0.3, 0.0), (1.1, 2.0), (math.pi / 2, 4.0)]:
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        for k, u in enumerate(measurement_unitary(theta, phi).T):
            sigma = np.einsum("b,abcd,d->ac", u.conj(), rho.reshape(2, 2, 2, 2), u)
            lam = np.linalg.eigvalsh(sigma)
            expected = (1 + (-1) ** k * (a_sq - (1 - a_sq)) * math.cos(theta)) / 2
            assert lam.max() == pytest.approx(expected, abs=1e-14)
            assert lam.min() == pytest.approx(0.0, abs=1e-14)
        # explicit outcome-0 block: a^2 c^2, a b c s e^{-i phi}, b^2 s^2
        u0 = measurement_unitary(theta, phi)[:, 0]
        sigma0 = np.einsum("b,abcd,d->ac", u0.conj(), rho.reshape(2, 2, 2, 2), u0)
        ref = np.array([[a_sq * c * c, a * b * c * s * np.exp(1j * phi)],
                        [a * b * c * s * np.exp(-1j * phi), (1 - a_sq) * s * s]])
        assert np.allclose(sigma0, ref, atol=1e-14)


@pytest.mark.parametrize("a_sq", [0.5, 0.8536, 0.99])
def test_pure_state_grid_is_flat(a_sq):
    rho = proj(np.array([math.sqrt(a_sq), 0, 0, math.sqrt(1 - a_sq)], dtype=complex))
    j = classical_correlation_grid(rho, 32)
    assert np.var(j) < 1e-10
    assert np.allclose(j, binary_entropy(a_sq), atol=1e-12)
    assert quantum_discord(rho) == pytest.approx(binary_entropy(a_sq), abs=1e-10)


def test_product_state_has_no_correlation():
    rng = np.random.default_rng(5)
    rho = np.kron(random_qubit_state(rng), random_qubit_state(rng))
    j = classical_correlation(rho, MeasurementBasis(1.0, 2.0))
    assert j == pytest.approx(0.0, abs=1e-12)
    assert quantum_discord(rho) == pytest.approx(0.0, abs=1e-9)


def test_basis_validation_and_folding():
    with pytest.raises(ValueError):
        MeasurementBasis(-0.1, 0)
    with pytest.raises(ValueError):
        MeasurementBasis(0.5, 2 * math.pi)
    b = MeasurementBasis.folded(4.0, -1.0)
    assert 0 <= b.theta <= math.pi and 0 <= b.phi < 2 * math.pi
    rho = separable_example()
    same = [
        conditional_entropy_after_measurement(rho, b),
        float(conditional_entropy_after_measurement(rho, MeasurementBasis.folded(4.0 + 2 * math.pi, -1.0))),
    ]
    assert same[0] == pytest.approx(same[1], abs=1e-13)


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(-10, 10), phi=st.floats(-10, 10))
def test_folding_preserves_measurement(theta, phi):
    rho = separable_example()
    from toricdiscord.quantum import _conditional_entropies

    raw = float(_conditional_entropies(rho, np.array(theta), np.array(phi)))
    b = MeasurementBasis.folded(theta, phi)
    assert conditional_entropy_after_measurement(rho, b) == pytest.approx(raw, abs=1e-10)


# ---------------------------------------------------------------- discord


def test_bell_discord():
    assert abs(quantum_discord(BELL) - 1.0) < 1e-6


def test_separable_discord_regression():
    rho = separable_example()
    res = discord_details(rho)
    assert res.discord > 0.01
    assert abs(res.discord - SEPARABLE_DISCORD_ORACLE) < 1e-6
    assert res.discord <= SEPARABLE_DISCORD_ORACLE + 1e-15
    assert res.conditional_entropy <= res.grid_conditional_entropy
    assert res.mutual_information == pytest.approx(res.discord + res.classical_correlation, abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 3))
def test_zero_discord_certificate(seed, n):
    # sum_i p_i rho_i^A (x) |i><i|_B in a random orthonormal basis of B
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(2))
    U = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    rho = sum(
        p[i] * np.kron(random_qubit_state(rng), proj(U[:, i]))
        for i in range(2)
    )
    assert quantum_discord(rho) < 1e-8


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 4))
def test_discord_bounds_on_random_states(seed, rank):
    rho = random_state(np.random.default_rng(seed), rank)
    res = discord_details(rho, grid=24)
    assert res.discord >= 0.0
    assert res.discord <= res.mutual_information + 1e-12
    assert res.conditional_entropy <= res.grid_conditional_entropy + 1e-15
    assert res.discord <= grid_discord(rho, 24) + 1e-12


def test_diagonal_states_have_zero_discord():
    for p in ([0.25] * 4, [0.7, 0.1, 0.15, 0.05], [0.5, 0, 0, 0.5]):
        assert quantum_discord(np.diag(p)) < 1e-8


def test_discord_measures_B():
    # classical on B but quantum on A: |0><0|(x)|0><0| + |+><+|(x)|1><1|
    zero, one = np.array([1, 0], complex), np.array([0, 1], complex)
    rho = 0.5 * proj(np.kron(zero, zero)) + 0.5 * proj(np.kron(PLUS, one))
    assert quantum_discord(rho) < 1e-8
    assert quantum_discord(swap_subsystems(rho)) > 0.01
