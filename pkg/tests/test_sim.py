import numpy as np
import pytest
from scipy.linalg import expm

from oracles import hamiltonian_dense, pauli_matrix, random_label
from trihybrid.commgraph import (
    build_noncommutation_graph,
    greedy_coloring,
    grouping_from_coloring,
    naive_grouping,
)
from trihybrid.models import h2_hamiltonian
from trihybrid.pauli import Hamiltonian, PauliString, Term
from trihybrid.sim import (
    MeasurementBasis,
    MeasurementBasisError,
    ShotCounts,
    StateVector,
    apply_basis_rotation,
    apply_pauli_exponential,
    basis_for_group,
    estimate_energy_grouped,
    estimate_term,
    exact_expectation,
    grouped_estimator_variance,
    hamiltonian_matrix,
    prepare_h2_ansatz,
    sample_shots,
)

P = PauliString.from_label
H2 = h2_hamiltonian()
THETA_OPT = np.pi / 4


def qwc_grouping(h):
    return grouping_from_coloring(h, greedy_coloring(build_noncommutation_graph(h, "qwc")), "qwc")


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector.from_amplitudes(v, normalize=True)


def random_hamiltonian(rng, n, m):
    return Hamiltonian([Term(float(rng.normal()), P(random_label(rng, n))) for _ in range(m)])


def test_exponential_matches_expm():
    psi = StateVector.basis_state("01")
    theta = 0.37
    got = apply_pauli_exponential(psi, P("XY"), theta).amplitudes
    want = expm(-1j * theta * pauli_matrix("XY")) @ psi.amplitudes
    np.testing.assert_allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("label", ["X", "YZ", "ZXY", "IIX"])
def test_exponential_random_states_match_expm(label):
    rng = np.random.default_rng(len(label))
    psi = random_state(rng, len(label))
    theta = rng.uniform(0, 2 * np.pi)
    got = apply_pauli_exponential(psi, P(label), theta).amplitudes
    want = expm(-1j * theta * pauli_matrix(label)) @ psi.amplitudes
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_exponential_zero_and_pi():
    psi = random_state(np.random.default_rng(0), 3)
    np.testing.assert_allclose(apply_pauli_exponential(psi, P("XYZ"), 0.0).amplitudes, psi.amplitudes)
    flipped = apply_pauli_exponential(psi, P("XYZ"), np.pi)
    np.testing.assert_allclose(flipped.amplitudes, -psi.amplitudes, atol=1e-12)
    np.testing.assert_allclose(flipped.probabilities(), psi.probabilities(), atol=1e-12)


def test_exponential_size_mismatch():
    with pytest.raises(ValueError):
        apply_pauli_exponential(StateVector.basis_state("0"), P("XX"), 0.1)


def test_basis_state_index():
    assert np.flatnonzero(StateVector.basis_state("01").amplitudes).tolist() == [2]


def test_state_must_be_normalised():
    with pytest.raises(ValueError, match="normalised"):
        StateVector(np.array([1.0, 1.0]), 1)


def test_ansatz_at_zero_is_reference():
    np.testing.assert_array_equal(prepare_h2_ansatz(0.0).amplitudes, StateVector.basis_state("01").amplitudes)


def test_ansatz_minimum_energy():
    thetas = np.linspace(0, 2 * np.pi, 2001)
    energies = np.array([exact_expectation(prepare_h2_ansatz(t), H2) for t in thetas])
    assert round(energies.min(), 3) == -0.192
    # dense oracle: minimise over the two-dimensional span reached by the ansatz
    hd = hamiltonian_dense(H2)
    a, b = StateVector.basis_state("01").amplitudes, pauli_matrix("XY") @ StateVector.basis_state("01").amplitudes
    sub = np.array([[u.conj() @ hd @ v for v in (a, b)] for u in (a, b)])
    assert np.linalg.eigvalsh(sub).min() == pytest.approx(-0.011 - 0.181, abs=1e-12)
    assert exact_expectation(prepare_h2_ansatz(THETA_OPT), H2) == pytest.approx(-0.192, abs=1e-12)


@pytest.mark.parametrize(
    "labels, expected",
    [(["ZZ", "ZI", "IZ"], "ZZ"), (["XX"], "XX"), (["XI", "IY"], "XY"), (["II"], "ZZ")],
)
def test_basis_for_group(labels, expected):
    assert basis_for_group([P(s) for s in labels]).label == expected


def test_basis_conflict_names_qubit_and_terms():
    with pytest.raises(MeasurementBasisError, match="qubit 0.*XX.*YY"):
        basis_for_group([P("XX"), P("YY")])
    with pytest.raises(MeasurementBasisError):
        basis_for_group([])


def test_rotation_z_only_is_identity():
    psi = random_state(np.random.default_rng(1), 2)
    out = apply_basis_rotation(psi, MeasurementBasis(tuple(P("ZZ").axes)))
    np.testing.assert_array_equal(out.amplitudes, psi.amplitudes)


def test_rotation_plus_state_in_x():
    plus = StateVector(np.array([1, 1]) / np.sqrt(2), 1)
    p = apply_basis_rotation(plus, MeasurementBasis(tuple(P("X").axes))).probabilities()
    np.testing.assert_allclose(p, [1, 0], atol=1e-12)


def test_rotation_y_eigenstate():
    psi = StateVector(np.array([1, 1j]) / np.sqrt(2), 1)
    p = apply_basis_rotation(psi, MeasurementBasis(tuple(P("Y").axes))).probabilities()
    np.testing.assert_allclose(p, [1, 0], atol=1e-12)


@pytest.mark.parametrize("label", ["XYZ", "YYX", "ZXI"])
def test_rotation_diagonalises_pauli(label):
    # <psi|P|psi> equals the Z-parity expectation after rotation
    psi = random_state(np.random.default_rng(7), 3)
    b = basis_for_group([P(label)])
    p = apply_basis_rotation(psi, b).probabilities()
    mask = P(label).x | P(label).z
    parity = np.array([(-1) ** bin(i & mask).count("1") for i in range(8)])
    want = (psi.amplitudes.conj() @ pauli_matrix(label) @ psi.amplitudes).real
    assert p @ parity == pytest.approx(want, abs=1e-12)


def test_rotation_round_trip_and_norm():
    rng = np.random.default_rng(3)
    for _ in range(20):
        psi = random_state(rng, 4)
        b = MeasurementBasis(tuple(P(random_label(rng, 4).replace("I", "X")).axes))
        rotated = apply_basis_rotation(psi, b)
        assert np.linalg.norm(rotated.amplitudes) == pytest.approx(1, abs=1e-10)
        back = apply_basis_rotation(rotated, b, inverse=True)
        np.testing.assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-10)


def test_shots_on_basis_state():
    counts = sample_shots(StateVector.basis_state("01"), 100, seed=0)
    assert counts.counts == {"01": 100} and counts.total_shots == 100


def test_shots_uniform_superposition():
    plus = StateVector(np.array([1, 1]) / np.sqrt(2), 1)
    counts = sample_shots(plus, 2**13, seed=11)
    assert counts.counts["0"] / 2**13 == pytest.approx(0.5, abs=0.02)
    assert sample_shots(plus, 2**13, seed=11) == counts


def test_shots_must_be_positive():
    with pytest.raises(ValueError):
        sample_shots(StateVector.basis_state("0"), 0)


@pytest.mark.parametrize("coef, label, expected", [(0.398, "ZI", 0.398), (0.011, "ZZ", -0.011), (0.398, "IZ", -0.398)])
def test_estimate_term_parity(coef, label, expected):
    counts = ShotCounts({"01": 50}, 50)
    b = basis_for_group([P("ZZ")])
    assert estimate_term(counts, Term(coef, P(label)), b) == pytest.approx(expected)


def test_estimate_term_basis_mismatch():
    with pytest.raises(ValueError):
        estimate_term(ShotCounts({"00": 1}, 1), Term(1.0, P("XX")), basis_for_group([P("ZZ")]))


def test_z_group_estimates_within_binomial_error():
    psi = prepare_h2_ansatz(THETA_OPT)
    terms = [H2[0], H2[1], H2[2]]
    b = basis_for_group(terms)
    shots = 2**13
    counts = sample_shots(apply_basis_rotation(psi, b), shots, seed=2)
    for t in terms:
        exact = exact_expectation(psi, Hamiltonian([t], 2))
        mean = exact / t.coefficient
        se = abs(t.coefficient) * np.sqrt(max(1 - mean**2, 0) / shots)
        assert abs(estimate_term(counts, t, b) - exact) <= 4 * se + 1e-12


def test_exact_expectation_examples():
    assert exact_expectation(StateVector.basis_state("01"), H2) == pytest.approx(-0.011)
    psi = random_state(np.random.default_rng(4), 2)
    ident = Hamiltonian([Term(0.7, PauliString.identity(2))])
    assert exact_expectation(psi, ident) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        exact_expectation(StateVector.basis_state("0"), H2)


def test_hamiltonian_matrix_matches_kron_oracle():
    rng = np.random.default_rng(5)
    h = random_hamiltonian(rng, 3, 8)
    np.testing.assert_allclose(hamiltonian_matrix(h), hamiltonian_dense(h), atol=1e-12)


def test_grouped_runs_and_energy():
    psi = prepare_h2_ansatz(THETA_OPT)
    e, runs = estimate_energy_grouped(H2, qwc_grouping(H2), psi, 2**13, seed=0)
    assert runs == 2
    assert e == pytest.approx(-0.192, abs=0.01)
    e, runs = estimate_energy_grouped(H2, naive_grouping(H2), psi, 2**13, seed=0)
    assert runs == 4
    assert e == pytest.approx(-0.192, abs=0.01)


def test_grouped_rejects_gc_only_group():
    h = Hamiltonian([Term(1.0, P("XX")), Term(1.0, P("YY"))])
    g = grouping_from_coloring(h, greedy_coloring(build_noncommutation_graph(h, "gc")), "gc")
    with pytest.raises(MeasurementBasisError):
        estimate_energy_grouped(h, g, StateVector.basis_state("00"), 10, seed=0)


def dense_group_variance(h, grouping, psi, shots):
    total = 0.0
    for grp in grouping.groups:
        o = sum(h.terms[i].coefficient * pauli_matrix(h.terms[i].string.label) for i in grp)
        v = psi.amplitudes
        mean = (v.conj() @ o @ v).real
        total += ((v.conj() @ o @ o @ v).real - mean**2) / shots
    return total


def test_variance_matches_dense_oracle():
    rng = np.random.default_rng(8)
    for _ in range(10):
        h = random_hamiltonian(rng, 3, 6)
        psi = random_state(rng, 3)
        g = qwc_grouping(h)
        assert grouped_estimator_variance(h, g, psi, 100) == pytest.approx(
            dense_group_variance(h, g, psi, 100), abs=1e-12
        )


def test_grouped_estimator_is_unbiased():
    rng = np.random.default_rng(2024)
    shots = 2**16
    inside = total = 0
    for trial in range(200):
        h = random_hamiltonian(rng, 3, 6)
        psi = random_state(rng, 3)
        g = qwc_grouping(h)
        est, _ = estimate_energy_grouped(h, g, psi, shots, seed=trial)
        se = np.sqrt(dense_group_variance(h, g, psi, shots))
        inside += abs(est - exact_expectation(psi, h)) < 5 * se + 1e-12
        total += 1
    assert inside / total >= 0.99


def marginal(probs, n, support):
    out = {}
    for i, p in enumerate(probs):
        key = tuple((i >> k) & 1 for k in support)
        out[key] = out.get(key, 0.0) + p
    return out


@pytest.mark.parametrize("seed", range(6))
def test_term_distribution_is_grouping_invariant(seed):
    rng = np.random.default_rng(seed)
    if seed == 0:
        h, psi = H2, prepare_h2_ansatz(0.3)
    else:
        h, psi = random_hamiltonian(rng, 3, 6), random_state(rng, 3)
    n = h.n_qubits
    for grp in qwc_grouping(h).groups:
        group_probs = apply_basis_rotation(psi, basis_for_group([h.terms[i] for i in grp])).probabilities()
        for i in grp:
            t = h.terms[i]
            alone = apply_basis_rotation(psi, basis_for_group([t])).probabilities()
            a = marginal(group_probs, n, t.string.support)
            b = marginal(alone, n, t.string.support)
            assert a.keys() == b.keys()
            for key in a:
                assert a[key] == pytest.approx(b[key], abs=1e-12)
