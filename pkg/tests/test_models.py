import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import fermion_dense, hamiltonian_dense
from trihybrid.models import (
    FermionTerm,
    LatticeSpec,
    h2_hamiltonian,
    heisenberg_hamiltonian,
    hubbard_hamiltonian,
    hubbard_qubit_hamiltonian,
    jordan_wigner,
)
from trihybrid.pauli import PauliString


def brute_force_bonds(rows, cols, periodic):
    """Every unordered pair of sites at lattice distance one, wrap included."""
    bonds = set()
    for a, b in itertools.combinations(range(rows * cols), 2):
        (ra, ca), (rb, cb) = divmod(a, cols), divmod(b, cols)
        dr, dc = abs(ra - rb), abs(ca - cb)
        if periodic:
            dr, dc = min(dr, rows - dr), min(dc, cols - dc)
        if dr + dc == 1:
            bonds.add((a, b))
    return bonds


def test_h2_terms():
    h = h2_hamiltonian()
    assert len(h) == 4 and h.n_qubits == 2
    assert [t.string.label for t in h] == ["ZZ", "ZI", "IZ", "XX"]
    assert h.coefficient_of("XX") == 0.181
    assert sum(abs(c) for c in h.coefficients) == pytest.approx(0.988)


@pytest.mark.parametrize(
    "rows, cols, periodic, n_terms",
    [(1, 20, None, 60), (3, 3, None, 36), (1, 2, None, 3), (2, 2, None, 12), (3, 3, True, 54)],
)
def test_heisenberg_term_counts(rows, cols, periodic, n_terms):
    assert len(heisenberg_hamiltonian(LatticeSpec(rows, cols, periodic))) == n_terms


def test_heisenberg_pair():
    h = heisenberg_hamiltonian(LatticeSpec(1, 2), coupling=0.5)
    assert [(t.coefficient, t.string.label) for t in h] == [(0.5, "XX"), (0.5, "YY"), (0.5, "ZZ")]


@pytest.mark.parametrize(
    "rows, cols, periodic", [(1, 5, True), (1, 5, False), (3, 3, False), (3, 4, True), (2, 3, True), (2, 2, True)]
)
def test_edges_match_brute_force(rows, cols, periodic):
    edges = LatticeSpec(rows, cols).edges(periodic)
    assert len(edges) == len(set(edges))
    assert set(edges) == brute_force_bonds(rows, cols, periodic)


@pytest.mark.parametrize("rows, cols", [(0, 3), (1, 1), (-1, 2)])
def test_lattice_validation(rows, cols):
    with pytest.raises(ValueError):
        LatticeSpec(rows, cols)


@pytest.mark.parametrize(
    "spec, hopping, interaction",
    [(LatticeSpec(2, 2), 16, 4), (LatticeSpec(1, 3, True), 12, 3), (LatticeSpec(1, 3), 8, 3), (LatticeSpec(1, 2), 4, 2)],
)
def test_hubbard_fermion_term_counts(spec, hopping, interaction):
    terms = hubbard_hamiltonian(spec)
    n_bonds = len(brute_force_bonds(spec.rows, spec.cols, bool(spec.periodic)))
    assert hopping == 4 * n_bonds
    assert sum(len(t.operators) == 2 for t in terms) == hopping
    assert sum(len(t.operators) == 4 for t in terms) == interaction


@pytest.mark.parametrize("spec, m", [(LatticeSpec(2, 2), 29), (LatticeSpec(1, 3, True), 22)])
def test_hubbard_qubit_term_counts(spec, m):
    h = hubbard_qubit_hamiltonian(spec)
    assert len(h) == m
    assert h.n_qubits == 2 * spec.n_sites
    assert sum(t.string.is_identity for t in h) == 1


def test_jw_number_operator():
    h = jordan_wigner([FermionTerm(1.0, ((0, True), (0, False)))], 1)
    assert {t.string.label: t.coefficient for t in h} == {"I": 0.5, "Z": -0.5}


def test_jw_hopping_pair():
    terms = [FermionTerm(1.0, ((0, True), (1, False))), FermionTerm(1.0, ((1, True), (0, False)))]
    h = jordan_wigner(terms, 2)
    assert {t.string.label: t.coefficient for t in h} == pytest.approx({"XX": 0.5, "YY": 0.5})


def test_jw_parity_string_on_distant_hop():
    terms = [FermionTerm(1.0, ((0, True), (2, False))), FermionTerm(1.0, ((2, True), (0, False)))]
    h = jordan_wigner(terms, 3)
    assert {t.string.label for t in h} == {"XZX", "YZY"}


def test_jw_rejects_non_hermitian():
    with pytest.raises(ValueError, match="non-Hermitian"):
        jordan_wigner([FermionTerm(1.0, ((0, True), (1, False)))], 2)


def test_jw_rejects_out_of_range_mode():
    with pytest.raises(ValueError):
        jordan_wigner([FermionTerm(1.0, ((3, True), (3, False)))], 2)


@pytest.mark.parametrize(
    "spec", [LatticeSpec(1, 2), LatticeSpec(1, 3), LatticeSpec(1, 3, True), LatticeSpec(2, 2)]
)
def test_hubbard_jw_matches_dense_fermions(spec):
    terms = hubbard_hamiltonian(spec, t=1.0, u=2.0)
    n = 2 * spec.n_sites
    h = jordan_wigner(terms, n)
    np.testing.assert_allclose(hamiltonian_dense(h), fermion_dense(terms, n), atol=1e-10)


@st.composite
def hermitian_fermion_sums(draw):
    n = draw(st.integers(1, 4))
    terms = []
    for _ in range(draw(st.integers(1, 4))):
        length = draw(st.sampled_from([2, 4]))
        ops = tuple(
            (draw(st.integers(0, n - 1)), draw(st.booleans())) for _ in range(length)
        )
        c = draw(st.floats(-2, 2, allow_nan=False, allow_infinity=False))
        adjoint = tuple((j, not cr) for j, cr in reversed(ops))
        terms += [FermionTerm(c, ops), FermionTerm(c, adjoint)]
    return n, terms


@given(hermitian_fermion_sums())
@settings(max_examples=60, deadline=None)
def test_jw_random_hermitian_sums_match_dense(case):
    n, terms = case
    h = jordan_wigner(terms, n)
    expected = fermion_dense(terms, n)
    got = hamiltonian_dense(h) if len(h) else np.zeros_like(expected)
    np.testing.assert_allclose(got, expected, atol=1e-10)


def test_hubbard_spin_orbital_layout():
    h = hubbard_qubit_hamiltonian(LatticeSpec(1, 2), t=1.0, u=0.0)
    # up hop between sites 0 and 1 lives on qubits 0 and 2 with a Z on qubit 1
    assert h.coefficient_of(PauliString.from_label("XZXI")) == pytest.approx(-0.5)
    assert h.coefficient_of(PauliString.from_label("IXZX")) == pytest.approx(-0.5)
