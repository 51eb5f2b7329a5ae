import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trihybrid.commgraph import Coloring, Graph, build_noncommutation_graph
from trihybrid.models import h2_hamiltonian
from trihybrid.qubo import (
    QuboMatrix,
    decode_coloring,
    encode_coloring,
    graph_coloring_qubo,
    parse_qubo,
    qubo_energies,
    qubo_energy,
    render_qubo,
    validate_solution,
)

H2_GRAPH = build_noncommutation_graph(h2_hamiltonian(), "qwc")


def penalty_oracle(g: Graph, k: int, p: float, bits: str) -> float:
    """Constraint-form energy with the constant ``P * V`` removed."""
    x = np.array([int(b) for b in bits]).reshape(g.n_vertices, k)
    onehot = sum((1 - x[v].sum()) ** 2 for v in range(g.n_vertices))
    clash = sum(int(x[v] @ x[w]) for v, w in g.edges)
    return p * (onehot + clash) - p * g.n_vertices


@st.composite
def small_instances(draw):
    n = draw(st.integers(1, 5))
    k = draw(st.integers(1, max(1, 16 // n)))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, edges), k


@pytest.mark.parametrize(
    "bits, energy, valid",
    [
        ("01010110", -16, True),
        ("10101001", -16, True),
        ("01100110", -12, False),
        ("10100101", -12, False),
        ("01000110", -12, False),
    ],
)
def test_h2_sample_table(bits, energy, valid):
    q = graph_coloring_qubo(H2_GRAPH, 2, penalty=4)
    assert q.dim == 8
    assert qubo_energy(q, bits) == energy
    sol = validate_solution(H2_GRAPH, 2, bits, q)
    assert sol.valid is valid and sol.energy == energy
    assert bool(sol.violations) is not valid


def test_h2_decode():
    assert decode_coloring("01010110", 4, 2).color_of == (1, 1, 1, 0)
    assert decode_coloring("10101001", 4, 2).color_of == (0, 0, 0, 1)


def test_violation_messages():
    sol = validate_solution(H2_GRAPH, 2, "01000110")
    assert sol.violations == ("one-hot: vertex 1 has 0 colours",)
    sol = validate_solution(H2_GRAPH, 2, "01100110")
    assert any(v.startswith("adjacency") for v in sol.violations)


def test_single_vertex():
    q = graph_coloring_qubo(Graph(1, frozenset()), 1, penalty=2.5)
    assert q.dim == 1 and dict(q.entries) == {(0, 0): -2.5}
    assert q.offset == 2.5


def test_entries_structure():
    q = graph_coloring_qubo(Graph.from_edges(2, [(0, 1)]), 2, penalty=1.0)
    assert dict(q.entries) == {
        (0, 0): -1.0, (1, 1): -1.0, (2, 2): -1.0, (3, 3): -1.0,
        (0, 1): 2.0, (2, 3): 2.0,
        (0, 2): 1.0, (1, 3): 1.0,
    }  # fmt: skip
    assert all(i <= j for i, j in q.entries)


def all_bitstrings(dim):
    return (np.arange(1 << dim)[:, None] >> np.arange(dim)) & 1


@given(small_instances(), st.sampled_from([1.0, 4.0, 7.5]))
@settings(max_examples=40, deadline=None)
def test_energy_matches_constraint_form_exhaustively(inst, p):
    g, k = inst
    q = graph_coloring_qubo(g, k, penalty=p)
    x = all_bitstrings(q.dim)
    energies = qubo_energies(q, x)
    x3 = x.reshape(-1, g.n_vertices, k)
    onehot = ((1 - x3.sum(axis=2)) ** 2).sum(axis=1)
    clash = sum((x3[:, v] * x3[:, w]).sum(axis=1) for v, w in g.edges)
    np.testing.assert_allclose(energies, p * (onehot + clash) - p * g.n_vertices)
    valid = (onehot + clash) == 0
    ground = np.isclose(energies, -p * g.n_vertices)
    assert np.array_equal(valid, ground)
    assert np.all(energies[~valid] >= -p * g.n_vertices + p - 1e-9)
    for i in range(0, len(x), max(1, len(x) // 16)):
        bits = "".join(map(str, x[i]))
        assert qubo_energy(q, bits) == pytest.approx(penalty_oracle(g, k, p, bits))
        assert validate_solution(g, k, bits, q).valid == valid[i]


@given(small_instances(), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_color_permutation_invariance(inst, rnd):
    g, k = inst
    q = graph_coloring_qubo(g, k)
    colors = [rnd.randrange(k) for _ in range(g.n_vertices)]
    perm = list(range(k))
    rnd.shuffle(perm)
    a = encode_coloring(Coloring(tuple(colors), k), k)
    b = encode_coloring(Coloring(tuple(perm[c] for c in colors), k), k)
    assert qubo_energy(q, a) == qubo_energy(q, b)


@given(small_instances(), st.randoms(use_true_random=False))
@settings(max_examples=40)
def test_encode_decode_identity(inst, rnd):
    g, k = inst
    c = Coloring(tuple(rnd.randrange(k) for _ in range(g.n_vertices)), k)
    assert decode_coloring(encode_coloring(c, k), g.n_vertices, k) == c


def test_decode_rejects_non_one_hot():
    with pytest.raises(ValueError, match="one-hot"):
        decode_coloring("1100", 2, 2)


@given(small_instances(), st.floats(0.1, 10))
@settings(max_examples=30)
def test_render_parse_round_trip(inst, p):
    g, k = inst
    q = graph_coloring_qubo(g, k, penalty=p)
    back = parse_qubo(render_qubo(q))
    assert back.dim == q.dim and dict(back.entries) == dict(q.entries)


def test_from_dense_folds_lower_triangle():
    q = QuboMatrix.from_dense([[1.0, 2.0], [3.0, -1.0]])
    assert dict(q.entries) == {(0, 0): 1.0, (0, 1): 5.0, (1, 1): -1.0}
    assert q == QuboMatrix.from_dense([[1.0, 5.0], [0.0, -1.0]])
    x = np.array([1.0, 1.0])
    assert qubo_energy(q, "11") == x @ np.array([[1.0, 2.0], [3.0, -1.0]]) @ x


@pytest.mark.parametrize("k, p", [(0, 4.0), (2, 0.0), (2, -1.0)])
def test_qubo_argument_errors(k, p):
    with pytest.raises(ValueError):
        graph_coloring_qubo(H2_GRAPH, k, penalty=p)


def test_length_and_alphabet_errors():
    q = graph_coloring_qubo(H2_GRAPH, 2)
    with pytest.raises(ValueError):
        qubo_energy(q, "0101")
    with pytest.raises(ValueError):
        qubo_energy(q, "0101012x")
    with pytest.raises(ValueError):
        validate_solution(H2_GRAPH, 2, "01")
