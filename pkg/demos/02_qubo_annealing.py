"""
Graph colouring as a QUBO, solved by simulated annealing
========================================================

Each (vertex, colour) pair becomes one binary variable. Penalties make every
valid colouring sit at energy -P * V, so the annealer's job is to find one of
those ground states. The validator then rejects any sample that breaks a
constraint.
"""

from trihybrid import h2_hamiltonian
from trihybrid.anneal import (
    AnnealConfig,
    exhaustive_minimize,
    render_sampleset_tsv,
    sample_statistics,
    simulated_annealing_sample,
)
from trihybrid.commgraph import Graph, build_noncommutation_graph
from trihybrid.qubo import decode_coloring, graph_coloring_qubo

g = build_noncommutation_graph(h2_hamiltonian(), "qwc")
q = graph_coloring_qubo(g, k=2, penalty=4.0)
print(f"dim {q.dim}, offset {q.offset}")
print(q.to_dense())

# With only 8 variables every bitstring can be checked directly.
for row in exhaustive_minimize(q).rows:
    print("ground:", row.bits, row.energy, decode_coloring(row.bits, g.n_vertices, 2).color_of)

samples = simulated_annealing_sample(q, AnnealConfig(num_reads=1000, seed=0))
stats = sample_statistics(samples, g, 2)
print(f"valid {stats.valid_count}/{stats.total_reads}, ground hit rate {stats.ground_hit_rate:.3f}")
print(render_sampleset_tsv(samples.with_validity(g, 2)))

# A triangle cannot be 2-coloured, so no sample reaches -3P.
triangle = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
tq = graph_coloring_qubo(triangle, 2, 4.0)
print("triangle, 2 colours, best energy:", exhaustive_minimize(tq).rows[0].energy, "vs", -3 * 4.0)
