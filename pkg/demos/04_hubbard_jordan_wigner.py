"""
Fermi-Hubbard through Jordan-Wigner
===================================

The Hubbard model is written with fermionic ladder operators. Jordan-Wigner
turns each into Pauli strings with a Z tail. Here we build the 2x2 lattice
and see how much the diagonal terms shrink the grouping problem.
"""

import numpy as np

from trihybrid import LatticeSpec
from trihybrid.commgraph import build_noncommutation_graph, greedy_coloring
from trihybrid.models import hubbard_hamiltonian, jordan_wigner
from trihybrid.pauli import extract_z_only_group, strip_universal_commuters
from trihybrid.sim import hamiltonian_matrix

spec = LatticeSpec(2, 2)
fermion_terms = hubbard_hamiltonian(spec, t=1.0, u=2.0)
h = jordan_wigner(fermion_terms, 2 * spec.n_sites)
print(f"{len(fermion_terms)} fermionic products -> {len(h)} Pauli terms on {h.n_qubits} qubits")

# 256x256 is small enough to diagonalise for reference.
energies = np.linalg.eigvalsh(hamiltonian_matrix(h))
print("lowest eigenvalues:", np.round(energies[:4], 6))

rest, removed = strip_universal_commuters(h, "qwc")
print("dropped terms that commute with everything:", [str(t) for t in removed])
rest, z_terms = extract_z_only_group(rest)
print(f"{len(z_terms)} Z-only terms form one group, {len(rest)} remain")

for mode in ("qwc", "gc"):
    g = build_noncommutation_graph(rest if mode == "qwc" else strip_universal_commuters(h, "gc")[0], mode)
    print(f"{mode}: {g.n_vertices} terms -> {greedy_coloring(g).n_colors} groups")
