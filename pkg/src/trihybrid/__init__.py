"""Commuting-group measurement reduction for VQE.

Pauli terms are grouped by colouring their non-commutation graph (greedy,
exact, or QUBO + simulated annealing), and a small statevector VQE measures
each group in one shared basis.
"""

__version__ = "0.1.0"

from .pauli import (
    CommutationMode,
    Hamiltonian,
    PauliString,
    Term,
    extract_z_only_group,
    generally_commutes,
    parse_hamiltonian,
    qubit_wise_commutes,
    render_hamiltonian,
    strip_universal_commuters,
)
from .models import LatticeSpec, h2_hamiltonian, heisenberg_hamiltonian, hubbard_qubit_hamiltonian
from .commgraph import (
    build_noncommutation_graph,
    exhaustive_chromatic,
    greedy_coloring,
    grouping_from_coloring,
    validate_coloring,
)
from .qubo import graph_coloring_qubo, qubo_energy, validate_solution
from .anneal import AnnealConfig, exhaustive_minimize, simulated_annealing_sample
from .vqe import VqeConfig, run_vqe
