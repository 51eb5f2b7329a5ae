"""Small statevector simulator: Pauli rotations, basis changes, shots, estimators.

Qubit ``k`` is bit ``k`` of the basis-state index. Measured bitstrings are
rendered with qubit 0 as the leftmost character, so the state ``|01>`` has
qubit 0 in ``|0>`` and qubit 1 in ``|1>`` (index 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .commgraph import Grouping
from .pauli import Hamiltonian, PauliAxis, PauliString, Term

__all__ = [
    "StateVector",
    "MeasurementBasis",
    "ShotCounts",
    "MeasurementBasisError",
    "MAX_QUBITS",
    "apply_pauli",
    "apply_pauli_exponential",
    "prepare_h2_ansatz",
    "basis_for_group",
    "apply_basis_rotation",
    "sample_shots",
    "estimate_term",
    "exact_expectation",
    "estimate_energy_grouped",
    "grouped_estimator_variance",
    "hamiltonian_matrix",
]

MAX_QUBITS = 22
_NORM_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state is not normalised (norm^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis_state(cls, bits: str) -> StateVector:
        """``"01"`` -> qubit 0 in ``|0>``, qubit 1 in ``|1>``."""
        n = len(bits)
        index = sum(1 << k for k, ch in enumerate(bits) if ch == "1")
        amps = np.zeros(1 << n, dtype=complex)
        amps[index] = 1.0
        return cls(amps, n)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> StateVector:
        amps = np.asarray(amplitudes, dtype=complex)
        if normalize:
            amps = amps / np.linalg.norm(amps)
        n = int(round(np.log2(amps.size)))
        return cls(amps, n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class MeasurementBasis:
    axes: tuple[PauliAxis, ...]

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    @property
    def label(self) -> str:
        return "".join(a.value for a in self.axes)


@dataclass(frozen=True)
class ShotCounts:
    counts: Mapping[str, int]
    total_shots: int


class MeasurementBasisError(ValueError):
    pass


def _check(state: StateVector, n: int) -> None:
    if state.n_qubits != n:
        raise ValueError(f"operator on {n} qubits applied to {state.n_qubits}-qubit state")


def _pauli_action(p: PauliString, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index map and phases with ``(P psi)[c] = phase[c] * psi[c ^ x]``."""
    idx = np.arange(1 << n, dtype=np.int64)
    src = idx ^ p.x
    n_y = (p.x & p.z).bit_count()
    signs = 1 - 2 * (np.bitwise_count(src & p.z) & 1).astype(np.int64)
    return src, (1j**n_y) * signs


def apply_pauli(state: StateVector, p: PauliString) -> np.ndarray:
    """``P |psi>`` as a raw amplitude array."""
    _check(state, p.n_qubits)
    src, phase = _pauli_action(p, state.n_qubits)
    return phase * state.amplitudes[src]


def apply_pauli_exponential(state: StateVector, p: PauliString, theta: float) -> StateVector:
    """``exp(-i theta P) |psi> = cos(theta) |psi> - i sin(theta) P |psi>``."""
    out = np.cos(theta) * state.amplitudes - 1j * np.sin(theta) * apply_pauli(state, p)
    return StateVector(out, state.n_qubits)


H2_ANSATZ_GENERATOR = PauliString.from_label("XY")


def prepare_h2_ansatz(theta: float) -> StateVector:
    """``exp(-i theta X0 Y1) |01>``."""
    return apply_pauli_exponential(StateVector.basis_state("01"), H2_ANSATZ_GENERATOR, theta)


def basis_for_group(group: Sequence[PauliString | Term]) -> MeasurementBasis:
    """Shared measurement basis of a qubit-wise commuting group.

    Qubits untouched by every term default to Z. Raises
    :class:`MeasurementBasisError` when two terms need different axes on the
    same qubit, which is how generally-commuting groups are rejected.
    """
    strings = [g.string if isinstance(g, Term) else g for g in group]
    if not strings:
        raise MeasurementBasisError("empty group")
    n = strings[0].n_qubits
    axes: list[PauliAxis | None] = [None] * n
    owner: list[int] = [-1] * n
    for t, s in enumerate(strings):
        if s.n_qubits != n:
            raise MeasurementBasisError("group mixes qubit counts")
        for k in s.support:
            a = s.axis(k)
            if axes[k] is None:
                axes[k], owner[k] = a, t
            elif axes[k] is not a:
                raise MeasurementBasisError(
                    f"qubit {k}: term {owner[k]} ({strings[owner[k]]}) needs {axes[k].value}, "
                    f"term {t} ({s}) needs {a.value}"
                )
    return MeasurementBasis(tuple(a or PauliAxis.Z for a in axes))


_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SDG = np.diag([1, -1j])
_ROTATION = {
    PauliAxis.X: _H,
    PauliAxis.Y: _H @ _SDG,
}
_INVERSE = {a: u.conj().T for a, u in _ROTATION.items()}


def _apply_1q(amps: np.ndarray, n: int, k: int, u: np.ndarray) -> np.ndarray:
    # C-order reshape puts qubit n-1 on axis 0
    t = amps.reshape((2,) * n)
    ax = n - 1 - k
    t = np.moveaxis(np.tensordot(u, t, axes=([1], [ax])), 0, ax)
    return t.reshape(-1)


def apply_basis_rotation(
    state: StateVector, basis: MeasurementBasis, inverse: bool = False
) -> StateVector:
    """Rotate so a Z measurement samples the requested per-qubit axes.

    X uses a Hadamard, Y uses S-dagger followed by a Hadamard, Z does nothing.
    ``inverse=True`` undoes the rotation.
    """
    _check(state, basis.n_qubits)
    table = _INVERSE if inverse else _ROTATION
    amps = state.amplitudes
    for k, a in enumerate(basis.axes):
        if a in table:
            amps = _apply_1q(amps, state.n_qubits, k, table[a])
    return StateVector(amps, state.n_qubits)


def _index_to_bits(index: int, n: int) -> str:
    return "".join("1" if (index >> k) & 1 else "0" for k in range(n))


def sample_shots(state: StateVector, shots: int, seed=None) -> ShotCounts:
    """Multinomial sample of computational-basis outcomes."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    p = state.probabilities()
    counts = rng.multinomial(shots, p / p.sum())
    hits = np.flatnonzero(counts)
    return ShotCounts(
        {_index_to_bits(int(i), state.n_qubits): int(counts[i]) for i in hits}, shots
    )


def _check_term_basis(term: Term, basis: MeasurementBasis) -> None:
    for k in term.string.support:
        if term.string.axis(k) is not basis.axes[k]:
            raise MeasurementBasisError(
                f"term {term.string} needs {term.string.axis(k).value} on qubit {k}, "
                f"basis has {basis.axes[k].value}"
            )


def estimate_term(counts: ShotCounts, term: Term, basis: MeasurementBasis) -> float:
    """Coefficient times the mean parity of the measured bits on the term's support."""
    _check_term_basis(term, basis)
    support = term.string.support
    acc = 0
    for bits, n in counts.counts.items():
        ones = sum(bits[k] == "1" for k in support)
        acc += n if ones % 2 == 0 else -n
    return term.coefficient * acc / counts.total_shots


def exact_expectation(state: StateVector, h: Hamiltonian, atol: float = 1e-10) -> float:
    _check(state, h.n_qubits)
    total = 0j
    for t in h.terms:
        total += t.coefficient * np.vdot(state.amplitudes, apply_pauli(state, t.string))
    if abs(total.imag) > atol:
        raise ArithmeticError(f"expectation has imaginary part {total.imag}")
    return float(total.real)


def estimate_energy_grouped(
    h: Hamiltonian, grouping: Grouping, state: StateVector, shots_per_group: int, seed=None
) -> tuple[float, int]:
    """Shot-based energy, one basis rotation and one shot batch per group.

    Group ``g`` draws its shots from substream ``g`` of ``seed``. Returns
    ``(energy, runs_used)`` where ``runs_used`` is the number of groups.
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    streams = seed.spawn(len(grouping.groups))
    energy = 0.0
    for grp, stream in zip(grouping.groups, streams):
        terms = [h.terms[i] for i in grp]
        basis = basis_for_group(terms)
        counts = sample_shots(apply_basis_rotation(state, basis), shots_per_group, stream)
        energy += sum(estimate_term(counts, t, basis) for t in terms)
    return energy, len(grouping.groups)


def grouped_estimator_variance(
    h: Hamiltonian, grouping: Grouping, state: StateVector, shots_per_group: int
) -> float:
    """Exact variance of :func:`estimate_energy_grouped` for this state."""
    n = state.n_qubits
    idx = np.arange(1 << n, dtype=np.int64)
    total = 0.0
    for grp in grouping.groups:
        terms = [h.terms[i] for i in grp]
        basis = basis_for_group(terms)
        p = apply_basis_rotation(state, basis).probabilities()
        f = np.zeros(1 << n)
        for t in terms:
            mask = sum(1 << k for k in t.string.support)
            f += t.coefficient * (1 - 2 * (np.bitwise_count(idx & mask) & 1).astype(float))
        mean = p @ f
        total += (p @ f**2 - mean**2) / shots_per_group
    return float(total)


def hamiltonian_matrix(h: Hamiltonian) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of ``h`` in the same qubit ordering."""
    n = h.n_qubits
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for t in h.terms:
        src, phase = _pauli_action(t.string, n)
        # (P)[c, src[c]] = phase[c]
        out[cols, src] += t.coefficient * phase
    return out
