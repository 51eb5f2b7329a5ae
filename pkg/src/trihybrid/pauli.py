"""Pauli strings, Hamiltonians in the Pauli basis, and commutation predicates.

A Pauli string on ``n`` qubits is stored as a pair of integer bit masks
``(x, z)``: qubit ``k`` carries

* ``I`` when neither bit ``k`` is set,
* ``X`` when only the x bit is set,
* ``Z`` when only the z bit is set,
* ``Y`` when both are set.

Qubit indices are 0-based everywhere. The text format for Hamiltonians is one
term per line::

    # H2 in a minimal basis
    0.011 Z0 Z1
    0.398 Z0
    0.398 Z1
    0.181 X0 X1

A bare ``I`` token marks the identity term.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

__all__ = [
    "PauliAxis",
    "PauliString",
    "Term",
    "Hamiltonian",
    "CommutationMode",
    "HamiltonianParseError",
    "parse_term",
    "parse_hamiltonian",
    "render_hamiltonian",
    "qubit_wise_commutes",
    "generally_commutes",
    "commutes",
    "strip_universal_commuters",
    "extract_z_only_group",
]


class PauliAxis(str, Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"


class CommutationMode(str, Enum):
    """Which notion of commutation to use when grouping terms."""

    QWC = "qwc"
    GC = "gc"


_AXIS_BITS = {
    PauliAxis.I: (0, 0),
    PauliAxis.X: (1, 0),
    PauliAxis.Y: (1, 1),
    PauliAxis.Z: (0, 1),
}
_BITS_AXIS = {bits: axis for axis, bits in _AXIS_BITS.items()}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, packed into two bit masks."""

    x: int
    z: int
    n_qubits: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        limit = 1 << self.n_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("bit masks do not fit in n_qubits")

    @classmethod
    def from_axes(cls, axes: Iterable[PauliAxis | str]) -> PauliString:
        """Build from a per-qubit axis sequence, qubit 0 first."""
        x = z = 0
        n = 0
        for k, axis in enumerate(axes):
            bx, bz = _AXIS_BITS[PauliAxis(axis)]
            x |= bx << k
            z |= bz << k
            n += 1
        return cls(x, z, n)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """``"XIZ"`` -> X on qubit 0, Z on qubit 2."""
        return cls.from_axes(label)

    @classmethod
    def from_sparse(cls, ops: dict[int, PauliAxis | str], n_qubits: int) -> PauliString:
        return cls.from_axes(ops.get(k, PauliAxis.I) for k in range(n_qubits))

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(0, 0, n_qubits)

    def axis(self, k: int) -> PauliAxis:
        return _BITS_AXIS[((self.x >> k) & 1, (self.z >> k) & 1)]

    @property
    def axes(self) -> tuple[PauliAxis, ...]:
        return tuple(self.axis(k) for k in range(self.n_qubits))

    @property
    def support(self) -> tuple[int, ...]:
        mask = self.x | self.z
        return tuple(k for k in range(self.n_qubits) if (mask >> k) & 1)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_z_only(self) -> bool:
        """True when every non-identity factor is Z (identity included)."""
        return self.x == 0

    def padded(self, n_qubits: int) -> PauliString:
        if n_qubits < self.n_qubits:
            raise ValueError("cannot shrink a Pauli string")
        return PauliString(self.x, self.z, n_qubits)

    @property
    def label(self) -> str:
        return "".join(a.value for a in self.axes)

    def sparse_label(self) -> str:
        """Text-format token list, e.g. ``"X0 X1"`` or ``"I"``."""
        if self.is_identity:
            return "I"
        return " ".join(f"{self.axis(k).value}{k}" for k in self.support)

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class Term:
    coefficient: float
    string: PauliString

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ValueError(f"coefficient must be finite, got {self.coefficient}")

    def __str__(self) -> str:
        return f"{self.coefficient!r} {self.string.sparse_label()}"


class Hamiltonian:
    """Ordered sum of real-weighted Pauli strings on a common qubit register.

    Construction pads every string to the largest qubit count, merges
    duplicate strings by adding coefficients (first appearance fixes the
    position) and drops terms whose coefficient is exactly zero.
    """

    __slots__ = ("_terms", "_n_qubits")

    def __init__(self, terms: Iterable[Term], n_qubits: int | None = None):
        terms = list(terms)
        width = max([t.string.n_qubits for t in terms] + [n_qubits or 1])
        if n_qubits is not None and n_qubits < width:
            raise ValueError(f"terms need {width} qubits, n_qubits={n_qubits}")
        merged: dict[tuple[int, int], float] = {}
        for t in terms:
            key = (t.string.x, t.string.z)
            merged[key] = merged.get(key, 0.0) + t.coefficient
        self._n_qubits = width
        self._terms = tuple(
            Term(c, PauliString(x, z, width)) for (x, z), c in merged.items() if c != 0.0
        )

    @property
    def terms(self) -> tuple[Term, ...]:
        return self._terms

    @property
    def n_qubits(self) -> int:
        return self._n_qubits

    @property
    def strings(self) -> list[PauliString]:
        return [t.string for t in self._terms]

    @property
    def coefficients(self) -> list[float]:
        return [t.coefficient for t in self._terms]

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __getitem__(self, i):
        return self._terms[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hamiltonian):
            return NotImplemented
        return self._n_qubits == other._n_qubits and self._terms == other._terms

    def __hash__(self):
        return hash((self._n_qubits, self._terms))

    def __repr__(self) -> str:
        return f"Hamiltonian(m={len(self)}, n_qubits={self.n_qubits})"

    def subset(self, indices: Iterable[int]) -> Hamiltonian:
        return Hamiltonian([self._terms[i] for i in indices], self._n_qubits)

    def coefficient_of(self, string: PauliString | str) -> float:
        if isinstance(string, str):
            string = PauliString.from_label(string)
        for t in self._terms:
            if (t.string.x, t.string.z) == (string.x, string.z):
                return t.coefficient
        return 0.0


class HamiltonianParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\S+")
_AXIS_TOKEN = re.compile(r"([XYZ])(\d+)$")


def _parse_line(text: str, lineno: int) -> Term | None:
    text = text.split("#", 1)[0]
    tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(text)]
    if not tokens:
        return None
    (coef_tok, col), rest = tokens[0], tokens[1:]
    try:
        coefficient = float(coef_tok)
    except ValueError:
        raise HamiltonianParseError(f"malformed coefficient {coef_tok!r}", lineno, col) from None
    if not math.isfinite(coefficient):
        raise HamiltonianParseError(f"non-finite coefficient {coef_tok!r}", lineno, col)
    if len(rest) == 1 and rest[0][0] == "I":
        return Term(coefficient, PauliString.identity(1))
    ops: dict[int, str] = {}
    for tok, col in rest:
        m = _AXIS_TOKEN.match(tok)
        if m is None:
            if tok[:1] in "XYZ" and tok[1:2] == "-":
                raise HamiltonianParseError(f"negative qubit index in {tok!r}", lineno, col)
            raise HamiltonianParseError(f"malformed Pauli token {tok!r}", lineno, col)
        k = int(m.group(2))
        if k in ops:
            raise HamiltonianParseError(f"qubit {k} appears twice", lineno, col)
        ops[k] = m.group(1)
    if not ops:
        raise HamiltonianParseError("term has no Pauli factors (use 'I' for identity)", lineno, col)
    return Term(coefficient, PauliString.from_sparse(ops, max(ops) + 1))


def parse_term(line: str) -> Term:
    """Parse a single term line such as ``"0.181 X0 X1"``."""
    term = _parse_line(line, 1)
    if term is None:
        raise HamiltonianParseError("empty term", 1, 1)
    return term


_WIDTH_HEADER = re.compile(r"#\s*n_qubits\s+(\d+)")


def parse_hamiltonian(text: str) -> Hamiltonian:
    """Parse the text format; a leading ``# n_qubits N`` comment widens the register."""
    terms = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        term = _parse_line(line, lineno)
        if term is not None:
            terms.append(term)
    if not terms:
        raise HamiltonianParseError("no terms found", 1, 1)
    h = Hamiltonian(terms)
    m = _WIDTH_HEADER.match(text)
    if m and int(m.group(1)) > h.n_qubits:
        h = Hamiltonian(h.terms, int(m.group(1)))
    return h


def render_hamiltonian(h: Hamiltonian) -> str:
    """Inverse of :func:`parse_hamiltonian` (coefficients printed with ``repr``).

    A header comment records the qubit count so that trailing identity
    qubits survive the round trip.
    """
    lines = [f"# n_qubits {h.n_qubits} terms {len(h)}"]
    lines += [str(t) for t in h.terms]
    return "\n".join(lines) + "\n"


def read_hamiltonian(path) -> Hamiltonian:
    with open(path, encoding="utf-8") as fh:
        return parse_hamiltonian(fh.read())


def write_hamiltonian(h: Hamiltonian, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_hamiltonian(h))


def _check_sizes(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"Pauli strings act on {a.n_qubits} and {b.n_qubits} qubits")


def _anticommuting_mask(a: PauliString, b: PauliString) -> int:
    # Bit k set iff both factors at k are non-identity and differ.
    return (a.x & b.z) ^ (a.z & b.x)


def qubit_wise_commutes(a: PauliString, b: PauliString) -> bool:
    """True iff at every qubit the factors are equal or one is the identity."""
    _check_sizes(a, b)
    return _anticommuting_mask(a, b) == 0


def generally_commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the factors anticommute on an even number of qubits."""
    _check_sizes(a, b)
    return _anticommuting_mask(a, b).bit_count() % 2 == 0


def commutes(a: PauliString, b: PauliString, mode: CommutationMode | str) -> bool:
    if CommutationMode(mode) is CommutationMode.QWC:
        return qubit_wise_commutes(a, b)
    return generally_commutes(a, b)


def strip_universal_commuters(
    h: Hamiltonian, mode: CommutationMode | str
) -> tuple[Hamiltonian, list[Term]]:
    """Remove terms that commute with every other term under ``mode``.

    Such terms are isolated vertices of the non-commutation graph and can join
    any group. Identity terms are always removed. A lone term is removed as
    well, since it trivially commutes with all (zero) others.
    """
    strings = h.strings
    keep, removed = [], []
    for i, s in enumerate(strings):
        universal = s.is_identity or all(
            commutes(s, other, mode) for j, other in enumerate(strings) if j != i
        )
        (removed if universal else keep).append(i)
    return h.subset(keep), [h.terms[i] for i in removed]


def extract_z_only_group(h: Hamiltonian) -> tuple[Hamiltonian, list[Term]]:
    """Split off every term built from Z and I factors only.

    Those terms pairwise qubit-wise commute, so they always form one valid
    measurement group in the computational basis.
    """
    z_group = [t for t in h.terms if t.string.is_z_only]
    rest = [t for t in h.terms if not t.string.is_z_only]
    return Hamiltonian(rest, h.n_qubits), z_group


def group_is_commuting(strings: Sequence[PauliString], mode: CommutationMode | str) -> bool:
    return all(
        commutes(strings[i], strings[j], mode)
        for i in range(len(strings))
        for j in range(i + 1, len(strings))
    )
