"""Graph K-colouring as a QUBO, plus the validator/decoder for sampled bitstrings.

Binary variable ``x[v * k + c]`` is 1 when vertex ``v`` takes colour ``c``.
Penalties, with ``P`` the penalty weight:

* one colour per vertex: ``P * (1 - sum_c x[v, c])**2``. Expanding and
  dropping the constant ``P`` gives ``-P`` on each diagonal entry and ``+2P``
  between two colours of the same vertex.
* no monochromatic edge: ``+P`` on ``x[v, c] * x[w, c]`` for every edge
  ``(v, w)``.

Every proper colouring then has energy ``-P * n_vertices``; the dropped
constant is available as :attr:`QuboMatrix.offset`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .commgraph import Coloring, Graph

__all__ = [
    "QuboMatrix",
    "ColoringSolution",
    "graph_coloring_qubo",
    "qubo_energy",
    "validate_solution",
    "decode_coloring",
    "encode_coloring",
    "render_qubo",
    "parse_qubo",
    "DEFAULT_PENALTY",
]

DEFAULT_PENALTY = 4.0


def _as_bits(bits) -> np.ndarray:
    if isinstance(bits, str):
        if set(bits) - {"0", "1"}:
            raise ValueError(f"bitstring must contain only 0/1, got {bits!r}")
        return np.fromiter((ch == "1" for ch in bits), dtype=np.int8, count=len(bits))
    return np.asarray(bits, dtype=np.int8)


def bits_to_str(bits) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


@dataclass(frozen=True)
class QuboMatrix:
    """Upper-triangular QUBO (``i <= j``), stored sparsely."""

    dim: int
    entries: Mapping[tuple[int, int], float]
    offset: float = 0.0

    @classmethod
    def from_entries(
        cls, dim: int, entries: Iterable[tuple[int, int, float]], offset: float = 0.0
    ) -> QuboMatrix:
        """Accumulate ``(i, j, value)`` triples; ``(j, i)`` folds onto ``(i, j)``."""
        acc: dict[tuple[int, int], float] = {}
        for i, j, v in entries:
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"index ({i}, {j}) outside dim {dim}")
            key = (i, j) if i <= j else (j, i)
            acc[key] = acc.get(key, 0.0) + float(v)
        return cls(dim, {k: v for k, v in sorted(acc.items()) if v != 0.0}, offset)

    @classmethod
    def from_dense(cls, matrix) -> QuboMatrix:
        """Normalise a square matrix: ``Q[i, j] + Q[j, i]`` lands on ``i < j``."""
        q = np.asarray(matrix, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("QUBO matrix must be square")
        n = q.shape[0]
        return cls.from_entries(n, ((i, j, q[i, j]) for i in range(n) for j in range(n)))

    def to_dense(self) -> np.ndarray:
        q = np.zeros((self.dim, self.dim))
        for (i, j), v in self.entries.items():
            q[i, j] = v
        return q

    def __eq__(self, other):
        if not isinstance(other, QuboMatrix):
            return NotImplemented
        return (
            self.dim == other.dim
            and dict(self.entries) == dict(other.entries)
            and self.offset == other.offset
        )


@dataclass(frozen=True)
class ColoringSolution:
    bits: str
    energy: float
    valid: bool
    violations: tuple[str, ...]


def graph_coloring_qubo(g: Graph, k: int, penalty: float = DEFAULT_PENALTY) -> QuboMatrix:
    if k < 1:
        raise ValueError(f"number of colours must be >= 1, got {k}")
    if not penalty > 0:
        raise ValueError(f"penalty must be positive, got {penalty}")
    entries = []
    for v in range(g.n_vertices):
        for c in range(k):
            entries.append((v * k + c, v * k + c, -penalty))
            for c2 in range(c + 1, k):
                entries.append((v * k + c, v * k + c2, 2 * penalty))
    for v, w in g.edges:
        for c in range(k):
            entries.append((v * k + c, w * k + c, penalty))
    return QuboMatrix.from_entries(g.n_vertices * k, entries, offset=penalty * g.n_vertices)


def qubo_energy(q: QuboMatrix, bits) -> float:
    x = _as_bits(bits)
    if x.shape != (q.dim,):
        raise ValueError(f"bitstring length {x.size} != QUBO dim {q.dim}")
    return float(sum(v for (i, j), v in q.entries.items() if x[i] and x[j]))


def qubo_energies(q: QuboMatrix, bits: np.ndarray) -> np.ndarray:
    """Vectorised energies for a ``(n_samples, dim)`` 0/1 array."""
    x = np.asarray(bits, dtype=float)
    return np.einsum("ni,ij,nj->n", x, q.to_dense(), x)


def validate_solution(g: Graph, k: int, bits, q: QuboMatrix | None = None) -> ColoringSolution:
    """Check one-hot and adjacency constraints for a sampled bitstring.

    The energy is computed against ``q`` when given, otherwise against the
    default-penalty colouring QUBO of ``g``.
    """
    x = _as_bits(bits)
    if x.shape != (g.n_vertices * k,):
        raise ValueError(f"bitstring length {x.size} != {g.n_vertices} vertices x {k} colours")
    x2 = x.reshape(g.n_vertices, k)
    violations = []
    for v in range(g.n_vertices):
        n_on = int(x2[v].sum())
        if n_on != 1:
            violations.append(f"one-hot: vertex {v} has {n_on} colours")
    for v, w in sorted(g.edges):
        for c in np.flatnonzero(x2[v] & x2[w]):
            violations.append(f"adjacency: edge ({v}, {w}) both colour {c}")
    if q is None:
        q = graph_coloring_qubo(g, k)
    return ColoringSolution(bits_to_str(x), qubo_energy(q, x), not violations, tuple(violations))


def decode_coloring(bits, v: int, k: int) -> Coloring:
    """Read the colour of each vertex off a validated bitstring (no relabelling)."""
    x = _as_bits(bits)
    if x.shape != (v * k,):
        raise ValueError(f"bitstring length {x.size} != {v} x {k}")
    x2 = x.reshape(v, k)
    if not np.all(x2.sum(axis=1) == 1):
        bad = [int(i) for i in np.flatnonzero(x2.sum(axis=1) != 1)]
        raise ValueError(f"bitstring is not one-hot at vertices {bad}")
    colors = tuple(int(c) for c in x2.argmax(axis=1))
    return Coloring(colors, k)


def encode_coloring(c: Coloring, k: int | None = None) -> str:
    k = c.n_colors if k is None else k
    x = np.zeros((len(c.color_of), k), dtype=np.int8)
    x[np.arange(len(c.color_of)), c.color_of] = 1
    return bits_to_str(x)


def render_qubo(q: QuboMatrix) -> str:
    lines = [f"# dim {q.dim}"]
    lines += [f"{i} {j} {v:.17g}" for (i, j), v in sorted(q.entries.items())]
    return "\n".join(lines) + "\n"


def parse_qubo(text: str) -> QuboMatrix:
    dim = None
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "dim":
                dim = int(parts[1])
            continue
        i, j, v = line.split()
        entries.append((int(i), int(j), float(v)))
    if dim is None:
        raise ValueError("missing '# dim <n>' header")
    return QuboMatrix.from_entries(dim, entries)
