"""Simulated annealing sampler for QUBOs, brute-force ground states, sample statistics.

The sampler stands in for a quantum annealer: it returns a multiset of
bitstrings with their energies and frequencies. Every read owns an RNG
substream derived from ``(seed, read_index)``, so the sample set does not
depend on how reads are batched.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .commgraph import Graph
from .qubo import QuboMatrix, bits_to_str, qubo_energy, validate_solution

__all__ = [
    "AnnealConfig",
    "SampleRow",
    "SampleSet",
    "StatsReport",
    "simulated_annealing_sample",
    "exhaustive_minimize",
    "sample_statistics",
    "render_sampleset_tsv",
    "parse_sampleset_tsv",
    "render_validity_csv",
    "EXHAUSTIVE_MAX_DIM",
]

EXHAUSTIVE_MAX_DIM = 24


@dataclass(frozen=True)
class AnnealConfig:
    num_reads: int = 1000
    sweeps_per_read: int = 1000
    beta_initial: float = 0.1
    beta_final: float = 10.0
    schedule: str = "geometric"
    seed: int = 0

    def __post_init__(self):
        if self.num_reads < 1:
            raise ValueError("num_reads must be >= 1")
        if self.sweeps_per_read < 1:
            raise ValueError("sweeps_per_read must be >= 1")
        if not 0 < self.beta_initial < self.beta_final:
            raise ValueError("need 0 < beta_initial < beta_final")
        if self.schedule != "geometric":
            raise ValueError(f"unsupported schedule {self.schedule!r}")

    def betas(self) -> np.ndarray:
        if self.sweeps_per_read == 1:
            return np.array([self.beta_final])
        return np.geomspace(self.beta_initial, self.beta_final, self.sweeps_per_read)


@dataclass(frozen=True)
class SampleRow:
    bits: str
    energy: float
    frequency: int
    valid: bool | None = None


@dataclass(frozen=True)
class SampleSet:
    rows: tuple[SampleRow, ...]
    total_reads: int

    @classmethod
    def from_bitstrings(cls, q: QuboMatrix, bitstrings: Sequence[str]) -> SampleSet:
        counts = Counter(bitstrings)
        rows = [SampleRow(b, qubo_energy(q, b), n) for b, n in counts.items()]
        return cls(tuple(_sort_rows(rows)), len(bitstrings))

    def with_validity(self, g: Graph, k: int) -> SampleSet:
        rows = [
            SampleRow(r.bits, r.energy, r.frequency, validate_solution(g, k, r.bits).valid)
            for r in self.rows
        ]
        return SampleSet(tuple(rows), self.total_reads)

    @property
    def lowest(self) -> SampleRow | None:
        return self.rows[0] if self.rows else None

    def first_valid(self) -> SampleRow | None:
        for r in self.rows:
            if r.valid:
                return r
        return None


def _sort_rows(rows):
    return sorted(rows, key=lambda r: (r.energy, -r.frequency, r.bits))


def _sparse_rows(q: QuboMatrix):
    """Per-variable neighbour indices/weights of the symmetrised off-diagonal."""
    linear = np.zeros(q.dim)
    nbrs: list[dict[int, float]] = [dict() for _ in range(q.dim)]
    for (i, j), v in q.entries.items():
        if i == j:
            linear[i] += v
        else:
            nbrs[i][j] = nbrs[i].get(j, 0.0) + v
            nbrs[j][i] = nbrs[j].get(i, 0.0) + v
    idx = [np.fromiter(n.keys(), dtype=np.intp, count=len(n)) for n in nbrs]
    val = [np.fromiter(n.values(), dtype=float, count=len(n)) for n in nbrs]
    return linear, idx, val


def _anneal_batch(linear, idx, val, betas, rngs, dim, chunk):
    b = len(rngs)
    # layout (dim, reads): row access per variable is contiguous
    x = np.stack([rng.integers(0, 2, dim) for rng in rngs], axis=1).astype(float)
    for start in range(0, len(betas), chunk):
        stop = min(start + chunk, len(betas))
        u = np.stack([rng.random((stop - start, dim)) for rng in rngs], axis=-1)
        # accept iff delta < -log(u) / beta
        thresholds = -np.log(u) / betas[start:stop, None, None]
        for thr in thresholds:
            for i in range(dim):
                xi = x[i]
                local = val[i] @ x[idx[i]] + linear[i]
                flip = (1.0 - 2.0 * xi) * local < thr[i]
                x[i] = np.abs(xi - flip)
    return x.T.astype(np.int8).reshape(b, dim)


def simulated_annealing_sample(
    q: QuboMatrix, cfg: AnnealConfig = AnnealConfig(), batch_size: int = 1000
) -> SampleSet:
    """Metropolis single-bit-flip annealing, one bitstring per read.

    Each read starts from a uniformly random bitstring and performs
    ``cfg.sweeps_per_read`` sweeps over all variables in index order, with
    the inverse temperature rising geometrically from ``beta_initial`` to
    ``beta_final``. The final state of every read is recorded.
    """
    if q.dim < 1:
        raise ValueError("QUBO must have at least one variable")
    linear, idx, val = _sparse_rows(q)
    betas = cfg.betas()
    root = np.random.SeedSequence(cfg.seed)
    children = root.spawn(cfg.num_reads)
    chunk = max(1, min(64, 2_000_000 // max(1, q.dim * min(batch_size, cfg.num_reads))))
    finals = []
    for lo in range(0, cfg.num_reads, batch_size):
        rngs = [np.random.default_rng(s) for s in children[lo : lo + batch_size]]
        finals.append(_anneal_batch(linear, idx, val, betas, rngs, q.dim, chunk))
    states = np.concatenate(finals, axis=0)
    return SampleSet.from_bitstrings(q, [bits_to_str(row) for row in states])


def exhaustive_minimize(q: QuboMatrix, atol: float = 1e-9) -> SampleSet:
    """All global minimisers of ``q`` by full enumeration (``dim <= 24``)."""
    if q.dim > EXHAUSTIVE_MAX_DIM:
        raise ValueError(
            f"dim {q.dim} exceeds {EXHAUSTIVE_MAX_DIM} for enumeration; "
            "use simulated_annealing_sample instead"
        )
    dense = q.to_dense()
    shifts = np.arange(q.dim)
    best = np.inf
    winners: list[int] = []
    block = 1 << min(q.dim, 16)
    for lo in range(0, 1 << q.dim, block):
        ints = np.arange(lo, lo + block, dtype=np.int64)
        x = ((ints[:, None] >> shifts) & 1).astype(float)
        e = np.einsum("ni,ij,nj->n", x, dense, x)
        m = e.min()
        if m < best - atol:
            best = m
            winners = []
        if m <= best + atol:
            winners.extend(int(v) for v in ints[e <= best + atol])
    bitstrings = ["".join(str((w >> i) & 1) for i in range(q.dim)) for w in winners]
    rows = [SampleRow(b, qubo_energy(q, b), 1) for b in bitstrings]
    return SampleSet(tuple(_sort_rows(rows)), len(rows))


@dataclass(frozen=True)
class StatsReport:
    rows: tuple[SampleRow, ...]
    total_reads: int
    valid_count: int
    ground_energy: float | None
    ground_hit_rate: float
    n_qubits: int
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def valid_fraction(self) -> float:
        return self.valid_count / self.total_reads if self.total_reads else 0.0


def sample_statistics(
    s: SampleSet, g: Graph, k: int, ground_energy: float | None = None, atol: float = 1e-9
) -> StatsReport:
    """Summary of a sample set for a ``k``-colouring instance of ``g``.

    ``ground_energy`` defaults to the lowest sampled energy.
    """
    checked = s.with_validity(g, k)
    valid = sum(r.frequency for r in checked.rows if r.valid)
    if ground_energy is None and checked.rows:
        ground_energy = checked.rows[0].energy
    hits = sum(
        r.frequency for r in checked.rows if abs(r.energy - ground_energy) <= atol
    ) if ground_energy is not None else 0
    return StatsReport(
        rows=checked.rows,
        total_reads=s.total_reads,
        valid_count=valid,
        ground_energy=ground_energy,
        ground_hit_rate=hits / s.total_reads if s.total_reads else 0.0,
        n_qubits=g.n_vertices * k,
    )


def render_sampleset_tsv(s: SampleSet) -> str:
    out = ["bitstring\tenergy\tfrequency\tvalid"]
    for r in s.rows:
        valid = "-" if r.valid is None else str(r.valid).lower()
        out.append(f"{r.bits}\t{r.energy:.12g}\t{r.frequency}\t{valid}")
    return "\n".join(out) + "\n"


def parse_sampleset_tsv(text: str) -> SampleSet:
    rows = []
    lines = text.splitlines()
    if not lines or lines[0].split("\t") != ["bitstring", "energy", "frequency", "valid"]:
        raise ValueError("missing sample-set header")
    for line in lines[1:]:
        if not line.strip():
            continue
        bits, energy, freq, valid = line.split("\t")
        rows.append(SampleRow(bits, float(energy), int(freq), None if valid == "-" else valid == "true"))
    return SampleSet(tuple(rows), sum(r.frequency for r in rows))


def render_validity_csv(records: Sequence[tuple[str, int, int, int]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "n_qubits", "valid_count", "total_reads"])
    for rec in records:
        w.writerow(rec)
    return buf.getvalue()
