"""Batch grouping survey: term counts, colour counts, annealer validity, speed-up.

Manifest format, one row per line (``#`` comments allowed)::

    kind rows cols mode solver colors penalty reads seed flags

``kind`` is ``h2``, ``heisenberg``, ``hubbard`` or ``file:<path>``. ``rows``
and ``cols`` may be ``-`` when the kind ignores them; ``colors`` ``-`` (or 0)
means "use the greedy colour count". ``flags`` is ``-`` or a comma list of
``strip-z``, ``strip-universal``, ``periodic``, ``open``.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .anneal import (
    AnnealConfig,
    SampleSet,
    render_validity_csv,
    sample_statistics,
    simulated_annealing_sample,
)
from .commgraph import build_noncommutation_graph, exhaustive_chromatic, greedy_coloring
from .models import LatticeSpec, h2_hamiltonian, heisenberg_hamiltonian, hubbard_qubit_hamiltonian
from .pauli import (
    Hamiltonian,
    extract_z_only_group,
    read_hamiltonian,
    strip_universal_commuters,
)
from .qubo import graph_coloring_qubo

__all__ = [
    "SurveyRow",
    "SurveyResult",
    "DEFAULT_MANIFEST",
    "parse_manifest",
    "build_hamiltonian",
    "preprocess",
    "run_row",
    "run_survey",
    "render_table_tsv",
    "render_fig_csv",
]

KNOWN_FLAGS = {"strip-z", "strip-universal", "periodic", "open"}

DEFAULT_MANIFEST = """\
# kind      rows cols mode solver colors penalty reads seed flags
h2          -    -    qwc  anneal -      4       1000  11   -
h2          -    -    gc   anneal -      4       1000  11   strip-universal
heisenberg  1    20   qwc  anneal -      4       1000  11   periodic
heisenberg  1    20   gc   anneal -      4       1000  11   periodic
heisenberg  3    3    qwc  anneal -      4       1000  11   open
heisenberg  3    3    gc   anneal 3      4       1000  11   open
hubbard     2    2    qwc  anneal -      4       1000  11   strip-universal,strip-z
hubbard     2    2    gc   anneal -      4       1000  11   strip-universal
hubbard     1    3    qwc  anneal -      4       1000  11   periodic,strip-universal
hubbard     1    3    gc   anneal -      4       1000  11   periodic,strip-universal
"""


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class SurveyRow:
    kind: str
    rows: int | None
    cols: int | None
    mode: str
    solver: str
    colors: int | None
    penalty: float
    reads: int
    seed: int
    flags: frozenset[str] = frozenset()
    sweeps: int = 1000

    @property
    def label(self) -> str:
        if self.kind.startswith("file:"):
            base = Path(self.kind[5:]).stem
        elif self.rows is None:
            base = self.kind
        else:
            base = f"{self.kind}-{self.rows}x{self.cols}"
        return f"{base}-{self.mode}"


@dataclass(frozen=True)
class SurveyResult:
    row: SurveyRow
    terms: int | None = None
    greedy: int | None = None
    exact: int | None = None
    anneal: int | None = None
    valid_count: int | None = None
    total_reads: int | None = None
    n_qubits: int | None = None
    speedup: float | None = None
    error: str | None = None
    samples: SampleSet | None = field(default=None, compare=False)


def _opt_int(tok: str) -> int | None:
    return None if tok == "-" else int(tok)


def parse_manifest(text: str) -> list[SurveyRow]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 10:
            raise ManifestError(f"line {lineno}: expected 10 fields, got {len(parts)}")
        kind, rows_, cols, mode, solver, colors, penalty, reads, seed, flags = parts
        if mode not in ("qwc", "gc"):
            raise ManifestError(f"line {lineno}: mode must be qwc or gc")
        if solver not in ("greedy", "exact", "anneal"):
            raise ManifestError(f"line {lineno}: unknown solver {solver!r}")
        flag_set = frozenset() if flags == "-" else frozenset(flags.split(","))
        if flag_set - KNOWN_FLAGS:
            raise ManifestError(f"line {lineno}: unknown flags {sorted(flag_set - KNOWN_FLAGS)}")
        try:
            k = _opt_int(colors)
            rows.append(
                SurveyRow(
                    kind=kind,
                    rows=_opt_int(rows_),
                    cols=_opt_int(cols),
                    mode=mode,
                    solver=solver,
                    colors=k if k else None,
                    penalty=float(penalty),
                    reads=int(reads),
                    seed=int(seed),
                    flags=flag_set,
                )
            )
        except ValueError as exc:
            raise ManifestError(f"line {lineno}: {exc}") from None
    return rows


def build_hamiltonian(
    kind: str,
    rows: int | None = None,
    cols: int | None = None,
    periodic: bool | None = None,
    t: float = 1.0,
    u: float = 2.0,
    coupling: float = 1.0,
) -> Hamiltonian:
    if kind == "h2":
        return h2_hamiltonian()
    if kind.startswith("file:"):
        return read_hamiltonian(kind[5:])
    if rows is None or cols is None:
        raise ValueError(f"{kind} needs rows and cols")
    spec = LatticeSpec(rows, cols, periodic)
    if kind == "heisenberg":
        return heisenberg_hamiltonian(spec, coupling)
    if kind == "hubbard":
        return hubbard_qubit_hamiltonian(spec, t, u)
    raise ValueError(f"unknown model kind {kind!r}")


def preprocess(
    h: Hamiltonian, mode: str, strip_universal: bool, strip_z: bool
) -> tuple[Hamiltonian, list, list]:
    """Apply the optional term removals; returns ``(h, universal, z_group)``."""
    universal, z_group = [], []
    if strip_universal:
        h, universal = strip_universal_commuters(h, mode)
    if strip_z:
        h, z_group = extract_z_only_group(h)
    return h, universal, z_group


def run_row(row: SurveyRow, exact_time_limit: float = 10.0) -> SurveyResult:
    """Evaluate one manifest row; failures come back in ``error``, never raised."""
    try:
        periodic = True if "periodic" in row.flags else False if "open" in row.flags else None
        h = build_hamiltonian(row.kind, row.rows, row.cols, periodic)
        h, _, _ = preprocess(h, row.mode, "strip-universal" in row.flags, "strip-z" in row.flags)
        if len(h) == 0:
            return SurveyResult(row, terms=0, error="no terms left after preprocessing")
        g = build_noncommutation_graph(h, row.mode)
        greedy = greedy_coloring(g).n_colors
        result = SurveyResult(row, terms=len(h), greedy=greedy)
        best = greedy
        if row.solver in ("exact", "anneal"):
            ex = exhaustive_chromatic(g, greedy, time_limit=exact_time_limit)
            if ex.status == "optimal":
                result = replace(result, exact=ex.coloring.n_colors)
                best = min(best, ex.coloring.n_colors)
        if row.solver == "anneal":
            k = row.colors or greedy
            q = graph_coloring_qubo(g, k, row.penalty)
            cfg = AnnealConfig(num_reads=row.reads, sweeps_per_read=row.sweeps, seed=row.seed)
            samples = simulated_annealing_sample(q, cfg)
            stats = sample_statistics(samples, g, k, ground_energy=-row.penalty * g.n_vertices)
            solved = stats.valid_count > 0
            result = replace(
                result,
                anneal=k if solved else None,
                valid_count=stats.valid_count,
                total_reads=stats.total_reads,
                n_qubits=stats.n_qubits,
                samples=SampleSet(stats.rows, stats.total_reads),
            )
            if solved:
                best = min(best, k)
        return replace(result, speedup=len(h) / best)
    except Exception as exc:  # a failed row must not stop the survey
        return SurveyResult(row, error=f"{type(exc).__name__}: {exc}")


def run_survey(rows: Sequence[SurveyRow], jobs: int = 1) -> list[SurveyResult]:
    """Run rows, possibly in parallel; results keep manifest order."""
    if jobs <= 1 or len(rows) <= 1:
        return [run_row(r) for r in rows]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_row, rows))


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


TABLE_COLUMNS = [
    "label", "mode", "terms", "greedy", "exact", "anneal",
    "valid_count", "total_reads", "n_qubits", "speedup",
]  # fmt: skip


def render_table_tsv(results: Sequence[SurveyResult]) -> str:
    out = ["\t".join(TABLE_COLUMNS)]
    for r in results:
        vals = [
            r.row.label, r.row.mode, r.terms, r.greedy, r.exact, r.anneal,
            r.valid_count, r.total_reads, r.n_qubits, r.speedup,
        ]  # fmt: skip
        out.append("\t".join(_fmt(v) for v in vals))
    return "\n".join(out) + "\n"


def parse_table_tsv(text: str) -> list[dict[str, str]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split("\t") != TABLE_COLUMNS:
        raise ValueError("missing survey table header")
    return [dict(zip(TABLE_COLUMNS, ln.split("\t"))) for ln in lines[1:]]


def render_fig_csv(results: Sequence[SurveyResult]) -> str:
    recs = [
        (r.row.label, r.n_qubits, r.valid_count, r.total_reads)
        for r in results
        if r.valid_count is not None
    ]
    return render_validity_csv(recs)
