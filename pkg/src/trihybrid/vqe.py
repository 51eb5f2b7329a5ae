"""VQE loop over grouped shot-based energy estimates, and run-count bookkeeping."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .anneal import AnnealConfig, SampleSet, simulated_annealing_sample
from .commgraph import (
    Coloring,
    Grouping,
    build_noncommutation_graph,
    exhaustive_chromatic,
    greedy_coloring,
    grouping_from_coloring,
    naive_grouping,
)
from .pauli import CommutationMode, Hamiltonian
from .qubo import DEFAULT_PENALTY, decode_coloring, graph_coloring_qubo, validate_solution
from .sim import (
    StateVector,
    estimate_energy_grouped,
    exact_expectation,
    prepare_h2_ansatz,
)

__all__ = [
    "VqeConfig",
    "VqeReport",
    "AnnealingFailure",
    "UnregisteredAnsatzError",
    "ANSATZE",
    "GROUPING_MODES",
    "minimize_scalar",
    "make_grouping",
    "run_vqe",
    "speedup_table",
    "SpeedupRow",
]

GROUPING_MODES = ("naive", "qwc_greedy", "qwc_anneal", "qwc_exact")

# name -> (qubit count, theta -> state)
ANSATZE: dict[str, tuple[int, Callable[[float], StateVector]]] = {
    "h2": (2, prepare_h2_ansatz),
}


class UnregisteredAnsatzError(ValueError):
    pass


class AnnealingFailure(RuntimeError):
    """The annealer returned no bitstring that passes the validator."""

    def __init__(self, message: str, samples: SampleSet):
        super().__init__(message)
        self.samples = samples


@dataclass(frozen=True)
class VqeConfig:
    shots_per_group: int = 2**13
    max_iterations: int = 100
    optimizer: str = "scan_then_refine"
    theta_init: float = 0.0
    seed: int = 0
    grouping_mode: str = "qwc_greedy"
    ansatz: str = "h2"
    exact: bool = False
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    penalty: float = DEFAULT_PENALTY

    def __post_init__(self):
        if self.shots_per_group < 1:
            raise ValueError("shots_per_group must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.grouping_mode not in GROUPING_MODES:
            raise ValueError(f"grouping_mode must be one of {GROUPING_MODES}")
        if self.optimizer != "scan_then_refine":
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass(frozen=True)
class VqeReport:
    best_theta: float
    best_energy: float
    runs_per_evaluation: int
    total_evaluations: int
    grouping_used: Grouping
    speedup_factor: float
    n_terms: int
    grouping_mode: str
    shots_per_group: int
    exact_energy_at_best: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grouping_used"] = {
            "mode": self.grouping_used.mode,
            "groups": [list(g) for g in self.grouping_used.groups],
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> VqeReport:
        d = json.loads(text)
        g = d.pop("grouping_used")
        return cls(grouping_used=Grouping(tuple(tuple(x) for x in g["groups"]), g["mode"]), **d)


_GOLDEN = (math.sqrt(5) - 1) / 2


def minimize_scalar(
    objective: Callable[[float], float],
    domain: tuple[float, float] = (0.0, 2 * math.pi),
    grid_points: int = 64,
    tol: float = 1e-4,
    max_iterations: int = 100,
) -> tuple[float, float]:
    """Grid scan then golden-section refinement around the best grid point.

    Derivative free. Returns the best ``(theta, value)`` seen over all
    evaluations, so a noisy objective can never make the answer worse than
    the scan.
    """
    lo, hi = domain
    step = (hi - lo) / grid_points
    grid = lo + step * np.arange(grid_points)
    values = [objective(float(t)) for t in grid]
    i = int(np.argmin(values))
    best_t, best_v = float(grid[i]), float(values[i])

    a, b = max(lo, best_t - step), min(hi, best_t + step)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = objective(c), objective(d)
    for t, v in ((c, fc), (d, fd)):
        if v < best_v:
            best_t, best_v = t, v
    it = 0
    while b - a > tol and it < max_iterations:
        it += 1
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = objective(c)
            t, v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = objective(d)
            t, v = d, fd
        if v < best_v:
            best_t, best_v = t, v
    return best_t, best_v


def _anneal_grouping(h, mode, k, anneal_cfg, penalty):
    g = build_noncommutation_graph(h, mode)
    q = graph_coloring_qubo(g, k, penalty)
    samples = simulated_annealing_sample(q, anneal_cfg).with_validity(g, k)
    row = samples.first_valid()
    if row is None:
        raise AnnealingFailure(
            f"annealer found no valid {k}-colouring in {samples.total_reads} reads", samples
        )
    coloring = Coloring.compact(decode_coloring(row.bits, g.n_vertices, k).color_of)
    return grouping_from_coloring(h, coloring, mode), samples


def make_grouping(
    h: Hamiltonian,
    mode: str,
    anneal_cfg: AnnealConfig | None = None,
    penalty: float = DEFAULT_PENALTY,
) -> Grouping:
    """Grouping for a VQE mode: ``naive``, ``qwc_greedy``, ``qwc_exact`` or ``qwc_anneal``.

    The annealed grouping asks for as many colours as the greedy solution used.
    """
    if mode == "naive":
        return naive_grouping(h)
    qwc = CommutationMode.QWC
    g = build_noncommutation_graph(h, qwc)
    greedy = greedy_coloring(g)
    if mode == "qwc_greedy":
        return grouping_from_coloring(h, greedy, qwc)
    if mode == "qwc_exact":
        res = exhaustive_chromatic(g, greedy.n_colors)
        if res.coloring is None:
            raise RuntimeError(f"exact colouring search ended with status {res.status}")
        return grouping_from_coloring(h, res.coloring, qwc)
    if mode == "qwc_anneal":
        grouping, _ = _anneal_grouping(h, qwc, greedy.n_colors, anneal_cfg or AnnealConfig(), penalty)
        return grouping
    raise ValueError(f"unknown grouping mode {mode!r}")


def run_vqe(h: Hamiltonian, cfg: VqeConfig = VqeConfig()) -> VqeReport:
    """Optimise the registered ansatz against grouped shot-based energies.

    Evaluation ``i`` draws shot noise from substream ``i`` of ``cfg.seed``.
    The incumbent is re-estimated at the end with four times the shots and
    that value is reported as ``best_energy``.
    """
    if cfg.ansatz not in ANSATZE:
        raise UnregisteredAnsatzError(f"no ansatz named {cfg.ansatz!r}")
    n_qubits, prepare = ANSATZE[cfg.ansatz]
    if h.n_qubits != n_qubits:
        raise UnregisteredAnsatzError(
            f"ansatz {cfg.ansatz!r} acts on {n_qubits} qubits, Hamiltonian has {h.n_qubits}"
        )
    grouping = make_grouping(h, cfg.grouping_mode, cfg.anneal, cfg.penalty)

    n_evals = 0

    def objective(theta: float) -> float:
        nonlocal n_evals
        state = prepare(theta)
        seed = np.random.SeedSequence(cfg.seed, spawn_key=(n_evals,))
        n_evals += 1
        if cfg.exact:
            return exact_expectation(state, h)
        return estimate_energy_grouped(h, grouping, state, cfg.shots_per_group, seed)[0]

    best_theta, _ = minimize_scalar(
        lambda t: objective((t + cfg.theta_init) % (2 * math.pi)),
        max_iterations=cfg.max_iterations,
    )
    best_theta = (best_theta + cfg.theta_init) % (2 * math.pi)
    state = prepare(best_theta)
    exact_at_best = exact_expectation(state, h)
    if cfg.exact:
        best_energy = exact_at_best
    else:
        seed = np.random.SeedSequence(cfg.seed, spawn_key=(n_evals,))
        n_evals += 1
        best_energy = estimate_energy_grouped(h, grouping, state, 4 * cfg.shots_per_group, seed)[0]

    runs = len(grouping.groups)
    return VqeReport(
        best_theta=float(best_theta),
        best_energy=float(best_energy),
        runs_per_evaluation=runs,
        total_evaluations=n_evals,
        grouping_used=grouping,
        speedup_factor=len(h) / runs,
        n_terms=len(h),
        grouping_mode=cfg.grouping_mode,
        shots_per_group=cfg.shots_per_group,
        exact_energy_at_best=float(exact_at_best),
    )


@dataclass(frozen=True)
class SpeedupRow:
    label: str
    n_terms: int
    n_groups: int
    speedup: float


def speedup_table(
    entries: Sequence[tuple[Hamiltonian, Grouping]], labels: Sequence[str] | None = None
) -> list[SpeedupRow]:
    """Terms, groups and ``terms / groups`` per entry."""
    rows = []
    for i, (h, grouping) in enumerate(entries):
        covered = sorted(idx for grp in grouping.groups for idx in grp)
        if covered != list(range(len(h))):
            raise ValueError(f"entry {i}: grouping does not partition the terms")
        label = labels[i] if labels else str(i)
        rows.append(SpeedupRow(label, len(h), len(grouping), len(h) / len(grouping)))
    return rows


def render_speedup_table(rows: Sequence[SpeedupRow]) -> str:
    out = ["label\tterms\tgroups\tspeedup"]
    out += [f"{r.label}\t{r.n_terms}\t{r.n_groups}\t{r.speedup:.6g}" for r in rows]
    return "\n".join(out) + "\n"
