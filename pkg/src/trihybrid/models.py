"""Benchmark Hamiltonians: H2, Heisenberg lattices, Fermi-Hubbard via Jordan-Wigner."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .pauli import Hamiltonian, PauliString, Term

__all__ = [
    "LatticeSpec",
    "FermionTerm",
    "h2_hamiltonian",
    "heisenberg_hamiltonian",
    "hubbard_hamiltonian",
    "jordan_wigner",
    "hubbard_qubit_hamiltonian",
]


@dataclass(frozen=True)
class LatticeSpec:
    """Rectangular lattice; sites are numbered row-major, ``site = r * cols + c``.

    ``periodic=None`` lets each generator pick its own default boundary.
    """

    rows: int
    cols: int
    periodic: bool | None = None

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"lattice dimensions must be positive, got {self.rows}x{self.cols}")
        if self.rows * self.cols < 2:
            raise ValueError("lattice needs at least two sites")

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols

    @property
    def is_chain(self) -> bool:
        return self.rows == 1 or self.cols == 1

    def edges(self, periodic: bool | None = None) -> list[tuple[int, int]]:
        """Nearest-neighbour bonds ``(i, j)`` with ``i < j``, without duplicates.

        Walks sites in row-major order and emits each site's right bond then
        its down bond. Wrap-around bonds only appear for periodic lattices and
        only along dimensions longer than two (a length-2 ring would repeat
        the existing bond).
        """
        if periodic is None:
            periodic = bool(self.periodic)
        out: list[tuple[int, int]] = []
        seen = set()

        def add(a, b):
            e = (min(a, b), max(a, b))
            if a != b and e not in seen:
                seen.add(e)
                out.append(e)

        for r in range(self.rows):
            for c in range(self.cols):
                site = r * self.cols + c
                if c + 1 < self.cols:
                    add(site, site + 1)
                elif periodic and self.cols > 2:
                    add(site, r * self.cols)
                if r + 1 < self.rows:
                    add(site, site + self.cols)
                elif periodic and self.rows > 2:
                    add(site, c)
        return out


@dataclass(frozen=True)
class FermionTerm:
    """``coefficient * prod(op)`` where each op is ``(spin_orbital, is_creation)``."""

    coefficient: float
    operators: tuple[tuple[int, bool], ...]


def h2_hamiltonian() -> Hamiltonian:
    """Two-qubit H2 Hamiltonian in Hartree, terms ordered ZZ, Z0, Z1, XX."""
    spec = [
        (0.011, "ZZ"),
        (0.398, "ZI"),
        (0.398, "IZ"),
        (0.181, "XX"),
    ]
    return Hamiltonian([Term(c, PauliString.from_label(s)) for c, s in spec])


def heisenberg_hamiltonian(spec: LatticeSpec, coupling: float = 1.0) -> Hamiltonian:
    """``coupling * (XX + YY + ZZ)`` on every bond.

    Chains default to a periodic ring, 2D grids to open boundaries; an
    explicit ``spec.periodic`` overrides both.
    """
    periodic = spec.is_chain if spec.periodic is None else spec.periodic
    n = spec.n_sites
    terms = []
    for i, j in spec.edges(periodic):
        for axis in "XYZ":
            terms.append(Term(coupling, PauliString.from_sparse({i: axis, j: axis}, n)))
    return Hamiltonian(terms, n)


def hubbard_hamiltonian(spec: LatticeSpec, t: float = 1.0, u: float = 2.0) -> list[FermionTerm]:
    """Single-band Fermi-Hubbard model as normal-ordered fermionic products.

    Spin orbital ``2 * site + spin`` (spin 0 = up). Hopping terms come first,
    bond by bond and spin by spin, then one interaction term per site. The
    boundary is open unless ``spec.periodic`` is true.
    """
    terms = []
    for i, j in spec.edges(bool(spec.periodic)):
        for spin in (0, 1):
            p, q = 2 * i + spin, 2 * j + spin
            terms.append(FermionTerm(-t, ((p, True), (q, False))))
            terms.append(FermionTerm(-t, ((q, True), (p, False))))
    for site in range(spec.n_sites):
        up, down = 2 * site, 2 * site + 1
        terms.append(FermionTerm(u, ((up, True), (down, True), (down, False), (up, False))))
    return terms


# Single-qubit products: (a, b) -> (phase, result), axes encoded as (x, z) bits.
_I, _X, _Y, _Z = (0, 0), (1, 0), (1, 1), (0, 1)
_PRODUCT = {
    (_I, _I): (1, _I), (_I, _X): (1, _X), (_I, _Y): (1, _Y), (_I, _Z): (1, _Z),
    (_X, _I): (1, _X), (_X, _X): (1, _I), (_X, _Y): (1j, _Z), (_X, _Z): (-1j, _Y),
    (_Y, _I): (1, _Y), (_Y, _X): (-1j, _Z), (_Y, _Y): (1, _I), (_Y, _Z): (1j, _X),
    (_Z, _I): (1, _Z), (_Z, _X): (1j, _Y), (_Z, _Y): (-1j, _X), (_Z, _Z): (1, _I),
}  # fmt: skip


def _multiply(a: tuple[int, int], b: tuple[int, int], n: int) -> tuple[complex, tuple[int, int]]:
    phase = 1 + 0j
    x = z = 0
    for k in range(n):
        pa = ((a[0] >> k) & 1, (a[1] >> k) & 1)
        pb = ((b[0] >> k) & 1, (b[1] >> k) & 1)
        ph, (bx, bz) = _PRODUCT[(pa, pb)]
        phase *= ph
        x |= bx << k
        z |= bz << k
    return phase, (x, z)


def _ladder(j: int, creation: bool) -> dict[tuple[int, int], complex]:
    parity = (1 << j) - 1  # Z string on qubits 0..j-1
    bit = 1 << j
    return {
        (bit, parity): 0.5,
        (bit, parity | bit): -0.5j if creation else 0.5j,
    }


def jordan_wigner(
    terms: Sequence[FermionTerm], n_sites: int, atol: float = 1e-12
) -> Hamiltonian:
    """Map fermionic products onto qubits with the Jordan-Wigner encoding.

    ``n_sites`` is the number of spin orbitals (one qubit each). The identity
    term is kept. Raises ``ValueError`` when the summed operator keeps an
    imaginary coefficient above ``atol``, i.e. the input was not Hermitian.
    """
    total: dict[tuple[int, int], complex] = {}
    for ft in terms:
        op: dict[tuple[int, int], complex] = {(0, 0): complex(ft.coefficient)}
        for j, creation in ft.operators:
            if not 0 <= j < n_sites:
                raise ValueError(f"spin orbital {j} outside 0..{n_sites - 1}")
            nxt: dict[tuple[int, int], complex] = {}
            for key_a, ca in op.items():
                for key_b, cb in _ladder(j, creation).items():
                    phase, key = _multiply(key_a, key_b, n_sites)
                    nxt[key] = nxt.get(key, 0) + ca * cb * phase
            op = {k: v for k, v in nxt.items() if v != 0}
        for key, c in op.items():
            total[key] = total.get(key, 0) + c

    out = []
    for (x, z), c in total.items():
        if abs(c.imag) > atol:
            raise ValueError(
                f"non-Hermitian input: imaginary coefficient {c.imag:.3g} on "
                f"{PauliString(x, z, n_sites).label}"
            )
        if abs(c.real) > atol:
            out.append(Term(c.real, PauliString(x, z, n_sites)))
    return Hamiltonian(out, n_sites)


def hubbard_qubit_hamiltonian(spec: LatticeSpec, t: float = 1.0, u: float = 2.0) -> Hamiltonian:
    return jordan_wigner(hubbard_hamiltonian(spec, t, u), 2 * spec.n_sites)
