"""Hybrid spin-boson Hilbert spaces, states and the operator algebra.

A hybrid space is the symmetric (Dicke) sector of N spin-1/2 particles
tensored with a truncated Fock space and optionally one or two ancilla
qubits.  The tensor factor order is fixed everywhere in this package:

    spin (dim N+1, basis m = -N/2 .. +N/2)  x  mode (levels 0 .. n_max-1)
        x  ancilla 1  x  ancilla 2

so a state vector reshapes to ``(N+1, n_max, 2**ancillas)``.

Conventions: quadratures are x = a^dag + a and p = i(a^dag - a), so the
vacuum variance of each is 1 and [x, p] = 2i away from the truncation
edge.  The squeeze operator is S(zeta) = exp((conj(zeta) a^2
- zeta a^dag^2)/2); for real zeta > 0 it squeezes x.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sparse

from .errors import DimensionMismatch, TruncationError

TAIL_THRESHOLD = 1e-8


@dataclass(frozen=True)
class ModeSpace:
    """Truncated Fock space with levels 0 .. n_max-1."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")


@dataclass(frozen=True)
class SpinSpace:
    """Symmetric Dicke sector of n_spins spin-1/2 particles."""

    n_spins: int

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("n_spins must be positive")

    @property
    def dim(self) -> int:
        return self.n_spins + 1

    @property
    def j(self) -> float:
        return self.n_spins / 2

    def m_values(self) -> np.ndarray:
        """Magnetizations in basis order, -N/2 .. +N/2."""
        return np.arange(self.dim) - self.j


@dataclass(frozen=True)
class HybridSpace:
    """spin x mode x ancillas, in that tensor order."""

    spin: SpinSpace
    mode: ModeSpace
    ancillas: int = 0

    def __post_init__(self):
        if self.ancillas not in (0, 1, 2):
            raise ValueError("ancillas must be 0, 1 or 2")

    @property
    def dim(self) -> int:
        return self.spin.dim * self.mode.n_max * 2**self.ancillas

    @property
    def shape(self) -> tuple:
        return (self.spin.dim, self.mode.n_max) + (2,) * self.ancillas


def hybrid(n_spins: int, n_max: int, ancillas: int = 0) -> HybridSpace:
    return HybridSpace(SpinSpace(n_spins), ModeSpace(n_max), ancillas)


@dataclass
class Ket:
    """Normalized state vector over a hybrid space."""

    space: HybridSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        if self.amplitudes.size != self.space.dim:
            raise DimensionMismatch(
                f"amplitude vector has size {self.amplitudes.size}, space dim {self.space.dim}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "Ket":
        return Ket(self.space, self.amplitudes / self.norm)

    def reshaped(self) -> np.ndarray:
        """View as (spin, mode, [anc1, [anc2]])."""
        return self.amplitudes.reshape(self.space.shape)

    def tail_population(self, guard_fraction: float = 0.05) -> float:
        """Population in the top ceil(guard_fraction * n_max) Fock levels."""
        n_max = self.space.mode.n_max
        guard = int(np.ceil(guard_fraction * n_max))
        probs = np.abs(self.reshaped()) ** 2
        return float(probs.sum(axis=tuple(i for i in range(probs.ndim) if i != 1))[n_max - guard:].sum())

    def check_truncation(self, threshold: float = TAIL_THRESHOLD) -> "Ket":
        tail = self.tail_population()
        if tail > threshold:
            raise TruncationError(
                f"tail population {tail:.3e} exceeds {threshold:.1e}; increase n_max"
            )
        return self


def vacuum_ket(space: HybridSpace, spin_vector: np.ndarray | None = None) -> Ket:
    """|0>_b tensor given spin vector (default: m = -N/2) tensor |0...> ancillas."""
    amps = np.zeros(space.shape, dtype=complex)
    if spin_vector is None:
        spin_vector = np.zeros(space.spin.dim)
        spin_vector[0] = 1.0
    idx = (slice(None), 0) + (0,) * space.ancillas
    amps[idx] = np.asarray(spin_vector, dtype=complex)
    return Ket(space, amps.ravel()).normalized()


@dataclass
class LinOp:
    """Matrix operator on a hybrid space with optional verified flags."""

    space: HybridSpace
    matrix: object  # ndarray or scipy sparse
    hermitian: bool = False
    unitary: bool = False
    _flag_tol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n) or n != self.space.dim:
            raise DimensionMismatch("operator shape does not match space dimension")
        if self.hermitian:
            dev = _norm(self.matrix - _dag(self.matrix))
            if dev >= self._flag_tol:
                raise ValueError(f"hermitian flag set but ||A - A^dag|| = {dev:.2e}")
        if self.unitary:
            d = self.to_dense()
            # generator exponentials are unitary on the whole truncated space
            dev = np.linalg.norm(d.conj().T @ d - np.eye(n)) / np.sqrt(n)
            if dev >= max(self._flag_tol, 1e-10):
                raise ValueError(f"unitary flag set but ||U^dag U - 1|| = {dev:.2e}")

    def to_dense(self) -> np.ndarray:
        if sparse.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix)

    @property
    def dag(self) -> "LinOp":
        return LinOp(self.space, _dag(self.matrix), hermitian=self.hermitian)

    def __matmul__(self, other):
        if isinstance(other, LinOp):
            if other.space != self.space:
                raise DimensionMismatch("operator spaces differ")
            return LinOp(self.space, self.matrix @ other.matrix)
        if isinstance(other, Ket):
            if other.space != self.space:
                raise DimensionMismatch("operator and ket spaces differ")
            return Ket(self.space, self.matrix @ other.amplitudes)
        return NotImplemented

    def apply(self, ket: Ket, renormalize: bool = False, check_tail: bool = False) -> Ket:
        out = self @ ket
        if check_tail:
            out.check_truncation()
        return out.normalized() if renormalize else out


def _dag(m):
    return m.conj().T if not sparse.issparse(m) else m.getH()


def _norm(m):
    if sparse.issparse(m):
        return sparse.linalg.norm(m)
    return np.linalg.norm(m)


def interior_mask(space: HybridSpace, guard_levels: int = 2) -> np.ndarray:
    """Boolean mask of basis states whose Fock level is below n_max - guard_levels."""
    levels = np.zeros(space.shape, dtype=int)
    levels += np.arange(space.mode.n_max).reshape((1, -1) + (1,) * space.ancillas)
    return (levels < space.mode.n_max - guard_levels).ravel()


# ---------------------------------------------------------------------------
# elementary operators
# ---------------------------------------------------------------------------

def destroy(mode: ModeSpace) -> np.ndarray:
    """Bosonic annihilation operator: <n-1|a|n> = sqrt(n)."""
    n = mode.n_max
    a = np.zeros((n, n), dtype=complex)
    a[np.arange(n - 1), np.arange(1, n)] = np.sqrt(np.arange(1, n))
    return a


def create(mode: ModeSpace) -> np.ndarray:
    return destroy(mode).conj().T


def number(mode: ModeSpace) -> np.ndarray:
    return np.diag(np.arange(mode.n_max, dtype=float)).astype(complex)


def quadratures(mode: ModeSpace) -> tuple:
    """(x, p) with x = a^dag + a, p = i(a^dag - a); vacuum variance 1 each."""
    a = destroy(mode)
    ad = a.conj().T
    return ad + a, 1j * (ad - a)


def collective_spin(spin: SpinSpace, axis: str) -> np.ndarray:
    """Collective spin operator J_axis on the Dicke basis m = -N/2 .. N/2."""
    m = spin.m_values()
    if axis == "z":
        return np.diag(m).astype(complex)
    j = spin.j
    jp = np.zeros((spin.dim, spin.dim), dtype=complex)
    raise_elems = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jp[np.arange(1, spin.dim), np.arange(spin.dim - 1)] = raise_elems
    jm = jp.conj().T
    if axis == "+":
        return jp
    if axis == "-":
        return jm
    if axis == "x":
        return (jp + jm) / 2
    if axis == "y":
        return (jp - jm) / 2j
    raise ValueError(f"unknown axis {axis!r}")


def unitary_from_generator(gen: np.ndarray) -> np.ndarray:
    """exp(G) for anti-Hermitian G, via eigendecomposition of iG."""
    herm = 1j * gen
    dev = np.linalg.norm(herm - herm.conj().T)
    if dev > 1e-9 * max(1.0, np.linalg.norm(herm)):
        raise ValueError(f"generator is not anti-Hermitian (deviation {dev:.2e})")
    vals, vecs = np.linalg.eigh((herm + herm.conj().T) / 2)
    return (vecs * np.exp(-1j * vals)) @ vecs.conj().T


def displacement(mode: ModeSpace, beta: complex) -> np.ndarray:
    """D(beta) = exp(beta a^dag - conj(beta) a) on the truncated space."""
    a = destroy(mode)
    return unitary_from_generator(beta * a.conj().T - np.conj(beta) * a)


def squeeze(mode: ModeSpace, zeta: complex) -> np.ndarray:
    """S(zeta) = exp((conj(zeta) a^2 - zeta a^dag^2)/2)."""
    a = destroy(mode)
    ad = a.conj().T
    return unitary_from_generator(0.5 * (np.conj(zeta) * (a @ a) - zeta * (ad @ ad)))


def squeezed_vacuum(mode: ModeSpace, zeta: complex) -> np.ndarray:
    vac = np.zeros(mode.n_max, dtype=complex)
    vac[0] = 1.0
    return squeeze(mode, zeta) @ vac


def spin_dependent_squeeze(space: HybridSpace, zeta: complex) -> LinOp:
    """S(zeta Jz): block m applies the single-mode squeeze S(zeta m).

    Block-diagonal over Dicke sectors (identity on any ancillas).
    """
    blocks = [squeeze(space.mode, zeta * m) for m in space.spin.m_values()]
    spin_mode = _block_diag(blocks)
    full = np.kron(spin_mode, np.eye(2**space.ancillas)) if space.ancillas else spin_mode
    return LinOp(space, full, unitary=True)


def _block_diag(blocks):
    n = blocks[0].shape[0]
    out = np.zeros((len(blocks) * n, len(blocks) * n), dtype=complex)
    for k, b in enumerate(blocks):
        out[k * n:(k + 1) * n, k * n:(k + 1) * n] = b
    return out


def embed_mode(space: HybridSpace, m: np.ndarray) -> np.ndarray:
    """Lift a mode operator to the full space."""
    out = np.kron(np.eye(space.spin.dim), m)
    if space.ancillas:
        out = np.kron(out, np.eye(2**space.ancillas))
    return out


def embed_spin(space: HybridSpace, m: np.ndarray) -> np.ndarray:
    """Lift a collective-spin operator to the full space."""
    out = np.kron(m, np.eye(space.mode.n_max))
    if space.ancillas:
        out = np.kron(out, np.eye(2**space.ancillas))
    return out


# ---------------------------------------------------------------------------
# scalar functionals
# ---------------------------------------------------------------------------

def expectation(ket: Ket, op) -> complex:
    mat = op.matrix if isinstance(op, LinOp) else op
    if isinstance(op, LinOp) and op.space != ket.space:
        raise DimensionMismatch("operator and ket spaces differ")
    return complex(np.vdot(ket.amplitudes, mat @ ket.amplitudes))


def fidelity(a: Ket, b: Ket) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    if a.space != b.space:
        raise DimensionMismatch("kets live on different spaces")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def mode_occupation(ket: Ket) -> float:
    probs = np.abs(ket.reshaped()) ** 2
    per_level = probs.sum(axis=tuple(i for i in range(probs.ndim) if i != 1))
    return float(per_level @ np.arange(ket.space.mode.n_max))


def recommended_n_max(z: float, floor: int = 32) -> int:
    """Fock truncation for a target squeezing magnitude z = |zeta| N / 2."""
    return max(floor, int(np.ceil(8.0 * np.exp(2.0 * z))))


# ---------------------------------------------------------------------------
# amplitude dump
# ---------------------------------------------------------------------------

def ket_to_json(ket: Ket) -> dict:
    """JSON-serializable dump; order is spin x mode x ancillas, row-major."""
    return {
        "space": {
            "n_spins": ket.space.spin.n_spins,
            "n_max": ket.space.mode.n_max,
            "ancillas": ket.space.ancillas,
            "order": "spin,mode,ancilla1,ancilla2",
        },
        "amplitudes": [[float(z.real), float(z.imag)] for z in ket.amplitudes],
    }


def ket_from_json(data: dict) -> Ket:
    sp = data["space"]
    space = hybrid(sp["n_spins"], sp["n_max"], sp.get("ancillas", 0))
    amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
    return Ket(space, amps)
