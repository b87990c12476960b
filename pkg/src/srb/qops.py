"""Liouville-space channel algebra on two qubits and their symmetric subspace.

Operators are vectorized by column stacking, so that ``vec(U A U^dag) =
(U^* kron U) vec(A)`` and the superoperator of a Kraus set ``{K_i}`` is
``sum_i K_i^* kron K_i``.  The two-qubit space is split into the symmetric
(triplet) block, indexed by the number of excited qubits, and the
antisymmetric singlet.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

UNITARY_TOL = 1e-10
TP_TOL = 1e-10
BLOCK_TOL = 1e-14
CP_TOL = 1e-10


class InvalidInputError(ValueError):
    """Raised for malformed matrices (wrong shape, non-unitary, ...)."""


class InvalidChannelError(ValueError):
    """Raised when a Kraus set does not describe a trace-preserving map."""


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization ``|A>>``."""
    return np.asarray(a, dtype=complex).ravel(order="F")


def unvec(v: np.ndarray, d: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    return v.reshape((d, d), order="F")


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``<<A|B>> = Tr(A^dag B)``."""
    return complex(np.vdot(vec(a), vec(b)))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {u.shape}")
    if not is_unitary(u, tol):
        raise InvalidInputError("matrix is not unitary")
    return u


@dataclass(frozen=True, eq=False)
class SuperOp:
    """A linear map on ``d x d`` operators stored as a ``d^2 x d^2`` matrix.

    The matrix acts on column-stacked vectorized operators in the
    computational basis.  Composition follows operator order:
    ``(a @ b)`` applies ``b`` first.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = m.shape[0]
        d = int(round(np.sqrt(n)))
        if m.ndim != 2 or m.shape != (n, n) or d * d != n:
            raise InvalidInputError(f"superoperator must be d^2 x d^2, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))

    def __matmul__(self, other: "SuperOp") -> "SuperOp":
        if not isinstance(other, SuperOp):
            return NotImplemented
        return SuperOp(self.matrix @ other.matrix)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)

    def power(self, n: int) -> "SuperOp":
        return SuperOp(np.linalg.matrix_power(self.matrix, n))

    def is_trace_preserving(self, tol: float = TP_TOL) -> bool:
        one = vec(np.eye(self.dim))
        return bool(np.max(np.abs(one.conj() @ self.matrix - one.conj())) <= tol)

    def choi(self) -> np.ndarray:
        """Choi matrix ``sum_ij |i><j| kron Lambda(|i><j|)``."""
        d = self.dim
        out = np.zeros((d * d, d * d), dtype=complex)
        for i, j in itertools.product(range(d), repeat=2):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            out += np.kron(e, self.apply(e))
        return out

    def is_completely_positive(self, tol: float = CP_TOL) -> bool:
        c = self.choi()
        return bool(np.min(np.linalg.eigvalsh((c + c.conj().T) / 2)) >= -tol)

    def is_cptp(self, tol: float = TP_TOL) -> bool:
        return self.is_trace_preserving(tol) and self.is_completely_positive(tol)

    def in_basis(self, basis: Sequence[np.ndarray] | None = None) -> np.ndarray:
        """Matrix elements ``<<P_i|S|P_j>>`` in an orthonormal operator basis.

        Defaults to the normalized Hermitian basis from :func:`hermitian_basis`,
        in which CPTP maps have real entries.
        """
        if basis is None:
            basis = hermitian_basis(self.dim)
        b = np.column_stack([vec(p) for p in basis])
        return b.conj().T @ self.matrix @ b

    @classmethod
    def identity(cls, d: int) -> "SuperOp":
        return cls(np.eye(d * d, dtype=complex))


def unitary_to_super(u: np.ndarray) -> SuperOp:
    u = _check_unitary(u)
    return SuperOp(np.kron(u.conj(), u))


def kraus_to_super(kraus: Iterable[np.ndarray], tol: float = UNITARY_TOL) -> SuperOp:
    ks = [np.asarray(k, dtype=complex) for k in kraus]
    if not ks:
        raise InvalidInputError("empty Kraus set")
    shape = ks[0].shape
    if len(shape) != 2 or shape[0] != shape[1] or any(k.shape != shape for k in ks):
        raise InvalidInputError("Kraus operators must be square and share one shape")
    completeness = sum(k.conj().T @ k for k in ks)
    if np.max(np.abs(completeness - np.eye(shape[0]))) > tol:
        raise InvalidChannelError("Kraus operators violate sum K^dag K = 1")
    return SuperOp(sum(np.kron(k.conj(), k) for k in ks))


def process_fidelity(s: SuperOp) -> float:
    """Entanglement (process) fidelity ``Tr(S) / d^2`` of an error channel."""
    return float(np.real(np.trace(s.matrix))) / s.dim**2


@lru_cache(maxsize=None)
def _hermitian_basis(d: int) -> tuple[np.ndarray, ...]:
    if d == 2 or d == 4:
        paulis = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]),
                  np.diag([1.0, -1.0])]
        n = 1 if d == 2 else 2
        mats = []
        for idx in itertools.product(range(4), repeat=n):
            m = np.array([[1.0]])
            for i in idx:
                m = np.kron(m, paulis[i])
            mats.append(m.astype(complex) / np.sqrt(d))
        return tuple(mats)
    # normalized generalized Gell-Mann matrices, identity first
    mats = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1 / np.sqrt(2)
            mats.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[j, k], m[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return tuple(mats)


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal Hermitian operator basis, identity element first.

    Normalized Pauli products for ``d`` in {2, 4}; generalized Gell-Mann
    matrices otherwise.
    """
    return list(_hermitian_basis(d))


@dataclass(frozen=True)
class SubspaceSplit:
    """Symmetric / antisymmetric decomposition of the two-qubit space.

    ``basis`` has the states (|00>, (|01>+|10>)/sqrt2, |11>, (|01>-|10>)/sqrt2)
    as columns, so qutrit index ``k`` is the number of excited qubits.
    """

    basis: np.ndarray = field(repr=False)
    d1: int = 3
    d2: int = 1

    @property
    def d(self) -> int:
        return self.d1 + self.d2

    @cached_property
    def p1(self) -> np.ndarray:
        v = self.basis[:, : self.d1]
        return v @ v.conj().T

    @cached_property
    def p2(self) -> np.ndarray:
        v = self.basis[:, self.d1:]
        return v @ v.conj().T

    @cached_property
    def block_basis(self) -> np.ndarray:
        """Vectorized traceless Hermitian basis of the RB block, as columns."""
        mats = []
        for b in hermitian_basis(self.d1)[1:]:
            full = np.zeros((self.d, self.d), dtype=complex)
            full[: self.d1, : self.d1] = b
            mats.append(vec(self.from_split_basis(full)))
        return np.column_stack(mats)

    def to_split_basis(self, op: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ op @ self.basis

    def from_split_basis(self, op: np.ndarray) -> np.ndarray:
        return self.basis @ op @ self.basis.conj().T

    def symmetric_block(self, op: np.ndarray) -> np.ndarray:
        return self.to_split_basis(op)[: self.d1, : self.d1]

    def off_block_norm(self, op: np.ndarray) -> float:
        m = self.to_split_basis(op)
        return float(max(np.max(np.abs(m[: self.d1, self.d1:])),
                         np.max(np.abs(m[self.d1:, : self.d1]))))


def _two_qubit_split() -> SubspaceSplit:
    s = 1 / np.sqrt(2)
    v = np.zeros((4, 4), dtype=complex)
    v[0, 0] = 1.0
    v[1, 1] = v[2, 1] = s
    v[3, 2] = 1.0
    v[1, 3], v[2, 3] = s, -s
    return SubspaceSplit(v)


SPLIT = _two_qubit_split()


def leakage_seepage(s: SuperOp, split: SubspaceSplit = SPLIT) -> tuple[float, float]:
    """Leakage and seepage rates ``(L, S)`` of a channel on the full space.

    ``L = Tr(Lambda[P1] P2) / sqrt(d1 d2)`` and
    ``S = Tr(P1 Lambda[P2]) / sqrt(d1 d2)``.
    """
    if s.dim != split.d:
        raise InvalidInputError(f"channel dimension {s.dim} does not match split ({split.d})")
    norm = np.sqrt(split.d1 * split.d2)
    leak = np.real(np.trace(s.apply(split.p1) @ split.p2)) / norm
    seep = np.real(np.trace(split.p1 @ s.apply(split.p2))) / norm
    return float(leak), float(seep)


def spin1_operators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-1 ``Jx, Jy, Jz`` in the basis (|00>, symmetric, |11>)."""
    s = 1 / np.sqrt(2)
    jx = np.array([[0, s, 0], [s, 0, s], [0, s, 0]], dtype=complex)
    jy = np.array([[0, -1j * s, 0], [1j * s, 0, -1j * s], [0, 1j * s, 0]], dtype=complex)
    jz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return jx, jy, jz


def embed_symmetric(u3: np.ndarray, phase: complex = 1.0,
                    split: SubspaceSplit = SPLIT) -> np.ndarray:
    """Two-qubit unitary acting as ``u3`` on the triplet and ``phase`` on the singlet."""
    u3 = _check_unitary(u3)
    if u3.shape != (split.d1, split.d1):
        raise InvalidInputError(f"expected a {split.d1}x{split.d1} unitary")
    if abs(abs(phase) - 1) > UNITARY_TOL:
        raise InvalidInputError("singlet phase must have unit modulus")
    block = np.zeros((split.d, split.d), dtype=complex)
    block[: split.d1, : split.d1] = u3
    block[split.d1:, split.d1:] = phase
    return split.from_split_basis(block)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(d: int, rng: np.random.Generator, n_kraus: int | None = None) -> SuperOp:
    """Random CPTP map from a Haar-random Stinespring isometry."""
    n_kraus = n_kraus or d * d
    u = random_unitary(d * n_kraus, rng)
    iso = u[:, :d]
    kraus = [iso[k * d:(k + 1) * d, :] for k in range(n_kraus)]
    return kraus_to_super(kraus)


def subspace_decay(s: SuperOp, split: SubspaceSplit = SPLIT) -> float:
    """Depolarizing parameter ``r`` of the channel twirled over the RB-subspace 2-design.

    Average of ``<<B|S|B>>`` over an orthonormal traceless Hermitian basis of the
    RB block.
    """
    b = split.block_basis
    return float(np.real(np.trace(b.conj().T @ s.matrix @ b))) / (split.d1**2 - 1)


def leakage_decay(s: SuperOp, split: SubspaceSplit = SPLIT) -> float:
    """Leakage eigenvalue ``t = 1 - sqrt(d2/d1) L - sqrt(d1/d2) S``."""
    leak, seep = leakage_seepage(s, split)
    return 1 - np.sqrt(split.d2 / split.d1) * leak - np.sqrt(split.d1 / split.d2) * seep
