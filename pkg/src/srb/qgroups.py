"""Qutrit Weyl operators and the 216-element projective qutrit Clifford group."""
from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

D = 3
OMEGA = np.exp(2j * np.pi / D)
GROUP_ORDER = 216
GROUP_FORMAT = "srb-qutrit-clifford-group"
GROUP_VERSION = 1

WeylLabel = tuple[int, int]
WEYL_LABELS: tuple[WeylLabel, ...] = tuple((a, b) for a in range(D) for b in range(D))


class GroupConsistencyError(RuntimeError):
    pass


class CacheError(RuntimeError):
    """A cache file is missing, corrupt, or was built against other tables."""


def shift() -> np.ndarray:
    """``X|j> = |j+1 mod 3>``."""
    return np.roll(np.eye(D, dtype=complex), 1, axis=0)


def clock() -> np.ndarray:
    """``Z|j> = omega^j |j>``."""
    return np.diag(OMEGA ** np.arange(D))


def weyl_unitary(label: WeylLabel) -> np.ndarray:
    a, b = label
    return np.linalg.matrix_power(shift(), a % D) @ np.linalg.matrix_power(clock(), b % D)


def fourier() -> np.ndarray:
    j = np.arange(D)
    return OMEGA ** np.outer(j, j) / np.sqrt(D)


def qutrit_phase_gate() -> np.ndarray:
    return np.diag([1.0, 1.0, OMEGA])


def canonical_phase(u: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Fix the global phase so the first nonzero entry (row-major) is real positive."""
    flat = u.ravel()
    k = int(np.argmax(np.abs(flat) > tol))
    return u * np.exp(-1j * np.angle(flat[k]))


def _key(u: np.ndarray) -> tuple:
    c = canonical_phase(u)
    return tuple(np.round(np.concatenate([c.real.ravel(), c.imag.ravel()]), 7) + 0.0)


def phase_overlap(u: np.ndarray, v: np.ndarray) -> float:
    """``|Tr(U^dag V)| / d``; equals 1 iff U and V agree up to global phase."""
    return float(abs(np.trace(u.conj().T @ v)) / u.shape[0])


@dataclass(frozen=True, eq=False)
class CliffordGroup:
    """Canonical unitaries of the projective qutrit Clifford group plus lookup tables.

    ``mult[i, j]`` is the id of ``U_i U_j`` and ``inv[i]`` the id of
    ``U_i^dag``.  ``weyl_image[i, a, b]`` is the label ``(a', b')`` with
    ``U_i W(a,b) U_i^dag = weyl_phase[i, a, b] * W(a', b')``.
    """

    unitaries: np.ndarray = field(repr=False)
    mult: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)
    weyl_image: np.ndarray = field(repr=False)
    weyl_phase: np.ndarray = field(repr=False)
    weyl_ids: np.ndarray = field(repr=False)
    identity: int = 0

    def __len__(self) -> int:
        return len(self.unitaries)

    def weyl_id(self, label: WeylLabel) -> int:
        return int(self.weyl_ids[label[0] % D, label[1] % D])

    def index_of(self, u: np.ndarray) -> int:
        try:
            return self._index[_key(u)]
        except KeyError:
            raise KeyError("unitary is not a qutrit Clifford") from None

    @property
    def _index(self) -> dict:
        idx = self.__dict__.get("_index_cache")
        if idx is None:
            idx = {_key(u): i for i, u in enumerate(self.unitaries)}
            object.__setattr__(self, "_index_cache", idx)
        return idx

    def compose(self, sequence: Sequence[int]) -> int:
        """Id of ``C_l ... C_2 C_1`` for ``sequence = [C_1, ..., C_l]``."""
        acc = self.identity
        for g in sequence:
            acc = int(self.mult[g, acc])
        return acc

    def compile_inversion(self, sequence: Sequence[int],
                          weyl: WeylLabel = (0, 0)) -> tuple[int, int]:
        """Single Clifford equal to ``Q_k (C_l ... C_1)^-1`` and its ideal outcome.

        The ideal outcome is the qutrit index ``a`` reached by ``X^a Z^b |0>``.
        """
        total = self.compose(sequence)
        gate = int(self.mult[self.weyl_id(weyl), self.inv[total]])
        return gate, int(weyl[0] % D)

    @property
    def checksum(self) -> str:
        cached = self.__dict__.get("_checksum")
        if cached is None:
            cached = _checksum(_payload(self))
            object.__setattr__(self, "_checksum", cached)
        return cached


def _weyl_decompose(m: np.ndarray) -> tuple[WeylLabel, complex]:
    for lab in WEYL_LABELS:
        w = weyl_unitary(lab)
        ov = np.trace(w.conj().T @ m) / D
        if abs(abs(ov) - 1) < 1e-9:
            return lab, complex(ov)
    raise GroupConsistencyError("conjugated Weyl operator is not a Weyl operator")


def _close(generators: Sequence[np.ndarray], limit: int) -> list[np.ndarray]:
    first = canonical_phase(np.eye(D, dtype=complex))
    elems = [first]
    seen = {_key(first): 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for g in generators:
            u = canonical_phase(g @ elems[i])
            k = _key(u)
            if k not in seen:
                seen[k] = len(elems)
                elems.append(u)
                queue.append(seen[k])
                if len(elems) > limit:
                    raise GroupConsistencyError(f"closure exceeded {limit} elements")
    return elems


def _tables(unitaries: np.ndarray):
    n = len(unitaries)
    index = {_key(u): i for i, u in enumerate(unitaries)}
    mult = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        prods = np.einsum("ab,nbc->nac", unitaries[i], unitaries)
        for j in range(n):
            k = index.get(_key(prods[j]))
            if k is None:
                raise GroupConsistencyError("product left the group")
            mult[i, j] = k
    inv = np.array([int(np.flatnonzero(mult[i] == 0)[0]) for i in range(n)])
    image = np.empty((n, D, D, 2), dtype=np.int64)
    phase = np.empty((n, D, D), dtype=complex)
    for i, u in enumerate(unitaries):
        for a, b in WEYL_LABELS:
            lab, ph = _weyl_decompose(u @ weyl_unitary((a, b)) @ u.conj().T)
            image[i, a, b] = lab
            phase[i, a, b] = ph
    weyl_ids = np.array([[index[_key(weyl_unitary((a, b)))] for b in range(D)]
                         for a in range(D)])
    return mult, inv, image, phase, weyl_ids


def build_clifford_group() -> CliffordGroup:
    """Breadth-first closure of {Fourier, diag(1, 1, omega)} up to global phase."""
    elems = _close([fourier(), qutrit_phase_gate()], limit=GROUP_ORDER)
    if len(elems) != GROUP_ORDER:
        raise GroupConsistencyError(f"closure produced {len(elems)} elements, "
                                    f"expected {GROUP_ORDER}")
    unitaries = np.array(elems)
    return CliffordGroup(unitaries, *_tables(unitaries))


@lru_cache(maxsize=1)
def default_group() -> CliffordGroup:
    return build_clifford_group()


def frame_potential(unitaries: Sequence[np.ndarray], t: int) -> float:
    """``(1/N^2) sum_ij |Tr(U_i^dag U_j)|^(2t)``."""
    if t not in (1, 2):
        raise ValueError("t must be 1 or 2")
    us = np.asarray(unitaries, dtype=complex)
    if us.size == 0:
        raise ValueError("empty unitary list")
    flat = us.reshape(len(us), -1)
    overlaps = flat.conj() @ flat.T
    return float(np.mean(np.abs(overlaps) ** (2 * t)))


def _payload(group: CliffordGroup) -> dict:
    return {
        "format": GROUP_FORMAT,
        "version": GROUP_VERSION,
        "unitaries": [[[float(z.real), float(z.imag)] for z in u.ravel()]
                      for u in group.unitaries],
        "mult": group.mult.tolist(),
        "inv": group.inv.tolist(),
    }


def _checksum(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def save_group(group: CliffordGroup, path: str | Path) -> None:
    payload = _payload(group)
    payload["checksum"] = _checksum(payload)
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload))
    tmp.replace(path)


def load_group(path: str | Path) -> CliffordGroup:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise CacheError(f"cannot read group cache {path}: {exc}") from exc
    if payload.get("format") != GROUP_FORMAT or payload.get("version") != GROUP_VERSION:
        raise CacheError(f"{path} is not a version-{GROUP_VERSION} group cache")
    stored = payload.pop("checksum", None)
    if stored != _checksum(payload):
        raise CacheError(f"checksum mismatch in {path}")
    unitaries = np.array([[complex(re, im) for re, im in u] for u in payload["unitaries"]])
    unitaries = unitaries.reshape(-1, D, D)
    mult, inv, image, phase, weyl_ids = _tables(unitaries)
    if not (np.array_equal(mult, payload["mult"]) and np.array_equal(inv, payload["inv"])):
        raise CacheError(f"stored tables in {path} disagree with the stored unitaries")
    return CliffordGroup(unitaries, mult, inv, image, phase, weyl_ids)
