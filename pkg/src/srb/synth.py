"""Trapped-ion gate set and numerical synthesis of qutrit Cliffords.

Every qutrit Clifford is compiled to the template

    K(n1, a1) U_ZZ K(n2, a2) U_ZZ K(n3, a3) U_ZZ K(n4, a4)

on the symmetric block, where ``K(n, a) = exp(-i a n.J)`` is a collective
rotation and ``U_ZZ = exp(-i pi/4 ZZ)`` the fixed-angle phase gate.  Each
``K`` is emitted as one or two collective rotations about axes in the x-y
plane.
"""
from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy.optimize import minimize

from .qgroups import CacheError, CliffordGroup, phase_overlap
from .qops import SPLIT, spin1_operators

log = logging.getLogger(__name__)

RECIPE_FORMAT = "srb-recipes"
RECIPE_VERSION = 1
SYNTH_TOL = 1e-8
TARGET_INFIDELITY = 1e-10
MAX_RESTARTS = 50
MAX_EVALS = 10_000
DEFAULT_SEED = 20200531

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_JX, _JY, _JZ = spin1_operators()


class SynthesisError(RuntimeError):
    def __init__(self, message: str, best_infidelity: float, clifford: int | None = None):
        super().__init__(message)
        self.best_infidelity = best_infidelity
        self.clifford = clifford


def _planar_qubit(theta: float, phi: float) -> np.ndarray:
    return (np.cos(theta / 2) * np.eye(2)
            - 1j * np.sin(theta / 2) * (np.cos(phi) * _X + np.sin(phi) * _Y))


def collective_rotation(theta: float, phi: float) -> np.ndarray:
    """``exp[-i theta/2 (X cos phi + Y sin phi)]`` on both qubits."""
    u = _planar_qubit(theta, phi)
    return np.kron(u, u)


def phase_gate() -> np.ndarray:
    """``exp(-i pi/4 ZZ)``."""
    return np.diag(np.exp(-1j * np.pi / 4 * np.array([1, -1, -1, 1])))


def xxyy_gate() -> np.ndarray:
    """``exp(i pi/4 XX) exp(i pi/4 YY)``, the phase-reversing replacement for U_ZZ."""
    xx, yy = np.kron(_X, _X), np.kron(_Y, _Y)
    c = np.cos(np.pi / 4)
    return (c * np.eye(4) + 1j * c * xx) @ (c * np.eye(4) + 1j * c * yy)


@dataclass(frozen=True)
class CollectiveRotation:
    theta: float
    phi: float

    def unitary(self) -> np.ndarray:
        return collective_rotation(self.theta, self.phi)


@dataclass(frozen=True)
class PhaseGate:
    def unitary(self) -> np.ndarray:
        return phase_gate()


@dataclass(frozen=True)
class XXYYGate:
    def unitary(self) -> np.ndarray:
        return xxyy_gate()


PhysicalGate = Union[CollectiveRotation, PhaseGate, XXYYGate]


def _normalize_planar(theta: float, phi: float) -> tuple[float, float]:
    return float(theta % (4 * np.pi)), float(phi % (2 * np.pi))


def _planar_params(p: np.ndarray) -> tuple[float, float]:
    # p = cos(t/2) 1 - i sin(t/2) (cos f X + sin f Y); p[1,0] = -i sin(t/2) e^{i f}
    half = np.arctan2(abs(p[1, 0]), np.real(p[0, 0]))
    phi = np.angle(1j * p[1, 0]) if abs(p[1, 0]) > 1e-15 else 0.0
    return _normalize_planar(2 * half, phi)


def decompose_rotation(axis: Sequence[float], angle: float) -> list[tuple[float, float]]:
    """Split ``exp(-i angle n.J)`` into at most two x-y plane rotations.

    Returns ``[(theta_1, phi_1), ...]`` in time order: the product
    ``R(theta_2, phi_2) R(theta_1, phi_1)`` reproduces the rotation exactly
    (in SU(2), hence on every spin).
    """
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise ValueError("rotation axis has zero length")
    n = n / norm
    u = (np.cos(angle / 2) * np.eye(2)
         - 1j * np.sin(angle / 2) * (n[0] * _X + n[1] * _Y + n[2] * _Z))
    a, b = u[0, 0], u[1, 0]
    if abs(np.imag(a)) < 1e-14:
        return [_planar_params(u)]
    # choose the last pulse P2 so that P2^dag U has a real diagonal, i.e. is planar
    if abs(b) > 1e-12:
        phi2 = np.angle(b)
        theta2 = 2 * np.arctan2(-np.imag(a), abs(b))
    else:
        phi2, theta2 = 0.0, np.pi
    p2 = _planar_qubit(theta2, phi2)
    p1 = p2.conj().T @ u
    return [_planar_params(p1), _normalize_planar(theta2, phi2)]


def _axis(polar: float, azimuth: float) -> np.ndarray:
    return np.array([np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth),
                     np.cos(polar)])


def _spin1_rotation(polar: float, azimuth: float, angle: float) -> np.ndarray:
    n = _axis(polar, azimuth)
    nj = n[0] * _JX + n[1] * _JY + n[2] * _JZ
    # (n.J)^3 = n.J for spin 1
    return np.eye(3) - 1j * np.sin(angle) * nj + (np.cos(angle) - 1) * (nj @ nj)


_UZZ3 = SPLIT.symmetric_block(phase_gate())


def template_unitary(params: np.ndarray) -> np.ndarray:
    """Symmetric-block unitary of the three-phase-gate template for 12 parameters."""
    u = _spin1_rotation(*params[0:3])
    for j in range(1, 4):
        u = u @ _UZZ3 @ _spin1_rotation(*params[3 * j:3 * j + 3])
    return u


def _infidelity(params: np.ndarray, target_dag: np.ndarray) -> float:
    return max(0.0, 1.0 - abs(np.trace(target_dag @ template_unitary(params))) / 3)


@dataclass(frozen=True)
class CliffordRecipe:
    """Physical gate list for one Clifford, in time order.

    The full two-qubit product equals
    ``embed_symmetric(global_phase * target, leakage_phase)``.
    """

    clifford: int
    gates: tuple
    residual_infidelity: float
    leakage_phase: complex
    global_phase: complex

    def unitary(self) -> np.ndarray:
        u = np.eye(4, dtype=complex)
        for g in self.gates:
            u = g.unitary() @ u
        return u

    def count(self, kind: type) -> int:
        return sum(isinstance(g, kind) for g in self.gates)


def _emit(clifford: int, params: np.ndarray, target: np.ndarray) -> CliffordRecipe:
    gates: list = []
    for j in (3, 2, 1, 0):
        polar, azimuth, angle = params[3 * j:3 * j + 3]
        for theta, phi in decompose_rotation(_axis(polar, azimuth), angle):
            gates.append(CollectiveRotation(theta, phi))
        if j:
            gates.append(PhaseGate())
    return _finish(clifford, tuple(gates), target)


def _finish(clifford: int, gates: tuple, target: np.ndarray) -> CliffordRecipe:
    recipe = CliffordRecipe(clifford, gates, 0.0, 1.0, 1.0)
    full = recipe.unitary()
    block = SPLIT.symmetric_block(full)
    ov = np.trace(target.conj().T @ block) / 3
    singlet = SPLIT.to_split_basis(full)[3, 3]
    return replace(recipe, residual_infidelity=float(max(0.0, 1 - abs(ov))),
                   leakage_phase=complex(singlet), global_phase=complex(ov / abs(ov)))


def synthesize_clifford(target: np.ndarray, rng: np.random.Generator | None = None,
                        clifford: int = -1, max_restarts: int = MAX_RESTARTS,
                        max_evals: int = MAX_EVALS) -> CliffordRecipe:
    """Multi-start Nelder-Mead search for the template parameters of ``target``."""
    rng = rng if rng is not None else np.random.default_rng(DEFAULT_SEED)
    target = np.asarray(target, dtype=complex)
    target_dag = target.conj().T
    best_val, best_x = np.inf, None
    for _ in range(max_restarts):
        x0 = rng.uniform(0, 2 * np.pi, 12)
        res = minimize(_infidelity, x0, args=(target_dag,), method="Nelder-Mead",
                       options={"maxfev": max_evals, "xatol": 1e-12, "fatol": 1e-15,
                                "adaptive": True})
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
        if best_val < TARGET_INFIDELITY:
            break
    if best_x is None or best_val >= SYNTH_TOL:
        raise SynthesisError(f"synthesis of Clifford {clifford} failed "
                             f"(best infidelity {best_val:.3g})", best_val, clifford)
    recipe = _emit(clifford, best_x, target)
    if recipe.residual_infidelity >= SYNTH_TOL:
        raise SynthesisError(f"emitted gates for Clifford {clifford} miss the target",
                             recipe.residual_infidelity, clifford)
    return recipe


def phase_reversed_recipe(recipe: CliffordRecipe, target: np.ndarray | None = None) -> CliffordRecipe:
    """Replace the last phase gate with the XX-YY gate."""
    idx = [i for i, g in enumerate(recipe.gates) if isinstance(g, PhaseGate)]
    if not idx:
        raise ValueError("recipe has no phase gate to replace")
    gates = list(recipe.gates)
    gates[idx[-1]] = XXYYGate()
    if target is None:
        # the symmetric block only changes by a global phase
        target = SPLIT.symmetric_block(recipe.unitary()) / recipe.global_phase
    return _finish(recipe.clifford, tuple(gates), target)


def _synth_job(args):
    cid, target, entropy = args
    rng = np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(cid,)))
    return synthesize_clifford(target, rng, clifford=cid)


def build_recipe_table(group: CliffordGroup, master_seed: int = DEFAULT_SEED,
                       workers: int = 1, cache_path: str | Path | None = None) -> list[CliffordRecipe]:
    """Synthesize every Clifford in ``group``; optionally write the cache file."""
    jobs = [(i, u, master_seed) for i, u in enumerate(group.unitaries)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            recipes = list(pool.map(_synth_job, jobs))
    else:
        recipes = [_synth_job(j) for j in jobs]
    verify_recipes(recipes, group)
    if cache_path is not None:
        save_recipes(recipes, group, cache_path)
    return recipes


def verify_recipes(recipes: Sequence[CliffordRecipe], group: CliffordGroup,
                   tol: float = SYNTH_TOL) -> None:
    if len(recipes) != len(group):
        raise SynthesisError(f"expected {len(group)} recipes, got {len(recipes)}", np.inf)
    for i, r in enumerate(recipes):
        if r.clifford != i:
            raise SynthesisError(f"recipe {i} is labelled {r.clifford}", np.inf, i)
        infid = 1 - phase_overlap(group.unitaries[i], SPLIT.symmetric_block(r.unitary()))
        if infid >= tol:
            raise SynthesisError(f"recipe {i} misses its target ({infid:.3g})", infid, i)


def _gate_record(g: PhysicalGate) -> list:
    if isinstance(g, CollectiveRotation):
        return ["R", g.theta, g.phi]
    return ["ZZ"] if isinstance(g, PhaseGate) else ["XXYY"]


def _gate_from_record(rec: list) -> PhysicalGate:
    kind = rec[0]
    if kind == "R":
        return CollectiveRotation(float(rec[1]), float(rec[2]))
    if kind == "ZZ":
        return PhaseGate()
    if kind == "XXYY":
        return XXYYGate()
    raise CacheError(f"unknown gate kind {kind!r}")


def _recipe_record(r: CliffordRecipe) -> dict:
    return {
        "clifford": r.clifford,
        "gates": [_gate_record(g) for g in r.gates],
        "residual_infidelity": r.residual_infidelity,
        "leakage_phase": [r.leakage_phase.real, r.leakage_phase.imag],
        "global_phase": [r.global_phase.real, r.global_phase.imag],
    }


def save_recipes(recipes: Sequence[CliffordRecipe], group: CliffordGroup, path: str | Path) -> None:
    """Write one JSON record per line; floats use shortest round-trip repr."""
    lines = [json.dumps(_recipe_record(r), separators=(",", ":")) for r in recipes]
    header = {
        "format": RECIPE_FORMAT,
        "version": RECIPE_VERSION,
        "count": len(lines),
        "group_checksum": group.checksum,
        "records_checksum": hashlib.sha256("\n".join(lines).encode()).hexdigest(),
    }
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("\n".join([json.dumps(header)] + lines) + "\n")
    tmp.replace(path)


def load_recipes(path: str | Path, group: CliffordGroup) -> list[CliffordRecipe]:
    try:
        text = Path(path).read_text().splitlines()
        header = json.loads(text[0])
    except (OSError, IndexError, ValueError) as exc:
        raise CacheError(f"cannot read recipe cache {path}: {exc}") from exc
    if header.get("format") != RECIPE_FORMAT or header.get("version") != RECIPE_VERSION:
        raise CacheError(f"{path} is not a version-{RECIPE_VERSION} recipe cache")
    if header.get("group_checksum") != group.checksum:
        raise CacheError(f"{path} was built against a different group table")
    lines = text[1:]
    if hashlib.sha256("\n".join(lines).encode()).hexdigest() != header.get("records_checksum"):
        raise CacheError(f"checksum mismatch in {path}")
    recipes = []
    for line in lines:
        rec = json.loads(line)
        recipes.append(CliffordRecipe(
            clifford=int(rec["clifford"]),
            gates=tuple(_gate_from_record(g) for g in rec["gates"]),
            residual_infidelity=float(rec["residual_infidelity"]),
            leakage_phase=complex(*rec["leakage_phase"]),
            global_phase=complex(*rec["global_phase"]),
        ))
    verify_recipes(recipes, group)
    return recipes
