"""Error channels for the simulated gate set and their leakage classification."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .qops import (SPLIT, SuperOp, kraus_to_super, leakage_decay, leakage_seepage,
                   subspace_decay, unitary_to_super)

CLASSIFY_TOL = 1e-9

_Z = np.diag([1.0, -1.0]).astype(complex)
_ZZ = np.kron(_Z, _Z)


class ChannelKind(str, Enum):
    DEPOLARIZING = "depolarizing"
    SUBSPACE_DEPOLARIZING = "subspace_depolarizing"
    INTENSITY = "intensity"
    OPTICAL_PUMPING = "optical_pumping"
    INHOMOGENEOUS_FIELD = "inhomogeneous_field"
    CUSTOM = "custom"


class ChannelType(str, Enum):
    TYPE1 = "type1"  # subspace preserving
    TYPE2 = "type2"  # mixes RB and leakage subspaces


@dataclass(frozen=True, eq=False)
class ErrorChannel:
    kind: ChannelKind
    epsilon: float
    superop: SuperOp = field(repr=False)

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")


@dataclass(frozen=True)
class Classification:
    channel_type: ChannelType
    L: float
    S: float


def identity_channel() -> ErrorChannel:
    return ErrorChannel(ChannelKind.DEPOLARIZING, 0.0, SuperOp.identity(4))


def _per_qubit(kraus_1q: list[np.ndarray]) -> SuperOp:
    return kraus_to_super([np.kron(a, b) for a in kraus_1q for b in kraus_1q])


def make_channel(kind: ChannelKind | str, epsilon: float) -> ErrorChannel:
    """One-parameter error channel on the two-qubit space.

    ``intensity``: the unitary over-rotation ``exp(-i eps ZZ)``.
    ``optical_pumping``: amplitude damping of each qubit toward |0> with probability eps.
    ``inhomogeneous_field``: independent phase flips (Z) of each qubit with probability eps.
    ``depolarizing``: ``(1 - eps) rho + eps 1/4``.
    ``subspace_depolarizing``: depolarizes the triplet block only, keeping the singlet.
    """
    kind = ChannelKind(kind)
    eps = float(epsilon)
    if eps < 0:
        raise ValueError("epsilon must be non-negative")
    if kind is not ChannelKind.INTENSITY and eps > 1:
        raise ValueError(f"epsilon for {kind.value} must lie in [0, 1]")
    if kind is ChannelKind.INTENSITY:
        s = unitary_to_super(np.diag(np.exp(-1j * eps * np.diag(_ZZ))))
    elif kind is ChannelKind.OPTICAL_PUMPING:
        s = _per_qubit([np.array([[1, 0], [0, np.sqrt(1 - eps)]], dtype=complex),
                        np.array([[0, np.sqrt(eps)], [0, 0]], dtype=complex)])
    elif kind is ChannelKind.INHOMOGENEOUS_FIELD:
        s = _per_qubit([np.sqrt(1 - eps) * np.eye(2, dtype=complex), np.sqrt(eps) * _Z])
    elif kind is ChannelKind.DEPOLARIZING:
        one = np.eye(4).ravel(order="F")
        s = SuperOp((1 - eps) * np.eye(16) + eps * np.outer(one, one) / 4)
    elif kind is ChannelKind.SUBSPACE_DEPOLARIZING:
        v = SPLIT.basis
        kraus = [np.sqrt(1 - eps) * np.eye(4, dtype=complex),
                 np.sqrt(eps) * np.outer(v[:, 3], v[:, 3].conj())]
        kraus += [np.sqrt(eps / 3) * np.outer(v[:, i], v[:, j].conj())
                  for i in range(3) for j in range(3)]
        s = kraus_to_super(kraus)
    else:
        raise ValueError("use custom_channel() for custom superoperators")
    return ErrorChannel(kind, eps, s)


def custom_channel(superop: SuperOp, epsilon: float = 0.0) -> ErrorChannel:
    if superop.dim != 4 or not superop.is_cptp():
        raise ValueError("custom channel must be a CPTP map on two qubits")
    return ErrorChannel(ChannelKind.CUSTOM, epsilon, superop)


def compose(*channels: ErrorChannel) -> ErrorChannel:
    """Channel applying ``channels[0]`` first."""
    s = SuperOp.identity(4)
    for ch in channels:
        s = ch.superop @ s
    return ErrorChannel(ChannelKind.CUSTOM, max((c.epsilon for c in channels), default=0.0), s)


def classify_channel(ch: ErrorChannel, tol: float = CLASSIFY_TOL) -> Classification:
    leak, seep = leakage_seepage(ch.superop)
    kind = ChannelType.TYPE1 if max(abs(leak), abs(seep)) < tol else ChannelType.TYPE2
    return Classification(kind, leak, seep)


def analytic_decay(kind: ChannelKind | str, epsilon: float) -> tuple[float, float, float]:
    """Lowest-order ``(r_zz, t_zz, |F_zz - f'_zz|)`` for a per-phase-gate error."""
    kind = ChannelKind(kind)
    e = float(epsilon)
    if kind is ChannelKind.INTENSITY:
        return 1 - e**2, 1.0, e**2 / 5
    if kind is ChannelKind.OPTICAL_PUMPING:
        return 1 - 13 * e / 12, 1 - 4 * e / 3, 2 * e / 5
    if kind is ChannelKind.INHOMOGENEOUS_FIELD:
        return 1 - 13 * e / 6, 1 - 8 * e / 3, e**2 / 40
    raise ValueError(f"no analytic decay model for {kind.value}")


@dataclass(frozen=True)
class NoiseModel:
    """Channels applied after each phase gate, each collective rotation, each
    compiled Clifford, and around state preparation and measurement."""

    per_phase_gate: ErrorChannel = field(default_factory=identity_channel)
    per_rotation: ErrorChannel = field(default_factory=identity_channel)
    per_clifford: ErrorChannel = field(default_factory=identity_channel)
    prep: ErrorChannel = field(default_factory=identity_channel)
    measure: ErrorChannel = field(default_factory=identity_channel)


def _exchange(q: float) -> ErrorChannel:
    """Swap the symmetric one-excitation state with the singlet with probability ``q``."""
    v = SPLIT.basis
    sym, sing = np.outer(v[:, 1], v[:, 1].conj()), np.outer(v[:, 3], v[:, 3].conj())
    keep = np.eye(4) - (1 - np.sqrt(1 - q)) * (sym + sing)
    swap = np.sqrt(q) * (np.outer(v[:, 3], v[:, 1].conj()) + np.outer(v[:, 1], v[:, 3].conj()))
    return ErrorChannel(ChannelKind.CUSTOM, q, kraus_to_super([keep, swap]))


def tuned_channel(r: float, t: float) -> ErrorChannel:
    """Per-Clifford channel whose twirled decays are ``r`` (RB block) and ``t`` (leakage).

    A triplet-block depolarizer followed by an incoherent exchange of the
    symmetric one-excitation state with the singlet, which supplies all of the
    leakage and seepage.
    """
    if not (0 < t <= 1 and 0 < r <= 1):
        raise ValueError("r and t must lie in (0, 1]")

    def build(p, q):
        return compose(make_channel(ChannelKind.SUBSPACE_DEPOLARIZING, p), _exchange(q))

    # the block depolarizer is unital on P1 and leaves the singlet alone, so t fixes q
    try:
        q = brentq(lambda q: leakage_decay(_exchange(q).superop) - t, 0.0, 0.75, xtol=1e-15)
        p = brentq(lambda p: subspace_decay(build(p, q).superop) - r, 0.0, 1.0, xtol=1e-15)
    except ValueError as exc:
        raise ValueError(f"no channel of this family reproduces r={r}, t={t}") from exc
    ch = build(p, q)
    return ErrorChannel(ChannelKind.CUSTOM, float(max(p, q)), ch.superop)
