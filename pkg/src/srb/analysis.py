"""Decay fits, bootstrap errors, fidelity formulas and twirl diagnostics."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .engine import (Dataset, Mode, Protocol, correct_counts, leakage_survival,
                     standard_survival)
from .qops import SPLIT, SubspaceSplit, SuperOp, leakage_decay, subspace_decay, unitary_to_super, vec

MIN_WEIGHTED_K = 5
SEM_FLOOR = 1e-12  # below this a standard error is rounding noise
BOUND_TOL = 1e-9
DEFAULT_RESAMPLES = 200
MAX_FAILURE_RATE = 0.2


class FitError(ValueError):
    """Raised for underdetermined or degenerate fits."""


class BootstrapUnstableError(RuntimeError):
    pass


class FitModel(str, Enum):
    STANDARD_FIXED = "standard_fixed"  # A r^l + 1/d1
    LEAKAGE = "leakage"                # B + C t^(l+1)
    GENERIC = "generic"                # A r^l + B


_PARAMS = {
    FitModel.STANDARD_FIXED: ("A", "r"),
    FitModel.LEAKAGE: ("B", "C", "t"),
    FitModel.GENERIC: ("A", "r", "B"),
}
_BOUNDS = {"A": (-1.0, 1.0), "C": (-1.0, 1.0), "B": (0.0, 1.0), "r": (0.0, 1.0), "t": (0.0, 1.0)}


@dataclass(frozen=True)
class FitResult:
    model: FitModel
    params: dict[str, float]
    residual: float
    ci: dict[str, float] = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    @property
    def rate(self) -> float:
        return self.params["t" if self.model is FitModel.LEAKAGE else "r"]

    def predict(self, lengths) -> np.ndarray:
        return _model_fn(self.model, self.params)(np.asarray(lengths, dtype=float))


def _model_fn(model: FitModel, p: dict, d1: int = SPLIT.d1) -> Callable[[np.ndarray], np.ndarray]:
    if model is FitModel.STANDARD_FIXED:
        return lambda l: p["A"] * p["r"] ** l + 1 / d1
    if model is FitModel.GENERIC:
        return lambda l: p["A"] * p["r"] ** l + p["B"]
    return lambda l: p["B"] + p["C"] * p["t"] ** (l + 1)


@dataclass(frozen=True)
class DecayPoints:
    """Per-length mean survival, its standard error, and the number of sequences."""

    lengths: np.ndarray
    means: np.ndarray
    sems: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_values(cls, values: dict[int, np.ndarray],
                    strata: dict[int, np.ndarray] | None = None) -> "DecayPoints":
        """Per-length means; with ``strata`` the mean is post-stratified.

        Post-stratification averages within each stratum (here the Weyl class
        that fixes the ideal outcome) and then across strata, which removes the
        between-class spread from the standard error without biasing the
        uniform-Weyl average.
        """
        ls = sorted(values)
        means, sems, counts = [], [], []
        for l in ls:
            v = np.asarray(values[l], dtype=float)
            groups = [v] if strata is None else [v[strata[l] == s] for s in np.unique(strata[l])]
            if strata is not None and any(len(g) < 2 for g in groups):
                groups = [v]  # too thin to stratify
            means.append(np.mean([g.mean() for g in groups]))
            var = sum(np.var(g, ddof=1) / len(g) if len(g) > 1 else 0.0 for g in groups)
            sems.append(np.sqrt(var) / len(groups))
            counts.append(len(v))
        return cls(np.array(ls, dtype=float), np.array(means), np.array(sems), np.array(counts))

    @classmethod
    def from_dataset(cls, ds: Dataset, kind: str) -> "DecayPoints":
        return cls.from_values(ds.survival(kind), _strata(ds, kind))

    def weights(self) -> np.ndarray | None:
        """``1/sem`` per length, or ``None`` for an unweighted fit."""
        if np.min(self.counts) < MIN_WEIGHTED_K or np.min(self.sems) <= SEM_FLOOR:
            return None
        return 1 / self.sems


def _design(model: FitModel, lengths: np.ndarray, rate: float, d1: int):
    """Linear columns and offset of the model at a fixed decay rate."""
    if model is FitModel.STANDARD_FIXED:
        return rate ** lengths[:, None], np.full(len(lengths), 1 / d1)
    if model is FitModel.GENERIC:
        return np.column_stack([rate ** lengths, np.ones(len(lengths))]), np.zeros(len(lengths))
    return np.column_stack([np.ones(len(lengths)), rate ** (lengths + 1)]), np.zeros(len(lengths))


def _linear_part(model, lengths, y, w, rate, d1):
    x, off = _design(model, lengths, rate, d1)
    coef = np.linalg.lstsq(x * w[:, None], (y - off) * w, rcond=None)[0]
    if model is FitModel.LEAKAGE:
        return {"B": coef[0], "C": coef[1], "t": rate}
    if model is FitModel.GENERIC:
        return {"A": coef[0], "B": coef[1], "r": rate}
    return {"A": coef[0], "r": rate}


def _log_linear_rate(model, lengths, y, d1) -> float | None:
    asym = 1 / d1 if model is FitModel.STANDARD_FIXED else np.min(y) - 1e-3 * np.ptp(y)
    z = y - asym
    ok = z > 0
    if model is FitModel.LEAKAGE or ok.sum() < 2 or np.ptp(lengths[ok]) == 0:
        return None
    slope = np.polyfit(lengths[ok], np.log(z[ok]), 1)[0]
    return float(np.clip(np.exp(slope), 0.0, 1.0))


def _seed(model, lengths, y, w, d1) -> dict:
    """Log-linear seed where possible, refined by profiling the rate (linear in the rest)."""
    def cost(rate):
        p = _linear_part(model, lengths, y, w, rate, d1)
        return float(np.sum((w * (_model_fn(model, p, d1)(lengths) - y)) ** 2))

    grid = np.concatenate([np.linspace(0, 0.9, 91), 1 - np.geomspace(0.1, 1e-7, 300), [1.0]])
    costs = np.array([cost(g) for g in grid])
    # flat data fit every rate equally well; prefer no decay
    k = int(np.flatnonzero(costs <= costs.min() * (1 + 1e-9) + 1e-28)[-1])
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    cands = [grid[k]]
    if hi > lo:
        cands.append(minimize_scalar(cost, bounds=(lo, hi), method="bounded",
                                     options={"xatol": 1e-14}).x)
    ll = _log_linear_rate(model, lengths, y, d1)
    if ll is not None:
        cands.append(ll)
    cc = np.array([cost(c) for c in cands])
    best = max(c for c, v in zip(cands, cc) if v <= cc.min() * (1 + 1e-9) + 1e-28)
    return _linear_part(model, lengths, y, w, best, d1)


def _fit(model: FitModel, lengths, values, sems=None, counts=None, d1: int = SPLIT.d1) -> FitResult:
    lengths = np.asarray(lengths, dtype=float)
    y = np.asarray(values, dtype=float)
    if lengths.shape != y.shape or lengths.ndim != 1:
        raise FitError("lengths and values must be 1-D arrays of equal size")
    need = 2 if model is FitModel.STANDARD_FIXED else 3
    if len(np.unique(lengths)) < need:
        raise FitError(f"{model.value} fit needs at least {need} distinct lengths")
    if not np.all(np.isfinite(y)):
        raise FitError("non-finite survival values")
    w = np.ones_like(y)
    if sems is not None:
        sems = np.asarray(sems, dtype=float)
        counts = np.full(len(y), MIN_WEIGHTED_K) if counts is None else np.asarray(counts)
        pts = DecayPoints(lengths, y, sems, counts)
        w = pts.weights() if pts.weights() is not None else w
    names = _PARAMS[model]
    seed = _seed(model, lengths, y, w, d1)
    lo = np.array([_BOUNDS[n][0] for n in names])
    hi = np.array([_BOUNDS[n][1] for n in names])
    x0 = np.clip([seed[n] for n in names], lo, hi)

    def resid(x):
        return w * (_model_fn(model, dict(zip(names, x)), d1)(lengths) - y)

    x = x0
    if np.sum(resid(x0) ** 2) > 1e-28 * len(y):  # an exact seed needs no polishing
        res = least_squares(resid, x0, bounds=(lo, hi), method="trf",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=10_000)
        if res.cost <= 0.5 * np.sum(resid(x0) ** 2):
            x = res.x
    params = {n: float(v) for n, v in zip(names, x)}
    flags = [f"bound:{n}" for n, v, a, b in zip(names, x, lo, hi)
             if n not in ("r", "t") and min(v - a, b - v) < BOUND_TOL]
    flags += [f"bound:{n}" for n in ("r", "t")
              if n in params and params[n] < BOUND_TOL]
    amp = params.get("A", params.get("C"))
    if abs(amp) < 1e-9:
        flags.append("unidentifiable")
    if model is FitModel.LEAKAGE and sems is not None and abs(amp) < np.mean(sems):
        flags.append("shallow_decay")
        warnings.warn("leakage decay amplitude is below the noise floor; t is poorly constrained")
    fitted = _model_fn(model, params, d1)(lengths)
    return FitResult(model, params, float(np.sum((fitted - y) ** 2)), flags=tuple(flags))


def fit_standard(lengths, values, sems=None, counts=None, d1: int = SPLIT.d1) -> FitResult:
    """Fit ``A r^l + 1/d1`` (asymptote fixed)."""
    return _fit(FitModel.STANDARD_FIXED, lengths, values, sems, counts, d1)


def fit_leakage(lengths, values, sems=None, counts=None) -> FitResult:
    """Fit ``B + C t^(l+1)``."""
    return _fit(FitModel.LEAKAGE, lengths, values, sems, counts)


def fit_generic(lengths, values, sems=None, counts=None) -> FitResult:
    """Fit ``A r^l + B``."""
    return _fit(FitModel.GENERIC, lengths, values, sems, counts)


_FITTERS = {FitModel.STANDARD_FIXED: fit_standard, FitModel.LEAKAGE: fit_leakage,
            FitModel.GENERIC: fit_generic}


def _strata(ds: Dataset, kind: str) -> dict[int, np.ndarray] | None:
    if kind != "leakage":
        return None
    return {l: np.array([r.expected_outcome for r in recs]) for l, recs in ds.by_length().items()}


def survival_kind(model: FitModel) -> str:
    return "leakage" if model is FitModel.LEAKAGE else "standard"


def fit_points(points: DecayPoints, model: FitModel | str) -> FitResult:
    model = FitModel(model)
    return _FITTERS[model](points.lengths, points.means, points.sems, points.counts)


def fit_dataset(ds: Dataset, model: FitModel | str) -> FitResult:
    model = FitModel(model)
    return fit_points(DecayPoints.from_dataset(ds, survival_kind(model)), model)


# --------------------------------------------------------------------------- bootstrap


def _resampled_values(ds: Dataset, kind: str, rng: np.random.Generator):
    values, strata = {}, {}
    for length, recs in ds.by_length().items():
        picks = rng.integers(len(recs), size=len(recs))
        vals = []
        for i in picks:
            r = recs[i]
            f = np.clip(r.corrected, 0.0, None)
            f = f / f.sum()
            if ds.response is None:
                f = rng.multinomial(r.n_shots, f) / r.n_shots
            else:
                # redraw detector tallies so read-out noise enters the spread
                obs = ds.response @ f
                f = correct_counts(rng.multinomial(r.n_shots, obs / obs.sum()), ds.response).raw
            vals.append(standard_survival(f, r.expected_outcome) if kind == "standard"
                        else leakage_survival(f))
        values[length] = np.array(vals)
        strata[length] = np.array([recs[i].expected_outcome for i in picks])
    return values, (strata if kind == "leakage" else None)


def bootstrap(ds: Dataset, model: FitModel | str, n_resamples: int = DEFAULT_RESAMPLES,
              seed: int = 0) -> dict[str, float]:
    """Semi-parametric bootstrap: one-sigma spread of each fit parameter.

    Sequences are resampled with replacement within each length, then each
    resampled sequence's shots are redrawn from its clipped corrected
    frequencies.  When the dataset carries a detector response the shots are
    redrawn as observed tallies and corrected again.
    """
    model = FitModel(model)
    names = _PARAMS[model]
    if ds.mode is Mode.EXACT:
        return {n: 0.0 for n in names}
    rng = np.random.default_rng(np.random.SeedSequence([seed], spawn_key=(0xB007,)))
    kind = survival_kind(model)
    fits, failures = [], 0
    for _ in range(n_resamples):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                res = fit_points(DecayPoints.from_values(*_resampled_values(ds, kind, rng)), model)
            fits.append([res.params[n] for n in names])
        except (FitError, ValueError, np.linalg.LinAlgError):
            failures += 1
    if failures > MAX_FAILURE_RATE * n_resamples:
        raise BootstrapUnstableError(f"{failures}/{n_resamples} bootstrap fits failed")
    arr = np.array(fits)
    return {n: float(np.std(arr[:, i], ddof=1)) for i, n in enumerate(names)}


def with_ci(result: FitResult, ci: dict[str, float]) -> FitResult:
    return FitResult(result.model, result.params, result.residual, dict(ci), result.flags)


# --------------------------------------------------------------------------- fidelities


def clifford_subspace_fidelity(r: float, d1: int = 3) -> float:
    """``((d1^2 - 1) r + 1) / d1^2``."""
    return ((d1**2 - 1) * r + 1) / d1**2


def extended_sub_fidelity(r: float, t: float, d1: int = 3) -> float:
    """``((d1^2 - 1) r + t + 1) / (d1^2 + 1)``, i.e. ``(8r + t + 1)/10`` for a qutrit."""
    return ((d1**2 - 1) * r + t + 1) / (d1**2 + 1)


def phase_gate_error(f: float, gates_per_clifford: float = 3.0) -> float:
    """Per-phase-gate infidelity ``(1 - f)/n``; ``n`` is never inferred."""
    if gates_per_clifford <= 0:
        raise ValueError("gates_per_clifford must be positive")
    return (1 - f) / gates_per_clifford


def fidelity_bounds(f_prime: float, d: int = 4, d1: int = 3) -> tuple[float, float]:
    """Bounds on ``|F - f'|`` with prefactor ``(d^2 - d1^2 + 1)/d^2``."""
    c = (d**2 - d1**2 + 1) / d**2
    return c * (1 - f_prime), c * (1 + f_prime)


def containment_interval(f_prime: float, d: int = 4, d1: int = 3) -> tuple[float, float]:
    """Interval for the full process fidelity ``F`` given ``f'``.

    ``d^2 F`` is ``(d1^2 + 1) f'`` plus ``d^2 - d1^2 - 1`` diagonal matrix
    elements on the remaining orthonormal operators, each in ``[-1, 1]``.
    """
    rest = d**2 - d1**2 - 1
    return ((d1**2 + 1) * f_prime - rest) / d**2, ((d1**2 + 1) * f_prime + rest) / d**2


def channel_decays(s: SuperOp, split: SubspaceSplit = SPLIT) -> tuple[float, float]:
    """``(r, t)`` of the twirled channel computed straight from the superoperator."""
    return subspace_decay(s, split), leakage_decay(s, split)


# --------------------------------------------------------------------------- twirl algebra


@dataclass(frozen=True)
class TwirlSummary:
    L: float
    S: float
    t1: float
    t2: float
    lambda_minus: float
    matrix: np.ndarray = field(repr=False)
    Pi_plus: np.ndarray = field(repr=False)
    Pi_minus: np.ndarray = field(repr=False)
    degenerate: bool = False

    lambda_plus = 1.0


def twirl_2x2(L: float, S: float, d1: int = 3, d2: int = 1) -> TwirlSummary:
    """Population-transfer matrix on ``{|1_1>>, |1_2>>}`` and its eigen-decomposition.

    With ``L = S = 0`` the matrix is the identity and any split is valid; the
    projectors of the equal-rate limit ``L = S -> 0`` are returned, which keeps
    ``<<1|Pi_+ = <<1|``.
    """
    if L < 0 or S < 0:
        raise ValueError("leakage and seepage rates must be non-negative")
    a, b = math.sqrt(d2 / d1), math.sqrt(d1 / d2)
    t1, t2 = 1 - a * L, 1 - b * S
    m = np.array([[t1, S], [L, t2]])
    lam = 1 - a * L - b * S
    norm = d2 * L + d1 * S
    degenerate = norm <= 0
    if degenerate:
        sl = ss = 1.0 / (d1 + d2)
    else:
        sl, ss = L / norm, S / norm  # normalize first so tiny rates do not underflow
    g = math.sqrt(d1 * d2)
    pi_p = np.array([[d1 * ss, g * ss], [g * sl, d2 * sl]])
    pi_m = np.array([[d2 * sl, -g * ss], [-g * sl, d1 * ss]])
    return TwirlSummary(L, S, t1, t2, lam, m, pi_p, pi_m, degenerate)


def leakage_asymptotes(L: float, S: float, d1: int = 3, d2: int = 1) -> tuple[float, float]:
    """Ideal-SPAM asymptote ``B`` and amplitude ``C`` for one RB-subspace outcome.

    ``p(l) = B + C t^(l+1)`` with ``B = S/(d2 L + d1 S)`` and
    ``C = (d2/d1) L/(d1 S + d2 L)``.  The engine's leakage survival sums the
    RB population over all ``d1`` outcomes, so its fitted ``B`` and ``C`` are
    ``d1`` times these.

    State-preparation or measurement leakage adds small offsets ``eps_B`` and
    ``eps_C`` to both values.  They are not fitted separately; the free ``B``
    and ``C`` of the leakage model absorb them.
    """
    norm = d2 * L + d1 * S
    if norm <= 0:
        raise ValueError("need d2 L + d1 S > 0")
    return S / norm, (d2 / d1) * L / norm


# --------------------------------------------------------------------------- diagnostics


MAX_DIAGNOSTIC_DIM = 4


def twirl_superoperator(gates: Sequence[np.ndarray],
                        reference: Sequence[np.ndarray] | None = None) -> np.ndarray:
    """``(1/N) sum_i conj(V_i) kron U_i`` acting on column-stacked superoperators.

    It maps ``Lambda -> (1/N) sum_i U_i Lambda V_i^dag``; ``V_i`` defaults to
    ``U_i``.  ``U_i`` and ``V_i`` are the superoperators of the given unitaries.
    """
    gates = list(gates)
    if not gates:
        raise ValueError("gate set is empty")
    reference = gates if reference is None else list(reference)
    if len(reference) != len(gates):
        raise ValueError("reference set must pair one-to-one with the gates")
    d = np.asarray(gates[0]).shape[0]
    if d > MAX_DIAGNOSTIC_DIM:
        raise ValueError(f"twirl diagnostics limited to d <= {MAX_DIAGNOSTIC_DIM} "
                         f"({d**4} x {d**4} would be needed)")
    n = d**4
    acc = np.zeros((n, n), dtype=complex)
    for u, v in zip(gates, reference):
        acc += np.kron(unitary_to_super(v).matrix.conj(), unitary_to_super(u).matrix)
    return acc / len(gates)


def twirl_channel(gates, channel: SuperOp, reference=None) -> SuperOp:
    t = twirl_superoperator(gates, reference)
    d2 = channel.matrix.shape[0]
    return SuperOp((t @ channel.matrix.ravel(order="F")).reshape(d2, d2, order="F"))


def _sector_bases(split: SubspaceSplit) -> dict[str, np.ndarray]:
    d, d1 = split.d, split.d1

    def unit(i, j):
        e = np.zeros((d, d), dtype=complex)
        e[i, j] = 1.0
        return vec(split.from_split_basis(e))

    pops = np.column_stack([vec(split.p1) / math.sqrt(d1), vec(split.p2) / math.sqrt(d - d1)])
    coh = np.column_stack([unit(i, j) for i in range(d1) for j in range(d1, d)]
                          + [unit(j, i) for i in range(d1) for j in range(d1, d)])
    return {"populations": pops, "rb_traceless": split.block_basis, "coherences": coh}


@dataclass(frozen=True)
class TwirlDiagnostics:
    """Spectra of the sequence-averaged map.

    ``super_spectrum``: eigenvalues of the 256x256 super-superoperator.
    ``channel_spectrum``: eigenvalues of the twirled channel.
    ``sectors``: eigenvalues of the twirled channel compressed to the
    population span ``{|1_1>>, |1_2>>}``, the traceless RB block, and the
    RB/leakage coherences.  All sorted by decreasing magnitude.
    """

    super_spectrum: np.ndarray = field(repr=False)
    channel_spectrum: np.ndarray = field(repr=False)
    sectors: dict[str, np.ndarray] = field(repr=False)

    @property
    def max_coherence(self) -> float:
        return float(np.max(np.abs(self.sectors["coherences"])))

    def unit_eigenvalues(self, tol: float = 1e-9) -> int:
        return int(np.sum(np.abs(np.abs(self.super_spectrum) - 1) < tol))


def _by_magnitude(ev: np.ndarray) -> np.ndarray:
    return ev[np.argsort(-np.abs(ev), kind="stable")]


def twirl_diagnostics(gates: Sequence[np.ndarray], channel: SuperOp | None = None,
                      reference: Sequence[np.ndarray] | None = None,
                      split: SubspaceSplit = SPLIT) -> TwirlDiagnostics:
    """Eigen-structure of ``Lambda -> (1/N) sum_i U_i Lambda V_i^dag``.

    Pass ``reference`` to compare applied gates against the frame that the
    sequence inversion undoes.  With phase-reversed averaging the inversion is
    compiled from the standard recipes, so ``gates`` lists standard and reversed
    recipes and ``reference`` the standard recipe for each.
    """
    gates = list(gates)
    t = twirl_superoperator(gates, reference)
    d = np.asarray(gates[0]).shape[0]
    channel = channel if channel is not None else SuperOp.identity(d)
    tw = SuperOp((t @ channel.matrix.ravel(order="F")).reshape(d * d, d * d, order="F"))
    sectors = {}
    for name, b in _sector_bases(split).items():
        sectors[name] = _by_magnitude(np.linalg.eigvals(b.conj().T @ tw.matrix @ b))
    return TwirlDiagnostics(_by_magnitude(np.linalg.eigvals(t)),
                            _by_magnitude(np.linalg.eigvals(tw.matrix)), sectors)


# --------------------------------------------------------------------------- reports


@dataclass(frozen=True)
class AnalysisReport:
    protocol: Protocol
    standard: FitResult
    leakage: FitResult | None
    derived: dict[str, float]
    points: dict[str, DecayPoints] = field(repr=False)

    def to_dict(self) -> dict:
        def fit(f: FitResult | None):
            if f is None:
                return None
            return {"model": f.model.value, "params": f.params, "ci": f.ci,
                    "residual": f.residual, "flags": list(f.flags)}
        return {"protocol": self.protocol.value, "standard": fit(self.standard),
                "leakage": fit(self.leakage), "derived": self.derived}


def analyze(ds: Dataset, n_resamples: int = DEFAULT_RESAMPLES, seed: int = 0,
            gates_per_clifford: float = 3.0) -> AnalysisReport:
    """Standard (or generic, for SRB-lite) and leakage fits with bootstrap errors."""
    if ds.protocol is Protocol.SRB_LITE:
        std_model, leak_model = FitModel.GENERIC, None
    else:
        std_model, leak_model = FitModel.STANDARD_FIXED, FitModel.LEAKAGE
    points = {"standard": DecayPoints.from_dataset(ds, "standard")}
    std = with_ci(fit_points(points["standard"], std_model),
                  bootstrap(ds, std_model, n_resamples, seed))
    leak = None
    if leak_model is not None:
        points["leakage"] = DecayPoints.from_dataset(ds, "leakage")
        leak = with_ci(fit_points(points["leakage"], leak_model),
                       bootstrap(ds, leak_model, n_resamples, seed))
    r = std.params["r"]
    n = gates_per_clifford
    derived = {"r": r, "r_ci": std.ci.get("r", 0.0), "f_cliff": clifford_subspace_fidelity(r),
               "r_zz": r ** (1 / n),
               "one_minus_f_zz_from_f_cliff": phase_gate_error(clifford_subspace_fidelity(r), n)}
    if leak is not None:
        t = leak.params["t"]
        fp = extended_sub_fidelity(r, t)
        lo, hi = fidelity_bounds(fp)
        fp_err = math.hypot(0.8 * std.ci.get("r", 0.0), 0.1 * leak.ci.get("t", 0.0))
        derived.update({"t": t, "t_ci": leak.ci.get("t", 0.0), "t_zz": t ** (1 / n),
                        "f_prime": fp, "f_prime_ci": fp_err,
                        "f_zz_prime": 1 - phase_gate_error(fp, n),
                        "one_minus_f_zz_prime": phase_gate_error(fp, n),
                        "fidelity_gap_lower": lo, "fidelity_gap_upper": hi})
    return AnalysisReport(ds.protocol, std, leak, derived, points)
