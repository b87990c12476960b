"""Sequence generation, noisy SRB simulation, detector model and dataset I/O.

Outcomes are indexed by the number of bright (excited) ions, which equals the
qutrit index of the symmetric basis state: 0 for |00>, 1 for either single
excitation, 2 for |11>.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import poisson

from .noise import NoiseModel
from .qgroups import D, CliffordGroup
from .qops import SPLIT, embed_symmetric, unitary_to_super, vec
from .synth import CliffordRecipe, CollectiveRotation
from .tables import GateTables, default_tables

N_OUTCOMES = 3
NORM_TOL = 1e-10


class Protocol(str, Enum):
    SRB = "srb"
    SRB_LITE = "srb_lite"
    GROUP_RB = "group_rb"


class Mode(str, Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


class WeylSampling(str, Enum):
    UNIFORM = "uniform"
    BALANCED = "balanced"  # sequence i uses label (i mod 3, (i // 3) mod 3)


class DatasetSchemaError(ValueError):
    """A dataset file does not follow the CSV schema."""


class EmptyDatasetError(DatasetSchemaError):
    pass


class DetectorError(ValueError):
    pass


# --------------------------------------------------------------------------- sequences


@dataclass(frozen=True)
class SequenceSpec:
    """One random sequence: ``length`` Cliffords plus the compiled inversion.

    ``reversed_mask`` has one entry per applied Clifford (the inversion last)
    and marks positions using the phase-reversed recipe.
    """

    length: int
    clifford_ids: tuple[int, ...]
    weyl: tuple[int, int] | None
    inversion: int
    expected_outcome: int
    phase_reversed: bool = False
    reversed_mask: tuple[bool, ...] = ()

    @property
    def gates(self) -> tuple[int, ...]:
        return self.clifford_ids + (self.inversion,)


def _weyl_label(protocol: Protocol, rng: np.random.Generator, index: int | None,
                sampling: WeylSampling) -> tuple[int, int] | None:
    if protocol is Protocol.SRB_LITE:
        return None
    if sampling is WeylSampling.BALANCED:
        if index is None:
            raise ValueError("balanced Weyl sampling needs the sequence index")
        return index % D, (index // D) % D
    k = int(rng.integers(D * D))
    return k // D, k % D


def generate_sequence(length: int, protocol: Protocol | str, rng: np.random.Generator,
                      group: CliffordGroup | None = None, phase_reversed: bool = False,
                      weyl_sampling: WeylSampling | str = WeylSampling.UNIFORM,
                      index: int | None = None) -> SequenceSpec:
    """Draw ``length`` i.i.d. uniform Cliffords and compile the final inversion.

    For SRB and group RB a final Weyl gate is folded into the inversion and
    sets the expected outcome; SRB-lite always expects outcome 0.
    """
    if length < 0:
        raise ValueError("sequence length must be non-negative")
    protocol = Protocol(protocol)
    group = group if group is not None else default_tables().group
    ids = tuple(int(c) for c in rng.integers(len(group), size=length))
    weyl = _weyl_label(protocol, rng, index, WeylSampling(weyl_sampling))
    inversion, outcome = group.compile_inversion(ids, weyl or (0, 0))
    if phase_reversed and protocol is not Protocol.GROUP_RB:
        mask = tuple(bool(b) for b in rng.integers(2, size=length + 1))
    else:
        mask = (False,) * (length + 1)
    return SequenceSpec(length, ids, weyl, inversion, outcome, bool(phase_reversed), mask)


# --------------------------------------------------------------------------- simulation


def _povm_rows() -> np.ndarray:
    e = np.zeros((N_OUTCOMES, 4, 4))
    e[0, 0, 0] = 1.0
    e[1, 1, 1] = e[1, 2, 2] = 1.0
    e[2, 3, 3] = 1.0
    return np.array([vec(m).conj() for m in e])


POVM = _povm_rows()
GROUND = vec(np.diag([1.0, 0, 0, 0]))


class Simulator:
    """Noisy 16x16 superoperator for every Clifford, precomputed once per noise model."""

    def __init__(self, noise: NoiseModel | None = None, tables: GateTables | None = None,
                 protocol: Protocol | str = Protocol.SRB):
        self.noise = noise if noise is not None else NoiseModel()
        self.tables = tables if tables is not None else default_tables()
        self.protocol = Protocol(protocol)
        if self.protocol is Protocol.GROUP_RB:
            std = self._group_table()
            self._table = np.stack([std, std])
        else:
            self._table = np.stack([self._recipe_table(self.tables.recipes),
                                    self._recipe_table(self.tables.reversed_recipes)])
        self._init = self.noise.prep.superop.matrix @ GROUND
        self._readout = POVM @ self.noise.measure.superop.matrix

    def _recipe_table(self, recipes: Sequence[CliffordRecipe]) -> np.ndarray:
        rot = self.noise.per_rotation.superop.matrix
        ent = self.noise.per_phase_gate.superop.matrix
        cliff = self.noise.per_clifford.superop.matrix
        cache: dict = {}
        out = np.empty((len(recipes), 16, 16), dtype=complex)
        for i, r in enumerate(recipes):
            m = np.eye(16, dtype=complex)
            for g in r.gates:
                key = g if isinstance(g, CollectiveRotation) else type(g)
                s = cache.get(key)
                if s is None:
                    s = unitary_to_super(g.unitary()).matrix
                    s = (rot if isinstance(g, CollectiveRotation) else ent) @ s
                    cache[key] = s
                m = s @ m
            out[i] = cliff @ m
        return out

    def _group_table(self) -> np.ndarray:
        cliff = self.noise.per_clifford.superop.matrix
        return np.array([cliff @ unitary_to_super(embed_symmetric(u)).matrix
                         for u in self.tables.group.unitaries])

    def probabilities_batch(self, specs: Sequence[SequenceSpec]) -> np.ndarray:
        """Outcome probabilities for sequences of one common length, shape ``(K, 3)``."""
        if not specs:
            return np.empty((0, N_OUTCOMES))
        n = len(specs[0].gates)
        if any(len(s.gates) != n for s in specs):
            raise ValueError("batched sequences must share one length")
        ids = np.array([s.gates for s in specs], dtype=np.int64)
        rev = np.array([s.reversed_mask or (False,) * n for s in specs], dtype=np.int64)
        states = np.tile(self._init, (len(specs), 1))
        for j in range(n):
            states = np.einsum("kab,kb->ka", self._table[rev[:, j], ids[:, j]], states)
        return np.real(states @ self._readout.T)

    def probabilities(self, spec: SequenceSpec) -> np.ndarray:
        return self.probabilities_batch([spec])[0]

    def final_state(self, spec: SequenceSpec) -> np.ndarray:
        """Density matrix just before the measurement channel."""
        s = self._init
        for g, r in zip(spec.gates, spec.reversed_mask or (False,) * len(spec.gates)):
            s = self._table[int(r), g] @ s
        return s.reshape(4, 4, order="F")


def simulate_sequence(spec: SequenceSpec, noise: NoiseModel | None = None,
                      mode: Mode | str = Mode.EXACT, rng: np.random.Generator | None = None,
                      n_shots: int = 100, detector: "DetectorModel | None" = None,
                      tables: GateTables | None = None,
                      protocol: Protocol | str = Protocol.SRB) -> np.ndarray:
    """Exact outcome probabilities, or observed detector tallies in Sampled mode."""
    probs = Simulator(noise, tables, protocol).probabilities(spec)
    if Mode(mode) is Mode.EXACT:
        return probs
    rng = rng if rng is not None else np.random.default_rng()
    true = rng.multinomial(n_shots, _normalized(probs))
    return simulate_detector(true, detector or DetectorModel.ideal(), rng)


def _normalized(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    return p / p.sum()


# --------------------------------------------------------------------------- detector


def _ml_threshold(lo: float, hi: float) -> int:
    # smallest n with Poisson(n; hi) >= Poisson(n; lo)
    if lo <= 0:
        return 1
    return int(math.ceil((hi - lo) / math.log(hi / lo)))


@dataclass(frozen=True, eq=False)
class DetectorModel:
    """Photon-counting detector: outcome ``k`` emits Poisson(k*bright + (2-k)*dark).

    ``thresholds`` are the lower photon-count edges of observed bins 1, 2, ...
    and default to the maximum-likelihood boundaries between adjacent means.
    ``response[o, k]`` is the probability of observed bin ``o`` given ``k``
    bright ions.  A ``perfect`` detector reports the true outcome.
    """

    bright_mean: float = 9.0
    dark_mean: float = 0.1
    thresholds: tuple[int, ...] | None = None
    response: np.ndarray | None = field(default=None, repr=False)
    perfect: bool = False

    def __post_init__(self):
        if self.perfect:
            object.__setattr__(self, "response", np.eye(N_OUTCOMES))
            return
        if not 0 <= self.dark_mean < self.bright_mean:
            raise DetectorError("need 0 <= dark_mean < bright_mean")
        if self.thresholds is None:
            mu = self.means
            object.__setattr__(self, "thresholds", tuple(
                _ml_threshold(mu[k], mu[k + 1]) for k in range(N_OUTCOMES - 1)))
        if len(self.thresholds) + 1 < N_OUTCOMES:
            raise DetectorError("fewer observed bins than outcome classes")
        if self.response is None:
            object.__setattr__(self, "response", self._analytic_response())
        r = np.asarray(self.response, dtype=float)
        if r.ndim != 2 or r.shape != (len(self.thresholds) + 1, N_OUTCOMES):
            raise DetectorError("response must be (bins x 3)")
        if np.max(np.abs(r.sum(axis=0) - 1)) > 1e-12:
            raise DetectorError("response columns must sum to 1")
        object.__setattr__(self, "response", r)

    @classmethod
    def ideal(cls) -> "DetectorModel":
        return cls(perfect=True)

    @property
    def is_ideal(self) -> bool:
        return self.perfect

    @property
    def means(self) -> np.ndarray:
        k = np.arange(N_OUTCOMES)
        return k * self.bright_mean + (N_OUTCOMES - 1 - k) * self.dark_mean

    def _analytic_response(self) -> np.ndarray:
        edges = [0, *self.thresholds]
        out = np.empty((len(edges), N_OUTCOMES))
        for k, mu in enumerate(self.means):
            cdf_below = [poisson.cdf(e - 1, mu) if e > 0 else 0.0 for e in edges] + [1.0]
            out[:, k] = np.diff(cdf_below)
        return out

    def classify(self, photons: np.ndarray) -> np.ndarray:
        return np.searchsorted(np.asarray(self.thresholds), photons, side="right")


def simulate_detector(true_counts: Sequence[int], model: DetectorModel,
                      rng: np.random.Generator) -> np.ndarray:
    """Push true per-outcome shot counts through the photon-counting detector."""
    true_counts = np.asarray(true_counts, dtype=np.int64)
    if model.is_ideal:
        return true_counts.copy()
    n_bins = len(model.thresholds) + 1
    out = np.zeros(n_bins, dtype=np.int64)
    for k, (n, mu) in enumerate(zip(true_counts, model.means)):
        if n:
            photons = rng.poisson(mu, size=int(n))
            out += np.bincount(model.classify(photons), minlength=n_bins)
    return out


def calibration_counts(model: DetectorModel, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Tallies from preparing 0, 1 and 2 bright ions ``shots`` times each; column k is class k."""
    cols = []
    for k in range(N_OUTCOMES):
        true = np.zeros(N_OUTCOMES, dtype=np.int64)
        true[k] = shots
        cols.append(simulate_detector(true, model, rng))
    return np.column_stack(cols)


def detector_tomography(calibration: np.ndarray) -> np.ndarray:
    """Column-stochastic response estimate from calibration tallies ``[bin, true class]``."""
    cal = np.asarray(calibration, dtype=float)
    if cal.ndim != 2 or cal.shape[1] != N_OUTCOMES:
        raise DetectorError("calibration tallies must have one column per true outcome")
    if cal.shape[0] < N_OUTCOMES:
        raise DetectorError("fewer observed bins than outcome classes")
    totals = cal.sum(axis=0)
    if np.any(totals <= 0):
        raise DetectorError("empty calibration class")
    return cal / totals


@dataclass(frozen=True)
class CorrectedFreqs:
    raw: np.ndarray      # least-squares solution, may leave the simplex
    clipped: np.ndarray  # clipped at zero and renormalized


def correct_counts(raw_counts: Sequence[float], response: np.ndarray) -> CorrectedFreqs:
    """Solve ``R f = observed frequencies`` in the least-squares sense."""
    r = np.asarray(response, dtype=float)
    counts = np.asarray(raw_counts, dtype=float)
    if np.linalg.matrix_rank(r) < r.shape[1]:
        raise DetectorError("response matrix is rank deficient")
    total = counts.sum()
    if total <= 0:
        raise DetectorError("no shots to correct")
    f = np.linalg.lstsq(r, counts / total, rcond=None)[0]
    c = np.clip(f, 0.0, None)
    return CorrectedFreqs(f, c / c.sum())


# --------------------------------------------------------------------------- experiments


@dataclass(frozen=True)
class Record:
    length: int
    sequence_index: int
    weyl: tuple[int, int] | None
    expected_outcome: int
    phase_reversed: bool
    n_shots: int
    probs: np.ndarray | None = field(default=None, repr=False)
    raw_counts: np.ndarray | None = field(default=None, repr=False)
    corrected: np.ndarray | None = field(default=None, repr=False)
    clifford_ids: tuple[int, ...] | None = field(default=None, repr=False, compare=False)

    @property
    def freqs(self) -> np.ndarray:
        """Outcome probabilities (Exact) or unclipped corrected frequencies (Sampled)."""
        return self.probs if self.probs is not None else self.corrected


def standard_survival(f: np.ndarray, expected: int) -> float:
    return float(f[expected])


def leakage_survival(f: np.ndarray) -> float:
    """RB-subspace population estimate ``(d1/2)(f0 + f2)`` from the even-parity outcomes.

    Averaged over the final Weyl gate the RB block is maximally mixed, so each
    outcome carries a third of the RB population; this is 1 without noise.
    """
    return SPLIT.d1 / 2 * float(f[0] + f[2])


@dataclass(frozen=True, eq=False)
class Dataset:
    protocol: Protocol
    mode: Mode
    master_seed: int | None
    records: tuple[Record, ...]
    response: np.ndarray | None = field(default=None, repr=False)

    @property
    def lengths(self) -> list[int]:
        return sorted({r.length for r in self.records})

    def by_length(self) -> dict[int, list[Record]]:
        out: dict[int, list[Record]] = {}
        for r in self.records:
            out.setdefault(r.length, []).append(r)
        return {k: out[k] for k in sorted(out)}

    def survival(self, kind: str = "standard") -> dict[int, np.ndarray]:
        """Per-record survival values grouped by length."""
        if kind == "standard":
            fn = lambda r: standard_survival(r.freqs, r.expected_outcome)  # noqa: E731
        elif kind == "leakage":
            fn = lambda r: leakage_survival(r.freqs)  # noqa: E731
        else:
            raise ValueError(f"unknown survival kind {kind!r}")
        return {l: np.array([fn(r) for r in recs]) for l, recs in self.by_length().items()}

    def rows(self) -> list[dict]:
        return [_record_row(self.protocol, r) for r in self.records]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.protocol is other.protocol and self.mode is other.mode
                and self.rows() == other.rows())


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: Protocol = Protocol.SRB
    lengths: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64, 128)
    n_sequences: int = 100
    n_shots: int = 100
    mode: Mode = Mode.SAMPLED
    noise: NoiseModel = field(default_factory=NoiseModel)
    detector: DetectorModel | None = None
    tomography_shots: int = 10_000
    phase_reversed: bool = False
    weyl_sampling: WeylSampling = WeylSampling.UNIFORM
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for name, enum in (("protocol", Protocol), ("mode", Mode), ("weyl_sampling", WeylSampling)):
            object.__setattr__(self, name, enum(getattr(self, name)))
        object.__setattr__(self, "lengths", tuple(int(l) for l in self.lengths))
        if not self.lengths or min(self.lengths) < 0:
            raise ValueError("lengths must be a non-empty list of non-negative integers")
        if self.n_sequences < 1:
            raise ValueError("need at least one sequence per length")
        if self.mode is Mode.SAMPLED and self.n_shots < 1:
            raise ValueError("sampled mode needs n_shots >= 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")


def default_lengths(expected_error: float, n_points: int = 8) -> tuple[int, ...]:
    """Exponentially spaced lengths from 1 to ``ceil(1/expected_error)``."""
    top = max(2, math.ceil(1 / expected_error))
    return tuple(sorted({int(round(x)) for x in np.geomspace(1, top, n_points)}))


def sequence_rng(master_seed: int, length: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, length, index]))


def _detector_rng(master_seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed], spawn_key=(0xDE7EC7,)))


def _run_length(cfg: ExperimentConfig, sim: Simulator, length: int,
                response: np.ndarray) -> list[Record]:
    rngs = [sequence_rng(cfg.master_seed, length, i) for i in range(cfg.n_sequences)]
    specs = [generate_sequence(length, cfg.protocol, rng, sim.tables.group, cfg.phase_reversed,
                               cfg.weyl_sampling, index=i) for i, rng in enumerate(rngs)]
    probs = sim.probabilities_batch(specs)
    detector = cfg.detector or DetectorModel.ideal()
    records = []
    for i, (spec, p, rng) in enumerate(zip(specs, probs, rngs)):
        common = dict(length=length, sequence_index=i, weyl=spec.weyl,
                      expected_outcome=spec.expected_outcome,
                      phase_reversed=spec.phase_reversed, clifford_ids=spec.clifford_ids)
        if cfg.mode is Mode.EXACT:
            records.append(Record(n_shots=0, probs=p, **common))
            continue
        true = rng.multinomial(cfg.n_shots, _normalized(p))
        raw = simulate_detector(true, detector, rng)
        records.append(Record(n_shots=cfg.n_shots, raw_counts=raw,
                              corrected=correct_counts(raw, response).raw, **common))
    return records


def run_experiment(cfg: ExperimentConfig, tables: GateTables | None = None) -> Dataset:
    """Simulate ``n_sequences`` random sequences at every length.

    Sequence ``i`` at length ``l`` draws everything (gates, Weyl label, phase
    flags, shots, photon counts) from ``SeedSequence([master_seed, l, i])``, so
    the result is independent of ``workers``.
    """
    sim = Simulator(cfg.noise, tables, cfg.protocol)
    response = np.eye(N_OUTCOMES)
    if cfg.mode is Mode.SAMPLED and cfg.detector is not None and not cfg.detector.is_ideal:
        cal = calibration_counts(cfg.detector, cfg.tomography_shots, _detector_rng(cfg.master_seed))
        response = detector_tomography(cal)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(lambda l: _run_length(cfg, sim, l, response), cfg.lengths))
    else:
        chunks = [_run_length(cfg, sim, l, response) for l in cfg.lengths]
    records = tuple(r for chunk in chunks for r in chunk)
    return Dataset(cfg.protocol, cfg.mode, cfg.master_seed, records,
                   response if cfg.mode is Mode.SAMPLED else None)


# --------------------------------------------------------------------------- CSV


BASE_COLUMNS = ("protocol", "length", "sequence_index", "phase_reversed", "weyl_a", "weyl_b",
                "expected_outcome", "n_shots")


def _record_row(protocol: Protocol, r: Record) -> dict:
    row = {
        "protocol": protocol.value,
        "length": r.length,
        "sequence_index": r.sequence_index,
        "phase_reversed": int(r.phase_reversed),
        "weyl_a": "" if r.weyl is None else r.weyl[0],
        "weyl_b": "" if r.weyl is None else r.weyl[1],
        "expected_outcome": r.expected_outcome,
        "n_shots": r.n_shots,
    }
    raw = r.raw_counts if r.raw_counts is not None else np.zeros(N_OUTCOMES, dtype=int)
    for i, c in enumerate(raw):
        row[f"raw_c{i}"] = int(c)
    for i, f in enumerate(r.freqs):
        row[f"corr_f{i}"] = repr(float(f))
    return row


def dataset_to_csv(ds: Dataset) -> str:
    rows = ds.rows()
    if not rows:
        raise EmptyDatasetError("dataset has no records")
    fields = list(BASE_COLUMNS) + sorted((k for k in rows[0] if k.startswith("raw_c")),
                                         key=lambda k: int(k[5:]))
    fields += [f"corr_f{i}" for i in range(N_OUTCOMES)]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_dataset(ds: Dataset, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(dataset_to_csv(ds))
    tmp.replace(path)


def _int(row: dict, key: str, line: int, required: bool = True) -> int | None:
    val = (row.get(key) or "").strip()
    if not val:
        if required:
            raise DatasetSchemaError(f"line {line}: missing value for {key!r}")
        return None
    try:
        return int(val)
    except ValueError:
        raise DatasetSchemaError(f"line {line}: {key!r} is not an integer: {val!r}") from None


def _float(row: dict, key: str, line: int) -> float:
    val = (row.get(key) or "").strip()
    try:
        return float(val)
    except ValueError:
        raise DatasetSchemaError(f"line {line}: {key!r} is not a number: {val!r}") from None


def parse_dataset(lines: Iterable[str]) -> Dataset:
    reader = csv.DictReader(lines)
    header = reader.fieldnames or []
    required = ["protocol", "length", "sequence_index", "n_shots", "raw_c0", "raw_c1", "raw_c2",
                "corr_f0", "corr_f1", "corr_f2"]
    missing = [c for c in required if c not in header]
    if missing:
        raise DatasetSchemaError(f"line 1: missing columns {missing}")
    raw_cols = sorted((c for c in header if c.startswith("raw_c")), key=lambda c: int(c[5:]))
    records, protocol = [], None
    for row in reader:
        line = reader.line_num
        try:
            proto = Protocol(row["protocol"].strip().lower())
        except ValueError:
            raise DatasetSchemaError(f"line {line}: unknown protocol {row['protocol']!r}") from None
        if protocol is None:
            protocol = proto
            if proto is not Protocol.SRB_LITE:
                absent = [c for c in ("expected_outcome", "weyl_a", "weyl_b") if c not in header]
                if absent:
                    raise DatasetSchemaError(f"line 1: {proto.value} data needs columns {absent}")
        elif proto is not protocol:
            raise DatasetSchemaError(f"line {line}: mixed protocols in one file")
        a = _int(row, "weyl_a", line, required=False)
        b = _int(row, "weyl_b", line, required=False)
        if proto is not Protocol.SRB_LITE and (a is None or b is None):
            raise DatasetSchemaError(f"line {line}: {proto.value} rows need weyl_a and weyl_b")
        expected = _int(row, "expected_outcome", line, required=proto is not Protocol.SRB_LITE)
        expected = 0 if expected is None else expected
        if not 0 <= expected < N_OUTCOMES:
            raise DatasetSchemaError(f"line {line}: expected_outcome out of range")
        n_shots = _int(row, "n_shots", line)
        raw = np.array([_int(row, c, line) for c in raw_cols], dtype=np.int64)
        freqs = np.array([_float(row, f"corr_f{i}", line) for i in range(N_OUTCOMES)])
        if n_shots and raw.sum() != n_shots:
            raise DatasetSchemaError(f"line {line}: raw counts sum to {raw.sum()}, not {n_shots}")
        common = dict(length=_int(row, "length", line), sequence_index=_int(row, "sequence_index", line),
                      weyl=None if a is None else (a, b), expected_outcome=expected,
                      phase_reversed=bool(_int(row, "phase_reversed", line, required=False)),
                      n_shots=n_shots)
        if n_shots:
            records.append(Record(raw_counts=raw, corrected=freqs, **common))
        else:
            records.append(Record(probs=freqs, **common))
    if not records:
        raise EmptyDatasetError("dataset file has a header but no rows")
    exact = [r.n_shots == 0 for r in records]
    if any(exact) and not all(exact):
        raise DatasetSchemaError("file mixes exact (n_shots = 0) and sampled rows")
    return Dataset(protocol, Mode.EXACT if all(exact) else Mode.SAMPLED, None, tuple(records))


def ingest_external(path: str | Path) -> Dataset:
    """Read a dataset CSV; rows with ``n_shots = 0`` carry exact probabilities."""
    try:
        with open(path, newline="") as fh:
            return parse_dataset(fh)
    except OSError as exc:
        raise DatasetSchemaError(f"cannot read {path}: {exc}") from exc
