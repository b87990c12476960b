"""YAML run configuration: schema, validation and conversion to engine objects.

Example::

    protocol: srb            # srb | srb_lite | group_rb
    mode: sampled            # sampled | exact
    lengths: [3, 17, 40]
    sequences: 50
    shots: 50
    master_seed: 20200531
    phase_reversed: false
    weyl_sampling: uniform   # uniform | balanced
    workers: 1
    noise:
      per_phase_gate: {kind: intensity, epsilon: 0.01}
      per_clifford: {kind: tuned, r: 0.9934, t: 0.985}
    detector: {bright_mean: 9.0, dark_mean: 0.1, tomography_shots: 10000}
    analysis: {bootstrap: 200, seed: 0, gates_per_clifford: 3}
    output: {dir: out}

Every key is optional; unknown keys are rejected with the line they occur on.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from .engine import DetectorModel, ExperimentConfig, Mode, Protocol, WeylSampling
from .noise import ChannelKind, ErrorChannel, NoiseModel, identity_channel, make_channel, tuned_channel


class ConfigError(ValueError):
    pass


DEFAULTS: dict[str, Any] = {
    "protocol": "srb",
    "mode": "sampled",
    "lengths": [1, 2, 4, 8, 16, 32, 64, 128],
    "sequences": 100,
    "shots": 100,
    "master_seed": 20200531,
    "phase_reversed": False,
    "weyl_sampling": "uniform",
    "workers": 1,
    "cache_dir": None,
    "noise": {},
    "detector": None,
    "analysis": {"bootstrap": 200, "seed": 0, "gates_per_clifford": 3.0},
    "output": {"dir": "srb_out", "dataset": "dataset.csv", "report": "report.json",
               "plot": "decay_curves.csv"},
}
NOISE_SLOTS = ("per_phase_gate", "per_rotation", "per_clifford", "prep", "measure")
CHANNEL_KEYS = {"kind", "epsilon", "r", "t"}
DETECTOR_KEYS = {"bright_mean", "dark_mean", "tomography_shots"}


def _with_lines(node: yaml.Node, path: str, lines: dict[str, int]) -> Any:
    lines.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            key = k.value
            sub = f"{path}.{key}" if path else key
            lines[sub] = k.start_mark.line + 1
            out[key] = _with_lines(v, sub, lines)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_with_lines(v, f"{path}[{i}]", lines) for i, v in enumerate(node.value)]
    return yaml.safe_load(yaml.serialize(node))


def parse_yaml(text: str, source: str = "<config>") -> tuple[dict, dict[str, int]]:
    lines: dict[str, int] = {}
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    if node is None:
        return {}, lines
    data = _with_lines(node, "", lines)
    if not isinstance(data, dict):
        raise ConfigError(f"{source}:1: top level must be a mapping")
    return data, lines


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def apply_override(data: dict, assignment: str) -> None:
    """Apply ``a.b.c=value`` (value parsed as YAML) in place."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} must look like key.path=value")
    key, raw = assignment.split("=", 1)
    parts = key.strip().split(".")
    node = data
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override {key!r} descends into a non-mapping")
    try:
        node[parts[-1]] = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"override {key!r}: {exc}") from exc


@dataclass(frozen=True)
class RunSpec:
    raw: dict
    experiment: ExperimentConfig
    bootstrap: int
    analysis_seed: int
    gates_per_clifford: float
    output_dir: Path
    dataset_name: str
    report_name: str
    plot_name: str
    cache_dir: Path | None

    @property
    def config_hash(self) -> str:
        return config_hash(self.raw)


def config_hash(raw: dict) -> str:
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":"), default=str).encode()
    return hashlib.sha256(blob).hexdigest()


class _Validator:
    def __init__(self, source: str, lines: dict[str, int]):
        self.source, self.lines = source, lines

    def fail(self, path: str, msg: str):
        line = self.lines.get(path)
        while line is None and "." in path:
            path = path.rsplit(".", 1)[0]
            line = self.lines.get(path)
        where = f"{self.source}:{line}" if line else self.source
        raise ConfigError(f"{where}: {msg}")

    def keys(self, d: Any, allowed, path: str):
        if not isinstance(d, dict):
            self.fail(path, f"'{path}' must be a mapping")
        for k in d:
            if k not in allowed:
                self.fail(f"{path}.{k}" if path else k, f"unknown key '{k}'")

    def number(self, v, path, lo=None, hi=None, integer=False):
        ok = isinstance(v, int) if integer else isinstance(v, (int, float))
        if isinstance(v, bool) or not ok:
            self.fail(path, f"'{path}' must be {'an integer' if integer else 'a number'}")
        if (lo is not None and v < lo) or (hi is not None and v > hi):
            self.fail(path, f"'{path}' = {v} out of range [{lo}, {hi}]")
        return v

    def enum(self, v, enum, path):
        try:
            return enum(str(v).lower())
        except ValueError:
            self.fail(path, f"'{path}' must be one of {[e.value for e in enum]}")

    def channel(self, spec, path) -> ErrorChannel:
        if spec is None:
            return identity_channel()
        self.keys(spec, CHANNEL_KEYS, path)
        kind = str(spec.get("kind", "")).lower()
        if kind == "tuned":
            r = self.number(spec.get("r"), f"{path}.r", 0, 1)
            t = self.number(spec.get("t"), f"{path}.t", 0, 1)
            try:
                return tuned_channel(r, t)
            except ValueError as exc:
                self.fail(path, str(exc))
        k = self.enum(kind, ChannelKind, f"{path}.kind")
        if k is ChannelKind.CUSTOM:
            self.fail(f"{path}.kind", "custom channels cannot be given in a config file")
        eps = self.number(spec.get("epsilon", 0.0), f"{path}.epsilon", 0)
        try:
            return make_channel(k, eps)
        except ValueError as exc:
            self.fail(f"{path}.epsilon", str(exc))


def build_spec(data: dict, lines: dict[str, int] | None = None, source: str = "<config>") -> RunSpec:
    v = _Validator(source, lines or {})
    v.keys(data, DEFAULTS, "")
    for sect in ("analysis", "output"):
        if sect in data:
            v.keys(data[sect], DEFAULTS[sect], sect)
    cfg = _merge(DEFAULTS, data)
    v.keys(cfg["noise"] or {}, NOISE_SLOTS, "noise")
    noise = NoiseModel(**{slot: v.channel((cfg["noise"] or {}).get(slot), f"noise.{slot}")
                          for slot in NOISE_SLOTS})
    lengths = cfg["lengths"]
    if not isinstance(lengths, list) or not lengths:
        v.fail("lengths", "'lengths' must be a non-empty list")
    for i, l in enumerate(lengths):
        v.number(l, f"lengths[{i}]", 0, None, integer=True)
    det, tomo = None, 10_000
    if cfg["detector"] not in (None, "ideal"):
        v.keys(cfg["detector"], DETECTOR_KEYS, "detector")
        d = cfg["detector"]
        bright = v.number(d.get("bright_mean", 9.0), "detector.bright_mean", 0)
        dark = v.number(d.get("dark_mean", 0.1), "detector.dark_mean", 0)
        tomo = v.number(d.get("tomography_shots", tomo), "detector.tomography_shots", 1,
                        integer=True)
        if dark >= bright:
            v.fail("detector", "dark_mean must be below bright_mean")
        det = DetectorModel(float(bright), float(dark))
    if not isinstance(cfg["phase_reversed"], bool):
        v.fail("phase_reversed", "'phase_reversed' must be true or false")
    exp = ExperimentConfig(
        protocol=v.enum(cfg["protocol"], Protocol, "protocol"),
        lengths=tuple(lengths),
        n_sequences=v.number(cfg["sequences"], "sequences", 1, integer=True),
        n_shots=v.number(cfg["shots"], "shots", 1, integer=True),
        mode=v.enum(cfg["mode"], Mode, "mode"),
        noise=noise,
        detector=det,
        tomography_shots=tomo,
        phase_reversed=cfg["phase_reversed"],
        weyl_sampling=v.enum(cfg["weyl_sampling"], WeylSampling, "weyl_sampling"),
        master_seed=v.number(cfg["master_seed"], "master_seed", 0, integer=True),
        workers=v.number(cfg["workers"], "workers", 1, integer=True),
    )
    a, o = cfg["analysis"], cfg["output"]
    return RunSpec(
        raw=cfg, experiment=exp,
        bootstrap=v.number(a["bootstrap"], "analysis.bootstrap", 0, integer=True),
        analysis_seed=v.number(a["seed"], "analysis.seed", 0, integer=True),
        gates_per_clifford=float(v.number(a["gates_per_clifford"], "analysis.gates_per_clifford", 1e-9)),
        output_dir=Path(str(o["dir"])), dataset_name=str(o["dataset"]),
        report_name=str(o["report"]), plot_name=str(o["plot"]),
        cache_dir=None if cfg["cache_dir"] is None else Path(str(cfg["cache_dir"])),
    )


def load_config(path: str | Path | None, overrides: list[str] = ()) -> RunSpec:
    """Read, override and validate a config file (``None`` means all defaults)."""
    data, lines, source = {}, {}, "<defaults>"
    if path is not None:
        source = str(path)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        data, lines = parse_yaml(text, source)
    for o in overrides:
        apply_override(data, o)
    return build_spec(data, lines, source)
