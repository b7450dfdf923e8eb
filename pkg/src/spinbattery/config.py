"""Run configuration: JSON parsing, validation, defaults, canonical echo.

A config document is a flat JSON object.  The presence of a "sweep" key makes
it a sweep over (N, Jz) grids; otherwise it describes a single run.  Unknown
keys are rejected, every violation names the offending key path, and the
fully-defaulted effective config is echoed beside the outputs so a run can
always be reproduced from its artifacts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields

from .errors import ConfigError

__all__ = ["RunConfig", "SweepConfig", "parse_config", "effective_dict", "config_sha256"]

_PREPS = ("ground", "ghz", "neel", "bits")
_ENGINES = ("mps", "oracle")
_LEAD_RULES = ("equal", "double")
_SCHEMES = ("suzuki", "triple-jump")


@dataclass
class RunConfig:
    N: int = 4
    N_b: int = 4
    J: float = 1.0
    Jz: float = 0.0
    junction_coupling: float | None = None
    prep: str = "ground"
    bits: list | None = None
    engine: str = "mps"
    dt: float = 0.1
    t_max: float | None = None
    max_D: int = 128
    gate_max_D: int | None = None
    weight_tol: float = 1e-10
    compress_every: int = 1
    compress_sweeps: int = 2
    compress_tol: float = 1e-12
    measurement_stride: int = 1
    checkpoint_stride: int = 0
    trotter_order: int = 4
    trotter_scheme: str = "suzuki"
    alarm_factor: float = 100.0
    tau1: float | None = None
    tau2: float | None = None
    fit_tau2: float | None = None
    T: float | None = None
    gs_max_D: int = 64
    gs_max_sweeps: int = 16
    gs_energy_tol: float = 1e-10
    alpha_ballistic_tol: float = 0.05
    revival_threshold: float = 1e-6
    output_dir: str = "runs"
    label: str = "run"
    seed: int = 0

    def materialize(self) -> "RunConfig":
        """Fill every derived default (time scales follow N/J)."""
        scale = self.N / self.J
        if self.t_max is None:
            self.t_max = 0.5 * scale
        if self.tau1 is None:
            self.tau1 = 0.1 * scale
        if self.tau2 is None:
            self.tau2 = 0.5 * scale
        if self.fit_tau2 is None:
            self.fit_tau2 = 0.35 * scale
        if self.T is None:
            self.T = 0.5 * scale
        return self

    def validate(self):
        if self.N < 2:
            raise ConfigError("N: system needs at least 2 sites")
        if self.N_b < self.N:
            raise ConfigError(f"N_b: lead length {self.N_b} violates the N_b >= N rule (N = {self.N})")
        if self.J <= 0:
            raise ConfigError("J: hopping must be positive")
        if self.prep not in _PREPS:
            raise ConfigError(f"prep: expected one of {_PREPS}, got {self.prep!r}")
        if self.prep == "bits":
            if self.bits is None or len(self.bits) != self.N:
                raise ConfigError(f"bits: explicit preparation needs exactly N = {self.N} bits")
            if any(b not in (0, 1) for b in self.bits):
                raise ConfigError("bits: entries must be 0 or 1")
        if self.engine not in _ENGINES:
            raise ConfigError(f"engine: expected one of {_ENGINES}, got {self.engine!r}")
        if self.dt <= 0:
            raise ConfigError("dt: time step must be positive")
        if self.t_max is not None and self.t_max < self.dt:
            raise ConfigError("t_max: must cover at least one step")
        if self.max_D < 1:
            raise ConfigError("max_D: bond cap must be >= 1")
        if self.gate_max_D is not None and self.gate_max_D < self.max_D:
            raise ConfigError("gate_max_D: per-gate cap cannot be below max_D")
        if self.weight_tol < 0:
            raise ConfigError("weight_tol: must be >= 0")
        if self.compress_every < 0 or self.compress_sweeps < 1:
            raise ConfigError("compress_every/compress_sweeps: invalid compression cadence")
        if self.measurement_stride < 1:
            raise ConfigError("measurement_stride: must be >= 1")
        if self.checkpoint_stride < 0:
            raise ConfigError("checkpoint_stride: must be >= 0")
        if self.trotter_order not in (2, 4):
            raise ConfigError("trotter_order: supported orders are 2 and 4")
        if self.trotter_scheme not in _SCHEMES:
            raise ConfigError(f"trotter_scheme: expected one of {_SCHEMES}")
        if self.tau1 is not None and self.tau2 is not None and self.T is not None:
            if not 0 < self.tau1 < self.tau2 <= self.T:
                raise ConfigError("tau1/tau2/T: must satisfy 0 < tau1 < tau2 <= T")
        if self.gs_max_D < 1 or self.gs_max_sweeps < 1 or self.gs_energy_tol <= 0:
            raise ConfigError("gs_max_D/gs_max_sweeps/gs_energy_tol: invalid ground-state settings")
        return self


@dataclass
class SweepConfig:
    base: RunConfig
    N_values: list = field(default_factory=list)
    Jz_values: list = field(default_factory=list)
    lead_rule: str = "equal"
    workers: int = 1

    def validate(self):
        if not self.N_values or not self.Jz_values:
            raise ConfigError("sweep.N_values/sweep.Jz_values: axes must be non-empty")
        if self.lead_rule not in _LEAD_RULES:
            raise ConfigError(f"sweep.lead_rule: expected one of {_LEAD_RULES}")
        if self.workers < 1:
            raise ConfigError("sweep.workers: must be >= 1")
        for n in self.N_values:
            if not isinstance(n, int) or n < 2:
                raise ConfigError(f"sweep.N_values: invalid system size {n!r}")
        return self

    def lead_length(self, N: int) -> int:
        return N if self.lead_rule == "equal" else 2 * N

    def points(self):
        """Grid points in deterministic (N, Jz) order."""
        for n in self.N_values:
            for jz in self.Jz_values:
                yield n, jz

    def point_config(self, N: int, Jz: float) -> RunConfig:
        cfg = RunConfig(**{f.name: getattr(self.base, f.name) for f in fields(RunConfig)})
        cfg.N = N
        cfg.N_b = self.lead_length(N)
        cfg.Jz = Jz
        # re-derive the time scales for this point
        cfg.t_max = None
        cfg.tau1 = cfg.tau2 = cfg.fit_tau2 = cfg.T = None
        cfg.label = f"{self.base.label}_N{N}_Jz{Jz:g}"
        cfg.materialize().validate()
        return cfg


def _coerce(key, value, kind):
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        return value
    raise AssertionError(kind)


_RUN_KEY_KINDS = {
    "N": "int", "N_b": "int", "max_D": "int", "gate_max_D": "int?",
    "compress_every": "int", "compress_sweeps": "int", "measurement_stride": "int",
    "checkpoint_stride": "int", "trotter_order": "int", "gs_max_D": "int",
    "gs_max_sweeps": "int", "seed": "int",
    "J": "float", "Jz": "float", "junction_coupling": "float?", "dt": "float",
    "t_max": "float?", "weight_tol": "float", "compress_tol": "float",
    "alarm_factor": "float", "tau1": "float?", "tau2": "float?",
    "fit_tau2": "float?", "T": "float?", "gs_energy_tol": "float",
    "alpha_ballistic_tol": "float", "revival_threshold": "float",
    "prep": "str", "engine": "str", "trotter_scheme": "str",
    "output_dir": "str", "label": "str",
    "bits": "bits",
}


def _parse_run_keys(doc: dict, prefix: str = "") -> RunConfig:
    cfg = RunConfig()
    for key, value in doc.items():
        path = f"{prefix}{key}"
        if key == "config_sha256":  # present in echoed configs; recomputed on use
            continue
        if key not in _RUN_KEY_KINDS:
            raise ConfigError(f"{path}: unknown key")
        kind = _RUN_KEY_KINDS[key]
        if kind == "bits":
            if value is not None and (
                not isinstance(value, list) or any(b not in (0, 1) for b in value)
            ):
                raise ConfigError(f"{path}: expected a list of 0/1 values")
            setattr(cfg, key, value)
            continue
        optional = kind.endswith("?")
        base_kind = kind.rstrip("?")
        if value is None:
            if not optional:
                raise ConfigError(f"{path}: null is not allowed here")
            setattr(cfg, key, None)
            continue
        setattr(cfg, key, _coerce(path, value, base_kind))
    return cfg


def parse_config(text: str):
    """Parse a JSON config into a validated RunConfig or SweepConfig."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected a JSON object")
    if "sweep" in doc:
        sweep_doc = doc["sweep"]
        if not isinstance(sweep_doc, dict):
            raise ConfigError("sweep: expected an object")
        base = _parse_run_keys({k: v for k, v in doc.items() if k != "sweep"})
        sweep = SweepConfig(base=base)
        for key, value in sweep_doc.items():
            path = f"sweep.{key}"
            if key == "N_values":
                if not isinstance(value, list):
                    raise ConfigError(f"{path}: expected a list")
                sweep.N_values = value
            elif key == "Jz_values":
                if not isinstance(value, list) or any(
                    isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
                ):
                    raise ConfigError(f"{path}: expected a list of numbers")
                sweep.Jz_values = [float(v) for v in value]
            elif key == "lead_rule":
                sweep.lead_rule = _coerce(path, value, "str")
            elif key == "workers":
                sweep.workers = _coerce(path, value, "int")
            else:
                raise ConfigError(f"{path}: unknown key")
        sweep.validate()
        # every grid point must itself be valid
        for n, jz in sweep.points():
            sweep.point_config(n, jz)
        return sweep
    cfg = _parse_run_keys(doc)
    cfg.materialize().validate()
    return cfg


def effective_dict(cfg) -> dict:
    """Fully-defaulted plain dict, ready for the JSON echo."""
    if isinstance(cfg, SweepConfig):
        out = effective_dict(cfg.base)
        out["sweep"] = {
            "N_values": list(cfg.N_values),
            "Jz_values": list(cfg.Jz_values),
            "lead_rule": cfg.lead_rule,
            "workers": cfg.workers,
        }
        return out
    out = {}
    for f in fields(RunConfig):
        out[f.name] = getattr(cfg, f.name)
    return out


def config_sha256(cfg) -> str:
    """Hash of the canonical effective config; embedded in every artifact."""
    canon = json.dumps(effective_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def emit_config_json(cfg) -> str:
    doc = effective_dict(cfg)
    doc["config_sha256"] = config_sha256(cfg)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
