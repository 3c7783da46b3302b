"""Flat key-value run configuration.

The file is a flat TOML document (no tables). Bare words are accepted for
string values, so ``model = er`` works as well as ``model = "ER"``. Lists
may be written as TOML arrays or comma separated words. Every problem found
is reported at once through :class:`~netperturb.errors.ConfigError`.
"""
from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .coincidence import CoincidenceParams
from .errors import ConfigError
from .experiments import (DEFAULT_SIZES, EXPERIMENTS, INITIAL_MODES, REWIRING_MODES,
                          ExperimentConfig)
from .generators import DEFAULT_EPSILON, MODELS, lattice_side
from .hcluster import LINKAGES
from .signals import Thresholds

PROFILES = ("paper", "desk")
AREAS = ("normalized", "raw")
BASELINES = ("min", "initial")

# realizations per experiment when the config leaves Q unset
_DEFAULT_Q = {
    "paper": {"SIZE": 1000, "REMOVAL": 50, "REWIRING": 50},
    "desk": {"SIZE": 50, "REMOVAL": 50, "REWIRING": 50},
}
_DEFAULT_STRIDE = {"paper": 1, "desk": 5}


@dataclass(frozen=True)
class RunConfig:
    """A batch of (model, experiment) cells sharing one master seed."""

    models: tuple = MODELS
    experiments: tuple = EXPERIMENTS
    sizes: tuple = DEFAULT_SIZES
    n: int = 100
    avg_degree: float = 5.7
    steps: int = 100
    realizations: int | None = None
    seed: int = 0
    stride: int | None = None
    epsilon: float = DEFAULT_EPSILON
    rewiring: str = "uniform"
    initial: str | None = None
    ring_only: bool = False
    baseline: str = "min"
    area: str = "normalized"
    linkage: str = "average"
    delta: float = 0.0
    D: float = 5.0
    E_exp: float = 1.0
    monotonic: float = Thresholds.monotonic
    magnitude_rel: float = Thresholds.magnitude_rel
    dispersion: float = Thresholds.dispersion
    profile: str = "paper"
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def q_for(self, experiment: str) -> int:
        if self.realizations is not None:
            return self.realizations
        return _DEFAULT_Q[self.profile][experiment]

    def stride_for(self, experiment: str) -> int:
        if experiment == "SIZE":
            return 1
        return self.stride if self.stride is not None else _DEFAULT_STRIDE[self.profile]

    def experiment_config(self, model: str, experiment: str) -> ExperimentConfig:
        return ExperimentConfig(
            experiment=experiment, model=model, sizes=tuple(self.sizes), n=self.n,
            avg_degree=self.avg_degree, steps=self.steps,
            realizations=self.q_for(experiment), seed=self.seed,
            stride=self.stride_for(experiment), epsilon=self.epsilon,
            rewiring=self.rewiring, initial=self.initial, ring_only=self.ring_only)

    def cells(self) -> list[tuple[str, str]]:
        """(model, experiment) pairs in canonical order."""
        return [(m, e) for e in EXPERIMENTS if e in self.experiments
                for m in MODELS if m in self.models]

    @property
    def thresholds(self) -> Thresholds:
        return Thresholds(monotonic=self.monotonic, magnitude_rel=self.magnitude_rel,
                          dispersion=self.dispersion)

    @property
    def coincidence_params(self) -> CoincidenceParams:
        return CoincidenceParams(self.delta, self.D, self.E_exp)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        d["models"] = list(self.models)
        d["experiments"] = list(self.experiments)
        d["sizes"] = list(self.sizes)
        return d

    def to_toml(self) -> str:
        lines = []
        for k, v in self.to_dict().items():
            if v is not None:
                lines.append(f"{k} = {json.dumps(v)}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form of the resolved config."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


_ALIASES = {
    "model": "models", "experiment": "experiments", "size": "sizes", "s": "sizes",
    "q": "realizations", "k": "avg_degree", "a_k": "avg_degree", "master_seed": "seed",
    "access_mode": "access_mode", "e": "E_exp", "d": "D",
}
_FIELDS = {f for f in RunConfig.__dataclass_fields__ if f != "extra"}


def _parse_value(raw: str):
    try:
        return tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        pass
    if "," in raw:
        return [w.strip() for w in raw.split(",") if w.strip()]
    return raw


def parse_flat(text: str) -> tuple[dict, list[str]]:
    """Parse ``key = value`` lines into a dict; returns (values, errors)."""
    values, errors = {}, []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith("["):
            errors.append(f"line {lineno}: tables are not allowed in a flat config")
            continue
        if "=" not in s:
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        key, raw = (p.strip() for p in s.split("=", 1))
        if raw.startswith(("'", '"', "[")) or "#" not in raw:
            val = _parse_value(raw)
        else:
            val = _parse_value(raw.split("#", 1)[0].strip())
        if key in values:
            errors.append(f"line {lineno}: duplicate key {key!r}")
        values[key] = val
    return values, errors


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_real(v):
    return (isinstance(v, (int, float)) and not isinstance(v, bool)
            and math.isfinite(float(v)))


def config_from_mapping(values: dict, errors: list[str] | None = None) -> RunConfig:
    """Validate a mapping of config keys and resolve defaults.

    Raises :class:`ConfigError` listing every violation.
    """
    errors = list(errors or [])
    kw = {}
    for key, val in values.items():
        if val is None:
            continue
        name = _ALIASES.get(key.lower(), key) if key not in _FIELDS else key
        if name == "access_mode":
            if val not in ("full", "ring"):
                errors.append(f"access_mode must be 'full' or 'ring', got {val!r}")
            else:
                kw["ring_only"] = val == "ring"
            continue
        if name not in _FIELDS:
            errors.append(f"unknown key {key!r}")
            continue
        kw[name] = val

    def reject(name, msg):
        errors.append(msg)
        kw.pop(name, None)

    def enum_list(name, allowed):
        if name not in kw:
            return
        items = [str(x).upper() for x in _as_list(kw[name])]
        if not items or any(x not in allowed for x in items):
            return reject(name, f"{name}: expected values from {allowed}, got {kw[name]!r}")
        kw[name] = tuple(x for x in allowed if x in items)

    enum_list("models", MODELS)
    enum_list("experiments", EXPERIMENTS)
    for name, allowed in (("rewiring", REWIRING_MODES), ("initial", INITIAL_MODES),
                          ("baseline", BASELINES), ("area", AREAS),
                          ("linkage", LINKAGES), ("profile", PROFILES)):
        if name in kw and kw[name] not in allowed:
            reject(name, f"{name}: expected one of {allowed}, got {kw[name]!r}")
    for name in ("n", "steps", "realizations", "seed", "stride"):
        if name in kw and not _is_int(kw[name]):
            reject(name, f"{name}: expected an integer, got {kw[name]!r}")
    for name in ("avg_degree", "epsilon", "delta", "D", "E_exp", "monotonic",
                 "magnitude_rel", "dispersion"):
        if name in kw and not _is_real(kw[name]):
            reject(name, f"{name}: expected a number, got {kw[name]!r}")
        elif name in kw:
            kw[name] = float(kw[name])
    if "ring_only" in kw and not isinstance(kw["ring_only"], bool):
        reject("ring_only", f"ring_only: expected true or false, got {kw['ring_only']!r}")
    if "sizes" in kw:
        sizes = _as_list(kw["sizes"])
        if not sizes or not all(_is_int(s) for s in sizes):
            reject("sizes", f"sizes: expected a non-empty list of integers, got {kw['sizes']!r}")
        else:
            kw["sizes"] = tuple(sizes)

    cfg = RunConfig(**kw)
    checks = [
        (cfg.realizations is None or cfg.realizations >= 1, "realizations (Q) must be at least 1"),
        (cfg.stride is None or cfg.stride >= 1, "stride must be at least 1"),
        (cfg.steps >= 0, "steps must be non-negative"),
        (cfg.n >= 2, "n must be at least 2"),
        (cfg.avg_degree > 0, "avg_degree must be positive"),
        (cfg.epsilon >= 0, "epsilon must be non-negative"),
        (0 <= cfg.seed < 2 ** 64, "seed must be an unsigned 64-bit integer"),
        (0 < cfg.monotonic <= 1, "monotonic must lie in (0, 1]"),
        (cfg.magnitude_rel >= 0, "magnitude_rel must be non-negative"),
        (cfg.dispersion > 0, "dispersion must be positive"),
        (cfg.delta >= 0 and cfg.D >= 1 and cfg.E_exp >= 1, "need delta >= 0, D >= 1, E_exp >= 1"),
    ]
    errors += [msg for ok, msg in checks if not ok]
    if "SIZE" in cfg.experiments:
        if any(s < 2 for s in cfg.sizes):
            errors.append("sizes must all be at least 2")
        if list(cfg.sizes) != sorted(set(cfg.sizes)):
            errors.append("sizes must be strictly increasing")
        if "GEO" in cfg.models:
            bad = [s for s in cfg.sizes if lattice_side(s) is None]
            if bad:
                errors.append(f"GEO size(s) {bad} not a perfect square")
    if "GEO" in cfg.models and set(cfg.experiments) - {"SIZE"} and lattice_side(cfg.n) is None:
        errors.append(f"GEO n={cfg.n} not a perfect square")
    if cfg.n >= 2 and cfg.avg_degree > cfg.n - 1:
        errors.append(f"avg_degree {cfg.avg_degree} exceeds n - 1 = {cfg.n - 1}")
    if errors:
        raise ConfigError(errors)
    return cfg


def validate_config(text: str) -> RunConfig:
    """Parse and validate config text; raise ConfigError with all problems."""
    values, errors = parse_flat(text)
    return config_from_mapping(values, errors)


def load_config(path) -> RunConfig:
    """Read a flat config file, or a ``meta.json`` written by a previous run."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        data = json.loads(text)
        return config_from_mapping(data.get("config", data))
    return validate_config(text)
