"""Run configuration: a flat ``key = value`` file merged with command flags."""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, fields

from .errors import ConfigError
from .hermite_core import MAX_NODES

#: Keys that only decide where output goes; they do not enter the hash.
OUTPUT_KEYS = ("out", "csv")
PRESETS = ("small", "medium", "large")
MAX_TIME_STEPS = 4096
MAX_DEGREE = 60


@dataclass
class RunConfig:
    """``None`` means the command picks its documented default."""

    n: int = 1
    degree: int | None = None
    nodes: int | None = None
    time_steps: int | None = None
    seed: int = 0
    p: float | None = None
    q: float | None = None
    r: float | None = None
    z_re: float = -0.5
    z_im: float = 0.0
    eps_t: float = 1e-3
    tol: float | None = None
    trials: int = 20
    preset: str = "small"
    out: str | None = None
    csv: str | None = None

    # -- serialisation -------------------------------------------------
    def to_text(self, include_output: bool = True) -> str:
        lines = []
        for f in fields(self):
            if not include_output and f.name in OUTPUT_KEYS:
                continue
            lines.append(f"{f.name} = {_encode(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls.from_mapping(parse_text(text))

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        kinds = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in kinds:
                raise ConfigError(f"unknown configuration key {key!r}")
            kwargs[key] = _decode(key, raw, kinds[key])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {k: (str(v) if isinstance(v, float) and not math.isfinite(v) else v)
                for k, v in asdict(self).items()}

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text(include_output=False).encode()).hexdigest()[:16]

    def merged(self, overrides: dict) -> "RunConfig":
        data = asdict(self)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**data)

    def validate(self) -> "RunConfig":
        if self.n not in (1, 2, 3):
            raise ConfigError(f"n must be 1, 2 or 3, got {self.n}")
        if self.degree is not None and not (0 <= self.degree <= MAX_DEGREE):
            raise ConfigError(f"degree must lie in [0, {MAX_DEGREE}], got {self.degree}")
        if self.nodes is not None and not (1 <= self.nodes <= MAX_NODES):
            raise ConfigError(f"nodes must lie in [1, {MAX_NODES}], got {self.nodes}")
        if self.time_steps is not None and not (2 <= self.time_steps <= MAX_TIME_STEPS):
            raise ConfigError(f"time_steps must lie in [2, {MAX_TIME_STEPS}], got {self.time_steps}")
        if not (self.eps_t > 0 and math.isfinite(self.eps_t)):
            raise ConfigError(f"eps_t must be positive, got {self.eps_t}")
        if self.tol is not None and not (self.tol > 0):
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.preset not in PRESETS:
            raise ConfigError(f"preset must be one of {PRESETS}, got {self.preset!r}")
        for name in ("p", "q", "r"):
            v = getattr(self, name)
            if v is not None and not (v >= 1.0):
                raise ConfigError(f"{name} must be >= 1, got {v}")
        if not (math.isfinite(self.z_re) and math.isfinite(self.z_im)):
            raise ConfigError("z must be finite")
        return self


def _encode(v) -> str:
    if v is None:
        return "auto"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _decode(key: str, raw, kind):
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    if raw == "auto":
        return None
    kind = str(kind)
    try:
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key} = {raw!r}") from exc
    return raw


def parse_text(text: str) -> dict:
    """``key = value`` per line; ``#`` starts a comment; dashes in keys are
    accepted as underscores."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return RunConfig.from_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
