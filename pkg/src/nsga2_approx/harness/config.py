"""Experiment configuration: ``key=value`` files with ``#`` comments, overridable by CLI flags."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable, Mapping

from ..algorithms import Variant
from ..core import ConfigurationError
from ..variation import MatingScheme, MutationOp


class ConfigError(ConfigurationError):
    """Configuration problem; ``line`` is the 1-based line in the config file, if any."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if line is not None:
            where = f"{source or 'config'}:{line}: "
        elif source:
            where = f"{source}: "
        super().__init__(where + message)
        self.line = line


Window = tuple[int, int]


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for a Table-1 style experiment.

    Windows are 1-based generation ranges counted after ``t0``; for the
    steady-state variant they are scaled by ``N``.  ``safety_cap`` bounds the
    generations (iterations ``/ N`` for steady state) spent waiting for ``t0``.
    """

    n: int = 601
    pop_sizes: tuple[int, ...] = (301, 151, 76)
    variants: tuple[Variant, ...] = (Variant.CLASSIC, Variant.CURRENT_CD, Variant.STEADY_STATE)
    mating: MatingScheme = MatingScheme.FAIR
    steady_state_mating: MatingScheme = MatingScheme.RANDOM
    mutation: MutationOp = MutationOp.ONE_BIT
    runs: int = 20
    seed: int = 20230601
    windows: tuple[Window, ...] = ((1, 100), (3001, 3100))
    out: str = "results"
    workers: int = 1
    safety_cap: int = 1_000_000
    full_traces: bool = False
    trials: int = 1000

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if not self.pop_sizes or any(N < 1 for N in self.pop_sizes):
            raise ConfigError("pop_sizes must be a non-empty list of positive integers")
        if not self.variants:
            raise ConfigError("variants must be non-empty")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not self.windows:
            raise ConfigError("windows must be non-empty")
        for a, b in self.windows:
            if a < 1 or b < a:
                raise ConfigError(f"window {a}-{b}: need 1 <= start <= end")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.safety_cap < 1:
            raise ConfigError("safety_cap must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.steady_state_mating is MatingScheme.FAIR:
            raise ConfigError("steady_state_mating must be random or tournament")

    def mating_for(self, variant: Variant) -> MatingScheme:
        return self.steady_state_mating if variant is Variant.STEADY_STATE else self.mating

    def scale(self, variant: Variant, N: int) -> int:
        return N if variant is Variant.STEADY_STATE else 1

    @property
    def last_window_end(self) -> int:
        return max(b for _, b in self.windows)


def _int(text: str) -> int:
    return int(text.strip().replace("_", ""), 0)


def _int_list(text: str) -> tuple[int, ...]:
    items = [t for t in text.replace(" ", "").split(",") if t]
    if not items:
        raise ValueError("empty list")
    return tuple(_int(t) for t in items)


def _enum_list(enum_cls) -> Callable[[str], tuple]:
    def parse(text: str):
        items = [t.strip() for t in text.split(",") if t.strip()]
        if not items:
            raise ValueError("empty list")
        return tuple(enum_cls(t) for t in items)
    return parse


def _windows(text: str) -> tuple[Window, ...]:
    out = []
    for part in text.replace(" ", "").split(","):
        a, sep, b = part.partition("-")
        if not sep:
            raise ValueError(f"window {part!r} is not of the form start-end")
        out.append((_int(a), _int(b)))
    return tuple(out)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_PARSERS: dict[str, Callable[[str], Any]] = {
    "n": _int,
    "pop_sizes": _int_list,
    "variants": _enum_list(Variant),
    "mating": MatingScheme,
    "steady_state_mating": MatingScheme,
    "mutation": MutationOp,
    "runs": _int,
    "seed": _int,
    "windows": _windows,
    "out": str.strip,
    "workers": _int,
    "safety_cap": _int,
    "full_traces": _bool,
    "trials": _int,
}
assert set(_PARSERS) == {f.name for f in fields(ExperimentConfig)}


def parse_value(key: str, text: str) -> Any:
    if key not in _PARSERS:
        raise KeyError(key)
    return _PARSERS[key](text)


def read_config_file(path: str | Path) -> tuple[dict[str, Any], dict[str, int]]:
    """Parsed values and the line each key came from."""
    values: dict[str, Any] = {}
    lines: dict[str, int] = {}
    source = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc.strerror}", source=source) from None
    except UnicodeDecodeError:
        raise ConfigError("config file is not valid UTF-8", source=source) from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"expected key=value, got {line!r}", lineno, source)
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno, source)
        try:
            values[key] = parse_value(key, value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value.strip()!r} ({exc})", lineno, source) from None
        try:
            # every invariant involves one key, so checking it alone pins the line
            ExperimentConfig(**{key: values[key]})
        except ConfigError as exc:
            raise ConfigError(str(exc), lineno, source) from None
        lines[key] = lineno
    return values, lines


def parse_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> ExperimentConfig:
    """Defaults, then the file, then ``overrides`` (already-typed values or strings)."""
    values = read_config_file(path)[0] if path is not None else {}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _PARSERS:
            raise ConfigError(f"unknown setting {key!r}")
        if isinstance(value, str):
            try:
                value = parse_value(key, value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None
        values[key] = value
    return ExperimentConfig(**values)


def with_overrides(config: ExperimentConfig, **kwargs) -> ExperimentConfig:
    return replace(config, **{k: v for k, v in kwargs.items() if v is not None})


__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "read_config_file", "with_overrides"]
