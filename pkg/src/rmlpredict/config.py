"""Run configuration: a JSON file whose keys may be overridden from the command line."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .ahocorasick import Gazetteer
from .functions import FALSE_TOKENS, TRUE_TOKENS
from .rml import Namespaces
from .templates import PredictionOptions


class ConfigError(ValueError):
    pass


_NAMESPACE = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:[^\s<>\"{}|\\^`]*[/#:]")


@dataclass(frozen=True)
class RunConfig:
    namespaces: Namespaces = field(default_factory=Namespaces)
    bool_length_threshold: float = 3.5
    true_tokens: tuple[str, ...] = TRUE_TOKENS
    false_tokens: tuple[str, ...] = FALSE_TOKENS
    day_first: bool = False
    matching_threshold: float = 0
    boolean_display: bool = True
    gazetteer: str | None = None  # path to a JSON object of label -> IRI
    out_dir: str = "out"

    def __post_init__(self):
        if self.bool_length_threshold < 0 or self.matching_threshold < 0:
            raise ConfigError("thresholds must be non-negative")
        for f in fields(Namespaces):
            value = getattr(self.namespaces, f.name)
            if not _NAMESPACE.fullmatch(value):
                raise ConfigError(f"namespace {f.name!r} is not an IRI prefix ending in '/', '#' or ':': {value!r}")
        overlap = {t.casefold() for t in self.true_tokens} & {t.casefold() for t in self.false_tokens}
        if overlap:
            raise ConfigError(f"tokens in both boolean lexicons: {sorted(overlap)}")

    def load_gazetteer(self) -> Gazetteer | None:
        if self.gazetteer is None:
            return None
        try:
            entries = json.loads(Path(self.gazetteer).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read gazetteer {self.gazetteer}: {exc}") from exc
        if not isinstance(entries, dict) or not all(isinstance(k, str) and isinstance(v, str) for k, v in entries.items()):
            raise ConfigError("gazetteer must be a JSON object mapping labels to IRIs")
        try:
            return Gazetteer(entries)
        except ValueError as exc:
            raise ConfigError(f"gazetteer: {exc}") from exc

    def prediction_options(self) -> PredictionOptions:
        return PredictionOptions(
            bool_length_threshold=self.bool_length_threshold,
            true_tokens=self.true_tokens,
            false_tokens=self.false_tokens,
            boolean_display=self.boolean_display,
            day_first=self.day_first,
            entity_namespace=self.namespaces.entity,
            gazetteer=self.load_gazetteer(),
        )

    def with_overrides(self, **overrides) -> "RunConfig":
        ns = {k[len("namespace_"):]: v for k, v in overrides.items() if k.startswith("namespace_") and v is not None}
        rest = {k: v for k, v in overrides.items() if not k.startswith("namespace_") and v is not None}
        try:
            return replace(self, namespaces=replace(self.namespaces, **ns), **rest)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


_KEYS = {f.name for f in fields(RunConfig)}


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(data)
    if "namespaces" in kwargs:
        ns = kwargs["namespaces"]
        allowed = {f.name for f in fields(Namespaces)}
        if not isinstance(ns, dict) or set(ns) - allowed:
            raise ConfigError(f"namespaces must be an object with keys {sorted(allowed)}")
        kwargs["namespaces"] = Namespaces(**ns)
    for key in ("true_tokens", "false_tokens"):
        if key in kwargs:
            if not isinstance(kwargs[key], list) or not all(isinstance(t, str) for t in kwargs[key]):
                raise ConfigError(f"{key} must be a list of strings")
            kwargs[key] = tuple(kwargs[key])
    for key in ("bool_length_threshold", "matching_threshold"):
        if key in kwargs and (isinstance(kwargs[key], bool) or not isinstance(kwargs[key], (int, float))):
            raise ConfigError(f"{key} must be a number")
    for key in ("day_first", "boolean_display"):
        if key in kwargs and not isinstance(kwargs[key], bool):
            raise ConfigError(f"{key} must be true or false")
    return RunConfig(**kwargs)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data)
