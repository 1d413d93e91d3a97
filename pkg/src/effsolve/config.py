"""Settings bundle and JSON config loading.

Precedence: built-in defaults < config file < explicit overrides (CLI flags).
A config file may hold any of the sections ``memory``, ``retrieval``,
``engine`` and ``gauss``; unknown keys are an error.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .domains.gauss import GaussConfig
from .engine import EngineConfig
from .memory import ActivationParams
from .retrieval import RetrievalConfig

SECTIONS = {
    "memory": ActivationParams,
    "retrieval": RetrievalConfig,
    "engine": EngineConfig,
    "gauss": GaussConfig,
}


@dataclass(frozen=True)
class Settings:
    memory: ActivationParams = field(default_factory=ActivationParams)
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    gauss: GaussConfig = field(default_factory=GaussConfig)

    def engine_config(self, **overrides: Any) -> EngineConfig:
        overrides.setdefault("retrieval", self.retrieval)
        return dataclasses.replace(self.engine, **overrides)

    def to_dict(self) -> dict:
        out = {}
        for name in SECTIONS:
            section = dataclasses.asdict(getattr(self, name))
            section.pop("retrieval", None)
            out[name] = section
        return out


def _build(cls, values: Mapping[str, Any], where: str):
    known = {f.name for f in dataclasses.fields(cls)} - {"retrieval"}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown keys in config section {where!r}: {sorted(unknown)}")
    return cls(**values)


def settings_from_dict(data: Mapping[str, Any]) -> Settings:
    unknown = set(data) - set(SECTIONS)
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    parts = {name: _build(cls, data.get(name, {}), name) for name, cls in SECTIONS.items()}
    return Settings(**parts)


def load_settings(path: str | Path | None = None, engine_overrides: Mapping[str, Any] | None = None) -> Settings:
    data: dict = {}
    if path is not None:
        data = json.loads(Path(path).read_text())
        if not isinstance(data, dict):
            raise ValueError(f"config {path} must hold a JSON object")
    settings = settings_from_dict(data)
    overrides = {k: v for k, v in (engine_overrides or {}).items() if v is not None}
    if overrides:
        settings = dataclasses.replace(settings, engine=dataclasses.replace(settings.engine, **overrides))
    return settings
