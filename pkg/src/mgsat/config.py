"""Run configuration: bounds, cost order, axiom toggles, solver budgets, seed."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .encoder import GROUPS, EncoderConfig
from .parser import Bounds, RelationMode

OBJECTIVES = {
    "entries": "min",
    "features": "min",
    "lexicon_features": "min",
    "parse_features": "min",
    "distinct_selectors": "max",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    categories: int = 5
    licensing: tuple[str, ...] = ("l", "r")
    max_feats: int = 3
    max_phrasal_moves: int = 3
    max_head_moves: int = 1
    covert_budget: int = 1
    covert_root: bool = False
    max_leaves: int = 8
    max_items: int = 24
    relation_mode: str = "strict"
    cost: tuple[str, ...] = ("entries", "features", "distinct_selectors")
    disabled: tuple[str, ...] = ()
    symmetry_breaking: bool = False
    samples: int = 1
    conflict_budget: int | None = None
    parse_cap: int = 10_000
    seed: int = 0
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for name in ("categories", "max_feats", "max_leaves", "max_items", "samples", "parse_cap"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        for name in ("max_phrasal_moves", "max_head_moves", "covert_budget"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must not be negative")
        if self.covert_budget > 1:
            raise ConfigError("covert_budget above 1 is not supported")
        if self.conflict_budget is not None and self.conflict_budget < 1:
            raise ConfigError("conflict_budget must be positive")
        if not self.licensing:
            raise ConfigError("licensing categories must not be empty")
        try:
            RelationMode(self.relation_mode)
        except ValueError:
            raise ConfigError(f"relation_mode must be one of {[m.value for m in RelationMode]}") from None
        bad = [c for c in self.cost if c not in OBJECTIVES]
        if bad:
            raise ConfigError(f"unknown objective(s) {bad}; choose from {sorted(OBJECTIVES)}")
        bad = [g for g in self.disabled if g.split(":", 1)[0] not in GROUPS]
        if bad:
            raise ConfigError(f"unknown axiom group(s) {bad}; choose from {list(GROUPS)}")
        object.__setattr__(self, "licensing", tuple(self.licensing))
        object.__setattr__(self, "cost", tuple(self.cost))
        object.__setattr__(self, "disabled", tuple(self.disabled))

    @property
    def mode(self) -> RelationMode:
        return RelationMode(self.relation_mode)

    def encoder(self) -> EncoderConfig:
        return EncoderConfig(categories=self.categories, licensing=self.licensing, max_feats=self.max_feats,
                             max_phrasal_moves=self.max_phrasal_moves, max_head_moves=self.max_head_moves,
                             covert_budget=self.covert_budget, covert_root=self.covert_root,
                             max_leaves=self.max_leaves,
                             max_items=self.max_items, relation_mode=self.mode,
                             disabled=frozenset(self.disabled), symmetry_breaking=self.symmetry_breaking)

    def bounds(self) -> Bounds:
        return Bounds(max_phrasal_moves=self.max_phrasal_moves, max_head_moves=self.max_head_moves,
                      max_feats=self.max_feats, covert_budget=self.covert_budget, covert_root=self.covert_root)

    def replace(self, **changes) -> "Config":
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("extra")
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        names = {f.name for f in dataclasses.fields(cls)} - {"extra"}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "Config":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: line {e.lineno}: {e.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return cls.from_dict(data)
