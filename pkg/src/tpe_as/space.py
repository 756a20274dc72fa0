"""Bounded mixed hyperparameter domains and points within them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence, Union

import numpy as np

Value = Union[float, int, str]


class SpaceError(ValueError):
    """Raised for malformed domains or configs."""


@dataclass(frozen=True)
class ParamDomain:
    """One coordinate of the search domain.

    kind is one of "continuous", "integer", "categorical".  Continuous and
    integer domains carry closed bounds [lo, hi]; categorical domains carry
    an ordered tuple of choice labels.
    """

    name: str
    kind: str
    lo: float = 0.0
    hi: float = 0.0
    choices: tuple = ()

    def __post_init__(self):
        if self.kind in ("continuous", "integer"):
            if not self.lo < self.hi:
                raise SpaceError(f"{self.name}: lo must be strictly below hi")
            if self.kind == "integer" and (
                int(self.lo) != self.lo or int(self.hi) != self.hi
            ):
                raise SpaceError(f"{self.name}: integer bounds must be whole")
        elif self.kind == "categorical":
            if len(self.choices) < 2 or len(set(self.choices)) != len(self.choices):
                raise SpaceError(f"{self.name}: need >= 2 distinct choices")
        else:
            raise SpaceError(f"{self.name}: unknown kind {self.kind!r}")

    @property
    def is_numeric(self) -> bool:
        return self.kind in ("continuous", "integer")

    def contains(self, value: Value) -> bool:
        if self.kind == "continuous":
            return isinstance(value, (int, float)) and self.lo <= value <= self.hi
        if self.kind == "integer":
            return (
                isinstance(value, (int, np.integer))
                and not isinstance(value, bool)
                and self.lo <= value <= self.hi
            )
        return value in self.choices

    def width(self) -> float:
        return self.hi - self.lo

    def uniform_density(self) -> float:
        """Density (or pmf) of the uniform distribution over this domain."""
        if self.kind == "continuous":
            return 1.0 / (self.hi - self.lo)
        if self.kind == "integer":
            return 1.0 / (int(self.hi) - int(self.lo) + 1)
        return 1.0 / len(self.choices)


@dataclass(frozen=True)
class ParamSpace:
    """Ordered collection of domains; the search space."""

    domains: tuple

    def __post_init__(self):
        if len(self.domains) < 1:
            raise SpaceError("space needs at least one domain")
        names = [d.name for d in self.domains]
        if len(set(names)) != len(names):
            raise SpaceError("domain names must be unique")

    @property
    def m(self) -> int:
        return len(self.domains)

    def to_json(self) -> str:
        docs = []
        for d in self.domains:
            if d.kind == "categorical":
                docs.append({"name": d.name, "kind": d.kind, "choices": list(d.choices)})
            else:
                docs.append({"name": d.name, "kind": d.kind, "lo": d.lo, "hi": d.hi})
        return json.dumps(docs, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ParamSpace":
        docs = json.loads(text)
        domains = []
        for doc in docs:
            if doc["kind"] == "categorical":
                domains.append(
                    ParamDomain(doc["name"], "categorical", choices=tuple(doc["choices"]))
                )
            else:
                domains.append(ParamDomain(doc["name"], doc["kind"], doc["lo"], doc["hi"]))
        return cls(tuple(domains))


@dataclass(frozen=True)
class Config:
    """A point in a ParamSpace: one value per domain, in domain order."""

    values: tuple

    def as_dict(self, space: ParamSpace) -> dict:
        return {d.name: v for d, v in zip(space.domains, self.values)}

    def to_json(self, space: ParamSpace) -> str:
        return json.dumps(self.as_dict(space))

    @classmethod
    def from_dict(cls, space: ParamSpace, doc: dict) -> "Config":
        values = []
        for d in space.domains:
            if d.name not in doc:
                raise SpaceError(f"missing value for {d.name}")
            v = doc[d.name]
            if d.kind == "integer" and isinstance(v, float) and v == int(v):
                v = int(v)
            values.append(v)
        return cls(tuple(values))


@dataclass(frozen=True)
class Violation:
    index: int
    name: str
    reason: str


def validate(space: ParamSpace, config: Config) -> list:
    """Return a list of violations; empty means the config is valid."""
    if len(config.values) != space.m:
        return [
            Violation(-1, "<space>", f"expected {space.m} values, got {len(config.values)}")
        ]
    out = []
    for i, (d, v) in enumerate(zip(space.domains, config.values)):
        if not d.contains(v):
            out.append(Violation(i, d.name, f"value {v!r} outside {d.kind} domain"))
    return out


def require_valid(space: ParamSpace, config: Config) -> None:
    violations = validate(space, config)
    if violations:
        raise SpaceError("; ".join(f"{v.name}: {v.reason}" for v in violations))


def sample_uniform(space: ParamSpace, rng: np.random.Generator) -> Config:
    """Draw each coordinate independently uniform over its domain."""
    values = []
    for d in space.domains:
        if d.kind == "continuous":
            values.append(float(rng.uniform(d.lo, d.hi)))
        elif d.kind == "integer":
            values.append(int(rng.integers(int(d.lo), int(d.hi) + 1)))
        else:
            values.append(d.choices[int(rng.integers(len(d.choices)))])
    return Config(tuple(values))


def uniform_density(space: ParamSpace) -> float:
    """Joint density of a uniform draw over the whole space."""
    out = 1.0
    for d in space.domains:
        out *= d.uniform_density()
    return out
