"""YAML run configuration with field- and line-level validation.

A config is a flat mapping. Model keys: ``n_nodes``, ``m``, ``k0``, ``alpha``
(required), ``m0`` (default 0), ``t0`` (default 1). Ensemble keys: ``runs``
(1), ``master_seed`` (0), ``steps`` (1000), ``record_every`` (1). Optional
``boosted`` maps node index to an initial activity overriding ``k0``.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import yaml

from .errors import ConfigError, DomainError
from .model import ModelParams
from .simulator import EnsembleSpec

PARAM_FIELDS = {
    "n_nodes": (int, None),
    "m": (int, None),
    "k0": (float, None),
    "alpha": (float, None),
    "m0": (int, 0),
    "t0": (float, 1.0),
}
SPEC_FIELDS = {
    "runs": (int, 1),
    "master_seed": (int, 0),
    "steps": (int, 1000),
    "record_every": (int, 1),
}
CONSTRAINTS = {
    "n_nodes": (lambda v: v >= 2, "n_nodes >= 2"),
    "m": (lambda v: v >= 1, "m >= 1"),
    "m0": (lambda v: v >= 0, "m0 >= 0"),
    "k0": (lambda v: v >= 0, "k0 >= 0"),
    "t0": (lambda v: v > 0, "t0 > 0"),
    "alpha": (lambda v: v >= 0, "alpha >= 0"),
    "runs": (lambda v: v >= 1, "runs >= 1"),
    "steps": (lambda v: v >= 1, "steps >= 1"),
    "record_every": (lambda v: v >= 1, "record_every >= 1"),
    "master_seed": (lambda v: 0 <= v < 2**64, "0 <= master_seed < 2**64"),
}
EXTRA_FIELDS = {"boosted"}


@dataclass
class RunConfig:
    params: ModelParams
    spec: EnsembleSpec
    boosted: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = self.params.to_dict()
        out.update(
            runs=self.spec.runs,
            master_seed=int(self.spec.master_seed),
            steps=self.spec.steps,
            record_every=self.spec.record_every,
        )
        if self.boosted:
            out["boosted"] = {int(k): float(v) for k, v in sorted(self.boosted.items())}
        return out


def _key_lines(text: str) -> dict:
    try:
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"malformed document: {exc}", line=mark.line + 1 if mark else None) from exc
    if node is None:
        return {}
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("top level must be a mapping", line=node.start_mark.line + 1)
    return {k.value: k.start_mark.line + 1 for k, _ in node.value}


def _coerce(name: str, kind: type, value: Any, line: Optional[int]):
    if isinstance(value, bool):
        raise ConfigError(f"expected {kind.__name__}, got boolean", field=name, line=line)
    if kind is int:
        if isinstance(value, numbers.Integral):
            return int(value)
        raise ConfigError(f"expected integer, got {value!r}", field=name, line=line)
    if isinstance(value, numbers.Real):
        return float(value)
    raise ConfigError(f"expected number, got {value!r}", field=name, line=line)


def _parse_boosted(value, line):
    if value is None:
        return {}
    if not isinstance(value, Mapping):
        raise ConfigError("expected a mapping of node index to activity", field="boosted", line=line)
    out = {}
    for node, activity in value.items():
        if isinstance(node, str) and node.strip().isdigit():
            node = int(node)  # JSON object keys (manifest replay) are strings
        node = _coerce("boosted", int, node, line)
        out[node] = _coerce("boosted", float, activity, line)
        if out[node] < 0:
            raise ConfigError("boosted activities must be >= 0", field="boosted", line=line)
    return out


def config_from_mapping(data: Mapping, lines: Optional[Mapping] = None, overrides: Optional[Mapping] = None,
                        defaults: Optional[Mapping] = None) -> RunConfig:
    """Validate a mapping (plus flag overrides) into a :class:`RunConfig`.

    ``defaults`` fills keys absent from both ``data`` and ``overrides``.
    """
    lines = dict(lines or {})
    merged = dict(defaults or {})
    merged.update(data)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
            lines[key] = None
    known = set(PARAM_FIELDS) | set(SPEC_FIELDS) | EXTRA_FIELDS
    for key in merged:
        if key not in known:
            raise ConfigError(f"unknown key; expected one of {sorted(known)}", field=key, line=lines.get(key))
    values = {}
    for name, (kind, default) in {**PARAM_FIELDS, **SPEC_FIELDS}.items():
        line = lines.get(name)
        if name not in merged or merged[name] is None:
            if default is None:
                raise ConfigError("missing required field", field=name)
            values[name] = default
            continue
        value = _coerce(name, kind, merged[name], line)
        check, text = CONSTRAINTS[name]
        if not check(value):
            raise ConfigError(f"constraint {text} violated (got {value!r})", field=name, line=line)
        values[name] = value
    if values["m"] > values["n_nodes"]:
        raise ConfigError(
            f"constraint m <= n_nodes violated ({values['m']} > {values['n_nodes']})",
            field="m", line=lines.get("m"),
        )
    boosted = _parse_boosted(merged.get("boosted"), lines.get("boosted"))
    for node in boosted:
        if not 0 <= node < values["n_nodes"]:
            raise ConfigError(f"node {node} outside [0, n_nodes)", field="boosted", line=lines.get("boosted"))
    try:
        params = ModelParams(**{k: values[k] for k in PARAM_FIELDS})
        spec = EnsembleSpec(**{k: values[k] for k in SPEC_FIELDS})
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(params, spec, boosted)


def parse_config(text: str, overrides: Optional[Mapping] = None, defaults: Optional[Mapping] = None) -> RunConfig:
    lines = _key_lines(text)
    data = yaml.safe_load(text) or {}
    return config_from_mapping(data, lines, overrides, defaults)


def load_config(path, overrides=None, defaults=None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides, defaults)


def dump_config(config: RunConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=False)
