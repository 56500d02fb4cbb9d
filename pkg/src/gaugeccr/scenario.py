"""Scenario files: parsing, validation and the analyses they request."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cech import SpaceError, SpaceModel, SpaceMorphism, SimplicialComplex, SimplicialMap, parse_space
from .exact_linear import Matrix, as_fraction, matrix_from_json
from .gauge_model import (
    BundleMorphism,
    BundleObject,
    CompatibilityError,
    ModelError,
    ModelScopeError,
    build_observable_model,
)

FIXTURE_DIR = Path(__file__).parent / "fixtures"


class ScenarioParseError(ValueError):
    """The file is not a well-formed scenario."""


class ScenarioValidationError(ValueError):
    """The scenario is well formed but mathematically inconsistent."""

    def __init__(self, kind: str, entity: str, message: str):
        super().__init__(f"{entity}: {message}")
        self.kind = kind
        self.entity = entity
        self.message = message


@dataclass
class Scenario:
    name: str
    objects: dict
    morphisms: dict
    analyses: list
    terminal: str | None = None
    description: str = ""
    digest: str = ""
    raw: dict = field(default_factory=dict, repr=False)


def canonical_digest(data: dict) -> str:
    text = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def resolve_path(ref: str, fixtures_dir: str | Path | None = None) -> Path:
    """A scenario path, or the name of a bundled fixture."""
    p = Path(ref)
    if p.exists():
        return p
    base = Path(fixtures_dir) if fixtures_dir else FIXTURE_DIR
    for cand in (base / ref, base / f"{ref}.json"):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"no scenario file or fixture named {ref!r}")


def bundled_fixtures(fixtures_dir: str | Path | None = None) -> list[str]:
    base = Path(fixtures_dir) if fixtures_dir else FIXTURE_DIR
    return sorted(p.stem for p in base.glob("*.json"))


def load_scenario(ref: str, fixtures_dir=None) -> Scenario:
    path = resolve_path(ref, fixtures_dir)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}: {exc}") from exc
    return parse_scenario(data, default_name=path.stem)


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ScenarioParseError(f"{where}: missing field {key!r}")
    return d[key]


def _parse_object(d: dict) -> BundleObject:
    name = _require(d, "name", "object")
    try:
        body = parse_space(_require(d, "space", name))
        space = SpaceModel(
            body,
            int(_require(d, "dim_m", name)),
            oriented=bool(d.get("oriented", True)),
            compact_cauchy=bool(d.get("compact_cauchy", False)),
            label=name,
        )
    except SpaceError as exc:
        kind = "unknown_constructor" if "unknown space constructor" in str(exc) else "invalid_space"
        raise ScenarioValidationError(kind, name, str(exc)) from exc
    rho = d.get("rho", "zero")
    if not isinstance(rho, str):
        try:
            rho = matrix_from_json(rho)
        except (ValueError, TypeError) as exc:
            raise ScenarioParseError(f"{name}: bad rho matrix") from exc
    try:
        obj = BundleObject(
            name, space, rho, as_fraction(d.get("q_squared", 1)), int(d.get("dyn_pairs", 0))
        )
        build_observable_model(obj)
    except ModelError as exc:
        kind = "shape_mismatch" if "shape" in str(exc) else "unresolvable_policy"
        raise ScenarioValidationError(kind, name, str(exc)) from exc
    except SpaceError as exc:
        raise ScenarioValidationError("invalid_space", name, str(exc)) from exc
    return obj


def _parse_morphism(d: dict, objects: dict) -> BundleMorphism:
    src_name, tgt_name = _require(d, "from", "morphism"), _require(d, "to", "morphism")
    name = d.get("name", f"{src_name}->{tgt_name}")
    for ref in (src_name, tgt_name):
        if ref not in objects:
            raise ScenarioValidationError("unknown_reference", name, f"unknown object {ref!r}")
    src, tgt = objects[src_name], objects[tgt_name]
    try:
        simplicial = None
        if "vertex_map" in d:
            if not isinstance(src.space.body, SimplicialComplex) or not isinstance(tgt.space.body, SimplicialComplex):
                raise SpaceError("vertex maps need triangulated objects")
            simplicial = SimplicialMap(src.space.body, tgt.space.body, tuple(d["vertex_map"]))
        pullbacks = []
        for k, rows in sorted(d.get("pullbacks", {}).items(), key=lambda kv: int(kv[0])):
            k = int(k)
            shape = (src.space.betti(k), tgt.space.betti(k))
            try:
                M = matrix_from_json(rows, *shape) if not rows else matrix_from_json(rows)
            except (ValueError, TypeError) as exc:
                raise SpaceError(f"degree {k} pullback: {exc}") from exc
            pullbacks.append((k, M))
        space_map = SpaceMorphism(src.space, tgt.space, simplicial, tuple(pullbacks))
    except SpaceError as exc:
        kind = "shape_mismatch" if "shape" in str(exc) else "invalid_map"
        raise ScenarioValidationError(kind, name, str(exc)) from exc
    try:
        return BundleMorphism(src, tgt, space_map, name)
    except CompatibilityError as exc:
        raise ScenarioValidationError("compatibility", name, str(exc)) from exc
    except ModelScopeError as exc:
        raise ScenarioValidationError("model_scope", name, str(exc)) from exc


def parse_scenario(data: dict, default_name: str = "scenario") -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioParseError("scenario must be a JSON object")
    objects: dict = {}
    for d in data.get("objects", []):
        if not isinstance(d, dict):
            raise ScenarioParseError("object entries must be JSON objects")
        obj = _parse_object(d)
        if obj.name in objects:
            raise ScenarioValidationError("duplicate_name", obj.name, "object name used twice")
        objects[obj.name] = obj
    morphisms: dict = {}
    for d in data.get("morphisms", []):
        if not isinstance(d, dict):
            raise ScenarioParseError("morphism entries must be JSON objects")
        f = _parse_morphism(d, objects)
        if f.name in morphisms:
            raise ScenarioValidationError("duplicate_name", f.name, "morphism name used twice")
        morphisms[f.name] = f
    terminal = data.get("terminal")
    if terminal is not None and terminal not in objects:
        raise ScenarioValidationError("unknown_reference", "terminal", f"unknown object {terminal!r}")
    analyses = data.get("analyses", [])
    if not isinstance(analyses, list):
        raise ScenarioParseError("analyses must be a list")
    return Scenario(
        name=data.get("name", default_name),
        objects=objects,
        morphisms=morphisms,
        analyses=analyses,
        terminal=terminal,
        description=data.get("description", ""),
        digest=canonical_digest(data),
        raw=data,
    )
