"""Builtin smooth toric Fano examples and JSON input handling."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .exact import RatVec
from .polytope import (
    FanRays,
    Polytope,
    PolytopeError,
    anticanonical_polytope,
    polytope_from_vertices,
    rays_of,
)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    rays: FanRays
    note: str

    def polytope(self) -> Polytope:
        return anticanonical_polytope(self.rays)

    def to_json(self) -> dict:
        return {"name": self.name, "dim": self.rays.dim, "rays": self.rays.to_json()}


_ENTRIES = (
    ("p2", [(1, 0), (0, 1), (-1, -1)], "projective plane"),
    ("dp1", [(1, 0), (0, 1), (-1, -1), (1, 1)], "plane blown up at one torus-fixed point"),
    (
        "dp2",
        [(1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1)],
        "plane blown up at two torus-fixed points",
    ),
    (
        "dp3",
        [(1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1), (1, 1)],
        "plane blown up at three torus-fixed points",
    ),
    ("p1xp1", [(1, 0), (0, 1), (-1, 0), (0, -1)], "product of two projective lines"),
    ("p3", [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)], "projective 3-space"),
    (
        "p2xp1",
        [(1, 0, 0), (0, 1, 0), (-1, -1, 0), (0, 0, 1), (0, 0, -1)],
        "projective plane times a projective line",
    ),
    (
        "p1cubed",
        [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)],
        "product of three projective lines",
    ),
)


def catalog() -> list:
    return [CatalogEntry(name, FanRays.of(rays), note) for name, rays, note in _ENTRIES]


def lookup(name: str) -> Optional[CatalogEntry]:
    for e in catalog():
        if e.name == name:
            return e
    return None


class InputError(ValueError):
    """Malformed polytope input."""


def entry_from_json(data) -> CatalogEntry:
    """Parse ``{"name", "dim", "rays"}`` or ``{"name", "vertices"}``."""
    if not isinstance(data, dict):
        raise InputError("polytope JSON must be an object")
    name = data.get("name", "input")
    if not isinstance(name, str):
        raise InputError("name must be a string")
    try:
        if "rays" in data:
            rays = data["rays"]
            if not isinstance(rays, list) or not rays:
                raise InputError("rays must be a nonempty list")
            for r in rays:
                if not isinstance(r, list) or any(
                    isinstance(c, bool) or not isinstance(c, int) for c in r
                ):
                    raise InputError(f"ray {r!r} is not a list of integers")
            fan = FanRays.of(rays)
        elif "vertices" in data:
            verts = data["vertices"]
            if not isinstance(verts, list) or not verts:
                raise InputError("vertices must be a nonempty list")
            pts = []
            for v in verts:
                if not isinstance(v, list) or any(
                    isinstance(c, (bool, float)) or not isinstance(c, (int, str)) for c in v
                ):
                    raise InputError(f"vertex {v!r} must be a list of integers or rational strings")
                pts.append(RatVec(v))
            fan = rays_of(polytope_from_vertices(pts))
        else:
            raise InputError('polytope JSON needs "rays" or "vertices"')
        if "dim" in data and data["dim"] != fan.dim:
            raise InputError(f"dim {data['dim']!r} does not match the data (dimension {fan.dim})")
    except (PolytopeError, ZeroDivisionError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from exc
    return CatalogEntry(name, fan, "user input")


def load_entry(source: str, stdin=None) -> CatalogEntry:
    """Resolve a catalog name, a JSON file path, or ``-`` for standard input."""
    entry = lookup(source)
    if entry is not None:
        return entry
    try:
        if source == "-":
            import sys

            text = (stdin or sys.stdin).read()
        else:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        data = json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read {source!r}: not a catalog name or readable file") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    return entry_from_json(data)
