"""Conflict sets of disjoint closed sets: extraction and numerical checks."""

import json

from ._conflictsets import (
    ConflictError,
    Scene,
    demo_scene,
    dimension_check_json,
    extract,
    label,
    link_components,
    no_cusp_json,
    parse_scene,
    run,
    spherical_conflict,
    verify_tangent_json,
)

__all__ = [
    "ConflictError",
    "Scene",
    "demo_scene",
    "dimension_check",
    "extract",
    "label",
    "link_components",
    "load_scene",
    "no_cusp",
    "parse_scene",
    "run",
    "spherical_conflict",
    "verify_tangent",
]


def load_scene(path):
    with open(path, encoding="utf-8") as f:
        return parse_scene(f.read())


def verify_tangent(scene, x0, eps=(0.4, 0.2, 0.1, 0.05), resolution=96, workers=1):
    return json.loads(verify_tangent_json(scene, list(x0), list(eps), resolution, workers))


def no_cusp(scene, y0, eps=(0.1, 0.05, 0.025)):
    return json.loads(no_cusp_json(scene, list(y0), list(eps)))


def dimension_check(scene, window=(), resolution=128):
    return json.loads(dimension_check_json(scene, list(window), resolution))
