"""Bundled example quivers with potential."""
from __future__ import annotations

import json
from importlib import resources

from .dimer import DimerGraph, dimer_from_dict
from .qp import QP, qp_from_dict

NAMES = ("one_vertex", "a2", "three_cycle", "conifold_z2", "p1xp1", "reduction_example")


def fixture_path(name: str) -> str:
    return str(resources.files("qdt") / "data" / f"{name}.json")


def load(name: str) -> QP:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    text = (resources.files("qdt") / "data" / f"{name}.json").read_text()
    return qp_from_dict(json.loads(text))


def square_dimer() -> DimerGraph:
    text = (resources.files("qdt") / "data" / "square_dimer.json").read_text()
    return dimer_from_dict(json.loads(text))
