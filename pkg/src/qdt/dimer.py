"""Bipartite graphs on a torus (dimers) and the quivers with potential they define."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvalidDimer, ParseError
from .qp import QP, Arrow, Potential, Quiver, is_cut


@dataclass(frozen=True)
class DimerGraph:
    blue: tuple[str, ...]
    red: tuple[str, ...]
    faces: tuple[tuple[str, ...], ...]
    face_names: tuple[str, ...] | None = None
    # edge ids parallel to each face's node list: face_edges[f][i] joins faces[f][i] and faces[f][i+1]
    face_edges: tuple[tuple[str, ...], ...] | None = None

    def names(self) -> tuple[str, ...]:
        if self.face_names is not None:
            return self.face_names
        return tuple(f"F{i + 1}" for i in range(len(self.faces)))


@dataclass(frozen=True)
class _Edge:
    id: str
    blue: str
    red: str
    bluered_face: int  # face where it is traversed blue -> red
    redblue_face: int


def _edges(g: DimerGraph) -> dict[str, _Edge]:
    blue, red = set(g.blue), set(g.red)
    if blue & red:
        raise InvalidDimer("node is both blue and red")
    seen: dict[str, list] = {}
    for fi, face in enumerate(g.faces):
        n = len(face)
        if n < 2 or n % 2:
            raise InvalidDimer(f"face {fi} has odd or too small length")
        for i in range(n):
            x, y = face[i], face[(i + 1) % n]
            if x not in blue | red or y not in blue | red:
                raise InvalidDimer(f"face {fi} uses an unknown node")
            if (x in blue) == (y in blue):
                raise InvalidDimer(f"colors do not alternate in face {fi}")
            if g.face_edges is not None:
                eid = g.face_edges[fi][i]
            else:
                eid = "e_" + "_".join(sorted((x, y)))
            seen.setdefault(eid, []).append((fi, x, y))
    out = {}
    for eid, occ in seen.items():
        if g.face_edges is None and len(occ) != 2:
            raise InvalidDimer(
                f"node pair {eid} occurs {len(occ)} times; multiple edges need explicit face_edges")
        if len(occ) != 2:
            raise InvalidDimer(f"edge {eid} appears {len(occ)} times, expected 2")
        (f1, x1, y1), (f2, x2, y2) = occ
        if {x1, y1} != {x2, y2}:
            raise InvalidDimer(f"edge {eid} joins different nodes in its two faces")
        if (x1 in blue) == (x2 in blue):
            raise InvalidDimer(f"edge {eid} traversed in the same color order twice")
        if x1 in blue:
            out[eid] = _Edge(eid, x1, y1, f1, f2)
        else:
            out[eid] = _Edge(eid, x2, y2, f2, f1)
    return out


def euler_characteristic(g: DimerGraph) -> int:
    return len(g.blue) + len(g.red) - len(_edges(g)) + len(g.faces)


def dimer_to_qp(g: DimerGraph) -> QP:
    """Faces become vertices, edges become arrows; the potential sums blue node cycles minus red ones."""
    edges = _edges(g)
    names = g.names()
    arrows = []
    for eid in sorted(edges):
        e = edges[eid]
        arrows.append(Arrow(eid, names[e.redblue_face], names[e.bluered_face]))
    quiver = Quiver(tuple(names), tuple(arrows))
    blue = set(g.blue)
    # successor of an arrow inside the cycle around a node, read off at each face corner
    succ: dict[str, dict[str, str]] = {n: {} for n in list(g.blue) + list(g.red)}
    for fi, face in enumerate(g.faces):
        n = len(face)
        for i in range(n):
            node = face[i]
            e_in = _edge_id(g, fi, (i - 1) % n, edges)
            e_out = _edge_id(g, fi, i, edges)
            if node in blue:
                succ[node][e_out] = e_in
            else:
                succ[node][e_in] = e_out
    terms = []
    for node, s in succ.items():
        start = min(s)
        cyc = [start]
        while True:
            nxt = s[cyc[-1]]
            if nxt == start:
                break
            cyc.append(nxt)
        if len(cyc) != len(s):
            raise InvalidDimer(f"edges around node {node} do not form one cycle")
        terms.append((cyc, Fraction(1 if node in blue else -1)))
    qp = QP(quiver, Potential(terms))
    from .qp import validate_qp

    problems = validate_qp(qp)
    if problems:
        raise InvalidDimer("; ".join(problems))
    return qp


def _edge_id(g: DimerGraph, fi: int, i: int, edges: dict[str, _Edge]) -> str:
    face = g.faces[fi]
    if g.face_edges is not None:
        return g.face_edges[fi][i]
    x, y = face[i], face[(i + 1) % len(face)]
    return "e_" + "_".join(sorted((x, y)))


def perfect_matchings(g: DimerGraph) -> list[frozenset[str]]:
    edges = _edges(g)
    if len(g.blue) != len(g.red):
        return []
    by_blue: dict[str, list[_Edge]] = {b: [] for b in g.blue}
    for e in edges.values():
        by_blue[e.blue].append(e)
    out: list[frozenset[str]] = []
    used: set[str] = set()
    chosen: list[str] = []

    def rec(i: int):
        if i == len(g.blue):
            out.append(frozenset(chosen))
            return
        for e in sorted(by_blue[g.blue[i]], key=lambda e: e.id):
            if e.red not in used:
                used.add(e.red)
                chosen.append(e.id)
                rec(i + 1)
                chosen.pop()
                used.discard(e.red)

    rec(0)
    return sorted(out, key=sorted)


def matching_to_cut(g: DimerGraph, m: frozenset[str] | set[str]) -> frozenset[str]:
    edges = _edges(g)
    nodes: dict[str, int] = {}
    for eid in m:
        if eid not in edges:
            raise InvalidDimer(f"unknown edge {eid}")
        for n in (edges[eid].blue, edges[eid].red):
            nodes[n] = nodes.get(n, 0) + 1
    if set(nodes) != set(g.blue) | set(g.red) or any(c != 1 for c in nodes.values()):
        raise InvalidDimer("edge set is not a perfect matching")
    cut = frozenset(m)
    assert is_cut(dimer_to_qp(g), cut)
    return cut


def dimer_from_dict(d: object) -> DimerGraph:
    if not isinstance(d, dict):
        raise ParseError("top level must be an object", "$")
    for key in ("blue", "red", "faces"):
        if key not in d:
            raise ParseError(f"missing key {key!r}", "$")
    faces = d["faces"]
    if not isinstance(faces, list):
        raise ParseError("'faces' must be a list", "$.faces")
    fe = d.get("face_edges")
    if fe is not None:
        if len(fe) != len(faces) or any(len(a) != len(b) for a, b in zip(fe, faces)):
            raise ParseError("face_edges must parallel faces", "$.face_edges")
        fe = tuple(tuple(str(x) for x in row) for row in fe)
    names = d.get("face_names")
    if names is not None:
        names = tuple(str(x) for x in names)
        if len(names) != len(faces):
            raise ParseError("face_names must parallel faces", "$.face_names")
    return DimerGraph(tuple(map(str, d["blue"])), tuple(map(str, d["red"])),
                      tuple(tuple(str(x) for x in f) for f in faces), names, fe)


def load_dimer(path: str) -> DimerGraph:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, line=e.lineno, col=e.colno) from None
    return dimer_from_dict(d)
