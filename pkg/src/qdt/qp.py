"""Quivers with potential, cuts, gradings and the bilinear forms on dimension vectors.

Paths compose left to right: the cycle (a1, a2, ..., an) traverses a1 first.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InvalidQP, ParseError, VertexMismatch

Path = tuple[str, ...]


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        object.__setattr__(self, "_by_id", {a.id: a for a in self.arrows})
        object.__setattr__(self, "_vidx", {v: i for i, v in enumerate(self.vertices)})

    def __hash__(self):
        return hash((self.vertices, self.arrows))

    def __eq__(self, other):
        return isinstance(other, Quiver) and self.vertices == other.vertices and self.arrows == other.arrows

    def arrow(self, aid: str) -> Arrow:
        try:
            return self._by_id[aid]
        except KeyError:
            raise InvalidQP(f"unknown arrow {aid!r}") from None

    def has_arrow(self, aid: str) -> bool:
        return aid in self._by_id

    def index(self, v: str) -> int:
        try:
            return self._vidx[v]
        except KeyError:
            raise VertexMismatch(f"unknown vertex {v!r}") from None

    @property
    def arrow_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.arrows)

    def arrows_from(self, v: str) -> list[Arrow]:
        return [a for a in self.arrows if a.tail == v]

    def arrows_to(self, v: str) -> list[Arrow]:
        return [a for a in self.arrows if a.head == v]

    def arrow_count_matrix(self) -> list[list[int]]:
        n = len(self.vertices)
        m = [[0] * n for _ in range(n)]
        for a in self.arrows:
            m[self.index(a.tail)][self.index(a.head)] += 1
        return m

    def has_loops(self) -> bool:
        return any(a.tail == a.head for a in self.arrows)

    def two_cycles(self) -> list[tuple[str, str]]:
        out = []
        for a in self.arrows:
            for b in self.arrows:
                if a.tail == b.head and a.head == b.tail and a.id < b.id:
                    out.append((a.id, b.id))
        return out

    def is_cluster_like(self) -> bool:
        return not self.has_loops() and not self.two_cycles()


def is_closed_path(quiver: Quiver, arrows: Sequence[str]) -> bool:
    if not arrows:
        return False
    for x, y in zip(arrows, list(arrows[1:]) + [arrows[0]]):
        if quiver.arrow(x).head != quiver.arrow(y).tail:
            return False
    return True


def canonical_rotation(arrows: Sequence[str]) -> Path:
    seq = tuple(arrows)
    return min(seq[i:] + seq[:i] for i in range(len(seq)))


@dataclass(frozen=True)
class Cycle:
    arrows: Path

    @classmethod
    def make(cls, quiver: Quiver, arrows: Sequence[str]) -> Cycle:
        for a in arrows:
            quiver.arrow(a)
        if not is_closed_path(quiver, arrows):
            raise InvalidQP(f"not a cycle: {list(arrows)}")
        return cls(canonical_rotation(arrows))

    def __len__(self):
        return len(self.arrows)


class Potential:
    """Finite combination of cycles with exact rational coefficients, keyed by canonical rotation."""

    __slots__ = ("terms", "_key")

    def __init__(self, terms: Mapping[Path, Fraction] | Iterable[tuple[Sequence[str], object]] = ()):
        acc: dict[Path, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for cyc, c in items:
            if isinstance(cyc, Cycle):
                cyc = cyc.arrows
            key = canonical_rotation(cyc)
            acc[key] = acc.get(key, Fraction(0)) + Fraction(c)
        self.terms = {k: v for k, v in sorted(acc.items()) if v != 0}
        self._key = tuple(self.terms.items())

    def __eq__(self, other):
        return isinstance(other, Potential) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, cycle: Sequence[str]) -> Fraction:
        return self.terms.get(canonical_rotation(cycle), Fraction(0))

    def arrows_used(self) -> set[str]:
        return {a for cyc in self.terms for a in cyc}

    def __add__(self, other: Potential) -> Potential:
        return Potential(list(self.terms.items()) + list(other.terms.items()))

    def scaled(self, c) -> Potential:
        return Potential({k: v * Fraction(c) for k, v in self.terms.items()})

    def __repr__(self):
        return "Potential(" + " ".join(f"{'+' if v > 0 else '-'}{abs(v) if abs(v) != 1 else ''}{'.'.join(k)}" for k, v in self.terms.items()) + ")"


@dataclass(frozen=True)
class QP:
    quiver: Quiver
    potential: Potential = field(default_factory=Potential)
    cut: frozenset[str] | None = None
    grading: tuple[tuple[str, int], ...] | None = None

    def with_cut(self, cut: Iterable[str] | None) -> QP:
        return QP(self.quiver, self.potential, None if cut is None else frozenset(cut), self.grading)


# dimension vectors: tuples in quiver vertex order

def dimvec(quiver: Quiver, v: Mapping[str, int] | Sequence[int]) -> tuple[int, ...]:
    if isinstance(v, Mapping):
        unknown = set(v) - set(quiver.vertices)
        if unknown:
            raise VertexMismatch(f"unknown vertices {sorted(unknown)}")
        return tuple(int(v.get(x, 0)) for x in quiver.vertices)
    v = tuple(int(x) for x in v)
    if len(v) != len(quiver.vertices):
        raise VertexMismatch(f"vector of length {len(v)} for {len(quiver.vertices)} vertices")
    return v


def unit(quiver: Quiver, vertex: str) -> tuple[int, ...]:
    i = quiver.index(vertex)
    return tuple(1 if j == i else 0 for j in range(len(quiver.vertices)))


def _check_len(quiver: Quiver, *vs):
    for v in vs:
        if len(v) != len(quiver.vertices):
            raise VertexMismatch(f"vector of length {len(v)} for {len(quiver.vertices)} vertices")


def euler_form(quiver: Quiver, v: Sequence[int], w: Sequence[int]) -> int:
    _check_len(quiver, v, w)
    s = sum(x * y for x, y in zip(v, w))
    for a in quiver.arrows:
        s -= v[quiver.index(a.tail)] * w[quiver.index(a.head)]
    return s


def skew_form(quiver: Quiver, v: Sequence[int], w: Sequence[int]) -> int:
    return euler_form(quiver, v, w) - euler_form(quiver, w, v)


def cut_form(quiver: Quiver, cut: Iterable[str], v: Sequence[int], w: Sequence[int]) -> int:
    _check_len(quiver, v, w)
    s = 0
    for c in cut:
        a = quiver.arrow(c)
        s += v[quiver.index(a.tail)] * w[quiver.index(a.head)]
    return s


def cut_quiver_form(quiver: Quiver, cut: Iterable[str], v: Sequence[int], w: Sequence[int]) -> int:
    """chi_{Q_C}(v, w) = chi_Q(v, w) - chi_C(v, w)."""
    return euler_form(quiver, v, w) - cut_form(quiver, cut, v, w)


def truncated_euler_form(quiver: Quiver, cut: Iterable[str], v: Sequence[int], w: Sequence[int]) -> int:
    """Euler form of the truncated Jacobian algebra: vertices, minus non-cut arrows, plus one relation per cut arrow.

    Its diagonal equals chi_Q(v,v) + 2 chi_C(v,v), the exponent used for refined invariants.
    """
    cut = set(cut)
    _check_len(quiver, v, w)
    s = sum(x * y for x, y in zip(v, w))
    for a in quiver.arrows:
        t, h = quiver.index(a.tail), quiver.index(a.head)
        if a.id in cut:
            s += v[h] * w[t]
        else:
            s -= v[t] * w[h]
    return s


def rep_dimension(quiver: Quiver, v: Sequence[int], arrows: Iterable[str] | None = None) -> int:
    """Dimension of the space of representations on the given arrows (all arrows by default)."""
    ids = quiver.arrow_ids if arrows is None else arrows
    return sum(v[quiver.index(quiver.arrow(a).tail)] * v[quiver.index(quiver.arrow(a).head)] for a in ids)


def cyclic_derivative(potential: Potential, a: str) -> dict[Path, Fraction]:
    """Sum over occurrences of `a`: coefficient times the rotation starting right after it."""
    out: dict[Path, Fraction] = {}
    for cyc, c in potential.terms.items():
        n = len(cyc)
        for i, x in enumerate(cyc):
            if x == a:
                path = cyc[i + 1:] + cyc[:i]
                out[path] = out.get(path, Fraction(0)) + c
    return {k: v for k, v in out.items() if v != 0}


def is_cut(qp: QP | Potential, cut: Iterable[str], quiver: Quiver | None = None) -> bool:
    pot = qp.potential if isinstance(qp, QP) else qp
    if isinstance(qp, QP):
        quiver = qp.quiver
    cut = set(cut)
    if quiver is not None and any(not quiver.has_arrow(c) for c in cut):
        return False
    return all(sum(1 for a in cyc if a in cut) == 1 for cyc in pot.terms)


def find_cuts(qp: QP, restrict_to_W_arrows: bool = True) -> list[frozenset[str]]:
    """All cuts, found by backtracking over arrows; results sorted for determinism."""
    pot = qp.potential
    if restrict_to_W_arrows:
        cand = sorted(pot.arrows_used())
    else:
        cand = list(qp.quiver.arrow_ids)
    terms = [list(c) for c in pot.terms]
    occ = {a: [sum(1 for x in t if x == a) for t in terms] for a in cand}
    # remaining occurrences of undecided arrows per term
    remaining = [len(t) for t in terms]
    counts = [0] * len(terms)
    found: list[frozenset[str]] = []
    chosen: list[str] = []

    def rec(i: int):
        if i == len(cand):
            if all(c == 1 for c in counts):
                found.append(frozenset(chosen))
            return
        a = cand[i]
        oc = occ[a]
        for j, k in enumerate(oc):
            remaining[j] -= k
        # exclude a
        if all(counts[j] + remaining[j] >= 1 for j in range(len(terms))):
            rec(i + 1)
        # include a
        ok = all(counts[j] + oc[j] <= 1 for j in range(len(terms)))
        if ok:
            for j, k in enumerate(oc):
                counts[j] += k
            chosen.append(a)
            rec(i + 1)
            chosen.pop()
            for j, k in enumerate(oc):
                counts[j] -= k
        for j, k in enumerate(oc):
            remaining[j] += k

    rec(0)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def is_strict_source(quiver: Quiver, cut: Iterable[str], k: str) -> bool:
    cut = set(cut)
    quiver.index(k)
    return all(a.id in cut for a in quiver.arrows_to(k)) and all(a.id not in cut for a in quiver.arrows_from(k))


def is_strict_sink(quiver: Quiver, cut: Iterable[str], k: str) -> bool:
    cut = set(cut)
    quiver.index(k)
    return all(a.id in cut for a in quiver.arrows_from(k)) and all(a.id not in cut for a in quiver.arrows_to(k))


def grading_from_cut(quiver: Quiver, cut: Iterable[str]) -> dict[str, int]:
    cut = set(cut)
    return {a.id: (1 if a.id in cut else 0) for a in quiver.arrows}


def validate_qp(qp: QP) -> list[str]:
    """All invariant violations as messages; empty iff valid."""
    problems: list[str] = []
    q = qp.quiver
    if len(set(q.vertices)) != len(q.vertices):
        problems.append("duplicate vertex ids")
    ids = [a.id for a in q.arrows]
    seen = set()
    for i in ids:
        if i in seen:
            problems.append(f"duplicate arrow id {i!r}")
        seen.add(i)
    vs = set(q.vertices)
    for a in q.arrows:
        if a.tail not in vs or a.head not in vs:
            problems.append(f"arrow {a.id!r} has undeclared endpoint")
        if a.tail == a.head:
            problems.append(f"arrow {a.id!r} is a loop")
    for cyc in qp.potential.terms:
        unknown = [a for a in cyc if not q.has_arrow(a)]
        if unknown:
            problems.append(f"cycle {list(cyc)} uses unknown arrows {unknown}")
        elif not is_closed_path(q, cyc):
            problems.append(f"term {list(cyc)} is not a cycle")
    if qp.cut is not None:
        bad = [c for c in qp.cut if not q.has_arrow(c)]
        if bad:
            problems.append(f"cut has unknown arrows {sorted(bad)}")
        elif not is_cut(qp, qp.cut):
            problems.append("cut does not make the potential homogeneous of degree 1")
    if qp.grading is not None:
        g = dict(qp.grading)
        missing = [a for a in ids if a not in g]
        if missing:
            problems.append(f"grading missing arrows {missing}")
    return problems


def report(qp: QP) -> dict:
    problems = validate_qp(qp)
    q = qp.quiver
    return {
        "valid": not problems,
        "problems": problems,
        "cluster_like": not problems and q.is_cluster_like(),
        "two_cycles": [list(p) for p in q.two_cycles()],
        "vertices": len(q.vertices),
        "arrows": len(q.arrows),
        "terms": len(qp.potential),
    }


# JSON

def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def qp_to_dict(qp: QP) -> dict:
    d: dict = {
        "vertices": list(qp.quiver.vertices),
        "arrows": [{"id": a.id, "from": a.tail, "to": a.head} for a in qp.quiver.arrows],
        "potential": [{"coeff": _fmt_frac(c), "cycle": list(cyc)} for cyc, c in qp.potential.terms.items()],
    }
    if qp.cut is not None:
        d["cut"] = sorted(qp.cut)
    if qp.grading is not None:
        d["grading"] = dict(qp.grading)
    return d


def qp_to_json(qp: QP) -> str:
    return json.dumps(qp_to_dict(qp), indent=2)


def _expect(cond: bool, msg: str, path: str):
    if not cond:
        raise ParseError(msg, path)


def qp_from_dict(d: object, check: bool = True) -> QP:
    _expect(isinstance(d, dict), "top level must be an object", "$")
    assert isinstance(d, dict)
    _expect("vertices" in d, "missing key 'vertices'", "$")
    verts = d["vertices"]
    _expect(isinstance(verts, list), "'vertices' must be a list", "$.vertices")
    for i, v in enumerate(verts):
        _expect(isinstance(v, (str, int)), "vertex id must be a string", f"$.vertices[{i}]")
    verts = [str(v) for v in verts]
    arrows = []
    for i, a in enumerate(d.get("arrows", [])):
        p = f"$.arrows[{i}]"
        _expect(isinstance(a, dict), "arrow must be an object", p)
        for key in ("id", "from", "to"):
            _expect(key in a, f"arrow missing {key!r}", p)
        _expect(str(a["from"]) in verts, f"unknown vertex {a['from']!r}", p + ".from")
        _expect(str(a["to"]) in verts, f"unknown vertex {a['to']!r}", p + ".to")
        arrows.append(Arrow(str(a["id"]), str(a["from"]), str(a["to"])))
    ids = [a.id for a in arrows]
    for i, x in enumerate(ids):
        _expect(x not in ids[:i], f"duplicate arrow id {x!r}", f"$.arrows[{i}].id")
    quiver = Quiver(tuple(verts), tuple(arrows))
    terms = []
    for i, t in enumerate(d.get("potential", [])):
        p = f"$.potential[{i}]"
        _expect(isinstance(t, dict) and "cycle" in t, "term must be an object with 'cycle'", p)
        cyc = t["cycle"]
        _expect(isinstance(cyc, list) and len(cyc) > 0, "cycle must be a nonempty list", p + ".cycle")
        for j, a in enumerate(cyc):
            _expect(str(a) in ids, f"unknown arrow {a!r}", f"{p}.cycle[{j}]")
        cyc = [str(a) for a in cyc]
        if check:
            for j in range(len(cyc)):
                x, y = quiver.arrow(cyc[j]), quiver.arrow(cyc[(j + 1) % len(cyc)])
                _expect(x.head == y.tail, f"arrow {x.id!r} ends at {x.head!r} but {y.id!r} starts at {y.tail!r}", f"{p}.cycle[{j}]")
        try:
            c = Fraction(str(t.get("coeff", "1")))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad coefficient {t.get('coeff')!r}", p + ".coeff") from None
        terms.append((cyc, c))
    cut = None
    if "cut" in d and d["cut"] is not None:
        for j, a in enumerate(d["cut"]):
            _expect(str(a) in ids, f"unknown arrow {a!r}", f"$.cut[{j}]")
        cut = frozenset(str(a) for a in d["cut"])
    grading = None
    if "grading" in d and d["grading"] is not None:
        g = d["grading"]
        _expect(isinstance(g, dict), "grading must be an object", "$.grading")
        for a, x in g.items():
            _expect(a in ids, f"unknown arrow {a!r}", f"$.grading.{a}")
            _expect(isinstance(x, int), "degree must be an integer", f"$.grading.{a}")
        grading = tuple(sorted((str(a), int(x)) for a, x in g.items()))
    return QP(quiver, Potential(terms), cut, grading)


def qp_from_json(text: str) -> QP:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, col=e.colno) from None
    return qp_from_dict(d)


def load_qp(path: str) -> QP:
    with open(path) as fh:
        return qp_from_json(fh.read())
