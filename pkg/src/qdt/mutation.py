"""Graded premutation, reduction of 2-cycle terms, cut mutation, the vector map phi and module transport."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg
from .errors import (InjectivityFailed, InvalidQP, NonIsolatedTwoCycle, NotStrictSource,
                     RelationViolation)
from .qp import (QP, Arrow, Path, Potential, Quiver, cyclic_derivative, grading_from_cut, is_cut,
                 is_strict_source)


@dataclass(frozen=True)
class GradedQP:
    quiver: Quiver
    potential: Potential
    grading: tuple[tuple[str, int], ...]
    r: int

    @classmethod
    def make(cls, quiver: Quiver, potential: Potential, grading: Mapping[str, int], r: int) -> GradedQP:
        g = cls(quiver, potential, tuple(sorted(grading.items())), r)
        g.check()
        return g

    @property
    def degrees(self) -> dict[str, int]:
        return dict(self.grading)

    def check(self):
        deg = self.degrees
        missing = [a.id for a in self.quiver.arrows if a.id not in deg]
        if missing:
            raise InvalidQP(f"grading missing arrows {missing}")
        for cyc in self.potential.terms:
            d = sum(deg[a] for a in cyc)
            if d != self.r:
                raise InvalidQP(f"term {'.'.join(cyc)} has degree {d}, expected {self.r}")

    def qp(self) -> QP:
        return QP(self.quiver, self.potential, None, self.grading)


def composite_id(b: str, a: str) -> str:
    return f"[{b}.{a}]"


def reversed_id(a: str) -> str:
    return f"{a}*"


def premutate(g: GradedQP, k: str) -> GradedQP:
    """Composite arrows through k, reversed arrows at k, potential [W] + Delta."""
    q = g.quiver
    q.index(k)
    incoming = q.arrows_to(k)
    outgoing = q.arrows_from(k)
    if any(a.tail == a.head for a in incoming + outgoing):
        raise InvalidQP(f"loop at {k}")
    deg = g.degrees
    arrows: list[Arrow] = [a for a in q.arrows if a.tail != k and a.head != k]
    newdeg = {a.id: deg[a.id] for a in arrows}
    for a in incoming:
        for b in outgoing:
            if a.tail == b.head:
                raise InvalidQP(f"composite of {a.id} and {b.id} would be a loop at {a.tail}")
            c = Arrow(composite_id(b.id, a.id), a.tail, b.head)
            arrows.append(c)
            newdeg[c.id] = deg[a.id] + deg[b.id]
    for a in incoming:
        arrows.append(Arrow(reversed_id(a.id), k, a.tail))
        newdeg[reversed_id(a.id)] = g.r - deg[a.id]
    for b in outgoing:
        arrows.append(Arrow(reversed_id(b.id), b.head, k))
        newdeg[reversed_id(b.id)] = -deg[b.id]
    quiver = Quiver(q.vertices, tuple(arrows))
    terms: list[tuple[Sequence[str], Fraction]] = []
    for cyc, c in g.potential.terms.items():
        terms.append((_substitute_composites(q, cyc, k), c))
    for a in incoming:
        for b in outgoing:
            terms.append(((composite_id(b.id, a.id), reversed_id(b.id), reversed_id(a.id)), Fraction(1)))
    out = GradedQP(quiver, Potential(terms), tuple(sorted(newdeg.items())), g.r)
    for cyc in out.potential.terms:
        for x, y in zip(cyc, cyc[1:] + cyc[:1]):
            assert quiver.arrow(x).head == quiver.arrow(y).tail
    out.check()
    return out


def _substitute_composites(q: Quiver, cyc: Path, k: str) -> Path:
    n = len(cyc)
    # rotate so the cycle does not start right after a visit of k
    start = next((i for i in range(n) if q.arrow(cyc[i]).tail != k), None)
    if start is None:
        raise InvalidQP("cycle visits only k")
    seq = cyc[start:] + cyc[:start]
    out: list[str] = []
    i = 0
    while i < n:
        a = seq[i]
        if q.arrow(a).head == k:
            b = seq[(i + 1) % n]
            out.append(composite_id(b, a))
            i += 2
        else:
            out.append(a)
            i += 1
    return tuple(out)


def reduce(g: GradedQP) -> GradedQP:
    """Remove isolated 2-cycle terms one pair at a time."""
    cur = g
    while True:
        two = [(cyc, c) for cyc, c in cur.potential.terms.items() if len(cyc) == 2]
        if not two:
            return cur
        (x, y), lam = two[0]
        P: dict[Path, Fraction] = {}
        Qd: dict[Path, Fraction] = {}
        R: list[tuple[Path, Fraction]] = []
        for cyc, c in cur.potential.terms.items():
            if cyc == (x, y):
                continue
            nx, ny = cyc.count(x), cyc.count(y)
            if nx + ny == 0:
                R.append((cyc, c))
                continue
            if nx + ny > 1:
                raise NonIsolatedTwoCycle(f"term {'.'.join(cyc)} meets the 2-cycle {x}.{y} more than once", cyc)
            z = x if nx else y
            i = cyc.index(z)
            rest = cyc[i + 1:] + cyc[:i]
            target = P if z == x else Qd
            target[rest] = target.get(rest, Fraction(0)) + c
        for paths in (P, Qd):
            for path in paths:
                if x in path or y in path:
                    raise NonIsolatedTwoCycle(f"2-cycle {x}.{y} is not isolated", path)
        terms = list(R)
        for p, cp in P.items():
            for qq, cq in Qd.items():
                terms.append((p + qq, -cp * cq / lam))
        arrows = tuple(a for a in cur.quiver.arrows if a.id not in (x, y))
        quiver = Quiver(cur.quiver.vertices, arrows)
        deg = {a: d for a, d in cur.grading if a not in (x, y)}
        cur = GradedQP(quiver, Potential(terms), tuple(sorted(deg.items())), cur.r)
        cur.check()


def mutate_qp(qp: QP, cut: Iterable[str], k: str) -> tuple[QP, frozenset[str]]:
    """Mutation of a QP with cut at a strict source; returns the new QP and the new cut."""
    cut = frozenset(cut)
    q = qp.quiver
    if not is_cut(qp, cut):
        from .errors import NotACut

        raise NotACut(f"{sorted(cut)} is not a cut")
    if not is_strict_source(q, cut, k):
        raise NotStrictSource(f"vertex {k} is not a strict source for cut {sorted(cut)}")
    if not q.is_cluster_like():
        raise InvalidQP("quiver has loops or 2-cycles")
    g = GradedQP.make(q, qp.potential, grading_from_cut(q, cut), 1)
    red = reduce(premutate(g, k))
    deg = red.degrees
    bad = {a: d for a, d in deg.items() if d not in (0, 1)}
    if bad:
        raise InvalidQP(f"mutated degrees outside {{0,1}}: {bad}")
    new_cut = frozenset(a for a, d in deg.items() if d == 1)
    new = QP(red.quiver, red.potential, new_cut)
    assert is_cut(new, new_cut)
    if not red.quiver.is_cluster_like():
        raise InvalidQP(f"mutated quiver is not cluster-like: {red.quiver.two_cycles()}")
    return new, new_cut


def fz_mutation(matrix: Sequence[Sequence[int]], k: int) -> list[list[int]]:
    """Arrow-count matrix after Fomin-Zelevinsky mutation at index k (input assumed 2-acyclic)."""
    n = len(matrix)
    b = [[matrix[i][j] - matrix[j][i] for j in range(n)] for i in range(n)]
    nb = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == k or j == k:
                nb[i][j] = -b[i][j]
            else:
                nb[i][j] = b[i][j] + (abs(b[i][k]) * b[k][j] + b[i][k] * abs(b[k][j])) // 2
    return [[max(nb[i][j], 0) for j in range(n)] for i in range(n)]


def phi(quiver: Quiver, k: str, v: Sequence[int]) -> tuple[int, ...]:
    """Dimension-vector transform: v'_k = -v_k + sum over arrows b out of k of v_head(b)."""
    i = quiver.index(k)
    out = list(v)
    out[i] = -v[i] + sum(v[quiver.index(b.head)] for b in quiver.arrows_from(k))
    return tuple(out)


def phi_inverse(quiver: Quiver, k: str, w: Sequence[int]) -> tuple[int, ...]:
    # the k-th entry is an involution because no arrow out of k returns to k
    return phi(quiver, k, w)


def in_mutation_domain(quiver: Quiver, k: str, v: Sequence[int]) -> bool:
    """Membership in the cone of nonnegative v whose image under phi is nonnegative."""
    return all(x >= 0 for x in v) and all(x >= 0 for x in phi(quiver, k, v))


# module points over F_p

@dataclass
class ModulePoint:
    qp: QP
    cut: frozenset[str]
    v: tuple[int, ...]
    p: int
    maps: dict[str, list[list[int]]]  # non-cut arrow -> v_head x v_tail matrix

    def dim(self, vertex: str) -> int:
        return self.v[self.qp.quiver.index(vertex)]

    def path_matrix(self, path: Sequence[str], tail: str | None = None) -> list[list[int]]:
        q = self.qp.quiver
        if not path:
            n = self.dim(tail)
            return linalg.identity(n)
        a0 = q.arrow(path[0])
        m = linalg.identity(self.dim(a0.tail))
        for a in path:
            arr = q.arrow(a)
            if a in self.cut:
                m = linalg.zeros(self.dim(arr.head), self.dim(a0.tail))
                continue
            m = linalg.matmul(self.maps[a], m, self.p)
        return m

    def relation_residuals(self) -> dict[str, list[list[int]]]:
        q = self.qp.quiver
        out = {}
        for c in sorted(self.cut):
            a = q.arrow(c)
            acc = linalg.zeros(self.dim(a.tail), self.dim(a.head))
            for path, coeff in cyclic_derivative(self.qp.potential, c).items():
                acc = linalg.add(acc, linalg.scale(self.path_matrix(path, a.head), coeff, self.p), self.p)
            out[c] = acc
        return out

    def satisfies_relations(self) -> bool:
        return all(linalg.is_zero(m) for m in self.relation_residuals().values())

    def check_shapes(self):
        q = self.qp.quiver
        for a in q.arrows:
            if a.id in self.cut:
                continue
            m = self.maps.get(a.id)
            if m is None:
                raise InvalidQP(f"missing matrix for {a.id}")
            if linalg.shape(m, self.dim(a.head), self.dim(a.tail)) != (self.dim(a.head), self.dim(a.tail)):
                raise InvalidQP(f"matrix for {a.id} has wrong shape")

    def out_map(self, k: str) -> list[list[int]]:
        """Stacked matrices of the non-cut arrows leaving k (arrow order of the quiver)."""
        q = self.qp.quiver
        blocks = [self.maps[b.id] for b in q.arrows_from(k) if b.id not in self.cut]
        return linalg.vstack(blocks, self.dim(k))

    def in_map(self, k: str) -> list[list[int]]:
        q = self.qp.quiver
        blocks = [self.maps[a.id] for a in q.arrows_to(k) if a.id not in self.cut]
        return linalg.hstack(blocks, self.dim(k))


def mutate_module(m: ModulePoint, k: str) -> ModulePoint:
    """Transport a module with no sub-simple at k to the mutated QP by taking a cokernel at k."""
    q = m.qp.quiver
    p = m.p
    if not is_strict_source(q, m.cut, k):
        raise NotStrictSource(f"vertex {k} is not a strict source")
    new_qp, new_cut = mutate_qp(m.qp, m.cut, k)
    outgoing = q.arrows_from(k)
    incoming = q.arrows_to(k)
    beta = m.out_map(k)
    n_total = sum(m.dim(b.head) for b in outgoing)
    vk = m.dim(k)
    if linalg.rank(beta, p) != vk:
        raise InjectivityFailed(f"combined map out of {k} is not injective")
    comp = linalg.complement_columns(beta, n_total, p)
    proj = linalg.complement_projection(beta, comp, n_total, p)  # len(comp) x n_total
    new_v = phi(q, k, m.v)
    assert new_v[q.index(k)] == len(comp)
    maps: dict[str, list[list[int]]] = {}
    for a in new_qp.quiver.arrows:
        if a.id in new_cut:
            continue
        if m.qp.quiver.has_arrow(a.id):
            maps[a.id] = [row[:] for row in m.maps[a.id]]
    offsets = {}
    off = 0
    for b in outgoing:
        offsets[b.id] = off
        off += m.dim(b.head)
    for b in outgoing:
        bid = reversed_id(b.id)
        if bid in maps or bid in new_cut or not new_qp.quiver.has_arrow(bid):
            continue
        lo, hi = offsets[b.id], offsets[b.id] + m.dim(b.head)
        maps[bid] = [row[lo:hi] for row in proj]
    for a in incoming:
        aid = reversed_id(a.id)
        if aid in new_cut or not new_qp.quiver.has_arrow(aid):
            continue
        # block row over outgoing b of the paths continuing a composite [b.a] in the substituted potential
        rows = m.dim(a.tail)
        F = linalg.zeros(rows, n_total)
        for b in outgoing:
            comp_id = composite_id(b.id, a.id)
            block = linalg.zeros(rows, m.dim(b.head))
            for cyc, c in m.qp.potential.terms.items():
                sub = _substitute_composites(q, cyc, k)
                for i, x in enumerate(sub):
                    if x != comp_id:
                        continue
                    rest = sub[i + 1:] + sub[:i]
                    if not all(q.has_arrow(y) for y in rest):
                        continue  # another composite contains a cut arrow, so it acts by zero
                    pm = m.path_matrix(rest, b.head)
                    block = linalg.add(block, linalg.scale(pm, c, p), p)
            for r in range(rows):
                for j in range(m.dim(b.head)):
                    F[r][offsets[b.id] + j] = block[r][j]
        # induced map on the cokernel, with the sign matching the Delta term of the potential
        maps[aid] = [[(-F[r][j]) % p for j in comp] for r in range(rows)]
    out = ModulePoint(new_qp, new_cut, new_v, p, maps)
    out.check_shapes()
    if not out.satisfies_relations():
        raise RelationViolation("mutated module violates the new relations")
    into = out.in_map(k)
    if linalg.rank(into, p) != new_v[q.index(k)]:
        raise RelationViolation("combined map into the mutated vertex is not surjective")
    return out
