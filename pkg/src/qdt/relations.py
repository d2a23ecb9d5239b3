"""Polynomial systems cutting out truncated-Jacobian modules, and enumeration counters over F_p."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded
from .linalg import batch_rank, to_field
from .polys import Poly, const, mat_identity, mat_mul, padd, pscale
from .qp import QP, cyclic_derivative

CHUNK = 1 << 16


@dataclass
class System:
    """Equations in the listed free variables; every other variable is fixed to zero."""

    variables: tuple[int, ...]
    equations: list[Poly]
    # arrow id -> matrix of variable ids (None where the entry was fixed to zero)
    arrow_vars: dict[str, list[list[int | None]]] = field(default_factory=dict)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def terms(self) -> int:
        return sum(len(f) for f in self.equations)

    def with_zeros(self, zero: set[int]) -> System:
        eqs = []
        for f in self.equations:
            g = {m: c for m, c in f.items() if not any(x in zero for x in m)}
            if g:
                eqs.append(g)
        av = {a: [[None if (x is None or x in zero) else x for x in row] for row in m] for a, m in self.arrow_vars.items()}
        return System(tuple(x for x in self.variables if x not in zero), eqs, av)


def build_system(qp: QP, cut: Sequence[str], v: Sequence[int], arrows: Sequence[str] | None = None) -> System:
    """Variables for the matrices on non-cut arrows and one equation per entry of each cut-arrow relation."""
    q = qp.quiver
    cut = frozenset(cut)
    dim = {x: v[i] for i, x in enumerate(q.vertices)}
    ids = [a.id for a in q.arrows if a.id not in cut] if arrows is None else list(arrows)
    arrow_vars: dict[str, list[list[int | None]]] = {}
    sym: dict[str, list[list[Poly]]] = {}
    nxt = 0
    for aid in ids:
        a = q.arrow(aid)
        r, c = dim[a.head], dim[a.tail]
        arrow_vars[aid] = [[nxt + i * c + j for j in range(c)] for i in range(r)]
        sym[aid] = [[{(nxt + i * c + j,): 1} for j in range(c)] for i in range(r)]
        nxt += r * c
    eqs: list[Poly] = []
    if arrows is None:
        for cid in sorted(cut):
            a = q.arrow(cid)
            rows, cols = dim[a.tail], dim[a.head]
            acc = [[{} for _ in range(cols)] for _ in range(rows)]
            for path, coeff in cyclic_derivative(qp.potential, cid).items():
                if any(x in cut for x in path):
                    continue
                m = _path_matrix(q, sym, dim, path, a.head)
                acc = [[padd(acc[i][j], pscale(m[i][j], coeff)) for j in range(cols)] for i in range(rows)]
            for row in acc:
                for f in row:
                    if f:
                        eqs.append(f)
    return System(tuple(range(nxt)), eqs, arrow_vars)


def _path_matrix(q, sym, dim, path, start: str):
    m = mat_identity(dim[start])
    cur = start
    for aid in path:
        a = q.arrow(aid)
        m = mat_mul(sym[aid], m, dim[cur], dim[start])
        cur = a.head
    return m


def trace_polynomial(qp: QP, v: Sequence[int]) -> tuple[System, Poly]:
    """Variables on all arrows and the trace of the potential as a polynomial in them."""
    q = qp.quiver
    sysm = build_system(qp, (), v, arrows=q.arrow_ids)
    dim = {x: v[i] for i, x in enumerate(q.vertices)}
    sym = {a: [[({(x,): 1} if x is not None else {}) for x in row] for row in m] for a, m in sysm.arrow_vars.items()}
    f: Poly = {}
    for cyc, coeff in qp.potential.terms.items():
        start = q.arrow(cyc[0]).tail
        m = _path_matrix(q, sym, dim, cyc, start)
        for i in range(dim[start]):
            f = padd(f, pscale(m[i][i], coeff))
    return sysm, f


# evaluation over F_p

def _compile(f: Poly, index: dict[int, int], p: int) -> list[tuple[int, tuple[int, ...]]]:
    out = []
    for m, c in f.items():
        cp = to_field(c, p)
        if cp:
            out.append((cp, tuple(index[x] for x in m)))
    return out


def _eval(compiled, X: np.ndarray, p: int) -> np.ndarray:
    acc = np.zeros(X.shape[0], dtype=np.int64)
    for c, cols in compiled:
        t = np.full(X.shape[0], c, dtype=np.int64)
        for j in cols:
            t = t * X[:, j] % p
        acc += t
    return acc % p


def _points(start: int, stop: int, n: int, p: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    X = np.empty((stop - start, n), dtype=np.int64)
    for j in range(n):
        X[:, j] = idx % p
        idx //= p
    return X


def brute_cost(system: System, p: int) -> int:
    return p ** system.nvars * (system.terms() + 1)


def _check_budget(cost: int, budget: int, what: str):
    if cost > budget:
        raise BudgetExceeded(cost, budget, what)


def _filter_matrices(system: System, spec, index: dict[int, int], X: np.ndarray) -> np.ndarray:
    """Batch of combined maps at the filter vertex, as a B x rows x cols array."""
    kind, blocks, axis, n = spec
    mats = []
    for aid in blocks:
        ids = system.arrow_vars[aid]
        rows = len(ids)
        cols = len(ids[0]) if rows else (n if axis == 0 else 0)
        m = np.zeros((X.shape[0], rows, cols), dtype=np.int64)
        for i in range(rows):
            for j in range(cols):
                x = ids[i][j]
                if x is not None:
                    m[:, i, j] = X[:, index[x]]
        mats.append(m)
    if not mats:
        shape = (X.shape[0], 0, n) if axis == 0 else (X.shape[0], n, 0)
        return np.zeros(shape, dtype=np.int64)
    return np.concatenate(mats, axis=1 if axis == 0 else 2)


def brute_count(system: System, p: int, budget: int, filter_spec=None) -> int:
    """Count zeros of all equations in F_p^n by exhaustive enumeration.

    filter_spec = (kind, arrow ids, stack axis, v_k) with kind 'sub' (stacked map must be injective)
    or 'quot' (concatenated map must be surjective).
    """
    n = system.nvars
    _check_budget(brute_cost(system, p), budget, "brute-force enumeration")
    index = {x: i for i, x in enumerate(system.variables)}
    compiled = [_compile(f, index, p) for f in system.equations]
    total = p ** n
    count = 0
    for s in range(0, total, CHUNK):
        X = _points(s, min(total, s + CHUNK), n, p)
        ok = np.ones(X.shape[0], dtype=bool)
        for c in compiled:
            if not c:
                continue
            ok &= _eval(c, X, p) == 0
        if filter_spec is not None:
            X = X[ok]
            if X.shape[0]:
                m = _filter_matrices(system, filter_spec, index, X)
                rk = batch_rank(m, p)
                count += int((rk == filter_spec[3]).sum())
        else:
            count += int(ok.sum())
    return count


# fibre-wise counting for systems affine in a subset of variables

def linear_split(system: System, S: set[int]) -> bool:
    """True when every monomial has at most one variable from S (counted with multiplicity)."""
    return all(sum(1 for x in m if x in S) <= 1 for f in system.equations for m in f)


def fiber_cost(system: System, S: set[int], p: int) -> int:
    e = system.nvars - len(S)
    neq = len(system.equations)
    s = len(S)
    return p ** e * (neq * (s + 1) * max(1, min(neq, s + 1)) + system.terms() + 1)


def fiber_count(system: System, S: set[int], p: int, budget: int) -> int:
    if not linear_split(system, S):
        raise ValueError("equations are not affine in the chosen variables")
    _check_budget(fiber_cost(system, S, p), budget, "fibre-wise enumeration")
    E = [x for x in system.variables if x not in S]
    Sl = [x for x in system.variables if x in S]
    eidx = {x: i for i, x in enumerate(E)}
    sidx = {x: i for i, x in enumerate(Sl)}
    neq = len(system.equations)
    # per equation: list of (target column or -1 for constant, coeff, E columns)
    comp = []
    for f in system.equations:
        parts = []
        for m, c in f.items():
            cp = to_field(c, p)
            if not cp:
                continue
            s_in = [x for x in m if x in S]
            col = sidx[s_in[0]] if s_in else len(Sl)
            parts.append((col, cp, tuple(eidx[x] for x in m if x not in S)))
        comp.append(parts)
    ns = len(Sl)
    total = p ** len(E)
    hist: dict[int, int] = {}
    for s in range(0, total, CHUNK):
        X = _points(s, min(total, s + CHUNK), len(E), p)
        B = X.shape[0]
        M = np.zeros((B, neq, ns + 1), dtype=np.int64)
        for r, parts in enumerate(comp):
            for col, cp, cols in parts:
                t = np.full(B, cp, dtype=np.int64)
                for j in cols:
                    t = t * X[:, j] % p
                M[:, r, col] = (M[:, r, col] + t) % p
        rk = batch_rank(M[:, :, :ns], p) if ns else np.zeros(B, dtype=np.int64)
        rk_aug = batch_rank(M, p)
        good = rk == rk_aug
        vals, cnts = np.unique(rk[good], return_counts=True)
        for r, c in zip(vals.tolist(), cnts.tolist()):
            hist[r] = hist.get(r, 0) + c
    return sum(c * p ** (ns - r) for r, c in hist.items())


def choose_linear_arrows(qp: QP, cut: Sequence[str], system: System, forbidden: set[str] = frozenset()) -> set[int]:
    """Largest variable set, made of whole arrows, in which all relations are affine."""
    arrows = [a for a in system.arrow_vars if a not in forbidden]
    sizes = {a: sum(1 for row in system.arrow_vars[a] for x in row if x is not None) for a in arrows}
    arrows = [a for a in arrows if sizes[a]]
    # pairs of arrows that may not both be chosen, and arrows that may not be chosen at all
    var_arrow = {x: a for a in arrows for row in system.arrow_vars[a] for x in row if x is not None}
    conflict: set[tuple[str, str]] = set()
    banned: set[str] = set()
    for f in system.equations:
        for m in f:
            hit = [var_arrow[x] for x in m if x in var_arrow]
            for i in range(len(hit)):
                for j in range(i + 1, len(hit)):
                    if hit[i] == hit[j]:
                        banned.add(hit[i])
                    else:
                        conflict.add(tuple(sorted((hit[i], hit[j]))))
    cand = [a for a in arrows if a not in banned]
    best: tuple[int, tuple[str, ...]] = (0, ())
    if len(cand) <= 18:
        for r in range(len(cand), 0, -1):
            for combo in itertools.combinations(cand, r):
                if any(tuple(sorted((x, y))) in conflict for x, y in itertools.combinations(combo, 2)):
                    continue
                w = sum(sizes[a] for a in combo)
                if w > best[0]:
                    best = (w, combo)
    else:
        chosen: list[str] = []
        for a in sorted(cand, key=lambda a: -sizes[a]):
            if all(tuple(sorted((a, b))) not in conflict for b in chosen):
                chosen.append(a)
        best = (sum(sizes[a] for a in chosen), tuple(chosen))
    return {x for a in best[1] for row in system.arrow_vars[a] for x in row if x is not None}


def trace_fibers(qp: QP, v: Sequence[int], p: int, budget: int) -> tuple[int, int]:
    sysm, f = trace_polynomial(qp, v)
    n = sysm.nvars
    cost = p ** n * (len(f) + 1)
    _check_budget(cost, budget, "trace enumeration")
    index = {x: i for i, x in enumerate(sysm.variables)}
    comp = _compile(f, index, p)
    total = p ** n
    z = o = 0
    for s in range(0, total, CHUNK):
        X = _points(s, min(total, s + CHUNK), n, p)
        val = _eval(comp, X, p) if comp else np.zeros(X.shape[0], dtype=np.int64)
        z += int((val == 0).sum())
        o += int((val == 1 % p).sum())
    return z, o
