"""Symbolic point counting: the number of F_q-points of an integer polynomial system as a polynomial in q.

Variables are eliminated one at a time when they occur linearly with a coefficient that is a unit
or can be made one by branching; irreducible leftovers that are not linear anywhere raise Stuck.
Every step is an identity of point counts valid over any finite field whose characteristic does
not divide the integer constants recorded in `bad`.
"""
from __future__ import annotations

from math import gcd

import sympy

from .polys import padd, pmul, ppow, pvars

QPoly = dict[int, int]


class Stuck(Exception):
    pass


def split(f, x):
    """f = c * x + r with x absent from r (x assumed of degree <= 1)."""
    c, r = {}, {}
    for m, k in f.items():
        if x in m:
            lst = list(m)
            lst.remove(x)
            c[tuple(lst)] = k
        else:
            r[m] = k
    return c, r


def degree_in(f, x) -> int:
    return max((m.count(x) for m in f), default=0)


def substitute(f, x, num, den):
    """den^deg * f(x = num/den), with deg the degree of f in x."""
    d = degree_in(f, x)
    if d == 0:
        return f
    out = {}
    for m, k in f.items():
        e = m.count(x)
        rest = tuple(v for v in m if v != x)
        term = {rest: k}
        if e:
            term = pmul(term, ppow(num, e))
        if d - e:
            term = pmul(term, ppow(den, d - e))
        out = padd(out, term)
    return out


def set_zero(f, x):
    return {m: k for m, k in f.items() if x not in m}


def qadd(a: QPoly, b: QPoly, s: int = 1) -> QPoly:
    r = dict(a)
    for e, c in b.items():
        v = r.get(e, 0) + s * c
        if v:
            r[e] = v
        else:
            r.pop(e, None)
    return r


def qmul(a: QPoly, b: QPoly) -> QPoly:
    r: QPoly = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            r[e1 + e2] = r.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in r.items() if c}


def affine_torus(n_free: int, n_units: int) -> QPoly:
    """q^n_free (q - 1)^n_units."""
    r = {n_free: 1}
    for _ in range(n_units):
        r = qmul(r, {1: 1, 0: -1})
    return r


class Eliminator:
    def __init__(self):
        self.cache: dict = {}
        self.calls = 0
        self._syms: dict[int, sympy.Symbol] = {}

    # sympy bridges for factoring and exact division
    def _to_sympy(self, f, vs):
        gens = [self._syms.setdefault(v, sympy.Symbol(f"x{v}")) for v in vs] or [sympy.Symbol("x_")]
        d = {}
        for m, k in f.items():
            e = [0] * len(gens)
            for v in m:
                e[vs.index(v)] += 1
            d[tuple(e)] = k
        return sympy.Poly.from_dict(d, *gens, domain="ZZ")

    @staticmethod
    def _from_sympy(P, vs):
        out = {}
        for e, k in P.terms():
            m = []
            for i, ei in enumerate(e):
                m += [vs[i]] * ei
            out[tuple(sorted(m))] = int(k)
        return out

    def factors(self, f):
        vs = sorted(pvars(f))
        _, fl = self._to_sympy(f, vs).factor_list()
        return [self._from_sympy(g, vs) for g, _ in fl if g.total_degree() > 0], [e for _, e in fl]

    def exquo(self, f, c):
        vs = sorted(pvars(f) | pvars(c))
        q, r = sympy.div(self._to_sympy(f, vs), self._to_sympy(c, vs))
        return self._from_sympy(q, vs) if r.is_zero else None

    @staticmethod
    def canon(f, U, bad):
        """Strip unit-monomial and integer content. None means no solutions, 'zero' means no condition."""
        if not f:
            return "zero"
        mins = None
        for m in f:
            cnt = {}
            for v in m:
                if v in U:
                    cnt[v] = cnt.get(v, 0) + 1
            mins = cnt if mins is None else {v: min(e, cnt.get(v, 0)) for v, e in mins.items() if cnt.get(v, 0)}
        if mins:
            g = {}
            for m, k in f.items():
                lst = list(m)
                for v, e in mins.items():
                    for _ in range(e):
                        lst.remove(v)
                g[tuple(lst)] = k
            f = g
        if len(f) == 1 and () in f:
            return None
        g0 = 0
        for k in f.values():
            g0 = gcd(g0, k)
        if f[min(f)] < 0:
            g0 = -g0
        if abs(g0) != 1:
            bad.add(abs(g0))
        return frozenset((m, k // g0) for m, k in f.items())

    def count(self, eqs, U, nv, nu, bad) -> QPoly:
        """Points on F_q^nv x (F_q^*)^nu; U holds the ids of the nu unit variables."""
        E = set()
        for f in eqs:
            g = self.canon(f, U, bad)
            if g is None:
                return {}
            if g != "zero":
                E.add(g)
        vs = set()
        for f in E:
            vs |= {v for m, _ in f for v in m}
        uin = vs & U
        res, b = self.core(frozenset(E), frozenset(uin))
        bad |= b
        return qmul(affine_torus(nv - (len(vs) - len(uin)), nu - len(uin)), res)

    @staticmethod
    def components(E):
        E = list(E)
        parent = list(range(len(E)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        owner = {}
        for i, f in enumerate(E):
            for m, _ in f:
                for v in m:
                    if v in owner:
                        parent[find(i)] = find(owner[v])
                    else:
                        owner[v] = i
        groups = {}
        for i in range(len(E)):
            groups.setdefault(find(i), []).append(E[i])
        return [frozenset(g) for g in groups.values()]

    def core(self, E, U):
        if not E:
            return {0: 1}, set()
        key = (E, U)
        if key in self.cache:
            return self.cache[key]
        self.calls += 1
        bad: set[int] = set()
        comps = self.components(E)
        if len(comps) > 1:
            r = {0: 1}
            for c in comps:
                cv = {v for f in c for m, _ in f for v in m}
                rr, b = self.core(c, frozenset(cv & U))
                bad |= b
                r = qmul(r, rr)
            self.cache[key] = (r, bad)
            return r, bad
        eqs = [dict(f) for f in E]
        vs = set()
        for f in eqs:
            vs |= pvars(f)
        nv, nu = len(vs - U), len(U)
        for f in eqs:
            if len(f) == 1:
                # monomial in non-unit variables: first factor is zero or a unit
                x = next(iter(f))[0]
                b0 = self.count([set_zero(g, x) for g in eqs], U, nv - 1, nu, bad)
                b1 = self.count(eqs, U | {x}, nv - 1, nu + 1, bad)
                res = qadd(b0, b1)
                self.cache[key] = (res, bad)
                return res, bad
        best = None
        for i, f in enumerate(eqs):
            for x in pvars(f):
                if x in U or degree_in(f, x) != 1:
                    continue
                c, r = split(f, x)
                if len(c) == 1:
                    nonu = [v for v in next(iter(c)) if v not in U]
                    rank = (0, len(nonu), len(f)) if not nonu else (1, len(nonu), len(f))
                else:
                    rank = (3, len(c), len(f))
                    for z in pvars(c):
                        if z in U or degree_in(c, z) != 1:
                            continue
                        cu, _ = split(c, z)
                        if len(cu) == 1 and all(v in U for v in next(iter(cu))):
                            rank = (2, len(c), len(f), z)
                            break
                if best is None or rank < best[0]:
                    best = (rank, i, x, c, r)
        if best is None:
            res = self._factor_step(eqs, U, nv, nu, bad)
            self.cache[key] = (res, bad)
            return res, bad
        rank, i, x, c, r = best
        others = [g for j, g in enumerate(eqs) if j != i]
        neg_r = {m: -k for m, k in r.items()}
        if rank[0] == 0:
            _, k = next(iter(c.items()))
            if abs(k) != 1:
                bad.add(abs(k))
            res = self.count([substitute(g, x, neg_r, c) for g in others], U, nv - 1, nu, bad)
        elif rank[0] == 1:
            y = [v for v in next(iter(c)) if v not in U][0]
            b0 = self.count([set_zero(g, y) for g in eqs], U, nv - 1, nu, bad)
            b1 = self.count(eqs, U | {y}, nv - 1, nu + 1, bad)
            res = qadd(b0, b1)
        elif rank[0] == 2:
            # change of variables making the coefficient of x a single variable
            z = rank[3]
            cu, cs = split(c, z)
            _, k = next(iter(cu.items()))
            if abs(k) != 1:
                bad.add(abs(k))
            num = padd({(z,): 1}, cs, -1)
            res = self.count([substitute(g, z, num, cu) for g in eqs], U, nv, nu, bad)
        else:
            # c = 0 (then r = 0) or c != 0 (solve for x)
            b0 = self.count(others + [r, c], U, nv, nu, bad)
            new = []
            for g in others:
                h = substitute(g, x, neg_r, c)
                if h is not g and len(c) > 1:
                    while h:
                        h2 = self.exquo(h, c)
                        if h2 is None:
                            break
                        h = h2
                new.append(h)
            b1 = self.count(new, U, nv - 1, nu, bad)
            b1z = self.count(new + [c], U, nv - 1, nu, bad)
            res = qadd(qadd(b0, b1), b1z, -1)
        self.cache[key] = (res, bad)
        return res, bad

    def _factor_step(self, eqs, U, nv, nu, bad):
        i = min(range(len(eqs)), key=lambda j: len(eqs[j]))
        fs, mult = self.factors(eqs[i])
        others = [g for j, g in enumerate(eqs) if j != i]
        if len(fs) == 1:
            if mult[0] == 1:
                raise Stuck(f"no linear variable in {len(eqs)} equations")
            return self.count(others + [fs[0]], U, nv, nu, bad)
        g1 = fs[0]
        rest = {(): 1}
        for g in fs[1:]:
            rest = pmul(rest, g)
        return qadd(qadd(self.count(others + [g1], U, nv, nu, bad),
                         self.count(others + [rest], U, nv, nu, bad)),
                    self.count(others + [g1, rest], U, nv, nu, bad), -1)


def count_polynomial_symbolic(equations, variables) -> tuple[QPoly, set[int]]:
    """Point count of an integer system over F_q as {exponent: coefficient}, with the constants divided by."""
    bad: set[int] = set()
    res = Eliminator().count(list(equations), set(), len(variables), 0, bad)
    return res, bad
