"""Sparse multivariate polynomials: dict from sorted variable-id tuples to coefficients."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable

Mono = tuple[int, ...]
Poly = dict[Mono, object]


def padd(a: Poly, b: Poly, s=1) -> Poly:
    r = dict(a)
    for m, c in b.items():
        v = r.get(m, 0) + s * c
        if v:
            r[m] = v
        else:
            r.pop(m, None)
    return r


def pmul(a: Poly, b: Poly) -> Poly:
    r: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(sorted(m1 + m2))
            v = r.get(m, 0) + c1 * c2
            if v:
                r[m] = v
            else:
                r.pop(m, None)
    return r


def pscale(a: Poly, c) -> Poly:
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}


def ppow(a: Poly, n: int) -> Poly:
    r: Poly = {(): 1}
    for _ in range(n):
        r = pmul(r, a)
    return r


def pvars(f: Poly) -> set[int]:
    return {v for m in f for v in m}


def variable(i: int) -> Poly:
    return {(i,): 1}


def const(c) -> Poly:
    return {(): c} if c else {}


def clear_denominators(f: Poly) -> dict[Mono, int]:
    """Multiply by the lcm of denominators; returns an integer polynomial."""
    l = 1
    for c in f.values():
        d = Fraction(c).denominator
        l = l * d // gcd(l, d)
    return {m: int(Fraction(c) * l) for m, c in f.items()}


def denominators_lcm(fs: Iterable[Poly]) -> int:
    l = 1
    for f in fs:
        for c in f.values():
            d = Fraction(c).denominator
            l = l * d // gcd(l, d)
    return l


# symbolic matrices: lists of lists of Poly

def mat_vars(rows: int, cols: int, start: int) -> tuple[list[list[Poly]], int]:
    m = [[variable(start + i * cols + j) for j in range(cols)] for i in range(rows)]
    return m, start + rows * cols


def mat_identity(n: int) -> list[list[Poly]]:
    return [[const(1) if i == j else {} for j in range(n)] for i in range(n)]


def mat_mul(a: list[list[Poly]], b: list[list[Poly]], inner: int, cols: int) -> list[list[Poly]]:
    out = []
    for row in a:
        r = []
        for j in range(cols):
            acc: Poly = {}
            for k in range(inner):
                if row[k] and b[k][j]:
                    acc = padd(acc, pmul(row[k], b[k][j]))
            r.append(acc)
        out.append(r)
    return out
