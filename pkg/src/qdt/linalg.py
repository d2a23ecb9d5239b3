"""Small dense linear algebra over a prime field, on lists of lists and on numpy batches."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def ncols(m: Matrix, default: int = 0) -> int:
    return len(m[0]) if m else default


def shape(m: Matrix, rows: int, cols: int) -> tuple[int, int]:
    if len(m) != rows:
        return (len(m), -1)
    if any(len(r) != cols for r in m):
        return (rows, -1)
    return (rows, cols)


def to_field(c, p: int) -> int:
    c = Fraction(c)
    if c.denominator % p == 0:
        raise ZeroDivisionError(f"coefficient {c} is not defined mod {p}")
    return c.numerator * pow(c.denominator, -1, p) % p


def matmul(a: Matrix, b: Matrix, p: int) -> Matrix:
    """a times b; shapes r x m and m x c."""
    m = len(b)
    c = ncols(b)
    return [[sum(row[k] * b[k][j] for k in range(m)) % p for j in range(c)] for row in a]


def add(a: Matrix, b: Matrix, p: int) -> Matrix:
    return [[(x + y) % p for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a: Matrix, c, p: int) -> Matrix:
    f = to_field(c, p)
    return [[x * f % p for x in row] for row in a]


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def vstack(blocks: Sequence[Matrix], cols: int) -> Matrix:
    out: Matrix = []
    for b in blocks:
        out.extend(row[:] for row in b)
    return out if out else []


def hstack(blocks: Sequence[Matrix], rows: int) -> Matrix:
    out = [[] for _ in range(rows)]
    for b in blocks:
        for i in range(rows):
            out[i].extend(b[i])
    return out


def rref(m: Matrix, p: int, cols: int | None = None) -> tuple[Matrix, list[int]]:
    a = [[x % p for x in row] for row in m]
    nr = len(a)
    nc = ncols(a, cols or 0)
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a, pivots


def rank(m: Matrix, p: int) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m, p)[1])


def complement_columns(beta: Matrix, n: int, p: int) -> list[int]:
    """Standard basis indices that complete the column space of beta (n x k) to F_p^n, chosen greedily in order."""
    k = ncols(beta)
    aug = [list(beta[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)] if n else []
    if not aug:
        return []
    _, piv = rref(aug, p)
    return [c - k for c in piv if c >= k]


def complement_projection(beta: Matrix, comp: list[int], n: int, p: int) -> Matrix:
    """Rows giving coordinates along the chosen standard vectors, modulo the column space of beta."""
    k = ncols(beta)
    basis = [list(beta[i]) + [1 if i == j else 0 for j in comp] for i in range(n)]
    inv = inverse(basis, p)
    return [row[:] for row in inv[k:]]


def inverse(m: Matrix, p: int) -> Matrix:
    n = len(m)
    aug = [list(m[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    red, piv = rref(aug, p)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def inverse_table(p: int) -> np.ndarray:
    t = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        t[x] = pow(x, -1, p)
    return t


def batch_rank(m: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices (shape B x r x c) over F_p."""
    a = np.array(m, dtype=np.int64) % p
    bsz, nr, nc = a.shape
    rk = np.zeros(bsz, dtype=np.int64)
    if nr == 0 or nc == 0:
        return rk
    inv = inverse_table(p)
    rows = np.arange(nr)
    idx = np.arange(bsz)
    for c in range(nc):
        col = a[:, :, c]
        cand = (col != 0) & (rows[None, :] >= rk[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = idx[has]
        piv = cand[has].argmax(axis=1)
        r = rk[has]
        r_safe = np.minimum(r, nr - 1)
        prow = a[b, piv, :].copy()
        a[b, piv, :] = a[b, r_safe, :]
        a[b, r_safe, :] = prow
        prow = prow * inv[prow[:, c]][:, None] % p
        a[b, r_safe, :] = prow
        f = a[b, :, c].copy()
        f[np.arange(len(b)), r_safe] = 0
        a[b] = (a[b] - f[:, :, None] * prow[:, None, :]) % p
        rk[has] += 1
    return rk
