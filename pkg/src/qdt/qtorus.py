"""Truncated quantum torus, quantum dilogarithms, DT series, HN factorization and the mutation check."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Callable, Iterable, Mapping, Sequence

from . import ffcount
from .errors import BoxMismatch, NonUnitConstantTerm, NotStrictSource, ZeroVector
from .ffcount import CountFilter, count_polynomial, gl_order, group_order
from .mutation import in_mutation_domain, mutate_qp, phi, phi_inverse
from .qp import QP, Quiver, cut_form, euler_form, is_strict_source, skew_form, unit
from .qseries import TRational, embed_count_poly

Vec = tuple[int, ...]


def _add(u: Vec, w: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, w))


def _sub(u: Vec, w: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, w))


def _leq(u: Vec, w: Vec) -> bool:
    return all(a <= b for a, b in zip(u, w))


class Region:
    """Finite downward-closed set of dimension vectors (the truncation of a series)."""

    __slots__ = ("vectors", "n", "_set")

    def __init__(self, vectors: Iterable[Sequence[int]]):
        vs = {tuple(int(x) for x in v) for v in vectors}
        if not vs:
            raise ValueError("empty region")
        n = len(next(iter(vs)))
        closed = set()
        for v in vs:
            if len(v) != n or any(x < 0 for x in v):
                raise ValueError(f"bad vector {v}")
            for w in itertools.product(*(range(x + 1) for x in v)):
                closed.add(w)
        self.n = n
        self.vectors = tuple(sorted(closed, key=lambda v: (sum(v), v)))
        self._set = frozenset(closed)

    @classmethod
    def box(cls, bound: Sequence[int]) -> Region:
        return cls([tuple(bound)])

    @classmethod
    def total_degree(cls, n: int, degree: int) -> Region:
        return cls(v for v in itertools.product(range(degree + 1), repeat=n) if sum(v) <= degree)

    def __contains__(self, v) -> bool:
        return tuple(v) in self._set

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self):
        return len(self.vectors)

    def __eq__(self, other):
        return isinstance(other, Region) and self._set == other._set

    def __hash__(self):
        return hash(self._set)

    def maximal(self) -> list[Vec]:
        out = []
        for v in self.vectors:
            if not any(w != v and _leq(v, w) for w in self.vectors):
                out.append(v)
        return out

    def describe(self) -> dict:
        return {"size": len(self), "maximal": [list(v) for v in self.maximal()],
                "componentwise_max": [max(v[i] for v in self.vectors) for i in range(self.n)]}


def _skew_matrix(quiver: Quiver) -> list[list[int]]:
    n = len(quiver.vertices)
    e = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    return [[skew_form(quiver, e[i], e[j]) for j in range(n)] for i in range(n)]


class TorusSeries:
    """Element of the quantum torus truncated to a region: y_u y_w = t^<u,w> y_(u+w)."""

    __slots__ = ("quiver", "region", "coeffs", "_B")

    def __init__(self, quiver: Quiver, region: Region, coeffs: Mapping[Vec, TRational] | None = None):
        self.quiver = quiver
        self.region = region
        if region.n != len(quiver.vertices):
            raise BoxMismatch("region dimension does not match the quiver")
        self.coeffs: dict[Vec, TRational] = {}
        for v, c in (coeffs or {}).items():
            v = tuple(v)
            if v not in region:
                raise BoxMismatch(f"coefficient at {v} outside the region")
            if not isinstance(c, TRational):
                c = TRational(0) + c
            if c:
                self.coeffs[v] = c
        self._B = _skew_matrix(quiver)

    @classmethod
    def one(cls, quiver: Quiver, region: Region) -> TorusSeries:
        return cls(quiver, region, {tuple([0] * len(quiver.vertices)): TRational(1)})

    @classmethod
    def monomial(cls, quiver: Quiver, region: Region, v: Vec, c=1) -> TorusSeries:
        return cls(quiver, region, {tuple(v): TRational(0) + c})

    def __getitem__(self, v) -> TRational:
        return self.coeffs.get(tuple(v), TRational(0))

    def skew(self, u: Vec, w: Vec) -> int:
        B = self._B
        return sum(u[i] * B[i][j] * w[j] for i in range(len(u)) if u[i] for j in range(len(w)) if w[j])

    def __eq__(self, other) -> bool:
        return (isinstance(other, TorusSeries) and self.quiver == other.quiver
                and self.region == other.region and self.coeffs == other.coeffs)

    def __mul__(self, other: TorusSeries) -> TorusSeries:
        return series_mul(self, other)

    def to_report(self) -> list[dict]:
        return [{"v": list(v), "coeff": self[v].to_string()} for v in self.region if self[v]]

    def __repr__(self):
        inner = ", ".join(f"{list(v)}: {c}" for v, c in sorted(self.coeffs.items(), key=lambda t: (sum(t[0]), t[0])))
        return f"TorusSeries({inner})"


def _same(a: TorusSeries, b: TorusSeries):
    if a.quiver != b.quiver or a.region != b.region:
        raise BoxMismatch("series live on different quivers or regions")


def series_mul(a: TorusSeries, b: TorusSeries) -> TorusSeries:
    _same(a, b)
    out: dict[Vec, TRational] = {}
    region = a.region
    for u, cu in a.coeffs.items():
        for w, cw in b.coeffs.items():
            v = _add(u, w)
            if v not in region:
                continue
            term = cu * cw * TRational.t_power(a.skew(u, w))
            out[v] = out[v] + term if v in out else term
    return TorusSeries(a.quiver, region, out)


def series_inverse(a: TorusSeries) -> TorusSeries:
    zero = tuple([0] * a.region.n)
    if a[zero] != TRational(1):
        raise NonUnitConstantTerm("constant term must be 1")
    inv: dict[Vec, TRational] = {zero: TRational(1)}
    support = [u for u in a.coeffs if u != zero]
    for v in a.region:
        if v == zero:
            continue
        acc = TRational(0)
        for u in support:
            if _leq(u, v):
                w = _sub(v, u)
                bw = inv.get(w)
                if bw:
                    acc = acc + a.coeffs[u] * bw * TRational.t_power(a.skew(u, w))
        if acc:
            inv[v] = -acc
    return TorusSeries(a.quiver, a.region, inv)


def dilog_coefficient(n: int) -> TRational:
    """t^(n^2) / |GL_n(F_q)| with q = t^2."""
    return TRational.t_power(n * n) / embed_count_poly(gl_order(n))


def dilog(quiver: Quiver, k: str, region: Region) -> TorusSeries:
    e = unit(quiver, k)
    coeffs = {}
    n = 0
    while True:
        v = tuple(n * x for x in e)
        if v not in region:
            break
        coeffs[v] = dilog_coefficient(n)
        n += 1
    return TorusSeries(quiver, region, coeffs)


def refined_exponent(quiver: Quiver, cut, v: Vec) -> int:
    return euler_form(quiver, v, v) + 2 * cut_form(quiver, cut, v, v)


def refined_dt(qp: QP, cut, v: Sequence[int], flt: CountFilter | None = None, **count_kw) -> TRational:
    v = tuple(v)
    n = count_polynomial(qp, cut, v, flt, **count_kw)
    return (TRational.t_power(refined_exponent(qp.quiver, cut, v)) * embed_count_poly(n)
            / embed_count_poly(group_order(v)))


def dt_series(qp: QP, cut, region: Region, flt: CountFilter | None = None, **count_kw) -> TorusSeries:
    coeffs = {}
    for v in region:
        coeffs[v] = TRational(1) if not any(v) else refined_dt(qp, cut, v, flt, **count_kw)
    return TorusSeries(qp.quiver, region, coeffs)


# central charges and HN types

LESS, EQUAL, GREATER = -1, 0, 1


class CentralCharge:
    def __init__(self, values: Sequence[tuple[Fraction, Fraction]]):
        self.values = tuple((Fraction(a), Fraction(b)) for a, b in values)
        for re, im in self.values:
            if not (im > 0 or (im == 0 and re > 0)):
                raise ValueError(f"charge {re}+{im}i is not in the upper half plane")

    @classmethod
    def parse(cls, text: str) -> CentralCharge:
        """Comma-separated values like '-1+1i, 1/2+3/4i'."""
        out = []
        for part in text.split(","):
            s = part.strip().replace(" ", "")
            if not s.endswith("i"):
                raise ValueError(f"charge {s!r} must end in i")
            s = s[:-1]
            cut = max(s.rfind("+"), s.rfind("-"))
            if cut <= 0:
                raise ValueError(f"charge {part!r} needs a real and an imaginary part")
            im = s[cut:]
            out.append((Fraction(s[:cut]), Fraction(im if im not in ("+", "-") else im + "1")))
        return cls(out)

    def __call__(self, v: Sequence[int]) -> tuple[Fraction, Fraction]:
        re = sum(x * z[0] for x, z in zip(v, self.values))
        im = sum(x * z[1] for x, z in zip(v, self.values))
        return re, im


def ray_compare(Z: CentralCharge, v: Sequence[int], w: Sequence[int]) -> int:
    """Compare Arg Z(v) with Arg Z(w); GREATER means v has the larger argument."""
    if not any(v) or not any(w):
        raise ZeroVector("nonzero vectors required")
    rv, iv = Z(v)
    rw, iw = Z(w)
    s = rw * iv - rv * iw
    return GREATER if s > 0 else LESS if s < 0 else EQUAL


def ray_of(Z: CentralCharge, v: Sequence[int]) -> tuple[int, int]:
    """Primitive integer direction of Z(v)."""
    if not any(v):
        raise ZeroVector("nonzero vector required")
    re, im = Z(v)
    den = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
    a, b = int(re * den), int(im * den)
    g = gcd(a, b)
    return a // g, b // g


def _nonzero_below(v: Vec) -> list[Vec]:
    return [u for u in itertools.product(*(range(x + 1) for x in v)) if any(u)]


def enumerate_hn_types(Z: CentralCharge, v: Sequence[int]) -> list[tuple[Vec, ...]]:
    v = tuple(v)
    if not any(v):
        raise ZeroVector("nonzero vector required")
    out: list[tuple[Vec, ...]] = []

    def rec(rest: Vec, prev: Vec | None, acc: list[Vec]):
        if not any(rest):
            out.append(tuple(acc))
            return
        for u in _nonzero_below(rest):
            if prev is None or ray_compare(Z, u, prev) == LESS:
                acc.append(u)
                rec(_sub(rest, u), u, acc)
                acc.pop()

    rec(v, None, [])
    return sorted(out, key=lambda t: (len(t), t))


def hn_factorize(A: TorusSeries, Z: CentralCharge) -> dict[tuple[int, int], TorusSeries]:
    """Split A into per-ray series so that their product in decreasing-argument order is A."""
    zero = tuple([0] * A.region.n)
    if A[zero] != TRational(1):
        raise NonUnitConstantTerm("constant term must be 1")
    S: dict[Vec, TRational] = {}
    memo: dict[tuple[Vec, Vec | None], TRational] = {}
    ray_cache: dict[Vec, tuple[int, int]] = {}

    def ray(u):
        if u not in ray_cache:
            ray_cache[u] = ray_of(Z, u)
        return ray_cache[u]

    def tail_sum(v: Vec, prev: Vec | None, exclude_whole: bool) -> TRational:
        # sum over HN types of v whose first part has argument below that of prev
        if not any(v):
            return TRational(1)
        key = (v, None if prev is None else ray(prev))
        if not exclude_whole and key in memo:
            return memo[key]
        acc = TRational(0)
        for u in _nonzero_below(v):
            if exclude_whole and u == v:
                continue
            if prev is not None and ray_compare(Z, u, prev) != LESS:
                continue
            su = S.get(u)
            if not su:
                continue
            rest = _sub(v, u)
            r = tail_sum(rest, u, False)
            if r:
                acc = acc + su * r * TRational.t_power(A.skew(u, rest))
        if not exclude_whole:
            memo[key] = acc
        return acc

    for v in A.region:
        if v == zero:
            continue
        S[v] = A[v] - tail_sum(v, None, True)
    factors: dict[tuple[int, int], dict[Vec, TRational]] = {}
    for v, c in S.items():
        factors.setdefault(ray(v), {zero: TRational(1)})
        if c:
            factors[ray(v)][v] = c
    return {r: TorusSeries(A.quiver, A.region, cs) for r, cs in factors.items()}


def _ray_order(rays: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    def cmp(a, b):
        s = b[0] * a[1] - a[0] * b[1]
        return -1 if s > 0 else 1 if s < 0 else 0

    return sorted(rays, key=cmp_to_key(cmp))


def hn_reconstruct(factors: Mapping[tuple[int, int], TorusSeries], Z: CentralCharge | None = None) -> TorusSeries:
    """Product of the ray series in strictly decreasing argument order."""
    rays = _ray_order(factors)
    if not rays:
        raise ValueError("no factors")
    first = factors[rays[0]]
    out = TorusSeries.one(first.quiver, first.region)
    for r in rays:
        out = series_mul(out, factors[r])
    return out


# mutation check

def transported_region(quiver: Quiver, k: str, region: Region) -> Region:
    """Downward closure of the images under phi of the region's vectors that stay nonnegative."""
    imgs = [phi(quiver, k, v) for v in region if in_mutation_domain(quiver, k, v)]
    return Region(imgs)


def wallcross_check(qp: QP, cut, k: str, region: Region, progress: Callable[[str], None] | None = None,
                    timing: bool = False, **count_kw) -> dict:
    """Compare E(s_k)^-1 A on the original side with A' E(s'_k)^-1 on the mutated side, coefficient by coefficient."""
    t0 = time.time()
    cut = frozenset(cut)
    q = qp.quiver
    if not is_strict_source(q, cut, k):
        raise NotStrictSource(f"vertex {k} is not a strict source")
    new_qp, new_cut = mutate_qp(qp, cut, k)
    q2 = new_qp.quiver
    # skew forms must agree under phi for the coefficient identification to respect products
    for u in region:
        for w in region:
            if skew_form(q, u, w) != skew_form(q2, phi(q, k, u), phi(q, k, w)):
                raise AssertionError(f"skew form not preserved at {u}, {w}")
    A = dt_series(qp, cut, region, **count_kw)
    if progress:
        progress(f"original side: {len(region)} coefficients")
    L = series_mul(series_inverse(dilog(q, k, region)), A)
    region2 = transported_region(q, k, region)
    A2 = dt_series(new_qp, new_cut, region2, **count_kw)
    if progress:
        progress(f"mutated side: {len(region2)} coefficients")
    R = series_mul(A2, series_inverse(dilog(q2, k, region2)))
    diffs = []
    n_support = n_equal = 0
    for v in region:
        if in_mutation_domain(q, k, v):
            n_equal += 1
            w = phi(q, k, v)
            if L[v] != R[w]:
                diffs.append({"check": "equality", "v": list(v), "phi_v": list(w),
                              "left": L[v].to_string(), "right": R[w].to_string()})
        else:
            n_support += 1
            if L[v]:
                diffs.append({"check": "support", "v": list(v), "left": L[v].to_string()})
    n_mirror = 0
    for w in region2:
        back = phi_inverse(q, k, w)
        if not all(x >= 0 for x in back):
            n_mirror += 1
            if R[w]:
                diffs.append({"check": "mutated_support", "w": list(w), "right": R[w].to_string()})
    report = {
        "pass": not diffs,
        "vertex": k,
        "cut": sorted(cut),
        "mutated_cut": sorted(new_cut),
        "product_order": "left = E(s_k)^-1 * A ; right = A' * E(s'_k)^-1",
        "region": region.describe(),
        "mutated_region": region2.describe(),
        "checked_equalities": n_equal,
        "checked_support": n_support,
        "checked_mutated_support": n_mirror,
        "first_counterexample": diffs[0] if diffs else None,
        "diffs": diffs,
    }
    if timing:
        report["seconds"] = round(time.time() - t0, 3)
    return report
