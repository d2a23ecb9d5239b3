"""Point counts of truncated-Jacobian module varieties over prime fields, and their counting polynomials."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .elimination import Stuck, count_polynomial_symbolic, qadd, qmul
from .errors import BudgetExceeded, HoldoutMismatch, NotACut
from .polys import clear_denominators, padd
from .qp import QP, dimvec, is_cut
from .qseries import CountPoly, lagrange_interpolate
from .relations import (System, brute_cost, brute_count, build_system, choose_linear_arrows,
                        fiber_cost, fiber_count, trace_fibers, trace_polynomial)

DEFAULT_BUDGET = 10 ** 9
# total enumeration cost below which count_polynomial interpolates instead of eliminating
INTERPOLATION_BUDGET = 2 * 10 ** 6


@dataclass(frozen=True)
class CountFilter:
    """'sub': no simple subobject at vertex (out-map injective); 'quot': no simple quotient (in-map surjective)."""

    kind: str
    vertex: str

    def __post_init__(self):
        if self.kind not in ("sub", "quot"):
            raise ValueError(f"unknown filter kind {self.kind!r}")


def SubSimpleVanishing(k: str) -> CountFilter:
    return CountFilter("sub", k)


def QuotSimpleVanishing(k: str) -> CountFilter:
    return CountFilter("quot", k)


def gl_order(n: int) -> CountPoly:
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = CountPoly([1])
    for i in range(n):
        out = out * CountPoly({n: 1, i: -1}.get(j, 0) for j in range(n + 1))
    return out


def group_order(v: Sequence[int]) -> CountPoly:
    out = CountPoly([1])
    for x in v:
        out = out * gl_order(x)
    return out


def gaussian_binomial(n: int, k: int) -> CountPoly:
    if k < 0 or k > n:
        return CountPoly()
    num = CountPoly([1])
    den = CountPoly([1])
    for i in range(k):
        num = num * CountPoly([-1] + [0] * (n - i - 1) + [1]) if n - i > 0 else num
        den = den * CountPoly([-1] + [0] * (i) + [1])
    return _exact_div(num, den)


def _exact_div(a: CountPoly, b: CountPoly) -> CountPoly:
    a_c = list(a.coeffs)
    b_c = list(b.coeffs)
    if not b_c:
        raise ZeroDivisionError
    out = [0] * max(len(a_c) - len(b_c) + 1, 0)
    lead = b_c[-1]
    for i in range(len(out) - 1, -1, -1):
        c, r = divmod(a_c[i + len(b_c) - 1], lead)
        if r:
            raise ValueError("inexact polynomial division")
        out[i] = c
        for j, x in enumerate(b_c):
            a_c[i + j] -= c * x
    if any(a_c):
        raise ValueError("inexact polynomial division")
    return CountPoly(out)


def mobius_weights(n: int) -> list[CountPoly]:
    """(-1)^d q^(d(d-1)/2) [n choose d]_q for d = 0..n."""
    out = []
    for d in range(n + 1):
        sign = -1 if d % 2 else 1
        out.append(CountPoly([0] * (d * (d - 1) // 2) + [sign]) * gaussian_binomial(n, d))
    return out


def _check(qp: QP, cut, v):
    cut = frozenset(cut)
    if not is_cut(qp, cut):
        raise NotACut(f"{sorted(cut)} is not a cut")
    return cut, dimvec(qp.quiver, v)


def _filter_data(qp: QP, cut, v, flt: CountFilter):
    q = qp.quiver
    k = flt.vertex
    vk = v[q.index(k)]
    if flt.kind == "sub":
        arrows = [a.id for a in q.arrows_from(k) if a.id not in cut]
        return ("sub", arrows, 0, vk)
    arrows = [a.id for a in q.arrows_to(k) if a.id not in cut]
    return ("quot", arrows, 1, vk)


def _zeroed(system: System, spec, d: int) -> System:
    kind, arrows, _, vk = spec
    zero = set()
    for aid in arrows:
        for i, row in enumerate(system.arrow_vars[aid]):
            for j, x in enumerate(row):
                if x is None:
                    continue
                if kind == "sub" and j < d:
                    zero.add(x)
                if kind == "quot" and i >= vk - d:
                    zero.add(x)
    return system.with_zeros(zero)


def _mobius_systems(system: System, spec) -> list[tuple[CountPoly, System]]:
    if spec is None:
        return [(CountPoly([1]), system)]
    vk = spec[3]
    return [(w, _zeroed(system, spec, d)) for d, w in enumerate(mobius_weights(vk))]


def _forbidden(spec) -> set[str]:
    return set(spec[1]) if spec else set()


def _plan(qp, cut, system: System, spec, p: int):
    """Cheapest enumeration plan at p and its cost: ('brute', None) or ('fiber', [(weight, system, S)])."""
    plans = []
    plans.append((brute_cost(system, p), "brute", None))
    parts = []
    total = 0
    for w, sub in _mobius_systems(system, spec):
        S = choose_linear_arrows(qp, cut, sub)
        total += fiber_cost(sub, S, p)
        parts.append((w, sub, S))
    plans.append((total, "fiber", parts))
    plans.sort(key=lambda t: (t[0], t[1]))
    return plans[0]


def _enumerate(qp, cut, system, spec, p, budget, method="auto") -> int:
    if method == "brute":
        return brute_count(system, p, budget, spec)
    if method == "fiber":
        parts = [(w, sub, choose_linear_arrows(qp, cut, sub)) for w, sub in _mobius_systems(system, spec)]
        return sum(w(p) * fiber_count(sub, S, p, budget) for w, sub, S in parts)
    cost, kind, parts = _plan(qp, cut, system, spec, p)
    if cost > budget:
        raise BudgetExceeded(cost, budget, "point count")
    if kind == "brute":
        return brute_count(system, p, budget, spec)
    return sum(w(p) * fiber_count(sub, S, p, budget) for w, sub, S in parts)


def enumeration_cost(qp: QP, cut, v, p: int, flt: CountFilter | None = None) -> int:
    cut, v = _check(qp, cut, v)
    system = build_system(qp, cut, v)
    spec = _filter_data(qp, cut, v, flt) if flt else None
    return _plan(qp, cut, system, spec, p)[0]


def count_points(qp: QP, cut, v, p: int, flt: CountFilter | None = None,
                 budget: int = DEFAULT_BUDGET, method: str = "auto") -> int:
    """Exact number of F_p-points of the truncated-Jacobian module variety (optionally filtered).

    method: 'brute' (exhaustive), 'fiber' (rank counts over an affine-linear arrow subset),
    'eliminate' (evaluate the symbolic counting polynomial), or 'auto'.
    """
    cut, v = _check(qp, cut, v)
    system = build_system(qp, cut, v)
    spec = _filter_data(qp, cut, v, flt) if flt else None
    if method in ("brute", "fiber"):
        return _enumerate(qp, cut, system, spec, p, budget, method)
    if method == "eliminate":
        poly, bad = _symbolic(system, spec)
        if any(b % p == 0 for b in bad):
            raise ValueError(f"prime {p} divides a constant used in elimination")
        return poly(p)
    cost, _, _ = _plan(qp, cut, system, spec, p)
    if cost <= budget:
        return _enumerate(qp, cut, system, spec, p, budget)
    try:
        poly, bad = _symbolic(system, spec)
    except Stuck:
        raise BudgetExceeded(cost, budget, "point count") from None
    if any(b % p == 0 for b in bad):
        raise BudgetExceeded(cost, budget, "point count")
    return poly(p)


def _symbolic(system: System, spec) -> tuple[CountPoly, set[int]]:
    total: dict[int, int] = {}
    bad: set[int] = set()
    for w, sub in _mobius_systems(system, spec):
        eqs = []
        for f in sub.equations:
            g = clear_denominators(f)
            eqs.append(g)
        for f in sub.equations:
            for c in f.values():
                den = getattr(c, "denominator", 1)
                if den != 1:
                    bad.add(int(den))
        res, b = count_polynomial_symbolic(eqs, sub.variables)
        bad |= b
        total = qadd(total, qmul(dict(enumerate(w.coeffs)), res))
    return CountPoly.from_dict({e: c for e, c in total.items() if c}), bad


def primes(start: int = 2):
    p = start
    while True:
        if p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1)):
            yield p
        p += 1


# record of every holdout verification made by count_polynomial in this process
HOLDOUT_LOG: list[dict] = []
_CACHE: dict = {}


def clear_cache():
    _CACHE.clear()


def count_polynomial(qp: QP, cut, v, flt: CountFilter | None = None, budget: int = DEFAULT_BUDGET,
                     method: str = "auto", sample_primes: Sequence[int] | None = None) -> CountPoly:
    """Counting polynomial N(q), checked against a direct count at a holdout prime.

    'interpolate' fits through D+1 primes (D = number of matrix entries on non-cut arrows);
    'eliminate' computes N symbolically; 'auto' interpolates when cheap and eliminates otherwise.
    """
    cut, v = _check(qp, cut, v)
    key = (qp.quiver, qp.potential, cut, v, flt, method, tuple(sample_primes or ()))
    if key in _CACHE:
        return _CACHE[key]
    system = build_system(qp, cut, v)
    spec = _filter_data(qp, cut, v, flt) if flt else None
    D = system.nvars
    chosen = method
    if method == "auto":
        ps = list(sample_primes) if sample_primes else _first_primes(D + 2)
        est = sum(_plan(qp, cut, system, spec, p)[0] for p in ps)
        chosen = "interpolate" if est <= min(INTERPOLATION_BUDGET, budget) else "eliminate"
    if chosen == "eliminate":
        try:
            poly = _eliminate_checked(qp, cut, v, system, spec, budget)
        except Stuck:
            if method == "eliminate":
                raise
            poly = _interpolate(qp, cut, v, system, spec, budget, sample_primes)
    elif chosen == "interpolate":
        poly = _interpolate(qp, cut, v, system, spec, budget, sample_primes)
    else:
        raise ValueError(f"unknown method {method!r}")
    _CACHE[key] = poly
    return poly


def _first_primes(n: int) -> list[int]:
    out = []
    for p in primes():
        if len(out) == n:
            return out
        out.append(p)
    return out


def _log(qp, cut, v, flt, how, p, expected, got):
    rec = {"vertices": list(qp.quiver.vertices), "cut": sorted(cut), "v": list(v),
           "filter": None if flt is None else [flt[0], flt[3]], "method": how, "prime": p,
           "predicted": expected, "counted": got, "ok": expected == got}
    HOLDOUT_LOG.append(rec)
    if expected != got:
        raise HoldoutMismatch(f"v={list(v)}: polynomial gives {expected} at p={p}, direct count {got}")


def _interpolate(qp, cut, v, system, spec, budget, sample_primes):
    D = system.nvars
    ps = list(sample_primes) if sample_primes else _first_primes(D + 2)
    if len(ps) < D + 2:
        from .errors import InsufficientSamples

        raise InsufficientSamples(f"need {D + 2} primes (D+1 samples and a holdout), got {len(ps)}")
    samples = [(p, _enumerate(qp, cut, system, spec, p, budget)) for p in ps[: D + 1]]
    poly = lagrange_interpolate(samples, D)
    h = ps[D + 1]
    _log(qp, cut, v, spec, "interpolate", h, poly(h), _enumerate(qp, cut, system, spec, h, budget))
    return poly


def _eliminate_checked(qp, cut, v, system, spec, budget):
    poly, bad = _symbolic(system, spec)
    for p in primes():
        if p > 200:
            _log_skip(qp, cut, v, spec)
            break
        if any(b % p == 0 for b in bad):
            continue
        cost = _plan(qp, cut, system, spec, p)[0]
        if cost > budget:
            _log_skip(qp, cut, v, spec)
            break
        _log(qp, cut, v, spec, "eliminate", p, poly(p), _enumerate(qp, cut, system, spec, p, budget))
        break
    return poly


def _log_skip(qp, cut, v, spec):
    HOLDOUT_LOG.append({"vertices": list(qp.quiver.vertices), "cut": sorted(cut), "v": list(v),
                        "filter": None if spec is None else [spec[0], spec[3]], "method": "eliminate",
                        "prime": None, "ok": None})


def trace_counts(qp: QP, v, p: int, budget: int = DEFAULT_BUDGET, method: str = "auto") -> tuple[int, int]:
    """Sizes of the fibres over 0 and 1 of the trace of the potential on all representations.

    'brute' enumerates every arrow-matrix tuple; 'eliminate' counts the hypersurfaces f = 0 and
    f = 1 symbolically; 'auto' enumerates when that is cheap and eliminates otherwise.
    """
    v = dimvec(qp.quiver, v)
    system, f = trace_polynomial(qp, v)
    cost = p ** system.nvars * (len(f) + 1)
    if method == "brute" or (method == "auto" and cost <= INTERPOLATION_BUDGET):
        return trace_fibers(qp, v, p, budget)
    if method not in ("auto", "eliminate"):
        raise ValueError(f"unknown method {method!r}")
    try:
        polys = trace_polynomials(qp, v)
    except Stuck:
        if method == "eliminate":
            raise
        return trace_fibers(qp, v, p, budget)
    (zero, one), bad = polys
    if any(b % p == 0 for b in bad):
        if method == "eliminate":
            raise ValueError(f"prime {p} divides a constant used in elimination")
        return trace_fibers(qp, v, p, budget)
    return zero(p), one(p)


def trace_polynomials(qp: QP, v) -> tuple[tuple[CountPoly, CountPoly], set[int]]:
    """Counting polynomials of the fibres f = 0 and f = 1 of the trace function, with the excluded primes."""
    v = dimvec(qp.quiver, v)
    system, f = trace_polynomial(qp, v)
    bad = {Fraction(c).denominator for c in f.values()} - {1}
    out = []
    for target in (0, 1):
        g = clear_denominators(padd(f, {(): -target}) if target else f)
        res, b = count_polynomial_symbolic([g] if g else [], system.variables)
        bad |= b
        out.append(CountPoly.from_dict(res))
    return (out[0], out[1]), bad
