"""Exact scalars: rational functions in t with q = t^2, and integer polynomials in q."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from flint import fmpq, fmpq_poly

from .errors import DivideByZero, HoldoutMismatch, InsufficientSamples, NonIntegerCoefficients


class CountPoly:
    """Integer polynomial in q, stored as a coefficient tuple (constant term first)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def from_dict(cls, d: dict[int, int]) -> CountPoly:
        if not d:
            return cls()
        c = [0] * (max(d) + 1)
        for e, v in d.items():
            if e < 0:
                raise ValueError("negative exponent in CountPoly")
            c[e] += v
        return cls(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, q: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = CountPoly([other])
        return isinstance(other, CountPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: CountPoly) -> CountPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return CountPoly(x + y for x, y in zip(a, b))

    def __neg__(self) -> CountPoly:
        return CountPoly(-x for x in self.coeffs)

    def __sub__(self, other: CountPoly) -> CountPoly:
        return self + (-other)

    def __mul__(self, other: CountPoly) -> CountPoly:
        if not self.coeffs or not other.coeffs:
            return CountPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return CountPoly(out)

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self):
        return f"CountPoly({format_poly(self.coeffs, 'q')})"

    def __str__(self):
        return format_poly(self.coeffs, "q")


def format_poly(coeffs: Sequence, var: str) -> str:
    """Descending-order rendering like 't^4 - 2*t + 1/3'."""
    parts: list[str] = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = Fraction(int(coeffs[e].p), int(coeffs[e].q)) if isinstance(coeffs[e], fmpq) else Fraction(coeffs[e])
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mono = var if e == 1 else f"{var}^{e}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


_T = fmpq_poly([0, 1])
_ONE = fmpq_poly([1])


def _valuation(p: fmpq_poly) -> int:
    c = p.coeffs()
    for i, x in enumerate(c):
        if x != 0:
            return i
    raise ValueError("valuation of zero")


def _as_poly(x) -> fmpq_poly:
    items = list(x) if isinstance(x, (list, tuple)) else [x]
    return fmpq_poly([fmpq(c.numerator, c.denominator) if isinstance(c, Fraction) else c for c in items])


class TRational:
    """Element of Q(t), kept as t^e * num/den with num, den prime to t, den monic, gcd 1."""

    __slots__ = ("num", "den", "e", "_h")

    def __init__(self, num=0, den=1, e: int = 0, _canon: bool = False):
        if not isinstance(num, fmpq_poly):
            num = _as_poly(num)
        if not isinstance(den, fmpq_poly):
            den = _as_poly(den)
        self._h = None
        if _canon:
            self.num, self.den, self.e = num, den, e
            return
        if den.is_zero():
            raise DivideByZero("zero denominator")
        if num.is_zero():
            self.num, self.den, self.e = fmpq_poly([0]), _ONE, 0
            return
        vn, vd = _valuation(num), _valuation(den)
        if vn:
            num = num.right_shift(vn)
        if vd:
            den = den.right_shift(vd)
        e += vn - vd
        if not den.is_constant():
            g = num.gcd(den)
            if not g.is_one():
                num = num // g
                den = den // g
        lc = den.leading_coefficient()
        if lc != 1:
            num = num / lc
            den = den / lc
        self.num, self.den, self.e = num, den, e

    @classmethod
    def t_power(cls, m: int) -> TRational:
        return cls(_ONE, _ONE, m, _canon=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def _coerce(self, other) -> TRational:
        if isinstance(other, TRational):
            return other
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return TRational(fmpq_poly([fmpq(f.numerator, f.denominator)]))
        if isinstance(other, CountPoly):
            return embed_count_poly(other)
        return NotImplemented

    def __add__(self, other) -> TRational:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        m = min(self.e, o.e)
        a = self.num.left_shift(self.e - m) if self.e > m else self.num
        b = o.num.left_shift(o.e - m) if o.e > m else o.num
        if self.den == o.den:
            return TRational(a + b, self.den, m)
        return TRational(a * o.den + b * self.den, self.den * o.den, m)

    __radd__ = __add__

    def __neg__(self) -> TRational:
        return TRational(-self.num, self.den, self.e, _canon=True)

    def __sub__(self, other) -> TRational:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other) -> TRational:
        return (-self) + other

    def __mul__(self, other) -> TRational:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.is_zero() or o.is_zero():
            return TRational()
        if self.den.is_one() and o.den.is_one():
            return TRational(self.num * o.num, _ONE, self.e + o.e, _canon=True)
        return TRational(self.num * o.num, self.den * o.den, self.e + o.e)

    __rmul__ = __mul__

    def inverse(self) -> TRational:
        if self.is_zero():
            raise DivideByZero("division by zero TRational")
        return TRational(self.den, self.num, -self.e)

    def __truediv__(self, other) -> TRational:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other) -> TRational:
        return self.inverse() * other

    def __pow__(self, n: int) -> TRational:
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return TRational(1)
        return TRational(self.num ** n, self.den ** n, self.e * n, _canon=True)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.e == o.e and self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.e, str(self.num), str(self.den)))
        return self._h

    def numerator_denominator(self) -> tuple[fmpq_poly, fmpq_poly]:
        """Polynomials N, D in t with value N/D (the t-power folded into one side)."""
        if self.e >= 0:
            return self.num.left_shift(self.e) if self.e else self.num, self.den
        return self.num, self.den.left_shift(-self.e)

    def to_string(self) -> str:
        n, d = self.numerator_denominator()
        ns = format_poly(n.coeffs(), "t")
        if d.is_one():
            return ns
        ds = format_poly(d.coeffs(), "t")
        if len(n.coeffs()) - sum(1 for c in n.coeffs() if c == 0) > 1:
            ns = f"({ns})"
        if len(d.coeffs()) - sum(1 for c in d.coeffs() if c == 0) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"TRational({self.to_string()})"

    @classmethod
    def parse(cls, s: str) -> TRational:
        """Inverse of to_string for strings of the form 'N' or 'N/D' in the variable t."""
        import sympy

        t = sympy.Symbol("t")
        expr = sympy.sympify(s.replace("^", "**"), locals={"t": t})
        n, d = sympy.fraction(sympy.together(expr))
        pn = sympy.Poly(n, t)
        pd = sympy.Poly(d, t)
        if pn.is_zero:
            return cls(0)

        def conv(p):
            c = [0] * (p.degree() + 1)
            for (k,), v in p.terms():
                c[k] = fmpq(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1]))
            return fmpq_poly(c)

        return cls(conv(pn), conv(pd))


def embed_count_poly(p: CountPoly) -> TRational:
    """q -> t^2."""
    c = [0] * (2 * len(p.coeffs))
    for i, x in enumerate(p.coeffs):
        c[2 * i] = x
    return TRational(fmpq_poly(c))


def half_lefschetz_power(m: int) -> TRational:
    """t^m, the square root of the Lefschetz class raised to m."""
    return TRational.t_power(m)


def lagrange_interpolate(samples: Sequence[tuple[int, int]], degree_bound: int) -> CountPoly:
    """Interpolating polynomial of degree <= degree_bound through the given (x, y) samples.

    Uses the first degree_bound + 1 samples; the remaining ones must agree.
    """
    pts = list(dict.fromkeys((int(x), int(y)) for x, y in samples))
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("conflicting values at one sample point")
    if len(pts) < degree_bound + 1:
        raise InsufficientSamples(f"need {degree_bound + 1} points, got {len(pts)}")
    use = pts[: degree_bound + 1]
    # Newton divided differences over the rationals
    n = len(use)
    xs = [Fraction(x) for x, _ in use]
    coef = [Fraction(y) for _, y in use]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        new = [Fraction(0)] * n
        for k in range(n - 1):
            new[k + 1] += poly[k]
        for k in range(n):
            new[k] -= xs[i] * poly[k]
        new[0] += coef[i]
        poly = new
    if any(c.denominator != 1 for c in poly):
        raise NonIntegerCoefficients(f"interpolant has non-integer coefficients: {poly}")
    out = CountPoly(int(c) for c in poly)
    for x, y in pts[degree_bound + 1:]:
        if out(x) != y:
            raise HoldoutMismatch(f"extra sample ({x}, {y}) disagrees with interpolant")
    return out
