"""Exact numerics: rational intervals, univariate polynomials over Q and
certified real root isolation.

Rationals are plain :class:`fractions.Fraction` values, which already keep
``gcd(num, den) == 1`` and ``den > 0``.  Nothing in this module ever touches a
float; irrational quantities (square roots, roots of cubics, arctangents) are
carried as closed intervals with rational endpoints that can be narrowed on
demand.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .errors import CertificationError, PreconditionError

DEFAULT_WIDTH = Fraction(1, 2**128)

RationalLike = Union[Fraction, int, str]

_POWER_RE = re.compile(r"^\s*([+-]?\d+)(?:\^(-?\d+))?(?:\s*/\s*(\d+)(?:\^(\d+))?)?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, decimals, and power forms such as ``"1/2^128"``."""
    m = _POWER_RE.match(text)
    if m:
        base, exp, den, den_exp = m.groups()
        num = Fraction(int(base)) ** int(exp) if exp else Fraction(int(base))
        if den is not None:
            d = int(den) ** int(den_exp) if den_exp else int(den)
            if d == 0:
                raise ValueError(f"zero denominator in {text!r}")
            num /= d
        return num
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {text!r}") from exc


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def format_rational(x: Fraction) -> str:
    return str(x)


def sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def exact_sqrt(q: Fraction) -> Fraction | None:
    """Return sqrt(q) if it is rational, else None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def sign_surd(x: Fraction, y: Fraction, q: Fraction) -> int:
    """Exact sign of x + y*sqrt(q) for rationals x, y and q >= 0."""
    if q < 0:
        raise ValueError("negative radicand")
    sx = sign(x)
    sy = sign(y) if q else 0
    if sy == 0:
        return sx
    if sx == 0 or sx == sy:
        return sy
    d = x * x - y * y * q
    return sx if d > 0 else (sy if d < 0 else 0)


# -- intervals ----------------------------------------------------------------


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval ``[lo, hi]`` with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_fraction(self.lo), as_fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: RationalLike) -> "RationalInterval":
        x = as_fraction(x)
        return RationalInterval(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, RationalInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        x = as_fraction(x)
        return self.lo <= x <= self.hi

    def sign(self) -> int | None:
        """Sign shared by every point, or None when the interval straddles 0."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def _coerce(self, other) -> "RationalInterval":
        if isinstance(other, RationalInterval):
            return other
        return RationalInterval.point(other)

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __add__(self, other):
        o = self._coerce(other)
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return RationalInterval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o.is_point():
            c = o.lo
            return RationalInterval(min(self.lo * c, self.hi * c), max(self.lo * c, self.hi * c))
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalInterval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * RationalInterval(1 / o.hi, 1 / o.lo)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        if n == 0:
            return RationalInterval.point(1)
        ends = (self.lo**n, self.hi**n)
        if n % 2 == 0 and self.lo < 0 < self.hi:
            return RationalInterval(0, max(ends))
        return RationalInterval(min(ends), max(ends))

    def to_json(self) -> list[str]:
        return [format_rational(self.lo), format_rational(self.hi)]


@dataclass(frozen=True)
class RootInterval(RationalInterval):
    """An isolating interval for one distinct real root, with multiplicity."""

    multiplicity: int = 1


@dataclass(frozen=True)
class RealInterval:
    """Interval of the real line with optional open ends; ``None`` means infinite."""

    lo: Fraction | None = None
    hi: Fraction | None = None
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", as_fraction(self.lo))
        else:
            object.__setattr__(self, "lo_closed", False)
        if self.hi is not None:
            object.__setattr__(self, "hi", as_fraction(self.hi))
        else:
            object.__setattr__(self, "hi_closed", False)

    @classmethod
    def closed(cls, lo, hi):
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo, hi):
        return cls(lo, hi, False, False)

    def contains(self, x: Fraction) -> bool:
        if self.lo is not None and (x < self.lo or (x == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (x > self.hi or (x == self.hi and not self.hi_closed)):
            return False
        return True

    def is_empty(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    def intersect(self, other: "RealInterval") -> "RealInterval":
        lo, lo_c = self.lo, self.lo_closed
        if other.lo is not None and (lo is None or other.lo > lo):
            lo, lo_c = other.lo, other.lo_closed
        elif other.lo is not None and other.lo == lo:
            lo_c = lo_c and other.lo_closed
        hi, hi_c = self.hi, self.hi_closed
        if other.hi is not None and (hi is None or other.hi < hi):
            hi, hi_c = other.hi, other.hi_closed
        elif other.hi is not None and other.hi == hi:
            hi_c = hi_c and other.hi_closed
        return RealInterval(lo, hi, lo_c, hi_c)


EVERYTHING = RealInterval()
NOTHING = RealInterval(Fraction(1), Fraction(0))


# -- polynomials --------------------------------------------------------------


class Poly:
    """Univariate polynomial with rational coefficients, ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: RationalLike) -> "Poly":
        return cls((c,))

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, RationalInterval) else RationalInterval.point(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly.constant(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        other = other if isinstance(other, Poly) else Poly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.constant(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = as_fraction(other)
            return Poly(c * a for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def derivative(self) -> "Poly":
        return Poly(i * c for i, c in enumerate(self.coeffs) if i)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - dq - 1, -1, -1):
            coef = rem[k + dq] / lead
            quot[k] = coef
            if coef:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= coef * b
        return Poly(quot), Poly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self * (1 / self.leading)

    def integer_leading(self) -> int:
        """Leading coefficient of the primitive integer multiple with positive lead."""
        den = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = math.gcd(*ints)
        return abs(ints[-1] // g)

    def compose_neg(self) -> "Poly":
        """p(-x)."""
        return Poly(c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs))


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero polynomial when both inputs vanish)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def square_free_factors(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's square-free decomposition: ``p ~ prod f_i ** i``."""
    if p.degree < 1:
        return []
    out = []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.derivative()
    i = 1
    while b.degree >= 1:
        g = poly_gcd(b, d)
        if g.degree >= 1:
            out.append((g, i))
        b = b // g
        c = d // g
        d = c - b.derivative()
        i += 1
    return out


def square_free_part(p: Poly) -> Poly:
    if p.degree < 1:
        return p
    return (p // poly_gcd(p, p.derivative())).monic()


# -- sign evaluation & Sturm sequences ---------------------------------------


def sign_at(p: Poly, x: RationalLike) -> int:
    """Exact sign of p(x)."""
    return sign(p(as_fraction(x)))


def sign_at_sqrt(p: Poly, q: Fraction) -> int:
    """Exact sign of p(sqrt(q)) for rational q >= 0."""
    even = Fraction(0)
    odd = Fraction(0)
    qk = Fraction(1)
    for i in range(0, len(p.coeffs), 2):
        even += p.coeffs[i] * qk
        if i + 1 < len(p.coeffs):
            odd += p.coeffs[i + 1] * qk
        qk *= q
    return sign_surd(even, odd, q)


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    seq.pop()
    return seq


def _sign_at_inf(p: Poly, positive: bool) -> int:
    s = sign(p.leading)
    return s if positive or p.degree % 2 == 0 else -s


def sign_variations(seq: Sequence[Poly], x) -> int:
    """Sign changes of the sequence at x (``math.inf``/``-math.inf`` allowed)."""
    if x == math.inf or x == -math.inf:
        signs = [_sign_at_inf(q, x > 0) for q in seq]
    else:
        signs = [sign(q(x)) for q in seq]
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(p: Poly, lo=-math.inf, hi=math.inf) -> int:
    """Number of distinct real roots in ``(lo, hi]`` (Sturm)."""
    if p.is_zero():
        raise PreconditionError("undefined root set: zero polynomial")
    seq = sturm_sequence(square_free_part(p))
    return sign_variations(seq, lo) - sign_variations(seq, hi)


def root_bound(p: Poly) -> Fraction:
    """A power of two strictly exceeding the modulus of every root (Cauchy)."""
    lead = abs(p.leading)
    bound = 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0))
    b = Fraction(1)
    while b <= bound:
        b *= 2
    return b


def _bisect(f: Poly, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    # f square-free with f(lo) * f(hi) < 0
    slo = sign(f(lo))
    while hi - lo > width:
        m = (lo + hi) / 2
        sm = sign(f(m))
        if sm == 0:
            return m, m
        if sm == slo:
            lo = m
        else:
            hi = m
    return lo, hi


def _snap_rational(f: Poly, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Collapse an isolating interval to a point when its root is rational.

    A rational root p/q of the primitive integer form of f has q dividing the
    leading coefficient L, so L * root is an integer; once L * width < 1 the
    only candidate is ceil(L * lo) / L.
    """
    lead = f.integer_leading()
    lo, hi = _bisect(f, lo, hi, Fraction(1, 2 * lead))
    if lo == hi:
        return lo, hi
    k = math.ceil(lead * lo)
    if k <= lead * hi:
        cand = Fraction(k, lead)
        if f(cand) == 0:
            return cand, cand
    return lo, hi


def _isolate_square_free(f: Poly) -> list[tuple[Fraction, Fraction]]:
    seq = sturm_sequence(f)
    big = root_bound(f)
    out = []
    stack = [(-big, big)]
    while stack:
        lo, hi = stack.pop()
        n = sign_variations(seq, lo) - sign_variations(seq, hi)
        if n == 0:
            continue
        if n == 1:
            out.append(_snap_rational(f, lo, hi))
            continue
        m = (lo + hi) / 2
        if f(m) != 0:
            stack += [(lo, m), (m, hi)]
            continue
        out.append((m, m))
        d = (hi - lo) / 4
        while True:
            a, b = m - d, m + d
            if f(a) and f(b) and sign_variations(seq, a) - sign_variations(seq, b) == 1:
                break
            d /= 2
        stack += [(lo, a), (b, hi)]
    return out


def isolate_real_roots(p: Poly, width: Fraction | None = None) -> list[RootInterval]:
    """Certified isolating intervals for the distinct real roots of p.

    Intervals are pairwise disjoint and sorted; rational roots come back as
    degenerate intervals.  When ``width`` is given every non-degenerate
    interval is refined to at most that width.
    """
    if p.is_zero():
        raise PreconditionError("undefined root set: zero polynomial")
    found = []
    for factor, mult in square_free_factors(p):
        for lo, hi in _isolate_square_free(factor):
            found.append([lo, hi, factor, mult])
    found.sort(key=lambda r: (r[0], r[1]))
    # roots of different factors are distinct: shrink until disjoint
    changed = True
    while changed:
        changed = False
        for left, right in zip(found, found[1:]):
            if left[1] >= right[0]:
                victim = left if left[1] - left[0] >= right[1] - right[0] else right
                f = victim[2]
                victim[0], victim[1] = _bisect(f, victim[0], victim[1], (victim[1] - victim[0]) / 2)
                changed = True
        found.sort(key=lambda r: (r[0], r[1]))
    if width is not None:
        for r in found:
            if r[0] != r[1]:
                r[0], r[1] = _bisect(r[2], r[0], r[1], width)
    return [RootInterval(lo, hi, mult) for lo, hi, _, mult in found]


def refine_root(p: Poly, iv: RationalInterval, width: Fraction = DEFAULT_WIDTH) -> RationalInterval:
    """Narrow an isolating interval of p to at most ``width`` by exact bisection."""
    if p.is_zero():
        raise PreconditionError("undefined root set: zero polynomial")
    if iv.is_point():
        if p(iv.lo) != 0:
            raise PreconditionError(f"[{iv.lo}, {iv.lo}] does not contain a root")
        return iv
    f = square_free_part(p)
    flo, fhi = sign(f(iv.lo)), sign(f(iv.hi))
    seq = sturm_sequence(f)
    count = sign_variations(seq, iv.lo) - sign_variations(seq, iv.hi) + (flo == 0)
    if count != 1:
        raise PreconditionError(f"interval [{iv.lo}, {iv.hi}] holds {count} roots, expected exactly one")
    if flo == 0:
        return RationalInterval.point(iv.lo)
    if fhi == 0:
        return RationalInterval.point(iv.hi)
    lo, hi = _bisect(f, iv.lo, iv.hi, width)
    mult = getattr(iv, "multiplicity", None)
    if mult is not None:
        return RootInterval(lo, hi, mult)
    return RationalInterval(lo, hi)


# -- square roots and arctangents as intervals --------------------------------


def sqrt_interval(q: Fraction, width: Fraction = DEFAULT_WIDTH) -> RationalInterval:
    """Enclosure of sqrt(q); exact point when q is a rational square."""
    if q < 0:
        raise PreconditionError("square root of a negative number")
    r = exact_sqrt(q)
    if r is not None:
        return RationalInterval.point(r)
    n, d = q.numerator, q.denominator
    k = 0
    while Fraction(1, d * 2**k) > width:
        k += 1
    s = math.isqrt(n * d * 4**k)
    return RationalInterval(Fraction(s, d * 2**k), Fraction(s + 1, d * 2**k))


def _round_out(iv: RationalInterval, bits: int) -> RationalInterval:
    scale = 2**bits
    return RationalInterval(
        Fraction(math.floor(iv.lo * scale), scale), Fraction(math.ceil(iv.hi * scale), scale)
    )


def _atan_small(x: Fraction, bits: int) -> RationalInterval:
    # Euler's series, all terms share the sign of x and shrink by < x^2/(1+x^2) <= 1/2
    if x == 0:
        return RationalInterval.point(0)
    y = x * x / (1 + x * x)
    term = x / (1 + x * x)
    total = Fraction(0)
    eps = Fraction(1, 2 ** (bits + 2))
    n = 0
    while True:
        total += term
        term = term * y * (2 * n + 2) / (2 * n + 3)
        n += 1
        tail = abs(term) / (1 - y)
        if tail < eps:
            break
    return _round_out(RationalInterval(total - tail, total + tail), bits + 2)


@lru_cache(maxsize=32)
def pi_interval(bits: int = 64) -> RationalInterval:
    """Enclosure of pi via Machin's formula."""
    a = _atan_small(Fraction(1, 5), bits + 6)
    b = _atan_small(Fraction(1, 239), bits + 6)
    return 16 * a - 4 * b


def atan_interval(x: RationalLike, bits: int = 64) -> RationalInterval:
    x = as_fraction(x)
    if abs(x) <= 1:
        return _atan_small(x, bits)
    half_pi = pi_interval(bits + 2) / 2
    return (half_pi if x > 0 else -half_pi) - _atan_small(1 / x, bits)


def arg_over_pi(re: Fraction, im: Fraction, bits: int = 64) -> RationalInterval:
    """Enclosure of Arg(re + i im)/pi in (-1, 1]; exact on the axes."""
    if re == 0 and im == 0:
        raise PreconditionError("argument of zero is undefined")
    if im == 0:
        return RationalInterval.point(0 if re > 0 else 1)
    if re == 0:
        return RationalInterval.point(Fraction(1, 2) if im > 0 else Fraction(-1, 2))
    if im < 0:
        return -arg_over_pi(re, -im, bits)
    pi = pi_interval(bits + 4)
    if abs(re) <= im:
        out = Fraction(1, 2) - atan_interval(re / im, bits + 4) / pi
    elif re > 0:
        out = atan_interval(im / re, bits + 4) / pi
    else:
        out = 1 + atan_interval(im / re, bits + 4) / pi
    return _round_out(out, bits)


def require_width(iv: RationalInterval, width: Fraction, what: str) -> RationalInterval:
    if iv.width > width:
        raise CertificationError(f"{what}: achieved width {iv.width} exceeds {width}")
    return iv
