"""Independent reference computations built on sympy.

Nothing here imports the package's algorithms; only plain data (tuples of
Fractions) crosses the boundary.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import sympy as sp

X = sp.Symbol("x", real=True)


def rat(q) -> sp.Rational:
    q = Fraction(q)
    return sp.Rational(q.numerator, q.denominator)


def frac(r) -> Fraction:
    r = sp.Rational(r)
    return Fraction(int(r.p), int(r.q))


# -- twists and pairings --------------------------------------------------------


def twist_series(c, beta):
    """Coefficients of exp(-beta H) * sum c_i H^i / (graded), via a truncated series."""
    h = sp.Symbol("H")
    n = len(c) - 1
    ch = sum(rat(ci) * h**i for i, ci in enumerate(c))
    series = sp.series(sp.exp(-rat(beta) * h), h, 0, n + 1).removeO()
    prod = sp.expand(ch * series)
    return tuple(frac(prod.coeff(h, i)) for i in range(n + 1))


def euler_hrr(v, w, h):
    """chi(v, w) = integral of ch(v)^dual ch(w) on an abelian threefold (td = 1)."""
    dual = [rat(x) * (-1) ** i for i, x in enumerate(v)]
    total = sum(dual[i] * rat(w[3 - i]) for i in range(4))
    return frac(total / h)


# -- real roots ------------------------------------------------------------------


def sympy_poly(coeffs):
    return sp.Poly(list(reversed([rat(c) for c in coeffs])), X)


def real_roots(coeffs):
    """Distinct real roots as sympy algebraic numbers, ascending."""
    return sorted(set(sp.real_roots(sympy_poly(coeffs))), key=lambda r: sp.N(r, 50))


def count_roots(coeffs, lo, hi):
    """Distinct real roots in [lo, hi]."""
    p = sympy_poly(coeffs)
    sqf = sp.Poly(sp.sqf_part(p.as_expr()), X)
    return sqf.count_roots(rat(lo), rat(hi))


# -- walls ---------------------------------------------------------------------------


def _phi_pieces(model):
    """[(sympy interval, expr)] covering the real line or the given pieces,
    with the left piece winning at shared endpoints."""
    if model is None:
        return [(sp.Interval(-sp.oo, sp.oo), X**2 / 2)]
    out = []
    prev = None
    for lo, hi, coeffs in model:
        left_open = prev is not None and prev == lo
        expr = sum(rat(c) * X**i for i, c in enumerate(coeffs))
        out.append((sp.Interval(rat(lo), rat(hi), left_open, False), expr))
        prev = hi
    return out


def _linear_gt(coef, const, strict=True):
    """{x : coef*x + const > 0} (>= when not strict) as a sympy set."""
    if coef == 0:
        return sp.S.Reals if (const > 0 or (const == 0 and not strict)) else sp.S.EmptySet
    root = -const / coef
    if coef > 0:
        return sp.Interval(root, sp.oo, strict, True)
    return sp.Interval(-sp.oo, root, True, strict)


def _negative_set(expr):
    """{x : expr(x) < 0} for a polynomial expression, from its real roots."""
    poly = sp.Poly(expr, X)
    if poly.degree() <= 0:
        return sp.S.Reals if poly.LC() < 0 else sp.S.EmptySet
    roots = sorted(set(sp.real_roots(poly)), key=lambda r: sp.N(r, 50))
    cuts = [-sp.oo, *roots, sp.oo]
    out = sp.S.EmptySet
    for lo, hi in zip(cuts, cuts[1:]):
        if lo == -sp.oo and hi == sp.oo:
            probe = sp.Integer(0)
        elif lo == -sp.oo:
            probe = hi - 1
        elif hi == sp.oo:
            probe = lo + 1
        else:
            probe = (lo + hi) / 2
        if sp.nsimplify(poly.as_expr().subs(X, probe)) < 0:
            out = out | sp.Interval(lo, hi, True, True)
    return out


def wall_hits_box(v, w, box, model=None) -> bool:
    """Is there (beta, alpha) in the box, on the wall of (v, w), above the model,
    with 0 < Im Z(w) < Im Z(v)?  Decided with exact sympy set arithmetic."""
    v0, v1, v2 = (rat(x) for x in v)
    w0, w1, w2 = (rat(x) for x in w)
    b1, b2, amax = (rat(x) for x in box)
    al = sp.Symbol("alpha", real=True)
    cross = sp.expand((-v2 + al * v0) * (w1 - X * w0) - (-w2 + al * w0) * (v1 - X * v0))
    dom = sp.Interval(b1, b2) & _linear_gt(-w0, w1) & _linear_gt(w0 - v0, v1 - w1)
    if dom.is_empty:
        return False
    a_coef = cross.coeff(al, 1)
    rest = sp.expand(cross - a_coef * al)
    if a_coef == 0:
        # vertical line in the (beta, alpha) plane
        c1, c0 = rest.coeff(X, 1), rest.coeff(X, 0)
        if c1 == 0:
            return False
        beta = -c0 / c1
        if beta not in dom:
            return False
        return any(beta in iv and expr.subs(X, beta) < amax for iv, expr in _phi_pieces(model))
    alpha_of = sp.expand(-rest / a_coef)
    dom = dom & _linear_gt(-alpha_of.coeff(X, 1), amax - alpha_of.coeff(X, 0), strict=False)
    if dom.is_empty:
        return False
    for interval, expr in _phi_pieces(model):
        if not (dom & interval & _negative_set(expr - alpha_of)).is_empty:
            return True
    return False


def oracle_box(v, box, max_rank, alpha_min, den):
    """Rectangular candidate ranges for w, from 0 < Im Z(w) < Im Z(v) on the box and
    Z(w) = t Z(v) with 0 < t < 1, alpha in [alpha_min, alpha_max]."""
    v0, v1, v2 = (Fraction(x) for x in v)
    b1, b2, amax = (Fraction(x) for x in box)
    w0s = lattice_range(-max_rank, max_rank, den[0])
    lo1 = min(b * w0 for b in (b1, b2) for w0 in w0s)
    hi1 = max(v1 - b * (v0 - w0) for b in (b1, b2) for w0 in w0s)
    corners = [a * w0 - t * (a * v0 - v2) for a in (alpha_min, amax) for t in (0, 1) for w0 in w0s]
    return w0s, lattice_range(lo1, hi1, den[1]), lattice_range(min(corners), max(corners), den[2])


def primitive(coeffs):
    fr = [Fraction(c) for c in coeffs]
    from math import gcd, lcm

    den = lcm(*(f.denominator for f in fr))
    ints = [int(f * den) for f in fr]
    g = gcd(*ints)
    ints = [i // g for i in ints]
    lead = next(i for i in ints if i)
    return tuple(-i for i in ints) if lead < 0 else tuple(ints)


def brute_force_walls(v, box, w0s, w1s, w2s, model=None):
    """Primitive wall coefficients over an explicit rectangular candidate box.

    Returns (sorted list of primitive triples, list of witnesses on the box faces).
    """
    v0, v1, v2 = (Fraction(x) for x in v)
    found = set()
    face_hits = []
    for w in itertools.product(w0s, w1s, w2s):
        w0, w1, w2 = w
        if w1 * w1 - 2 * w0 * w2 < 0:
            continue
        u0, u1, u2 = v0 - w0, v1 - w1, v2 - w2
        if u1 * u1 - 2 * u0 * u2 < 0:
            continue
        A = v0 * w1 - w0 * v1
        B = v2 * w0 - w2 * v0
        C0 = w2 * v1 - v2 * w1
        if A == B == C0 == 0:
            continue
        if not wall_hits_box(v, w, box, model):
            continue
        found.add(primitive((A, B, C0)))
        if w1 in (w1s[0], w1s[-1]) or w2 in (w2s[0], w2s[-1]):
            face_hits.append(w)
    return sorted(found), face_hits


def lattice_range(lo, hi, den):
    lo, hi = Fraction(lo), Fraction(hi)
    import math

    return [Fraction(k, den) for k in range(math.ceil(lo * den), math.floor(hi * den) + 1)]


# -- phases ------------------------------------------------------------------------------


def phase_mp(re, im, k, digits=60):
    """Arg((-1)^k Z)/pi - k in high precision with mpmath."""
    import mpmath

    mpmath.mp.dps = digits
    s = -1 if k % 2 else 1
    z = mpmath.mpc(mpmath.mpf(Fraction(re).numerator) / Fraction(re).denominator,
                   mpmath.mpf(Fraction(im).numerator) / Fraction(im).denominator) * s
    arg = mpmath.arg(z)
    if arg <= 0:
        arg += 2 * mpmath.pi
    return arg / mpmath.pi - k
