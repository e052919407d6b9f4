"""Tilt stability on a polarized surface: Le Potier models, Z_{alpha,beta}, walls.

All classes are rank-two-lattice triples ``(H^2 rk, H ch_1, ch_2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .charges import IDENTITY, Matrix, Rejection, as_matrix, mat_mul, send_to_minus_one
from .errors import PreconditionError
from .lattice import CharacterVector, PolarizedVariety, bogomolov_delta, slope
from .numerics import EVERYTHING, Poly, RationalLike, RealInterval, as_fraction, format_rational

PARABOLA = Poly([0, 0, Fraction(1, 2)])


def _require_surface(v: CharacterVector):
    if v.dim != 2:
        raise PreconditionError(f"surface operation applied to a dimension-{v.dim} class")


# -- Le Potier models -----------------------------------------------------------


@dataclass(frozen=True)
class LePotierModel:
    """Upper bound for ch_2/(H^2 rk) as a function of the slope.

    ``pieces`` holds ``(lo, hi, poly)`` triples sorted by ``lo``; neighbouring
    pieces may only share an endpoint, where the left piece is used.
    """

    kind: str = "parabola"
    pieces: tuple[tuple[Fraction, Fraction, Poly], ...] = ()

    def __post_init__(self):
        if self.kind == "parabola":
            if self.pieces:
                raise PreconditionError("the parabola model takes no pieces")
            return
        if self.kind != "piecewise":
            raise PreconditionError(f"unknown Le Potier model kind {self.kind!r}")
        if not self.pieces:
            raise PreconditionError("a piecewise model needs at least one piece")
        pieces = []
        for lo, hi, poly in self.pieces:
            lo, hi = as_fraction(lo), as_fraction(hi)
            poly = poly if isinstance(poly, Poly) else Poly(poly)
            if lo > hi:
                raise PreconditionError(f"empty interval [{lo}, {hi}]")
            if poly.degree > 2:
                raise PreconditionError("pieces must be polynomials of degree at most 2")
            excess = _min_on(PARABOLA - poly, lo, hi)
            if excess < 0:
                raise PreconditionError(
                    f"piece on [{lo}, {hi}] exceeds x^2/2 by {-excess} somewhere"
                )
            pieces.append((lo, hi, poly))
        pieces.sort(key=lambda p: (p[0], p[1]))
        for (_, hi, _), (lo, _, _) in zip(pieces, pieces[1:]):
            if lo < hi:
                raise PreconditionError("piecewise intervals overlap")
        object.__setattr__(self, "pieces", tuple(pieces))

    @classmethod
    def parabola(cls) -> "LePotierModel":
        return cls("parabola")

    @classmethod
    def piecewise(cls, pieces: Iterable[tuple]) -> "LePotierModel":
        return cls("piecewise", tuple(pieces))

    def owned_pieces(self) -> Iterator[tuple[RealInterval, Poly]]:
        """Disjoint intervals, each with the polynomial that evaluates there."""
        if self.kind == "parabola":
            yield EVERYTHING, PARABOLA
            return
        prev_hi = None
        for lo, hi, poly in self.pieces:
            lo_closed = prev_hi is None or lo != prev_hi
            yield RealInterval(lo, hi, lo_closed, True), poly
            prev_hi = hi

    def __call__(self, x: RationalLike) -> Fraction:
        x = as_fraction(x)
        for interval, poly in self.owned_pieces():
            if interval.contains(x):
                return poly(x)
        raise PreconditionError(f"x = {x} is not covered by the piecewise model")

    def covers(self, lo: Fraction, hi: Fraction) -> bool:
        if self.kind == "parabola":
            return True
        cursor = lo
        for plo, phi, _ in self.pieces:
            if phi < cursor:
                continue
            if plo > cursor:
                return False
            cursor = phi
            if cursor >= hi:
                return True
        return False

    def minimum(self, lo: Fraction, hi: Fraction) -> Fraction:
        """Exact minimum of the model over the closed interval [lo, hi]."""
        if not self.covers(lo, hi):
            raise PreconditionError(f"model does not cover [{lo}, {hi}]")
        if self.kind == "parabola":
            return _min_on(PARABOLA, lo, hi)
        values = [
            _min_on(poly, max(lo, plo), min(hi, phi))
            for plo, phi, poly in self.pieces
            if plo <= hi and phi >= lo
        ]
        return min(values)

    def to_json(self) -> dict:
        if self.kind == "parabola":
            return {"kind": "parabola"}
        return {
            "kind": "piecewise",
            "pieces": [
                {"interval": [format_rational(lo), format_rational(hi)],
                 "poly": [format_rational(c) for c in poly.coeffs]}
                for lo, hi, poly in self.pieces
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LePotierModel":
        kind = data.get("kind")
        if kind == "parabola":
            return cls.parabola()
        if kind != "piecewise":
            raise PreconditionError(f"unknown Le Potier model kind {kind!r}")
        pieces = []
        for piece in data["pieces"]:
            lo, hi = piece["interval"]
            pieces.append((as_fraction(lo), as_fraction(hi), Poly(as_fraction(c) for c in piece["poly"])))
        return cls.piecewise(pieces)


def _min_on(p: Poly, lo: Fraction, hi: Fraction) -> Fraction:
    """Exact minimum of a polynomial of degree <= 2 on [lo, hi]."""
    candidates = [p(lo), p(hi)]
    if p.degree == 2 and p.leading > 0:
        vertex = -p.coeffs[1] / (2 * p.coeffs[2])
        if lo < vertex < hi:
            candidates.append(p(vertex))
    return min(candidates)


def lepotier_eval(model: LePotierModel, x: RationalLike) -> Fraction:
    return model(x)


@dataclass(frozen=True)
class SurfaceParams:
    alpha: Fraction
    beta: Fraction
    model: LePotierModel = LePotierModel()

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "beta", as_fraction(self.beta))
        bound = self.model(self.beta)
        if not self.alpha > bound:
            raise PreconditionError(
                f"alpha = {self.alpha} must exceed the Le Potier bound {bound} at beta = {self.beta}"
            )


# -- central charge and heart ---------------------------------------------------


def central_charge_surface(
    v: CharacterVector, alpha: RationalLike, beta: RationalLike
) -> tuple[Fraction, Fraction]:
    _require_surface(v)
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    c0, c1, c2 = v.c
    return -c2 + alpha * c0, c1 - beta * c0


def surface_charge_matrix(alpha: RationalLike, beta: RationalLike) -> Matrix:
    """Coefficient rows (Re, Im) of Z_{alpha,beta} over (H^2 rk, H ch_1, ch_2)."""
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    return ((alpha, Fraction(0), Fraction(-1)), (-beta, Fraction(1), Fraction(0)))


@dataclass(frozen=True)
class SheafDescriptor:
    """Slope-semistable factors of a hypothetical sheaf, slopes strictly decreasing."""

    factors: tuple[CharacterVector, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        for v in factors:
            _require_surface(v)
            if v.c[0] < 0:
                raise PreconditionError("a sheaf factor cannot have negative rank")
            if v.c[0] == 0 and v.c[1] <= 0:
                raise PreconditionError("a torsion factor needs positive H ch_1")
        slopes = [slope(v) for v in factors]
        if any(not a > b for a, b in zip(slopes, slopes[1:])):
            raise PreconditionError("factor slopes must be strictly decreasing")
        object.__setattr__(self, "factors", factors)

    @property
    def slopes(self) -> list[Fraction | float]:
        return [slope(v) for v in self.factors]


@dataclass(frozen=True)
class HeartSplit:
    torsion: tuple[CharacterVector, ...]
    free: tuple[CharacterVector, ...]

    def character(self, variety: PolarizedVariety) -> CharacterVector:
        """Class of T-part plus F-part shifted by one."""
        total = CharacterVector.zero(variety)
        for v in self.torsion:
            total = total + v
        for v in self.free:
            total = total - v
        return total


def heart_position(d: SheafDescriptor, beta: RationalLike) -> HeartSplit:
    beta = as_fraction(beta)
    torsion = tuple(v for v in d.factors if slope(v) > beta)
    free = tuple(v for v in d.factors if not slope(v) > beta)
    return HeartSplit(torsion, free)


# -- walls ----------------------------------------------------------------------


def _primitive(coeffs: Sequence[Fraction]) -> tuple[int, ...]:
    scale = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * scale) for c in coeffs]
    g = math.gcd(*ints)
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    return tuple(-x for x in ints) if lead < 0 else tuple(ints)


@dataclass(frozen=True)
class WallLine:
    """The locus A alpha + B beta + C0 = 0 of the (beta, alpha) plane."""

    A: Fraction
    B: Fraction
    C0: Fraction
    degenerate: bool = False
    witness: CharacterVector | None = None

    @property
    def primitive(self) -> tuple[int, int, int]:
        return _primitive((self.A, self.B, self.C0))

    def cross(self, alpha: Fraction, beta: Fraction) -> Fraction:
        return self.A * alpha + self.B * beta + self.C0

    def to_json(self) -> dict:
        out = {
            "A": format_rational(self.A),
            "B": format_rational(self.B),
            "C0": format_rational(self.C0),
            "primitive": list(self.primitive),
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_strings()
        return out


def wall_line(v: CharacterVector, w: CharacterVector) -> WallLine:
    """Collinearity locus of Z(v) and Z(w).

    Re Z(v) Im Z(w) - Re Z(w) Im Z(v) expands to A alpha + B beta + C0; the
    alpha*beta terms are v0 w0 - w0 v0 = 0.
    """
    _require_surface(v)
    v._check(w)
    v0, v1, v2 = v.c
    w0, w1, w2 = w.c
    A = v0 * w1 - w0 * v1
    B = v2 * w0 - w2 * v0
    C0 = w2 * v1 - v2 * w1
    return WallLine(A, B, C0, degenerate=not (A or B or C0), witness=w)


def _linear_set(coef: Fraction, const: Fraction, strict: bool) -> RealInterval:
    """{beta : coef*beta + const > 0}, or >= 0 when not strict."""
    if coef == 0:
        ok = const > 0 or (const == 0 and not strict)
        return EVERYTHING if ok else RealInterval(Fraction(1), Fraction(0))
    root = -const / coef
    if coef > 0:
        return RealInterval(root, None, not strict, False)
    return RealInterval(None, root, False, not strict)


def _negative_somewhere(q: Poly, k: RealInterval) -> bool:
    """Whether q < 0 at some point of the bounded nonempty interval k."""
    if k.lo == k.hi:
        return q(k.lo) < 0
    # q is continuous, so the infimum over the open interval equals the closed minimum
    return _min_on(q, k.lo, k.hi) < 0


def wall_meets_region(
    v: CharacterVector,
    w: CharacterVector,
    line: WallLine,
    box: tuple[Fraction, Fraction, Fraction],
    model: LePotierModel,
) -> bool:
    """Is there (beta, alpha) on the line, inside the box, above the model,
    with 0 < Im Z(w) < Im Z(v)?"""
    b1, b2, amax = box
    v0, v1, _ = v.c
    w0, w1, _ = w.c
    A, B, C0 = line.A, line.B, line.C0
    im_ok = _linear_set(-w0, w1, True).intersect(_linear_set(w0 - v0, v1 - w1, True))
    if A == 0:
        if B == 0:
            return False
        beta = -C0 / B
        if not (b1 <= beta <= b2) or not im_ok.contains(beta):
            return False
        # vertical line: alpha ranges over (model(beta), amax]
        return model(beta) < amax
    # alpha(beta) = -(B beta + C0)/A; need alpha <= amax
    span = RealInterval.closed(b1, b2).intersect(im_ok)
    span = span.intersect(_linear_set(B / A, amax + C0 / A, False))
    if span.is_empty():
        return False
    alpha_of = Poly([-C0 / A, -B / A])
    for owned, phi in model.owned_pieces():
        k = span.intersect(owned)
        if not k.is_empty() and _negative_somewhere(phi - alpha_of, k):
            return True
    return False


def _lattice_range(lo: Fraction, hi: Fraction, den: int, strict: bool = False) -> range:
    """Indices k with k/den in [lo, hi], or in (lo, hi) when strict."""
    a, b = lo * den, hi * den
    start = math.floor(a) + 1 if strict else math.ceil(a)
    stop = math.ceil(b) - 1 if strict else math.floor(b)
    return range(start, stop + 1)


def default_max_rank(v: CharacterVector) -> Fraction:
    return max(Fraction(4), 2 * abs(v.c[0]))


def wall_search_bounds(
    v: CharacterVector,
    box: tuple[Fraction, Fraction, Fraction],
    model: LePotierModel,
    max_rank: Fraction,
) -> Iterator[CharacterVector]:
    """Lattice candidates w that can possibly produce a wall hitting the box.

    c0(w): |c0| <= max_rank (pseudo-walls accumulate, so this is a user cap).
    c1(w): 0 < c1 - beta c0 and c1 - beta c0 < v1 - beta v0 for some beta in the box.
    c2(w): on the wall Z(w) = t Z(v) with 0 < t < 1, so
           c2 = alpha c0 - t (alpha v0 - v2), bilinear in (alpha, t); the range is
           spanned by the corners alpha in {min model, amax}, t in {0, 1},
           intersected with Delta(w) >= 0 and Delta(v - w) >= 0.
    """
    b1, b2, amax = box
    variety = v.variety
    d0, d1, d2 = variety.denominators
    v0, v1, v2 = v.c
    amin = model.minimum(b1, b2)
    for k0 in _lattice_range(-max_rank, max_rank, d0):
        w0 = Fraction(k0, d0)
        u0 = v0 - w0
        lo1 = min(b1 * w0, b2 * w0)
        hi1 = max(v1 - b1 * u0, v1 - b2 * u0)
        for k1 in _lattice_range(lo1, hi1, d1, strict=True):
            w1 = Fraction(k1, d1)
            corners = [a * w0 - t * (a * v0 - v2) for a in (amin, amax) for t in (0, 1)]
            lo2, hi2 = min(corners), max(corners)
            if w0 > 0:
                hi2 = min(hi2, w1 * w1 / (2 * w0))
            elif w0 < 0:
                lo2 = max(lo2, w1 * w1 / (2 * w0))
            u1 = v1 - w1
            if u0 > 0:
                lo2 = max(lo2, v2 - u1 * u1 / (2 * u0))
            elif u0 < 0:
                hi2 = min(hi2, v2 - u1 * u1 / (2 * u0))
            for k2 in _lattice_range(lo2, hi2, d2):
                yield CharacterVector(variety, (w0, w1, Fraction(k2, d2)))


def enumerate_walls(
    v: CharacterVector,
    box: tuple[RationalLike, RationalLike, RationalLike],
    model: LePotierModel | None = None,
    max_rank: RationalLike | None = None,
) -> list[WallLine]:
    """Numerical walls for v meeting the box beta in [b1, b2], model(beta) < alpha <= amax.

    Sorted by primitive integer coefficients; for each line the first witness
    in (c0, c1, c2) order is kept.
    """
    _require_surface(v)
    model = model or LePotierModel.parabola()
    b1, b2, amax = (as_fraction(x) for x in box)
    if b1 > b2 or amax <= 0:
        raise PreconditionError(f"empty box beta in [{b1}, {b2}], alpha <= {amax}")
    if bogomolov_delta(v) < 0:
        raise PreconditionError(
            "no semistable object of this class: Bogomolov discriminant is negative"
        )
    if not model.covers(b1, b2):
        raise PreconditionError(f"model does not cover [{b1}, {b2}]")
    cap = default_max_rank(v) if max_rank is None else as_fraction(max_rank)
    found: dict[tuple[int, int, int], WallLine] = {}
    for w in wall_search_bounds(v, (b1, b2, amax), model, cap):
        if bogomolov_delta(w) < 0 or bogomolov_delta(v - w) < 0:
            continue
        line = wall_line(v, w)
        if line.degenerate or line.primitive in found:
            continue
        if wall_meets_region(v, w, line, (b1, b2, amax), model):
            found[line.primitive] = line
    return [found[k] for k in sorted(found)]


# -- normalization --------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceNormalization:
    alpha: Fraction
    beta: Fraction
    g: Matrix
    in_region: bool | None = None


def normalize_surface_charge(
    m: Sequence[Sequence[RationalLike]], model: LePotierModel | None = None
) -> SurfaceNormalization | Rejection:
    """Find the unique g in GL2+ with g M = Z_{alpha,beta}."""
    m = as_matrix(m, 3)
    p, q = m[0][2], m[1][2]
    if p == 0 and q == 0:
        return Rejection("skyscrapers-in-kernel", "the ch_2 column vanishes, so Z(O_p) = 0")
    g1 = send_to_minus_one(p, q)
    m1 = mat_mul(g1, m)
    b_, a_ = m1[0][0], m1[0][1]
    d, c = m1[1][0], m1[1][1]
    if c <= 0:
        return Rejection(
            "torsion-sheaf-positivity",
            f"Im coefficient of H ch_1 is {c} <= 0, so curve-supported sheaves leave the upper half plane",
        )
    g2 = ((Fraction(1), -a_ / c), (Fraction(0), 1 / c))
    g = mat_mul(g2, g1)
    beta = -d / c
    alpha = b_ - a_ * d / c
    verdict = None
    if model is not None and model.covers(beta, beta):
        verdict = alpha > model(beta)
    return SurfaceNormalization(alpha, beta, g, verdict)


__all__ = [
    "IDENTITY",
    "HeartSplit",
    "LePotierModel",
    "Rejection",
    "SheafDescriptor",
    "SurfaceNormalization",
    "SurfaceParams",
    "WallLine",
    "central_charge_surface",
    "enumerate_walls",
    "heart_position",
    "lepotier_eval",
    "normalize_surface_charge",
    "surface_charge_matrix",
    "wall_line",
    "wall_meets_region",
]
