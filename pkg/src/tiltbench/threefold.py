"""Tilt-type stability data on an abelian threefold.

Parameters (alpha, beta, a, b) define

    Z(v) = -t3 + b t2 + a t1 + i (t2 - alpha^2/2 t0),   t = twist(v, beta).

alpha is stored through its square, which is what normalization produces;
comparisons against alpha are decided with exact surd signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

from .charges import (
    Matrix,
    Rejection,
    as_matrix,
    heart_shift,
    mat_mul,
    phase_from_charge,
    send_to_minus_one,
)
from .errors import AdmissibilityError, CertificationError, PreconditionError
from .lattice import (
    CharacterVector,
    PolarizedVariety,
    euler_pairing,
    minimal_rank,
    semihomogeneous_character,
    twist,
)
from .numerics import (
    DEFAULT_WIDTH,
    Poly,
    RationalInterval,
    RationalLike,
    RootInterval,
    as_fraction,
    count_real_roots,
    exact_sqrt,
    format_rational,
    isolate_real_roots,
    poly_gcd,
    refine_root,
    sign,
    sign_at_sqrt,
    sign_surd,
    sqrt_interval,
)

ADMISSIBILITY_TEXT = "a > (1/6)α² + (1/2)|b|α"


def _require_threefold(v: CharacterVector):
    if v.dim != 3:
        raise PreconditionError(f"threefold operation applied to a dimension-{v.dim} class")


# -- parameters -----------------------------------------------------------------


@dataclass(frozen=True)
class ThreefoldParams:
    alpha_sq: Fraction
    beta: Fraction
    a: Fraction
    b: Fraction

    def __post_init__(self):
        for name in ("alpha_sq", "beta", "a", "b"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.alpha_sq <= 0:
            raise PreconditionError(f"alpha^2 must be positive, got {self.alpha_sq}")

    @classmethod
    def from_alpha(cls, alpha: RationalLike, beta: RationalLike, a: RationalLike, b: RationalLike):
        alpha = as_fraction(alpha)
        if alpha <= 0:
            raise PreconditionError(f"alpha must be positive, got {alpha}")
        return cls(alpha * alpha, beta, a, b)

    @property
    def alpha(self) -> Fraction | None:
        """alpha when it is rational, else None."""
        return exact_sqrt(self.alpha_sq)

    def alpha_interval(self, width: Fraction = DEFAULT_WIDTH) -> RationalInterval:
        return sqrt_interval(self.alpha_sq, width)

    def require_rational_alpha(self) -> Fraction:
        alpha = self.alpha
        if alpha is None:
            raise PreconditionError(f"alpha = sqrt({self.alpha_sq}) is irrational")
        return alpha

    def to_json(self) -> dict:
        alpha = self.alpha
        out = {"alpha": format_rational(alpha)} if alpha is not None else {"alpha_sq": format_rational(self.alpha_sq)}
        out.update(beta=format_rational(self.beta), a=format_rational(self.a), b=format_rational(self.b))
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ThreefoldParams":
        rest = (as_fraction(data["beta"]), as_fraction(data["a"]), as_fraction(data["b"]))
        if "alpha" in data:
            return cls.from_alpha(as_fraction(data["alpha"]), *rest)
        return cls(as_fraction(data["alpha_sq"]), *rest)


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    margin: Fraction | RationalInterval


def admissible(p: ThreefoldParams) -> Admissibility:
    """Decide a - alpha^2/6 - |b| alpha/2 > 0 exactly."""
    x = p.a - p.alpha_sq / 6
    y = -abs(p.b) / 2
    ok = sign_surd(x, y, p.alpha_sq) > 0
    alpha = p.alpha
    margin = x + y * alpha if alpha is not None else x + p.alpha_interval() * y
    return Admissibility(ok, margin)


def require_admissible(p: ThreefoldParams) -> None:
    if not admissible(p).ok:
        raise AdmissibilityError(f"parameters {p.to_json()} violate {ADMISSIBILITY_TEXT}")


# -- central charge and slopes --------------------------------------------------


def central_charge_3(v: CharacterVector, p: ThreefoldParams) -> tuple[Fraction, Fraction]:
    _require_threefold(v)
    t0, t1, t2, t3 = twist(v, p.beta).c
    return -t3 + p.b * t2 + p.a * t1, t2 - p.alpha_sq / 2 * t0


def threefold_charge_matrix(p: ThreefoldParams) -> Matrix:
    """Rows (Re, Im) of Z over the untwisted basis (H^3 rk, H^2 ch1, H ch2, ch3)."""
    be, a, b = p.beta, p.a, p.b
    re = (be**3 / 6 + b * be**2 / 2 - a * be, a - b * be - be**2 / 2, be + b, Fraction(-1))
    im = ((be**2 - p.alpha_sq) / 2, -be, Fraction(1), Fraction(0))
    return (re, im)


@dataclass(frozen=True)
class TiltSlope:
    """``value`` is math.inf when H^2 ch1^beta = 0; ``numerator_sign`` then tells
    torsion-like (>= 0) from shifted (< 0) classes."""

    value: Fraction | float
    numerator_sign: int

    @property
    def infinite(self) -> bool:
        return self.value == math.inf


def tilt_slope(v: CharacterVector, alpha: RationalLike, beta: RationalLike) -> TiltSlope:
    _require_threefold(v)
    alpha = as_fraction(alpha)
    t = twist(v, beta).c
    num = t[2] - alpha * alpha / 2 * t[0]
    if t[1] == 0:
        return TiltSlope(math.inf, sign(num))
    return TiltSlope(num / t[1], sign(num))


# -- semi-homogeneous predictions -------------------------------------------------


def _window(d: Fraction, alpha_sq: Fraction) -> int:
    # d = t - beta; compare |d| with alpha by squares
    if d > 0 and d * d > alpha_sq:
        return 0
    if d <= 0 and d * d >= alpha_sq:
        return 2
    return 1


def semihomog_window(t: RationalLike, alpha: RationalLike, beta: RationalLike) -> int:
    """k with E_t[k] in P((0,1]): 0 above beta+alpha, 1 on (beta-alpha, beta+alpha], 2 below."""
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise PreconditionError("alpha must be positive")
    return _window(as_fraction(t) - as_fraction(beta), alpha * alpha)


def window_for(t: RationalLike, p: ThreefoldParams) -> int:
    return _window(as_fraction(t) - p.beta, p.alpha_sq)


def im_sign_of_semihomog(t: RationalLike, p: ThreefoldParams) -> int:
    d = as_fraction(t) - p.beta
    return sign(d * d - p.alpha_sq)


@dataclass(frozen=True)
class BoundaryValues:
    re_plus: Fraction
    re_minus: Fraction
    rank_plus: int
    rank_minus: int


def boundary_re_values(
    p: ThreefoldParams,
    variety: PolarizedVariety,
    rank_plus: int | None = None,
    rank_minus: int | None = None,
) -> BoundaryValues:
    """Re Z(E_{beta+alpha}[1]) and Re Z(E_{beta-alpha}[2]) from the closed forms."""
    alpha = p.require_rational_alpha()
    h = variety.h
    r_p = rank_plus if rank_plus is not None else minimal_rank(variety, p.beta + alpha)
    r_m = rank_minus if rank_minus is not None else minimal_rank(variety, p.beta - alpha)
    core = p.a - alpha * alpha / 6
    re_plus = -r_p * h * alpha * (core + p.b * alpha / 2)
    re_minus = -r_m * h * alpha * (core - p.b * alpha / 2)
    return BoundaryValues(re_plus, re_minus, r_p, r_m)


def boundary_re_direct(
    p: ThreefoldParams,
    variety: PolarizedVariety,
    rank_plus: int | None = None,
    rank_minus: int | None = None,
) -> tuple[Fraction, Fraction]:
    """The same two values from central_charge_3 on the shifted objects."""
    alpha = p.require_rational_alpha()
    e_plus = semihomogeneous_character(variety, p.beta + alpha, rank_plus)
    e_minus = semihomogeneous_character(variety, p.beta - alpha, rank_minus)
    # [1] negates Z, [2] leaves it unchanged
    return -central_charge_3(e_plus, p)[0], central_charge_3(e_minus, p)[0]


@dataclass(frozen=True)
class HomPrediction:
    degrees: frozenset[int]
    chi: Fraction
    rank_s: int
    rank_t: int


def hom_prediction_semihomog(
    s: RationalLike, t: RationalLike, variety: PolarizedVariety
) -> HomPrediction:
    """Degrees i with Hom(E_s, E_t[i]) != 0, and chi(E_s, E_t)."""
    s, t = as_fraction(s), as_fraction(t)
    if s == t:
        raise PreconditionError("same character family, endomorphism case out of scope")
    es = semihomogeneous_character(variety, s)
    et = semihomogeneous_character(variety, t)
    chi = euler_pairing(es, et)
    degrees = frozenset({0}) if s < t else frozenset({3})
    return HomPrediction(degrees, chi, int(es.c[0] / variety.h), int(et.c[0] / variety.h))


def phase_real(v: CharacterVector, p: ThreefoldParams, k: int, bits: int = 64) -> RationalInterval:
    """Certified phase of v, given that v[k] lies in P((0,1])."""
    re, im = central_charge_3(v, p)
    return phase_from_charge(re, im, k, bits)


# -- the cubic f and the forms L_i --------------------------------------------------


def slope_constant(v: CharacterVector, p: ThreefoldParams) -> Fraction:
    """C = Re Z(v) / Im Z(v), the constant making -Re + C Im vanish on v."""
    re, im = central_charge_3(v, p)
    if im == 0:
        raise PreconditionError("slope undefined, use phase-1 handling")
    return re / im


def cubic_poly(C: Fraction, p: ThreefoldParams) -> Poly:
    return Poly([-p.alpha_sq * C / 2, -p.a, (C - p.b) / 2, Fraction(1, 6)])


@dataclass(frozen=True)
class CubicData:
    C: Fraction
    params: ThreefoldParams
    coeffs: Poly
    roots: tuple[RationalInterval, RationalInterval, RationalInterval]

    @property
    def alpha_sq(self) -> Fraction:
        return self.params.alpha_sq

    @property
    def vieta(self) -> tuple[Fraction, Fraction, Fraction]:
        """Elementary symmetric functions of the roots, read off 6 f exactly."""
        C, p = self.C, self.params
        return 3 * p.b - 3 * C, -6 * p.a, 3 * p.alpha_sq * C

    def vieta_enclosures(self) -> tuple[RationalInterval, RationalInterval, RationalInterval]:
        s1, s2, s3 = self.roots
        return s1 + s2 + s3, s1 * s2 + s2 * s3 + s3 * s1, s1 * s2 * s3

    def refined(self, width: Fraction) -> "CubicData":
        roots = tuple(
            r if r.width <= width else refine_root(self.coeffs, r, width) for r in self.roots
        )
        return replace(self, roots=roots)

    def to_json(self) -> dict:
        return {
            "C": format_rational(self.C),
            "params": self.params.to_json(),
            "coeffs": [format_rational(c) for c in self.coeffs.coeffs],
            "roots": [r.to_json() for r in self.roots],
            "vieta": [format_rational(x) for x in self.vieta],
        }


def _separate_from_alpha(f: Poly, root: RationalInterval, alpha_sq: Fraction, side: int) -> RationalInterval:
    """Refine ``root`` until it lies strictly on the given side of sqrt(alpha_sq)
    (side -1: below, +1: above), where the root is known to be != sqrt(alpha_sq)."""
    width = root.width
    while True:
        if root.is_point():
            ok = sign_surd(root.lo, Fraction(-1), alpha_sq) == side
        else:
            edge = root.hi if side < 0 else root.lo
            ok = sign_surd(edge, Fraction(-1), alpha_sq) == side
        if ok:
            return root
        width = width / 2**8
        root = refine_root(f, root, width)


def cubic_for_slope(C: RationalLike, p: ThreefoldParams, width: Fraction | None = None) -> CubicData:
    """Roots s1 < -alpha < s2 < alpha < s3 of f(x) = x^3/6 + (C-b)x^2/2 - a x - alpha^2 C/2.

    Interlacing follows from the exact signs f(alpha) < 0 < f(-alpha) and the
    positive leading coefficient; the root intervals are then refined away
    from +-alpha so the ordering is visible on the enclosures too.
    """
    C = as_fraction(C)
    require_admissible(p)
    f = cubic_poly(C, p)
    if not (sign_at_sqrt(f, p.alpha_sq) < 0 < sign_at_sqrt(f.compose_neg(), p.alpha_sq)):
        raise CertificationError("f(alpha) < 0 < f(-alpha) failed for admissible parameters")
    roots = isolate_real_roots(f)
    if len(roots) != 3:
        raise CertificationError(f"expected three simple roots, isolated {len(roots)}")
    s1 = _separate_from_alpha(f.compose_neg(), -roots[0], p.alpha_sq, +1)
    s1 = RootInterval(-s1.hi, -s1.lo, 1)
    s2 = _separate_from_alpha(f, roots[1], p.alpha_sq, -1)
    s2 = _separate_from_alpha(f.compose_neg(), -s2, p.alpha_sq, -1)
    s2 = RootInterval(-s2.hi, -s2.lo, 1)
    s3 = _separate_from_alpha(f, roots[2], p.alpha_sq, +1)
    data = CubicData(C, p, f, (s1, s2, s3))
    return data.refined(width) if width is not None else data


def l_coefficients(s, C: Fraction, p: ThreefoldParams):
    """(b - C - s, a + s^2/2, C alpha^2/2 - s^3/6) for a rational or interval s."""
    return p.b - C - s, s * s / 2 + p.a, -(s * s * s) / 6 + C * p.alpha_sq / 2


@dataclass(frozen=True)
class LinearForm:
    index: int
    coeffs: tuple

    def __call__(self, x, y, z):
        cx, cy, cz = self.coeffs
        return cx * x + cy * y + cz * z


def linear_forms_L(d: CubicData) -> list[LinearForm]:
    """L_1, L_2, L_3 with coefficients enclosed by the current root intervals
    (exact rationals for degenerate intervals)."""
    forms = []
    for i, s in enumerate(d.roots, start=1):
        s_val = s.lo if s.is_point() else s
        forms.append(LinearForm(i, l_coefficients(s_val, d.C, d.params)))
    return forms


def l_root_poly(x: Fraction, y: Fraction, z: Fraction, C: Fraction, p: ThreefoldParams) -> Poly:
    """L_s(x, y, z) as a polynomial in the root variable s."""
    return Poly([(p.b - C) * x + p.a * y + C * p.alpha_sq * z / 2, -x, y / 2, -z / 6])


def _as_interval(x) -> RationalInterval:
    return x if isinstance(x, RationalInterval) else RationalInterval.point(x)


@dataclass(frozen=True)
class Certificate:
    name: str
    width: Fraction
    exact: bool = False

    @property
    def bound_exponent(self) -> int | None:
        """Smallest k with width <= 2^-k, None for an exact certificate."""
        if self.width == 0:
            return None
        k = 0
        while Fraction(1, 2 ** (k + 1)) >= self.width:
            k += 1
        return k

    def to_json(self) -> dict:
        k = self.bound_exponent
        return {"name": self.name, "width_at_most": "0" if k is None else f"1/2^{k}", "exact": self.exact}


def certify_zero(
    d: CubicData,
    name: str,
    residuals: Callable[[CubicData], Sequence],
    width: Fraction = DEFAULT_WIDTH,
    max_rounds: int = 12,
) -> Certificate:
    """Refine the roots until every residual interval contains 0 and is at most ``width`` wide."""
    root_width = width / 2**16
    for _ in range(max_rounds):
        d = d.refined(root_width)
        ivs = [_as_interval(r) for r in residuals(d)]
        for iv in ivs:
            if not iv.contains(0):
                raise CertificationError(f"{name}: residual {iv.to_json()} excludes 0")
        worst = max(iv.width for iv in ivs)
        if worst <= width:
            return Certificate(name, worst, exact=worst == 0)
        root_width = root_width * width / (2 * worst)
    raise CertificationError(f"{name}: width {worst} after {max_rounds} rounds exceeds {width}")


def _identity_residuals(d: CubicData):
    forms = linear_forms_L(d)
    out = []
    for s_i in d.roots:
        si = s_i.lo if s_i.is_point() else s_i
        for j, form in enumerate(forms):
            s_j = d.roots[j]
            sj = s_j.lo if s_j.is_point() else s_j
            diff = si - sj
            out.append(form(si * si / 2, si, 1) - diff * diff * diff / 6)
    return out


def _kernel_residuals(d: CubicData):
    p = d.params
    return [form(-p.a, p.b - d.C, 1) for form in linear_forms_L(d)]


def _dependence_residuals(d: CubicData):
    s1, s2, s3 = (s.lo if s.is_point() else s for s in d.roots)
    l1, l2, l3 = (form.coeffs for form in linear_forms_L(d))
    w2, w1, w3 = (s3 - s1) ** 3, (s3 - s2) ** 3, (s2 - s1) ** 3
    return [w2 * l2[k] - w1 * l1[k] - w3 * l3[k] for k in range(3)]


def kernel_identity_exact(C: Fraction, p: ThreefoldParams) -> bool:
    """L_s(-a, b - C, 1) = -f(s) as polynomials, so it vanishes at every root."""
    return l_root_poly(-p.a, p.b - C, Fraction(1), C, p) == -cubic_poly(C, p)


@dataclass(frozen=True)
class DependenceReport:
    certified: bool
    certificates: tuple[Certificate, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {"certified": self.certified, "certificates": [c.to_json() for c in self.certificates]}


def verify_dependence(d: CubicData, width: Fraction = DEFAULT_WIDTH) -> DependenceReport:
    cert = certify_zero(d, "dependence", _dependence_residuals, width)
    return DependenceReport(True, (cert,))


def verify_identities(d: CubicData, width: Fraction = DEFAULT_WIDTH) -> DependenceReport:
    """All root identities of the cubic system, each certified to ``width``."""
    certs = [
        certify_zero(d, "L_j(s_i^2/2, s_i, 1) = (s_i - s_j)^3/6", _identity_residuals, width),
        certify_zero(d, "L_i(-a, b - C, 1) = 0", _kernel_residuals, width),
        certify_zero(d, "dependence", _dependence_residuals, width),
    ]
    return DependenceReport(True, tuple(certs))


# -- ch3 at the roots ---------------------------------------------------------------


def _sign_at_root(g: Poly, f: Poly, root: RationalInterval, max_rounds: int = 40) -> int:
    """Exact sign of g at the unique root of f inside ``root``."""
    if root.is_point():
        return sign(g(root.lo))
    common = poly_gcd(g, f) if not g.is_zero() else f
    if common.degree >= 1 and count_real_roots(common, root.lo, root.hi) > 0:
        return 0
    width = root.width
    for _ in range(max_rounds):
        s = g(root).sign()
        if s is not None and s != 0:
            return s
        width = width / 2**16
        root = refine_root(f, root, width)
        if root.is_point():
            return sign(g(root.lo))
    raise CertificationError("could not separate L_i(v) from zero")


@dataclass(frozen=True)
class RootSigns:
    C: Fraction
    cubic: CubicData
    signs: tuple[int, int, int]
    classification: str
    lam: Fraction | None = None

    def to_json(self) -> dict:
        out = {
            "C": format_rational(self.C),
            "signs": list(self.signs),
            "classification": self.classification,
            "cubic": self.cubic.to_json(),
        }
        if self.lam is not None:
            out["lambda"] = format_rational(self.lam)
        return out


def ch3_at_roots(v: CharacterVector, p: ThreefoldParams) -> RootSigns:
    """Signs of ch3^{beta + s_i}(v) at the three roots of the cubic for C = slope of v.

    These equal L_i evaluated on (H ch2^beta, H^2 ch1^beta, H^3 rk).  The
    alternating signs (-1)^{i+1} L_i are either all zero or take both strict
    signs; anything else is an internal error.
    """
    _require_threefold(v)
    C = slope_constant(v, p)
    d = cubic_for_slope(C, p)
    t0, t1, t2, _ = twist(v, p.beta).c
    g = l_root_poly(t2, t1, t0, C, p)
    signs = tuple(_sign_at_root(g, d.coeffs, r) for r in d.roots)
    if signs == (0, 0, 0):
        lam = t0
        target = (Fraction(1), p.b - C, -p.a, C * p.alpha_sq / 2)
        if twist(v, p.beta).c != tuple(lam * x for x in target):
            raise CertificationError("all three values vanish but v is not on the proportional line")
        return RootSigns(C, d, signs, "all-zero", lam)
    alternating = [s * (-1) ** i for i, s in enumerate(signs)]
    if not (1 in alternating and -1 in alternating):
        raise CertificationError(f"sign pattern {signs} contradicts the alternation identity")
    return RootSigns(C, d, signs, "mixed")


def ch3_direct(v: CharacterVector, p: ThreefoldParams, s: Fraction) -> Fraction:
    """ch3^{beta+s}(v) straight from the twist, for rational s."""
    return twist(v, p.beta + s).c[3]


# -- normalization ---------------------------------------------------------------------


@dataclass(frozen=True)
class ThreefoldNormalization:
    params: ThreefoldParams
    g: Matrix
    admissible: bool


def normalize_threefold_charge(m: Sequence[Sequence[RationalLike]]) -> ThreefoldNormalization | Rejection:
    """Find the unique g in GL2+ with g M = Z^{a,b}_{alpha,beta}."""
    m = as_matrix(m, 4)
    # (1) the ch3 column goes to (-1, 0)
    p3, q3 = m[0][3], m[1][3]
    if p3 == 0 and q3 == 0:
        return Rejection("skyscrapers-in-kernel", "step 1: the ch3 column vanishes, so Z(O_p) = 0")
    g = send_to_minus_one(p3, q3)
    cur = mat_mul(g, m)
    # (2) Im coefficient of H ch2 must be positive; scale it to 1
    m1 = cur[1][2]
    if m1 <= 0:
        return Rejection(
            "m1-nonpositive",
            f"step 2: m₁ ≤ 0: contradicts lim_{{t→±∞}} slope behavior (m₁ = {m1})",
        )
    g2 = ((Fraction(1), Fraction(0)), (Fraction(0), 1 / m1))
    g = mat_mul(g2, g)
    cur = mat_mul(g2, cur)
    # (3) beta from the H^2 ch1 coefficient, (4) alpha^2 from the H^3 rk coefficient
    beta = -cur[1][1]
    alpha_sq = beta * beta - 2 * cur[1][0]
    if alpha_sq <= 0:
        return Rejection("alpha-squared-nonpositive", f"step 4: alpha^2 = {alpha_sq} ≤ 0")
    # (5) Re in twisted coordinates: x_j = Re(untwist(e_j))
    re = cur[0]
    x = []
    for j in range(4):
        e = [Fraction(0)] * 4
        e[j] = Fraction(1)
        u = _untwist(e, beta)
        x.append(sum((r * c for r, c in zip(re, u)), Fraction(0)))
    k = 2 * x[0] / alpha_sq
    g3 = ((Fraction(1), k), (Fraction(0), Fraction(1)))
    g = mat_mul(g3, g)
    params = ThreefoldParams(alpha_sq, beta, x[1], x[2] + k)
    # (6) admissibility
    ok = admissible(params).ok
    if not ok:
        return Rejection(
            "inadmissible",
            f"step 6: recovered parameters violate {ADMISSIBILITY_TEXT}",
            {"params": params.to_json(), "g": [[format_rational(c) for c in row] for row in g]},
        )
    return ThreefoldNormalization(params, g, ok)


def _untwist(t: Sequence[Fraction], beta: Fraction) -> list[Fraction]:
    # inverse of twist(., beta) is twist(., -beta)
    return [sum((beta**j / math.factorial(j) * t[i - j] for j in range(i + 1)), Fraction(0)) for i in range(4)]


# -- phase gap witnesses ----------------------------------------------------------------


@dataclass(frozen=True)
class PhaseGapWitness:
    found: bool
    kind: str = ""
    t: Fraction | None = None
    shift: int = 0
    direction: str = ""
    gap: RationalInterval | None = None
    chi: Fraction | None = None
    theta: RationalInterval | None = None
    message: str = ""

    def to_json(self) -> dict:
        if not self.found:
            return {"found": False, "message": self.message}
        return {
            "found": True,
            "kind": self.kind,
            "t": None if self.t is None else format_rational(self.t),
            "shift": self.shift,
            "direction": self.direction,
            "gap": self.gap.to_json(),
            "chi": format_rational(self.chi),
            "theta": self.theta.to_json(),
        }


def grid_points(lo: Fraction, hi: Fraction, denom_bound: int) -> list[Fraction]:
    pts = set()
    for q in range(1, denom_bound + 1):
        for n in range(math.ceil(lo * q), math.floor(hi * q) + 1):
            pts.add(Fraction(n, q))
    return sorted(pts)


def _semihomog_slope(v: CharacterVector) -> Fraction | None:
    """u when v is a positive-rank multiple of e^{uH}, else None."""
    if v.c[0] <= 0:
        return None
    u = v.c[1] / v.c[0]
    tw = twist(v, u).c
    return u if tw[1] == tw[2] == tw[3] == 0 else None


def _candidate_gaps(theta, phi, chi_into, chi_out, eps):
    """(gap, shift, direction) for E[m] with a predicted Hom into or out of F."""
    out = []
    one = 1 + eps
    # into F: Hom(E[m], F) = Ext^{-m}(E, F); gap = theta - phi - m
    base = theta - phi
    for m in range(math.floor(base.lo - one) - 1, math.ceil(base.hi) + 2):
        gap = base - m
        if gap.lo >= 0 and gap.hi <= one and chi_into != 0 and sign(chi_into) == (-1) ** (m % 2):
            out.append((gap, m, "into"))
    # out of F: Hom(F, E[m]) = Ext^m(F, E); gap = phi + m - theta
    base = phi - theta
    for m in range(math.floor(-base.hi) - 1, math.ceil(one - base.lo) + 2):
        gap = base + m
        if gap.lo >= 0 and gap.hi <= one and chi_out != 0 and sign(chi_out) == (-1) ** (m % 2):
            out.append((gap, m, "out"))
    return out


def phase_gap_witness(
    v: CharacterVector,
    p: ThreefoldParams,
    k: int,
    eps: RationalLike,
    denom_bound: int = 24,
    t_range: tuple[RationalLike, RationalLike] | None = None,
    bits: int = 32,
    allow_identity: bool = True,
    directions: tuple[str, ...] = ("into", "out"),
) -> PhaseGapWitness:
    """Grid search for E_t[m] (or O_p[m]) with a chi-predicted Hom to or from v
    and phase gap in [0, 1 + eps].  A desk-scale exploration, not a decision
    procedure: the best gap wins, ties broken by (t, shift, direction).

    Skyscrapers and semi-homogeneous v are their own witnesses (gap 0) unless
    ``allow_identity`` is off, in which case the search skips v's own family.
    """
    _require_threefold(v)
    eps = as_fraction(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    theta = phase_real(v, p, k, bits)
    variety = v.variety
    zero = RationalInterval.point(0)
    is_sky = v.c[0] == v.c[1] == v.c[2] == 0 and v.c[3] != 0
    u = _semihomog_slope(v)
    if allow_identity and is_sky:
        return PhaseGapWitness(True, "skyscraper", None, 0, "identity", zero, Fraction(0), theta)
    if allow_identity and u is not None:
        return PhaseGapWitness(True, "semihomogeneous", u, 0, "identity", zero, Fraction(0), theta)

    if t_range is None:
        a_hi = p.alpha_interval(Fraction(1, 2**20)).hi
        lo, hi = p.beta - 4 * a_hi, p.beta + 4 * a_hi
    else:
        lo, hi = (as_fraction(x) for x in t_range)
    candidates = []
    sky = CharacterVector(variety, (0, 0, 0, 1))
    phi_sky = RationalInterval.point(1)
    chi = euler_pairing(sky, v)
    for gap, m, direction in _candidate_gaps(theta, phi_sky, chi, -chi, eps) if not is_sky else ():
        candidates.append(((gap.mid, 0, Fraction(0), m, direction), ("skyscraper", None, m, direction, chi)))
    for t in grid_points(lo, hi, denom_bound):
        if t == u:
            continue
        e = semihomogeneous_character(variety, t)
        re, im = central_charge_3(e, p)
        if re == 0 and im == 0:
            continue
        phi = phase_real(e, p, window_for(t, p), bits)
        chi = euler_pairing(e, v)
        for gap, m, direction in _candidate_gaps(theta, phi, chi, -chi, eps):
            candidates.append(((gap.mid, 1, t, m, direction), ("semihomogeneous", t, m, direction, chi)))
    candidates = [c for c in candidates if c[0][4] in directions]
    if not candidates:
        return PhaseGapWitness(False, message="no witness found at this grid resolution")
    _, (kind, t, m, direction, chi) = min(candidates, key=lambda c: c[0])

    # re-verify the winner at double precision
    theta_hi = phase_real(v, p, k, 2 * bits)
    if kind == "skyscraper":
        phi_hi = phi_sky
    else:
        phi_hi = phase_real(semihomogeneous_character(variety, t), p, window_for(t, p), 2 * bits)
    gap = theta_hi - phi_hi - m if direction == "into" else phi_hi + m - theta_hi
    if not (gap.lo >= 0 and gap.hi <= 1 + eps):
        raise CertificationError("phase gap witness failed re-verification")
    return PhaseGapWitness(True, kind, t, m, direction, gap, chi, theta_hi)


__all__ = [
    "ADMISSIBILITY_TEXT",
    "Admissibility",
    "BoundaryValues",
    "CubicData",
    "DependenceReport",
    "HomPrediction",
    "LinearForm",
    "PhaseGapWitness",
    "RootSigns",
    "ThreefoldNormalization",
    "ThreefoldParams",
    "TiltSlope",
    "admissible",
    "boundary_re_direct",
    "boundary_re_values",
    "central_charge_3",
    "ch3_at_roots",
    "ch3_direct",
    "cubic_for_slope",
    "heart_shift",
    "hom_prediction_semihomog",
    "im_sign_of_semihomog",
    "kernel_identity_exact",
    "linear_forms_L",
    "normalize_threefold_charge",
    "phase_gap_witness",
    "phase_real",
    "require_admissible",
    "semihomog_window",
    "slope_constant",
    "threefold_charge_matrix",
    "tilt_slope",
    "verify_dependence",
    "verify_identities",
    "window_for",
]
