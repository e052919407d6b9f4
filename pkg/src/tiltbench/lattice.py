"""Numerical classes on a polarized variety of Picard rank one.

A class is stored in the coordinates ``(H^n rk, H^{n-1} ch_1, ..., ch_n)``;
the polarization only enters through its degree ``h = H^n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import PreconditionError
from .numerics import RationalLike, RealInterval, as_fraction, format_rational

DEFAULT_DENOMINATORS = {2: (1, 1, 2), 3: (1, 1, 2, 6)}


@dataclass(frozen=True)
class PolarizedVariety:
    dim: int
    h: int
    denominators: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise PreconditionError(f"dimension must be 2 or 3, got {self.dim}")
        if not isinstance(self.h, int) or self.h < 1:
            raise PreconditionError(f"H^n must be a positive integer, got {self.h}")
        dens = tuple(self.denominators) or DEFAULT_DENOMINATORS[self.dim]
        if len(dens) != self.dim + 1 or any(d < 1 for d in dens):
            raise PreconditionError(f"bad denominator bounds {dens}")
        object.__setattr__(self, "denominators", dens)

    def to_json(self) -> dict:
        out = {"dim": self.dim, "h": self.h}
        if self.denominators != DEFAULT_DENOMINATORS[self.dim]:
            out["denominators"] = list(self.denominators)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PolarizedVariety":
        return cls(int(data["dim"]), int(data["h"]), tuple(int(d) for d in data.get("denominators", ())))


@dataclass(frozen=True)
class CharacterVector:
    variety: PolarizedVariety
    c: tuple[Fraction, ...]

    def __post_init__(self):
        c = tuple(as_fraction(x) for x in self.c)
        if len(c) != self.variety.dim + 1:
            raise PreconditionError(f"expected {self.variety.dim + 1} entries, got {len(c)}")
        object.__setattr__(self, "c", c)

    @classmethod
    def lattice(cls, variety: PolarizedVariety, c: Iterable[RationalLike]) -> "CharacterVector":
        """Build a character and insist that it lies in the declared lattice."""
        v = cls(variety, tuple(c))
        if not v.in_lattice():
            raise PreconditionError(
                f"{v.to_strings()} violates denominator bounds {variety.denominators}"
            )
        return v

    @classmethod
    def zero(cls, variety: PolarizedVariety) -> "CharacterVector":
        return cls(variety, (0,) * (variety.dim + 1))

    @property
    def dim(self) -> int:
        return self.variety.dim

    def __getitem__(self, i: int) -> Fraction:
        return self.c[i]

    def in_lattice(self) -> bool:
        return all((x * d).denominator == 1 for x, d in zip(self.c, self.variety.denominators))

    def _check(self, other: "CharacterVector"):
        if self.variety != other.variety:
            raise PreconditionError("characters live on different varieties")

    def __add__(self, other: "CharacterVector") -> "CharacterVector":
        self._check(other)
        return CharacterVector(self.variety, tuple(a + b for a, b in zip(self.c, other.c)))

    def __sub__(self, other: "CharacterVector") -> "CharacterVector":
        self._check(other)
        return CharacterVector(self.variety, tuple(a - b for a, b in zip(self.c, other.c)))

    def __neg__(self) -> "CharacterVector":
        return CharacterVector(self.variety, tuple(-a for a in self.c))

    def scale(self, k: RationalLike) -> "CharacterVector":
        k = as_fraction(k)
        return CharacterVector(self.variety, tuple(k * a for a in self.c))

    def is_zero(self) -> bool:
        return not any(self.c)

    def to_strings(self) -> list[str]:
        return [format_rational(x) for x in self.c]

    def to_json(self) -> dict:
        return {"variety": self.variety.to_json(), "c": self.to_strings()}

    @classmethod
    def from_json(cls, data: dict, strict: bool = True) -> "CharacterVector":
        variety = PolarizedVariety.from_json(data["variety"])
        entries = [as_fraction(x) for x in data["c"]]
        return cls.lattice(variety, entries) if strict else cls(variety, tuple(entries))


def twist(v: CharacterVector, beta: RationalLike) -> CharacterVector:
    """Coordinates of e^{-beta H} ch(v)."""
    beta = as_fraction(beta)
    n = v.dim
    out = []
    for i in range(n + 1):
        # ch_i^beta = sum_j (-beta)^j / j! ch_{i-j}
        acc = Fraction(0)
        for j in range(i + 1):
            acc += (-beta) ** j / math.factorial(j) * v.c[i - j]
        out.append(acc)
    return CharacterVector(v.variety, tuple(out))


def minimal_rank(variety: PolarizedVariety, s: RationalLike) -> int:
    """Smallest r > 0 with every entry r h s^i / i! integral."""
    s = as_fraction(s)
    return math.lcm(*(
        (variety.h * s**i / math.factorial(i)).denominator for i in range(variety.dim + 1)
    ))


def semihomogeneous_character(
    variety: PolarizedVariety, s: RationalLike, r: int | None = None
) -> CharacterVector:
    """Character rk * e^{sH} of a simple semi-homogeneous bundle E_s.

    The rank defaults to the least integer making every coordinate an integer;
    an explicit ``r`` is accepted when it lands in the declared lattice.
    """
    s = as_fraction(s)
    if r is None:
        r = minimal_rank(variety, s)
    elif r < 1:
        raise PreconditionError(f"rank must be positive, got {r}")
    c = tuple(r * variety.h * s**i / math.factorial(i) for i in range(variety.dim + 1))
    v = CharacterVector(variety, c)
    if not v.in_lattice():
        raise PreconditionError(
            f"rank {r} at s={s} gives {v.to_strings()}, outside denominator bounds {variety.denominators}"
        )
    return v


def euler_pairing(v: CharacterVector, w: CharacterVector) -> Fraction:
    """chi(v, w) on an abelian threefold via Hirzebruch-Riemann-Roch."""
    v._check(w)
    if v.dim != 3:
        raise PreconditionError("the Euler pairing is implemented for threefolds only")
    a, b = v.c, w.c
    return (a[0] * b[3] - a[1] * b[2] + a[2] * b[1] - a[3] * b[0]) / v.variety.h


def bogomolov_delta(v: CharacterVector) -> Fraction:
    return v.c[1] ** 2 - 2 * v.c[0] * v.c[2]


def nabla_beta(v: CharacterVector, beta: RationalLike) -> Fraction:
    if v.dim != 3:
        raise PreconditionError("nabla is defined on threefolds")
    t = twist(v, beta).c
    return 4 * t[2] ** 2 - 6 * t[1] * t[3]


def slope(v: CharacterVector) -> Fraction | float:
    """H-slope c_1/c_0, +inf for rank zero."""
    return v.c[1] / v.c[0] if v.c[0] else math.inf


# -- formal Harder-Narasimhan data ------------------------------------------


@dataclass(frozen=True)
class FormalHN:
    """Factors (character, phase) listed with strictly decreasing phases."""

    pieces: tuple[tuple[CharacterVector, Fraction], ...] = ()
    variety: PolarizedVariety | None = None

    def __post_init__(self):
        pieces = tuple((v, as_fraction(phi)) for v, phi in self.pieces)
        for (_, a), (_, b) in zip(pieces, pieces[1:]):
            if not a > b:
                raise PreconditionError("phases must be strictly decreasing")
        varieties = {v.variety for v, _ in pieces}
        if self.variety is not None:
            varieties.add(self.variety)
        if len(varieties) > 1:
            raise PreconditionError("HN factors live on different varieties")
        object.__setattr__(self, "pieces", pieces)
        if self.variety is None and varieties:
            object.__setattr__(self, "variety", varieties.pop())

    @property
    def phases(self) -> list[Fraction]:
        return [phi for _, phi in self.pieces]

    @property
    def phi_plus(self) -> Fraction | None:
        return self.pieces[0][1] if self.pieces else None

    @property
    def phi_minus(self) -> Fraction | None:
        return self.pieces[-1][1] if self.pieces else None


def hn_truncate(f: FormalHN, interval: RealInterval) -> FormalHN:
    """Keep the factors whose phase lies in ``interval`` (empty when none do)."""
    return FormalHN(tuple(p for p in f.pieces if interval.contains(p[1])), f.variety)


def hn_sum(f: FormalHN, variety: PolarizedVariety | None = None) -> CharacterVector:
    variety = f.variety or variety
    if variety is None:
        raise PreconditionError("empty filtration without a variety has no class")
    total = CharacterVector.zero(variety)
    for v, _ in f.pieces:
        total = total + v
    return total

