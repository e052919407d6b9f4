"""Central charges as 2 x N rational matrices, the GL2+ action on them, and phases."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import PreconditionError
from .numerics import RationalInterval, arg_over_pi, as_fraction

Matrix = tuple[tuple[Fraction, ...], ...]

IDENTITY: Matrix = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))


def as_matrix(rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    m = tuple(tuple(as_fraction(x) for x in row) for row in rows)
    if len(m) != 2 or len({len(r) for r in m}) != 1:
        raise PreconditionError("expected a 2-row rectangular matrix")
    if ncols is not None and len(m[0]) != ncols:
        raise PreconditionError(f"expected {ncols} columns, got {len(m[0])}")
    return m


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0])))
        for i in range(len(a))
    )


def det2(g: Matrix) -> Fraction:
    return g[0][0] * g[1][1] - g[0][1] * g[1][0]


def inv2(g: Matrix) -> Matrix:
    d = det2(g)
    if d == 0:
        raise ZeroDivisionError("singular 2x2 matrix")
    return ((g[1][1] / d, -g[0][1] / d), (-g[1][0] / d, g[0][0] / d))


def send_to_minus_one(re: Fraction, im: Fraction) -> Matrix:
    """Complex multiplication by -1/(re + i im): maps (re, im) to (-1, 0), det > 0."""
    n = re * re + im * im
    if n == 0:
        raise PreconditionError("zero column cannot be normalized")
    x, y = -re / n, im / n  # -1/z = -conj(z)/|z|^2
    return ((x, -y), (y, x))


def matrix_to_json(m: Matrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in m]


def heart_shift(re: Fraction, im: Fraction) -> int:
    """0 when Z lies in the upper half plane or on the negative axis, else 1."""
    if im > 0 or (im == 0 and re < 0):
        return 0
    if re == 0 and im == 0:
        raise PreconditionError("charge kernel; phase undefined")
    return 1


def phase_from_charge(re: Fraction, im: Fraction, k: int = 0, bits: int = 64) -> RationalInterval:
    """Certified phase of an object whose k-th shift sits in P((0, 1]).

    phi = Arg((-1)^k Z)/pi - k with Arg taken in (0, pi].
    """
    if re == 0 and im == 0:
        raise PreconditionError("charge kernel; phase undefined")
    s = -1 if k % 2 else 1
    r, i = s * re, s * im
    if i < 0 or (i == 0 and r > 0):
        raise PreconditionError(
            f"shift {k} does not move Z = {re} + {im}i into the upper half plane"
        )
    return arg_over_pi(r, i, bits) - k


@dataclass(frozen=True)
class Rejection:
    """A normalization that stopped at a failed step; ``reason`` is machine-readable."""

    reason: str
    detail: str
    payload: dict | None = None

    def to_json(self) -> dict:
        out = {"rejected": True, "reason": self.reason, "detail": self.detail}
        if self.payload:
            out.update(self.payload)
        return out
