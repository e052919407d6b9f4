"""Wall-enumeration instances shared by the unit and acceptance suites.

Each entry: (h, v, box, max_rank, alpha_min over the beta range, model pieces or None,
primitive walls fixed by the brute-force oracle).
"""

from fractions import Fraction as F

PIECEWISE = [(-2, F(-3, 2), [F(-1, 8), 0, F(1, 2)]), (F(-3, 2), -1, [F(-1, 4), 0, F(1, 2)])]

WALL_FIXTURES = {
    "ideal-sheaf": (1, (1, 0, -1), (-2, 0, 3), 1, 0, None, [(2, 3, 2)]),
    "skyscraper": (1, (0, 0, 1), (-2, 0, 3), 1, 0, None, []),
    "semihomogeneous": (1, (1, 1, F(1, 2)), (-1, F(1, 2), 2), 1, 0, None, []),
    "rank-two": (2, (2, -1, -2), (-2, 0, 2), 1, 0, None, [(2, 6, 5), (4, 10, 9), (10, 22, 21)]),
    "torsion": (1, (0, 2, -1), (-1, 1, 2), 2, 0, None, [(2, 1, 0)]),
    "piecewise": (
        1, (1, 0, -1), (-2, -1, F(3, 2)), 2, F(7, 8), PIECEWISE,
        [(2, 3, 2), (3, 4, 3), (4, 5, 4), (5, 7, 5), (8, 11, 8)],
    ),
}
