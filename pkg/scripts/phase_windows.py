#!/usr/bin/env python3
"""Phases of semi-homogeneous classes E_t across t, with their shift windows.

    python scripts/phase_windows.py --alpha 1 --beta 0 --a 1 --b 0 --step 1/4
"""

import argparse
from fractions import Fraction

from tiltbench.lattice import PolarizedVariety, semihomogeneous_character
from tiltbench.threefold import ThreefoldParams, central_charge_3, phase_real, window_for


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in (("alpha", "1"), ("beta", "0"), ("a", "1"), ("b", "0"), ("step", "1/4"), ("span", "3")):
        ap.add_argument(f"--{name}", default=default)
    ap.add_argument("--h", type=int, default=6)
    args = ap.parse_args()

    p = ThreefoldParams.from_alpha(*(Fraction(getattr(args, k)) for k in ("alpha", "beta", "a", "b")))
    variety = PolarizedVariety(3, args.h)
    step, span = Fraction(args.step), Fraction(args.span)
    t = p.beta - span
    print(f"{'t':>8} {'rank':>6} {'Re Z':>12} {'Im Z':>12} {'k':>2}  phase")
    while t <= p.beta + span:
        e = semihomogeneous_character(variety, t)
        re, im = central_charge_3(e, p)
        k = window_for(t, p)
        phi = phase_real(e, p, k, bits=40)
        print(f"{str(t):>8} {str(e[0] / args.h):>6} {str(re):>12} {str(im):>12} {k:>2}  {float(phi.mid):+.9f}")
        t += step


if __name__ == "__main__":
    main()
