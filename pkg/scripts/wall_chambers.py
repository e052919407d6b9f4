#!/usr/bin/env python3
"""Numerical walls of a surface class in a (beta, alpha) box.

    python scripts/wall_chambers.py 1 0 -1 --box=-2,0,3 --max-rank 2 --svg walls.svg
"""

import argparse
from fractions import Fraction

from tiltbench import __version__
from tiltbench.emit import Svg, clip_line, header
from tiltbench.lattice import CharacterVector, PolarizedVariety
from tiltbench.surface import LePotierModel, enumerate_walls


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("c", nargs=3, help="H^2 rk, H ch1, ch2")
    ap.add_argument("--h", type=int, default=1, help="H^2")
    ap.add_argument("--box", default="-2,0,3", help="beta1,beta2,alpha_max")
    ap.add_argument("--max-rank", default=None)
    ap.add_argument("--svg", help="write a picture of the walls here")
    args = ap.parse_args()

    v = CharacterVector.lattice(PolarizedVariety(2, args.h), [Fraction(x) for x in args.c])
    box = [Fraction(x) for x in args.box.split(",")]
    model = LePotierModel.parabola()
    walls = enumerate_walls(v, box, model, args.max_rank)
    print(f"{len(walls)} walls for v = ({', '.join(v.to_strings())})")
    for w in walls:
        a, b, c = w.primitive
        print(f"  {a:>4} alpha + {b:>4} beta + {c:>4} = 0    witness w = ({', '.join(w.witness.to_strings())})")

    if args.svg:
        b1, b2, amax = box
        pic = Svg(header({"script": "wall_chambers", "v": v.to_strings(), "box": args.box}, __version__),
                  (b1, b2), (Fraction(0), amax))
        xs = [b1 + (b2 - b1) * Fraction(i, 64) for i in range(65)]
        pic.polyline([(x, min(model(x), amax)) for x in xs], "black", "lepotier")
        for w in walls:
            seg = clip_line(w.A, w.B, w.C0, (b1, b2, Fraction(0), amax))
            if seg:
                pic.line(*seg, "steelblue", "wall")
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(pic.render())


if __name__ == "__main__":
    main()
