"""One test per acceptance criterion; each asserts its own runtime budget.

The terminal summary prints a PASS/FAIL line per criterion.
"""

import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction as F

import pytest
import sympy as sp

from fixtures import WALL_FIXTURES
from oracles import brute_force_walls, oracle_box
from tiltbench import cli
from tiltbench.charges import Rejection, det2, inv2, mat_mul
from tiltbench.errors import CertificationError, PreconditionError
from tiltbench.lattice import (
    CharacterVector,
    PolarizedVariety,
    bogomolov_delta,
    euler_pairing,
    minimal_rank,
    semihomogeneous_character,
    twist,
)
from tiltbench.numerics import DEFAULT_WIDTH, Poly, sign_at_sqrt
from tiltbench.surface import (
    LePotierModel,
    SurfaceNormalization,
    central_charge_surface,
    enumerate_walls,
    lepotier_eval,
    normalize_surface_charge,
    surface_charge_matrix,
    wall_line,
)
from tiltbench.threefold import (
    ThreefoldNormalization,
    ThreefoldParams,
    boundary_re_values,
    central_charge_3,
    ch3_at_roots,
    cubic_for_slope,
    cubic_poly,
    im_sign_of_semihomog,
    kernel_identity_exact,
    l_root_poly,
    normalize_threefold_charge,
    phase_real,
    semihomog_window,
    threefold_charge_matrix,
    verify_identities,
)

X6 = PolarizedVariety(3, 6)


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f}s, budget {seconds}s"


def rand_q(rng, num=12, den=6):
    return F(rng.randint(-num, num), rng.randint(1, den))


def rand_pos(rng, num=12, den=6):
    return F(rng.randint(1, num), rng.randint(1, den))


def rand_admissible(rng):
    alpha = rand_pos(rng, 8, 4)
    b = rand_q(rng, 6, 4)
    a = alpha**2 / 6 + abs(b) * alpha / 2 + rand_pos(rng, 10, 4)
    return ThreefoldParams.from_alpha(alpha, rand_q(rng, 6, 4), a, b)


def rand_g0(rng):
    while True:
        g = ((rand_q(rng), rand_q(rng)), (rand_q(rng), rand_q(rng)))
        if det2(g) > 0:
            return g


@pytest.mark.criterion(1, "Euler pairing of semi-homogeneous characters")
def test_criterion_1_euler_closed_form():
    rng = random.Random(1)
    with budget(1):
        for n in range(100):
            h = (1, 6)[n % 2]
            variety = PolarizedVariety(3, h)
            s, t = rand_q(rng, 8, 6), rand_q(rng, 8, 6)
            rs, rt = minimal_rank(variety, s), minimal_rank(variety, t)
            es, et = semihomogeneous_character(variety, s), semihomogeneous_character(variety, t)
            assert (es[0], et[0]) == (rs * h, rt * h)
            assert euler_pairing(es, et) == F(rs * rt * h) * (t - s) ** 3 / 6


@pytest.mark.criterion(2, "twist group action and discriminant invariance")
def test_criterion_2_twist_action():
    rng = random.Random(2)
    with budget(1):
        for n in range(1000):
            variety = X6 if n % 2 else PolarizedVariety(2, 1)
            v = CharacterVector(variety, tuple(rand_q(rng) for _ in range(variety.dim + 1)))
            b1, b2 = rand_q(rng), rand_q(rng)
            assert twist(twist(v, b1), b2) == twist(v, b1 + b2)
            assert twist(twist(v, b1), -b1) == v
            assert bogomolov_delta(twist(v, b1)) == bogomolov_delta(v)


@pytest.mark.criterion(3, "wall lines are exact collinearity loci")
def test_criterion_3_wall_linearity():
    rng = random.Random(3)
    with budget(5):
        al, be = sp.symbols("alpha beta")
        vs = sp.symbols("v0:3")
        ws = sp.symbols("w0:3")
        cross = sp.expand((-vs[2] + al * vs[0]) * (ws[1] - be * ws[0]) - (-ws[2] + al * ws[0]) * (vs[1] - be * vs[0]))
        assert sp.Poly(cross, al, be).coeff_monomial(al * be) == 0
        S = PolarizedVariety(2, 1)
        lines = 0
        while lines < 100:
            v = CharacterVector(S, tuple(rand_q(rng, 9, 2) for _ in range(3)))
            w = CharacterVector(S, tuple(rand_q(rng, 9, 2) for _ in range(3)))
            line = wall_line(v, w)
            if line.degenerate or (line.A == 0 and line.B == 0):
                continue
            lines += 1

            def collinearity(alpha, beta):
                rv, iv = central_charge_surface(v, alpha, beta)
                rw, iw = central_charge_surface(w, alpha, beta)
                return rv * iw - rw * iv

            for _ in range(20):
                if line.A != 0:
                    beta = rand_q(rng, 20, 7)
                    alpha = -(line.B * beta + line.C0) / line.A
                else:
                    alpha = rand_q(rng, 20, 7)
                    beta = -line.C0 / line.B
                assert collinearity(alpha, beta) == 0
                off_alpha = alpha + rand_pos(rng, 5, 3)
                if line.A != 0:
                    assert collinearity(off_alpha, beta) != 0
                else:
                    assert collinearity(alpha, beta + rand_pos(rng, 5, 3)) != 0


def _fixture_model(pieces):
    if pieces is None:
        return None
    return LePotierModel.piecewise([(lo, hi, Poly(c)) for lo, hi, c in pieces])


@pytest.mark.criterion(4, "wall enumeration equals the brute-force oracle")
def test_criterion_4_walls_vs_oracle():
    with budget(30):
        assert len(WALL_FIXTURES) >= 5
        for name, (h, v, box, rank, amin, pieces, frozen) in WALL_FIXTURES.items():
            variety = PolarizedVariety(2, h)
            w0s, w1s, w2s = oracle_box(v, box, rank, amin, variety.denominators)
            assert len(w0s) * len(w1s) * len(w2s) <= 1000, name
            expected, face_hits = brute_force_walls(v, box, w0s, w1s, w2s, pieces)
            assert face_hits == [], f"{name}: oracle box too small"
            got = enumerate_walls(CharacterVector(variety, v), box, _fixture_model(pieces), rank)
            assert [w.primitive for w in got] == expected == frozen, name


@pytest.mark.criterion(5, "certified cubic suite on random admissible instances")
def test_criterion_5_cubic_suite():
    rng = random.Random(5)
    with budget(60):
        for _ in range(100):
            p = rand_admissible(rng)
            C = rand_q(rng, 10, 6)
            d = cubic_for_slope(C, p)
            f = cubic_poly(C, p)
            assert sign_at_sqrt(f, p.alpha_sq) < 0 < sign_at_sqrt(f.compose_neg(), p.alpha_sq)
            alpha = p.alpha
            s1, s2, s3 = d.roots
            assert s1.hi < -alpha < s2.lo and s2.hi < alpha < s3.lo
            # Vieta from the coefficients of 6 f = x^3 + 3(C-b) x^2 - 6a x - 3 alpha^2 C
            six_f = [6 * c for c in f.coeffs]
            assert six_f[3] == 1
            assert d.vieta == (-six_f[2], six_f[1], -six_f[0])
            assert d.vieta == (3 * p.b - 3 * C, -6 * p.a, 3 * p.alpha_sq * C)
            for enc, exact in zip(d.vieta_enclosures(), d.vieta):
                assert enc.contains(exact)
            report = verify_identities(d, DEFAULT_WIDTH)
            assert report.certified
            assert all(c.width <= DEFAULT_WIDTH for c in report.certificates)


@pytest.mark.criterion(6, "proportional family vanishes at all three roots")
def test_criterion_6_all_zero_family():
    rng = random.Random(6)
    with budget(5):
        for _ in range(50):
            p = rand_admissible(rng)
            C = rand_q(rng, 6, 4)
            # L_s on (x, y, z) = (-a, b - C, 1) is -f(s) identically, hence 0 at every root
            assert kernel_identity_exact(C, p)
            f = cubic_poly(C, p)
            g = l_root_poly(-p.a, p.b - C, F(1), C, p)
            assert (g % f).is_zero()
            lam = rng.randint(1, 6)
            v = twist(CharacterVector(X6, (lam, lam * (p.b - C), -lam * p.a, lam * C * p.alpha_sq / 2)), -p.beta)
            out = ch3_at_roots(v, p)
            assert out.signs == (0, 0, 0) and out.classification == "all-zero" and out.lam == lam


@pytest.mark.criterion(7, "normalization round trips and rejection paths")
def test_criterion_7_normalization():
    rng = random.Random(7)
    with budget(5):
        for _ in range(100):
            beta = rand_q(rng)
            alpha = beta**2 / 2 + rand_pos(rng)
            g0 = rand_g0(rng)
            out = normalize_surface_charge(mat_mul(g0, surface_charge_matrix(alpha, beta)), LePotierModel.parabola())
            assert isinstance(out, SurfaceNormalization)
            assert (out.alpha, out.beta, out.g, out.in_region) == (alpha, beta, inv2(g0), True)
        for _ in range(100):
            p = rand_admissible(rng)
            g0 = rand_g0(rng)
            out = normalize_threefold_charge(mat_mul(g0, threefold_charge_matrix(p)))
            assert isinstance(out, ThreefoldNormalization)
            assert (out.params, out.g, out.admissible) == (p, inv2(g0), True)
        surface_cases = {
            "skyscrapers-in-kernel": [[1, 2, 0], [3, 4, 0]],
            "torsion-sheaf-positivity": [[1, 0, -1], [0, -1, 0]],
        }
        for reason, m in surface_cases.items():
            out = normalize_surface_charge(m)
            assert isinstance(out, Rejection) and out.reason == reason
        threefold_cases = {
            "skyscrapers-in-kernel": [[1, 2, 3, 0], [4, 5, 6, 0]],
            "m1-nonpositive": [[0, 0, 0, -1], [0, 0, -1, 0]],
            "alpha-squared-nonpositive": [[0, 0, 0, -1], [1, 0, 1, 0]],
            "inadmissible": threefold_charge_matrix(ThreefoldParams.from_alpha(1, 0, F(1, 12), 0)),
        }
        for reason, m in threefold_cases.items():
            out = normalize_threefold_charge(m)
            assert isinstance(out, Rejection) and out.reason == reason


@pytest.mark.criterion(8, "semi-homogeneous phase windows and boundary values")
def test_criterion_8_phase_windows():
    rng = random.Random(8)
    with budget(10):
        for _ in range(20):
            p = rand_admissible(rng)
            alpha, beta = p.alpha, p.beta
            # 200 grid values of t, including both thresholds
            ts = sorted({beta + alpha * F(k - 100, 40) for k in range(200)} | {beta - alpha, beta + alpha})
            for t in ts:
                e = semihomogeneous_character(X6, t)
                re, im = central_charge_3(e, p)
                d = t - beta
                expected = (d * d > alpha * alpha) - (d * d < alpha * alpha)
                assert im_sign_of_semihomog(t, p) == expected == (im > 0) - (im < 0)
                k = semihomog_window(t, alpha, beta)
                if re == 0 and im == 0:
                    continue
                phi = phase_real(e, p, k, bits=24)
                assert -k < phi.lo and phi.hi <= -k + 1
            bv = boundary_re_values(p, X6)
            e_plus = semihomogeneous_character(X6, beta + alpha)
            e_minus = semihomogeneous_character(X6, beta - alpha)
            core = p.a - alpha**2 / 6
            assert bv.re_plus == -e_plus[0] * alpha * (core + p.b * alpha / 2) == -central_charge_3(e_plus, p)[0]
            assert bv.re_minus == -e_minus[0] * alpha * (core - p.b * alpha / 2) == central_charge_3(e_minus, p)[0]
            assert bv.re_plus < 0 and bv.re_minus < 0


@pytest.mark.criterion(9, "Le Potier guard")
def test_criterion_9_lepotier_guard():
    rng = random.Random(9)
    with budget(1):
        parabola = LePotierModel.parabola()
        for _ in range(100):
            x = rand_q(rng, 50, 13)
            assert lepotier_eval(parabola, x) == x * x / 2
        bad = [
            [(-1, 1, [F(1, 100), 0, F(1, 2)])],
            [(0, 2, [0, 1])],
            [(-3, -1, [F(-1, 8), 0, F(1, 2)]), (-1, 1, [0, 0, F(3, 5)])],
            [(F(1, 3), F(1, 2), [F(1, 8)])],
        ]
        for pieces in bad:
            with pytest.raises(PreconditionError):
                LePotierModel.piecewise(pieces)
        for _ in range(50):
            lo = rand_q(rng, 6, 3)
            hi = lo + rand_pos(rng, 4, 3)
            # x^2/2 - k (x - c)^2 - m with k, m >= 0 stays under the parabola
            c, k, m = rand_q(rng, 4, 4), F(rng.randint(0, 4), 8), F(rng.randint(0, 4), 4)
            model = LePotierModel.piecewise([(lo, hi, [-k * c * c - m, 2 * k * c, F(1, 2) - k])])
            for j in range(11):
                x = lo + (hi - lo) * F(j, 10)
                assert lepotier_eval(model, x) <= x * x / 2


def _run_cli(argv, capsys):
    code = cli.main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


@pytest.mark.criterion(10, "CLI determinism and exit codes")
def test_criterion_10_cli(tmp_path, capsys, monkeypatch):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    with budget(30):
        for name, (h, v, box, rank, _, pieces, frozen) in WALL_FIXTURES.items():
            char = write(f"{name}.json", {"variety": {"dim": 2, "h": h}, "c": [str(F(x)) for x in v]})
            argv = ["walls", char, f"--box={','.join(str(F(x)) for x in box)}", "--max-rank", str(rank)]
            if pieces is not None:
                model = {"kind": "piecewise", "pieces": [
                    {"interval": [str(F(lo)), str(F(hi))], "poly": [str(F(c)) for c in cs]} for lo, hi, cs in pieces]}
                argv += ["--model", write(f"{name}-model.json", model)]
            for fmt in ("json", "csv", "svg"):
                first = _run_cli(argv + ["--format", fmt], capsys)
                again = _run_cli(argv + ["--format", fmt, "--workers", "4"], capsys)
                assert first == again and first[0] == 0, (name, fmt)
            walls = json.loads(_run_cli(argv, capsys)[1])["result"]["walls"]
            assert [tuple(w["primitive"]) for w in walls] == frozen

        charset = write("set.json", {"variety": {"dim": 3, "h": 6}, "characters": [
            {"name": "O_p", "c": ["0", "0", "0", "1"]}, {"name": "O_A", "c": ["6", "0", "0", "0"]},
            {"name": "E_1", "semihomog": "1"}, {"name": "E_-1", "semihomog": "-1"}]})
        scan = ["scan", charset, "--alpha-range", "1/2,3/2", "--beta-range=-1,1", "--grid", "5,5", "--a", "2"]
        for fmt in ("json", "csv", "svg"):
            outs = {_run_cli(scan + ["--format", fmt, "--workers", str(n)], capsys) for n in (1, 2, 4)}
            assert len(outs) == 1 and next(iter(outs))[0] == 0

        # exit-code contract
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        assert _run_cli(["charge", str(bad), "--alpha", "1", "--a", "1"], capsys)[0] == 2
        neg = write("neg.json", {"variety": {"dim": 2, "h": 1}, "c": ["1", "0", "1"]})
        assert _run_cli(["walls", neg, "--box=-1,1,2"], capsys)[0] == 3
        assert _run_cli(["cubic", "--C", "0", "--alpha", "1", "--a", "1/6"], capsys)[0] == 4

        def broken(*args, **kwargs):
            raise CertificationError("forced")

        monkeypatch.setattr(cli, "verify_identities", broken)
        code, out, err = _run_cli(["cubic", "--C", "0", "--alpha", "1", "--a", "1"], capsys)
        assert code == 5 and out == "" and json.loads(err)["error"] == "certification"
