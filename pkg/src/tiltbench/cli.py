"""Command-line front end: ``tiltbench <command> [options]``.

Exit codes: 0 ok, 2 parse/usage, 3 mathematical precondition, 4 admissibility,
5 certification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .charges import heart_shift, phase_from_charge
from .emit import Svg, clip_line, header, to_csv_text, to_json_text
from .errors import AdmissibilityError, CertificationError, PreconditionError
from .lattice import CharacterVector, PolarizedVariety, euler_pairing, semihomogeneous_character
from .numerics import as_fraction, format_rational, sign
from .surface import (
    LePotierModel,
    SurfaceParams,
    central_charge_surface,
    enumerate_walls,
    normalize_surface_charge,
)
from .threefold import (
    ThreefoldParams,
    admissible,
    central_charge_3,
    cubic_for_slope,
    normalize_threefold_charge,
    verify_identities,
    phase_gap_witness,
    window_for,
)

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_ADMISSIBILITY, EXIT_CERTIFICATION = 0, 2, 3, 4, 5
DEFAULT_PRECISION = 128
MIN_PRECISION = 16
PRECISION_ENV = "TILTBENCH_PRECISION"

# options that may come from flags or the config file; None marks "unset"
DEFAULTS: dict[str, Any] = {
    "mode": "threefold",
    "model": "parabola",
    "format": "json",
    "width": None,
    "grid": "5,5",
    "denom_bound": 24,
    "alpha": None,
    "alpha_sq": None,
    "beta": "0",
    "a": None,
    "b": "0",
    "box": None,
    "max_rank": None,
    "C": None,
    "shift": None,
    "phase": False,
    "x": None,
    "alpha_range": None,
    "beta_range": None,
    "phase_bits": 32,
    "dim": 3,
    "h": 1,
    "s": None,
    "rank": None,
    "eps": "1/10",
    "identity": True,
}
# excluded from the config hash: they do not change the result
UNHASHED = {"out", "workers", "config"}


class UsageError(Exception):
    """Bad input text or options; maps to exit code 2."""

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


@dataclass
class RunConfig:
    command: str
    options: dict[str, Any]
    inputs: dict[str, Any] = field(default_factory=dict)
    out: str | None = None
    workers: int = 1

    def get(self, key: str) -> Any:
        return self.options.get(key)

    def rational(self, key: str, required: bool = True) -> Fraction | None:
        raw = self.options.get(key)
        if raw is None:
            if required:
                raise UsageError(f"--{key.replace('_', '-')} is required for '{self.command}'")
            return None
        try:
            return as_fraction(str(raw))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def pair(self, key: str, n: int) -> list[Fraction]:
        raw = self.options.get(key)
        if raw is None:
            raise UsageError(f"--{key.replace('_', '-')} is required for '{self.command}'")
        parts = [p for p in str(raw).split(",")]
        if len(parts) != n:
            raise UsageError(f"--{key.replace('_', '-')} expects {n} comma-separated values")
        try:
            return [as_fraction(p) for p in parts]
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    @property
    def width_exponent(self) -> int:
        return self.options["precision"]

    @property
    def width(self) -> Fraction:
        return Fraction(1, 2**self.width_exponent)

    def hash_payload(self) -> dict:
        opts = {k: v for k, v in self.options.items() if k not in UNHASHED}
        return {"command": self.command, "options": opts, "inputs": self.inputs}


# -- input parsing ------------------------------------------------------------------


def _load_json(path: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}",
            {"file": path, "line": exc.lineno, "column": exc.colno},
        ) from exc


def _character(data: Any, where: str) -> CharacterVector:
    try:
        variety = PolarizedVariety.from_json(data["variety"])
        if "semihomog" in data:
            rank = data.get("rank")
            return semihomogeneous_character(variety, as_fraction(str(data["semihomog"])), rank)
        return CharacterVector.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise UsageError(f"{where}: malformed character record ({exc})") from exc


def _model(cfg: RunConfig) -> LePotierModel:
    spec = cfg.get("model")
    if isinstance(spec, dict):
        return LePotierModel.from_json(spec)
    if spec in (None, "parabola"):
        return LePotierModel.parabola()
    return LePotierModel.from_json(cfg.inputs["model"])


def _threefold_params(cfg: RunConfig, alpha: Fraction | None = None) -> ThreefoldParams:
    beta, a, b = cfg.rational("beta"), cfg.rational("a"), cfg.rational("b")
    if alpha is None and cfg.get("alpha_sq") is not None:
        return ThreefoldParams(cfg.rational("alpha_sq"), beta, a, b)
    alpha = alpha if alpha is not None else cfg.rational("alpha")
    return ThreefoldParams.from_alpha(alpha, beta, a, b)


def _interval_json(iv) -> list[str]:
    return iv.to_json()


# -- commands -------------------------------------------------------------------------


@dataclass
class Output:
    record: Any
    columns: list[str] | None = None
    rows: list[list[Any]] | None = None
    svg: Callable[[dict], str] | None = None


def cmd_charge(cfg: RunConfig) -> Output:
    v = _character(cfg.inputs["character"], "character")
    bits = cfg.width_exponent
    if cfg.get("mode") == "surface":
        sp = SurfaceParams(cfg.rational("alpha"), cfg.rational("beta"), _model(cfg))
        re, im = central_charge_surface(v, sp.alpha, sp.beta)
        extra = {}
    else:
        p = _threefold_params(cfg)
        re, im = central_charge_3(v, p)
        extra = {"admissible": admissible(p).ok}
    rec: dict[str, Any] = {"re": format_rational(re), "im": format_rational(im), **extra}
    if cfg.get("phase"):
        k = cfg.get("shift")
        k = heart_shift(re, im) if k is None else int(k)
        phase = phase_from_charge(re, im, k, bits)
        rec["shift"] = k
        rec["phase"] = _interval_json(phase)
    cols = list(rec)
    row = [json.dumps(x) if isinstance(x, list) else x for x in rec.values()]
    return Output(rec, cols, [row])


def cmd_walls(cfg: RunConfig) -> Output:
    v = _character(cfg.inputs["character"], "character")
    box = cfg.pair("box", 3)
    model = _model(cfg)
    max_rank = cfg.rational("max_rank", required=False)
    walls = enumerate_walls(v, box, model, max_rank)
    rec = {"character": v.to_strings(), "box": [format_rational(x) for x in box],
           "walls": [w.to_json() for w in walls]}
    cols = ["A", "B", "C0", "p_alpha", "p_beta", "p_const", "witness"]
    rows = [
        [format_rational(w.A), format_rational(w.B), format_rational(w.C0), *w.primitive,
         " ".join(w.witness.to_strings())]
        for w in walls
    ]

    def svg(head: dict) -> str:
        b1, b2, amax = box
        amin = min(Fraction(0), model.minimum(b1, b2))
        if b1 == b2:
            b1, b2 = b1 - 1, b2 + 1
        pic = Svg(head, (b1, b2), (amin, amax))
        n = 64
        pts = [b1 + (b2 - b1) * Fraction(i, n) for i in range(n + 1)]
        pic.polyline([(x, min(max(model(x), amin), amax)) for x in pts], "black", "lepotier")
        for w in walls:
            seg = clip_line(w.A, w.B, w.C0, (b1, b2, amin, amax))
            if seg is not None:
                pic.line(seg[0], seg[1], "steelblue", "wall")
        return pic.render()

    return Output(rec, cols, rows, svg)


def cmd_cubic(cfg: RunConfig) -> Output:
    p = _threefold_params(cfg)
    C = cfg.rational("C")
    width = cfg.width
    data = cubic_for_slope(C, p, width)
    report = verify_identities(data, width)
    rec = data.to_json()
    rec["interlacing"] = "s1 < -alpha < s2 < alpha < s3 (from f(alpha) < 0 < f(-alpha))"
    rec["vieta_enclosures"] = [iv.to_json() for iv in data.vieta_enclosures()]
    rec["certificates"] = [c.to_json() for c in report.certificates]
    cols = ["root", "lo", "hi"]
    rows = [[f"s{i}", *r.to_json()] for i, r in enumerate(data.roots, start=1)]
    return Output(rec, cols, rows)


def cmd_normalize(cfg: RunConfig) -> Output:
    raw = cfg.inputs["matrix"]
    m = raw["matrix"] if isinstance(raw, dict) else raw
    ncols = 3 if cfg.get("mode") == "surface" else 4
    try:
        rows_in = [[as_fraction(str(x)) for x in row] for row in m]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"matrix: {exc}") from exc
    if len(rows_in) != 2 or any(len(r) != ncols for r in rows_in):
        raise UsageError(f"{cfg.get('mode')} normalization expects a 2x{ncols} matrix")
    gjson = lambda g: [[format_rational(x) for x in row] for row in g]  # noqa: E731
    if ncols == 3:
        model = _model(cfg) if cfg.options.get("model_given") else None
        res = normalize_surface_charge(rows_in, model)
        if hasattr(res, "reason"):
            rec = res.to_json()
        else:
            rec = {"alpha": format_rational(res.alpha), "beta": format_rational(res.beta),
                   "g": gjson(res.g),
                   "in_region": "needs --model" if res.in_region is None else res.in_region}
    else:
        res = normalize_threefold_charge(rows_in)
        if hasattr(res, "reason"):
            rec = res.to_json()
        else:
            rec = {"params": res.params.to_json(), "g": gjson(res.g), "admissible": res.admissible}
    flat = {k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in rec.items()}
    return Output(rec, list(flat), [list(flat.values())])


def _grid(lo: Fraction, hi: Fraction, n: int) -> list[Fraction]:
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * Fraction(i, n - 1) for i in range(n)]


def _scan_row(task):
    mode, i, alpha, betas, chars, params, bits = task
    out = []
    for j, beta in enumerate(betas):
        if mode == "surface":
            model = params
            ok = model.covers(beta, beta) and alpha > model(beta)
        else:
            a, b = params
            p = ThreefoldParams(alpha * alpha, beta, a, b)
            ok = admissible(p).ok
        for name, v, t in chars:
            if mode == "surface":
                re, im = central_charge_surface(v, alpha, beta)
                k = heart_shift(re, im) if (re or im) else None
            else:
                re, im = central_charge_3(v, p)
                if t is not None:
                    k = window_for(t, p)
                else:
                    k = heart_shift(re, im) if (re or im) else None
            if k is None:
                lo = hi = ""
            else:
                ph = phase_from_charge(re, im, k, bits)
                lo, hi = format_rational(ph.lo), format_rational(ph.hi)
            out.append([i, j, format_rational(alpha), format_rational(beta), name, ok,
                        format_rational(re), format_rational(im), sign(im),
                        "" if k is None else k, lo, hi])
    return out


SCAN_COLUMNS = ["i", "j", "alpha", "beta", "character", "valid", "re", "im", "im_sign", "shift",
                "phase_lo", "phase_hi"]


def cmd_scan(cfg: RunConfig) -> Output:
    charset = cfg.inputs["characters"]
    try:
        variety = charset["variety"]
        entries = charset["characters"]
    except KeyError as exc:
        raise UsageError(f"character set: missing {exc}") from exc
    except TypeError as exc:
        raise UsageError("character set: expected an object with 'variety' and 'characters'") from exc
    chars = []
    for n, entry in enumerate(entries):
        rec = dict(entry)
        rec.setdefault("variety", variety)
        name = str(entry.get("name", f"#{n}"))
        t = as_fraction(str(entry["semihomog"])) if "semihomog" in entry else None
        chars.append((name, _character(rec, f"characters[{n}]"), t))
    mode = cfg.get("mode")
    nx, ny = (int(x) for x in str(cfg.get("grid")).split(","))
    if nx < 1 or ny < 1:
        raise UsageError("--grid needs positive sizes")
    a_lo, a_hi = cfg.pair("alpha_range", 2)
    b_lo, b_hi = cfg.pair("beta_range", 2)
    if a_lo <= 0 or a_hi < a_lo or b_hi < b_lo:
        raise UsageError("ranges must be ordered with positive alpha")
    alphas, betas = _grid(a_lo, a_hi, ny), _grid(b_lo, b_hi, nx)
    params = _model(cfg) if mode == "surface" else (cfg.rational("a"), cfg.rational("b"))
    bits = int(cfg.get("phase_bits"))
    tasks = [(mode, i, alpha, betas, chars, params, bits) for i, alpha in enumerate(alphas)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            blocks = list(pool.map(_scan_row, tasks))
    else:
        blocks = [_scan_row(t) for t in tasks]
    rows = [r for block in blocks for r in block]
    rec = {
        "axes": {"alpha": [format_rational(a) for a in alphas], "beta": [format_rational(b) for b in betas]},
        "columns": SCAN_COLUMNS,
        "cells": rows,
    }

    def svg(head: dict) -> str:
        names = [c[0] for c in chars]
        first = names[0] if names else None
        da = (a_hi - a_lo) / max(ny - 1, 1) or Fraction(1)
        db = (b_hi - b_lo) / max(nx - 1, 1) or Fraction(1)
        pic = Svg(head, (b_lo - db / 2, b_hi + db / 2), (a_lo - da / 2, a_hi + da / 2))
        for r in rows:
            if r[4] != first:
                continue
            beta, alpha = as_fraction(r[3]), as_fraction(r[2])
            if r[10] == "":
                fill = "#ff0000"
            else:
                mid = (as_fraction(r[10]) + as_fraction(r[11])) / 2
                level = max(0, min(255, round((mid + 2) / 3 * 255)))
                fill = f"#{level:02x}{level:02x}{level:02x}"
            pic.rect((beta - db / 2, alpha - da / 2), (beta + db / 2, alpha + da / 2), fill,
                     f"{first} alpha={r[2]} beta={r[3]} phase=[{r[10]},{r[11]}]")
        return pic.render()

    return Output(rec, SCAN_COLUMNS, rows, svg)


def cmd_lepotier(cfg: RunConfig) -> Output:
    model = _model(cfg)
    xs = [as_fraction(x) for x in str(cfg.get("x") or "").split(",") if x.strip()]
    if not xs:
        raise UsageError("--x needs at least one value")
    values = [[format_rational(x), format_rational(model(x))] for x in xs]
    return Output({"model": model.to_json(), "values": values}, ["x", "phi"], values)


def cmd_euler(cfg: RunConfig) -> Output:
    v = _character(cfg.inputs["first"], "first character")
    w = _character(cfg.inputs["second"], "second character")
    chi = euler_pairing(v, w)
    rec = {"v": v.to_strings(), "w": w.to_strings(), "chi": format_rational(chi)}
    return Output(rec, ["v", "w", "chi"], [[" ".join(rec["v"]), " ".join(rec["w"]), rec["chi"]]])


def cmd_semihomog(cfg: RunConfig) -> Output:
    variety = PolarizedVariety(int(cfg.get("dim")), int(cfg.get("h")))
    s = cfg.rational("s")
    rank = cfg.get("rank")
    v = semihomogeneous_character(variety, s, None if rank is None else int(rank))
    rec = v.to_json()
    rec["rank"] = int(v.c[0] / variety.h)
    return Output(rec, ["s", "rank", *[f"c{i}" for i in range(len(v.c))]],
                  [[format_rational(s), rec["rank"], *v.to_strings()]])


def cmd_witness(cfg: RunConfig) -> Output:
    v = _character(cfg.inputs["character"], "character")
    p = _threefold_params(cfg)
    re, im = central_charge_3(v, p)
    k = cfg.get("shift")
    if k is None:
        if re == 0 and im == 0:
            raise PreconditionError("charge kernel; phase undefined")
        k = heart_shift(re, im)
    w = phase_gap_witness(v, p, int(k), cfg.rational("eps"), int(cfg.get("denom_bound")),
                          bits=int(cfg.get("phase_bits")), allow_identity=bool(cfg.get("identity")))
    rec = {"character": v.to_strings(), "shift": int(k), "witness": w.to_json()}
    flat = {k2: json.dumps(x) if isinstance(x, (list, dict)) else x for k2, x in w.to_json().items()}
    return Output(rec, list(flat), [list(flat.values())])


COMMANDS: dict[str, tuple[Callable[[RunConfig], Output], list[str], str]] = {
    "charge": (cmd_charge, ["character"], "central charge (and phase) of a character"),
    "walls": (cmd_walls, ["character"], "numerical walls of a surface class in a parameter box"),
    "cubic": (cmd_cubic, [], "roots and identities of the cubic for a slope constant"),
    "normalize": (cmd_normalize, ["matrix"], "normalize a generic central charge matrix"),
    "scan": (cmd_scan, ["characters"], "phase table over a parameter grid"),
    "lepotier": (cmd_lepotier, [], "evaluate a Le Potier model"),
    "euler": (cmd_euler, ["first", "second"], "Euler pairing of two threefold characters"),
    "semihomog": (cmd_semihomog, [], "character of a semi-homogeneous bundle"),
    "witness": (cmd_witness, ["character"], "grid search for a phase-gap witness among E_t[m] and O_p[m]"),
}


# -- argument handling -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("shared options")
    g.add_argument("--config", help="JSON file of option defaults (flags win)")
    g.add_argument("--mode", choices=["surface", "threefold"])
    g.add_argument("--model", help="'parabola' or a Le Potier model JSON file")
    g.add_argument("--out", help="output path (default stdout)")
    g.add_argument("--format", choices=["json", "csv", "svg"])
    g.add_argument("--width", help="certification width, e.g. 1/2^200")
    g.add_argument("--grid", help="nx,ny")
    g.add_argument("--denom-bound", dest="denom_bound", type=int)
    g.add_argument("--workers", type=int, default=1)
    p = common.add_argument_group("parameters")
    for name in ("alpha", "beta", "a", "b", "C", "x", "s", "eps"):
        p.add_argument(f"--{name}")
    p.add_argument("--alpha-sq", dest="alpha_sq")
    p.add_argument("--box", help="beta1,beta2,alpha_max")
    p.add_argument("--max-rank", dest="max_rank")
    p.add_argument("--shift", type=int)
    p.add_argument("--phase", action="store_true", default=None)
    p.add_argument("--alpha-range", dest="alpha_range")
    p.add_argument("--beta-range", dest="beta_range")
    p.add_argument("--phase-bits", dest="phase_bits", type=int)
    p.add_argument("--no-identity", dest="identity", action="store_false", default=None,
                   help="witness: skip the trivial self-witness and search the grid")
    p.add_argument("--dim", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--rank", type=int)

    parser = argparse.ArgumentParser(prog="tiltbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tiltbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, positionals, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        for pos in positionals:
            sp.add_argument(pos, help=f"{pos} JSON file")
    return parser


def _precision_default() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from exc


def _width_exponent(width: Fraction) -> int:
    if width <= 0 or width.numerator != 1 or width.denominator & (width.denominator - 1):
        raise UsageError("--width must be of the form 1/2^k")
    return width.denominator.bit_length() - 1


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over the config file over defaults and load input files."""
    file_opts: dict[str, Any] = {}
    if args.config:
        file_opts = _load_json(args.config)
        if not isinstance(file_opts, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(file_opts) - set(DEFAULTS) - {"precision"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    flags = vars(args)
    options: dict[str, Any] = {}
    for key, default in DEFAULTS.items():
        if flags.get(key) is not None:
            options[key] = flags[key]
        elif key in file_opts:
            options[key] = file_opts[key]
        else:
            options[key] = default
    options["model_given"] = flags.get("model") is not None or "model" in file_opts
    if options["width"] is not None:
        precision = _width_exponent(as_fraction(str(options["width"])))
    elif "precision" in file_opts:
        precision = int(file_opts["precision"])
    else:
        precision = _precision_default()
    if precision < MIN_PRECISION:
        raise UsageError(f"precision exponent must be at least {MIN_PRECISION}, got {precision}")
    options["precision"] = precision
    options.pop("width")
    if int(options["denom_bound"]) < 1:
        raise UsageError("--denom-bound must be positive")
    if args.workers < 1:
        raise UsageError("--workers must be positive")

    inputs: dict[str, Any] = {}
    for pos in COMMANDS[args.command][1]:
        inputs[pos] = _load_json(getattr(args, pos))
    model = options["model"]
    if isinstance(model, str) and model != "parabola":
        inputs["model"] = _load_json(model)
        options["model"] = "file"
    return RunConfig(args.command, options, inputs, args.out, args.workers)


def _emit(cfg: RunConfig, out: Output) -> str:
    head = header(cfg.hash_payload(), __version__)
    fmt = cfg.get("format")
    if fmt == "json":
        return to_json_text(head, out.record)
    if fmt == "csv":
        if out.columns is None:
            raise UsageError(f"'{cfg.command}' has no CSV form")
        return to_csv_text(head, out.columns, out.rows)
    if out.svg is None:
        raise UsageError(f"'{cfg.command}' has no SVG form")
    return out.svg(head)


def _fail(code: int, kind: str, message: str, details: dict | None = None) -> int:
    payload = {"error": kind, "message": message, **(details or {})}
    sys.stderr.write(json.dumps(payload, ensure_ascii=False, sort_keys=True) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = COMMANDS[cfg.command][0](cfg)
        text = _emit(cfg, out)
    except UsageError as exc:
        return _fail(EXIT_PARSE, "parse", str(exc), exc.details)
    except AdmissibilityError as exc:
        return _fail(EXIT_ADMISSIBILITY, "admissibility", str(exc))
    except PreconditionError as exc:
        return _fail(EXIT_PRECONDITION, "precondition", str(exc))
    except CertificationError as exc:
        return _fail(EXIT_CERTIFICATION, "certification", str(exc))
    except (ValueError, TypeError, KeyError) as exc:
        return _fail(EXIT_PARSE, "parse", f"{type(exc).__name__}: {exc}")
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
