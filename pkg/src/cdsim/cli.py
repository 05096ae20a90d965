"""Command line front end: ``cdsim <subcommand> [flags]``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
Options may also come from a ``--config`` file of ``key = value`` lines;
explicit flags win over the file.  ``CDSIM_OUTPUT_DIR`` overrides the output
directory of the file and the built-in default, not an explicit flag.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, bssc, codec, fixtures, rootsep, symdyn, verify
from .disk import DiskMap
from .errors import CdsError
from .genshift import tm_to_genshift
from .machines import Configuration, TuringMachine, parse_machine, recode_four_symbol, tm_step

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

FIXTURES = {
    "inc2": fixtures.INC2,
    "flip-flop": fixtures.FLIP_FLOP,
    "walker": fixtures.WALKER,
    "plus": fixtures.PLUS,
}

# defaults applied after flags and the config file
DEFAULTS = {
    "steps": 10, "horizon": 25, "max_len": 4, "depth_budget": 256, "seed": 0, "samples": 100,
    "depth": 3, "n_max": 10, "cap": 10 ** 6, "output_dir": ".", "matrix": "2,1,1,1",
}


class UsageError(Exception):
    pass


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _fracs(text: str, n: Optional[int] = None) -> list:
    vals = [_frac(t) for t in text.split(",") if t.strip()]
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} comma-separated values, got {text!r}")
    return vals


def load_machine(spec: str) -> TuringMachine:
    """A machine file, or the name of a bundled fixture.  The result is
    recoded over ``0, 1, 2`` with a power-of-two state set when needed."""
    path = Path(spec)
    if path.exists():
        text = path.read_text()
    elif spec in FIXTURES:
        text = FIXTURES[spec]
    else:
        raise FileNotFoundError(f"no machine file {spec!r}")
    tm = parse_machine(text)
    n = len(tm.states)
    if set(tm.alphabet) <= {"0", "1", "2"} and n >= 2 and n & (n - 1) == 0:
        return tm
    return recode_four_symbol(tm)


def read_config_file(path: str) -> dict:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line without '=': {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdsim", description="Simulate Turing machines with maps of the square.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp, machine=False):
        sp.add_argument("--config", help="key = value file; flags override it")
        sp.add_argument("--output-dir", help="where artifacts go")
        if machine:
            sp.add_argument("--machine", help="machine file or fixture name (inc2, flip-flop, walker, plus)")
            sp.add_argument("--depth-budget", type=int, help="maximum decoded digits per axis")

    sp = sub.add_parser("simulate", help="run a machine and the map side by side, write a trace CSV")
    common(sp, machine=True)
    sp.add_argument("--input", help='tape, optionally with a state token, e.g. "1101" or "0 q0 11"')
    sp.add_argument("--steps", type=int)
    sp.add_argument("--out", help="CSV file name inside the output directory")

    sp = sub.add_parser("verify", help="certify exact box containment over a horizon")
    common(sp, machine=True)
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--max-len", type=int, help="largest tape length checked")
    sp.add_argument("--report", help="CSV report name inside the output directory")

    sp = sub.add_parser("robust", help="decode interior sample orbits against the machine trace")
    common(sp, machine=True)
    sp.add_argument("--input", help="configuration to probe (default: all with tape length <= 1)")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--horizon", type=int)

    sp = sub.add_parser("encode", help="print the box and encoded point of a configuration")
    common(sp, machine=True)
    sp.add_argument("--input", required=False)

    sp = sub.add_parser("decode", help="decode a point x,y")
    common(sp, machine=True)
    sp.add_argument("--point", help="x,y as fractions")

    sp = sub.add_parser("bounds", help="root separation, halting and mixing bounds as CSV")
    common(sp)
    sp.add_argument("--poly", action="append", help="polynomial literal, repeatable")
    sp.add_argument("--corpus", help="file with one polynomial per line")
    sp.add_argument("--halting-n", type=int)
    sp.add_argument("--D", dest="D")
    sp.add_argument("--C", dest="C")
    sp.add_argument("--kappa", help='rational, or "log(q)" for ln q')
    sp.add_argument("--r")
    sp.add_argument("--n", type=int)
    sp.add_argument("--out", help="CSV file name inside the output directory")

    sp = sub.add_parser("mixing", help="first n with f^n(U) meeting V for a toral map")
    common(sp)
    sp.add_argument("--matrix", help="a,b,c,d for [[a,b],[c,d]]")
    sp.add_argument("--U", dest="U", help="x_lo,x_hi,y_lo,y_hi")
    sp.add_argument("--V", dest="V", help="x_lo,x_hi,y_lo,y_hi")
    sp.add_argument("--n-max", type=int)

    sp = sub.add_parser("sft", help="word counts and acceptance for shifts of finite type")
    common(sp)
    sp.add_argument("--file", help="SFT file with alphabet: and forbid: lines")
    sp.add_argument("--alphabet", help="comma-separated symbols")
    sp.add_argument("--forbid", help="comma-separated forbidden words")
    sp.add_argument("--count", type=int, help="print counts for lengths 0..N")
    sp.add_argument("--graph", help="labelled graph file for --accepts (default: the SFT's own)")
    sp.add_argument("--accepts", help="word to test")
    sp.add_argument("--dump-graph", type=int, help="print the higher-block graph for window N")

    sp = sub.add_parser("bssc", help="run a hybrid real/discrete program")
    common(sp)
    sp.add_argument("--program", help="program file, or encoder / decoder / unbounded")
    sp.add_argument("--real", help="comma-separated rationals for real cells 0, 1, ...")
    sp.add_argument("--disc", help="comma-separated integers for discrete cells 0, 1, ...")
    sp.add_argument("--cap", type=int)

    sp = sub.add_parser("plot-regions", help="SVG of every encoded box up to a bit depth")
    common(sp, machine=True)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--strips", action="store_true", default=None, help="also draw the strips of --machine")
    sp.add_argument("--out", help="SVG file name inside the output directory")
    return p


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        file_vals = read_config_file(args.config) if args.config else {}
    except OSError as e:
        parser.exit(EXIT_IO, f"cdsim: cannot read config: {e}\n")
    except UsageError as e:
        parser.error(str(e))
    flag_output = getattr(args, "output_dir", None)
    for key, value in file_vals.items():
        if not hasattr(args, key) or key in ("command", "config"):
            parser.error(f"unknown config key {key!r} for {args.command}")
        if getattr(args, key) is None:
            setattr(args, key, value)
    env = os.environ.get("CDSIM_OUTPUT_DIR")
    if hasattr(args, "output_dir") and flag_output is None and env:
        args.output_dir = env
    if isinstance(getattr(args, "strips", None), str):
        args.strips = args.strips.lower() in ("1", "true", "yes", "on")
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    for key in ("steps", "horizon", "max_len", "depth_budget", "seed", "samples", "depth", "n_max", "cap",
                "halting_n", "n", "count", "dump_graph"):
        if isinstance(getattr(args, key, None), str):
            try:
                setattr(args, key, int(getattr(args, key)))
            except ValueError:
                parser.error(f"{key} must be an integer")
    return args


# ------------------------------------------------------------- helpers

def _out_path(args, name: str) -> Path:
    d = Path(args.output_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _config(args, tm: TuringMachine, text: Optional[str]) -> Configuration:
    c = Configuration.parse(text or "", tm.states, tm.start)
    if set(c.symbols) - set(tm.alphabet) - {"_"}:
        raise UsageError(f"configuration {text!r} uses symbols outside {tm.alphabet}")
    return c


def _machine(args) -> TuringMachine:
    if not args.machine:
        raise UsageError("--machine is required")
    return load_machine(args.machine)


def _write(path: Path, text: str):
    path.write_text(text)
    print(f"wrote {path}")


# ------------------------------------------------------------ commands

def cmd_simulate(args) -> int:
    tm = _machine(args)
    p = codec.CodecParams.for_machine(tm, args.depth_budget)
    f = DiskMap(tm_to_genshift(tm, p.coding), mode="kink")
    c = _config(args, tm, args.input)
    pt = codec.encode(c, p)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "config", "x", "y", "decoded"])
    status = EXIT_OK
    for n in range(args.steps + 1):
        if n:
            c = tm_step(tm, c)
            pt = f.f_eval(pt)
        try:
            got = codec.decode(pt, p)
            ok = got == c
        except CdsError:
            ok = False
        status = status if ok else EXIT_FAIL
        w.writerow([n, str(c), str(pt[0]), str(pt[1]), "ok" if ok else "mismatch"])
    _write(_out_path(args, args.out or "trace.csv"), buf.getvalue())
    return status


def cmd_verify(args) -> int:
    tm = _machine(args)
    b = verify.disk_bundle(tm, args.depth_budget)
    rep = verify.verify_cds(b, list(tm.configurations(args.max_len)), args.horizon)
    _write(_out_path(args, args.report or "verify_report.csv"), rep.to_csv())
    print(f"{rep.configs} configurations, horizon {args.horizon}: {'PASS' if rep.ok else 'FAIL'}")
    if not rep.ok:
        first = rep.first_failure
        print(f"first failure: {first.config} at step {first.step}: {first.detail}")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_robust(args) -> int:
    tm = _machine(args)
    b = verify.disk_bundle(tm, args.depth_budget)
    configs = [_config(args, tm, args.input)] if args.input else list(tm.configurations(1))
    bad = 0
    for c in configs:
        rep = verify.robustness_probe(b, c, args.samples, args.seed, args.horizon)
        print(f"{c}: {rep.correct}/{rep.samples}")
        bad += not rep.ok
    return EXIT_FAIL if bad else EXIT_OK


def cmd_encode(args) -> int:
    tm = _machine(args)
    p = codec.CodecParams.for_machine(tm, args.depth_budget)
    c = _config(args, tm, args.input)
    r = codec.region(c, p)
    x, y = codec.encode(c, p)
    print(f"config {c}")
    print("box [{}, {}] x [{}, {}]".format(*r.as_strings()))
    print(f"point {x},{y}")
    return EXIT_OK


def cmd_decode(args) -> int:
    tm = _machine(args)
    p = codec.CodecParams.for_machine(tm, args.depth_budget)
    if not args.point:
        raise UsageError("--point is required")
    x, y = _fracs(args.point, 2)
    try:
        print(codec.decode((x, y), p))
    except CdsError as e:
        print(f"undecodable: {type(e).__name__}: {e}")
        return EXIT_FAIL
    return EXIT_OK


def _kappa(text: str):
    text = text.strip()
    if text.startswith("log(") and text.endswith(")"):
        return rootsep.LogOf(_frac(text[4:-1]))
    return _frac(text)


def cmd_bounds(args) -> int:
    polys = [rootsep.parse_poly(t) for t in args.poly or []]
    if args.corpus:
        polys += rootsep.read_corpus(Path(args.corpus).read_text())
    rows = []
    for r in rootsep.bounds_report(polys):
        rows.append({"kind": "polynomial", "input": r["polynomial"], "value": r["rsep_bound"],
                     "detail": f"sep in [{r['rsep_lower']}, {r['rsep_upper']}]; cauchy {r['cauchy']}"})
    if args.halting_n is not None:
        D = _frac(args.D or "2")
        rows.append({"kind": "halting_1d", "input": f"n={args.halting_n} D={D}",
                     "value": str(rootsep.halting_bound_1d(args.halting_n, D)), "detail": ""})
    if args.C is not None:
        if args.kappa is None or args.r is None or args.n is None:
            raise UsageError("mixing bound needs --C, --kappa, --r and --n")
        bp = rootsep.BoundParams(_frac(args.C), _kappa(args.kappa), _frac(args.r), args.n)
        rows.append({"kind": "anosov_mixing", "input": f"C={args.C} kappa={args.kappa} r={args.r} n={args.n}",
                     "value": str(rootsep.anosov_mixing_steps(bp)), "detail": ""})
    if not rows:
        raise UsageError("nothing to compute: give --poly, --corpus, --halting-n or --C")
    text = rootsep.rows_to_csv(rows)
    if args.out:
        _write(_out_path(args, args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _box(text: str) -> codec.Region:
    return codec.Region(*_fracs(text, 4))


def cmd_mixing(args) -> int:
    a, b, c, d = (int(v) for v in _fracs(args.matrix, 4))
    m = verify.LinearToralMap(((a, b), (c, d)))
    if not args.U or not args.V:
        raise UsageError("--U and --V are required")
    n = verify.mixing_first_hit(m, _box(args.U), _box(args.V), args.n_max)
    print("none" if n is None else n)
    return EXIT_OK


def cmd_sft(args) -> int:
    if args.file:
        S = symdyn.parse_sft(Path(args.file).read_text())
    elif args.alphabet:
        S = symdyn.Sft(tuple(s.strip() for s in args.alphabet.split(",")),
                       frozenset(w.strip() for w in (args.forbid or "").split(",") if w.strip()))
    else:
        raise UsageError("give --file or --alphabet")
    if args.count is not None:
        print("n,count")
        for n in range(args.count + 1):
            print(f"{n},{symdyn.count_words(S, n)}")
    if args.dump_graph is not None:
        sys.stdout.write(symdyn.higher_block(S, args.dump_graph).dump())
    if args.accepts is not None:
        if args.graph:
            ok = symdyn.sofic_accepts(symdyn.LabeledGraph.load(Path(args.graph).read_text()), args.accepts)
        else:
            ok = symdyn.is_allowed(S, args.accepts)
        print("accepted" if ok else "rejected")
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


def cmd_bssc(args) -> int:
    shipped = {"encoder": bssc.ENCODER_PROGRAM, "decoder": bssc.DECODER_PROGRAM,
               "unbounded": bssc.UNBOUNDED_DECODER_PROGRAM}
    if not args.program:
        raise UsageError("--program is required")
    text = shipped.get(args.program) or Path(args.program).read_text()
    prog = bssc.parse_program(text)
    real = _fracs(args.real) if args.real else []
    disc = [int(v) for v in args.disc.split(",")] if args.disc else []
    res = bssc.vm_run(prog, real, disc, args.cap)
    print(f"state {res.state}")
    print(f"steps {res.steps}")
    print("real " + " ".join(f"{i}:{v}" for i, v in sorted(res.real.items())))
    print("disc " + " ".join(f"{i}:{v}" for i, v in sorted(res.disc.items())))
    return EXIT_OK


# SVG coordinates: the square [-1/3, 1]^2 scaled to 600 px with y up
_PX = 600
_LO = Fraction(-1, 3)


def _sx(x) -> float:
    return float((Fraction(x) - _LO) * _PX * Fraction(3, 4))


def _sy(y) -> float:
    return float((1 - Fraction(y)) * _PX * Fraction(3, 4))


def render_svg(regions, strips=()) -> str:
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_PX}" height="{_PX}" '
           f'viewBox="0 0 {_PX} {_PX}">',
           f'<rect class="frame" x="0" y="0" width="{_PX}" height="{_PX}" fill="white" stroke="black"/>']
    for label, r in strips:
        out.append(f'<rect class="strip" data-window="{label}" x="{_sx(r.x_lo):.4f}" y="{_sy(r.y_hi):.4f}" '
                   f'width="{_sx(r.x_hi) - _sx(r.x_lo):.4f}" height="{_sy(r.y_lo) - _sy(r.y_hi):.4f}" '
                   'fill="none" stroke="#c33" stroke-width="0.5"/>')
    for label, r in regions:
        out.append(f'<rect class="region" data-config="{label}" x="{_sx(r.x_lo):.4f}" y="{_sy(r.y_hi):.4f}" '
                   f'width="{_sx(r.x_hi) - _sx(r.x_lo):.4f}" height="{_sy(r.y_lo) - _sy(r.y_hi):.4f}" '
                   'fill="#36c" fill-opacity="0.25" stroke="#036" stroke-width="0.3"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_plot_regions(args) -> int:
    regions = codec.regions_to_depth(args.depth)
    strips = []
    if args.strips:
        tm = _machine(args)
        f = DiskMap(tm_to_genshift(tm))
        strips = [("".join(map(str, s.z)), s.box) for s in f.strips]
    _write(_out_path(args, args.out or "regions.svg"), render_svg(regions, strips))
    print(f"{len(regions)} regions, {len(strips)} strips")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate, "verify": cmd_verify, "robust": cmd_robust, "encode": cmd_encode,
    "decode": cmd_decode, "bounds": cmd_bounds, "mixing": cmd_mixing, "sft": cmd_sft, "bssc": cmd_bssc,
    "plot-regions": cmd_plot_regions,
}


def run(args: argparse.Namespace) -> int:
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"cdsim: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"cdsim: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except CdsError as e:
        print(f"cdsim: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
