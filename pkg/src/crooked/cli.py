"""Command line interface: ``crooked validate|tile|locate|verify``.

Exit codes: 0 success, 1 unreadable or malformed input, 2 a mathematical
check failed, 3 a point could not be located.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import config, svg, verify
from .affine import SequenceTerminates, apply_word, locate, nested_sequence, validate
from .lorentz import TOL
from .zigzag import ApproxError, separation_report

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_MATH = 2
EXIT_NOT_LOCATED = 3


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    try:
        return config.load(path)
    except config.ConfigError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return None


def _load_valid(path: str):
    cfg = _load(path)
    if cfg is None:
        return None, EXIT_PARSE
    rep = validate(cfg)
    if not rep.ok:
        print(f"error: {path} fails validation: " + "; ".join(rep.failures), file=sys.stderr)
        return None, EXIT_MATH
    return (cfg, rep), EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args.config)
    if cfg is None:
        _emit({"ok": False, "error": "parse"}, args.out)
        return EXIT_PARSE
    rep = validate(cfg, args.tol)
    _emit(rep.to_json(), args.out)
    return EXIT_OK if rep.ok else EXIT_MATH


def cmd_tile(args) -> int:
    loaded, code = _load_valid(args.config)
    if loaded is None:
        return code
    cfg, _ = loaded
    if args.depth < 0:
        print("error: --depth must be non-negative", file=sys.stderr)
        return EXIT_PARSE
    try:
        scene, level, moved = svg.tile_scene(cfg, args.plane, args.depth, args.viewport)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if moved:
        print(f"warning: plane x3 = {args.plane:g} meets a tile vertex; using x3 = {level:.12g}", file=sys.stderr)
    text = scene.render()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _diagnostics(cfg, q, steps: int) -> dict:
    """Nested half-spaces along the failed descent, for the report."""
    K = max(1, min(steps, 50))
    try:
        seq = nested_sequence(cfg, q, K)
    except (SequenceTerminates, ValueError) as exc:
        return {"error": str(exc)}
    return {
        "adjust": str(seq.adjust),
        "terms": [
            {
                "k": t.k,
                "face": f"{t.key[0]}{'+' if t.key[1] > 0 else '-'}",
                "gamma": str(t.gamma),
                "direction": t.half_space.u.tolist(),
                "vertex": t.half_space.vertex.tolist(),
            }
            for t in seq.terms
        ],
    }


def _separation_csv(cfg, rep, q, path: str) -> None:
    r = locate(cfg, q)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "rho_Lk_Lk1", "bound", "pass"])
    if len(r.word) >= 3:
        try:
            seq = nested_sequence(cfg, q, len(r.word))
            for row in separation_report(cfg, seq, delta0=rep.delta0).rows:
                w.writerow(row.csv_row())
        except (SequenceTerminates, ApproxError) as exc:
            print(f"warning: no separation report: {exc}", file=sys.stderr)
    Path(path).write_text(buf.getvalue())


def cmd_locate(args) -> int:
    loaded, code = _load_valid(args.config)
    if loaded is None:
        return code
    cfg, rep = loaded
    if args.random is not None:
        rng = np.random.Generator(np.random.PCG64(args.seed))
        pts = rng.uniform(-args.box, args.box, (args.random, 3))
        lengths = Counter()
        failed = []
        worst = 0.0
        for q in pts:
            r = locate(cfg, q, args.max_steps)
            if not r.located:
                failed.append({"point": q.tolist(), "diagnostics": _diagnostics(cfg, q, r.steps)})
                continue
            lengths[len(r.word)] += 1
            back = apply_word(cfg, r.word, r.final[None, :])[0]
            worst = max(worst, float(np.linalg.norm(back - q)))
        located = sum(lengths.values())
        doc = {
            "rng": verify.RNG_NAME,
            "seed": args.seed,
            "points": args.random,
            "located": located,
            "not_located": len(failed),
            "max_word_length": max(lengths, default=0),
            "mean_word_length": (sum(k * v for k, v in lengths.items()) / located) if located else None,
            "length_histogram": {str(k): lengths[k] for k in sorted(lengths)},
            "max_roundtrip_error": worst,
            "failures": failed,
        }
        _emit(doc, args.out)
        return EXIT_OK if not failed else EXIT_NOT_LOCATED
    if args.point is None:
        print("error: give --point x y z or --random N", file=sys.stderr)
        return EXIT_PARSE
    q = np.array(args.point, dtype=float)
    r = locate(cfg, q, args.max_steps)
    doc = r.to_json()
    if not r.located:
        doc["diagnostics"] = _diagnostics(cfg, q, r.steps)
        _emit(doc, args.out)
        print(f"error: point {q.tolist()} not located within {args.max_steps} steps", file=sys.stderr)
        return EXIT_NOT_LOCATED
    if args.separation_csv:
        _separation_csv(cfg, rep, q, args.separation_csv)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load(args.config)
    if cfg is None:
        return EXIT_PARSE
    try:
        rep = verify.run_all(cfg, args.samples, args.seed, args.tol, only=args.suite)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = verify.dumps(rep)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if not rep["ok"]:
        print("failing: " + ", ".join(rep["failing"] or ["(validation)"]), file=sys.stderr)
    return EXIT_OK if rep["ok"] else EXIT_MATH


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with :data:`EXIT_PARSE`; argparse's default 2 means a failed check here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crooked", description="Crooked planes and affine Schottky groups.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check pairing, disjointness and delta0")
    v.add_argument("config")
    v.add_argument("--tol", type=float, default=TOL)
    v.add_argument("--out", help="write the JSON report here instead of stdout")
    v.set_defaults(func=cmd_validate)

    t = sub.add_parser("tile", help="render the tiling sliced by x3 = c as SVG")
    t.add_argument("config")
    t.add_argument("--plane", type=float, default=1.0, metavar="C")
    t.add_argument("--depth", type=int, default=2)
    t.add_argument("--viewport", type=float, nargs=4, default=(-20.0, 20.0, -20.0, 20.0), metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    t.add_argument("--out")
    t.set_defaults(func=cmd_tile)

    loc = sub.add_parser("locate", help="find the tile containing a point")
    loc.add_argument("config")
    loc.add_argument("--point", type=float, nargs=3, metavar=("X", "Y", "Z"))
    loc.add_argument("--max-steps", type=int, default=10_000)
    loc.add_argument("--random", type=int, metavar="N", help="locate N seeded random points instead")
    loc.add_argument("--seed", type=int, default=0)
    loc.add_argument("--box", type=float, default=20.0, help="half-width of the sampling cube")
    loc.add_argument("--separation-csv", metavar="PATH", help="write the separation report of the point's descent")
    loc.add_argument("--out")
    loc.set_defaults(func=cmd_locate)

    ver = sub.add_parser("verify", help="run the property suites")
    ver.add_argument("config")
    ver.add_argument("--samples", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--tol", type=float, default=TOL)
    ver.add_argument("--suite", action="append", help="run only the named suite (repeatable)")
    ver.add_argument("--out")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
