"""Command-line entry point.

Subcommands: ``analyze``, ``mesh``, ``gallery`` and ``verify``. Exit code 0
on success, 2 on invalid input, 3 on numerical failure and 1 when ``verify``
finds a failing criterion.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .errors import InputError, NumericFailure, ValidationError
from .jobs import Job, load_job, parse_job
from .gallery import NAMES, gallery_job

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def _positive_tol(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("--tol must lie in (0, 1)")
    return v


def _grid(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 2 <= v <= 4096:
        raise argparse.ArgumentTypeError("--grid must lie in [2, 4096]")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_tol, help="relative tolerance of the lift ODE")
    common.add_argument("--grid", type=_grid, help="mesh resolution (nodes per side)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--json-only", action="store_true", help="write reports and meshes but no figures")

    p = argparse.ArgumentParser(prog="afl", description="Affine and hyperbolic flat fronts from rational data.")
    p.add_argument("--version", action="version", version=f"afl {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="Gauss map, ramification and certificates of a job")
    a.add_argument("job", type=Path)
    m = sub.add_parser("mesh", parents=[common], help="analysis plus OBJ mesh")
    m.add_argument("job", type=Path)
    g = sub.add_parser("gallery", parents=[common], help=f"built-in example: {', '.join(NAMES)}")
    g.add_argument("name")
    sub.add_parser("verify", help="run the acceptance suite")
    return p


def _dump(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _figures(job: Job, res, out: Path, stem: str) -> list[Path]:
    from . import plotting

    paths = []
    if job.kind == "affine":
        paths.append(plotting.plot_singular_set(res.curves, job.window, out / f"{stem}.singular.png",
                                                job.payload.dom.punctures, f"{stem}: |nu| = 1"))
    if res.mesh is not None:
        labels = ("Re x", "Im x", "phi") if job.kind == "affine" else ("b1", "b2", "b3")
        paths.append(plotting.plot_mesh(res.mesh, out / f"{stem}.mesh.png", stem, labels))
    return paths


def _execute(job: Job, args, with_mesh: bool) -> int:
    from .mesh import emit_obj
    from .pipeline import run

    t0 = time.perf_counter()
    res = run(job, with_mesh, args.tol)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    stem = job.name
    written = []
    if res.mesh is not None:
        obj = out / f"{stem}.obj"
        res.report["mesh"]["obj"] = obj.name
        text = _dump(res.report)
        written.append(emit_obj(res.mesh, obj))
    else:
        text = _dump(res.report)
    rpath = out / f"{stem}.report.json"
    rpath.write_text(text)
    written.insert(0, rpath)
    if not args.json_only:
        written += _figures(job, res, out, stem)
    for p in written:
        print(p)
    print(f"afl: {stem} finished in {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return EXIT_OK


def _verify() -> int:
    from .acceptance import run_all

    results = run_all()
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_FAIL if failed else EXIT_OK


def run(argv=None) -> int:
    """Parse ``argv`` and dispatch; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _verify()
        if args.command == "gallery":
            job = parse_job(gallery_job(args.name), args.grid)
            return _execute(job, args, with_mesh=True)
        job = load_job(args.job, args.grid)
        if args.command == "mesh" and job.analysis_only:
            raise ValidationError("analyze jobs have no mesh; use kind 'affine' or 'h3'")
        return _execute(job, args, with_mesh=args.command == "mesh")
    except InputError as exc:
        print(f"afl: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericFailure as exc:
        print(f"afl: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"afl: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
