"""Command-line entry point.

Exit status is 0 on success, 1 when a verification fails and 2 on malformed
input.  Every command writes one JSON document to stdout or ``--output``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .diagram import CONVENTIONS, Diagram, GroundMetric, InvalidDiagramError
from .matching import (
    SizeError,
    bottleneck,
    bottleneck_bruteforce,
    wasserstein,
    wasserstein_bruteforce,
)
from .obstruction import (
    FiniteMetricSpace,
    cube_embedding,
    cube_vertices,
    embed_ck,
    geodesic_sequence,
    verify_isometry,
)
from .prisms import build_prism, verify_prism
from .suites import SUITES, run_suite


class InputError(Exception):
    pass


def load_diagram(path) -> Diagram:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    try:
        return Diagram.from_json(payload)
    except InvalidDiagramError as exc:
        raise InputError(f"{path}: {exc}") from None


def _positive(text):
    value = float(text)
    if not value > 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text!r}")
    return value


def _count(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return value


def _metric_options(p, with_q=True):
    if with_q:
        p.add_argument("--q", type=_positive, default=1.0, help="cost exponent (default 1)")
    p.add_argument("--convention", choices=CONVENTIONS, default="nearest",
                   help="diagonal charge (default nearest)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdprism", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="Wasserstein distance between two diagram files")
    p.add_argument("a")
    p.add_argument("b")
    _metric_options(p)
    p.add_argument("--method", choices=("exact", "bruteforce"), default="exact")

    p = sub.add_parser("bottleneck", parents=[common], help="bottleneck distance between two diagram files")
    p.add_argument("a")
    p.add_argument("b")
    _metric_options(p, with_q=False)
    p.add_argument("--method", choices=("exact", "bruteforce"), default="exact")

    p = sub.add_parser("prism", parents=[common], help="build and verify a k-prism map for a family of diagrams")
    p.add_argument("files", nargs="+")
    p.add_argument("--k", type=_positive, required=True)
    _metric_options(p)

    p = sub.add_parser("gen-cube", parents=[common], help="embed the scaled cube {0,k}^n in diagram space")
    p.add_argument("--n", type=_count, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--base")
    _metric_options(p)

    p = sub.add_parser("gen-geodesic", parents=[common], help="build a geodesic sequence of diagrams")
    p.add_argument("--n", type=_count, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--base")
    _metric_options(p)

    p = sub.add_parser("embed-ck", parents=[common], help="embed a truncated union of scaled cubes")
    p.add_argument("--N", type=_count, required=True)
    p.add_argument("--k", type=_positive, required=True)
    _metric_options(p)

    p = sub.add_parser("verify", parents=[common], help="run a seeded property suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_dist(args):
    a, b = load_diagram(args.a), load_diagram(args.b)
    metric = GroundMetric(args.q, args.convention)
    solve = wasserstein_bruteforce if args.method == "bruteforce" else wasserstein
    res = solve(a, b, metric)
    return {
        "wasserstein_rho": res.value,
        "wasserstein_q": res.value ** (1.0 / args.q),
        "q": args.q,
        "convention": args.convention,
        "method": args.method,
        "witness": res.witness.to_json(),
    }, True


def _cmd_bottleneck(args):
    a, b = load_diagram(args.a), load_diagram(args.b)
    solve = bottleneck_bruteforce if args.method == "bruteforce" else bottleneck
    res = solve(a, b, args.convention)
    return {
        "bottleneck": res.value,
        "convention": args.convention,
        "method": args.method,
        "witness": res.witness.to_json(),
    }, True


def _cmd_prism(args):
    family = list(dict.fromkeys(load_diagram(f) for f in args.files))
    witness = build_prism(family, args.k, GroundMetric(args.q, args.convention))
    report = verify_prism(witness)
    return {
        "p": list(witness.p),
        "k": args.k,
        "images": [d.to_json() for d in witness.images],
        "report": report.to_json(),
    }, report.passed


def _cmd_gen_cube(args):
    base = load_diagram(args.base) if args.base else Diagram()
    metric = GroundMetric(args.q, args.convention)
    vertices = cube_embedding(base, args.n, args.k, metric)
    report = verify_isometry(cube_vertices(args.k, args.n), vertices, metric)
    return {
        "vertices": {s: d.to_json() for s, d in vertices.items()},
        "report": report.to_json(),
    }, report.passed


def _cmd_gen_geodesic(args):
    base = load_diagram(args.base) if args.base else Diagram()
    metric = GroundMetric(args.q, args.convention)
    seq = geodesic_sequence(base, args.n, args.k, metric)
    idx = np.arange(args.n + 1)
    reference = FiniteMetricSpace(
        [str(i) for i in idx], args.k * np.abs(idx[:, None] - idx[None, :]).astype(float)
    )
    report = verify_isometry(reference, {str(i): d for i, d in enumerate(seq)}, metric)
    return {"diagrams": [d.to_json() for d in seq], "report": report.to_json()}, report.passed


def _cmd_embed_ck(args):
    image, report = embed_ck(args.k, args.N, GroundMetric(args.q, args.convention))
    return {
        "diagrams": {label: d.to_json() for label, d in image.items()},
        "report": report.to_json(),
    }, report.passed


def _cmd_verify(args):
    result = run_suite(args.suite, args.seed)
    return {"seed": args.seed, **result.to_json()}, result.passed


COMMANDS = {
    "dist": _cmd_dist,
    "bottleneck": _cmd_bottleneck,
    "prism": _cmd_prism,
    "gen-cube": _cmd_gen_cube,
    "gen-geodesic": _cmd_gen_geodesic,
    "embed-ck": _cmd_embed_ck,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, ok = COMMANDS[args.command](args)
    except (InputError, SizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
