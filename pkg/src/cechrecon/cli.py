"""Command-line entry point: ``cechrecon <subcommand> ...``.

Exit status: 0 on success, 2 when input or a hypothesis is rejected or a
verification check fails, 1 on any other error.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from typing import Sequence

import numpy as np

from . import generators
from .complex import FilteredComplex, filtered_ambient_cech, filtered_cech
from .errors import CechError, ValidationError
from .homology import (
    PersistentImageQuery,
    induced_rank_oracle,
    persistence,
    persistent_image_rank,
)
from .maps import (
    check_dowker_duality,
    check_interleaving,
    check_inclusion_diagram,
    check_reverse_square,
    dowker_sweep,
)
from .metric import (
    EuclideanCloud,
    SubsetView,
    directed_hausdorff,
    read_distance_csv,
    read_index_list,
    read_points_csv,
    write_distance_csv,
    write_points_csv,
)
from .recover import (
    default_params,
    estimate_d,
    nsw_reconstruct_check,
    recover_homology,
    validate_params,
)
from .svg import emit_barcode_svg

log = logging.getLogger("cechrecon")


class CheckFailed(CechError):
    pass


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive real, got {text!r}") from None
    if not v > 0 or math.isinf(v):
        raise argparse.ArgumentTypeError(f"expected a positive real, got {text!r}")
    return v


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a nonnegative real, got {text!r}") from None
    if not v >= 0 or math.isinf(v):
        raise argparse.ArgumentTypeError(f"expected a nonnegative real, got {text!r}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return v


def _prime(text: str) -> int:
    v = _nonneg_int(text)
    if v < 2 or any(v % q == 0 for q in range(2, int(v**0.5) + 1)):
        raise argparse.ArgumentTypeError(f"expected a prime field characteristic, got {text!r}")
    return v


# -- inputs ----------------------------------------------------------------------


def _add_space(p: argparse.ArgumentParser, subsets: str = "") -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--points", help="CSV point cloud, one point per row")
    src.add_argument("--dist", help="CSV distance matrix, full or lower-triangular")
    for name in subsets:
        p.add_argument(f"--{name.lower()}", metavar="FILE",
                       help=f"index list for subset {name} (one index per line)")


def _load_space(args):
    if args.points:
        cloud = read_points_csv(args.points)
        return cloud.metric(), cloud
    if args.dist:
        return read_distance_csv(args.dist), None
    raise ValidationError("one of --points or --dist is required")


def _subset(space, path, default_full=True) -> SubsetView | None:
    if path is None:
        return space.full() if default_full else None
    return space.subset(read_index_list(path))


def _common(p: argparse.ArgumentParser, *, kmax=True, out=True, formats=("json",)) -> None:
    if kmax:
        p.add_argument("--kmax", type=_nonneg_int, default=2, help="top homology degree (default 2)")
        p.add_argument("--field", type=_prime, default=2, help="prime field characteristic (default 2)")
    if out:
        p.add_argument("--out", help="write to this path instead of stdout")
        p.add_argument("--format", choices=formats, default=formats[0])


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- subcommands --------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.kind == "circle":
        fx = generators.circle_sample(args.q)
    elif args.kind == "two-point":
        fx = generators.two_point_space(args.eps)
    elif args.kind == "proxy":
        proxy = generators.dense_circle_proxy(args.m)
        theta = 2 * math.pi * np.arange(args.m) / args.m
        fx = generators.Fixture(f"proxy(m={args.m})", proxy.parent, {"X": proxy}, {},
                                EuclideanCloud(np.column_stack([np.cos(theta), np.sin(theta)])))
    else:
        fx = generators.random_metric_instance(args.seed, args.n, args.method)
    buf = io.StringIO()
    if args.matrix or fx.cloud is None:
        write_distance_csv(fx.space, buf)
    else:
        write_points_csv(fx.cloud, buf)
    _emit(args, buf.getvalue())
    log.info("generated %s", fx.name)
    return 0


def cmd_dh(args) -> int:
    if args.points or args.dist:
        space, _ = _load_space(args)
        X = _subset(space, args.x)
        if args.a is None:
            raise ValidationError("--a is required")
        A = _subset(space, args.a)
    else:
        if not (args.x and args.a):
            raise ValidationError("give --points/--dist with index files, or point CSVs for --x and --a")
        cx, ca = read_points_csv(args.x), read_points_csv(args.a)
        if cx.ambient_dim != ca.ambient_dim:
            raise ValidationError("--x and --a have different dimensions")
        space = EuclideanCloud(np.vstack([cx.coords, ca.coords])).metric()
        X = space.subset(range(cx.n))
        A = space.subset(range(cx.n, cx.n + ca.n))
    d = directed_hausdorff(X, A)
    _emit(args, _dumps({"d_H": d, "n_x": len(X), "n_a": len(A)}))
    return 0


def _filtration(args) -> FilteredComplex:
    if getattr(args, "complex", None):
        with open(args.complex) as fh:
            return FilteredComplex.from_text(fh.read())
    space, cloud = _load_space(args)
    X = _subset(space, args.x)
    if args.ambient:
        if cloud is None:
            raise ValidationError("--ambient needs --points")
        return filtered_ambient_cech(cloud, args.dimcap, indices=X.indices)
    Y = _subset(space, args.y) if args.y else X
    return filtered_cech(X, Y, args.dimcap)


def cmd_complex(args) -> int:
    _emit(args, _filtration(args).to_text())
    return 0


def cmd_ph(args) -> int:
    if args.dimcap is None:
        args.dimcap = args.kmax + 1
    F = _filtration(args)
    bc = persistence(F, args.field, args.kmax)
    if args.format == "svg":
        _emit(args, emit_barcode_svg(bc, args.marker or ()))
    elif args.format == "csv":
        rows = ["dim,birth,death"] + [f"{b.dim},{b.birth!r},{b.death!r}" for b in bc.bars]
        _emit(args, "\n".join(rows) + "\n")
    else:
        _emit(args, json.dumps(bc.to_json_obj()) + "\n")
    return 0


def cmd_rank(args) -> int:
    if args.dimcap is None:
        args.dimcap = args.k + 1
    F = _filtration(args)
    bc = persistence(F, args.field, args.k)
    r = persistent_image_rank(bc, PersistentImageQuery(args.k, args.beta, args.alpha))
    o = induced_rank_oracle(F, args.k, args.beta, args.alpha, args.field)
    _emit(args, _dumps({"k": args.k, "beta": args.beta, "alpha": args.alpha, "rank": r,
                        "oracle": o, "agree": r == o}))
    return 0 if r == o else 1


def cmd_recover(args) -> int:
    space, cloud = _load_space(args)
    A = _subset(space, args.a)
    notes = []
    lower = False
    if args.d is not None:
        d = args.d
    elif args.proxy:
        if cloud is None:
            raise ValidationError("--proxy needs --points")
        pc = read_points_csv(args.proxy)
        joint = EuclideanCloud(np.vstack([pc.coords, cloud.coords[list(A.indices)]])).metric()
        d = estimate_d(joint.subset(range(pc.n)), joint.subset(range(pc.n, joint.n)))
        lower = True
    else:
        d = 0.0
        notes.append("d not supplied: hypotheses checked with d = 0")
    if args.alpha is None and args.epsilon is None:
        alpha, eps = default_params(args.tau, d)
    elif args.alpha is None or args.epsilon is None:
        raise ValidationError("give both --alpha and --epsilon, or neither")
    else:
        alpha, eps = args.alpha, args.epsilon
    params = validate_params(args.tau, d, alpha, eps, args.kmax, args.field,
                             closed_alpha=True, d_is_lower_bound=lower)
    if args.d is None and not args.proxy:
        bound = min(args.tau / 3, alpha / 2, args.tau - alpha, eps)
        notes.append(f"the claim holds provided d_H(X, A) < {bound!r}")
    report = recover_homology(A, params)
    report.warnings.extend(notes)
    if args.format == "svg":
        _emit(args, emit_barcode_svg(report.barcode, [alpha, alpha + eps]))
    else:
        _emit(args, _dumps(report.to_json_obj()))
    return 0


def _finish(args, reports) -> int:
    _emit(args, _dumps({"reports": [r.to_json_obj() for r in reports]}))
    if not all(r.ok for r in reports):
        raise CheckFailed("; ".join(f"{r.diagram}: {c.name}" for r in reports for c in r.failures()[:1]))
    return 0


def cmd_check_dowker(args) -> int:
    space, _ = _load_space(args)
    X = _subset(space, args.x)
    Y = _subset(space, args.y)
    if args.alpha is None:
        rep = dowker_sweep(X, Y, args.kmax, args.field)
    else:
        rep = check_dowker_duality(X, Y, args.alpha, args.kmax, args.field)
    return _finish(args, [rep])


def cmd_check_interleave(args) -> int:
    space, _ = _load_space(args)
    X = _subset(space, args.x)
    A = _subset(space, args.a, default_full=False)
    if A is None:
        raise ValidationError("--a is required")
    Y = _subset(space, args.y) if args.y else X
    eps = args.epsilon if args.epsilon is not None else directed_hausdorff(X, A)
    strict = not args.allow_small_epsilon
    reports = [
        check_interleaving(X, A, Y, eps, args.alpha, args.dimcap, strict=strict),
        check_reverse_square(X, A, args.alpha, eps, args.dimcap, strict=strict),
    ]
    return _finish(args, reports)


def cmd_check_diagram(args) -> int:
    space, _ = _load_space(args)
    M = _subset(space, args.m)
    X = _subset(space, args.x)
    A = _subset(space, args.a)
    return _finish(args, [check_inclusion_diagram(A, X, M, args.alpha, args.dimcap)])


def cmd_nsw(args) -> int:
    if not args.points:
        raise ValidationError("nsw needs --points")
    cloud = read_points_csv(args.points)
    betti = nsw_reconstruct_check(cloud, args.tau, args.d, args.alpha, args.kmax, args.field)
    _emit(args, _dumps({"tau": args.tau, "d": args.d, "alpha": args.alpha, "betti": betti}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cechrecon", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a fixture as CSV")
    p.add_argument("kind", choices=["circle", "two-point", "proxy", "random"])
    p.add_argument("--q", type=int, default=14, help="circle sample size")
    p.add_argument("--eps", type=_positive, default=1.0, help="two-point distance")
    p.add_argument("--m", type=int, default=1000, help="proxy size")
    p.add_argument("--n", type=int, default=10, help="random instance size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=generators.RANDOM_METHODS, default=generators.RANDOM_METHODS[0])
    p.add_argument("--matrix", action="store_true", help="write the distance matrix, not coordinates")
    _common(p, kmax=False, formats=("csv",))
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dh", help="directed Hausdorff distance d_H(X, A)")
    _add_space(p, "XA")
    _common(p, kmax=False)
    p.set_defaults(func=cmd_dh)

    for name, func, help_ in [
        ("complex", cmd_complex, "filtered Čech complex as text"),
        ("ph", cmd_ph, "barcode of a filtered complex"),
        ("rank", cmd_rank, "persistent image rank, with the linear-algebra oracle"),
    ]:
        p = sub.add_parser(name, help=help_)
        _add_space(p, "XY")
        p.add_argument("--ambient", action="store_true", help="ambient Čech (miniball) filtration")
        p.add_argument("--dimcap", type=_nonneg_int, default=None if name != "complex" else 2)
        if name != "complex":
            p.add_argument("--complex", help="read a filtration written by `complex`")
            p.add_argument("--field", type=_prime, default=2)
        if name == "ph":
            p.add_argument("--kmax", type=_nonneg_int, default=2)
            p.add_argument("--marker", type=_positive, action="append", help="alpha marker for svg")
            _common(p, kmax=False, formats=("json", "csv", "svg"))
        elif name == "rank":
            p.add_argument("--k", type=_nonneg_int, required=True)
            p.add_argument("--beta", type=_positive, required=True)
            p.add_argument("--alpha", type=_positive, required=True)
            _common(p, kmax=False)
        else:
            _common(p, kmax=False, formats=("text",))
        p.set_defaults(func=func)

    p = sub.add_parser("recover", help="Betti numbers of X from the intrinsic filtration of A")
    _add_space(p, "A")
    p.add_argument("--tau", type=_positive, required=True, help="reach of X")
    p.add_argument("--d", type=_nonneg, help="directed Hausdorff distance d_H(X, A)")
    p.add_argument("--proxy", help="CSV of a dense sample of X, used to estimate d")
    p.add_argument("--alpha", type=_positive)
    p.add_argument("--epsilon", type=_positive)
    _common(p, formats=("json", "svg"))
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("check-dowker", help="Betti/rank equality of C_Y(X) and C_X(Y)")
    _add_space(p, "XY")
    p.add_argument("--alpha", type=_positive, help="single radius (default: every critical radius)")
    _common(p)
    p.set_defaults(func=cmd_check_dowker)

    p = sub.add_parser("check-interleave", help="interleaving certificates for A ⊆ X")
    _add_space(p, "XAY")
    p.add_argument("--epsilon", type=_positive)
    p.add_argument("--alpha", type=_positive, action="append")
    p.add_argument("--dimcap", type=_nonneg_int, default=2)
    p.add_argument("--allow-small-epsilon", action="store_true",
                   help="report instead of rejecting epsilon < d_H(X, A)")
    _common(p, kmax=False)
    p.set_defaults(func=cmd_check_interleave)

    p = sub.add_parser("check-diagram", help="inclusions among the Čech complexes of A ⊆ X ⊆ M")
    _add_space(p, "AXM")
    p.add_argument("--alpha", type=_positive, required=True)
    p.add_argument("--dimcap", type=_nonneg_int, default=2)
    _common(p, kmax=False)
    p.set_defaults(func=cmd_check_diagram)

    p = sub.add_parser("nsw", help="Betti numbers of the ambient Čech complex at alpha")
    _add_space(p)
    p.add_argument("--tau", type=_positive, required=True)
    p.add_argument("--d", type=_nonneg, required=True)
    p.add_argument("--alpha", type=_positive, required=True)
    _common(p)
    p.set_defaults(func=cmd_nsw)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, CheckFailed) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
