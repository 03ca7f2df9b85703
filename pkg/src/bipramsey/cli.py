"""Command-line entry point: ``bipramsey <subcommand> ...``."""
from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from .colourings import HostColouring, extremal_three_split, monochromatic, random_colouring, read_colouring, write_colouring
from .embed import (ClassedHost, PipelineParams, compatibility_check, greedy_embed, pipeline_demo,
                    verify_embedding, write_embedding)
from .errors import FormatError, ToolkitError
from .graphs import parse_target, read_graph, write_graph
from .partition import derive_constants, write_plan
from .ramsey import (bipartite_ramsey_exact, find_monochromatic_copy, lower_bound_value,
                     verify_lower_bound_construction, write_certificate)
from .regularity import VertexPair, build_reduced_graph, certify, equal_partition, write_certificates
from .shapes import assemble_cm_shape, find_connected_matching, write_shape


def rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def id_list(text: str) -> list[int]:
    try:
        return [int(t) - 1 for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of vertex ids: {text!r}")


def _target(text: str):
    """A named target ("P5", "C6", "G2x3", "S4") or a path to a graph file."""
    if text[:1].isalpha() and "/" not in text and "." not in text:
        return parse_target(text)
    with open(text) as fh:
        return read_graph(fh.read())


def _colouring(path: str) -> HostColouring:
    if path == "-":
        return read_colouring(sys.stdin.read())
    with open(path) as fh:
        return read_colouring(fh.read())


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _header(args):
    skip = {"func", "cmd", "verbose"}
    parts = [f"{k}={v}" for k, v in sorted(vars(args).items()) if k not in skip and v is not None]
    print(f"# {args.cmd} " + " ".join(parts))


# -- subcommands -------------------------------------------------------------------


def cmd_gen_h(args):
    _emit(args, write_graph(parse_target(args.H)))
    return 0


def cmd_gen_colouring(args):
    if args.kind == "extremal":
        c = extremal_three_split(args.n)
    elif args.kind == "random":
        c = random_colouring(args.N, args.r, args.seed)
    else:
        c = monochromatic(args.N, args.N, args.r, args.colour)
    _emit(args, write_colouring(c))
    return 0


def cmd_find_mono(args):
    c = _colouring(args.colouring)
    H = _target(args.H)
    colours = [args.colour] if args.colour else range(1, c.r + 1)
    for s in colours:
        wit = find_monochromatic_copy(c, H, s, args.budget)
        if wit is None:
            print(f"colour {s} none")
        else:
            print(f"colour {s} found " + " ".join(str(x + 1) for x in wit.mapping))
    return 0


def cmd_ramsey_exact(args):
    targets = [_target(t) for t in args.targets.split(",")]
    res = bipartite_ramsey_exact(targets, args.nmax, args.budget, args.workers)
    _header(args)
    if res.resolved:
        print(res.value)
    else:
        why = "budget exhausted" if res.exhausted_budget else f"exceeds {res.n_max}"
        print(f"unresolved ({why})")
    if args.certificate and res.avoider is not None:
        with open(args.certificate, "w") as fh:
            fh.write(write_certificate(res.avoider, res.avoider.L + 1))
    return 0


def cmd_verify_lower(args):
    H = _target(args.H)
    ok = verify_lower_bound_construction(H, args.n)
    print(f"avoids: {'true' if ok else 'false'}, certifies R >= {lower_bound_value(args.n)}" if ok
          else "avoids: false")
    if args.certificate and ok:
        c = extremal_three_split(args.n)
        with open(args.certificate, "w") as fh:
            fh.write(write_certificate(c, lower_bound_value(args.n)))
    return 0


def cmd_check_regular(args):
    c = _colouring(args.colouring)
    pair = VertexPair.from_colouring(c, args.A, args.B, args.colour)
    cert = certify(pair, args.eps, args.method, args.samples, args.seed)
    _header(args)
    print(cert.to_line(1, 2))
    return 0


def _reduced(args, c):
    partition = equal_partition(c, args.k)
    return partition, build_reduced_graph(c, partition, args.eps, args.method, args.samples, args.seed)


def cmd_reduce(args):
    c = _colouring(args.colouring)
    _, R = _reduced(args, c)
    _header(args)
    _emit(args, write_certificates(R))
    for (i, j), s in sorted(R.colours.items()):
        print(f"redge {i + 1} {j + 1} {s}")
    return 0


def cmd_matching(args):
    c = _colouring(args.colouring)
    _, R = _reduced(args, c)
    _header(args)
    for s in range(1, c.r + 1):
        cm = find_connected_matching(R, s)
        edges = " ".join(f"{a + 1}-{b + 1}" for a, b in cm.edges)
        print(f"colour {s} size {len(cm)} {edges}".rstrip())
    return 0


def cmd_shape(args):
    c = _colouring(args.colouring)
    partition, R = _reduced(args, c)
    shape = assemble_cm_shape(c, partition, args.eps, args.method, R)
    _header(args)
    _emit(args, write_shape(shape))
    return 0


def cmd_constants(args):
    prof = derive_constants(args.gamma, args.delta, args.eps1, args.K0, args.n0)
    _header(args)
    print("\n".join(prof.lines()))
    return 0


def _params(args) -> PipelineParams:
    return PipelineParams(k=args.k, eps=args.eps, slice_r=args.slice_r, hat_ell=args.hat_ell, beta=args.beta,
                          xi=args.xi, min_window=args.min_window, compat_eps=args.compat_eps,
                          budget=args.budget, seed=args.seed, method=args.method)


def _run_pipeline(args):
    c = _colouring(args.colouring)
    H = _target(args.H)
    rep = pipeline_demo(c, H, _params(args))
    return c, H, rep


def _stage_failure(rep, needed: str) -> int | None:
    failed = rep.failed_stage
    order = ["shape", "slice", "plan", "compat", "embed", "verify"]
    if failed is not None and order.index(failed) <= order.index(needed):
        print("\n".join(rep.lines()))
        print(f"error: stage-{failed}")
        return 1
    return None


def cmd_plan_h(args):
    _, _, rep = _run_pipeline(args)
    _header(args)
    if rep.plan is None:
        return _stage_failure(rep, "plan") or 1
    _emit(args, write_plan(rep.plan))
    return 0


def cmd_compat(args):
    _, _, rep = _run_pipeline(args)
    _header(args)
    if rep.plan is None:
        return _stage_failure(rep, "plan") or 1
    eps = args.compat_eps if args.compat_eps is not None else 2 * rep.shape.eps
    comp = compatibility_check(rep.plan, rep.shape, eps)
    print("\n".join(comp.lines()))
    return 0 if comp.verdict else 1


def cmd_embed(args):
    c, H, rep = _run_pipeline(args)
    _header(args)
    if rep.plan is None:
        return _stage_failure(rep, "plan") or 1
    G = ClassedHost(c, rep.shape.colour, rep.shape.classes)
    res = greedy_embed(H, rep.plan, G, args.budget, args.seed)
    _emit(args, write_embedding(res))
    return 0 if res.success and verify_embedding(res, H, G, rep.plan) else 1


def cmd_pipeline(args):
    _, _, rep = _run_pipeline(args)
    _header(args)
    print("\n".join(rep.lines()))
    return 0 if rep.success else 1


# -- parser -------------------------------------------------------------------------


def _pipeline_flags(p):
    p.add_argument("--colouring", required=True)
    p.add_argument("--H", required=True)
    p.add_argument("--k", type=int, default=2, help="classes per host side")
    p.add_argument("--eps", type=rational, default=Fraction(1, 10))
    p.add_argument("--slice-r", type=int, default=1)
    p.add_argument("--hat-ell", type=int, default=4)
    p.add_argument("--beta", type=rational, default=Fraction(1, 16))
    p.add_argument("--xi", type=rational, default=Fraction(1, 2))
    p.add_argument("--min-window", type=int)
    p.add_argument("--compat-eps", type=rational)
    p.add_argument("--budget", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=["auto", "exhaustive", "sampled"], default="auto")
    p.add_argument("--out")


def _reduce_flags(p):
    p.add_argument("--colouring", required=True)
    p.add_argument("--k", type=int, required=True, help="classes per host side")
    p.add_argument("--eps", type=rational, required=True)
    p.add_argument("--method", choices=["auto", "exhaustive", "sampled"], default="auto")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bipramsey", description="Bipartite Ramsey toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen-h", help="write a named target graph")
    p.add_argument("--H", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_h)

    p = sub.add_parser("gen-colouring", help="write a host colouring")
    p.add_argument("--kind", choices=["extremal", "random", "mono"], required=True)
    p.add_argument("--n", type=int, help="target order for the extremal split")
    p.add_argument("--N", type=int, help="host side size")
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--colour", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_colouring)

    p = sub.add_parser("find-mono", help="search a monochromatic copy")
    p.add_argument("--colouring", required=True)
    p.add_argument("--H", required=True)
    p.add_argument("--colour", type=int)
    p.add_argument("--budget", type=int, default=10**9)
    p.set_defaults(func=cmd_find_mono)

    p = sub.add_parser("ramsey-exact", help="exact bipartite Ramsey number")
    p.add_argument("--targets", required=True, help="comma-separated targets, one per colour")
    p.add_argument("--nmax", type=int)
    p.add_argument("--budget", type=int, default=10**9)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--certificate", help="write the largest avoider here")
    p.set_defaults(func=cmd_ramsey_exact)

    p = sub.add_parser("verify-lower", help="check the three-split lower-bound colouring")
    p.add_argument("--H", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--certificate")
    p.set_defaults(func=cmd_verify_lower)

    p = sub.add_parser("check-regular", help="certify one pair of a colouring")
    p.add_argument("--colouring", required=True)
    p.add_argument("--A", type=id_list, required=True, help="1-based host ids")
    p.add_argument("--B", type=id_list, required=True, help="1-based host ids")
    p.add_argument("--colour", type=int, default=1)
    p.add_argument("--eps", type=rational, required=True)
    p.add_argument("--method", choices=["auto", "exhaustive", "sampled"], default="auto")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_regular)

    for name, func, helptext in (("reduce", cmd_reduce, "reduced coloured graph with certificates"),
                                 ("matching", cmd_matching, "largest connected matching per colour"),
                                 ("shape", cmd_shape, "assemble a connected-matching shape")):
        p = sub.add_parser(name, help=helptext)
        _reduce_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("constants", help="derive and audit the proof constants")
    p.add_argument("--gamma", type=rational, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--eps1", type=rational, required=True)
    p.add_argument("--K0", type=int, default=1)
    p.add_argument("--n0", type=int)
    p.set_defaults(func=cmd_constants)

    for name, func, helptext in (("plan-h", cmd_plan_h, "partition the target graph"),
                                 ("compat", cmd_compat, "check compatibility of the partitions"),
                                 ("embed", cmd_embed, "embed the target graph"),
                                 ("pipeline", cmd_pipeline, "run every stage and report")):
        p = sub.add_parser(name, help=helptext)
        _pipeline_flags(p)
        p.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.cmd == "gen-colouring":
        if args.kind == "extremal" and args.n is None:
            ap.error("--kind extremal needs --n")
        if args.kind != "extremal" and args.N is None:
            ap.error(f"--kind {args.kind} needs --N")
    try:
        return args.func(args)
    except ToolkitError as exc:
        print(f"error: {exc.code}")
        print(str(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {FormatError.code}")
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
