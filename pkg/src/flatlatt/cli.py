"""Command-line interface.

Exit codes: 0 success, 1 verification failure or bound violation,
2 usage error (malformed JSON, invalid TV data, unknown names, refused sweeps).
"""

import argparse
import json
import logging
import re
import sys

from . import catalog as catalog_mod
from .bounds import bounds_report
from .combinat import pi_multiple
from .config import RunConfig, parse_prune
from .enumerate import compare_with_paper_bound, enumerate_candidates
from .errors import (BoundViolation, FlatLattError, GuardRefusal, InvalidPermutation,
                     InvalidProfile, UnknownName, VerificationFailure)
from .numeric import parse_length_squared, parse_scalar, set_precision_cap
from .surface_geom import alpha_bounds, enumerate_saddle_connections, min_virtual_triangle
from .tv_construct import TVData, build_surface

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("%s: %s" % (self.prog, message))


def _scalar(text):
    try:
        return parse_scalar(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("not a rational number: %r" % text) from None


def _length(text):
    try:
        parse_length_squared(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("not a length: %r (use 3, 1/2 or sqrt(5))" % text) from None
    return text


_TAU_RE = re.compile(r"^\s*([0-9/.]*)\s*\*?\s*pi\s*$")


def _tau(text):
    """``6pi``, ``6*pi``, ``pi`` or a plain rational."""
    m = _TAU_RE.match(text)
    try:
        if m:
            return pi_multiple(parse_scalar(m.group(1)) if m.group(1) else 1)
        return parse_scalar(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("not a total angle: %r" % text) from None


def _prune(text):
    try:
        return parse_prune(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not an integer: %r" % text) from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser():
    p = _Parser(prog="flatlatt", description="Thurston-Veech surfaces and NSVT enumeration.")
    p.add_argument("--config", help="JSON run configuration file")
    p.add_argument("--precision-cap", type=int, help="maximum interval precision in bits")
    p.add_argument("--safe-constants", action="store_true", default=None,
                   help="use the derived conservative constants")
    p.add_argument("--drop-marked", action="store_true", default=None,
                   help="drop marked points (cone angle 2 pi) from Sigma")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("build", help="build a surface from TV data")
    b.add_argument("tvdata", help="TV data JSON file, or '-' for stdin")
    b.add_argument("--out")

    s = sub.add_parser("spectrum", help="saddle connections up to a length")
    s.add_argument("tvdata", nargs="?", help="TV data JSON file")
    s.add_argument("--name", help="built-in surface instead of a file")
    s.add_argument("--L", dest="L", type=_length, required=True)
    s.add_argument("--summary", action="store_true", help="print beta and alpha bracket only")
    s.add_argument("--out")

    bo = sub.add_parser("bounds", help="evaluate the closed-form bounds")
    bo.add_argument("--alpha", type=_scalar)
    bo.add_argument("--beta", type=_scalar)
    bo.add_argument("--beta0", type=_scalar)
    bo.add_argument("--r", type=_positive_int)
    bo.add_argument("--tau", type=_tau)
    bo.add_argument("--g", type=int)
    bo.add_argument("--i", type=int)
    bo.add_argument("--j", type=int)
    bo.add_argument("--out")

    e = sub.add_parser("enumerate", help="enumerate NSVT(beta) candidates")
    e.add_argument("--beta", type=_scalar, required=True)
    e.add_argument("--scan-length", type=_length)
    e.add_argument("--prune", type=_prune)
    e.add_argument("--out")
    e.add_argument("--resume", action="store_true", help="continue from the --out catalog")
    e.add_argument("--workers", type=_positive_int)
    e.add_argument("--max-twist", type=_positive_int)
    e.add_argument("--slack", type=_scalar)
    e.add_argument("--l-cap-mode", choices=("standard", "coarea"))
    e.add_argument("--allow-large", action="store_true", default=None)
    e.add_argument("--compare", action="store_true",
                   help="also check the catalog size against the cardinality cap")

    c = sub.add_parser("catalog", help="built-in surfaces")
    csub = c.add_subparsers(dest="action", parser_class=_Parser)
    cv = csub.add_parser("verify", help="verify bottom-of-spectrum properties")
    cv.add_argument("--name", default="all")
    cv.add_argument("--scan-length", type=_length, default="3")
    cv.add_argument("--out")
    csub.add_parser("list", help="list built-in names")
    return p


def _emit(obj, out=None, lines=False):
    text = "\n".join(json.dumps(o, sort_keys=True) for o in obj) + "\n" if lines \
        else json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_tvdata(path):
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise UsageError("cannot read %s: %s" % (path, exc.strerror)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError("malformed JSON in %s at line %d column %d: %s"
                         % (path, exc.lineno, exc.colno, exc.msg)) from None
    try:
        return TVData.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise UsageError("invalid TV data in %s: %s" % (path, exc)) from None


def _config(args):
    cfg = RunConfig.default()
    if args.config:
        try:
            cfg = RunConfig.load(args.config)
        except OSError as exc:
            raise UsageError("cannot read %s: %s" % (args.config, exc.strerror)) from None
        except json.JSONDecodeError as exc:
            raise UsageError("malformed JSON in %s at line %d column %d: %s"
                             % (args.config, exc.lineno, exc.colno, exc.msg)) from None
        except (ValueError, TypeError) as exc:
            raise UsageError("invalid config %s: %s" % (args.config, exc)) from None
    try:
        cfg = cfg.with_(precision_cap=args.precision_cap, safe_constants=args.safe_constants,
                        drop_marked=args.drop_marked)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    set_precision_cap(cfg.precision_cap)
    return cfg


def _cmd_build(args, cfg):
    s = build_surface(_read_tvdata(args.tvdata), drop_marked=cfg.drop_marked)
    out = s.to_json()
    out["tvdata"] = s.tvdata.to_dict()
    _emit(out, args.out)
    return EXIT_OK


def _surface_from_args(args, cfg):
    if args.name:
        return catalog_mod.builtin(args.name)
    if not args.tvdata:
        raise UsageError("spectrum needs a TV data file or --name")
    return build_surface(_read_tvdata(args.tvdata), drop_marked=cfg.drop_marked)


def _cmd_spectrum(args, cfg):
    s = _surface_from_args(args, cfg)
    L2 = parse_length_squared(args.L)
    conns = enumerate_saddle_connections(s, L2)
    if args.summary:
        vt = min_virtual_triangle(s, L2, conns)
        br = alpha_bounds(s, L2, vt)
        from .numeric import format_scalar
        _emit({"connections": len(conns), "beta": format_scalar(vt.value),
               "beta_certified": vt.certified, "alpha": [format_scalar(br.lo), format_scalar(br.hi)]},
              args.out)
    else:
        _emit([sc.to_json() for sc in conns], args.out, lines=True)
    return EXIT_OK


def _cmd_bounds(args, cfg):
    if args.alpha is None and args.beta is None and args.tau is None and args.g is None:
        raise UsageError("bounds needs at least one of --alpha, --beta, --tau, --g/--i")
    if (args.g is None) != (args.i is None):
        raise UsageError("--g and --i go together")
    report = bounds_report(alpha=args.alpha, beta=args.beta, r=args.r, tau=args.tau, g=args.g,
                           i=args.i, j=args.j, beta0=args.beta0)
    report["selected"] = "safe" if cfg.safe_constants else "as_stated"
    _emit(report, args.out)
    return EXIT_OK


def _cmd_enumerate(args, cfg):
    try:
        cfg = cfg.with_(scan_length=args.scan_length, prune=args.prune, out=args.out,
                        workers=args.workers, max_twist=args.max_twist, slack=args.slack,
                        l_cap_mode=args.l_cap_mode, allow_large=args.allow_large)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    resume = None
    if args.resume:
        if not args.out:
            raise UsageError("--resume needs --out")
        import os
        if os.path.exists(args.out):
            resume = args.out
    progress = None
    if args.verbose:
        def progress(summary):
            print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    cat = enumerate_candidates(args.beta, cfg, resume=resume, progress=progress)
    if not args.out:
        sys.stdout.write(cat.to_json())
    if args.compare:
        report = compare_with_paper_bound(cat, args.beta, cfg.safe_constants,
                                          raise_on_violation=False)
        print(json.dumps(report, sort_keys=True), file=sys.stderr)
        if report["ok"] is False:
            return EXIT_FAIL
    return EXIT_OK


def _cmd_catalog(args, cfg):
    if args.action == "list":
        _emit({n: ns.description for n, ns in catalog_mod.NAMED.items()})
        return EXIT_OK
    if args.action != "verify":
        raise UsageError("catalog needs an action: verify or list")
    names = catalog_mod.names() if args.name == "all" else [args.name]
    L2 = parse_length_squared(args.scan_length)
    reports = []
    code = EXIT_OK
    for name in names:
        s = catalog_mod.builtin(name)
        try:
            rep = catalog_mod.verify_bottom_of_spectrum(s, L2)
            rep["passed"] = all(rep["checks"].values())
        except VerificationFailure as exc:
            rep = {"name": name, "passed": False, "error": str(exc),
                   "counterexample": exc.counterexample}
        if not rep["passed"]:
            code = EXIT_FAIL
        reports.append(rep)
    _emit({"scan_length": args.scan_length, "reports": reports}, args.out)
    return code


COMMANDS = {
    "build": _cmd_build,
    "spectrum": _cmd_spectrum,
    "bounds": _cmd_bounds,
    "enumerate": _cmd_enumerate,
    "catalog": _cmd_catalog,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("missing subcommand (build, spectrum, bounds, enumerate, catalog)")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except UnknownName as exc:
        print("error: %s" % exc.args[0], file=sys.stderr)
        return EXIT_USAGE
    except (GuardRefusal, InvalidPermutation, InvalidProfile) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (VerificationFailure, BoundViolation) as exc:
        print("verification failed: %s" % exc, file=sys.stderr)
        return EXIT_FAIL
    except FlatLattError as exc:
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
