"""Command-line front end: build presentations, compute homology, run suites.

Exit codes: 0 all checks pass, 1 a check failed (or homology is unstable),
2 usage or input error, 3 an enumeration budget was exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from . import __version__
from .algebra import AlgebraError, DgPresentation
from .constructions import (
    PresetId,
    cylinder,
    filtration_weights,
    kill,
    left_localize,
    preset,
    right_localize,
    two_sided_localize,
)
from .dsl import ParseError, parse_morphism, parse_presentation, print_presentation
from .fields import Field
from .homology import stabilized_homology
from .serialize import dumps, make_report
from .verify.functors import BudgetExceeded, DEFAULT_BUDGET, InfiniteEnumerationError
from .verify.suites import SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like -2..3, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("window is empty")
    return lo, hi


def _schedule(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"schedule must be comma separated integers, got {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("schedule bounds must be positive")
    return out


def _field(text: str) -> Field:
    try:
        return Field.from_name(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _default_seed() -> int:
    env = os.environ.get("DGLOC_SEED")
    if env is None:
        return 42
    try:
        return int(env)
    except ValueError:
        return 42


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=_field, default=None, help="Q, F2, F3, ... (default: from input, else Q)")
    common.add_argument("--seed", type=int, default=_default_seed(), help="default $DGLOC_SEED or 42")
    common.add_argument("-o", "--output", help="output file (default stdout)")
    common.add_argument("--no-check", action="store_true", help="skip the d^2 = 0 check on input")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--input", help=".dgp file")
    source.add_argument("--preset", help="KV, KVW, QV, LV or IV")
    source.add_argument("--deg", type=int, default=0, help="degree of v for presets")

    parser = argparse.ArgumentParser(prog="dgloc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dgloc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("build", parents=[common, source], help="write a preset as .dgp")

    h = sub.add_parser("homology", parents=[common, source], help="stabilized truncated homology of a hom-complex")
    h.add_argument("--from", dest="src", required=True)
    h.add_argument("--to", dest="tgt", required=True)
    h.add_argument("--window", type=_window, default=(-2, 3))
    h.add_argument("--schedule", type=_schedule, default=(4, 6, 8, 10))
    h.add_argument("--weights", default="auto", help="'auto' or NAME=W,NAME=W")
    h.add_argument("--lookahead", type=int, default=None)

    c = sub.add_parser("cylinder", parents=[common, source], help="relative cylinder over the declared base")
    c.add_argument("--base", help=".dgp of the base (default: the file's base statement)")

    for name, helptext in (("kill", "adjoin w with d(w) = v"), ("rlocalize", "adjoin a homotopy right inverse"),
                           ("llocalize", "adjoin a homotopy left inverse"), ("localize", "two-sided localization")):
        k = sub.add_parser(name, parents=[common, source], help=helptext)
        k.add_argument("--morphism", required=True, help="closed morphism, e.g. 'v' or 'v.w - 1_O2'")

    v = sub.add_parser("verify", parents=[common], help="run a bijection suite")
    v.add_argument("suite", choices=[*SUITES, "all"])
    v.add_argument("--trials", type=_positive, default=20)
    v.add_argument("--rank-bound", type=_positive, default=4)
    v.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    v.add_argument("--deg", type=int, default=0, help="degree of v in the source")
    v.add_argument("--jobs", type=_positive, default=1)
    return parser


def _load(args) -> DgPresentation:
    if bool(args.input) == bool(args.preset):
        raise UsageError("give exactly one of --input and --preset")
    if args.preset:
        try:
            pid = PresetId.parse(args.preset)
        except ValueError:
            raise UsageError(f"unknown preset {args.preset!r}") from None
        P = preset(pid, args.deg, args.field or Field(0))
        if not isinstance(P, DgPresentation):
            raise UsageError(f"{pid.value} is a finite model, not a presentation")
        return P
    with open(args.input, encoding="utf-8") as fh:
        return parse_presentation(fh.read(), field=args.field, check=not args.no_check)


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args, **extra) -> dict:
    out = {"seed": args.seed}
    if args.field is not None:
        out["field"] = args.field.name
    out.update(extra)
    return out


def cmd_build(args) -> int:
    _emit(args, print_presentation(_load(args)))
    return EXIT_OK


def cmd_homology(args) -> int:
    P = _load(args)
    for o in (args.src, args.tgt):
        if o not in P.objects:
            raise UsageError(f"unknown object {o!r}")
    if args.weights == "auto":
        weights = None
    else:
        try:
            weights = {k: int(v) for k, v in (kv.split("=") for kv in args.weights.split(","))}
        except ValueError:
            raise UsageError("--weights must be 'auto' or NAME=W,...") from None
    rep = stabilized_homology(P, args.src, args.tgt, args.window, args.schedule, weights, lookahead=args.lookahead)
    records = []
    for k in range(args.window[0], args.window[1] + 1):
        status = "pass" if rep.stable[k] else "unstable"
        records.append({"name": f"H{k}", "status": status,
                        "details": {"degree": k, "dim": rep.dims[k],
                                    "persistent": {str(W): d[k] for W, d in rep.samples["persistent"].items()},
                                    "raw": {str(W): d[k] for W, d in rep.samples["raw"].items()}}})
    report = make_report("homology", _config(args, field=P.field.name, source=args.src, target=args.tgt,
                                             window=list(args.window), schedule=list(args.schedule),
                                             weights=args.weights), records)
    _emit(args, dumps(report))
    for r in records:
        print(f"{r['name']:>4}  dim {r['details']['dim']}  {r['status']}", file=sys.stderr)
    return EXIT_OK if report["summary"]["ok"] else EXIT_FAIL


def cmd_cylinder(args) -> int:
    D = _load(args)
    if args.base:
        with open(args.base, encoding="utf-8") as fh:
            C = parse_presentation(fh.read(), field=D.field)
    elif D.base is not None:
        C = D.base
    else:
        raise UsageError("the input declares no base; pass --base")
    _emit(args, print_presentation(cylinder(C, D).presentation))
    return EXIT_OK


_LOCALIZERS = {"kill": kill, "rlocalize": right_localize, "llocalize": left_localize, "localize": two_sided_localize}


def cmd_construct(args) -> int:
    C = _load(args)
    v = parse_morphism(C, args.morphism)
    out = _LOCALIZERS[args.command](C, v)
    rep = filtration_weights(out)
    _emit(args, print_presentation(out if not rep.ok else out.with_weights(rep.weights)))
    return EXIT_OK


def _run_one(name: str, cfg: SuiteConfig) -> list[dict]:
    return [r.as_dict() for r in run_suite(name, cfg)]


def cmd_verify(args) -> int:
    field = args.field or Field(2)
    cfg = SuiteConfig(field, args.seed, args.trials, args.rank_bound, args.budget, args.deg)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            chunks = list(pool.map(_run_one, names, [cfg] * len(names)))
    else:
        chunks = [_run_one(n, cfg) for n in names]
    records = [r for chunk in chunks for r in chunk]
    report = make_report(f"verify {args.suite}", _config(args, field=field.name, trials=args.trials,
                                                         rank_bound=args.rank_bound, budget=args.budget,
                                                         deg=args.deg), records)
    _emit(args, dumps(report))
    s = report["summary"]
    print(f"{args.suite}: {s['passed']}/{s['total']} passed", file=sys.stderr)
    if any(r["status"] == "skipped" for r in records):
        return EXIT_BUDGET
    return EXIT_OK if s["ok"] else EXIT_FAIL


COMMANDS = {"build": cmd_build, "homology": cmd_homology, "cylinder": cmd_cylinder, "verify": cmd_verify,
            **{k: cmd_construct for k in _LOCALIZERS}}


def _join_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "--window -2..3" as two options
    out: list[str] = []
    it = iter(argv)
    for a in it:
        if a in ("--window", "--deg", "--seed", "--lookahead"):
            nxt = next(it, None)
            if nxt is None:
                out.append(a)
            else:
                out.append(f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"dgloc: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ParseError, InfiniteEnumerationError, AlgebraError, OSError) as exc:
        print(f"dgloc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
