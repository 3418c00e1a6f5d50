"""Command-line entry point: check, scan, criterion, bounds and prove."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field

from . import __version__
from . import primes as pe
from .bounds import RH, UNCONDITIONAL, bounds_table, profile_by_name
from .errors import PomverifyError, RangeTooLarge, UncertifiableAtPrecision
from .report import emit, json_lines, rows_csv

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2
EXIT_USAGE = 64
EXIT_IO = 74

log = logging.getLogger("pomverify")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    subcommand: str
    args: dict = field(default_factory=dict)
    fmt: str = "text"
    timestamp: bool = True

    @classmethod
    def from_namespace(cls, ns):
        d = vars(ns).copy()
        sub = d.pop("subcommand")
        fmt = "json" if d.pop("json", False) else d.pop("format", None) or "text"
        d.pop("format", None)
        timestamp = not d.pop("no_timestamp", False)
        d.pop("verbose", None)
        return cls(sub, d, fmt, timestamp)


def _int(text):
    """Accept 550000, 5.5e5 or 10**6 style integers."""
    text = text.strip().replace("_", "")
    try:
        if "**" in text:
            a, b = text.split("**")
            return int(a) ** int(b)
        if "e" in text.lower():
            v = float(text)
            if not v.is_integer():
                raise ValueError
            return int(v)
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def build_parser():
    p = _Parser(prog="pomverify", description="P-integer verification toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"))
    common.add_argument("--json", action="store_true", help="shorthand for --format json")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit generated_at from JSON output")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="decide whether K is a P-integer")
    c.add_argument("k", type=_int)

    s = sub.add_parser("scan", parents=[common], help="witness scan over even k in [A, B]")
    s.add_argument("--from", dest="lo", type=_int, required=True)
    s.add_argument("--to", dest="hi", type=_int, required=True)
    s.add_argument("--shards", type=int, default=1)
    s.add_argument("--checkpoint")
    s.add_argument("--verify-sample", type=float, default=1e-4)
    s.add_argument("--block", type=_int, default=1 << 20)
    s.add_argument("--window", type=int, default=100,
                   help="window size; anything but 100 is non-certifying")
    s.add_argument("--log-witnesses", action="store_true",
                   help="write every witness to the checkpoint log")

    r = sub.add_parser("criterion", parents=[common], help="residue-counting criterion, JSON lines")
    r.add_argument("ks", nargs="+", type=_int, metavar="K")

    b = sub.add_parser("bounds", parents=[common], help="prime-counting bounds table (CSV)")
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--x-list", metavar="FILE")
    g.add_argument("--range", nargs=3, type=_int, metavar=("A", "B", "STEP"))
    b.add_argument("--profile", default="unconditional")
    b.add_argument("--precision", type=int, default=128)

    v = sub.add_parser("prove", parents=[common], help="interval certificate for an analytic bound")
    v.add_argument("theorem", choices=("thm11", "thm12"))
    v.add_argument("--precision", type=int, default=256)
    v.add_argument("--profile")
    v.add_argument("--target-exponent", type=int,
                   help="certify at k = 10**N (thm11 only)")
    return p


def _out(text):
    sys.stdout.write(text)
    sys.stdout.flush()


def _check(cfg):
    from .core import is_p_integer

    k = cfg.args["k"]
    if k < 2:
        raise UsageError("k must be at least 2")
    _out(emit(is_p_integer(k), cfg.fmt, cfg.timestamp))
    return EXIT_OK


def _scan(cfg):
    from .scan import scan_range

    a = cfg.args
    if a["shards"] < 1 or not 0 <= a["verify_sample"] <= 1:
        raise UsageError("--shards must be positive and --verify-sample within [0, 1]")
    try:
        rep = scan_range(a["lo"], a["hi"], shards=a["shards"], checkpoint=a["checkpoint"],
                         verify_sample=a["verify_sample"], window=a["window"], block=a["block"],
                         log_witnesses=a["log_witnesses"])
    except ValueError as e:
        raise UsageError(str(e)) from None
    _out(emit(rep, cfg.fmt, cfg.timestamp))
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def _criterion(cfg):
    from .core import criterion_report

    reps = []
    for k in cfg.args["ks"]:
        if k < 2:
            raise UsageError("k must be at least 2")
        reps.append(criterion_report(k))
    if cfg.fmt == "text":
        for r in reps:
            _out(f"k={r.k}: criterion {r.criterion}  (S_L={r.s_L}, log k <= {r.log_k_upper})\n")
    else:
        _out(json_lines(reps))
    return EXIT_OK


def _read_xs(path):
    with open(path, encoding="utf-8") as fh:
        return [_int(line) for line in fh if line.strip() and not line.startswith("#")]


def _bounds(cfg):
    a = cfg.args
    try:
        profile = profile_by_name(a["profile"])
    except ValueError as e:
        raise UsageError(str(e)) from None
    if a["x_list"]:
        xs = _read_xs(a["x_list"])
    else:
        lo, hi, step = a["range"]
        if step <= 0 or hi < lo:
            raise UsageError("--range needs A <= B and STEP > 0")
        xs = list(range(lo, hi + 1, step))
    rows = bounds_table(xs, profile, a["precision"])
    if cfg.fmt == "json":
        _out(json_lines(rows))
    else:
        _out(rows_csv(rows))
    return EXIT_OK


def _prove(cfg):
    from .proofs import verify_theorem_1_1, verify_theorem_1_2

    a = cfg.args
    if a["precision"] < 16:
        raise UsageError("--precision must be at least 16 bits")
    try:
        profile = profile_by_name(a["profile"]) if a["profile"] else None
    except ValueError as e:
        raise UsageError(str(e)) from None
    try:
        if a["theorem"] == "thm11":
            profile = profile or UNCONDITIONAL
            if profile.rh_assumed:
                raise UsageError("thm11 is the unconditional bound; use thm12 for RH")
            rep = verify_theorem_1_1(a["precision"], profile, a["target_exponent"])
        else:
            if profile not in (None, RH):
                raise UsageError("thm12 assumes RH and only runs under --profile rh")
            if a["target_exponent"] is not None:
                raise UsageError("--target-exponent applies to thm11 only")
            rep = verify_theorem_1_2(a["precision"])
    except UncertifiableAtPrecision as e:
        if e.report is not None:
            _out(emit(e.report, cfg.fmt, cfg.timestamp))
        log.error("%s", e)
        return EXIT_ERROR
    _out(emit(rep, cfg.fmt, cfg.timestamp))
    return EXIT_OK if rep.overall else EXIT_NEGATIVE


HANDLERS = {"check": _check, "scan": _scan, "criterion": _criterion, "bounds": _bounds,
            "prove": _prove}


def run(cfg):
    """Execute one configured command and return its exit status."""
    try:
        return HANDLERS[cfg.subcommand](cfg)
    except UsageError as e:
        log.error("%s", e)
        return EXIT_USAGE
    except OSError as e:
        log.error("I/O error: %s", e)
        return EXIT_IO
    except (RangeTooLarge, PomverifyError) as e:
        log.error("%s", e)
        return EXIT_ERROR


def main(argv=None):
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        pe.SieveConfig.from_env()
    except ValueError:
        log.error("%s must be an integer", pe.ENV_CEILING)
        return EXIT_USAGE
    return run(RunConfig.from_namespace(ns))


if __name__ == "__main__":
    sys.exit(main())
