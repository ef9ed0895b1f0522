from __future__ import annotations

import argparse
import re
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple

from palperm import __version__
from palperm.algorithms.census import verify_witnesses
from palperm.algorithms.group_structure import (
    CLASS_NAMES,
    klein_report,
    search_generating_pairs,
    verify_dihedral,
    verify_inverse_closure,
    verify_uniqueness,
)
from palperm.algorithms.palindromics import MODES, palindromic_values
from palperm.algorithms.permutation import from_one_line, parse_permutation
from palperm.config import (
    CensusConfig,
    ConfigError,
    SystemConfig,
    apply_env_overrides,
    default_config_path,
    load_config,
)
from palperm.errors import (
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFICATION_FAILED,
    GuardError,
    InvalidDegreeError,
    PalpermError,
    ParseError,
)
from palperm.logging_system import configure_logging, get_logger
from palperm.pipeline import CensusPipeline
from palperm.reporting import emit_classify, emit_record, emit_rows, emit_sequences

LOGGER = get_logger(__name__)

VERIFY_TARGETS = ("dihedral", "inverse", "uniqueness", "klein")
_RANGE_RE = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?$")

# klein element -> (rgspp, lgspp) it must show
KLEIN_EXPECTED: Dict[str, Tuple[bool, bool]] = {
    "delta_1": (True, False),
    "delta_2": (False, True),
    "delta_3": (True, True),
}


def parse_range(text: str, open_start: Optional[int] = None) -> Tuple[int, int]:
    """Parse "3..8" or "5". A single value k means k..k, or open_start..k when given."""
    match = _RANGE_RE.match(text or "")
    if match is None:
        raise ParseError(f"expected a degree or a range like 3..8, got {text!r}")
    first = int(match.group(1))
    if match.group(2) is None:
        lo, hi = (open_start, first) if open_start is not None else (first, first)
    else:
        lo, hi = first, int(match.group(2))
    if lo < 1 or hi < lo:
        raise ParseError(f"range {text!r} must satisfy 1 <= lo <= hi")
    return lo, hi


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", default=None, help="YAML config file")
    parent.add_argument("--format", choices=["text", "json", "csv"], default=None)
    parent.add_argument("--workers", type=int, default=None)
    parent.add_argument("--cache-dir", default=None)
    parent.add_argument("--no-cache", action="store_true")
    parent.add_argument("--witness-cap", type=int, default=None)
    parent.add_argument("--timings", action="store_true")
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="palperm",
        description="Palindromic permutation classification and census of S_n.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    classify = sub.add_parser("classify", parents=[common], help="classify one permutation")
    classify.add_argument("permutation", help='one-line "2,3,1" or cycles "(1 2 3)"')
    classify.add_argument("--degree", type=int, default=None, help="degree for cycle input")
    classify.add_argument("--mode", choices=MODES, default="token")

    census = sub.add_parser("census", parents=[common], help="count every class over S_n")
    census.add_argument("-n", type=int, required=True)
    census.add_argument("--mode", choices=MODES, default="token")

    verify = sub.add_parser("verify", parents=[common], help="exhaustive structural checks")
    verify.add_argument("target", choices=VERIFY_TARGETS)
    verify.add_argument("range", nargs="?", default=None, help='degrees, e.g. "3..8"')
    verify.add_argument("--classes", default=",".join(CLASS_NAMES), help="classes for the inverse target")

    sequences = sub.add_parser("sequences", parents=[common], help="class counts for n = 1..n-max")
    sequences.add_argument("range", help='n-max, or a range such as "2..9"')
    sequences.add_argument("--mode", choices=MODES, default="token")

    witness = sub.add_parser("witness", parents=[common], help="permutations in neither GSP class")
    witness.add_argument("-n", type=int, required=True)
    witness.add_argument("--mode", choices=MODES, default="token")

    generators = sub.add_parser("generators", parents=[common], help="RGSPP/LGSPP pairs generating S_n")
    generators.add_argument("range")
    generators.add_argument("--limit", type=int, default=1, help="pairs per degree, 0 for all")
    return parser


def resolve_config(args: argparse.Namespace, environ: Optional[Dict[str, str]] = None) -> SystemConfig:
    """Config file, then environment, then command-line flags."""
    if args.config:
        cfg = load_config(args.config)
    elif default_config_path().exists():
        cfg = load_config(default_config_path())
    else:
        cfg = SystemConfig()
    cfg = apply_env_overrides(cfg, environ)

    census_update: Dict[str, Any] = {}
    if args.workers is not None:
        census_update["workers"] = args.workers
    if args.cache_dir:
        census_update["cache_dir"] = args.cache_dir
    if args.no_cache:
        census_update["cache_enabled"] = False
    if args.witness_cap is not None:
        census_update["witness_cap"] = args.witness_cap
    output_update: Dict[str, Any] = {}
    if args.format:
        output_update["format"] = args.format
    if args.timings:
        output_update["include_timings"] = True

    try:
        census = CensusConfig.model_validate({**cfg.census.model_dump(), **census_update})
    except ValueError as exc:
        raise ConfigError(f"Invalid command-line option: {exc}") from exc
    output = cfg.output.model_copy(update=output_update)
    return cfg.model_copy(update={"census": census, "output": output})


def _degrees(text: Optional[str], default: Tuple[int, int]) -> range:
    lo, hi = parse_range(text) if text else default
    return range(lo, hi + 1)


def _guard(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise GuardError(f"{what} limited to n <= {limit}, got {n}")


def cmd_classify(args: argparse.Namespace, cfg: SystemConfig, out: TextIO) -> int:
    p = parse_permutation(args.permutation, degree=args.degree)
    _guard(p.n, cfg.guards.max_degree, "classify")
    out.write(emit_classify(p, args.mode, cfg.output.format))
    return EXIT_OK


def cmd_census(args: argparse.Namespace, cfg: SystemConfig, out: TextIO) -> int:
    _guard(args.n, cfg.guards.census_max_degree, "census")
    run = CensusPipeline(cfg).run(args.n, args.mode)
    out.write(emit_record(run.record, cfg.output.format, include_timings=cfg.output.include_timings))
    return EXIT_OK


def _verify_rows(args: argparse.Namespace, cfg: SystemConfig) -> Tuple[List[Dict[str, Any]], bool]:
    guards = cfg.guards
    rows: List[Dict[str, Any]] = []
    if args.target == "dihedral":
        for n in _degrees(args.range, (3, 12)):
            _guard(n, guards.max_degree, "dihedral verification")
            rows.append(verify_dihedral(n, max_elements=guards.closure_max_elements).to_dict())
        return rows, all(row["passed"] for row in rows)

    if args.target == "uniqueness":
        for n in _degrees(args.range, (2, 8)):
            _guard(n, guards.inverse_max_degree, "uniqueness verification")
            rows.append(verify_uniqueness(n, max_degree=guards.inverse_max_degree).to_dict())
        return rows, all(row["passed"] for row in rows)

    if args.target == "inverse":
        classes = [name.strip() for name in args.classes.split(",") if name.strip()]
        cap = cfg.census.witness_cap
        for n in _degrees(args.range, (2, 7)):
            _guard(n, guards.inverse_max_degree, "inverse-closure verification")
            for name in classes:
                report = verify_inverse_closure(n, name, max_degree=guards.inverse_max_degree)
                rows.append(
                    {
                        "n": n,
                        "class": name,
                        "members": report.members,
                        "holds": report.holds,
                        "counterexamples": len(report.counterexamples),
                        "examples": report.counterexamples[:cap],
                    }
                )
        return rows, all(row["holds"] for row in rows)

    for row in klein_report():
        expected = KLEIN_EXPECTED.get(row["name"])
        ok = expected is None or (row["rgspp"], row["lgspp"]) == expected
        rows.append({**row, "passed": ok})
    return rows, all(row["passed"] for row in rows)


def cmd_verify(args: argparse.Namespace, cfg: SystemConfig, out: TextIO) -> int:
    rows, passed = _verify_rows(args, cfg)
    out.write(emit_rows(args.target, rows, passed, cfg.output.format))
    return EXIT_OK if passed else EXIT_VERIFICATION_FAILED


def cmd_sequences(args: argparse.Namespace, cfg: SystemConfig, out: TextIO) -> int:
    lo, hi = parse_range(args.range, open_start=1)
    _guard(hi, cfg.guards.census_max_degree, "sequences")
    records = CensusPipeline(cfg).sequences(lo, hi, args.mode)
    out.write(emit_sequences(records, cfg.output.format))
    return EXIT_OK


def cmd_witness(args: argparse.Namespace, cfg: SystemConfig, out: TextIO) -> int:
    _guard(args.n, cfg.guards.census_max_degree, "census")
    record = CensusPipeline(cfg).run(args.n, args.mode).record
    rejected = set(verify_witnesses(record, max_length=cfg.guards.oracle_max_length))
    rows = []
    for text in record.neither_witnesses:
        left, right = palindromic_values(from_one_line([int(v) for v in text.split(",")]), args.mode)
        rows.append(
            {
                "permutation": text,
                "lpv": "".join(str(s) for s in left),
                "rpv": "".join(str(s) for s in right),
                "passed": text not in rejected,
            }
        )
    out.write(emit_rows("witness", rows, not rejected, cfg.output.format))
    return EXIT_OK if not rejected else EXIT_VERIFICATION_FAILED


def cmd_generators(args: argparse.Namespace, cfg: SystemConfig, out: TextIO) -> int:
    limit = args.limit if args.limit > 0 else None
    rows: List[Dict[str, Any]] = []
    for n in _degrees(args.range, (3, 3)):
        if n < 2:
            raise InvalidDegreeError(f"generator search needs n >= 2, got {n}")
        pairs = search_generating_pairs(
            n,
            limit=limit,
            max_degree=cfg.guards.generator_search_max_degree,
            max_elements=cfg.guards.closure_max_elements,
        )
        if not pairs:
            rows.append({"n": n, "sigma": "-", "tau": "-", "order": 0, "passed": False})
        rows.extend({"n": n, **pair.to_dict(), "passed": True} for pair in pairs)
    found = all(row["passed"] for row in rows)
    out.write(emit_rows("generators", rows, found, cfg.output.format))
    return EXIT_OK if found else EXIT_VERIFICATION_FAILED


COMMANDS: Dict[str, Callable[[argparse.Namespace, SystemConfig, TextIO], int]] = {
    "classify": cmd_classify,
    "census": cmd_census,
    "verify": cmd_verify,
    "sequences": cmd_sequences,
    "witness": cmd_witness,
    "generators": cmd_generators,
}


def main(
    argv: Optional[Sequence[str]] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
    environ: Optional[Dict[str, str]] = None,
) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    args = build_parser().parse_args(argv)

    try:
        cfg = resolve_config(args, environ)
    except ConfigError as exc:
        err.write(f"palperm: {exc}\n")
        return EXIT_USAGE
    configure_logging(cfg.logging)

    started = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, cfg, out)
    except PalpermError as exc:
        LOGGER.error(
            "Command failed",
            extra={"context": {"command": args.command, "error": str(exc), "exit_code": exc.exit_code}},
        )
        err.write(f"palperm: {exc}\n")
        return exc.exit_code
    except ConfigError as exc:
        LOGGER.error("Command failed", extra={"context": {"command": args.command, "error": str(exc)}})
        err.write(f"palperm: {exc}\n")
        return EXIT_USAGE

    LOGGER.info(
        "Command finished",
        extra={
            "context": {
                "command": args.command,
                "exit_code": code,
                "elapsed_ms": round((time.perf_counter() - started) * 1000, 2),
                "config": str(Path(args.config)) if args.config else "default",
            }
        },
    )
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
