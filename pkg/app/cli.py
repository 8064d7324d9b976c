"""
tracegen command line.

    tracegen emit FILE [-o OUT]
    tracegen verify FILE [--prover CMD]
    tracegen check PATH... [--count N --seed S]
    tracegen bench DIR [--jobs J --db PATH]
    tracegen serve

Exit codes: 0 success or Proven, 1 Unknown/Timeout or a false assertion,
2 usage or input errors, 3 a violated axiom (generator bug).
"""

import argparse
import logging
import sys

from pydantic import ValidationError

from .errors import FrontendError, SpawnError, TraceGenError
from .models import DEFAULT_TIMEOUT, EmissionConfig, RunConfig, SweepBounds

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNPROVEN = 1
EXIT_INPUT = 2
EXIT_VIOLATION = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracegen",
        description="Trace-logic verification conditions for W programs",
    )
    parser.add_argument("mode", choices=["emit", "verify", "check", "bench", "serve"])
    parser.add_argument("inputs", nargs="*", help="W files or directories")
    parser.add_argument("-o", "--output", help="write SMT-LIB here instead of stdout")
    parser.add_argument("--prover", help="prover command template with {file}")
    parser.add_argument("--timeout", type=int, default=DEFAULT_TIMEOUT)
    parser.add_argument("--nat-mode", choices=["algebraic", "integer"], default="algebraic")
    parser.add_argument(
        "--conjecture-mode",
        choices=["assert-not", "negated-assert"],
        default="negated-assert",
    )
    parser.add_argument("--no-lemmas", action="store_true")
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-len", type=int, default=5)
    parser.add_argument(
        "--val-range", default="-3:3", metavar="LO:HI", help="sampled value range"
    )
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--db", help="record bench runs in this sqlite file")
    parser.add_argument("--dump-traces", metavar="DIR")
    parser.add_argument("--host", default="0.0.0.0")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _val_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ValueError(f"--val-range expects LO:HI, got {text!r}")
    return int(lo), int(hi)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    lo, hi = _val_range(args.val_range)
    return RunConfig(
        mode=args.mode,
        inputs=args.inputs,
        output=args.output,
        emission=EmissionConfig(
            nat_mode=args.nat_mode,
            conjecture_mode=args.conjecture_mode,
            include_lemmas=not args.no_lemmas,
            timeout_seconds=args.timeout,
        ),
        count=args.count,
        seed=args.seed,
        bounds=SweepBounds(max_len=args.max_len, val_lo=lo, val_hi=hi),
        prover=args.prover,
        jobs=args.jobs,
        db=args.db,
        dump_traces=args.dump_traces,
        host=args.host,
        port=args.port,
    )


def run(cfg: RunConfig) -> int:
    from .controller import TraceGenController

    controller = TraceGenController(cfg.emission, cfg.prover, cfg.db)

    match cfg.mode:
        case "emit":
            text = controller.emit_file(cfg.inputs[0], cfg.output)
            if cfg.output is None:
                sys.stdout.write(text)
            return EXIT_OK

        case "verify":
            verdict = controller.verify_file(cfg.inputs[0])
            print(f"{verdict.status}\t{verdict.wall_time:.2f}s")
            return EXIT_OK if verdict.status == "Proven" else EXIT_UNPROVEN

        case "check":
            reports = controller.check_files(
                cfg.inputs, cfg.count, cfg.seed, cfg.bounds, cfg.dump_traces
            )
            checks = sum(r.checks for r in reports)
            bugs = [v for r in reports for v in r.generator_violations]
            failures = [v for r in reports for v in r.conjecture_failures]
            for report in reports:
                for violation in report.violations:
                    print(f"{report.program}: {violation.describe()}")
            print(f"{len(bugs)} violations / {checks} checks")
            if failures:
                print(f"{len(failures)} assertion counterexamples")
            if bugs:
                return EXIT_VIOLATION
            return EXIT_UNPROVEN if failures else EXIT_OK

        case "bench":
            result = controller.bench_directory(cfg.inputs, cfg.jobs)
            print("benchmark\tstatus\twall_time\taxioms\tlemmas")
            for row in result.rows:
                print(
                    f"{row.benchmark}\t{row.status}\t{row.wall_time:.2f}"
                    f"\t{row.axioms}\t{row.lemmas}"
                )
            print(f"Total solved {result.solved} / {len(result.rows)}")
            return EXIT_OK

        case "serve":
            import uvicorn

            uvicorn.run("app.main:app", host=cfg.host, port=cfg.port)
            return EXIT_OK
    return EXIT_INPUT


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = config_from_args(args)
    except (ValidationError, ValueError) as exc:
        print(f"tracegen: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return run(cfg)
    except (FrontendError, SpawnError, OSError) as exc:
        print(f"tracegen: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TraceGenError as exc:
        logger.debug("run failed", exc_info=True)
        print(f"tracegen: {exc}", file=sys.stderr)
        return EXIT_UNPROVEN


if __name__ == "__main__":
    sys.exit(main())
