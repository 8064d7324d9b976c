"""
Programmatic interface to the trace-logic pipeline.

Use the module-level emit(), verify() and check() functions for one-off
calls, or a TraceGenController for repeated work with shared settings.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from pathlib import Path

from . import syntax as w
from .database import Database
from .errors import FrontendError, OutOfBoundsRead, ProverError, StepLimitExceeded
from .evaluator import check_task
from .models import (
    DEFAULT_STEP_LIMIT,
    BenchRow,
    BenchRun,
    CheckReport,
    EmissionConfig,
    ProverVerdict,
    SweepBounds,
)
from .oracle import execute, format_trace, sample_inputs
from .parser import parse_program
from .prover import default_prover_command, run_prover
from .semantics import VerificationTask, build_task
from .smtlib import emit_smtlib

logger = logging.getLogger(__name__)

SOURCE_SUFFIX = ".w"


def collect_sources(paths: list[str]) -> list[Path]:
    """Expand directories into their W files, sorted by name."""
    found: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            found.extend(sorted(path.glob(f"*{SOURCE_SUFFIX}")))
        else:
            found.append(path)
    return found


class TraceGenController:
    """
    Pipeline runner holding the emission settings, prover command and
    optional benchmark store.
    """

    def __init__(
        self,
        cfg: EmissionConfig | None = None,
        prover_cmd: str | None = None,
        db_path: str | None = None,
    ):
        self.cfg = cfg or EmissionConfig()
        self.prover_cmd = prover_cmd or default_prover_command()
        self.db = Database(db_path) if db_path else None

    def load(self, path: str | Path) -> w.Program:
        return parse_program(Path(path).read_text(encoding="utf-8"))

    def task_for(self, program: w.Program) -> VerificationTask:
        return build_task(program, include_lemmas=self.cfg.include_lemmas)

    def emit_source(self, source: str) -> str:
        """
        Translate W source text to an SMT-LIB task.

        Args:
            source: Program text

        Returns:
            str: The SMT-LIB text; identical input gives identical output

        Example:
            controller = TraceGenController(EmissionConfig(nat_mode="integer"))
            text = controller.emit_source(Path("benchmarks/skip.w").read_text())
        """
        return emit_smtlib(self.task_for(parse_program(source)), self.cfg)

    def emit_file(self, path: str | Path, output: str | Path | None = None) -> str:
        text = emit_smtlib(self.task_for(self.load(path)), self.cfg)
        if output is not None:
            Path(output).write_text(text, encoding="utf-8", newline="\n")
            logger.info("wrote %s", output)
        return text

    def verify_source(self, source: str) -> ProverVerdict:
        return run_prover(self.emit_source(source), self.prover_cmd, self.cfg)

    def verify_file(self, path: str | Path) -> ProverVerdict:
        """
        Emit a W file and hand it to the configured prover.

        Returns:
            ProverVerdict: Proven, Unknown, Timeout or ProverError with wall time
        """
        return run_prover(self.emit_file(path), self.prover_cmd, self.cfg)

    def check_program(
        self,
        program: w.Program,
        name: str = "program",
        count: int = 50,
        seed: int = 0,
        bounds: SweepBounds | None = None,
        step_limit: int = DEFAULT_STEP_LIMIT,
        dump_dir: str | Path | None = None,
    ) -> CheckReport:
        """
        Soundness sweep: run the program on sampled inputs and evaluate the
        task on every resulting trace.

        Args:
            program: Parsed program
            name: Label used in the report
            count: Number of sampled valuations
            seed: Sampling seed
            bounds: Array length and value range of sampled inputs
            step_limit: Rule applications before a run counts as nonterminating
            dump_dir: If given, one trace file per run is written there

        Returns:
            CheckReport: Checks performed and violations found
        """
        task = build_task(program, include_lemmas=True)
        traces = []
        for index, inp in enumerate(sample_inputs(program, count, seed, bounds)):
            try:
                trace = execute(program, inp, step_limit)
            except StepLimitExceeded as exc:
                logger.warning("%s: no termination on %s", name, inp.describe())
                trace = exc.trace
            except OutOfBoundsRead as exc:
                logger.warning("%s: skipped %s (%s)", name, inp.describe(), exc)
                continue
            traces.append(trace)
            if dump_dir is not None:
                target = Path(dump_dir) / f"{name}-{index:03d}.trace"
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(format_trace(trace), encoding="utf-8")
        report = check_task(task, traces, name=name)
        logger.info(
            "%s: %d violations / %d checks on %d traces",
            name,
            len(report.violations),
            report.checks,
            report.traces,
        )
        return report

    def check_files(
        self,
        paths: list[str],
        count: int = 50,
        seed: int = 0,
        bounds: SweepBounds | None = None,
        dump_dir: str | None = None,
    ) -> list[CheckReport]:
        return [
            self.check_program(
                self.load(path), path.stem, count, seed, bounds, dump_dir=dump_dir
            )
            for path in collect_sources(paths)
        ]

    def _bench_one(self, path: Path) -> BenchRow:
        try:
            task = self.task_for(self.load(path))
        except FrontendError as exc:
            logger.warning("%s: %s", path.name, exc)
            return BenchRow(
                benchmark=path.stem,
                status="InvalidSource",
                wall_time=0.0,
                axioms=0,
                lemmas=0,
                message=str(exc),
            )
        try:
            verdict = run_prover(emit_smtlib(task, self.cfg), self.prover_cmd, self.cfg)
        except ProverError as exc:
            logger.warning("%s: %s", path.name, exc)
            verdict = ProverVerdict(status="ProverError", wall_time=0.0, raw_output=exc.raw_output)
        logger.info("%s: %s (%.2fs)", path.stem, verdict.status, verdict.wall_time)
        return BenchRow(
            benchmark=path.stem,
            status=verdict.status,
            wall_time=round(verdict.wall_time, 3),
            axioms=len(task.axioms()),
            lemmas=len(task.lemma_instances),
        )

    def bench_directory(self, paths: list[str], jobs: int = 1) -> BenchRun:
        """
        Verify every W file under the given paths, up to jobs provers at a time.

        The run is stored when the controller has a database.
        """
        run = BenchRun(
            started_at=datetime.utcnow(),
            prover=self.prover_cmd,
            timeout=self.cfg.timeout_seconds,
        )
        sources = collect_sources(paths)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            run.rows = list(pool.map(self._bench_one, sources))
        if self.db is not None:
            run = self.db.record_run(run)
        return run


# Global controller instance for easy access
_controller = None


def get_controller() -> TraceGenController:
    """Get the global controller instance."""
    global _controller
    if _controller is None:
        _controller = TraceGenController()
    return _controller


def emit(source: str) -> str:
    """
    Convenience function: SMT-LIB task for W source text with default settings.

    Example:
        text = emit('''
        func main() {
          Int x = 1;
        }
        assert (= (x main_end) 1)
        ''')
    """
    return get_controller().emit_source(source)


def verify(source: str) -> ProverVerdict:
    """Convenience function: emit and run the default prover."""
    return get_controller().verify_source(source)


def check(source: str, count: int = 50, seed: int = 0) -> CheckReport:
    """Convenience function: soundness sweep over sampled inputs."""
    return get_controller().check_program(parse_program(source), count=count, seed=seed)
