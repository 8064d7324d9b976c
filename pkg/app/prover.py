"""
External prover driver.

The prover command is a template with a ``{file}`` placeholder, e.g.
``vampire --input_syntax smtlib2 -t 60 {file}`` or ``z3 -T:60 {file}``. If
the template has no placeholder the file path is appended.
"""

import logging
import os
import re
import shlex
import subprocess
import tempfile
import time

from .errors import ProverError, SpawnError
from .models import DEFAULT_TIMEOUT, EmissionConfig, ProverVerdict

logger = logging.getLogger(__name__)

DEFAULT_PROVER = "z3 {file}"

# Checked in order; the first pattern found in the output decides.
VERDICT_PATTERNS = [
    ("Proven", re.compile(r"^unsat\b|Refutation found|SZS status (Unsatisfiable|Theorem)", re.M)),
    ("Timeout", re.compile(r"^timeout\b|Time limit|SZS status Timeout", re.M)),
    (
        "Unknown",
        re.compile(
            r"^(sat|unknown)\b|SZS status (Satisfiable|CounterSatisfiable|GaveUp)", re.M
        ),
    ),
]


def default_prover_command() -> str:
    return os.getenv("TRACEGEN_PROVER", DEFAULT_PROVER)


def parse_verdict(output: str) -> str | None:
    """Verdict keyword found in prover output, or None."""
    for status, pattern in VERDICT_PATTERNS:
        if pattern.search(output):
            return status
    return None


def build_command(prover_cmd: str, path: str) -> list[str]:
    if "{file}" in prover_cmd:
        return shlex.split(prover_cmd.format(file=shlex.quote(path)))
    return [*shlex.split(prover_cmd), path]


def run_prover(
    smtlib: str, prover_cmd: str | None = None, cfg: EmissionConfig | None = None
) -> ProverVerdict:
    """
    Run an SMT-LIB prover on one task and classify its answer.

    Args:
        smtlib: The emitted task text
        prover_cmd: Command template; defaults to $TRACEGEN_PROVER or z3
        cfg: Supplies the wall-clock budget (timeout_seconds)

    Returns:
        ProverVerdict: Proven only when the prover printed unsat or a refutation

    Raises:
        SpawnError: The executable cannot be started
        ProverError: Nonzero exit without a recognizable verdict
    """
    prover_cmd = prover_cmd or default_prover_command()
    timeout = cfg.timeout_seconds if cfg is not None else DEFAULT_TIMEOUT

    with tempfile.NamedTemporaryFile(
        "w", suffix=".smt2", encoding="utf-8", delete=False
    ) as handle:
        handle.write(smtlib)
        path = handle.name

    command = build_command(prover_cmd, path)
    logger.info("running %s (timeout %ss)", " ".join(command), timeout)
    started = time.monotonic()
    try:
        result = subprocess.run(
            command, capture_output=True, text=True, timeout=timeout
        )
    except FileNotFoundError as exc:
        raise SpawnError(f"cannot start prover {command[0]!r}") from exc
    except subprocess.TimeoutExpired as exc:
        elapsed = max(time.monotonic() - started, float(timeout))
        output = exc.stdout or ""
        if isinstance(output, bytes):
            output = output.decode("utf-8", "replace")
        logger.info("prover killed after %.2fs", elapsed)
        return ProverVerdict(status="Timeout", wall_time=elapsed, raw_output=output)
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass

    elapsed = time.monotonic() - started
    output = result.stdout + result.stderr
    status = parse_verdict(output)
    if status is None:
        if result.returncode != 0:
            raise ProverError(
                f"prover exited with status {result.returncode}", raw_output=output
            )
        status = "Unknown"
    logger.debug("prover said %s in %.2fs", status, elapsed)
    return ProverVerdict(status=status, wall_time=elapsed, raw_output=output)
