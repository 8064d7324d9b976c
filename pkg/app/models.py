from datetime import datetime
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

DEFAULT_TIMEOUT = 60  # prover budget in seconds
DEFAULT_STEP_LIMIT = 100_000

NatMode = Literal["algebraic", "integer"]
ConjectureMode = Literal["assert-not", "negated-assert"]
VerdictStatus = Literal["Proven", "Unknown", "Timeout", "ProverError"]
BenchStatus = Literal["Proven", "Unknown", "Timeout", "ProverError", "InvalidSource"]


class EmissionConfig(BaseModel):
    nat_mode: NatMode = "algebraic"
    conjecture_mode: ConjectureMode = "negated-assert"
    include_lemmas: bool = True
    timeout_seconds: int = Field(DEFAULT_TIMEOUT, gt=0)


class SweepBounds(BaseModel):
    max_len: int = Field(5, ge=0, description="Longest sampled array")
    val_lo: int = -3
    val_hi: int = 3

    @model_validator(mode="after")
    def check_range(self):
        if self.val_lo > self.val_hi:
            raise ValueError("val_lo must not exceed val_hi")
        return self


class InputValuation(BaseModel):
    """Initial program state: const inputs plus initial values of mutable variables."""

    ints: dict[str, int] = Field(default_factory=dict)
    arrays: dict[str, list[int]] = Field(default_factory=dict)
    initial: dict[str, int] = Field(default_factory=dict)
    initial_arrays: dict[str, list[int]] = Field(default_factory=dict)

    def describe(self) -> str:
        parts = [f"{k}={v}" for k, v in sorted(self.ints.items())]
        parts += [f"{k}={v}" for k, v in sorted(self.arrays.items())]
        parts += [f"{k}@start={v}" for k, v in sorted(self.initial.items())]
        parts += [f"{k}@start={v}" for k, v in sorted(self.initial_arrays.items())]
        return ", ".join(parts) or "(empty)"


class ProverVerdict(BaseModel):
    status: VerdictStatus
    wall_time: float = Field(..., ge=0)
    raw_output: str = ""


ViolationKind = Literal["theory", "semantics", "reach", "lemma", "fact", "conjecture"]


class Violation(BaseModel):
    label: str
    kind: ViolationKind
    trace_index: int
    valuation: str
    grounding: dict[str, int] = Field(default_factory=dict)

    def describe(self) -> str:
        where = ", ".join(f"{k}={v}" for k, v in self.grounding.items()) or "-"
        return f"{self.label} [{self.kind}] trace {self.trace_index} ({self.valuation}) at {where}"


class CheckReport(BaseModel):
    program: str
    traces: int = 0
    nonterminating: int = 0
    checks: int = 0
    out_of_domain: int = 0
    violations: list[Violation] = Field(default_factory=list)

    @property
    def generator_violations(self) -> list[Violation]:
        """Violations of axioms, lemmas or facts, i.e. encoding bugs."""
        return [v for v in self.violations if v.kind != "conjecture"]

    @property
    def conjecture_failures(self) -> list[Violation]:
        return [v for v in self.violations if v.kind == "conjecture"]


class BenchRow(BaseModel):
    benchmark: str
    status: BenchStatus
    wall_time: float
    axioms: int
    lemmas: int
    message: str = ""


class BenchRun(BaseModel):
    id: int | None = None
    started_at: datetime
    prover: str
    timeout: int
    rows: list[BenchRow] = Field(default_factory=list)

    @property
    def solved(self) -> int:
        return sum(1 for row in self.rows if row.status == "Proven")


class RunConfig(BaseModel):
    mode: Literal["emit", "verify", "check", "bench", "serve"]
    inputs: list[str] = Field(default_factory=list)
    output: str | None = None
    emission: EmissionConfig = Field(default_factory=EmissionConfig)
    count: int = Field(50, gt=0)
    seed: int = 0
    bounds: SweepBounds = Field(default_factory=SweepBounds)
    prover: str | None = None
    jobs: int = Field(1, ge=1)
    db: str | None = None
    dump_traces: str | None = None
    host: str = "0.0.0.0"
    port: int = 8000

    @model_validator(mode="after")
    def check_inputs(self):
        if self.mode in ("emit", "verify") and len(self.inputs) != 1:
            raise ValueError(f"{self.mode} takes exactly one input file")
        if self.mode in ("check", "bench") and not self.inputs:
            raise ValueError(f"{self.mode} needs at least one input path")
        return self


# HTTP API


class EmitRequest(BaseModel):
    source: str
    nat_mode: NatMode = "algebraic"
    conjecture_mode: ConjectureMode = "negated-assert"
    include_lemmas: bool = True


class EmitResponse(BaseModel):
    smtlib: str
    semantics_axioms: int
    reach_axioms: int
    lemma_instances: int


class CheckRequest(BaseModel):
    source: str
    name: str = "request"
    count: int = Field(50, gt=0, le=1000)
    seed: int = 0
    bounds: SweepBounds = Field(default_factory=SweepBounds)


class VerifyRequest(BaseModel):
    # the prover command comes from $TRACEGEN_PROVER only
    model_config = ConfigDict(extra="forbid")

    source: str
    timeout: int = Field(DEFAULT_TIMEOUT, gt=0)
    nat_mode: NatMode = "algebraic"
    conjecture_mode: ConjectureMode = "negated-assert"


class ErrorResponse(BaseModel):
    status: int
    error: str
    message: str
    line: int | None = None
    column: int | None = None
