#!/usr/bin/env python3
"""
Example usage of the tracegen controller from Python.

This demonstrates emit() and check() on a small program, and a prover run
if z3 is installed.
"""

import shutil

from app.controller import check, emit, verify

COPY_POSITIVE = """func main() {
  const Int[] a;

  Int[] b;
  Int i = 0;
  Int j = 0;
  while (i < a.length) {
    if (a[i] >= 0) {
      b[j] = a[i];
      j = j + 1;
    }
    i = i + 1;
  }
}
assert (forall ((k Int)) (exists ((l Int)) (=> (and (<= 0 k) (< k (j main_end)) (>= a_length 0)) (= (b main_end k) (a l)))))
"""

COUNTER = """func main() {
  const Int n;
  Int x = 0;
  while (x < n) {
    x = x + 1;
  }
}
assert (=> (>= n 0) (= (x main_end) n))
"""


def main():
    """Main example demonstrating the three entry points."""

    print("tracegen Example")
    print("=" * 40)

    # Example 1: SMT-LIB task
    print("1. Emitting the copy-positive task...")
    smtlib = emit(COPY_POSITIVE)
    asserts = smtlib.count("(assert")
    print(f"   {len(smtlib.splitlines())} lines, {asserts} assertions")
    print("   " + "\n   ".join(smtlib.splitlines()[:4]))

    # Example 2: soundness sweep
    print("2. Checking the axioms on sampled executions...")
    report = check(COPY_POSITIVE, count=20, seed=1)
    print(f"   {len(report.violations)} violations / {report.checks} checks")

    # Example 3: a wrong assertion shows up as a counterexample
    print("3. Checking a program whose assertion is too strong...")
    too_strong = COUNTER.replace("(=> (>= n 0) (= (x main_end) n))", "(= (x main_end) n)")
    report = check(too_strong, count=20, seed=1)
    for violation in report.conjecture_failures[:3]:
        print(f"   counterexample: {violation.valuation}")

    # Example 4: prover run
    if shutil.which("z3"):
        print("4. Running z3 on the counter program...")
        verdict = verify(COUNTER)
        print(f"   {verdict.status} in {verdict.wall_time:.2f}s")
    else:
        print("4. z3 not found, skipping prover run")

    print("\nTo run the benchmark corpus:")
    print("  tracegen bench benchmarks --prover 'z3 -T:60 {file}'")
    print("\nTo run the server:")
    print("  python -m uvicorn app.main:app --reload")


if __name__ == "__main__":
    main()
