#!/usr/bin/env python3
"""Run the whole CLI pipeline on the bundled fixtures, end to end.

Writes into a temporary directory and prints each step's one-line
result; exits nonzero on the first failing step.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(*args):
    cmd = ["opbench", *map(str, args)]
    print("$", " ".join(cmd))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    tail = (proc.stderr or proc.stdout).strip().splitlines()
    if tail:
        print(" ", tail[-1])
    if proc.returncode != 0:
        print(f"step failed with exit code {proc.returncode}", file=sys.stderr)
        sys.exit(proc.returncode)


def main():
    with tempfile.TemporaryDirectory(prefix="opbench_demo_") as d:
        tmp = Path(d)
        run("validate", FIXTURES / "toy_vit.graph.json")
        run("classify", "aten::softmax")
        run("profile", FIXTURES / "toy_vit.graph.json",
            "-o", tmp / "vit.trace.json", "--warmup", "2", "--repeats", "5")
        run("report", tmp / "vit.trace.json", "--format", "markdown",
            "-o", tmp / "vit.md")
        run("report", FIXTURES / "avg_cpu.trace.json",
            "--compare", FIXTURES / "avg_gpu.trace.json",
            "--format", "csv", "-o", tmp / "cpu_vs_gpu.csv")
        run("ingest", FIXTURES / "chrome_50.json", "--chrome",
            "-o", tmp / "chrome.trace.json")
        run("report", tmp / "chrome.trace.json", "--format", "json",
            "-o", tmp / "chrome_breakdown.json")
        run("ubench", "gen", FIXTURES / "table2_records.json",
            "-o", tmp / "suite.json")
        run("validate", tmp / "suite.json")
        run("ubench", "run", tmp / "suite.json", "-o", tmp / "results.json",
            "--warmup", "1", "--iterations", "3")
    print("pipeline complete")


if __name__ == "__main__":
    main()
