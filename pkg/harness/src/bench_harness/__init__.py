"""Benchmark harness for the MiniC++ verifier.

Runs one verifier process per test case, enforces per-case timeouts,
collects verdict-match pass rates, cumulative verification time, and
cumulative maximum RSS (per sub-process, summed), and renders the
pass-rate/memory/multi-solver tables.
"""

__version__ = "0.1.0"
