"""
Benchmark tests for the bundled delay systems.

These run full LMI solves near each system's known delay boundaries and are
marked ``slow``; ``pytest -m "not slow"`` skips them.
"""
