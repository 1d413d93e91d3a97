"""One test per acceptance criterion; each prints a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import time

import pytest

from effsolve.config import Settings
from effsolve.experiments import EXPERIMENTS

SEED = 0

CRITERIA = [
    ("1 scheduler optimality", "scheduler", 30.0),
    ("2 adjacent exchange", "exchange", None),
    ("3 recall connectivity", "memory", None),
    ("4 elimination effectivity", "zebra", 60.0),
    ("5 abstraction gate", "abstraction", None),
    ("6 effectivity trade-off", "gauss", None),
    ("7 state-machine conformance", "states", None),
    ("8 determinism", "determinism", None),
]


@pytest.mark.parametrize("label,key,limit", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(label, key, limit):
    start = time.perf_counter()
    res = EXPERIMENTS[key](SEED, Settings())
    elapsed = time.perf_counter() - start
    in_time = limit is None or elapsed < limit
    ok = res.passed and in_time
    timing = f"{elapsed:.1f}s" + (f" (limit {limit:.0f}s)" if limit else "")
    print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {res.measured} [{timing}]")
    assert res.passed, res.measured
    assert in_time, f"took {elapsed:.1f}s, limit {limit}s"
