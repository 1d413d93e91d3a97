"""Command-line entry point.

Exit codes: 0 success, 1 usage or input error, 2 the solver failed (or an
experiment/benchmark check did not pass).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .config import load_settings
from .domains import DOMAINS, get_domain
from .engine import run, write_trace
from .memory import memory_from_casebase
from .retrieval import load_casebase
from .scheduler import MAX_BRUTE_FORCE, verify_optimal

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    outcome: str
    steps: int
    candidates_tested: int
    wall_time: float
    trace_path: str | None
    budget: int
    method: str | None = None
    solution: object = None
    reason: str = ""


def _read_json(path: str, what: str):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what} file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse {what} file {path}: {exc}") from exc


def cmd_solve(args) -> int:
    settings = load_settings(args.config, {"budget": args.budget, "rng_seed": args.seed})
    data = _read_json(args.problem, "problem")
    if not isinstance(data, dict):
        raise UsageError(f"problem file {args.problem} must hold a JSON object")
    tag = args.domain or data.get("domain")
    if tag is None:
        raise UsageError("no domain given: use --domain or a \"domain\" field in the problem file")
    if args.domain and data.get("domain") not in (None, args.domain):
        raise UsageError(f"--domain {args.domain} contradicts problem file domain {data['domain']!r}")
    domain = get_domain(tag, settings.gauss)
    problem = domain.make_problem({**data, "domain": tag}, Path(args.problem).stem)

    if args.casebase:
        _read_json(args.casebase, "casebase")
        casebase, taxonomy = load_casebase(args.casebase)
    else:
        casebase, taxonomy = domain.default_casebase()
    memory = memory_from_casebase(casebase, settings.memory)

    start = time.perf_counter()
    outcome = run(problem, casebase, memory, settings.engine_config(), domain, taxonomy)
    wall = time.perf_counter() - start

    if args.trace:
        write_trace(outcome.trace, args.trace)
    report = RunReport(
        outcome=outcome.status,
        steps=outcome.steps,
        candidates_tested=outcome.candidates_tested,
        wall_time=round(wall, 6),
        trace_path=args.trace,
        budget=settings.engine.budget,
        method=outcome.method,
        solution=domain.solution_to_json(outcome.solution),
        reason=outcome.reason,
    )
    text = json.dumps(asdict(report), indent=2)
    if args.json:
        Path(args.json).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK if outcome.solved else EXIT_FAILED


def cmd_bench_scheduler(args) -> int:
    if args.n < 0 or args.n > MAX_BRUTE_FORCE:
        raise UsageError(f"--n must be between 0 and {MAX_BRUTE_FORCE}, got {args.n}")
    if args.trials < 0:
        raise UsageError("--trials must be >= 0")
    from .experiments import random_candidates

    rng = random.Random(args.seed)
    passed = sum(verify_optimal(random_candidates(rng, args.n)) for _ in range(args.trials))
    print(f"{passed}/{args.trials} pass (n={args.n}, seed={args.seed})")
    return EXIT_OK if passed == args.trials else EXIT_FAILED


def cmd_experiments(args) -> int:
    from .experiments import run_suite

    settings = load_settings(args.config)
    only = [s.strip() for s in args.only.split(",")] if args.only else None
    try:
        results = run_suite(args.seed, settings, only)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    width = max(len(r.key) for r in results)
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"[{mark}] {r.key:<{width}}  {r.claim}")
        print(f"       {'':<{width}}  measured: {r.measured}  ({r.seconds:.1f}s)")
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed (seed={args.seed})")
    if args.json:
        payload = {"seed": args.seed, "passed": ok, "criteria": [r.to_dict() for r in results]}
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="effsolve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the solver on one problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--domain", choices=sorted(DOMAINS))
    p.add_argument("--casebase")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--trace")
    p.add_argument("--config")
    p.add_argument("--json", help="write the run report here instead of stdout")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench-scheduler", help="brute-force check of the p/t ordering")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench_scheduler)

    p = sub.add_parser("experiments", help="run the acceptance experiments")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", help="comma-separated experiment names")
    p.add_argument("--config")
    p.add_argument("--json", help="write a machine-readable report here")
    p.set_defaults(func=cmd_experiments)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, TypeError) as exc:
        print(f"effsolve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
