#!/usr/bin/env python3
"""Compare the compiled kernel backend against the pure fallback.

Runs the same workloads twice in fresh interpreters, once with the
default backend and once with HOPSHORT_PURE=1, and prints the speedups.
Backend choice happens at import, hence the subprocesses.

    python3 benchmarks/backend_bench.py [--repeat N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def workloads():
    from hopshort import (
        Network,
        distr_reach,
        parallel_diam,
        path,
        path_plus_random,
        seq_shortcut,
    )

    graphs = {
        "path_1024": path(1024),
        "mixed_2048": path_plus_random(2048, 512, seed=1),
    }
    return [
        ("seq_shortcut mixed_2048 k=8", lambda: seq_shortcut(graphs["mixed_2048"], 8, 0)),
        ("parallel_diam path_1024 k=8", lambda: parallel_diam(graphs["path_1024"], 8, 0)),
        ("distr_reach path_256", lambda: distr_reach(Network(path(256)), 0, check=False)),
    ]


def run_inner(repeat: int) -> None:
    import hopshort

    results = {"backend": hopshort.BACKEND, "times": {}}
    for name, fn in workloads():
        best = min(_timed(fn) for _ in range(repeat))
        results["times"][name] = best
    json.dump(results, sys.stdout)


def _timed(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def run_outer(repeat: int) -> int:
    here = os.path.abspath(__file__)
    runs = {}
    for label, env_extra in (("default", {}), ("pure", {"HOPSHORT_PURE": "1"})):
        env = dict(os.environ, **env_extra)
        out = subprocess.run(
            [sys.executable, here, "--inner", "--repeat", str(repeat)],
            capture_output=True, text=True, env=env, check=True,
        )
        runs[label] = json.loads(out.stdout)
        print(f"{label}: backend={runs[label]['backend']}")
    if runs["default"]["backend"] == "pure":
        print("compiled backend unavailable; both runs used the fallback")
    width = max(len(name) for name in runs["default"]["times"])
    print(f"\n{'workload':<{width}}  {'default':>9}  {'pure':>9}  speedup")
    for name, t_def in runs["default"]["times"].items():
        t_pure = runs["pure"]["times"][name]
        print(f"{name:<{width}}  {t_def:>8.3f}s  {t_pure:>8.3f}s  {t_pure / t_def:>6.1f}x")
    return 0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3, help="timed runs per workload")
    ap.add_argument("--inner", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.inner:
        run_inner(args.repeat)
        return 0
    return run_outer(args.repeat)


if __name__ == "__main__":
    sys.exit(main())
