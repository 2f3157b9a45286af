"""Benchmark the longest-path kernel: compiled extension vs numpy fallback.

Runs the same source sweep twice in subprocesses (LOREMBED_PURE=1 forces
the fallback) and prints per-source timings and the speedup.

    python3 benchmarks/bench_kernels.py --n 96 --radius 5 --sources 8
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
from lorembed import kernels
from lorembed import sigma as sg
from lorembed.spacetime import flat_slab, grid_build

n, radius, n_sources = json.loads(sys.argv[1])
spec = flat_slab()
grid = grid_build(spec, n, n)
t0 = time.perf_counter()
dag = sg.causal_graph(grid, R=radius)
t_build = time.perf_counter() - t0
sources = np.linspace(0, grid.n_nodes - 1, n_sources).astype(int)
best = float("inf")
for _ in range(3):
    t0 = time.perf_counter()
    for s in sources:
        kernels.longest_path_from(dag, int(s))
    best = min(best, (time.perf_counter() - t0) / n_sources)
checksum = float(np.nansum(kernels.longest_path_from(dag, 0)))
print(json.dumps({"backend": kernels.backend_name(), "build_s": t_build,
                  "per_source_s": best, "nodes": grid.n_nodes,
                  "edges": int(dag.indices.size), "checksum": checksum}))
"""


def run_once(pure, payload):
    env = dict(os.environ)
    if pure:
        env["LOREMBED_PURE"] = "1"
    else:
        env.pop("LOREMBED_PURE", None)
    out = subprocess.run([sys.executable, "-c", _WORKER, json.dumps(payload)],
                         capture_output=True, text=True, env=env, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=96, help="grid nodes per axis")
    ap.add_argument("--radius", type=int, default=5, help="stencil radius")
    ap.add_argument("--sources", type=int, default=8,
                    help="longest-path sweeps to time")
    args = ap.parse_args(argv)
    payload = [args.n, args.radius, args.sources]

    rows = [run_once(False, payload), run_once(True, payload)]
    if rows[0]["checksum"] != rows[1]["checksum"]:
        print("warning: backends disagree on the checksum", file=sys.stderr)
    print(f"grid {args.n}x{args.n} ({rows[0]['nodes']} nodes, "
          f"{rows[0]['edges']} edges), R={args.radius}, "
          f"{args.sources} sources, best of 3")
    for r in rows:
        print(f"  {r['backend']:>8}: {r['per_source_s'] * 1e3:9.2f} ms "
              f"per source (graph build {r['build_s']:.2f} s)")
    if rows[0]["backend"] != rows[1]["backend"]:
        ratio = rows[1]["per_source_s"] / rows[0]["per_source_s"]
        print(f"  speedup: {ratio:.1f}x")
    else:
        print("  compiled extension unavailable; both runs used the "
              "fallback")
    return 0


if __name__ == "__main__":
    sys.exit(main())
