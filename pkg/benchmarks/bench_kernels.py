"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--sizes 40 80 160] [--repeat 3]

Each row reports the best of ``--repeat`` runs and checks that both backends
return identical arrays.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from hwroute import kernels
from hwroute.generators import GeneratorSpec, generate
from hwroute.metric import REL_TOL


def best_of(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return out, best


def bench(n: int, repeat: int, backends: dict) -> list[tuple]:
    g = generate(GeneratorSpec("grid-with-highways", n, 0))
    iu, iv = np.triu_indices(n, k=1)
    us, vs = iu.astype(np.int64), iv.astype(np.int64)
    rows, outputs = [], {}
    for name, mod in backends.items():
        (dist, pred), t_apsp = best_of(
            lambda: mod.apsp(n, g.indptr, g.indices, g.weights, REL_TOL), repeat)
        (ptr, verts), t_paths = best_of(lambda: mod.collect_paths(pred, us, vs), repeat)
        hubs, t_hit = best_of(lambda: mod.greedy_hitting_set(n, ptr, verts), repeat)
        outputs[name] = (dist, pred, ptr, verts, list(hubs))
        rows.append((n, name, t_apsp, t_paths, t_hit))
    ref = next(iter(outputs.values()))
    for name, got in outputs.items():
        same = all(np.array_equal(a, b) for a, b in zip(ref[:4], got[:4])) and ref[4] == got[4]
        if not same:
            raise SystemExit(f"backend {name} disagrees with the reference at n={n}")
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[40, 80, 160])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = kernels.backends()
    if "compiled" not in backends:
        print("compiled kernels are not built; timing the fallback only")
    print(f"{'n':>5} {'backend':>9} {'apsp s':>9} {'paths s':>9} {'hitting s':>10}")
    table = []
    for n in args.sizes:
        for row in bench(n, args.repeat, backends):
            table.append(row)
            print(f"{row[0]:>5} {row[1]:>9} {row[2]:>9.4f} {row[3]:>9.4f} {row[4]:>10.4f}")
    if "compiled" in backends:
        for n in args.sizes:
            py = next(r for r in table if r[0] == n and r[1] == "python")
            cy = next(r for r in table if r[0] == n and r[1] == "compiled")
            speed = sum(py[2:]) / max(sum(cy[2:]), 1e-12)
            print(f"n={n}: compiled is {speed:.1f}x faster overall")


if __name__ == "__main__":
    main()
