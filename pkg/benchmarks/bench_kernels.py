"""Compare the compiled and NumPy kernel backends.

Times three workloads on both backends: batched polynomial evaluation, the
KKT foot solve on the circles relation, and a block of the atlas coverage
matrix (samples x candidate chart points).

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from saq import kernels
from saq.atlas import AtlasConfig, Chart, _rows, draw_samples
from saq.avoidance import avoidance_set
from saq.relation import corpus_path, load_relation_file


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def workloads(rel):
    rng = np.random.default_rng(0)
    zs = rng.uniform(-3, 3, size=(2000, 2 * rel.n))
    pairs = [(z[:rel.n], rng.uniform(-3, 3, rel.n)) for z in zs[:400]]
    samples = draw_samples(rel, AtlasConfig(samples=40, seed=1))
    pts = avoidance_set(rel.n, 3, seed=0).scaled((-5, -5), (5, 5), 16)
    charts = [Chart(j, tuple(p)) for j, p in enumerate(pts)]

    def evaluate():
        for z in zs:
            kernels.eval_polys(rel.system, z)

    def feet():
        for x, p in pairs:
            kernels.kkt_solve(rel.system, rel.n, rel.k, x, x, p)

    def matrix():
        _rows(rel, samples, charts, 1)

    return {"eval_polys x2000": evaluate, "kkt_solve x400": feet, "coverage 40x10": matrix}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rel = load_relation_file(corpus_path("circles"))
    backends = kernels.available_backends()
    results = {}
    for name in backends:
        kernels.use_backend(name)
        for label, fn in workloads(rel).items():
            results[(label, name)] = best_of(fn, args.repeat)
    labels = list(workloads(rel))
    print(f"{'workload':<20}" + "".join(f"{b:>12}" for b in backends) + (f"{'speedup':>10}" if len(backends) == 2 else ""))
    for label in labels:
        row = f"{label:<20}" + "".join(f"{results[(label, b)]:>11.3f}s" for b in backends)
        if len(backends) == 2:
            row += f"{results[(label, 'python')] / results[(label, 'compiled')]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
