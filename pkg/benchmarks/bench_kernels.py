"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each row is the best-of-``repeat`` wall time for one call of the workload.
"""

import argparse
import json
import timeit

import numpy as np

from uwbnlos import _pykernels

try:
    from uwbnlos import _ckernels
except ImportError:
    _ckernels = None


def workloads(rng):
    xs = rng.uniform(0.05, 400.0, 2000)
    betas = rng.uniform(0.3, 8.0, 200)
    targets = [_pykernels.ggd_excess_kurtosis(b) for b in betas]
    x = rng.normal(0.0, 2.0, 200_000)
    dist = 3.0 + rng.normal(0.0, 0.03, 100_000)
    scores = np.round(rng.normal(0.0, 1.0, 20_000), 3)
    positive = rng.random(20_000) < 0.1

    return {
        "log_gamma x2000": lambda k: [k.log_gamma(float(v)) for v in xs],
        "ggd_excess_kurtosis x200": lambda k: [k.ggd_excess_kurtosis(float(b)) for b in betas],
        "invert_kurtosis x200": lambda k: [k.invert_kurtosis(t, 0.15, 20.0, 1e-12, 200) for t in targets],
        "ggd_log_pdf n=2e5": lambda k: k.ggd_log_pdf(x, 0.1, 1.3, 1.5),
        "rolling_variance n=1e5 w=20": lambda k: k.rolling_variance(dist, 20),
        "best_threshold n=2e4": lambda k: k.best_threshold(scores, positive),
    }


def best_time(fn, repeat):
    number = 1
    while True:
        t = timeit.timeit(fn, number=number)
        if t > 0.05 or number >= 1000:
            break
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write results to this file")
    args = ap.parse_args()

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("compiled", _ckernels))
    else:
        print("compiled extension not built; timing the python kernels only")

    rows = []
    for name, work in workloads(np.random.default_rng(0)).items():
        times = {b: best_time(lambda: work(k), args.repeat) for b, k in backends}
        rows.append({"kernel": name, **times})

    print(f"{'kernel':<30} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for r in rows:
        c = r.get("compiled")
        speed = f"{r['python'] / c:8.1f}" if c else f"{'-':>8}"
        ctext = f"{c * 1e3:10.3f}ms" if c else f"{'-':>12}"
        print(f"{r['kernel']:<30} {r['python'] * 1e3:10.3f}ms {ctext} {speed}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
