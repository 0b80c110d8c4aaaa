"""Time the compiled kernels against their numpy/Python twins.

    python benchmarks/bench_kernels.py [--bylines 100000] [--repeat 5]

Both backends are imported directly, so the BYLINERANK_PURE switch does not
matter here. Outputs are checked for exact agreement before timing.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from bylinerank import _pykernels
from bylinerank.credit import DEFAULT_SCHEME

try:
    from bylinerank import _kernels
except ImportError:
    _kernels = None


def workload(n_bylines: int, seed: int):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, 16, size=n_bylines)
    intra = rng.integers(0, 2, size=n_bylines).astype(np.uint8)
    n_slots = int(sizes.sum())
    n_researchers = max(n_bylines // 5, 2)
    # roughly a third of slots belong to tracked researchers
    slot_researcher = np.where(rng.random(n_slots) < 0.3, rng.integers(0, n_researchers, n_slots), -1)
    slot_pub = np.repeat(np.arange(n_bylines), sizes)
    impact = rng.gamma(1.0, 1.5, size=n_bylines)
    scores = np.round(rng.normal(size=n_researchers), 2)
    return sizes, intra, slot_researcher, slot_pub, impact, n_researchers, scores


def cases(k, data, scheme):
    sizes, intra, slot_r, slot_p, impact, n_r, scores = data
    ww = k.allocate_weighted(sizes, intra, scheme)
    wf = k.allocate_fractional(sizes)
    return {
        "allocate_weighted": lambda: k.allocate_weighted(sizes, intra, scheme),
        "allocate_fractional": lambda: k.allocate_fractional(sizes),
        "accumulate": lambda: k.accumulate(slot_r, slot_p, ww, wf, impact, n_r),
        "average_ranks": lambda: k.average_ranks(scores),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bylines", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _kernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first", file=sys.stderr)
        return 1
    scheme = DEFAULT_SCHEME.as_array()
    data = workload(args.bylines, args.seed)
    py = cases(_pykernels, data, scheme)
    cy = cases(_kernels, data, scheme)

    for name in py:
        if not np.array_equal(py[name](), cy[name]()):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1

    print(f"{args.bylines} bylines, {int(data[0].sum())} slots, best of {args.repeat}")
    print(f"{'kernel':<22}{'python ms':>12}{'compiled ms':>14}{'speedup':>10}")
    for name in py:
        t_py = min(timeit.repeat(py[name], number=1, repeat=args.repeat)) * 1e3
        t_cy = min(timeit.repeat(cy[name], number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<22}{t_py:>12.2f}{t_cy:>14.2f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
