"""Compare the compiled and pure-Python Smith normal form kernels.

    python3 benchmarks/bench_snf.py [--sizes 20 40 80] [--modulus 12] [--repeat 5]
"""
import argparse
import time

import numpy as np

from gpdext import _snf_py
from gpdext.cohomology import CategoryComplex
from gpdext.embedding import build_embedding_category, sections_presheaf
from gpdext.extension import induced_action
from gpdext.fixtures import fixture
from gpdext.linalg import diagonalize

try:
    from gpdext._snf import diagonalize as compiled
except ImportError:
    compiled = None


def timed(A, N, backend, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        d = diagonalize(A, N, backend=backend)
        best = min(best, time.perf_counter() - t)
    return best, d


def cases(sizes, modulus, seed):
    rng = np.random.default_rng(seed)
    for n in sizes:
        yield f"random {n}x{n} mod {modulus}", rng.integers(0, modulus, size=(n, n)), modulus
    ext = fixture("two-orbit")
    cat = build_embedding_category(ext.E, iso_closed=True)
    cx = CategoryComplex(cat, sections_presheaf(cat, ext.K, induced_action(ext).table), relative_to=cat.units)
    D = cx.d(2)
    yield f"two-orbit d2 {D.shape[0]}x{D.shape[1]}", D, 2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 40, 80])
    ap.add_argument("--modulus", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernel not built; timing the fallback only")
    print(f"{'case':<28}{'python s':>12}{'compiled s':>12}{'speedup':>10}")
    for name, A, N in cases(args.sizes, args.modulus, args.seed):
        tp, dp = timed(A, N, _snf_py.diagonalize, args.repeat)
        if compiled is None:
            print(f"{name:<28}{tp:>12.4f}{'-':>12}{'-':>10}")
            continue
        tc, dc = timed(A, N, compiled, args.repeat)
        assert dp.diag == dc.diag, f"backends disagree on {name}"
        print(f"{name:<28}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
