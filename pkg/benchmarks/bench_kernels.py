"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each row times one kernel on both backends and checks the outputs agree.
"""

import argparse
import time

import numpy as np

from qdomain import TNorm, kernels
from qdomain.tnorm import verify_quantale_laws

SPEC = TNorm.ordinal_sum((0.0, 0.3, "product"), (0.4, 0.7, "lukasiewicz"), (0.8, 1.0, "product"))


def cases(rng):
    arrs = SPEC.piece_arrays
    x, y = rng.random((2, 600, 600))
    A, B = rng.random((2, 200, 200))
    delta = rng.random((10, 1 << 10))
    return [
        ("conj 600x600", kernels.conj, (x, y, *arrs)),
        ("residuum 600x600", kernels.residuum, (x, y, *arrs)),
        ("compose_max 200^3", kernels.compose_max, (A, B, *arrs)),
        ("residuum_meet 200^3", kernels.residuum_meet, (A, B, *arrs)),
        ("approach_violations 10 pts", kernels.approach_violations, (delta, *arrs)),
    ]


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(u, v) for u, v in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def law_sweep(repeat):
    return best_of(lambda: verify_quantale_laws(TNorm.product(), 100), (), repeat)[0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if "cython" not in kernels.BACKENDS:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<30}{'python s':>11}{'cython s':>11}{'speedup':>9}  agree")
    rows = cases(rng) + [("quantale laws, product, n=100", None, None)]
    for name, fn, fargs in rows:
        res = {}
        for backend in ("python", "cython"):
            prev = kernels.use_backend(backend)
            try:
                res[backend] = law_sweep(args.repeat) if fn is None else best_of(fn, fargs, args.repeat)
            finally:
                kernels.use_backend(prev)
        if fn is None:
            tp, tc, agree = res["python"], res["cython"], "-"
        else:
            (tp, op), (tc, oc) = res["python"], res["cython"]
            agree = "yes" if same(op, oc) else "NO"
        print(f"{name:<30}{tp:>11.4f}{tc:>11.4f}{tp / tc:>8.1f}x  {agree}")


if __name__ == "__main__":
    main()
