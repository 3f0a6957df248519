"""Time the numba and numpy backends of each approximate-regime kernel, plus
one end-to-end equivalence check.

    python benchmarks/bench_kernels.py [--repeat 20] [--json out.json]

The first numba call per kernel compiles (or loads the on-disk cache); it is
run once as warm-up and not timed.
"""
from __future__ import annotations

import argparse
import json
import math
import time

import numpy as np

from symdet import _accel, kernels
from symdet.pencil import congruence, random_invertible, random_tuple
from symdet.reduction import are_equivalent, hn_elements


def _cases(rng):
    deg = 12
    c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    c[0] = 1.0
    z0 = np.exp(2j * np.pi * np.arange(deg) / deg + 0.4) * 3
    M = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    S = M + M.T
    N = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    N[:, -1] = N[:, :-1] @ rng.standard_normal(7)
    elems = list(hn_elements(5))
    signs = np.array([h.signs for h in elems], dtype=np.float64)
    perms = np.array([h.perm for h in elems], dtype=np.int64)
    lams = rng.standard_normal(5) + 0j
    tail = rng.standard_normal((2, 5, 5)) + 0j
    tail = tail + tail.transpose(0, 2, 1)
    images = kernels.orbit_images(lams, tail, signs, perms)

    A = random_tuple(4, 3, rng, condition="in_U")
    B = congruence(A, random_invertible(4, rng))
    return {
        "aberth (deg 12)": lambda: kernels.aberth(c, z0, 500, 1e-14),
        "symmetric_elimination (8x8)": lambda: kernels.symmetric_elimination(S, 1e-12),
        "null_vector (8x8)": lambda: kernels.null_vector(N),
        "orbit_images (n=5, 3840 elements)": lambda: kernels.orbit_images(lams, tail, signs, perms),
        "dedup_rows (3840 rows)": lambda: kernels.dedup_rows(images, 1e-9),
        "are_equivalent (n=4, r=3)": lambda: are_equivalent(A, B),
    }


def _time(fn, repeat):
    fn()
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json")
    args = ap.parse_args()

    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    names = list(_cases(np.random.default_rng(args.seed)))
    results = {name: {} for name in names}
    for backend in ("numpy", "numba"):
        with _accel.use_backend(backend):
            cases = _cases(np.random.default_rng(args.seed))
            for name, fn in cases.items():
                results[name][backend] = _time(fn, args.repeat)

    width = max(map(len, names))
    print(f"{'kernel':<{width}}  {'numpy':>11}  {'numba':>11}  speedup")
    for name in names:
        a, b = results[name]["numpy"], results[name]["numba"]
        speedup = a / b if b > 0 else math.inf
        print(f"{name:<{width}}  {a * 1e6:9.1f}us  {b * 1e6:9.1f}us  {speedup:6.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
