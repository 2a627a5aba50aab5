"""Wall-clock comparison of the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is called once per backend before timing so numba compile time
is reported separately. Results are also checked for agreement.
"""

import argparse
import time

import numpy as np

from isoforge import kernels
from isoforge.groups import isometries
from isoforge.realization import group_to_space, preset_table, realize
from isoforge.rigidity import rigid_metric_path


def _metric(n, seed):
    # shortest-path closure of random integer weights is always a metric
    rng = np.random.default_rng(seed)
    D = rng.integers(1, 50, size=(n, n))
    D = np.minimum(D, D.T)
    np.fill_diagonal(D, 0)
    for k in range(n):
        D = np.minimum(D, D[:, k : k + 1] + D[k : k + 1, :])
    return D.astype(np.int64)


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    block, _ = realize(*group_to_space(preset_table("S3")))
    cases = [
        ("triangle n=400", lambda b, D=_metric(400, 1): kernels.triangle_witness(D, backend=b)),
        ("triangle strict n=400", lambda b, D=_metric(400, 2): kernels.triangle_witness(D, True, backend=b)),
        ("minplus 300x300", lambda b, D=_metric(300, 3): kernels.minplus(D, D, backend=b)),
        ("search path N=200", lambda b, S=rigid_metric_path(200): kernels.search_isometries(S.num, backend=b)),
        (f"search S3 realization n={len(block.space)}", lambda b, S=block.space: kernels.search_isometries(S.num, backend=b)),
    ]
    print(f"{'kernel':<36}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  agree")
    for name, fn in cases:
        t0 = time.perf_counter()
        fn("numba")
        compile_s = time.perf_counter() - t0
        fn("numpy")
        tn, out_n = _best(lambda: fn("numba"), args.repeat)
        tp, out_p = _best(lambda: fn("numpy"), args.repeat)
        agree = np.array_equal(np.asarray(out_n), np.asarray(out_p)) if out_n is not None else out_p is None
        print(f"{name:<36}{tn:>10.4f}{tp:>10.4f}{tp / max(tn, 1e-9):>8.1f}x  {agree}  (first numba call {compile_s:.2f}s)")
    # end-to-end sanity: default backend agrees with the group recovered by realize
    assert isometries(block.space).order == 6


if __name__ == "__main__":
    main()
