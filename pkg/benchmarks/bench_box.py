"""Compare the compiled and numpy box-sum backends.

Times the raw box-sum kernel over several sizes and radii, then a full
self-guided EPGIF run with each backend patched in.

    python benchmarks/bench_box.py [--sizes 256,512,1024] [--radii 2,16] [--repeat 5]
"""
from __future__ import annotations

import argparse
import statistics
import timeit
from contextlib import ExitStack
from unittest import mock

import numpy as np

from epgif import _kernels_py, edge_perceptual, stats
from epgif.edge_perceptual import EpgifParams, epgif_filter

try:
    from epgif import _kernels
except ImportError:  # extension not built
    _kernels = None


def _int_list(text):
    return [int(v) for v in text.split(",") if v]


def _median(fn, repeat):
    fn()  # warm-up
    return statistics.median(timeit.repeat(fn, number=1, repeat=repeat))


def _backends():
    found = {"numpy": _kernels_py.box_sum}
    if _kernels is not None:
        found["cython"] = _kernels.box_sum
    return found


def bench_kernel(sizes, radii, repeat):
    backends = _backends()
    print(f"{'kernel':<8}{'size':>6}{'radius':>8}" + "".join(f"{name + ' ms':>14}" for name in backends)
          + ("   speedup" if len(backends) > 1 else ""))
    rng = np.random.default_rng(0)
    for n in sizes:
        img = rng.random((n, n))
        for r in radii:
            times = {name: _median(lambda f=f: f(img, r), repeat) for name, f in backends.items()}
            line = f"{'box_sum':<8}{n:>6}{r:>8}" + "".join(f"{1e3 * t:>14.2f}" for t in times.values())
            if len(times) > 1:
                line += f"{times['numpy'] / times['cython']:>9.2f}x"
            print(line)
            if len(backends) > 1:
                ref = backends["numpy"](img, r)
                assert np.allclose(backends["cython"](img, r), ref, rtol=1e-12, atol=1e-9)


def bench_filter(sizes, radii, repeat):
    backends = _backends()
    print(f"\n{'filter':<8}{'size':>6}{'radius':>8}" + "".join(f"{name + ' ms':>14}" for name in backends))
    rng = np.random.default_rng(1)
    for n in sizes:
        img = rng.random((n, n))
        for r in radii:
            params = EpgifParams(radius=r)
            times = []
            for f in backends.values():
                with ExitStack() as stack:
                    stack.enter_context(mock.patch.object(stats, "box_sum", f))
                    stack.enter_context(mock.patch.object(edge_perceptual, "box_sum", f))
                    times.append(_median(lambda: epgif_filter(img, img, params), repeat))
            print(f"{'epgif':<8}{n:>6}{r:>8}" + "".join(f"{1e3 * t:>14.1f}" for t in times))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=_int_list, default=[256, 512, 1024])
    parser.add_argument("--radii", type=_int_list, default=[2, 16, 64])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--skip-filter", action="store_true", help="only time the raw kernel")
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled backend not built; timing the numpy fallback only")
    bench_kernel(args.sizes, args.radii, args.repeat)
    if not args.skip_filter:
        bench_filter(args.sizes, args.radii, args.repeat)


if __name__ == "__main__":
    main()
