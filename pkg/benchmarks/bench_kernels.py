"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-N wall time for each backend
and the speedup. Outputs are compared so a mismatch is reported too.
"""
import argparse
import timeit

import numpy as np

from monofourier import kernels


def _cases(rng):
    points = rng.integers(0, 1 << 62, 20_000, dtype=np.uint64)
    y = rng.standard_normal(points.shape[0])
    masks = np.unique(rng.integers(0, 1 << 10, 200, dtype=np.uint64))
    coeffs = rng.standard_normal(masks.shape[0])
    table = rng.standard_normal(1 << 18)
    kept = np.ascontiguousarray(rng.integers(0, 1 << 63, (1024, 4), dtype=np.uint64))
    cand = kept[-1].copy()
    cand[0] ^= np.uint64(0xFFFF)

    def wht(mod):
        a = table.copy()
        mod.wht_inplace(a)
        return a

    return {
        "wht_inplace (d=18)": wht,
        "char_means (n=20000, |S|=%d)" % masks.shape[0]:
            lambda mod: mod.char_means(points, y, masks),
        "eval_spectrum (n=20000, |S|=%d)" % masks.shape[0]:
            lambda mod: mod.eval_spectrum(points, masks, coeffs),
        "coord_bin_stats (n=20000, d=64)": lambda mod: mod.coord_bin_stats(points, y, 64),
        "far_from_all (1024 words x 256 bits)":
            lambda mod: mod.far_from_all(kept, kept.shape[0] - 1, cand, 1),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, (bool, np.bool_)):
        return bool(a) == bool(b)
    return np.allclose(a, b, rtol=1e-10, atol=1e-10)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    names = sorted(kernels.BACKENDS)
    print(f"backends available: {', '.join(names)} (default: {kernels.BACKEND})")
    for label, fn in _cases(np.random.default_rng(args.seed)).items():
        times, outs = {}, {}
        for name in names:
            mod = kernels.BACKENDS[name]
            outs[name] = fn(mod)
            times[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        cells = "  ".join(f"{name} {times[name] * 1e3:9.3f} ms" for name in names)
        extra = ""
        if len(names) == 2:
            extra = f"  speedup {times['python'] / times['cython']:6.1f}x"
            if not _same(outs["python"], outs["cython"]):
                extra += "  OUTPUT MISMATCH"
        print(f"{label:42s} {cells}{extra}")


if __name__ == "__main__":
    main()
