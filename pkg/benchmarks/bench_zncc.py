"""Benchmark the compiled ZNCC kernel against the NumPy fallback.

Run after building the extension:

    python benchmarks/bench_zncc.py
"""

import time

import numpy as np

from stereobench.matching import _zncc_map_numpy, implementation

try:
    from stereobench import _zncc
except ImportError:
    _zncc = None

# (search height/width, template height/width, repeats); the first row is the
# tracker's default workload: template ~ box size, search = template + 2*32
CASES = [
    ((86, 86), (22, 22), 200),
    ((128, 128), (40, 40), 100),
    ((192, 256), (64, 64), 30),
]


def timed(fn, search, template, repeats):
    fn(search, template)  # warm-up
    start = time.perf_counter()
    for _ in range(repeats):
        out = fn(search, template)
    return (time.perf_counter() - start) / repeats, out


def main():
    rng = np.random.default_rng(0)
    print(f"active backend at import: {implementation()}")
    if _zncc is None:
        print("compiled extension not available; benchmarking fallback only")
    header = f"{'search':>10} {'template':>10} {'numpy':>12} {'compiled':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for (sh, sw), (th, tw), repeats in CASES:
        search = rng.normal(size=(sh, sw)) * 40 + 120
        template = rng.normal(size=(th, tw)) * 40 + 120
        t_numpy, out_numpy = timed(_zncc_map_numpy, search, template, repeats)
        if _zncc is not None:
            t_compiled, out_compiled = timed(
                lambda s, t: _zncc.zncc_map(np.ascontiguousarray(s),
                                            np.ascontiguousarray(t)),
                search, template, repeats)
            assert np.allclose(out_numpy, out_compiled, atol=1e-9)
            print(f"{sh}x{sw:>5} {th}x{tw:>6} {t_numpy * 1e3:>10.2f}ms "
                  f"{t_compiled * 1e3:>10.2f}ms {t_numpy / t_compiled:>7.1f}x")
        else:
            print(f"{sh}x{sw:>5} {th}x{tw:>6} {t_numpy * 1e3:>10.2f}ms "
                  f"{'n/a':>12} {'n/a':>8}")


if __name__ == "__main__":
    main()
