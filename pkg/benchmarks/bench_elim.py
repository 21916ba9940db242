"""Benchmark: compiled elimination kernel vs the pure numpy fallback.

Both backends are imported directly (bypassing the import-time selection) and
run on identical inputs; results are asserted equal before timings print.

    python3 benchmarks/bench_elim.py
"""

import time

import numpy as np

from sparserank import _elim_py, harness, linalg, matgen

try:
    from sparserank import _speedups
except ImportError:
    _speedups = None


def _sample_gf2(n, mean):
    spec = harness.parse_spec(
        {"q": 2, "ddist": {"kind": "poisson", "mean": mean},
         "kdist": {"kind": "fixed", "value": 3}}
    )
    rng = np.random.default_rng(0)
    degs = matgen.sample_degrees(spec, n, rng)
    return matgen.gen_simple(spec, degs, rng)


def _sample_modq(n, q, density, seed):
    rng = np.random.default_rng(seed)
    m = int(0.9 * n)
    dense = np.where(rng.random((m, n)) < density, rng.integers(1, q, size=(m, n)), 0)
    from sparserank.gf import field_new

    return linalg.from_dense(dense.astype(np.uint8), field_new(q))


def _time(fn, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_case(name, A, repeats=3):
    ctx = A.field
    dense = A.to_dense()
    results = {}
    for label, mod in (("cython", _speedups), ("python", _elim_py)):
        if mod is None:
            continue
        if ctx.q == 2:
            def run(mod=mod):
                packed = linalg._pack_gf2(dense)
                return mod.rref_gf2(packed, A.ncols)
        else:
            def run(mod=mod):
                work = dense.copy()
                return mod.rref_modq(work, ctx.mul_table, ctx.sub_table, ctx.inv_table)
        secs, (rank, pivots) = _time(run, repeats)
        results[label] = (secs, rank, tuple(pivots))
    ranks = {v[1] for v in results.values()}
    pivots = {v[2] for v in results.values()}
    assert len(ranks) == 1 and len(pivots) == 1, f"backend mismatch on {name}"
    line = f"{name:34s} rank={ranks.pop():5d}"
    for label in ("cython", "python"):
        if label in results:
            line += f"  {label}={results[label][0] * 1000:9.2f}ms"
    if len(results) == 2:
        line += f"  speedup={results['python'][0] / results['cython'][0]:5.1f}x"
    print(line)


def main():
    if _speedups is None:
        print("compiled backend unavailable; timing the python fallback only")
    print(f"{'case':34s}")
    bench_case("gf2  n=2000 (poisson 2.9 / k=3)", _sample_gf2(2000, 2.9))
    bench_case("gf2  n=4000 (poisson 2.9 / k=3)", _sample_gf2(4000, 2.9))
    bench_case("gf3  n=600  (density 0.02)", _sample_modq(600, 3, 0.02, 1))
    bench_case("gf9  n=400  (density 0.02)", _sample_modq(400, 9, 0.02, 2))
    bench_case("gf3  n=600  (dense 0.5)", _sample_modq(600, 3, 0.5, 3))


if __name__ == "__main__":
    main()
