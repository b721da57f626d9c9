"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each workload is run on both backends; results are checked for equality
before timings are reported.
"""

from __future__ import annotations

import argparse
import random
import timeit

from sectoric import _kernels, fans, ideals, polytopes


def workloads():
    rays = fans.secant_dual_rays((1, 1, 1, 1, 1))
    lam = fans.gorenstein_test(rays).certificate
    gens = [list(g) for g in fans.secant_generators((1, 1, 1, 1, 1))]
    dim = len(rays[0])
    box = (
        gens + [list(lam), [-x for x in lam]],
        [0] * len(gens) + [1, -1],
        [min(r[i] for r in rays) for i in range(dim)],
        [max(r[i] for r in rays) for i in range(dim)],
    )
    hrep = polytopes.facets_Q((2, 2, 2))
    lo, hi = polytopes._coordinate_bounds(hrep.dilate(3))
    dilation = ([list(h.normal) for h in hrep.inequalities], [3 * h.offset for h in hrep.inequalities], lo, hi)

    rng = random.Random(0)
    variables = list(ideals.gb_point_map((2, 2, 2)))
    monomials = [ideals.monomial(rng.choices(variables, k=8)) for _ in range(20)]
    blocks = [ideals._pair_codes(3, m) for m in monomials]

    return {
        "box_points (terminal test, 5 binary factors)": ("box_points", box),
        "box_points (3Q for shape 2,2,2)": ("box_points", dilation),
        "first_undecomposable (3,3,3,3), d=3": ("first_undecomposable", ((3, 3, 3, 3), 3, False)),
        "first_undecomposable (1,1,1,1,1), d=4": ("first_undecomposable", ((1, 1, 1, 1, 1), 4, False)),
        "min_inversions (20 monomials of degree 8)": ("min_inversions_batch", blocks),
    }


def call(module, kernel, args):
    if kernel == "min_inversions_batch":
        return [module.min_inversions(b) for b in args]
    return getattr(module, kernel)(*args)


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    py, cy = _kernels.python_backend, _kernels.compiled_backend
    if cy is None:
        print("compiled kernels are not built; only the Python timings are shown")
    print(f"{'workload':48} {'python':>10} {'cython':>10} {'speedup':>8}")
    for name, (kernel, kargs) in workloads().items():
        t_py = min(timeit.repeat(lambda: call(py, kernel, kargs), number=1, repeat=args.repeat))
        if cy is None:
            print(f"{name:48} {t_py:10.4f} {'-':>10} {'-':>8}")
            continue
        if call(py, kernel, kargs) != call(cy, kernel, kargs):
            raise SystemExit(f"backends disagree on {name}")
        t_cy = min(timeit.repeat(lambda: call(cy, kernel, kargs), number=1, repeat=args.repeat))
        print(f"{name:48} {t_py:10.4f} {t_cy:10.4f} {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
