"""Time the compiled kernels against the pure-Python ones on the same workloads.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

from sympy import divisors

from mcgk._backend import BACKENDS


def _weights(n):
    return [n - n // k for k in divisors(n) if k >= 2]


def workloads():
    # (label, callable taking a kernel module)
    def counts(mod):
        for g in range(1, 7):
            for n in range(2, 4 * g + 3):
                for h in range(0, g + 1):
                    budget = 2 * g - 2 - n * (2 * h - 2)
                    if budget >= 0:
                        mod.enumerate_counts(budget, _weights(n))

    def vectors_all(mod):
        mod.search_vectors(24, (2, 3, 4, 6, 8, 12, 24), True, False)
        mod.search_vectors(30, (2, 3, 5, 6, 10, 15, 30), True, False)

    def vectors_first(mod):
        for n in range(2, 40):
            mod.search_vectors(n, (n,) * 5, True, True)

    return [("enumerate_counts g<=6", counts),
            ("search_vectors exhaustive", vectors_all),
            ("search_vectors first hit", vectors_first)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if "compiled" not in BACKENDS:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'workload':<28}" + "".join(f"{b:>12}" for b in BACKENDS) + "     speedup")
    for label, fn in workloads():
        times = {b: min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
                 for b, mod in BACKENDS.items()}
        row = f"{label:<28}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times.values())
        if "compiled" in times:
            row += f"  {times['python'] / times['compiled']:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
