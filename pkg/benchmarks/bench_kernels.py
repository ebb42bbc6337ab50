"""Compare the compiled and pure-Python search kernels.

Runs the full search on the bundled fixtures with each backend, then times
the two kernels directly on the sensing-heavy bomb-sa-4 frontier.

    python3 benchmarks/bench_kernels.py [--repeat N] [--fixtures NAME ...]
"""

import argparse
import statistics
import time

from condreg import fixtures, kernels
from condreg.search import SearchOptions, solve, _action_table


def best_ms(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1000.0)
    return min(times), statistics.median(times)


def bench_solve(names, backends, repeat):
    print(f"{'fixture':<14}{'backend':<10}{'pairs':>8}{'best ms':>11}{'median ms':>11}")
    for name in names:
        problem = fixtures.load(name)
        for backend in backends:
            result = solve(problem, SearchOptions(backend=backend))
            best, med = best_ms(lambda: solve(problem, SearchOptions(backend=backend)), repeat)
            print(f"{name:<14}{backend:<10}{result.stats.pairs:>8}{best:>11.2f}{med:>11.2f}")


def bench_layer(backends, repeat):
    problem = fixtures.load("bomb-sa-4")
    frontier = solve(problem, SearchOptions(find_all=True)).frontier
    states = [(p.pstate.T, p.pstate.F) for p in frontier.pairs]
    actions = _action_table(problem.domain.nonsensing)
    print(f"\nregress_layer on {len(states)} states x {len(actions)} actions")
    for backend in backends:
        mod = kernels.get_backend(backend)
        best, med = best_ms(lambda: mod.regress_layer(states, actions), repeat)
        print(f"  {backend:<10}{best:>9.2f} ms best{med:>9.2f} ms median")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--fixtures", nargs="*", default=[n for n in fixtures.NAMES if n.startswith("bomb")]
                        + ["evanston"])
    args = parser.parse_args(argv)
    backends = ["python"] + (["compiled"] if kernels.compiled is not None else [])
    if len(backends) == 1:
        print("compiled kernels not available; timing the Python fallback only")
    bench_solve(args.fixtures, backends, args.repeat)
    bench_layer(backends, args.repeat)


if __name__ == "__main__":
    main()
