"""Small packings in the clean container against closed-form optima.

One, two and three identical circles in the unit disk have known best
radii; a short search should land on all three.
"""

import math

from fsspack import FssConfig, Instance, run

EXACT = {
    1: 1.0,
    2: 0.5,
    3: 2.0 * math.sqrt(3.0) - 3.0,
    4: math.sqrt(2.0) - 1.0,
}


def main() -> None:
    empty = Instance("empty", [])
    print(f"{'n':>2s} {'found':>12s} {'exact':>12s} {'error':>9s}")
    for n, exact in EXACT.items():
        config = FssConfig(n=n, iterations=30, replications=5, seed=1)
        report = run(empty, config)
        err = abs(report.best_radius - exact)
        print(f"{n:2d} {report.best_radius:12.8f} {exact:12.8f} {err:9.1e}"
              f"   ({report.nlp_solves} solves, {report.total_elapsed:.1f}s)")


if __name__ == "__main__":
    main()
