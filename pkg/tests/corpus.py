"""Reference corpus: small instances reused across the test suite.

Everything is deterministic; sizes stay within the exact-oracle caps so
every complexity quantity here can be cross-checked by brute force.
"""

from fractions import Fraction

from epsnet import (
    LowerBoundParams,
    alexander_capacity,
    build_range_space,
    doubling_constant,
    gen_geometric,
    gen_lower_bound_family,
    gen_random,
)
from epsnet.generators import random_points


def singletons(n, name):
    return build_range_space(n, [1] * n, [[i] for i in range(n)], name=name)


def powerset3():
    subs = [[0], [1], [2], [0, 1], [0, 2], [1, 2], [0, 1, 2]]
    return build_range_space(3, [1, 1, 1], subs, name="powerset3")


def sparse_singletons8():
    return build_range_space(
        8, [1] * 8, [[0], [2], [4], [6]], name="sparse-singles8"
    )


def chain(n, name):
    return build_range_space(
        n, [1] * n, [list(range(i + 1)) for i in range(n)], name=name
    )


def intervals8_weighted():
    pts = list(range(8))
    space = gen_geometric("intervals", pts, weights=[5, 1, 1, 1, 3, 1, 1, 2])
    return build_range_space(
        space.n, list(space.weights),
        [[p for p in range(space.n) if r >> p & 1] for r in space.ranges],
        name="intervals8w",
    )


def square_plus_center():
    return gen_geometric(
        "halfplanes", [(0, 0), (4, 0), (4, 4), (0, 4), (2, 1)],
        name="halfplanes5",
    )


def disks5():
    return gen_geometric(
        "disks", [(0, 0), (4, 0), (0, 4), (3, 3), (1, 1)], name="disks5"
    )


def build_corpus():
    return {
        s.name: s
        for s in [
            singletons(8, "singles8"),
            powerset3(),
            sparse_singletons8(),
            chain(8, "chain8"),
            gen_geometric("intervals", list(range(6)), name="intervals6"),
            intervals8_weighted(),
            gen_lower_bound_family(LowerBoundParams(k=1, d=2, l=1, m=2)),
            gen_lower_bound_family(LowerBoundParams(k=1, d=2, l=2, m=2)),
            gen_lower_bound_family(LowerBoundParams(k=2, d=3, l=1, m=2)),
            gen_random(10, 20, "uniform", "ones", seed=7, name="random10a"),
            gen_random(10, 25, "geometric", "ones", seed=8, name="random10b"),
            gen_random(12, 30, "uniform", "uniform", seed=9, name="random12w"),
            square_plus_center(),
            disks5(),
        ]
    }


CORPUS = build_corpus()

EPS_GRID = (Fraction(1, 4), Fraction(1, 8), Fraction(1, 16))

# Pinned random geometric point sets for the doubling-vs-capacity ratio
# regression: (kind, point count, coordinate dimension, seed). Small enough
# that the doubling constant is computed exactly.
DOUBLING_RATIO_CASES = (
    ("intervals", 14, 1, 11),
    ("intervals", 20, 1, 12),
    ("halfplanes", 10, 2, 13),
    ("disks", 8, 2, 14),
)


def doubling_to_capacity_ratios():
    """(instance name, eps, D/tau as float) over the pinned cases.

    D is the doubling constant's lower value (exact on these sizes, greedy
    lower bound if an instance ever outgrows the exact search); tau is the
    capacity at the same scale.
    """
    rows = []
    for kind, n, dim, seed in DOUBLING_RATIO_CASES:
        sp = gen_geometric(
            kind, random_points(n, dim, seed=seed), name=f"{kind}{n}s{seed}"
        )
        for eps in EPS_GRID:
            D = doubling_constant(sp, eps)
            tau = alexander_capacity(sp, eps)
            rows.append((sp.name, eps, float(Fraction(D.lower) / tau)))
    return rows
