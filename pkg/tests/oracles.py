"""Independent brute-force oracles used to freeze expected values.

Everything here works on frozensets and direct enumeration, on purpose:
no bitmasks, no shared helpers with the package, so agreement is
evidence rather than tautology. Only run these at desk scale.
"""

from fractions import Fraction
from itertools import combinations


def as_sets(space):
    return [frozenset(_bits(r)) for r in space.ranges]


def _bits(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def set_weight(space, s):
    return sum(space.weights[p] for p in s)


def set_measure(space, s):
    return Fraction(set_weight(space, s), sum(space.weights))


def oracle_vc(space):
    """Largest shattered subset, by exhaustive enumeration."""
    fam = as_sets(space)
    if not fam:
        return -1
    best = 0
    ground = range(space.n)
    for size in range(1, space.n + 1):
        found = False
        for ys in combinations(ground, size):
            y = frozenset(ys)
            traces = {r & y for r in fam}
            if len(traces) == 2**size:
                best = size
                found = True
                break
        if not found:
            break
    return best


def oracle_pi(space, y):
    """Max distinct-trace count over subsets of size exactly y."""
    fam = as_sets(space)
    if y == 0:
        return 1 if fam else 0
    best = 0
    for ys in combinations(range(space.n), y):
        yset = frozenset(ys)
        best = max(best, len({r & yset for r in fam}))
    return best


def oracle_shallow(space, y, l):
    """Max count of traces of size <= l over subsets of size <= y."""
    fam = as_sets(space)
    if not fam:
        return 0
    best = 0
    for size in range(0, min(y, space.n) + 1):
        for ys in combinations(range(space.n), size):
            yset = frozenset(ys)
            traces = {r & yset for r in fam}
            best = max(best, sum(1 for t in traces if len(t) <= l))
    return best


def oracle_min_hitting(space, eps):
    """Smallest support subset meeting every range of measure >= eps."""
    eps = Fraction(eps)
    fam = [
        frozenset(_bits(r)) for i, r in enumerate(space.ranges)
        if space.measure(i) >= eps
    ]
    support = [p for p in range(space.n) if space.weights[p] > 0]
    for size in range(0, len(support) + 1):
        for pts in combinations(support, size):
            chosen = frozenset(pts)
            if all(r & chosen for r in fam):
                return size
    raise AssertionError("support itself always hits qualifying ranges")


def oracle_max_packing(space, delta, eligible=None):
    """Largest pairwise delta-separated subfamily, by include/exclude
    recursion (every branch filters to the still-compatible tail)."""
    delta = Fraction(delta)
    fam = as_sets(space)
    idx = list(range(len(fam))) if eligible is None else list(eligible)

    def far(i, j):
        return set_measure(space, fam[i] ^ fam[j]) >= delta

    def rec(cands):
        if not cands:
            return 0
        first, rest = cands[0], cands[1:]
        with_first = 1 + rec([c for c in rest if far(first, c)])
        without = rec(rest) if len(rest) > with_first - 1 else 0
        return max(with_first, without)

    return rec(idx)


def oracle_tau(space, eps):
    """Capacity by dense scan: all range measures, eps, and midpoints."""
    eps = Fraction(eps)
    fam = as_sets(space)
    measures = sorted({set_measure(space, r) for r in fam})
    candidates = {eps, Fraction(1)}
    candidates.update(q for q in measures if eps <= q <= 1)
    ordered = sorted(candidates)
    for a, b in zip(ordered, ordered[1:]):
        candidates.add((a + b) / 2)

    def ratio(eps0):
        union = set()
        for r in fam:
            if set_measure(space, r) <= eps0:
                union |= r
        return set_measure(space, union) / eps0

    return max(
        max((ratio(e0) for e0 in candidates if eps <= e0 <= 1)), Fraction(1)
    )


def oracle_doubling(space, eps):
    """Doubling constant by dense scan over the same candidate scales."""
    eps = Fraction(eps)
    fam = as_sets(space)
    values = {eps, Fraction(1)}
    for r in fam:
        q = set_measure(space, r) / 2
        if eps <= q <= 1:
            values.add(q)
    for a, b in combinations(range(len(fam)), 2):
        q = set_measure(space, fam[a] ^ fam[b])
        if eps <= q <= 1:
            values.add(q)
    ordered = sorted(values)
    for a, b in zip(ordered, ordered[1:]):
        values.add((a + b) / 2)
    best = 0
    for eps0 in values:
        if not eps <= eps0 <= 1:
            continue
        eligible = [
            i for i, r in enumerate(fam)
            if set_measure(space, r) <= 2 * eps0
        ]
        if len(eligible) <= best:
            continue
        best = max(best, oracle_max_packing(space, eps0, eligible))
    return best


def oracle_star(space):
    """Largest set where each chosen point is isolated by some range."""
    fam = as_sets(space)
    if not fam:
        return 0
    best = 0
    for size in range(space.n, 0, -1):
        if size <= best:
            break
        for pts in combinations(range(space.n), size):
            t = frozenset(pts)
            if all(any(r & t == {x} for r in fam) for x in t):
                best = size
                break
    return best
