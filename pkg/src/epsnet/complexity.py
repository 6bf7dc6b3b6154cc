"""Combinatorial and measure-theoretic complexity of a range space.

Exact modes enumerate and are guarded by size caps; budget modes return
flagged lower bounds. Suprema over a continuous scale parameter are
finite maxima over breakpoint values where the objective can change,
so every returned rational is exact.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .core import (
    CapExceededError,
    RangeSpace,
    TheoremViolationError,
    ceil_log2,
    iter_bits,
    mask_of,
    points_of,
    stream_rng,
)
from .packing import max_clique

DEFAULT_VC_CAP = 24
DEFAULT_ENUM_CAP = 300_000
DEFAULT_STAR_CAP = 22
DEFAULT_DOUBLING_RANGE_CAP = 400

# Valid constant for the capacity-based doubling ceiling (c*tau)^d:
# the shallow-cell route gives D <= 6*phi(8*d*tau, 24*d) <= 6*(8e*tau)^d,
# and 6 <= 6^d for d >= 1, so c = 48e works.
DOUBLING_CAPACITY_C = 48.0 * math.e


@dataclass(frozen=True)
class VCResult:
    value: int
    exact: bool
    witness: tuple[int, ...]


def _is_shattered(ranges: tuple[int, ...], ymask: int, ysize: int) -> bool:
    want = 1 << ysize
    traces = set()
    for r in ranges:
        traces.add(r & ymask)
        if len(traces) == want:
            return True
    return len(traces) == want


def vc_of_masks(
    masks, n: int, cap: int = DEFAULT_VC_CAP
) -> VCResult:
    """Exact dimension of an arbitrary family of subset masks on n points.

    Grows shattered sets level by level; a candidate is tested only if
    all its one-point-smaller subsets are shattered, which is necessary
    because shattering is hereditary. The empty family has dimension -1
    by convention.
    """
    ranges = tuple(masks)
    if not ranges:
        return VCResult(-1, True, ())
    if n > cap:
        raise CapExceededError(
            f"exact VC search capped at n={cap}, instance has n={n}"
        )
    prev = {0}  # level 0: the empty set is shattered for nonempty families
    witness = 0
    level = 0
    while True:
        cur = set()
        for y in prev:
            top = y.bit_length()  # only extend past the highest point
            for x in range(top, n):
                cand = y | (1 << x)
                if cand in cur:
                    continue
                if level >= 1 and any(
                    cand ^ (1 << b) not in prev for b in iter_bits(cand)
                ):
                    continue
                if _is_shattered(ranges, cand, level + 1):
                    cur.add(cand)
        if not cur:
            return VCResult(level, True, points_of(witness))
        level += 1
        prev = cur
        witness = min(cur)


def vc_dimension(
    space: RangeSpace,
    mode: str = "exact",
    budget: int = 2000,
    cap: int = DEFAULT_VC_CAP,
    seed: int = 0,
) -> VCResult:
    """Largest cardinality of a shattered point set.

    exact mode enumerates via vc_of_masks; lower_bound mode does seeded
    greedy restarts within budget and flags the result inexact.
    """
    ranges = space.ranges
    if not ranges:
        return VCResult(-1, True, ())
    if mode == "exact":
        return vc_of_masks(ranges, space.n, cap)
    if mode != "lower_bound":
        raise ValueError(f"unknown vc mode: {mode}")
    rng = stream_rng(seed, "vc")
    best, best_mask = 0, 0
    for _ in range(max(budget, 1)):
        order = list(range(space.n))
        rng.shuffle(order)
        y, size = 0, 0
        for x in order:
            cand = y | (1 << x)
            if _is_shattered(ranges, cand, size + 1):
                y, size = cand, size + 1
        if size > best:
            best, best_mask = size, y
    return VCResult(best, False, points_of(best_mask))


@dataclass(frozen=True)
class PiResult:
    value: int
    exact: bool


def projection_function(
    space: RangeSpace,
    y: int,
    cap: int = DEFAULT_ENUM_CAP,
    samples: int = 2000,
    seed: int = 0,
) -> PiResult:
    """Max number of distinct traces over point sets of size y.

    Exact when C(n, y) fits under cap, otherwise a sampled lower bound.
    """
    if y < 0 or y > space.n:
        raise ValueError(f"projection size {y} outside 0..{space.n}")
    if y == 0:
        return PiResult(1 if space.ranges else 0, True)
    if math.comb(space.n, y) <= cap:
        best = 0
        for pts in combinations(range(space.n), y):
            ymask = mask_of(pts)
            best = max(best, len({r & ymask for r in space.ranges}))
        return PiResult(best, True)
    rng = stream_rng(seed, "pi", y)
    best = 0
    population = list(range(space.n))
    for _ in range(samples):
        ymask = mask_of(rng.sample(population, y))
        best = max(best, len({r & ymask for r in space.ranges}))
    return PiResult(best, False)


@dataclass(frozen=True)
class SauerRow:
    y: int
    pi: int
    binom_sum: int
    power_bound: float


@dataclass(frozen=True)
class SauerReport:
    d: int
    rows: tuple[SauerRow, ...]


def sauer_check(
    space: RangeSpace, d: int | None = None, cap: int = DEFAULT_ENUM_CAP
) -> SauerReport:
    """Certify pi(y) <= sum_{i<=d} C(y,i) <= (e*y/d)^d for y = d..n.

    Needs the exact dimension and exact projection values; raises
    TheoremViolationError on any failure (which would mean a bug).
    """
    if d is None:
        d = vc_dimension(space).value
    if d < 0:
        return SauerReport(d, ())
    total = sum(math.comb(space.n, y) for y in range(d, space.n + 1))
    if total > cap:
        raise CapExceededError(f"sauer_check needs {total} subsets, cap is {cap}")
    rows = []
    for y in range(d, space.n + 1):
        pi = projection_function(space, y, cap=cap).value
        bsum = sum(math.comb(y, i) for i in range(d + 1))
        if pi > bsum:
            raise TheoremViolationError(
                f"shatter bound failed: pi({y})={pi} > {bsum} at d={d}"
            )
        if d >= 1 and y >= 1:
            power = (math.e * y / d) ** d
            if bsum > power * (1 + 1e-9):
                raise TheoremViolationError(
                    f"binomial-sum bound failed at y={y}, d={d}: {bsum} > {power}"
                )
        else:
            power = 1.0
        rows.append(SauerRow(y, pi, bsum, power))
    return SauerReport(d, tuple(rows))


# -- capacity ---------------------------------------------------------------


def _sorted_measure_prefixes(space: RangeSpace):
    """Ranges sorted by measure with prefix-union weights.

    Returns (sorted measures, prefix weights) where prefix[j] is the
    weight of the union of the j smallest-measure ranges.
    """
    order = sorted(range(len(space.ranges)), key=lambda i: (space.measure(i), i))
    measures = [space.measure(i) for i in order]
    prefix = [0]
    union = 0
    acc = 0
    for i in order:
        new = space.ranges[i] & ~union
        acc += space.mask_weight(new)
        union |= space.ranges[i]
        prefix.append(acc)
    return measures, prefix


def alexander_capacity(space: RangeSpace, eps: Fraction) -> Fraction:
    """sup over scales eps0 in [eps, 1] of P(union of ranges with
    P <= eps0) / eps0, clamped below at 1.

    The numerator only changes at range measures, and between changes the
    ratio decreases in eps0, so the max over {eps} + {P(R) >= eps} is the
    supremum.
    """
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    measures, prefix = _sorted_measure_prefixes(space)
    candidates = {eps}
    candidates.update(m for m in measures if eps <= m <= 1)
    best = Fraction(0)
    for eps0 in candidates:
        j = bisect_right(measures, eps0)
        ratio = Fraction(prefix[j], space.total_weight) / eps0
        if ratio > best:
            best = ratio
    return max(best, Fraction(1))


def capacity_levels(eps: Fraction) -> tuple[int, list[Fraction]]:
    """Dyadic scales: z = 1 + ceil(log2(1/eps)) and eps_i = min(2^i eps, 1)
    for i = 0..z."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    z = 1 + ceil_log2(1 / eps)
    levels = [min(Fraction(2) ** i * eps, Fraction(1)) for i in range(z + 1)]
    return z, levels


def capacity_vector(space: RangeSpace, eps: Fraction) -> list[Fraction]:
    """tau_i = capacity at scale min(2^i eps, 1) for i = 1..z."""
    z, levels = capacity_levels(eps)
    return [alexander_capacity(space, levels[i]) for i in range(1, z + 1)]


# -- doubling ---------------------------------------------------------------


@dataclass(frozen=True)
class DoublingResult:
    mode: str  # "exact" or "bracket"
    lower: int
    upper: float
    eps0: Fraction | None = None
    members: tuple[int, ...] = ()

    @property
    def value(self) -> int:
        if self.mode != "exact":
            raise ValueError("no single exact value in bracket mode")
        return self.lower


def _far_adjacency(space: RangeSpace, eligible: list[int], eps0: Fraction):
    """Adjacency bitmasks of the graph with edges where rho >= eps0."""
    k = len(eligible)
    adj = [0] * k
    num, den = eps0.numerator, eps0.denominator
    w = space.total_weight
    masks = [space.ranges[i] for i in eligible]
    for a in range(k):
        for b in range(a + 1, k):
            if space.mask_weight(masks[a] ^ masks[b]) * den >= num * w:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
    return adj


def doubling_constant(
    space: RangeSpace,
    eps: Fraction,
    mode: str = "auto",
    d: int | None = None,
    range_cap: int = DEFAULT_DOUBLING_RANGE_CAP,
    seed: int = 0,
) -> DoublingResult:
    """Largest packing at scale eps0 inside the family of measure <= 2*eps0,
    maximized over eps0 in [eps, 1].

    Exact mode evaluates a max clique of the far graph at every breakpoint
    (half-measures and pairwise distances); between breakpoints eligibility
    is constant and separation only loses pairs, so breakpoints suffice.
    Bracket mode returns a greedy lower bound at dyadic scales plus the
    capacity ceiling min(|R|, (48e*tau)^d).
    """
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    m = len(space.ranges)
    if m == 0:
        return DoublingResult("exact", 0, 0.0, None, ())
    if mode == "auto":
        mode = "exact" if m <= range_cap else "bracket"
    if mode == "exact" and m > range_cap:
        raise CapExceededError(
            f"exact doubling capped at {range_cap} ranges, instance has {m}"
        )

    measures = sorted((space.measure(i), i) for i in range(m))
    sorted_meas = [q for q, _ in measures]
    sorted_idx = [i for _, i in measures]

    def eligible_at(eps0: Fraction) -> list[int]:
        j = bisect_right(sorted_meas, 2 * eps0)
        return sorted_idx[:j]

    if mode == "exact":
        candidates = {eps}
        for q in sorted_meas:
            h = q / 2
            if eps <= h <= 1:
                candidates.add(h)
        w = space.total_weight
        for a in range(m):
            ra = space.ranges[a]
            for b in range(a + 1, m):
                q = Fraction(space.mask_weight(ra ^ space.ranges[b]), w)
                if eps <= q <= 1:
                    candidates.add(q)
        best, best_eps0, best_members = 0, None, ()
        for eps0 in sorted(candidates):
            elig = eligible_at(eps0)
            if len(elig) <= best:
                continue
            adj = _far_adjacency(space, elig, eps0)
            size, members = max_clique(adj, lower_bound=best)
            if size > best:
                best = size
                best_eps0 = eps0
                best_members = tuple(sorted(elig[v] for v in members))
        return DoublingResult("exact", best, float(best), best_eps0, best_members)

    if mode != "bracket":
        raise ValueError(f"unknown doubling mode: {mode}")

    # Greedy far packings at dyadic scales give the certified lower bound.
    z, levels = capacity_levels(eps)
    rng = stream_rng(seed, "doubling-bracket")
    lower, lower_eps0, lower_members = 0, None, ()
    for eps0 in levels:
        elig = eligible_at(eps0)
        order = list(range(len(elig)))
        rng.shuffle(order)
        chosen: list[int] = []
        num, den = eps0.numerator, eps0.denominator
        w = space.total_weight
        for v in order:
            rv = space.ranges[elig[v]]
            if all(
                space.mask_weight(rv ^ space.ranges[elig[u]]) * den >= num * w
                for u in chosen
            ):
                chosen.append(v)
        if len(chosen) > lower:
            lower = len(chosen)
            lower_eps0 = eps0
            lower_members = tuple(sorted(elig[v] for v in chosen))
    upper = float(m)
    if d is None:
        try:
            d_res = vc_dimension(space)
            d = d_res.value
        except CapExceededError:
            d = None
    if d is not None and d >= 1:
        tau = alexander_capacity(space, eps)
        upper = min(upper, (DOUBLING_CAPACITY_C * float(tau)) ** d)
    return DoublingResult("bracket", lower, upper, lower_eps0, lower_members)


# -- shallow cells ----------------------------------------------------------


@dataclass(frozen=True)
class ShallowResult:
    value: int
    exact: bool


def shallow_cell(
    space: RangeSpace,
    y: int,
    l: int,
    cap: int = DEFAULT_ENUM_CAP,
    samples: int = 2000,
    seed: int = 0,
) -> ShallowResult:
    """Max over point sets Y with |Y| <= y of the number of distinct traces
    of size at most l. Trace size counts points, not weight; the empty
    trace has size 0. y beyond n is clamped to n.

    The max runs over |Y| <= y rather than exactly y so the result is
    monotone in y (padding a point set can destroy small traces, so the
    exact-size max is not monotone).
    """
    if y < 0 or l < 0:
        raise ValueError("shallow_cell needs y >= 0 and l >= 0")
    y = min(y, space.n)
    if not space.ranges:
        return ShallowResult(0, True)
    total = sum(math.comb(space.n, s) for s in range(y + 1))
    if total <= cap:
        best = 0
        for s in range(y + 1):
            for pts in combinations(range(space.n), s):
                ymask = mask_of(pts)
                traces = {r & ymask for r in space.ranges}
                count = sum(1 for t in traces if t.bit_count() <= l)
                best = max(best, count)
        return ShallowResult(best, True)
    rng = stream_rng(seed, "shallow", y, l)
    best = 0
    population = list(range(space.n))
    for _ in range(samples):
        s = rng.randint(0, y)
        ymask = mask_of(rng.sample(population, s))
        traces = {r & ymask for r in space.ranges}
        best = max(best, sum(1 for t in traces if t.bit_count() <= l))
    return ShallowResult(best, False)


# -- star number ------------------------------------------------------------


@dataclass(frozen=True)
class StarResult:
    lower: int
    upper: int
    exact: bool
    witness: tuple[int, ...] = ()


def star_number(
    space: RangeSpace,
    cap: int = DEFAULT_STAR_CAP,
    budget: int = 500,
    seed: int = 0,
) -> StarResult:
    """Largest s admitting points x_1..x_s and ranges R_1..R_s with
    R_i meeting {x_1..x_s} exactly in {x_i}.

    Feasibility only shrinks as points are added, so depth-first search
    with remaining-count pruning is exact under the cap; beyond it a
    seeded greedy gives a flagged lower bound with trivial upper n.
    """
    n = space.n
    if not space.ranges:
        return StarResult(0, 0, True, ())
    # point_ranges[x]: bitmask over range indices containing x
    point_ranges = [0] * n
    for ri, r in enumerate(space.ranges):
        for x in iter_bits(r):
            point_ranges[x] |= 1 << ri

    def try_add(chosen: list[int], wits: list[int], x: int):
        """Witnesses after adding x, or None if infeasible."""
        px = point_ranges[x]
        new_wits = []
        for xi, wit in zip(chosen, wits):
            wit &= ~px
            if not wit:
                return None
            new_wits.append(wit)
        mine = px
        for xi in chosen:
            mine &= ~point_ranges[xi]
        if not mine:
            return None
        new_wits.append(mine)
        return new_wits

    if n <= cap:
        best = 0
        best_set: tuple[int, ...] = ()

        def rec(start: int, chosen: list[int], wits: list[int]) -> None:
            nonlocal best, best_set
            if len(chosen) > best:
                best = len(chosen)
                best_set = tuple(chosen)
            for x in range(start, n):
                if len(chosen) + (n - x) <= best:
                    break
                nw = try_add(chosen, wits, x)
                if nw is not None:
                    chosen.append(x)
                    rec(x + 1, chosen, nw)
                    chosen.pop()

        rec(0, [], [])
        return StarResult(best, best, True, best_set)

    rng = stream_rng(seed, "star")
    best = 0
    best_set = ()
    for _ in range(max(budget, 1)):
        order = list(range(n))
        rng.shuffle(order)
        chosen: list[int] = []
        wits: list[int] = []
        for x in order:
            nw = try_add(chosen, wits, x)
            if nw is not None:
                chosen.append(x)
                wits = nw
        if len(chosen) > best:
            best = len(chosen)
            best_set = tuple(sorted(chosen))
    return StarResult(best, n, False, best_set)


# -- profile ----------------------------------------------------------------


@dataclass(frozen=True)
class ComplexityProfile:
    name: str
    eps: Fraction
    d: VCResult
    tau: Fraction
    tau_vector: tuple[Fraction, ...]
    z: int
    doubling: DoublingResult
    pi: tuple[tuple[int, int, bool], ...]  # (y, value, exact)
    phi: tuple[tuple[int, int, int, bool], ...]  # (y, l, value, exact)
    star: StarResult

    def to_dict(self) -> dict:
        from .core import format_rational as fr

        return {
            "name": self.name,
            "eps": fr(self.eps),
            "vc": {"value": self.d.value, "exact": self.d.exact,
                   "witness": list(self.d.witness)},
            "tau": fr(self.tau),
            "tau_vector": [fr(t) for t in self.tau_vector],
            "z": self.z,
            "doubling": {
                "mode": self.doubling.mode,
                "lower": self.doubling.lower,
                "upper": round(self.doubling.upper, 6),
                "eps0": fr(self.doubling.eps0) if self.doubling.eps0 is not None else None,
            },
            "pi": [{"y": y, "value": v, "exact": e} for y, v, e in self.pi],
            "phi": [{"y": y, "l": l, "value": v, "exact": e}
                    for y, l, v, e in self.phi],
            "star": {"lower": self.star.lower, "upper": self.star.upper,
                     "exact": self.star.exact},
        }


def compute_profile(
    space: RangeSpace,
    eps: Fraction,
    pi_max_y: int = 8,
    vc_cap: int = DEFAULT_VC_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
    doubling_range_cap: int = DEFAULT_DOUBLING_RANGE_CAP,
    star_cap: int = DEFAULT_STAR_CAP,
    seed: int = 0,
) -> ComplexityProfile:
    """One-stop profile at scale eps, exact where caps permit."""
    eps = Fraction(eps)
    try:
        d = vc_dimension(space, cap=vc_cap)
    except CapExceededError:
        d = vc_dimension(space, mode="lower_bound", seed=seed)
    tau = alexander_capacity(space, eps)
    tau_vec = tuple(capacity_vector(space, eps))
    z, _ = capacity_levels(eps)
    doubling = doubling_constant(
        space, eps, mode="auto", d=d.value if d.exact else None,
        range_cap=doubling_range_cap, seed=seed,
    )
    pi_rows = []
    for y in range(0, min(space.n, pi_max_y) + 1):
        r = projection_function(space, y, cap=enum_cap, seed=seed)
        pi_rows.append((y, r.value, r.exact))
    phi_rows = []
    if d.value >= 1 and d.exact:
        y_phi = min(math.ceil(8 * d.value * tau), space.n)
        l_phi = min(24 * d.value, space.n)
        r = shallow_cell(space, y_phi, l_phi, cap=enum_cap, seed=seed)
        phi_rows.append((y_phi, l_phi, r.value, r.exact))
    star = star_number(space, cap=star_cap, seed=seed)
    return ComplexityProfile(
        name=space.name, eps=eps, d=d, tau=tau, tau_vector=tau_vec, z=z,
        doubling=doubling, pi=tuple(pi_rows), phi=tuple(phi_rows), star=star,
    )
