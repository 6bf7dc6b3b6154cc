"""Finite weighted range spaces with exact rational measures.

Points are integers 0..n-1, subsets of the ground set are Python int
bitmasks, and all probabilities are fractions.Fraction values derived
from non-negative integer point weights. Nothing in this module ever
rounds: every measure comparison is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Iterator, Sequence

# Identifies the PRNG contract for everything downstream: CPython's
# random.Random (MT19937) seeded with a namespaced string per stream.
PRNG_ALGORITHM = "cpython-random-mt19937-strseed/v1"


class InstanceError(ValueError):
    """Malformed or degenerate range-space input."""


class CapExceededError(RuntimeError):
    """An exact oracle was asked to run beyond its configured size cap."""


class TheoremViolationError(RuntimeError):
    """A certified inequality failed; indicates a bug, not bad data."""


def mask_of(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def points_of(mask: int) -> tuple[int, ...]:
    return tuple(iter_bits(mask))


def parse_rational(text: str) -> Fraction:
    """Parse 'a/b' or a bare integer string into an exact Fraction."""
    try:
        q = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"not a rational: {text!r}") from exc
    return q


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def ceil_log2(q: Fraction) -> int:
    """Smallest integer k with 2**k >= q, computed exactly. Requires q > 0."""
    if q <= 0:
        raise ValueError("ceil_log2 needs a positive argument")
    num, den = q.numerator, q.denominator
    k = num.bit_length() - den.bit_length()
    # k is within 1 of the answer; fix up with exact comparisons.
    while (1 << max(k, 0)) * den >= num if k >= 0 else den >= num * (1 << -k):
        k -= 1
    k += 1
    while ((1 << k) * den < num if k >= 0 else den < num * (1 << -k)):
        k += 1
    return k


@dataclass(frozen=True)
class RangeSpace:
    """A finite range space: weighted points plus a family of subsets.

    ranges are canonical: deduplicated, no empty range, sorted by their
    point tuples. The measure of a range is weight(range)/total_weight.
    """

    n: int
    weights: tuple[int, ...]
    ranges: tuple[int, ...]
    name: str = ""
    total_weight: int = field(init=False, compare=False, default=0)
    support_mask: int = field(init=False, compare=False, default=0)
    range_weights: tuple[int, ...] = field(init=False, compare=False, default=())

    def __post_init__(self) -> None:
        w = sum(self.weights)
        object.__setattr__(self, "total_weight", w)
        sup = 0
        for i, wi in enumerate(self.weights):
            if wi > 0:
                sup |= 1 << i
        object.__setattr__(self, "support_mask", sup)
        uniform = all(wi == 1 for wi in self.weights)
        object.__setattr__(self, "_uniform", uniform)
        object.__setattr__(
            self, "range_weights", tuple(self.mask_weight(r) for r in self.ranges)
        )
        object.__setattr__(self, "_population", None)

    # -- measures ---------------------------------------------------------

    def mask_weight(self, mask: int) -> int:
        if self._uniform:  # type: ignore[attr-defined]
            return mask.bit_count()
        total = 0
        w = self.weights
        while mask:
            low = mask & -mask
            total += w[low.bit_length() - 1]
            mask ^= low
        return total

    def mask_measure(self, mask: int) -> Fraction:
        return Fraction(self.mask_weight(mask), self.total_weight)

    def measure(self, i: int) -> Fraction:
        """P(ranges[i])."""
        return Fraction(self.range_weights[i], self.total_weight)

    def rho_masks(self, a: int, b: int) -> Fraction:
        """Symmetric-difference pseudometric P(a XOR b) on subsets."""
        return self.mask_measure(a ^ b)

    def rho(self, i: int, j: int) -> Fraction:
        return self.rho_masks(self.ranges[i], self.ranges[j])

    # -- structure --------------------------------------------------------

    def project(self, y: int | Iterable[int]) -> list[int]:
        """Distinct traces {R & Y} of the family on Y, canonically ordered.

        The empty trace appears iff some range misses Y entirely.
        """
        ymask = y if isinstance(y, int) else mask_of(y)
        traces = {r & ymask for r in self.ranges}
        return sorted(traces, key=points_of)

    def conditional(self, a: int | Iterable[int]) -> "RangeSpace":
        """Restrict to A: weights zeroed outside A, ranges intersected.

        Raises InstanceError when P(A) = 0.
        """
        amask = a if isinstance(a, int) else mask_of(a)
        if self.mask_weight(amask) == 0:
            raise InstanceError("conditioning event has measure zero")
        new_weights = [
            wi if (amask >> i) & 1 else 0 for i, wi in enumerate(self.weights)
        ]
        new_ranges = [points_of(r & amask) for r in self.ranges if r & amask]
        return build_range_space(
            self.n, new_weights, new_ranges, name=f"{self.name}|cond"
        )

    def support_points(self) -> tuple[int, ...]:
        return points_of(self.support_mask)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "weights": list(self.weights),
            "ranges": [list(points_of(r)) for r in self.ranges],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @staticmethod
    def from_dict(data: dict) -> "RangeSpace":
        try:
            n = data["n"]
            weights = data["weights"]
            ranges = data["ranges"]
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"missing instance field: {exc}") from exc
        name = data.get("name", "")
        return build_range_space(n, weights, ranges, name=name)

    @staticmethod
    def loads(text: str) -> "RangeSpace":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"bad instance JSON: {exc}") from exc
        return RangeSpace.from_dict(data)


def build_range_space(
    n: int,
    weights: Sequence[int],
    ranges: Iterable[Iterable[int] | int],
    name: str = "",
) -> RangeSpace:
    """Validate and canonicalize an instance.

    Accepts ranges as point iterables or prebuilt masks, in any order and
    with duplicates; output ranges are deduplicated, empty ranges dropped,
    and the family sorted by point tuples.
    """
    if not isinstance(n, int) or n < 1:
        raise InstanceError(f"n must be a positive integer, got {n!r}")
    weights = tuple(int(w) for w in weights)
    if len(weights) != n:
        raise InstanceError(f"expected {n} weights, got {len(weights)}")
    if any(w < 0 for w in weights):
        raise InstanceError("weights must be non-negative")
    if sum(weights) < 1:
        raise InstanceError("total weight must be at least 1")
    full = (1 << n) - 1
    masks = set()
    for r in ranges:
        m = r if isinstance(r, int) else mask_of(r)
        if m < 0 or m & ~full:
            bad = points_of(m & ~full) if m >= 0 else m
            raise InstanceError(f"range contains out-of-range points: {bad}")
        if m:
            masks.add(m)
    canon = tuple(sorted(masks, key=points_of))
    return RangeSpace(n=n, weights=weights, ranges=canon, name=name)


def draw_points(space: RangeSpace, k: int, rng, within_mask: int | None = None) -> list[int]:
    """Draw k i.i.d. points from P, optionally conditioned on within_mask.

    Conditioning on a zero-measure mask is an error.
    """
    if within_mask is None:
        pop = getattr(space, "_population")
        if pop is None:
            pts = list(iter_bits(space.support_mask))
            cum = list(accumulate(space.weights[p] for p in pts))
            pop = (pts, cum)
            object.__setattr__(space, "_population", pop)
        pts, cum = pop
    else:
        pts = [p for p in iter_bits(space.support_mask & within_mask)]
        if not pts:
            raise InstanceError("sampling event has measure zero")
        cum = list(accumulate(space.weights[p] for p in pts))
    return rng.choices(pts, cum_weights=cum, k=k)


def stream_rng(seed: int, *stream: object):
    """Deterministic per-stream PRNG: one Random per (seed, stream labels)."""
    import random

    label = ":".join(str(s) for s in stream)
    return random.Random(f"{seed}:{label}")
