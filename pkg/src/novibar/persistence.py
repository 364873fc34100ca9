"""Barcode metrics and periodic endpoint combinatorics.

The bottleneck distance is computed exactly: the optimum is one of
finitely many candidate values (pairwise endpoint deviations and half
lengths), and feasibility of a candidate is a bipartite matching test
in which bars of length at most twice the candidate may be deleted.
The shift-quotient variant minimizes over finitely many candidate
shifts (endpoint differences and their midpoints), which suffices
because the cost is a minimum of convex piecewise-linear functions of
the shift with unit slopes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .complexes import Bar, Barcode
from .errors import AssertionFailure, ValidationError
from .scalars import INFINITY, Exponent, as_exponent


def _expand(barcode: Barcode):
    finite = []
    infinite = []
    for bar in barcode:
        for _ in range(bar.multiplicity):
            if bar.finite:
                finite.append((bar.birth, bar.birth + bar.length))
            else:
                infinite.append(bar.birth)
    finite.sort()
    infinite.sort()
    return finite, infinite


@dataclass(frozen=True)
class Matching:
    """Witness for a delta-matching between two barcodes.

    `pairs` lists matched (left, right) indices into the expanded bar
    lists; every unmatched bar has length at most twice delta, and
    infinite bars are always matched (in birth order).
    """

    delta: Exponent
    left: tuple[tuple[Fraction, Exponent], ...]
    right: tuple[tuple[Fraction, Exponent], ...]
    pairs: tuple[tuple[int, int], ...]
    unmatched_left: tuple[int, ...]
    unmatched_right: tuple[int, ...]

    def to_dict(self) -> dict:
        def fmt(x):
            return "inf" if x == INFINITY else str(x)

        return {
            "delta": fmt(self.delta),
            "left": [[str(b), fmt(d)] for b, d in self.left],
            "right": [[str(b), fmt(d)] for b, d in self.right],
            "pairs": [list(p) for p in self.pairs],
            "unmatched_left": list(self.unmatched_left),
            "unmatched_right": list(self.unmatched_right),
        }

    def verify(self) -> bool:
        """Re-check the matching conditions against its own delta."""
        if self.delta == INFINITY:
            return True
        used_l = {i for i, _ in self.pairs}
        used_r = {j for _, j in self.pairs}
        for i, j in self.pairs:
            b1, d1 = self.left[i]
            b2, d2 = self.right[j]
            if (d1 == INFINITY) != (d2 == INFINITY):
                return False
            if abs(b1 - b2) > self.delta:
                return False
            if d1 != INFINITY and abs(d1 - d2) > self.delta:
                return False
        for i, (b, d) in enumerate(self.left):
            if i not in used_l and (d == INFINITY or d - b > 2 * self.delta):
                return False
        for j, (b, d) in enumerate(self.right):
            if j not in used_r and (d == INFINITY or d - b > 2 * self.delta):
                return False
        return True


def _max_matching(adj: Sequence[Sequence[int]], n_right: int):
    """Kuhn's augmenting-path maximum bipartite matching."""
    match_right = [-1] * n_right
    match_left = [-1] * len(adj)

    def try_augment(u: int, seen: list) -> bool:
        for v in adj[u]:
            if seen[v]:
                continue
            seen[v] = True
            if match_right[v] == -1 or try_augment(match_right[v], seen):
                match_right[v] = u
                match_left[u] = v
                return True
        return False

    size = 0
    for u in range(len(adj)):
        if try_augment(u, [False] * n_right):
            size += 1
    return size, match_left


def _feasible(finite1, finite2, delta: Fraction):
    """Delta-matching feasibility on the finite bars, with a witness.

    Left nodes are the bars of the first barcode followed by proxies for
    the second barcode's bars; right nodes are the second barcode's
    bars followed by proxies for the first's.  A bar may pair with its
    proxy only if its length is at most 2*delta; proxies pair freely
    with each other.
    """
    p, q = len(finite1), len(finite2)
    adj = []
    for i, (b1, d1) in enumerate(finite1):
        edges = [
            j
            for j, (b2, d2) in enumerate(finite2)
            if abs(b1 - b2) <= delta and abs(d1 - d2) <= delta
        ]
        if d1 - b1 <= 2 * delta:
            edges.append(q + i)
        adj.append(edges)
    for j, (b2, d2) in enumerate(finite2):
        edges = list(range(q, q + p))
        if d2 - b2 <= 2 * delta:
            edges.insert(0, j)
        adj.append(edges)
    size, match_left = _max_matching(adj, p + q)
    if size < p + q:
        return None
    pairs = [(i, match_left[i]) for i in range(p) if match_left[i] < q]
    return pairs


def bottleneck(
    barcode1: Barcode, barcode2: Barcode
) -> tuple[Exponent, Matching]:
    """Least delta admitting a delta-matching, with a witness matching."""
    finite1, inf1 = _expand(barcode1)
    finite2, inf2 = _expand(barcode2)
    left = tuple(finite1) + tuple((b, INFINITY) for b in inf1)
    right = tuple(finite2) + tuple((b, INFINITY) for b in inf2)
    if len(inf1) != len(inf2):
        return INFINITY, Matching(
            INFINITY,
            left,
            right,
            (),
            tuple(range(len(left))),
            tuple(range(len(right))),
        )
    delta_floor = Fraction(0)
    inf_pairs = []
    for k, (b1, b2) in enumerate(zip(inf1, inf2)):
        delta_floor = max(delta_floor, abs(b1 - b2))
        inf_pairs.append((len(finite1) + k, len(finite2) + k))
    candidates = {delta_floor}
    for b, d in finite1:
        candidates.add((d - b) / 2)
    for b, d in finite2:
        candidates.add((d - b) / 2)
    for b1, d1 in finite1:
        for b2, d2 in finite2:
            candidates.add(max(abs(b1 - b2), abs(d1 - d2)))
    ordered = sorted(c for c in candidates if c >= delta_floor)
    lo, hi = 0, len(ordered) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        witness = _feasible(finite1, finite2, ordered[mid])
        if witness is not None:
            best = (ordered[mid], witness)
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        raise AssertionFailure("no feasible candidate delta; candidate set is wrong")
    delta, pairs = best
    pairs = list(pairs) + inf_pairs
    used_l = {i for i, _ in pairs}
    used_r = {j for _, j in pairs}
    matching = Matching(
        delta,
        left,
        right,
        tuple(sorted(pairs)),
        tuple(i for i in range(len(left)) if i not in used_l),
        tuple(j for j in range(len(right)) if j not in used_r),
    )
    return delta, matching


def _endpoints(bars) -> list[Fraction]:
    out = []
    for b, d in bars[0]:
        out.append(b)
        out.append(d)
    out.extend(bars[1])
    return out


def shift_bottleneck(
    barcode1: Barcode, barcode2: Barcode
) -> tuple[Exponent, Fraction]:
    """Infimum over shifts of the bottleneck distance, with the shift.

    The second barcode is shifted; the infimum is attained at one of the
    pairwise endpoint differences or a midpoint of two of them, and a
    1-Lipschitz bound in the shift prunes the scan.
    """
    e1 = _endpoints(_expand(barcode1))
    e2 = _endpoints(_expand(barcode2))
    diffs = sorted({a - b for a in e1 for b in e2})
    shifts = set(diffs)
    shifts.add(Fraction(0))
    for i in range(len(diffs)):
        for j in range(i + 1, len(diffs)):
            shifts.add((diffs[i] + diffs[j]) / 2)
    best: Exponent = INFINITY
    best_shift = Fraction(0)
    evaluated: list[tuple[Fraction, Exponent]] = []
    for c in sorted(shifts):
        bound = Fraction(0)
        prune = False
        for c0, v0 in evaluated:
            if v0 != INFINITY and v0 - abs(c - c0) >= best:
                prune = True
                break
        if prune:
            continue
        value, _ = bottleneck(barcode1, barcode2.shift(c))
        evaluated.append((c, value))
        if value < best:
            best, best_shift = value, c
            if best == 0:
                break
    return best, best_shift


def bottleneck_mod_shift(barcode1: Barcode, barcode2: Barcode) -> Exponent:
    return shift_bottleneck(barcode1, barcode2)[0]


def length_multiset(barcode: Barcode) -> Counter:
    """Bar lengths with multiplicity; invariant under shifts."""
    counts: Counter = Counter()
    for bar in barcode:
        counts[bar.length] += bar.multiplicity
    return counts


# ---------------------------------------------------------------------------
# Periodic barcodes and endpoint counting.


@dataclass(frozen=True)
class PeriodicBarcode:
    """A fundamental window of an action-periodic family of barcodes.

    Index k runs over [0, period_index); going up one full period of
    indices shifts the bars up by the period action, which equals
    kappa * period_index.
    """

    window: tuple[Barcode, ...]
    kappa: Fraction

    def __post_init__(self) -> None:
        if self.kappa <= 0:
            raise ValidationError("kappa must be positive")
        if not self.window:
            raise ValidationError("window must contain at least one barcode")

    @property
    def period_index(self) -> int:
        return len(self.window)

    @property
    def period_action(self) -> Fraction:
        return self.kappa * self.period_index

    def assembled(self) -> Barcode:
        """Union of the window barcodes, index k shifted up by k*kappa."""
        bars = []
        for k, code in enumerate(self.window):
            for bar in code.shift(k * self.kappa):
                bars.append(bar)
        return Barcode.build(bars) if bars else Barcode(())


@dataclass(frozen=True)
class LsvCountReport:
    total_endpoints: int
    window_endpoints: int
    per_index: tuple[int, ...]

    def __str__(self) -> str:
        return (
            f"assembled endpoints={self.total_endpoints} "
            f"endpoints in one action period={self.window_endpoints}"
        )


def lsv_endpoint_count(periodic: PeriodicBarcode) -> tuple[int, int, LsvCountReport]:
    """Count endpoints of the assembled barcode and of the periodic
    family inside one action period, and assert they agree.

    Each endpoint orbit under the action period hits [0, period) exactly
    once, so the counts are equal; a discrepancy means a bug.
    """
    period = periodic.period_action
    total = periodic.assembled().endpoint_count()
    per_index = []
    window_count = 0
    for code in periodic.window:
        count_k = 0
        for bar in code:
            endpoints = [bar.birth]
            if bar.finite:
                endpoints.append(bar.birth + bar.length)
            for e in endpoints:
                hits = 0
                j = (0 - e) // period - 1
                while e + j * period < period:
                    if 0 <= e + j * period < period:
                        hits += 1
                    j += 1
                count_k += hits * bar.multiplicity
        per_index.append(count_k)
        window_count += count_k
    report = LsvCountReport(total, window_count, tuple(per_index))
    if total != window_count:
        raise AssertionFailure(
            f"endpoint counts disagree: {total} vs {window_count}"
        )
    return total, window_count, report
