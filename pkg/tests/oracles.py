"""Independent oracles used by the tests.

These deliberately avoid the package's engine: they use only the public
scalar arithmetic, different pivoting rules, and brute-force search, so
that agreement with the library is evidence rather than tautology.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations

from novibar import NovikovScalar, invert_unit
from novibar.scalars import INFINITY


def _divide_field(x: NovikovScalar, pivot: NovikovScalar, precision) -> NovikovScalar:
    """x / pivot in the field, at the given working precision."""
    v = pivot.valuation()
    unit = pivot.shift(-v)
    if unit == NovikovScalar.one():
        return x.shift(-v)
    return (x * invert_unit(unit, precision=precision)).shift(-v)


def field_rank(rows: list, precision) -> int:
    """Rank over the Novikov field by first-nonzero-pivot elimination."""
    work = [[x.truncate(precision) for x in row] for row in rows]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    rank = 0
    used = set()
    for j in range(ncols):
        pivot_row = None
        for i in range(nrows):
            if i not in used and not work[i][j].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        used.add(pivot_row)
        rank += 1
        pivot = work[pivot_row][j]
        for i in range(nrows):
            if i == pivot_row or work[i][j].is_zero():
                continue
            factor = _divide_field(work[i][j], pivot, precision)
            for c in range(ncols):
                if not work[pivot_row][c].is_zero():
                    work[i][c] = (
                        work[i][c] + factor * work[pivot_row][c]
                    ).truncate(precision)
    return rank


def in_column_span(columns: list, vector: list, precision) -> bool:
    """Whether `vector` lies in the span of `columns` at the precision.

    Solved by eliminating the augmented matrix; membership holds exactly
    when the residual vanishes below the precision band.
    """
    if not columns:
        return all(x.truncate(precision).is_zero() for x in vector)
    n = len(vector)
    work = [
        [col[i].truncate(precision) for col in columns]
        + [vector[i].truncate(precision)]
        for i in range(n)
    ]
    ncols = len(columns)
    used_rows = set()
    for j in range(ncols):
        pivot_row = None
        best = None
        for i in range(n):
            if i in used_rows or work[i][j].is_zero():
                continue
            v = work[i][j].valuation()
            if best is None or v < best:
                best, pivot_row = v, i
        if pivot_row is None:
            continue
        used_rows.add(pivot_row)
        pivot = work[pivot_row][j]
        for i in range(n):
            if i == pivot_row or work[i][j].is_zero():
                continue
            factor = _divide_field(work[i][j], pivot, precision)
            for c in range(j, ncols + 1):
                if not work[pivot_row][c].is_zero():
                    work[i][c] = (
                        work[i][c] + factor * work[pivot_row][c]
                    ).truncate(precision)
    for i in range(n):
        if i not in used_rows and not work[i][ncols].is_zero():
            return False
    return True


def snf_all_min_pivot_orders(rows: list, precision, limit: int = 400) -> set:
    """All diagonal valuation multisets reachable by min-valuation pivots.

    Explores every choice of minimal-valuation pivot position (up to a
    node budget); a correct reduction yields a single multiset, so the
    returned set should be a singleton.
    """
    counter = [0]

    def recurse(matrix) -> set:
        counter[0] += 1
        if counter[0] > limit:
            return set()
        nrows = len(matrix)
        ncols = len(matrix[0]) if nrows else 0
        entries = [
            (matrix[i][j].valuation(), i, j)
            for i in range(nrows)
            for j in range(ncols)
            if not matrix[i][j].is_zero()
        ]
        if not entries:
            return {()}
        best = min(v for v, _, _ in entries)
        outcomes = set()
        for v, pi, pj in entries:
            if v != best:
                continue
            pivot = matrix[pi][pj]
            sub = [
                [matrix[ri][cj] for cj in range(ncols) if cj != pj]
                for ri in range(nrows)
                if ri != pi
            ]
            for ri in range(nrows):
                if ri == pi or matrix[ri][pj].is_zero():
                    continue
                factor = _divide_field(matrix[ri][pj], pivot, precision)
                target = ri if ri < pi else ri - 1
                for cj in range(ncols):
                    if cj == pj or matrix[pi][cj].is_zero():
                        continue
                    col = cj if cj < pj else cj - 1
                    sub[target][col] = (
                        sub[target][col] + factor * matrix[pi][cj]
                    ).truncate(precision)
            for tail in recurse(sub):
                outcomes.add(tuple(sorted((v,) + tail)))
        return outcomes

    return recurse(rows)


def grid_shift_bottleneck(barcode1, barcode2, step: Fraction, radius: Fraction):
    """Dense-grid reference for the shift-quotient distance."""
    from novibar.suites import exhaustive_bottleneck

    best = None
    c = -radius
    while c <= radius:
        value = exhaustive_bottleneck(barcode1, barcode2.shift(c))
        if best is None or value < best:
            best = value
        c += step
    return best


def exhaustive_shift_bottleneck(barcode1, barcode2):
    """Shift-quotient distance over the midpoint candidate set, with
    exhaustive matchings for each candidate (no bipartite machinery)."""
    from novibar.suites import exhaustive_bottleneck
    from novibar.persistence import _expand

    def endpoints(code):
        finite, infinite = _expand(code)
        out = [b for b, _ in finite] + [d for _, d in finite] + list(infinite)
        return out

    e1, e2 = endpoints(barcode1), endpoints(barcode2)
    if not e1 or not e2:
        return exhaustive_bottleneck(barcode1, barcode2)
    diffs = sorted({a - b for a in e1 for b in e2})
    candidates = set(diffs)
    for x, y in combinations(diffs, 2):
        candidates.add((x + y) / 2)
    candidates.add(Fraction(0))
    best = None
    for c in sorted(candidates):
        value = exhaustive_bottleneck(barcode1, barcode2.shift(c))
        if best is None or value < best:
            best = value
    return best
