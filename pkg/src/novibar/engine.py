"""Internal fixed-denominator kernel for matrix reductions.

All matrix algorithms run over the quotient ring F_2[T^(1/D)] / (T^Pi):
exponents are scaled by a common denominator D to integers, and a series
becomes a pair (offset, bitmask) where bit b of the mask marks the term
T^((offset+b)/D).  Addition is a single XOR and multiplication a short
shift-XOR loop over Python bigints, which keeps the exact arithmetic
fast enough for the randomized acceptance sweeps.  Offsets may be
negative (orthonormalization of non-filtered maps); the truncation
cutoff is an absolute scaled exponent bound.

Everything here is private plumbing behind the public modules; results
are converted back to `NovikovScalar`/`Fraction` at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

from .errors import PrecisionExhausted
from .scalars import NovikovScalar

# A series is (offset, mask); the zero series is (0, 0), and a nonzero
# mask always has bit 0 set, so the offset is the valuation.
Series = tuple[int, int]

S_ZERO: Series = (0, 0)
S_ONE: Series = (0, 1)


class Scaler:
    """Exact conversion between Fractions and scaled integer exponents."""

    def __init__(self, denominator: int):
        if denominator < 1:
            raise ValueError("denominator must be positive")
        self.denominator = denominator

    @staticmethod
    def for_fractions(values: Iterable[Fraction]) -> "Scaler":
        d = 1
        for v in values:
            d = lcm(d, v.denominator)
        return Scaler(d)

    def scale(self, value: Fraction) -> int:
        num = value * self.denominator
        if num.denominator != 1:
            raise ValueError(f"{value} not representable at denominator {self.denominator}")
        return num.numerator

    def unscale(self, value: int) -> Fraction:
        return Fraction(value, self.denominator)


def norm(off: int, mask: int, cut: int) -> Series:
    if mask == 0:
        return S_ZERO
    tz = (mask & -mask).bit_length() - 1
    if tz:
        mask >>= tz
        off += tz
    if off >= cut:
        return S_ZERO
    mask &= (1 << (cut - off)) - 1
    if mask == 0:
        return S_ZERO
    return (off, mask)


def s_is_zero(a: Series) -> bool:
    return a[1] == 0


def s_val(a: Series) -> Optional[int]:
    """Scaled valuation, or None for a (truncated) zero."""
    return a[0] if a[1] else None


def s_add(a: Series, b: Series, cut: int) -> Series:
    offa, ma = a
    offb, mb = b
    if ma == 0:
        return b
    if mb == 0:
        return a
    if offa <= offb:
        return norm(offa, ma ^ (mb << (offb - offa)), cut)
    return norm(offb, mb ^ (ma << (offa - offb)), cut)


def _polymul(p: int, q: int) -> int:
    if p.bit_count() > q.bit_count():
        p, q = q, p
    acc = 0
    while p:
        lsb = p & -p
        acc ^= q << (lsb.bit_length() - 1)
        p ^= lsb
    return acc


def s_mul(a: Series, b: Series, cut: int) -> Series:
    if a[1] == 0 or b[1] == 0:
        return S_ZERO
    return norm(a[0] + b[0], _polymul(a[1], b[1]), cut)


def s_shift(a: Series, shift: int, cut: int) -> Series:
    if a[1] == 0:
        return S_ZERO
    return norm(a[0] + shift, a[1], cut)


def s_inv_unit(a: Series, cut: int) -> Series:
    """Inverse of a valuation-zero series in F_2[t]/(t^cut)."""
    off, mask = a
    if mask == 0 or off != 0:
        raise ValueError("series is not a unit")
    width = (1 << cut) - 1
    u = (mask ^ 1) & width
    y = 1
    e = u
    while e:
        y = (y ^ _polymul(y, e)) & width
        e = _polymul(e, e) & width
    return (0, y)


def s_div(a: Series, pivot: Series, cut: int) -> Series:
    """a / pivot in the quotient ring; exact when the unit part is 1."""
    if a[1] == 0:
        return S_ZERO
    offp, mp = pivot
    if mp == 0:
        raise ZeroDivisionError("zero pivot")
    if mp == 1:
        return norm(a[0] - offp, a[1], cut)
    inv = s_inv_unit((0, mp), cut)
    return norm(a[0] - offp, _polymul(a[1], inv[1]), cut)


def series_from_scalar(x: NovikovScalar, scaler: Scaler, cut: int) -> Series:
    if not x.terms:
        return S_ZERO
    scaled = sorted(scaler.scale(e) for e in x.terms)
    off = scaled[0]
    mask = 0
    for e in scaled:
        mask |= 1 << (e - off)
    return norm(off, mask, cut)


def scalar_from_series(a: Series, scaler: Scaler, precision) -> NovikovScalar:
    off, mask = a
    terms = []
    while mask:
        lsb = mask & -mask
        terms.append(scaler.unscale(off + lsb.bit_length() - 1))
        mask ^= lsb
    return NovikovScalar(frozenset(terms), precision)


# ---------------------------------------------------------------------------
# Matrices: list of rows, each a list of Series.

Matrix = list


def m_zero(nrows: int, ncols: int) -> Matrix:
    return [[S_ZERO] * ncols for _ in range(nrows)]


def m_identity(n: int) -> Matrix:
    rows = m_zero(n, n)
    for i in range(n):
        rows[i][i] = S_ONE
    return rows


def m_mul(a: Matrix, b: Matrix, cut: int) -> Matrix:
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    out = m_zero(n, m)
    for i in range(n):
        arow = a[i]
        orow = out[i]
        for t in range(k):
            s = arow[t]
            if s[1] == 0:
                continue
            brow = b[t]
            for j in range(m):
                e = brow[j]
                if e[1]:
                    orow[j] = s_add(orow[j], s_mul(s, e, cut), cut)
    return out


def m_apply(a: Matrix, vec: Sequence[Series], cut: int) -> list:
    out = [S_ZERO] * len(a)
    for i, row in enumerate(a):
        acc = S_ZERO
        for j, s in enumerate(row):
            if s[1] and vec[j][1]:
                acc = s_add(acc, s_mul(s, vec[j], cut), cut)
        out[i] = acc
    return out


def on_matrix(
    entries: Sequence[Sequence[NovikovScalar]],
    filt_source: Sequence[Fraction],
    filt_target: Sequence[Fraction],
    scaler: Scaler,
    cut: int,
) -> Matrix:
    """Orthonormalized matrix: entry (i,j) shifted by A(source_j) - A(target_i)."""
    out = []
    tgt = [scaler.scale(a) for a in filt_target]
    src = [scaler.scale(a) for a in filt_source]
    for i, row in enumerate(entries):
        new_row = []
        for j, x in enumerate(row):
            s = series_from_scalar(x, scaler, cut)
            new_row.append(s_shift(s, src[j] - tgt[i], cut) if s[1] else S_ZERO)
        out.append(new_row)
    return out


def matrix_min_valuation(m: Matrix) -> Optional[int]:
    """Min entry valuation; None when every entry is zero at this cut."""
    best: Optional[int] = None
    for row in m:
        for s in row:
            if s[1] and (best is None or s[0] < best):
                best = s[0]
    return best


# ---------------------------------------------------------------------------
# Smith normal form over the scaled valuation ring.


def _find_pivot(rows: Matrix, start: int, nrows: int, ncols: int):
    best = None
    for i in range(start, nrows):
        row = rows[i]
        for j in range(start, ncols):
            s = row[j]
            if s[1] and (best is None or s[0] < best[0]):
                best = (s[0], i, j)
    return best


def snf_valuations(matrix: Matrix, cut: int) -> list:
    """Diagonal valuations (non-decreasing) of the Smith normal form.

    Entries of minimal valuation are pivoted first, lexicographically
    smallest (row, column) on ties, which is also what makes the output
    come out sorted.  Only nonzero pivots are reported; the rank is the
    length of the result.
    """
    rows = [list(r) for r in matrix]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    vals = []
    k = 0
    limit = min(nrows, ncols)
    while k < limit:
        found = _find_pivot(rows, k, nrows, ncols)
        if found is None:
            break
        _, pi, pj = found
        if pi != k:
            rows[k], rows[pi] = rows[pi], rows[k]
        if pj != k:
            for r in rows:
                r[k], r[pj] = r[pj], r[k]
        pivot = rows[k][k]
        vals.append(pivot[0])
        # Clear the pivot column; fill-in lands in not-yet-finished columns.
        prow = rows[k]
        for r in range(k + 1, nrows):
            entry = rows[r][k]
            if entry[1] == 0:
                continue
            mu = s_div(entry, pivot, cut)
            row = rows[r]
            for c in range(k, ncols):
                if prow[c][1]:
                    row[c] = s_add(row[c], s_mul(mu, prow[c], cut), cut)
        # The pivot column is now singleton, so clearing the pivot row by
        # column operations touches no other row.
        for c in range(k + 1, ncols):
            prow[c] = S_ZERO
        k += 1
    return vals


@dataclass
class SnfTranscript:
    """U * original * V = diagonal, with all four transforms kept."""

    diagonal: Matrix
    u: Matrix
    u_inv: Matrix
    v: Matrix
    v_inv: Matrix
    pivot_count: int


def snf_transcript(matrix: Matrix, cut: int) -> SnfTranscript:
    rows = [list(r) for r in matrix]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    u, u_inv = m_identity(nrows), m_identity(nrows)
    v, v_inv = m_identity(ncols), m_identity(ncols)

    def row_op(dst: int, src: int, mu: Series) -> None:
        for c in range(ncols):
            if rows[src][c][1]:
                rows[dst][c] = s_add(rows[dst][c], s_mul(mu, rows[src][c], cut), cut)
        for c in range(nrows):
            if u[src][c][1]:
                u[dst][c] = s_add(u[dst][c], s_mul(mu, u[src][c], cut), cut)
        # (I + mu E_{dst,src}) is its own inverse in characteristic 2.
        for r in range(nrows):
            if u_inv[r][dst][1]:
                u_inv[r][src] = s_add(u_inv[r][src], s_mul(mu, u_inv[r][dst], cut), cut)

    def col_op(dst: int, src: int, mu: Series) -> None:
        for r in range(nrows):
            if rows[r][src][1]:
                rows[r][dst] = s_add(rows[r][dst], s_mul(mu, rows[r][src], cut), cut)
        for r in range(ncols):
            if v[r][src][1]:
                v[r][dst] = s_add(v[r][dst], s_mul(mu, v[r][src], cut), cut)
        for c in range(ncols):
            if v_inv[dst][c][1]:
                v_inv[src][c] = s_add(v_inv[src][c], s_mul(mu, v_inv[dst][c], cut), cut)

    def row_swap(a: int, b: int) -> None:
        rows[a], rows[b] = rows[b], rows[a]
        u[a], u[b] = u[b], u[a]
        for r in range(nrows):
            u_inv[r][a], u_inv[r][b] = u_inv[r][b], u_inv[r][a]

    def col_swap(a: int, b: int) -> None:
        for r in range(nrows):
            rows[r][a], rows[r][b] = rows[r][b], rows[r][a]
        for r in range(ncols):
            v[r][a], v[r][b] = v[r][b], v[r][a]
        v_inv[a], v_inv[b] = v_inv[b], v_inv[a]

    k = 0
    limit = min(nrows, ncols)
    while k < limit:
        found = _find_pivot(rows, k, nrows, ncols)
        if found is None:
            break
        _, pi, pj = found
        if pi != k:
            row_swap(k, pi)
        if pj != k:
            col_swap(k, pj)
        pivot = rows[k][k]
        for r in range(k + 1, nrows):
            if rows[r][k][1]:
                row_op(r, k, s_div(rows[r][k], pivot, cut))
        for c in range(k + 1, ncols):
            if rows[k][c][1]:
                col_op(c, k, s_div(rows[k][c], pivot, cut))
        k += 1
    return SnfTranscript(rows, u, u_inv, v, v_inv, k)


# ---------------------------------------------------------------------------
# Orthogonal reduction of a filtered complex (normal-form basis).


@dataclass
class ReducedPair:
    """One canceling pair: d(zeta) = T^beta * eta in orthonormal scale."""

    beta: int
    zeta_slot: int
    eta_slot: int
    zeta: list
    eta: list
    zeta_m: int = 0  # raw-lattice level of zeta; birth = zeta_m - beta


@dataclass
class Reduction:
    """Full orthogonal normal form of a filtered complex."""

    pairs: list = field(default_factory=list)
    xi_slots: list = field(default_factory=list)
    xi_levels: list = field(default_factory=list)  # raw-lattice level per xi
    basis: Matrix = None  # columns = normal-form basis vectors (ON coords)
    basis_inv: Matrix = None

    @property
    def homology_dim(self) -> int:
        return len(self.xi_slots)


def _vec_val(vec: Sequence[Series]) -> Optional[int]:
    best: Optional[int] = None
    for s in vec:
        if s[1] and (best is None or s[0] < best):
            best = s[0]
    return best


def _raw_level(vec: Sequence[Series], filt_scaled: Sequence[int]) -> int:
    """min_i (val(v_i) + A_i): the raw-lattice normalization level."""
    best = None
    for i, s in enumerate(vec):
        if s[1]:
            cand = s[0] + filt_scaled[i]
            if best is None or cand < best:
                best = cand
    if best is None:
        raise PrecisionExhausted("normal-form vector vanished below the cutoff")
    return best


def reduce_complex(on_diff: Matrix, filt_scaled: Sequence[int], cut: int) -> Reduction:
    """Orthogonal normal form of a differential given in orthonormal scale.

    Repeatedly pairs the basis vector with the smallest filtration drop
    against its (unit-rescaled) image, which replaces a basis slot where
    the image has a unit coordinate; remaining images are then corrected
    to have no component on the consumed slot.  Every replacement keeps
    the evolving basis matrix unimodular over the valuation ring, which
    is exactly orthonormality of the basis.
    """
    n = len(on_diff)
    cols = [[on_diff[i][k] for i in range(n)] for k in range(n)]  # images d(e_k)
    basis = [[S_ONE if i == k else S_ZERO for i in range(n)] for k in range(n)]
    basis_inv = m_identity(n)
    images = {k: cols[k] for k in range(n)}
    active = set(range(n))
    red = Reduction(basis=basis, basis_inv=basis_inv)

    while True:
        best = None
        for k in sorted(active):
            v = _vec_val(images[k])
            if v is not None and (best is None or v < best[0]):
                best = (v, k)
        if best is None:
            break
        beta, ystar = best
        z = images[ystar]
        ztilde = [s_shift(s, -beta, cut) if s[1] else S_ZERO for s in z]
        expansion = m_apply(basis_inv, ztilde, cut)
        istar = None
        for k in sorted(active):
            if k != ystar and expansion[k][1] and expansion[k][0] == 0:
                istar = k
                break
        if istar is None:
            raise PrecisionExhausted(
                "no certified unit coordinate for a normal-form replacement"
            )
        # Replace basis slot istar by ztilde: basis <- basis * E with
        # E's istar-th column equal to the expansion; E is unimodular
        # because the istar coordinate is a unit.  The inverse update is
        # the rank-one formula basis_inv <- E^{-1} * basis_inv.
        basis[istar] = ztilde
        pivot_inv = s_inv_unit((0, expansion[istar][1]), cut)
        old_row = basis_inv[istar]
        basis_inv[istar] = [
            s_mul(pivot_inv, x, cut) if x[1] else S_ZERO for x in old_row
        ]
        for a in range(n):
            if a == istar or not expansion[a][1]:
                continue
            factor = s_mul(expansion[a], pivot_inv, cut)
            row = basis_inv[a]
            for c in range(n):
                if old_row[c][1]:
                    row[c] = s_add(row[c], s_mul(factor, old_row[c], cut), cut)
        active.discard(ystar)
        active.discard(istar)
        # Correct the remaining images to have no component on the new slot.
        for k in sorted(active):
            w = images[k]
            coef = S_ZERO
            inv_row = basis_inv[istar]
            for i in range(n):
                if inv_row[i][1] and w[i][1]:
                    coef = s_add(coef, s_mul(inv_row[i], w[i], cut), cut)
            if coef[1] == 0:
                continue
            mu = s_shift(coef, -beta, cut)
            zeta_col = basis[ystar]
            for i in range(n):
                if zeta_col[i][1]:
                    basis[k][i] = s_add(basis[k][i], s_mul(mu, zeta_col[i], cut), cut)
                if z[i][1]:
                    w[i] = s_add(w[i], s_mul(mu, z[i], cut), cut)
            # Mirror the column operation on the inverse (self-inverse op).
            ystar_row = basis_inv[ystar]
            k_row = basis_inv[k]
            for c in range(n):
                if k_row[c][1]:
                    ystar_row[c] = s_add(ystar_row[c], s_mul(mu, k_row[c], cut), cut)
        pair = ReducedPair(
            beta=beta,
            zeta_slot=ystar,
            eta_slot=istar,
            zeta=basis[ystar],
            eta=ztilde,
            zeta_m=_raw_level(basis[ystar], filt_scaled),
        )
        red.pairs.append(pair)

    for k in sorted(active):
        red.xi_slots.append(k)
        red.xi_levels.append(_raw_level(basis[k], filt_scaled))
    return red
