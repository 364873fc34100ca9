"""Filtered vector spaces over the Novikov field and filtered maps.

A `FilteredSpace` is a finite named basis, declared orthogonal, with one
rational filtration value per generator and an optional integer grading.
Filtrations of arbitrary coefficient vectors follow from orthogonality:
the value of a combination is the maximum of the termwise values.  Maps
are plain matrices of Novikov scalars in the declared bases; spectral
value decompositions diagonalize them against both filtrations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import engine
from .errors import ValidationError
from .scalars import INFINITY, NEG_INFINITY, Exponent, NovikovScalar, as_exponent

Vector = tuple[NovikovScalar, ...]


@dataclass(frozen=True)
class FilteredSpace:
    """Finite orthogonal basis with filtration values and optional grading."""

    generators: tuple[str, ...]
    filtration: tuple[Fraction, ...]
    degrees: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if len(self.generators) != len(set(self.generators)):
            raise ValidationError("duplicate generator names")
        if len(self.filtration) != len(self.generators):
            raise ValidationError("one filtration value per generator required")
        if self.degrees is not None and len(self.degrees) != len(self.generators):
            raise ValidationError("one degree per generator required")

    @staticmethod
    def build(
        generators: Sequence[str],
        filtration: Sequence[object],
        degrees: Optional[Sequence[int]] = None,
    ) -> "FilteredSpace":
        filt = tuple(Fraction(as_exponent(a)) for a in filtration)
        return FilteredSpace(
            tuple(generators), filt, None if degrees is None else tuple(degrees)
        )

    @property
    def dim(self) -> int:
        return len(self.generators)

    def index(self, name: str) -> int:
        return self.generators.index(name)

    @property
    def spread(self) -> Fraction:
        """Difference between the largest and smallest filtration value."""
        if not self.filtration:
            return Fraction(0)
        return max(self.filtration) - min(self.filtration)

    def filtration_of(self, vector: Sequence[NovikovScalar]) -> Exponent:
        """max_j (A(x_j) - v(coeff_j)); -inf exactly on the zero vector."""
        if len(vector) != self.dim:
            raise ValidationError("vector length does not match the basis")
        level: Exponent = NEG_INFINITY
        for a, coeff in zip(self.filtration, vector):
            if not coeff.is_zero():
                level = max(level, a - coeff.valuation())
        return level

    def orthonormalize(self) -> tuple["FilteredSpace", tuple[NovikovScalar, ...]]:
        """Diagonal rescaling x_j -> T^{A(x_j)} x_j onto filtration zero."""
        scales = tuple(NovikovScalar.monomial(a) for a in self.filtration)
        zero = FilteredSpace(
            self.generators, tuple(Fraction(0) for _ in self.filtration), self.degrees
        )
        return zero, scales


def zero_vector(space: FilteredSpace) -> Vector:
    return tuple(NovikovScalar.zero() for _ in range(space.dim))


@dataclass(frozen=True)
class FilteredMap:
    """A linear map in the declared bases; matrix[i][j] is the target-i
    coefficient of the image of source generator j."""

    source: FilteredSpace
    target: FilteredSpace
    matrix: tuple[tuple[NovikovScalar, ...], ...]

    def __post_init__(self) -> None:
        if len(self.matrix) != self.target.dim:
            raise ValidationError("matrix row count must equal target dimension")
        for row in self.matrix:
            if len(row) != self.source.dim:
                raise ValidationError("matrix column count must equal source dimension")

    @staticmethod
    def from_rows(
        source: FilteredSpace,
        target: FilteredSpace,
        rows: Sequence[Sequence[NovikovScalar]],
    ) -> "FilteredMap":
        return FilteredMap(source, target, tuple(tuple(r) for r in rows))

    @staticmethod
    def zero(source: FilteredSpace, target: FilteredSpace) -> "FilteredMap":
        z = NovikovScalar.zero()
        return FilteredMap(
            source, target, tuple(tuple(z for _ in range(source.dim)) for _ in range(target.dim))
        )

    @staticmethod
    def identity(space: FilteredSpace) -> "FilteredMap":
        z, o = NovikovScalar.zero(), NovikovScalar.one()
        return FilteredMap(
            space,
            space,
            tuple(
                tuple(o if i == j else z for j in range(space.dim))
                for i in range(space.dim)
            ),
        )

    def column(self, j: int) -> Vector:
        return tuple(self.matrix[i][j] for i in range(self.target.dim))

    def apply(self, vector: Sequence[NovikovScalar]) -> Vector:
        if len(vector) != self.source.dim:
            raise ValidationError("vector length does not match the source basis")
        out = []
        for i in range(self.target.dim):
            acc = NovikovScalar.zero()
            for j, coeff in enumerate(vector):
                if not coeff.is_zero() and not self.matrix[i][j].is_zero():
                    acc = acc + self.matrix[i][j] * coeff
            out.append(acc)
        return tuple(out)

    def compose(self, other: "FilteredMap") -> "FilteredMap":
        """self o other."""
        if other.target is not self.source and other.target != self.source:
            raise ValidationError("composition domain mismatch")
        rows = []
        for i in range(self.target.dim):
            row = []
            for j in range(other.source.dim):
                acc = NovikovScalar.zero()
                for k in range(self.source.dim):
                    a, b = self.matrix[i][k], other.matrix[k][j]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            rows.append(tuple(row))
        return FilteredMap(other.source, self.target, tuple(rows))

    def __add__(self, other: "FilteredMap") -> "FilteredMap":
        rows = tuple(
            tuple(a + b for a, b in zip(ra, rb))
            for ra, rb in zip(self.matrix, other.matrix)
        )
        return FilteredMap(self.source, self.target, rows)

    def scale(self, scalar: NovikovScalar) -> "FilteredMap":
        rows = tuple(tuple(scalar * x for x in row) for row in self.matrix)
        return FilteredMap(self.source, self.target, rows)

    def valuation(self) -> Exponent:
        """A(L) = inf_v (A(v) - A(Lv)); +inf for the zero map.

        On an orthogonal basis this is the least valuation appearing in
        the orthonormalized matrix.
        """
        best: Exponent = INFINITY
        for i in range(self.target.dim):
            for j in range(self.source.dim):
                x = self.matrix[i][j]
                if not x.is_zero():
                    shift = self.source.filtration[j] - self.target.filtration[i]
                    best = min(best, x.valuation() + shift)
        return best

    def is_filtered(self) -> bool:
        return self.valuation() >= 0


@dataclass(frozen=True)
class SpectralValueDecomposition:
    """Orthogonal bases diagonalizing a filtered map.

    Each coimage pair (v, w, beta) satisfies D(v) = T^beta * w up to the
    certified precision; kernel vectors map to zero and cokernel vectors
    span the complement of the image.  Spectral values are sorted.
    """

    coimage_pairs: tuple[tuple[Vector, Vector, Fraction], ...]
    kernel_basis: tuple[Vector, ...]
    cokernel_basis: tuple[Vector, ...]

    @property
    def spectral_values(self) -> tuple[Fraction, ...]:
        return tuple(sorted(beta for _, _, beta in self.coimage_pairs))

    @property
    def rank(self) -> int:
        return len(self.coimage_pairs)


def _map_scaler(d: FilteredMap, extra: Sequence[Fraction] = ()) -> engine.Scaler:
    fracs = list(d.source.filtration) + list(d.target.filtration) + list(extra)
    for row in d.matrix:
        for x in row:
            fracs.extend(x.terms)
    return engine.Scaler.for_fractions(fracs)


def default_map_precision(d: FilteredMap) -> Fraction:
    """Working bound: joint filtration spread plus one, with slack for
    the valuations already present in the entries."""
    filts = list(d.source.filtration) + list(d.target.filtration)
    spread = (max(filts) - min(filts)) if filts else Fraction(0)
    vals = [
        x.valuation()
        for row in d.matrix
        for x in row
        if not x.is_zero()
    ]
    lo = min((v for v in vals), default=Fraction(0))
    hi = max((v for v in vals), default=Fraction(0))
    return spread + max(hi, Fraction(0)) - min(lo, Fraction(0)) + 1


def uz_decompose(
    d: FilteredMap, precision: object | None = None
) -> SpectralValueDecomposition:
    """Spectral value decomposition via Smith normal form with transcript.

    The orthonormalized matrix is diagonalized over the valuation ring;
    the columns of V give the source basis, the columns of U^{-1} the
    target basis, and the diagonal valuations the spectral values.  The
    bases are converted back to the raw coordinates of the declared
    generators.
    """
    prec = Fraction(as_exponent(precision)) if precision is not None else default_map_precision(d)
    scaler = _map_scaler(d, [prec])
    margin = scaler.scale(d.source.spread + d.target.spread)
    cut = scaler.scale(prec) + margin
    on = engine.on_matrix(
        d.matrix, d.source.filtration, d.target.filtration, scaler, cut
    )
    tr = engine.snf_transcript(on, cut)

    band = scaler.unscale(cut)

    def source_vec(col: int) -> Vector:
        # V's column in orthonormal coordinates; raw coord j picks up T^{A_j}.
        return tuple(
            engine.scalar_from_series(tr.v[j][col], scaler, band).shift(
                d.source.filtration[j]
            )
            for j in range(d.source.dim)
        )

    def target_vec(row: int) -> Vector:
        return tuple(
            engine.scalar_from_series(tr.u_inv[i][row], scaler, band).shift(
                d.target.filtration[i]
            )
            for i in range(d.target.dim)
        )

    pairs = []
    for k in range(tr.pivot_count):
        beta = engine.s_val(tr.diagonal[k][k])
        pairs.append((source_vec(k), target_vec(k), scaler.unscale(beta)))
    kernel = tuple(source_vec(k) for k in range(tr.pivot_count, d.source.dim))
    cokernel = tuple(target_vec(k) for k in range(tr.pivot_count, d.target.dim))
    return SpectralValueDecomposition(tuple(pairs), kernel, cokernel)


def spectral_valuations(
    d: FilteredMap, precision: object | None = None
) -> tuple[list[Fraction], int]:
    """Sorted finite spectral values and the field rank, without bases."""
    prec = Fraction(as_exponent(precision)) if precision is not None else default_map_precision(d)
    scaler = _map_scaler(d, [prec])
    margin = scaler.scale(d.source.spread + d.target.spread)
    cut = scaler.scale(prec) + margin
    on = engine.on_matrix(
        d.matrix, d.source.filtration, d.target.filtration, scaler, cut
    )
    vals = engine.snf_valuations(on, cut)
    return [scaler.unscale(v) for v in vals], len(vals)
