"""Filtered chain complexes, validation, and bar-length spectra.

The barcode of a complex is read off an orthogonal normal form of the
differential: each canceling pair contributes a finite bar whose length
is the filtration drop across the pair, and each homology generator an
infinite bar.  Zero-length pairs are not bars; they are counted and
reported separately.  Births are pinned by normalizing each normal-form
vector to be a primitive combination of the declared generators, which
reproduces the declared filtration levels on untouched generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import engine
from .errors import NotChainMap, ValidationError
from .scalars import INFINITY, Exponent, NovikovScalar, as_exponent
from .spaces import FilteredMap, FilteredSpace, Vector


@dataclass(frozen=True)
class FilteredComplex:
    """A filtered space with a square-zero filtered differential."""

    space: FilteredSpace
    differential: FilteredMap

    def __post_init__(self) -> None:
        if self.differential.source != self.space or self.differential.target != self.space:
            raise ValidationError("differential must be an endomorphism of the space")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def graded(self) -> bool:
        return self.space.degrees is not None

    def default_precision(self, sigma: Fraction = Fraction(0)) -> Fraction:
        return self.space.spread + sigma + 1


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]
    strictness_flags: tuple[str, ...]
    null_pairs: Optional[int]

    def __str__(self) -> str:
        lines = [f"valid={str(self.ok).lower()}"]
        for v in self.violations:
            lines.append(f"violation kind={v.kind} witness={v.witness} {v.detail}")
        for name in self.strictness_flags:
            lines.append(f"non-strict filtration drop at {name}")
        if self.null_pairs is not None:
            lines.append(f"null_pairs={self.null_pairs}")
        return "\n".join(lines)


def validate(complex_: FilteredComplex) -> ValidationReport:
    """Check d*d = 0, filtration non-increase, and grading consistency.

    Non-strict drops (A(dx) = A(x)) are flagged but allowed; when the
    complex is valid the flag count determines the zero-length pairs of
    the normal form, which are reported as null pairs.
    """
    space, d = complex_.space, complex_.differential
    violations = []
    strict_flags = []
    square = d.compose(d)
    for j in range(space.dim):
        col = tuple(square.matrix[i][j] for i in range(space.dim))
        if any(not x.is_zero() for x in col):
            violations.append(
                Violation("d_squared", space.generators[j], "d(d(x)) != 0")
            )
    for j in range(space.dim):
        image = d.column(j)
        level = space.filtration_of(image)
        if level > space.filtration[j]:
            violations.append(
                Violation(
                    "filtration",
                    space.generators[j],
                    f"A(dx)={level} exceeds A(x)={space.filtration[j]}",
                )
            )
        elif level == space.filtration[j]:
            strict_flags.append(space.generators[j])
    if complex_.graded:
        degs = space.degrees
        for i in range(space.dim):
            for j in range(space.dim):
                if not d.matrix[i][j].is_zero() and degs[i] != degs[j] - 1:
                    violations.append(
                        Violation(
                            "grading",
                            space.generators[j],
                            f"entry to {space.generators[i]} changes degree by "
                            f"{degs[i] - degs[j]}",
                        )
                    )
    nulls: Optional[int] = None
    if not violations:
        nulls = reduce_complex(complex_).null_pairs
    return ValidationReport(not violations, tuple(violations), tuple(strict_flags), nulls)


# ---------------------------------------------------------------------------
# Barcodes.


@dataclass(frozen=True, order=True)
class Bar:
    birth: Fraction
    length: Exponent  # positive Fraction or +inf
    multiplicity: int = 1
    degree: Optional[int] = None

    @property
    def finite(self) -> bool:
        return self.length != INFINITY

    @property
    def death(self) -> Exponent:
        return self.birth + self.length if self.finite else INFINITY


def _merge_bars(bars: Sequence[Bar]) -> tuple[Bar, ...]:
    counts: dict = {}
    for b in bars:
        if b.multiplicity < 1:
            raise ValidationError("bar multiplicity must be positive")
        if not (b.length > 0):
            raise ValidationError("bar length must be positive")
        key = (b.birth, b.length, b.degree)
        counts[key] = counts.get(key, 0) + b.multiplicity
    merged = [
        Bar(birth, length, mult, degree)
        for (birth, length, degree), mult in counts.items()
    ]
    merged.sort(key=lambda b: (b.birth, b.length, b.degree is not None, b.degree or 0))
    return tuple(merged)


@dataclass(frozen=True)
class Barcode:
    """Multiset of positive-length bars; equal bars are merged."""

    bars: tuple[Bar, ...]

    @staticmethod
    def build(bars: Sequence[Bar]) -> "Barcode":
        return Barcode(_merge_bars(bars))

    def __iter__(self):
        return iter(self.bars)

    @property
    def size(self) -> int:
        return sum(b.multiplicity for b in self.bars)

    @property
    def infinite_count(self) -> int:
        return sum(b.multiplicity for b in self.bars if not b.finite)

    def finite_lengths(self) -> list[Fraction]:
        out: list[Fraction] = []
        for b in self.bars:
            if b.finite:
                out.extend([b.length] * b.multiplicity)
        out.sort()
        return out

    def spectrum(self) -> "LengthSpectrum":
        return LengthSpectrum(tuple(self.finite_lengths()), self.infinite_count)

    def shift(self, offset: object) -> "Barcode":
        c = Fraction(as_exponent(offset))
        return Barcode.build(
            [Bar(b.birth + c, b.length, b.multiplicity, b.degree) for b in self.bars]
        )

    def scale(self, factor: object) -> "Barcode":
        s = Fraction(as_exponent(factor))
        if s <= 0:
            raise ValidationError("scale factor must be positive")
        return Barcode.build(
            [
                Bar(
                    b.birth * s,
                    b.length * s if b.finite else INFINITY,
                    b.multiplicity,
                    b.degree,
                )
                for b in self.bars
            ]
        )

    def endpoint_count(self) -> int:
        return sum(b.multiplicity * (2 if b.finite else 1) for b in self.bars)

    def restricted_to_degree(self, degree: Optional[int]) -> "Barcode":
        return Barcode.build([b for b in self.bars if b.degree == degree])


@dataclass(frozen=True)
class LengthSpectrum:
    """Finite lengths sorted increasingly plus the infinite-bar count."""

    finite: tuple[Fraction, ...]
    infinite: int = 0

    def __post_init__(self) -> None:
        if list(self.finite) != sorted(self.finite):
            raise ValidationError("finite lengths must be sorted")

    def doubled(self) -> "LengthSpectrum":
        out = []
        for v in self.finite:
            out.extend([v, v])
        return LengthSpectrum(tuple(out), 2 * self.infinite)

    def shifted(self, offset: Fraction) -> "LengthSpectrum":
        return LengthSpectrum(tuple(v + offset for v in self.finite), self.infinite)

    @property
    def boundary_depth(self) -> Fraction:
        return self.finite[-1] if self.finite else Fraction(0)


# ---------------------------------------------------------------------------
# Normal-form reduction of complexes.


@dataclass
class ComplexReduction:
    """Outcome of the orthogonal normal form of a differential.

    `pairs` holds (birth, length) for the positive-length canceling
    pairs and `infinite` the births of the homology generators, both in
    the raw-lattice normalization; `null_pairs` counts zero-length
    pairs.  Engine context is retained so homology data can be extracted
    without re-reducing.
    """

    complex: FilteredComplex
    precision: Fraction
    pairs: list = field(default_factory=list)
    infinite: list = field(default_factory=list)
    null_pairs: int = 0
    degrees_pairs: list = field(default_factory=list)
    degrees_infinite: list = field(default_factory=list)
    _scaler: engine.Scaler = None
    _cut: int = 0
    _reduction: engine.Reduction = None

    @property
    def homology_dim(self) -> int:
        return len(self.infinite)

    def spectrum(self) -> LengthSpectrum:
        return LengthSpectrum(
            tuple(sorted(length for _, length in self.pairs)), len(self.infinite)
        )


def _complex_scaler(
    complex_: FilteredComplex, extra: Sequence[Fraction]
) -> engine.Scaler:
    fracs = list(complex_.space.filtration) + list(extra)
    for row in complex_.differential.matrix:
        for x in row:
            fracs.extend(x.terms)
    return engine.Scaler.for_fractions(fracs)


def _content_bound(d: FilteredMap) -> Fraction:
    """Upper bound for every finite diagonal valuation of the normal form.

    The sum of the diagonal valuations is the least valuation of a
    maximal-rank minor, and a nonzero minor determinant is a polynomial
    in the entries whose exponents cannot exceed the sum over columns of
    the largest exponent present; columns whose entries dip below zero
    valuation widen the bound on the other side.
    """
    src, tgt = d.source.filtration, d.target.filtration
    total = Fraction(0)
    for j in range(d.source.dim):
        col_max = None
        col_min = None
        for i in range(d.target.dim):
            x = d.matrix[i][j]
            if x.is_zero():
                continue
            shift = src[j] - tgt[i]
            top = max(x.terms) + shift
            bottom = x.valuation() + shift
            col_max = top if col_max is None else max(col_max, top)
            col_min = bottom if col_min is None else min(col_min, bottom)
        if col_max is not None:
            total += max(Fraction(0), col_max) + max(Fraction(0), -col_min)
    return total


def auto_precision(complex_: FilteredComplex) -> Fraction:
    """Working precision certifying every finite length of the complex.

    The baseline spread + 1 is not always enough: normal-form pivots can
    reach the determinant content of the matrix, so the default grows
    with it.  Callers may still override with any explicit bound.
    """
    return max(
        complex_.default_precision(), _content_bound(complex_.differential) + 1
    )


def _vector_degree(
    space: FilteredSpace, vec: Sequence, scalarwise: bool = False
) -> Optional[int]:
    if space.degrees is None:
        return None
    degs = {
        space.degrees[i]
        for i, s in enumerate(vec)
        if (s[1] if not scalarwise else not s.is_zero())
    }
    return min(degs) if degs else None


def reduce_complex(
    complex_: FilteredComplex,
    precision: object | None = None,
    extra_fractions: Sequence[Fraction] = (),
) -> ComplexReduction:
    """Run the orthogonal normal form at the given (or default) precision.

    `extra_fractions` widens the common-denominator grid so that later
    computations against the cached reduction (induced maps, cones) can
    reuse its engine context.
    """
    prec = (
        Fraction(as_exponent(precision))
        if precision is not None
        else auto_precision(complex_)
    )
    entry_band = min(
        (
            x.precision
            for row in complex_.differential.matrix
            for x in row
            if x.precision != INFINITY
        ),
        default=INFINITY,
    )
    if entry_band != INFINITY:
        prec = min(prec, Fraction(entry_band))
    scaler = _complex_scaler(complex_, [prec, *extra_fractions])
    cut = scaler.scale(prec) + scaler.scale(complex_.space.spread) + scaler.denominator
    filt_scaled = [scaler.scale(a) for a in complex_.space.filtration]
    on = engine.on_matrix(
        complex_.differential.matrix,
        complex_.space.filtration,
        complex_.space.filtration,
        scaler,
        cut,
    )
    red = engine.reduce_complex(on, filt_scaled, cut)
    out = ComplexReduction(
        complex_, prec, _scaler=scaler, _cut=cut, _reduction=red
    )
    for pair in red.pairs:
        if pair.beta == 0:
            out.null_pairs += 1
            continue
        birth = scaler.unscale(pair.zeta_m - pair.beta)
        out.pairs.append((birth, scaler.unscale(pair.beta)))
        out.degrees_pairs.append(_vector_degree(complex_.space, pair.eta))
    for slot, level in zip(red.xi_slots, red.xi_levels):
        out.infinite.append(scaler.unscale(level))
        out.degrees_infinite.append(
            _vector_degree(complex_.space, [row[slot] for row in red.basis])
        )
    return out


def barcode(complex_: FilteredComplex, precision: object | None = None) -> Barcode:
    """Bars of the complex: one finite bar per positive-length pair and
    one infinite bar per homology generator, tagged by degree when the
    complex is graded."""
    report = validate_light(complex_)
    if not report.ok:
        raise ValidationError(str(report))
    red = reduce_complex(complex_, precision)
    bars = [
        Bar(birth, length, 1, deg)
        for (birth, length), deg in zip(red.pairs, red.degrees_pairs)
    ]
    bars.extend(
        Bar(birth, INFINITY, 1, deg)
        for birth, deg in zip(red.infinite, red.degrees_infinite)
    )
    return Barcode.build(bars)


def length_spectrum(
    complex_: FilteredComplex, precision: object | None = None
) -> LengthSpectrum:
    """Bar-length spectrum via Smith normal form of the orthonormalized
    differential: positive diagonal valuations are the finite lengths
    and the homology dimension is dim C minus twice the rank.

    This is the fast route when births are not needed; it is also the
    second algorithm against which the normal-form reduction is checked.
    """
    prec = (
        Fraction(as_exponent(precision))
        if precision is not None
        else auto_precision(complex_)
    )
    scaler = _complex_scaler(complex_, [prec])
    cut = scaler.scale(prec) + scaler.scale(complex_.space.spread) + scaler.denominator
    on = engine.on_matrix(
        complex_.differential.matrix,
        complex_.space.filtration,
        complex_.space.filtration,
        scaler,
        cut,
    )
    vals = engine.snf_valuations(on, cut)
    finite = tuple(scaler.unscale(v) for v in vals if v > 0)
    return LengthSpectrum(finite, complex_.dim - 2 * len(vals))


def validate_light(complex_: FilteredComplex) -> ValidationReport:
    """Validation without the null-pair count (no reduction run)."""
    space, d = complex_.space, complex_.differential
    violations = []
    square = d.compose(d)
    for j in range(space.dim):
        if any(not square.matrix[i][j].is_zero() for i in range(space.dim)):
            violations.append(Violation("d_squared", space.generators[j], "d(d(x)) != 0"))
            break
    for j in range(space.dim):
        if space.filtration_of(d.column(j)) > space.filtration[j]:
            violations.append(
                Violation("filtration", space.generators[j], "A(dx) > A(x)")
            )
            break
    if complex_.graded:
        degs = space.degrees
        for i in range(space.dim):
            for j in range(space.dim):
                if not d.matrix[i][j].is_zero() and degs[i] != degs[j] - 1:
                    violations.append(
                        Violation("grading", space.generators[j], "degree shift != -1")
                    )
                    break
    return ValidationReport(not violations, tuple(violations), (), None)


def boundary_depth(complex_: FilteredComplex, precision: object | None = None) -> Fraction:
    """Largest finite bar length; zero when there are no finite bars."""
    return barcode(complex_, precision).spectrum().boundary_depth


def rescale(complex_: FilteredComplex, factor: object) -> FilteredComplex:
    """Multiply the filtration and every term exponent by a positive factor."""
    s = Fraction(as_exponent(factor))
    if s <= 0:
        raise ValidationError("rescale factor must be positive")
    space = FilteredSpace(
        complex_.space.generators,
        tuple(a * s for a in complex_.space.filtration),
        complex_.space.degrees,
    )

    def scale_scalar(x: NovikovScalar) -> NovikovScalar:
        prec = x.precision if x.precision == INFINITY else x.precision * s
        return NovikovScalar(frozenset(e * s for e in x.terms), prec)

    rows = tuple(
        tuple(scale_scalar(x) for x in row) for row in complex_.differential.matrix
    )
    return FilteredComplex(space, FilteredMap(space, space, rows))


# ---------------------------------------------------------------------------
# Induced structures on homology.


def _homology_space(red: ComplexReduction) -> FilteredSpace:
    names = tuple(f"h{k}" for k in range(len(red.infinite)))
    degrees = None
    if red.complex.graded:
        degrees = tuple(d if d is not None else 0 for d in red.degrees_infinite)
    return FilteredSpace(names, tuple(red.infinite), degrees)


def induced_homology_filtration(
    complex_: FilteredComplex, precision: object | None = None
) -> FilteredSpace:
    """Homology with the induced filtration, on an orthogonal basis.

    The generators h_k carry the minimal filtration levels of their
    classes; orthogonality of the basis is part of the normal form.
    """
    return _homology_space(reduce_complex(complex_, precision))


def _check_chain_map(complex_: FilteredComplex, d_map: FilteredMap) -> None:
    d = complex_.differential
    comm = d.compose(d_map) + d_map.compose(d)
    for i in range(complex_.dim):
        for j in range(complex_.dim):
            if not comm.matrix[i][j].is_zero():
                raise NotChainMap(
                    f"commutator nonzero at ({complex_.space.generators[i]}, "
                    f"{complex_.space.generators[j]})"
                )


def map_fractions(chain_map: FilteredMap) -> list[Fraction]:
    """Every rational that an engine grid must represent for this map."""
    fracs = list(chain_map.source.filtration) + list(chain_map.target.filtration)
    for row in chain_map.matrix:
        for x in row:
            fracs.extend(x.terms)
    return fracs


def map_content_top(chain_map: FilteredMap) -> Fraction:
    """Largest exponent of the orthonormalized entries (at least zero)."""
    top = Fraction(0)
    src, tgt = chain_map.source.filtration, chain_map.target.filtration
    for i in range(chain_map.target.dim):
        for j in range(chain_map.source.dim):
            x = chain_map.matrix[i][j]
            if not x.is_zero():
                top = max(top, max(x.terms) + src[j] - tgt[i])
    return top


def reduction_precision_for(
    complex_: FilteredComplex, chain_map: FilteredMap
) -> Fraction:
    """Working precision letting a cached reduction serve the chain map."""
    return max(
        auto_precision(complex_),
        map_content_top(chain_map) + complex_.space.spread + 1,
    )


def homology_matrix(
    complex_: FilteredComplex,
    chain_map: FilteredMap,
    precision: object | None = None,
    reduction: ComplexReduction | None = None,
) -> FilteredMap:
    """Matrix of the induced map on homology in the orthogonal basis.

    Computed as the homology block of the map after the normal-form
    change of basis, then rescaled to the raw levels of the homology
    generators.
    """
    _check_chain_map(complex_, chain_map)
    if reduction is not None:
        red = reduction
    else:
        prec = (
            precision
            if precision is not None
            else reduction_precision_for(complex_, chain_map)
        )
        red = reduce_complex(
            complex_, prec, extra_fractions=map_fractions(chain_map)
        )
    grid_too_coarse = any(
        (f * red._scaler.denominator).denominator != 1
        for f in map_fractions(chain_map)
    )
    cut_too_small = red._cut <= red._scaler.denominator * (
        map_content_top(chain_map) + complex_.space.spread
    )
    if grid_too_coarse or cut_too_small:
        # The cached engine context cannot carry this map; reduce finer.
        red = reduce_complex(
            complex_,
            max(red.precision, reduction_precision_for(complex_, chain_map)),
            extra_fractions=map_fractions(chain_map),
        )
    scaler, cut, er = red._scaler, red._cut, red._reduction
    on_d = engine.on_matrix(
        chain_map.matrix,
        complex_.space.filtration,
        complex_.space.filtration,
        scaler,
        cut,
    )
    inner = engine.m_mul(engine.m_mul(er.basis_inv, on_d, cut), _basis_matrix(er), cut)
    hspace = _homology_space(red)
    slots = er.xi_slots
    band = scaler.unscale(cut)
    rows = []
    for a, slot_a in enumerate(slots):
        row = []
        for b, slot_b in enumerate(slots):
            entry = inner[slot_a][slot_b]
            if not entry[1]:
                row.append(NovikovScalar.zero().truncate(band))
                continue
            scalar = engine.scalar_from_series(entry, scaler, band)
            row.append(scalar.shift(red.infinite[a] - red.infinite[b]))
        rows.append(tuple(row))
    return FilteredMap(hspace, hspace, tuple(rows))


def _basis_matrix(er: engine.Reduction) -> list:
    n = len(er.basis)
    return [[er.basis[k][i] for k in range(n)] for i in range(n)]
