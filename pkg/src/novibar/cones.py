"""Shifted mapping cones and the spectrum separation / deformation checks.

The cone of a chain map D on (C, d), shifted by sigma, lives on two
copies of C with differential (c, c') -> (d c, T^sigma D c + d c').  For
sigma past a computable threshold its finite bar lengths split into the
doubled spectrum of the base complex (strictly below sigma) and, at or
above sigma, the sigma-shifted spectrum of the induced map on homology.
The two deformation checkers replay the corresponding quantitative
statements on concrete instances and treat any equality failure as an
implementation bug, since the statements are theorems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .complexes import (
    FilteredComplex,
    LengthSpectrum,
    homology_matrix,
    length_spectrum,
    reduce_complex,
    validate_light,
)
from .errors import (
    AssertionFailure,
    HypothesisFailure,
    SeparationFailure,
    ValidationError,
)
from .scalars import NovikovScalar, as_exponent
from .spaces import FilteredMap, FilteredSpace


@dataclass(frozen=True)
class ShiftedCone:
    """Cone of T^sigma * D together with its ingredients."""

    base: FilteredComplex
    chain_map: FilteredMap
    shift: Fraction
    cone: FilteredComplex


@dataclass(frozen=True)
class SplitSpectrum:
    """Cone spectrum split at sigma: low strictly below, high at or above.

    Entries exactly equal to sigma come from spectral value zero of the
    induced homology map and belong to the high part; they are certified
    against the homology cone rather than assigned arbitrarily.  The
    high part also carries the cone's infinite-bar count.
    """

    low: LengthSpectrum
    high: LengthSpectrum
    shift: Fraction


def build_cone(
    base: FilteredComplex, chain_map: FilteredMap, shift: object
) -> ShiftedCone:
    """Assemble the sigma-shifted cone complex of a filtered chain map."""
    sigma = Fraction(as_exponent(shift))
    if sigma < 0:
        raise ValidationError("cone shift must be non-negative")
    if chain_map.source != base.space or chain_map.target != base.space:
        raise ValidationError("chain map must be an endomorphism of the base space")
    from .complexes import _check_chain_map  # shared commutator check

    _check_chain_map(base, chain_map)
    n = base.dim
    space = base.space
    names = tuple(f"cone0:{g}" for g in space.generators) + tuple(
        f"cone1:{g}" for g in space.generators
    )
    filtration = space.filtration + space.filtration
    degrees = None
    if space.degrees is not None:
        degrees = tuple(d + 1 for d in space.degrees) + space.degrees
    cone_space = FilteredSpace(names, filtration, degrees)
    zero = NovikovScalar.zero()
    t_sigma = NovikovScalar.monomial(sigma)
    d = base.differential.matrix
    dm = chain_map.matrix
    rows = []
    for i in range(n):
        rows.append(tuple(d[i]) + tuple(zero for _ in range(n)))
    for i in range(n):
        rows.append(
            tuple(t_sigma * dm[i][j] for j in range(n)) + tuple(d[i])
        )
    cone = FilteredComplex(cone_space, FilteredMap(cone_space, cone_space, tuple(rows)))
    report = validate_light(cone)
    if not report.ok:
        raise ValidationError(f"assembled cone is not a valid complex: {report}")
    return ShiftedCone(base, chain_map, sigma, cone)


def suggest_sigma(
    base: FilteredComplex,
    chain_map: Optional[FilteredMap] = None,
    precision: object | None = None,
) -> Fraction:
    """Certified separation threshold: spread + boundary depth + 1.

    The bound depends on the base complex only; the map argument is kept
    for interface symmetry with the cone constructors.
    """
    spectrum = length_spectrum(base, precision)
    return base.space.spread + spectrum.boundary_depth + 1


def _multiset_eq(a, b) -> bool:
    return sorted(a) == sorted(b)


def split_spectrum(
    shifted: ShiftedCone, precision: object | None = None
) -> SplitSpectrum:
    """Split the cone spectrum at sigma and certify both halves.

    Verifies that the low part equals the doubled base spectrum, the
    high part equals the spectrum of the sigma-shifted cone on homology,
    and the infinite-bar count is twice the homology dimension minus
    twice the rank of the induced map.  Any failed equality raises
    SeparationFailure: sigma is too small or something upstream is off.
    """
    sigma = shifted.shift
    prec = (
        Fraction(as_exponent(precision)) if precision is not None else None
    )
    cone_spec = length_spectrum(shifted.cone, prec)
    low = [v for v in cone_spec.finite if v < sigma]
    high = [v for v in cone_spec.finite if v >= sigma]

    base_spec = length_spectrum(shifted.base, prec)
    expected_low = base_spec.doubled()
    if not _multiset_eq(low, expected_low.finite):
        raise SeparationFailure(
            f"low part {low} != doubled base spectrum {list(expected_low.finite)}"
            f" at sigma={sigma}"
        )

    from .complexes import map_fractions, reduction_precision_for

    red = reduce_complex(
        shifted.base,
        prec
        if prec is not None
        else reduction_precision_for(shifted.base, shifted.chain_map),
        extra_fractions=map_fractions(shifted.chain_map),
    )
    induced = homology_matrix(shifted.base, shifted.chain_map, reduction=red)
    hcomplex = FilteredComplex(
        induced.source, FilteredMap.zero(induced.source, induced.source)
    )
    hcone = build_cone(hcomplex, induced, sigma)
    hspec = length_spectrum(hcone.cone, prec)
    if not _multiset_eq(high, hspec.finite):
        raise SeparationFailure(
            f"high part {high} != homology-cone spectrum {list(hspec.finite)}"
            f" at sigma={sigma}"
        )
    b_dim = red.homology_dim
    rank = b_dim - hspec.infinite // 2
    if cone_spec.infinite != 2 * (b_dim - rank):
        raise SeparationFailure(
            f"infinite count {cone_spec.infinite} != 2*(B - rank)"
            f" = {2 * (b_dim - rank)}"
        )
    return SplitSpectrum(
        LengthSpectrum(tuple(sorted(low)), 0),
        LengthSpectrum(tuple(sorted(high)), cone_spec.infinite),
        sigma,
    )


# ---------------------------------------------------------------------------
# Deformation checkers.


@dataclass(frozen=True)
class BasicDeformationReport:
    bound: Fraction
    perturbation_valuation: object
    spectrum_before: LengthSpectrum
    spectrum_after: LengthSpectrum
    matched: tuple[Fraction, ...]

    def __str__(self) -> str:
        return (
            f"below bound {self.bound}: matched prefix {list(self.matched)} "
            f"(perturbation valuation {self.perturbation_valuation})"
        )


def check_deformation_basic(
    space: FilteredSpace,
    d_before: FilteredMap,
    d_after: FilteredMap,
    bound: object,
    precision: object | None = None,
) -> BasicDeformationReport:
    """Verify that spectra below the bound coincide when the differential
    moves by a perturbation of valuation at least the bound."""
    limit = Fraction(as_exponent(bound))
    if limit <= 0:
        raise HypothesisFailure("bound must be positive")
    c_before = FilteredComplex(space, d_before)
    c_after = FilteredComplex(space, d_after)
    for c in (c_before, c_after):
        report = validate_light(c)
        if not report.ok:
            raise ValidationError(str(report))
    perturbation = d_before + d_after
    pval = perturbation.valuation()
    if pval < limit:
        raise HypothesisFailure(
            f"perturbation valuation {pval} is below the bound {limit}"
        )
    s_before = length_spectrum(c_before, precision)
    s_after = length_spectrum(c_after, precision)
    below_before = [v for v in s_before.finite if v < limit]
    below_after = [v for v in s_after.finite if v < limit]
    if below_before != below_after:
        raise AssertionFailure(
            f"spectra below {limit} differ: {below_before} vs {below_after}"
        )
    return BasicDeformationReport(
        limit, pval, s_before, s_after, tuple(below_before)
    )


@dataclass(frozen=True)
class ConeDeformationReport:
    case: int
    verified_index: int
    sigma: Fraction
    low_before: tuple[Fraction, ...]
    low_after: tuple[Fraction, ...]
    high_before: tuple[Fraction, ...]
    high_after: tuple[Fraction, ...]

    def __str__(self) -> str:
        part = "low" if self.case == 1 else "high"
        return (
            f"case {self.case}: {part} spectra agree up to index "
            f"{self.verified_index} at sigma={self.sigma}"
        )


def check_deformation_cone(
    space: FilteredSpace,
    d_before: FilteredMap,
    d_after: FilteredMap,
    map_before: FilteredMap,
    map_after: FilteredMap,
    sigma: object,
    low_bound: object,
    high_bound: object,
    case: int,
    precision: object | None = None,
) -> ConeDeformationReport:
    """Replay one case of the cone deformation statement.

    `low_bound` is the valuation floor of the differential perturbation
    and `high_bound` the (strictly larger) floor of the chain-map
    perturbation.  Case 1 compares the low subspectra up to the largest
    index still below `low_bound`; case 2 compares the high subspectra
    up to the largest index below sigma + high_bound - low_bound, and
    additionally requires equal homology dimensions and a fully matched
    low part.
    """
    if case not in (1, 2):
        raise ValidationError("case must be 1 or 2")
    a = Fraction(as_exponent(low_bound))
    big_a = Fraction(as_exponent(high_bound))
    sig = Fraction(as_exponent(sigma))
    if not (big_a > a > 0):
        raise HypothesisFailure(f"need high bound > low bound > 0, got {big_a}, {a}")
    c_before = FilteredComplex(space, d_before)
    c_after = FilteredComplex(space, d_after)
    for c in (c_before, c_after):
        report = validate_light(c)
        if not report.ok:
            raise ValidationError(str(report))
    m_val = (d_before + d_after).valuation()
    if m_val < a:
        raise HypothesisFailure(
            f"differential perturbation valuation {m_val} below {a}"
        )
    n_val = (map_before + map_after).valuation()
    if n_val < big_a:
        raise HypothesisFailure(
            f"chain-map perturbation valuation {n_val} below {big_a}"
        )
    threshold = max(
        suggest_sigma(c_before, precision=precision),
        suggest_sigma(c_after, precision=precision),
    )
    if sig < threshold:
        raise HypothesisFailure(f"sigma={sig} below the threshold {threshold}")
    prec = Fraction(as_exponent(precision)) if precision is not None else None
    cone_before = build_cone(c_before, map_before, sig)
    cone_after = build_cone(c_after, map_after, sig)
    spec_before = length_spectrum(cone_before.cone, prec)
    spec_after = length_spectrum(cone_after.cone, prec)
    low_b = [v for v in spec_before.finite if v < sig]
    low_a = [v for v in spec_after.finite if v < sig]
    high_b = [v for v in spec_before.finite if v >= sig]
    high_a = [v for v in spec_after.finite if v >= sig]

    if case == 1:
        index = sum(1 for v in low_a if v < a)
        if low_b[:index] != low_a[:index]:
            raise AssertionFailure(
                f"low prefixes differ up to {index}: {low_b[:index]} vs {low_a[:index]}"
            )
        verified = index
    else:
        dim_before = length_spectrum(c_before, prec).infinite
        dim_after = length_spectrum(c_after, prec).infinite
        if dim_before != dim_after:
            raise HypothesisFailure(
                f"homology dimensions differ: {dim_before} vs {dim_after}"
            )
        if any(v >= a for v in low_a):
            raise HypothesisFailure(
                f"low spectrum reaches {max(low_a)} >= {a}; case 2 needs all "
                "low lengths below the low bound"
            )
        cutoff = sig + big_a - a
        index = sum(1 for v in high_a if v < cutoff)
        if high_b[:index] != high_a[:index]:
            raise AssertionFailure(
                f"high prefixes differ up to {index}: "
                f"{high_b[:index]} vs {high_a[:index]}"
            )
        verified = index
    return ConeDeformationReport(
        case,
        verified,
        sig,
        tuple(low_b),
        tuple(low_a),
        tuple(high_b),
        tuple(high_a),
    )
