"""Truncated quantum rings of the four rank-one families and their
multiplication spectra and closed-form bounds.

The ring is Lambda[a]/(a^{n+1} = q) on the power basis a^0..a^n, where
the quantum monomial q has valuation equal to the minimal disk area 1/2.
Multiplication by a power of `a` permutes the basis up to q-powers, so
its spectral values against any orthogonal filtration of the basis are
plain differences of filtration levels, which the generic decomposition
engine cross-checks on every call.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, gcd
from typing import Sequence

from . import engine
from .complexes import LengthSpectrum
from .errors import (
    AssertionFailure,
    HypothesisFailure,
    MismatchedMaslov,
    NonFiltered,
    ValidationError,
)
from .scalars import as_exponent

FAMILIES = ("rpn", "cpn", "hpn", "sn")

_DIMENSIONS = {
    "rpn": lambda n: (n, n + 1),
    "cpn": lambda n: (2 * n, 2 * n + 2),
    "hpn": lambda n: (4 * n, 4 * n + 4),
    "sn": lambda n: (n, 2 * n),
}

MIN_DISK_AREA = Fraction(1, 2)


@dataclass(frozen=True)
class CrossRing:
    """Numeric invariants of one ring Lambda[a]/(a^{n+1} = q)."""

    family: str
    n: int
    dimension: int  # n_L
    maslov: int  # N_L
    c: Fraction  # n_L / N_L < 1
    area: Fraction  # A_L
    kappa: Fraction  # A_L / N_L

    @property
    def power_basis_size(self) -> int:
        return self.n + 1

    @property
    def quantum_valuation(self) -> Fraction:
        """Valuation of q: N_L * kappa = A_L."""
        return self.maslov * self.kappa


def cross_ring(family: str, n: int) -> CrossRing:
    key = family.lower()
    if key not in _DIMENSIONS:
        raise ValidationError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if n < 1:
        raise ValidationError("n must be a positive integer")
    dim, maslov = _DIMENSIONS[key](n)
    c = Fraction(dim, maslov)
    if not c < 1:
        raise AssertionFailure(f"c = {c} must be below 1")
    return CrossRing(
        key, n, dim, maslov, c, MIN_DISK_AREA, MIN_DISK_AREA / maslov
    )


@dataclass(frozen=True)
class SpectralFiltration:
    """Filtration levels of the orthogonal power basis a^0..a^n.

    Levels extend to all powers by the relation: each full wrap through
    a^{n+1} = q lowers the level by the disk area.  In `nonneg_mode` the
    single-step drops l(a^j) - l(a^{j+1}) must all be non-negative,
    which is the realizability proxy the bound checks require.
    """

    ring: CrossRing
    values: tuple[Fraction, ...]
    nonneg_mode: bool = False

    def __post_init__(self) -> None:
        if len(self.values) != self.ring.power_basis_size:
            raise ValidationError(
                f"expected {self.ring.power_basis_size} filtration values"
            )
        if self.nonneg_mode:
            bad = [j for j in range(len(self.values)) if self.step_drop(j) < 0]
            if bad:
                raise NonFiltered(
                    f"negative drop l(a^{bad[0]}) - l(a^{bad[0] + 1}) in nonneg mode"
                )

    @staticmethod
    def build(
        ring: CrossRing, values: Sequence[object], nonneg_mode: bool = False
    ) -> "SpectralFiltration":
        vals = tuple(Fraction(as_exponent(v)) for v in values)
        return SpectralFiltration(ring, vals, nonneg_mode)

    def level(self, power: int) -> Fraction:
        """l(a^power) for any non-negative power, via the ring relation."""
        if power < 0:
            raise ValidationError("power must be non-negative")
        size = self.ring.power_basis_size
        wraps, residue = divmod(power, size)
        return self.values[residue] - wraps * self.ring.quantum_valuation

    def step_drop(self, j: int) -> Fraction:
        return self.level(j) - self.level(j + 1)


def _mult_spectrum_closed_form(filt: SpectralFiltration, power: int) -> list[Fraction]:
    size = filt.ring.power_basis_size
    return sorted(filt.level(j) - filt.level(j + power) for j in range(size))


def _mult_spectrum_generic(filt: SpectralFiltration, power: int) -> list[Fraction]:
    """Spectral values of the multiplication matrix by the generic
    normal-form engine, as an independent route."""
    ring = filt.ring
    size = ring.power_basis_size
    scaler = engine.Scaler.for_fractions(
        list(filt.values) + [ring.quantum_valuation]
    )
    spreads = max(filt.values) - min(filt.values) if filt.values else Fraction(0)
    margin = spreads + (power // size + 2) * ring.quantum_valuation + 1
    cut = scaler.scale(spreads + margin)
    rows = [[engine.S_ZERO for _ in range(size)] for _ in range(size)]
    for j in range(size):
        wraps, residue = divmod(j + power, size)
        # Orthonormalized entry of m_{a^power} in column j, row residue.
        shift = (
            wraps * ring.quantum_valuation
            + filt.values[j]
            - filt.values[residue]
        )
        rows[residue][j] = engine.norm(scaler.scale(shift), 1, cut)
    vals = engine.snf_valuations(rows, cut)
    if len(vals) != size:
        raise AssertionFailure("multiplication matrix must have full rank")
    return sorted(scaler.unscale(v) for v in vals)


def mult_spectrum(filt: SpectralFiltration, power: int) -> LengthSpectrum:
    """Spectral values of multiplication by a^power, all finite.

    The closed-form differences are cross-checked against the generic
    normal-form decomposition of the explicit matrix.
    """
    if power < 0:
        raise ValidationError("power must be non-negative")
    values = _mult_spectrum_closed_form(filt, power)
    if filt.nonneg_mode and any(v < 0 for v in values):
        raise NonFiltered("negative spectral value in nonneg mode")
    generic = _mult_spectrum_generic(filt, power)
    if generic != values:
        raise AssertionFailure(
            f"closed form {values} disagrees with generic decomposition {generic}"
        )
    return LengthSpectrum(tuple(values), 0)


@dataclass(frozen=True)
class RootBoundReport:
    ring: CrossRing
    order: int  # m with (a^j)^m a q-power of the unit
    codegree: Fraction  # k in the bound formulas
    class_power: int  # j with the checked class a^j
    spectrum: tuple[Fraction, ...]
    telescoping: Fraction
    top_bound: Fraction
    low_bound: Fraction

    def __str__(self) -> str:
        top = self.spectrum[-1] if self.spectrum else Fraction(0)
        idx = ceil(len(self.spectrum) / self.order) - 1
        return (
            f"spectrum={list(self.spectrum)} telescoping={self.telescoping} "
            f"beta_top={top}<= {self.top_bound} "
            f"beta_{idx + 1}={self.spectrum[idx]}<= {self.low_bound}"
        )


def check_root_of_unity_bounds(
    filt: SpectralFiltration, order: int, codegree: object
) -> RootBoundReport:
    """Verify the telescoping identity and both spectral bounds for a
    quantum root of unity.

    The checked class is the power a^j with j = codegree*(n+1)/N_L; the
    relation (a^j)^order = q^(j*order/(n+1)) must close up, and in
    nonneg mode both stated bounds on the multiplication spectrum are
    theorems, so a violation raises AssertionFailure.
    """
    ring = filt.ring
    k = Fraction(as_exponent(codegree))
    if order < 2:
        raise HypothesisFailure("root order must be at least 2")
    j_frac = k * ring.power_basis_size / ring.maslov
    if j_frac.denominator != 1 or j_frac <= 0:
        raise HypothesisFailure(
            f"codegree {k} does not name a power of a: j = {j_frac}"
        )
    j = int(j_frac)
    if (j * order) % ring.power_basis_size != 0:
        raise HypothesisFailure(
            f"(a^{j})^{order} is not a quantum multiple of the unit"
        )
    if not filt.nonneg_mode:
        raise HypothesisFailure("bound check requires nonneg mode")
    expected = order * k / ring.maslov * ring.area
    for i in range(ring.power_basis_size):
        total = sum(
            (
                filt.level(i + step * j) - filt.level(i + (step + 1) * j)
                for step in range(order)
            ),
            Fraction(0),
        )
        if total != expected:
            raise AssertionFailure(
                f"telescoping sum {total} != {expected} at basis power {i}"
            )
    spectrum = mult_spectrum(filt, j)
    values = spectrum.finite
    size = len(values)
    top_bound = expected
    low_bound = k / ring.maslov * ring.area
    if values[-1] > top_bound:
        raise AssertionFailure(f"beta_top {values[-1]} exceeds {top_bound}")
    idx = ceil(size / order) - 1
    if values[idx] > low_bound:
        raise AssertionFailure(
            f"beta_{idx + 1} = {values[idx]} exceeds {low_bound}"
        )
    return RootBoundReport(
        ring, order, k, j, values, expected, top_bound, low_bound
    )


def canonical_root_data(ring: CrossRing, power: int) -> tuple[int, Fraction]:
    """(order, codegree) for the class a^power in the given ring."""
    if not 1 <= power:
        raise ValidationError("power must be positive")
    size = ring.power_basis_size
    order = size // gcd(power, size)
    if order < 2:
        order = 2  # a^power already a unit multiple; two turns still close up
    codegree = Fraction(power * ring.maslov, size)
    return order, codegree


def gamma_from_filtration(filt: SpectralFiltration) -> Fraction:
    """Smallest spectral value of multiplication by the point class a^n.

    Also recomputed as the least single-pass drop over the power basis;
    the two must agree by the diagonal form of the matrix.
    """
    ring = filt.ring
    spectrum = mult_spectrum(filt, ring.n)
    direct = min(
        filt.level(j) - filt.level(j + ring.n)
        for j in range(ring.power_basis_size)
    )
    if spectrum.finite[0] != direct:
        raise AssertionFailure(
            f"beta_1 {spectrum.finite[0]} != direct minimum {direct}"
        )
    return spectrum.finite[0]


@dataclass(frozen=True)
class PaperConstants:
    c: Fraction
    beta_bound: Fraction  # c / (2(1-c))
    gamma_bound: Fraction  # (1+c)c / (2(1-c))
    linear_constant: Fraction  # (1+c)c / (1-c)
    s_star: Fraction  # (1-c) / (1+c)


def paper_constants(ring: CrossRing) -> PaperConstants:
    """Closed-form constants attached to the ring's ratio c."""
    c = ring.c
    return PaperConstants(
        c=c,
        beta_bound=c / (2 * (1 - c)),
        gamma_bound=(1 + c) * c / (2 * (1 - c)),
        linear_constant=(1 + c) * c / (1 - c),
        s_star=(1 - c) / (1 + c),
    )


def product_bound(rings: Sequence[CrossRing], beta: object) -> Fraction:
    """Spectral-norm bound for a product of same-Maslov factors:
    (sum c_i) / (1 - max c_i) * (A + beta)."""
    if not rings:
        raise ValidationError("at least one factor required")
    beta_val = Fraction(as_exponent(beta))
    if beta_val < 0:
        raise ValidationError("beta must be non-negative")
    maslovs = {r.maslov for r in rings}
    if len(maslovs) != 1:
        raise MismatchedMaslov(f"factors have different Maslov numbers: {maslovs}")
    total_c = sum((r.c for r in rings), Fraction(0))
    max_c = max(r.c for r in rings)
    area = rings[0].area
    return total_c / (1 - max_c) * (area + beta_val)
