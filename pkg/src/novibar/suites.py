"""Seeded verification sweeps shared by the CLI and the acceptance tests.

Each suite runs a batch of reproducible random instances through one of
the checkers and tallies outcomes.  Hypothesis failures are legitimate
(the generator sometimes draws instances outside a case's hypotheses and
the checker must say so); assertion failures are never legitimate and
make the suite fail.  With `doubling` enabled every engine-computed
quantity is recomputed at twice the working precision and compared,
which is the soundness check for the truncation scheme.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Optional, Sequence

from . import engine
from .complexes import (
    Bar,
    Barcode,
    FilteredComplex,
    length_spectrum,
)
from .cones import (
    build_cone,
    check_deformation_basic,
    check_deformation_cone,
    split_spectrum,
    suggest_sigma,
)
from .cross import (
    FAMILIES,
    canonical_root_data,
    check_root_of_unity_bounds,
    cross_ring,
    SpectralFiltration,
)
from .errors import HypothesisFailure, NonFiltered
from .instances import default_exponent_pool, random_instance
from .persistence import PeriodicBarcode, bottleneck, lsv_endpoint_count
from .scalars import INFINITY


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)
    hypothesis_skips: int = 0
    doubling_mismatches: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures and self.doubling_mismatches == 0

    def record_failure(self, seed: int, message: str) -> None:
        self.failures.append((seed, message))

    def summary(self) -> str:
        status = "ok" if self.ok else "FAILED"
        return (
            f"{self.name}: {status} instances={self.instances} "
            f"checks={self.checks} failures={len(self.failures)} "
            f"hypothesis_skips={self.hypothesis_skips} "
            f"doubling_mismatches={self.doubling_mismatches}"
        )


def _spectrum_stable_under_doubling(
    complex_: FilteredComplex, result: SuiteResult
) -> None:
    from .complexes import auto_precision

    p0 = auto_precision(complex_)
    base = length_spectrum(complex_, p0)
    doubled = length_spectrum(complex_, 2 * p0)
    if base != doubled:
        result.doubling_mismatches += 1


def separation_suite(
    seeds: Sequence[int],
    dims: int = 8,
    doubling: bool = False,
    exponent_pool=None,
) -> SuiteResult:
    """Split-spectrum equalities at the suggested sigma and its double."""
    result = SuiteResult("separation")
    for seed in seeds:
        result.instances += 1
        inst = random_instance(seed, dims=dims, exponent_pool=exponent_pool)
        complex_ = FilteredComplex(inst.space, inst.d_after)
        chain_map = inst.map_after
        try:
            sigma = suggest_sigma(complex_)
            parts = []
            for factor in (1, 2):
                cone = build_cone(complex_, chain_map, factor * sigma)
                parts.append(split_spectrum(cone))
                result.checks += 1
            low1, low2 = parts[0].low, parts[1].low
            high1, high2 = parts[0].high, parts[1].high
            if low1 != low2:
                raise AssertionError("low spectra moved with sigma")
            if tuple(v + sigma for v in high1.finite) != high2.finite:
                raise AssertionError("high spectrum did not shift by sigma")
            if high1.infinite != high2.infinite:
                raise AssertionError("infinite count moved with sigma")
            if doubling:
                _spectrum_stable_under_doubling(
                    build_cone(complex_, chain_map, sigma).cone, result
                )
        except Exception as exc:  # noqa: BLE001 - tallied, not swallowed
            result.record_failure(seed, f"{type(exc).__name__}: {exc}")
    return result


def deformation_basic_suite(
    seeds: Sequence[int],
    dims: int = 8,
    doubling: bool = False,
    exponent_pool=None,
) -> SuiteResult:
    result = SuiteResult("deform-basic")
    for seed in seeds:
        result.instances += 1
        inst = random_instance(seed, dims=dims, exponent_pool=exponent_pool)
        bound = inst.params["low_bound"]
        try:
            check_deformation_basic(inst.space, inst.d_before, inst.d_after, bound)
            result.checks += 1
            if doubling:
                for diff in (inst.d_before, inst.d_after):
                    _spectrum_stable_under_doubling(
                        FilteredComplex(inst.space, diff), result
                    )
        except Exception as exc:  # noqa: BLE001
            result.record_failure(seed, f"{type(exc).__name__}: {exc}")
    return result


def deformation_cone_suite(
    seeds: Sequence[int],
    dims: int = 6,
    doubling: bool = False,
    exponent_pool=None,
) -> SuiteResult:
    """Both cases of the cone deformation statement; case hypotheses
    that fail on a drawn instance count as skips, not failures."""
    result = SuiteResult("deformation")
    for seed in seeds:
        result.instances += 1
        tight = seed % 5 == 0
        inst = random_instance(
            seed, dims=dims, exponent_pool=exponent_pool, tight_low_bound=tight
        )
        a = inst.params["low_bound"]
        big_a = inst.params["high_bound"]
        try:
            c_before = FilteredComplex(inst.space, inst.d_before)
            c_after = FilteredComplex(inst.space, inst.d_after)
            sigma = max(suggest_sigma(c_before), suggest_sigma(c_after))
            if seed % 3 == 0:
                sigma = 2 * sigma
            for case in (1, 2):
                try:
                    check_deformation_cone(
                        inst.space,
                        inst.d_before,
                        inst.d_after,
                        inst.map_before,
                        inst.map_after,
                        sigma,
                        a,
                        big_a,
                        case,
                    )
                    result.checks += 1
                except HypothesisFailure:
                    result.hypothesis_skips += 1
            if doubling:
                _spectrum_stable_under_doubling(
                    build_cone(c_after, inst.map_after, sigma).cone, result
                )
        except Exception as exc:  # noqa: BLE001
            result.record_failure(seed, f"{type(exc).__name__}: {exc}")
    return result


# ---------------------------------------------------------------------------
# Quantum-ring bounds.


def random_nonneg_filtration(
    rng: random.Random, ring, grid: int = 24
) -> SpectralFiltration:
    """Random realizable filtration: non-negative single-step drops that
    telescope to the disk area across one full wrap of the basis."""
    size = ring.power_basis_size
    units = int(ring.area * grid)
    cuts = sorted(rng.randint(0, units) for _ in range(size - 1))
    drops = []
    prev = 0
    for c in cuts:
        drops.append(Fraction(c - prev, grid))
        prev = c
    drops.append(Fraction(units - prev, grid))  # size drops summing to the area
    start = Fraction(rng.randint(-grid, grid), grid)
    values = [start]
    for d in drops[:-1]:
        values.append(values[-1] - d)
    return SpectralFiltration.build(ring, values, nonneg_mode=True)


def root_bounds_suite(
    seeds: Sequence[int], max_n: int = 4, doubling: bool = False
) -> SuiteResult:
    result = SuiteResult("root-bounds")
    for seed in seeds:
        result.instances += 1
        rng = random.Random(seed)
        family = rng.choice(FAMILIES)
        n = rng.randint(1, max_n)
        ring = cross_ring(family, n)
        filt = random_nonneg_filtration(rng, ring)
        power = rng.randint(1, ring.n)
        try:
            order, codegree = canonical_root_data(ring, power)
            check_root_of_unity_bounds(filt, order, codegree)
            result.checks += 1
            # The point class is always a root of unity as well.
            order_pt, codegree_pt = canonical_root_data(ring, ring.n)
            check_root_of_unity_bounds(filt, order_pt, codegree_pt)
            result.checks += 1
        except NonFiltered as exc:
            result.record_failure(seed, f"NonFiltered: {exc}")
        except Exception as exc:  # noqa: BLE001
            result.record_failure(seed, f"{type(exc).__name__}: {exc}")
    return result


# ---------------------------------------------------------------------------
# Dual-algorithm agreement and transcripts.


def snf_agreement_suite(
    seeds: Sequence[int],
    dims: int = 8,
    doubling: bool = False,
    exponent_pool=None,
) -> SuiteResult:
    """Normal-form reduction versus Smith normal form, plus certificate
    verification by multiplication."""
    from .complexes import reduce_complex, _complex_scaler

    result = SuiteResult("snf-agreement")
    for seed in seeds:
        result.instances += 1
        inst = random_instance(seed, dims=dims, exponent_pool=exponent_pool)
        complex_ = FilteredComplex(inst.space, inst.d_after)
        try:
            red = reduce_complex(complex_)
            peel_finite = sorted(length for _, length in red.pairs)
            snf = length_spectrum(complex_)
            if peel_finite != list(snf.finite):
                raise AssertionError(
                    f"peel spectrum {peel_finite} != snf spectrum {list(snf.finite)}"
                )
            if len(red.infinite) != snf.infinite:
                raise AssertionError("homology dimensions disagree")
            result.checks += 1
            # Certificate: U * M * V equals the diagonal by multiplication,
            # and both transforms are unimodular over the valuation ring.
            prec = complex_.default_precision()
            scaler = _complex_scaler(complex_, [prec])
            cut = scaler.scale(prec) + scaler.scale(complex_.space.spread) + scaler.denominator
            on = engine.on_matrix(
                complex_.differential.matrix,
                complex_.space.filtration,
                complex_.space.filtration,
                scaler,
                cut,
            )
            tr = engine.snf_transcript(on, cut)
            product = engine.m_mul(engine.m_mul(tr.u, on, cut), tr.v, cut)
            if not _matrices_equal(product, tr.diagonal):
                raise AssertionError("U*M*V does not reproduce the diagonal")
            if not _is_diagonal(tr.diagonal):
                raise AssertionError("transcript output is not diagonal")
            for mat, inv in ((tr.u, tr.u_inv), (tr.v, tr.v_inv)):
                if not _in_valuation_ring(mat) or not _in_valuation_ring(inv):
                    raise AssertionError("transform leaves the valuation ring")
                if not _matrices_equal(
                    engine.m_mul(mat, inv, cut), engine.m_identity(len(mat))
                ):
                    raise AssertionError("transform inverse fails to verify")
            result.checks += 1
            if doubling:
                _spectrum_stable_under_doubling(complex_, result)
        except Exception as exc:  # noqa: BLE001
            result.record_failure(seed, f"{type(exc).__name__}: {exc}")
    return result


def _matrices_equal(a, b) -> bool:
    if len(a) != len(b):
        return False
    for ra, rb in zip(a, b):
        if list(ra) != list(rb):
            return False
    return True


def _is_diagonal(m) -> bool:
    for i, row in enumerate(m):
        for j, s in enumerate(row):
            if i != j and s[1]:
                return False
    return True


def _in_valuation_ring(m) -> bool:
    return all(s[0] >= 0 for row in m for s in row if s[1])


# ---------------------------------------------------------------------------
# Bottleneck distance against exhaustive search.


def random_barcode(
    rng: random.Random,
    max_bars: int = 6,
    allow_infinite: bool = True,
    grid: int = 12,
    max_infinite: int = 2,
) -> Barcode:
    """Barcode with at most `max_bars` bars counted with multiplicity;
    kept small so exhaustive matching stays tractable."""
    bars = []
    target = rng.randint(0, max_bars)
    expanded = 0
    infinite_used = 0
    while expanded < target:
        mult = 1 if rng.random() < 0.7 else min(2, target - expanded)
        birth = Fraction(rng.randint(-2 * grid, 2 * grid), grid)
        if allow_infinite and infinite_used + mult <= max_infinite and rng.random() < 0.2:
            bars.append(Bar(birth, INFINITY, mult))
            infinite_used += mult
        else:
            length = Fraction(rng.randint(1, 3 * grid), grid)
            bars.append(Bar(birth, length, mult))
        expanded += mult
    return Barcode.build(bars) if bars else Barcode(())


def exhaustive_bottleneck(barcode1: Barcode, barcode2: Barcode):
    """Reference bottleneck value by enumerating all partial matchings.

    Only feasible for small barcodes; the acceptance suite keeps them at
    six bars or fewer.
    """
    from .persistence import _expand

    finite1, inf1 = _expand(barcode1)
    finite2, inf2 = _expand(barcode2)
    if len(inf1) != len(inf2):
        return INFINITY
    best = None
    index2 = range(len(finite2))
    for perm_inf in permutations(range(len(inf2))):
        inf_cost = Fraction(0)
        for i, j in enumerate(perm_inf):
            inf_cost = max(inf_cost, abs(inf1[i] - inf2[j]))
        for size in range(min(len(finite1), len(finite2)) + 1):
            for chosen1 in _subsets(range(len(finite1)), size):
                for chosen2 in _subsets(index2, size):
                    for perm in permutations(chosen2):
                        cost = inf_cost
                        for i, j in zip(chosen1, perm):
                            b1, d1 = finite1[i]
                            b2, d2 = finite2[j]
                            cost = max(cost, abs(b1 - b2), abs(d1 - d2))
                        for i in range(len(finite1)):
                            if i not in chosen1:
                                b, d = finite1[i]
                                cost = max(cost, Fraction(d - b, 2))
                        for j in range(len(finite2)):
                            if j not in chosen2:
                                b, d = finite2[j]
                                cost = max(cost, Fraction(d - b, 2))
                        if best is None or cost < best:
                            best = cost
    return best if best is not None else Fraction(0)


def _subsets(items, size):
    from itertools import combinations

    return combinations(items, size)


def bottleneck_suite(seeds: Sequence[int], doubling: bool = False) -> SuiteResult:
    result = SuiteResult("bottleneck")
    for seed in seeds:
        result.instances += 1
        rng = random.Random(seed)
        b1 = random_barcode(rng)
        b2 = random_barcode(rng)
        try:
            value, matching = bottleneck(b1, b2)
            reference = exhaustive_bottleneck(b1, b2)
            if value != reference:
                raise AssertionError(f"bottleneck {value} != exhaustive {reference}")
            if not matching.verify():
                raise AssertionError("matching certificate fails verification")
            result.checks += 1
            # Pseudometric spot checks on a third barcode.
            b3 = random_barcode(rng)
            d12, _ = bottleneck(b1, b2)
            d21, _ = bottleneck(b2, b1)
            if d12 != d21:
                raise AssertionError("bottleneck is not symmetric")
            d13, _ = bottleneck(b1, b3)
            d23, _ = bottleneck(b2, b3)
            if d12 != INFINITY and d13 != INFINITY and d23 != INFINITY:
                if d13 > d12 + d23:
                    raise AssertionError("triangle inequality fails")
            result.checks += 1
        except Exception as exc:  # noqa: BLE001
            result.record_failure(seed, f"{type(exc).__name__}: {exc}")
    return result


# ---------------------------------------------------------------------------
# Periodic endpoint counts against wide-range enumeration.


def wide_range_endpoint_count(periodic: PeriodicBarcode, margin: int = 3) -> int:
    """Count endpoints in [0, period) by enumerating many translates."""
    period = periodic.period_action
    endpoints = []
    for code in periodic.window:
        for bar in code:
            for _ in range(bar.multiplicity):
                endpoints.append(bar.birth)
                if bar.finite:
                    endpoints.append(bar.birth + bar.length)
    if not endpoints:
        return 0
    extent = max(abs(e) for e in endpoints)
    radius = int(extent // period) + margin
    count = 0
    for e in endpoints:
        for j in range(-radius, radius + 1):
            if 0 <= e + j * period < period:
                count += 1
    return count


def lsv_suite(seeds: Sequence[int], doubling: bool = False) -> SuiteResult:
    result = SuiteResult("lsv-count")
    for seed in seeds:
        result.instances += 1
        rng = random.Random(seed)
        maslov = rng.randint(1, 4)
        kappa = Fraction(rng.randint(1, 6), 12)
        window = tuple(
            random_barcode(rng, max_bars=4) for _ in range(2 * maslov)
        )
        periodic = PeriodicBarcode(window, kappa)
        try:
            total, in_window, _ = lsv_endpoint_count(periodic)
            reference = wide_range_endpoint_count(periodic)
            if total != reference or in_window != reference:
                raise AssertionError(
                    f"counts {total}/{in_window} != enumeration {reference}"
                )
            result.checks += 1
        except Exception as exc:  # noqa: BLE001
            result.record_failure(seed, f"{type(exc).__name__}: {exc}")
    return result


SUITES: dict[str, Callable] = {
    "separation": separation_suite,
    "deform-basic": deformation_basic_suite,
    "deformation": deformation_cone_suite,
    "root-bounds": root_bounds_suite,
    "snf-agreement": snf_agreement_suite,
    "bottleneck": bottleneck_suite,
    "lsv": lsv_suite,
}


def run_suite(
    name: str,
    seeds: Sequence[int],
    dims: Optional[int] = None,
    doubling: bool = False,
) -> SuiteResult:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    fn = SUITES[name]
    kwargs = {"doubling": doubling}
    if dims is not None and name in ("separation", "deform-basic", "deformation", "snf-agreement"):
        kwargs["dims"] = dims
    return fn(seeds, **kwargs)
