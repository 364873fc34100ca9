"""Exact bar-length spectra of filtered complexes over mod-2 Novikov fields.

The package computes barcodes and bar-length spectra of finite filtered
chain complexes over the universal Novikov field with two-element
coefficients, builds shifted mapping cones and verifies their spectrum
separation, replays quantitative deformation statements on seeded random
instances, computes exact bottleneck distances between barcodes, counts
endpoints of action-periodic barcode families, and evaluates the
closed-form spectral-norm bounds of the four rank-one quantum rings.
"""

from .complexes import (
    Bar,
    Barcode,
    FilteredComplex,
    LengthSpectrum,
    barcode,
    boundary_depth,
    induced_homology_filtration,
    homology_matrix,
    length_spectrum,
    reduce_complex,
    rescale,
    validate,
)
from .cones import (
    ShiftedCone,
    SplitSpectrum,
    build_cone,
    check_deformation_basic,
    check_deformation_cone,
    split_spectrum,
    suggest_sigma,
)
from .cross import (
    CrossRing,
    SpectralFiltration,
    canonical_root_data,
    check_root_of_unity_bounds,
    cross_ring,
    gamma_from_filtration,
    mult_spectrum,
    paper_constants,
    product_bound,
)
from .errors import (
    AssertionFailure,
    FormatError,
    HypothesisFailure,
    MismatchedMaslov,
    NonFiltered,
    NotAUnit,
    NotChainMap,
    NovibarError,
    PrecisionExhausted,
    SeparationFailure,
    ValidationError,
    ValuationOrder,
)
from .instances import Instance, random_instance
from .persistence import (
    Matching,
    PeriodicBarcode,
    bottleneck,
    bottleneck_mod_shift,
    length_multiset,
    lsv_endpoint_count,
    shift_bottleneck,
)
from .scalars import (
    INFINITY,
    NEG_INFINITY,
    NovikovScalar,
    add,
    as_exponent,
    divide_in_ring,
    format_scalar,
    invert_unit,
    mul,
    parse_scalar,
)
from .spaces import (
    FilteredMap,
    FilteredSpace,
    SpectralValueDecomposition,
    spectral_valuations,
    uz_decompose,
)

__version__ = "0.1.0"
