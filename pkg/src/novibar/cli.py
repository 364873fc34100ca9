"""Command-line surface.

Subcommands cover validation, barcodes, cones and spectrum splitting,
the deformation checkers, barcode distances, periodic endpoint counts,
the quantum-ring calculators, seeded verification suites, and a static
SVG plot.  Exit codes: 0 success, 1 violated hypothesis or precondition,
2 failed internal assertion (a bug detector firing), 3 malformed input.
Output is deterministic for fixed inputs and seeds; `--format machine`
emits plain key=value lines.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import docio, svg
from .complexes import FilteredComplex, barcode, boundary_depth, validate
from .cones import build_cone, check_deformation_basic, check_deformation_cone, split_spectrum, suggest_sigma
from .cross import (
    canonical_root_data,
    check_root_of_unity_bounds,
    cross_ring,
    gamma_from_filtration,
    mult_spectrum,
    paper_constants,
    product_bound,
    SpectralFiltration,
)
from .errors import (
    AssertionFailure,
    FormatError,
    HypothesisError,
    InputError,
    NovibarError,
)
from .persistence import bottleneck, lsv_endpoint_count, shift_bottleneck
from .scalars import INFINITY, as_exponent, format_exponent
from .suites import SUITES, run_suite


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - map argparse errors to exit 3
        raise FormatError(message)


def _emit(args, key, value) -> None:
    print(f"{key}={value}")


def _fmt_frac(x) -> str:
    return format_exponent(x)


def _print_spectrum(args, prefix, spectrum) -> None:
    _emit(args, f"{prefix}.finite", ",".join(str(v) for v in spectrum.finite))
    _emit(args, f"{prefix}.infinite", spectrum.infinite)


def _print_barcode(args, code) -> None:
    _emit(args, "bars", len(code.bars))
    for k, bar in enumerate(code.bars):
        _emit(args, f"bar.{k}.birth", _fmt_frac(bar.birth))
        _emit(args, f"bar.{k}.length", _fmt_frac(bar.length))
        _emit(args, f"bar.{k}.multiplicity", bar.multiplicity)
        if bar.degree is not None:
            _emit(args, f"bar.{k}.degree", bar.degree)


def _precision_arg(args):
    if getattr(args, "precision", None) is None:
        return None
    return as_exponent(args.precision)


def _cmd_validate(args) -> int:
    doc = docio.load_complex(args.file)
    report = validate(doc.complex)
    _emit(args, "valid", str(report.ok).lower())
    for k, violation in enumerate(report.violations):
        _emit(args, f"violation.{k}.kind", violation.kind)
        _emit(args, f"violation.{k}.witness", violation.witness)
        _emit(args, f"violation.{k}.detail", violation.detail)
    for k, name in enumerate(report.strictness_flags):
        _emit(args, f"non_strict.{k}", name)
    if report.null_pairs is not None:
        _emit(args, "null_pairs", report.null_pairs)
    return 0


def _cmd_barcode(args) -> int:
    doc = docio.load_complex(args.file)
    precision = _precision_arg(args) or doc.precision
    code = barcode(doc.complex, precision)
    _print_barcode(args, code)
    _emit(args, "boundary_depth", _fmt_frac(code.spectrum().boundary_depth))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(docio.dump_json(docio.barcode_to_document(code)))
    return 0


def _cmd_cone(args) -> int:
    doc = docio.load_complex(args.file)
    chain_map = doc.map_named(args.map)
    sigma = (
        Fraction(as_exponent(args.sigma))
        if args.sigma is not None
        else suggest_sigma(doc.complex)
    )
    shifted = build_cone(doc.complex, chain_map, sigma)
    _emit(args, "sigma", _fmt_frac(sigma))
    precision = _precision_arg(args) or doc.complex.default_precision(sigma)
    code = barcode(shifted.cone, precision)
    _print_barcode(args, code)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(
                docio.dump_json(docio.complex_to_document(shifted.cone))
            )
    return 0


def _cmd_split(args) -> int:
    doc = docio.load_complex(args.file)
    chain_map = doc.map_named(args.map)
    sigma = (
        Fraction(as_exponent(args.sigma))
        if args.sigma is not None
        else suggest_sigma(doc.complex)
    )
    shifted = build_cone(doc.complex, chain_map, sigma)
    parts = split_spectrum(shifted, _precision_arg(args))
    _emit(args, "sigma", _fmt_frac(sigma))
    _print_spectrum(args, "low", parts.low)
    _print_spectrum(args, "high", parts.high)
    return 0


def _cmd_deform_basic(args) -> int:
    doc = docio.load_complex(args.file)
    d_before = doc.map_named(args.before)
    report = check_deformation_basic(
        doc.complex.space,
        d_before,
        doc.complex.differential,
        args.bound,
        _precision_arg(args),
    )
    _emit(args, "bound", _fmt_frac(report.bound))
    _emit(args, "perturbation_valuation", _fmt_frac(report.perturbation_valuation))
    _emit(args, "matched", ",".join(str(v) for v in report.matched))
    _print_spectrum(args, "before", report.spectrum_before)
    _print_spectrum(args, "after", report.spectrum_after)
    return 0


def _cmd_deform_cone(args) -> int:
    doc = docio.load_complex(args.file)
    d_before = doc.map_named(args.before)
    map_after = doc.map_named(args.map)
    map_before = doc.map_named(args.map_before)
    space = doc.complex.space
    if args.sigma is not None:
        sigma = Fraction(as_exponent(args.sigma))
    else:
        sigma = max(
            suggest_sigma(FilteredComplex(space, d_before)),
            suggest_sigma(doc.complex),
        )
    report = check_deformation_cone(
        space,
        d_before,
        doc.complex.differential,
        map_before,
        map_after,
        sigma,
        args.low_bound,
        args.high_bound,
        args.case,
        _precision_arg(args),
    )
    _emit(args, "case", report.case)
    _emit(args, "sigma", _fmt_frac(report.sigma))
    _emit(args, "verified_index", report.verified_index)
    _emit(args, "low.before", ",".join(str(v) for v in report.low_before))
    _emit(args, "low.after", ",".join(str(v) for v in report.low_after))
    _emit(args, "high.before", ",".join(str(v) for v in report.high_before))
    _emit(args, "high.after", ",".join(str(v) for v in report.high_after))
    return 0


def _cmd_bottleneck(args, mod_shift_default: bool = False) -> int:
    left = docio.load_barcode(args.file1)
    right = docio.load_barcode(args.file2)
    if mod_shift_default or getattr(args, "mod_shift", False):
        value, shift = shift_bottleneck(left, right)
        _emit(args, "distance", _fmt_frac(value))
        _emit(args, "shift", _fmt_frac(shift))
        return 0
    value, matching = bottleneck(left, right)
    _emit(args, "distance", _fmt_frac(value))
    _emit(args, "matched_pairs", len(matching.pairs))
    _emit(args, "deleted", len(matching.unmatched_left) + len(matching.unmatched_right))
    if getattr(args, "certificate", None):
        import json

        with open(args.certificate, "w", encoding="utf-8") as handle:
            json.dump(matching.to_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")
    return 0


def _cmd_lsv(args) -> int:
    periodic = docio.load_periodic(args.file)
    total, in_window, report = lsv_endpoint_count(periodic)
    _emit(args, "period_action", _fmt_frac(periodic.period_action))
    _emit(args, "endpoints_total", total)
    _emit(args, "endpoints_in_window", in_window)
    for k, count in enumerate(report.per_index):
        _emit(args, f"per_index.{k}", count)
    return 0


def _filtration_from_arg(ring, text: str, nonneg: bool) -> SpectralFiltration:
    values = [piece.strip() for piece in text.split(",") if piece.strip()]
    return SpectralFiltration.build(ring, values, nonneg_mode=nonneg)


def _cmd_mult_spectrum(args) -> int:
    ring = cross_ring(args.family, args.n)
    filt = _filtration_from_arg(ring, args.filtration, args.nonneg)
    spectrum = mult_spectrum(filt, args.power)
    _emit(args, "family", ring.family)
    _emit(args, "n", ring.n)
    _emit(args, "power", args.power)
    _emit(args, "spectrum", ",".join(str(v) for v in spectrum.finite))
    _emit(args, "gamma", _fmt_frac(gamma_from_filtration(filt)))
    return 0


def _cmd_root_bounds(args) -> int:
    ring = cross_ring(args.family, args.n)
    filt = _filtration_from_arg(ring, args.filtration, nonneg=True)
    if args.m is not None and args.k is not None:
        order, codegree = args.m, Fraction(as_exponent(args.k))
    else:
        order, codegree = canonical_root_data(ring, args.power)
    report = check_root_of_unity_bounds(filt, order, codegree)
    _emit(args, "order", report.order)
    _emit(args, "codegree", _fmt_frac(report.codegree))
    _emit(args, "class_power", report.class_power)
    _emit(args, "spectrum", ",".join(str(v) for v in report.spectrum))
    _emit(args, "telescoping", _fmt_frac(report.telescoping))
    _emit(args, "top_bound", _fmt_frac(report.top_bound))
    _emit(args, "low_bound", _fmt_frac(report.low_bound))
    _emit(args, "ok", "true")
    return 0


def _cmd_cross_bounds(args) -> int:
    ring = cross_ring(args.family, args.n)
    constants = paper_constants(ring)
    _emit(args, "family", ring.family)
    _emit(args, "n", ring.n)
    _emit(args, "n_L", ring.dimension)
    _emit(args, "N_L", ring.maslov)
    _emit(args, "c", constants.c)
    _emit(args, "beta_bound", constants.beta_bound)
    _emit(args, "gamma_bound", constants.gamma_bound)
    _emit(args, "C", constants.linear_constant)
    _emit(args, "s_star", constants.s_star)
    return 0


def _cmd_product_bound(args) -> int:
    rings = []
    for piece in args.factors.split(","):
        part = piece.strip()
        if not part:
            continue
        if ":" not in part:
            raise FormatError(f"factor {part!r} must look like family:n")
        family, _, n_text = part.partition(":")
        try:
            n = int(n_text)
        except ValueError as exc:
            raise FormatError(f"factor {part!r}: bad n") from exc
        rings.append(cross_ring(family, n))
    value = product_bound(rings, args.beta)
    _emit(args, "factors", len(rings))
    _emit(args, "beta", _fmt_frac(Fraction(as_exponent(args.beta))))
    _emit(args, "bound", value)
    return 0


def _cmd_random_suite(args) -> int:
    seeds = range(args.seed_base, args.seed_base + args.seeds)
    result = run_suite(args.prop, seeds, dims=args.dims, doubling=args.check_doubling)
    _emit(args, "suite", result.name)
    _emit(args, "instances", result.instances)
    _emit(args, "checks", result.checks)
    _emit(args, "failures", len(result.failures))
    _emit(args, "hypothesis_skips", result.hypothesis_skips)
    _emit(args, "doubling_mismatches", result.doubling_mismatches)
    for seed, message in result.failures[:10]:
        _emit(args, f"failure.{seed}", message)
    if not result.ok:
        raise AssertionFailure(f"suite {result.name} recorded failures")
    return 0


def _cmd_plot(args) -> int:
    code = docio.load_barcode(args.file)
    rendered = svg.render_barcode_svg(code)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(rendered)
    _emit(args, "written", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="novibar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, precision=True):
        p.add_argument("--format", choices=("text", "machine"), default="text")
        if precision:
            p.add_argument("--precision", help="working precision bound (rational)")

    p = sub.add_parser("validate", help="check a complex document")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("barcode", help="barcode of a complex")
    p.add_argument("file")
    p.add_argument("--out", help="write the barcode document here")
    common(p)
    p.set_defaults(func=_cmd_barcode)

    p = sub.add_parser("cone", help="build a shifted cone and print its barcode")
    p.add_argument("file")
    p.add_argument("--map", required=True, help="name of the chain map in the document")
    p.add_argument("--sigma", help="shift (default: suggested threshold)")
    p.add_argument("--out", help="write the cone complex document here")
    common(p)
    p.set_defaults(func=_cmd_cone)

    p = sub.add_parser("split", help="split a cone spectrum at sigma")
    p.add_argument("file")
    p.add_argument("--map", required=True)
    p.add_argument("--sigma")
    common(p)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("deform-basic", help="below-bound spectrum agreement")
    p.add_argument("file")
    p.add_argument("--before", default="d0", help="name of the unperturbed differential")
    p.add_argument("--bound", required=True, help="valuation floor of the perturbation")
    common(p)
    p.set_defaults(func=_cmd_deform_basic)

    p = sub.add_parser("deform-cone", help="cone deformation check, one case")
    p.add_argument("file")
    p.add_argument("--before", default="d0")
    p.add_argument("--map", default="D", help="chain map for the perturbed differential")
    p.add_argument("--map-before", default="D0", dest="map_before")
    p.add_argument("--a", required=True, dest="low_bound")
    p.add_argument("--A", required=True, dest="high_bound")
    p.add_argument("--case", type=int, choices=(1, 2), required=True)
    p.add_argument("--sigma")
    common(p)
    p.set_defaults(func=_cmd_deform_cone)

    p = sub.add_parser("bottleneck", help="bottleneck distance of two barcodes")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--mod-shift", action="store_true", dest="mod_shift")
    p.add_argument("--certificate", help="write the matching certificate here")
    common(p, precision=False)
    p.set_defaults(func=_cmd_bottleneck)

    p = sub.add_parser("bottleneck-shift", help="shift-quotient bottleneck distance")
    p.add_argument("file1")
    p.add_argument("file2")
    common(p, precision=False)
    p.set_defaults(func=lambda a: _cmd_bottleneck(a, mod_shift_default=True))

    p = sub.add_parser("lsv-count", help="periodic endpoint counting identity")
    p.add_argument("file")
    common(p, precision=False)
    p.set_defaults(func=_cmd_lsv)

    p = sub.add_parser("mult-spectrum", help="multiplication spectrum of a power class")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--filtration", required=True, help="comma-separated levels c_0..c_n")
    p.add_argument("--power", type=int, required=True)
    p.add_argument("--nonneg", action="store_true")
    common(p, precision=False)
    p.set_defaults(func=_cmd_mult_spectrum)

    p = sub.add_parser("root-bounds", help="quantum root-of-unity bound check")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--filtration", required=True)
    p.add_argument("--power", type=int, default=1, help="which power class to check")
    p.add_argument("--m", type=int, help="root order (with --k overrides --power)")
    p.add_argument("--k", help="codegree for the bound formulas")
    common(p, precision=False)
    p.set_defaults(func=_cmd_root_bounds)

    p = sub.add_parser("cross-bounds", help="closed-form constants of a ring")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    common(p, precision=False)
    p.set_defaults(func=_cmd_cross_bounds)

    p = sub.add_parser("product-bound", help="norm bound for a product of factors")
    p.add_argument("--factors", required=True, help="comma list like sn:1,sn:1")
    p.add_argument("--beta", required=True)
    common(p, precision=False)
    p.set_defaults(func=_cmd_product_bound)

    p = sub.add_parser("random-suite", help="seeded verification sweep")
    p.add_argument("--prop", required=True, choices=sorted(SUITES))
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--seed-base", type=int, default=0, dest="seed_base")
    p.add_argument("--dims", type=int, default=None)
    p.add_argument("--check-doubling", action="store_true", dest="check_doubling")
    common(p, precision=False)
    p.set_defaults(func=_cmd_random_suite)

    p = sub.add_parser("plot", help="render a barcode to SVG")
    p.add_argument("file")
    p.add_argument("-o", "--out", required=True)
    common(p, precision=False)
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (FormatError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except AssertionFailure as exc:
        print(f"assertion failure (bug detector): {exc}", file=sys.stderr)
        return 2
    except HypothesisError as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return 1
    except NovibarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
