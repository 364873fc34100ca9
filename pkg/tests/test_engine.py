"""The scaled bitmask kernel against the public scalar arithmetic."""

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from novibar import NovikovScalar
from novibar import engine
from novibar.engine import (
    Scaler,
    S_ONE,
    S_ZERO,
    s_add,
    s_div,
    s_inv_unit,
    s_mul,
    s_val,
    scalar_from_series,
    series_from_scalar,
    snf_transcript,
    snf_valuations,
)

CUT = 240  # scaled units
SCALER = Scaler(12)
BAND = SCALER.unscale(CUT)

exponents = st.fractions(min_value=-4, max_value=10, max_denominator=12)
scalars = st.builds(
    lambda exps: NovikovScalar.of(*exps),
    st.lists(exponents, max_size=6),
)


def to_engine(x):
    return series_from_scalar(x, SCALER, CUT)


def from_engine(s):
    return scalar_from_series(s, SCALER, BAND)


@given(scalars, scalars)
@settings(max_examples=200, deadline=None)
def test_engine_add_matches_public(x, y):
    direct = (x + y).truncate(BAND)
    via = from_engine(s_add(to_engine(x), to_engine(y), CUT))
    assert via.terms == direct.terms


@given(scalars, scalars)
@settings(max_examples=200, deadline=None)
def test_engine_mul_matches_public(x, y):
    direct = (x * y).truncate(BAND)
    via = from_engine(s_mul(to_engine(x), to_engine(y), CUT))
    assert {e for e in direct.terms if e < BAND + min(x.valuation(), 0) + min(y.valuation(), 0)} >= set()
    # Products are exact in the quotient ring as long as both factors
    # have non-negative valuation; otherwise compare below the eroded band.
    erosion = max(Fraction(0), -x.valuation() if not x.is_zero() else Fraction(0)) + max(
        Fraction(0), -y.valuation() if not y.is_zero() else Fraction(0)
    )
    keep = BAND - erosion
    assert {e for e in via.terms if e < keep} == {e for e in direct.terms if e < keep}


@given(scalars)
@settings(max_examples=120, deadline=None)
def test_engine_inverse(x):
    if x.is_zero():
        return
    unit = to_engine(x.shift(-x.valuation()))
    inv = s_inv_unit(unit, CUT)
    product = s_mul(unit, inv, CUT)
    assert product == S_ONE


@given(scalars, scalars)
@settings(max_examples=120, deadline=None)
def test_engine_division(x, y):
    if x.is_zero() or y.is_zero():
        return
    a, b = to_engine(x), to_engine(y)
    q = s_div(a, b, CUT)
    # q * b reproduces a below the band eroded by negative valuations.
    back = s_mul(q, b, CUT)
    erosion = max(0, -s_val(a) or 0) + 2 * max(0, -(s_val(b) or 0))
    keep = CUT - erosion - max(0, s_val(b) or 0)
    diff = s_add(back, a, CUT)
    assert diff == S_ZERO or diff[0] >= keep


def _random_matrix(rng, nrows, ncols, density=0.6, max_terms=2):
    rows = []
    for _ in range(nrows):
        row = []
        for _ in range(ncols):
            if rng.random() > density:
                row.append(S_ZERO)
                continue
            terms = {rng.randint(0, 60) for _ in range(rng.randint(1, max_terms))}
            x = NovikovScalar.of(*[Fraction(t, 12) for t in terms])
            row.append(to_engine(x))
        rows.append(row)
    return rows


def test_snf_transcript_certifies():
    rng = random.Random(7)
    for trial in range(40):
        m = _random_matrix(rng, rng.randint(0, 5), rng.randint(0, 5))
        tr = snf_transcript([list(r) for r in m], CUT)
        product = engine.m_mul(engine.m_mul(tr.u, m, CUT), tr.v, CUT)
        assert product == tr.diagonal
        for i, row in enumerate(tr.diagonal):
            for j, entry in enumerate(row):
                assert i == j or entry == S_ZERO
        for mat, inv in ((tr.u, tr.u_inv), (tr.v, tr.v_inv)):
            n = len(mat)
            assert engine.m_mul(mat, inv, CUT) == engine.m_identity(n)
            assert all(s[0] >= 0 for row in mat for s in row if s[1])
        diag_vals = [
            s_val(tr.diagonal[k][k])
            for k in range(tr.pivot_count)
        ]
        assert diag_vals == sorted(diag_vals)
        assert snf_valuations(m, CUT) == diag_vals


def test_snf_conjugation_invariance():
    # Unimodular base changes on either side do not move the valuations.
    rng = random.Random(11)
    for trial in range(25):
        n = rng.randint(1, 4)
        m = _random_matrix(rng, n, n)
        base = snf_valuations([list(r) for r in m], CUT)
        g = engine.m_identity(n)
        for _ in range(4):
            i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
            if i == j:
                continue
            lam = to_engine(NovikovScalar.of(Fraction(rng.randint(0, 12), 12)))
            for c in range(n):
                g[i][c] = s_add(g[i][c], s_mul(lam, g[j][c], CUT), CUT)
        conjugated = engine.m_mul(g, m, CUT)
        assert snf_valuations(conjugated, CUT) == base


def test_reduce_complex_counts():
    # d(y) = T^b z in orthonormal scale: one pair per column plus kernel.
    rng = random.Random(3)
    for trial in range(25):
        pairs = rng.randint(0, 3)
        free = rng.randint(0, 2)
        n = free + 2 * pairs
        if n == 0:
            continue
        mat = [[S_ZERO] * n for _ in range(n)]
        betas = sorted(rng.randint(1, 30) for _ in range(pairs))
        for k in range(pairs):
            mat[free + pairs + k][free + k] = (betas[k], 1)
        filt = [rng.randint(0, 10) for _ in range(n)]
        red = engine.reduce_complex(mat, filt, CUT)
        assert sorted(p.beta for p in red.pairs) == betas
        assert len(red.xi_slots) == free
